#pragma once

#include <filesystem>
#include <functional>
#include <string>

#include "driftcurate/error.hpp"
#include "driftcurate/image.hpp"

// Scratch directory under the system temp root, wiped on entry and exit.
struct TempDir {
  std::filesystem::path path;

  explicit TempDir(const std::string& name)
      : path(std::filesystem::temp_directory_path() / ("driftcurate_test_" + name)) {
    std::filesystem::remove_all(path);
    std::filesystem::create_directories(path);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  std::filesystem::path file(const std::string& name) const { return path / name; }
};

inline driftcurate::io::GrayPlane plane_of(int height, int width,
                                           std::initializer_list<double> values) {
  driftcurate::io::GrayPlane p = driftcurate::io::make_plane(height, width);
  size_t i = 0;
  for (double v : values) p.values[i++] = v;
  return p;
}

// true iff fn throws a driftcurate::Error carrying exactly this code
inline bool raises(driftcurate::ErrorCode code, const std::function<void()>& fn) {
  try {
    fn();
  } catch (const driftcurate::Error& err) {
    return err.code() == code;
  }
  return false;
}
