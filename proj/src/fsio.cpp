#include "driftcurate/fsio.hpp"

#include <fstream>
#include <system_error>

#include "driftcurate/error.hpp"

namespace fs = std::filesystem;

namespace driftcurate::io {

std::string read_binary_file(const fs::path& path) {
  std::error_code ec;
  if (!fs::exists(path, ec) || ec) {
    fail(ErrorCode::missing_file, "no such file: " + path.string());
  }
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    fail(ErrorCode::io_failure, "cannot open for reading: " + path.string());
  }
  std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (in.bad()) {
    fail(ErrorCode::io_failure, "read failed: " + path.string());
  }
  return bytes;
}

void write_file_atomic(const fs::path& path, std::string_view bytes) {
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) {
      fail(ErrorCode::io_failure, "cannot open for writing: " + tmp.string());
    }
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    out.flush();
    if (!out) {
      std::error_code ec;
      fs::remove(tmp, ec);
      fail(ErrorCode::io_failure, "write failed: " + tmp.string());
    }
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) {
    fs::remove(tmp, ec);
    fail(ErrorCode::io_failure, "rename failed: " + path.string());
  }
}

}  // namespace driftcurate::io
