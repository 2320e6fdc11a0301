#include "driftcurate/pnm.hpp"

#include <cctype>
#include <cmath>
#include <cstdint>
#include <string>

#include "driftcurate/error.hpp"
#include "driftcurate/fsio.hpp"

namespace fs = std::filesystem;

namespace driftcurate::io {

namespace {

constexpr int kMaxDim = 1 << 20;

struct HeaderCursor {
  const std::string& bytes;
  size_t pos = 0;

  bool eof() const { return pos >= bytes.size(); }
  char peek() const { return bytes[pos]; }

  // Skips whitespace and '#' comments (which run to end of line).
  void skip_separators() {
    while (!eof()) {
      char ch = bytes[pos];
      if (std::isspace(static_cast<unsigned char>(ch))) {
        ++pos;
      } else if (ch == '#') {
        while (!eof() && bytes[pos] != '\n') ++pos;
      } else {
        break;
      }
    }
  }

  int read_int(const char* what) {
    skip_separators();
    if (eof() || !std::isdigit(static_cast<unsigned char>(bytes[pos]))) {
      fail(ErrorCode::malformed_header, std::string("expected integer for ") + what);
    }
    long value = 0;
    while (!eof() && std::isdigit(static_cast<unsigned char>(bytes[pos]))) {
      value = value * 10 + (bytes[pos] - '0');
      if (value > kMaxDim * 4L) {
        fail(ErrorCode::malformed_header, std::string(what) + " out of range");
      }
      ++pos;
    }
    return static_cast<int>(value);
  }
};

}  // namespace

Image load_image(const fs::path& path) {
  const std::string bytes = read_binary_file(path);
  if (bytes.size() < 2 || bytes[0] != 'P' || (bytes[1] != '5' && bytes[1] != '6')) {
    fail(ErrorCode::malformed_header, "not a binary PGM/PPM (P5/P6): " + path.string());
  }
  const int channels = bytes[1] == '5' ? 1 : 3;

  HeaderCursor cur{bytes, 2};
  const int width = cur.read_int("width");
  const int height = cur.read_int("height");
  const int maxval = cur.read_int("maxval");
  if (width <= 0 || height <= 0 || width > kMaxDim || height > kMaxDim) {
    fail(ErrorCode::malformed_header, "bad dimensions in " + path.string());
  }
  if (maxval != 255) {
    fail(ErrorCode::malformed_header,
         "maxval must be 255, got " + std::to_string(maxval) + " in " + path.string());
  }
  // exactly one whitespace byte separates the header from the payload
  if (cur.eof() || !std::isspace(static_cast<unsigned char>(cur.peek()))) {
    fail(ErrorCode::malformed_header, "missing payload separator in " + path.string());
  }
  const size_t payload_start = cur.pos + 1;

  const size_t expected =
      static_cast<size_t>(width) * static_cast<size_t>(height) * static_cast<size_t>(channels);
  if (bytes.size() < payload_start || bytes.size() - payload_start < expected) {
    fail(ErrorCode::truncated_payload,
         "payload holds " + std::to_string(bytes.size() - payload_start) + " bytes, need " +
             std::to_string(expected) + ": " + path.string());
  }

  Image img;
  img.width = width;
  img.height = height;
  img.channels = channels;
  img.pixels.resize(expected);
  for (size_t i = 0; i < expected; ++i) {
    img.pixels[i] = static_cast<double>(static_cast<uint8_t>(bytes[payload_start + i]));
  }
  return img;
}

void save_image(const Image& img, const fs::path& path) {
  validate_image(img);
  std::string out;
  out.reserve(img.pixels.size() + 32);
  out += img.channels == 1 ? "P5\n" : "P6\n";
  out += std::to_string(img.width) + " " + std::to_string(img.height) + "\n255\n";
  for (double v : img.pixels) {
    long q = std::lround(v);
    if (q < 0) q = 0;
    if (q > 255) q = 255;
    out += static_cast<char>(static_cast<uint8_t>(q));
  }
  write_file_atomic(path, out);
}

GrayPlane load_binary_mask(const fs::path& path) {
  Image img = load_image(path);
  if (img.channels != 1) {
    fail(ErrorCode::malformed_header, "mask must be single-channel PGM: " + path.string());
  }
  GrayPlane plane = make_plane(img.height, img.width);
  for (size_t i = 0; i < img.pixels.size(); ++i) {
    plane.values[i] = img.pixels[i] >= 128.0 ? 1.0 : 0.0;
  }
  return plane;
}

GrayPlane load_probability_mask(const fs::path& path) {
  Image img = load_image(path);
  if (img.channels != 1) {
    fail(ErrorCode::malformed_header, "probability mask must be single-channel PGM: " + path.string());
  }
  GrayPlane plane = make_plane(img.height, img.width);
  for (size_t i = 0; i < img.pixels.size(); ++i) {
    plane.values[i] = img.pixels[i] / 255.0;
  }
  return plane;
}

}  // namespace driftcurate::io
