#include "driftcurate/tensor.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <string>

#include "driftcurate/error.hpp"
#include "driftcurate/fsio.hpp"

namespace fs = std::filesystem;

namespace driftcurate::io {

namespace {

constexpr char kMagic[4] = {'F', 'T', 'E', 'N'};
constexpr size_t kHeaderBytes = 8 + 3 * 4;

uint32_t read_u32le(const std::string& bytes, size_t pos) {
  return static_cast<uint32_t>(static_cast<uint8_t>(bytes[pos])) |
         static_cast<uint32_t>(static_cast<uint8_t>(bytes[pos + 1])) << 8 |
         static_cast<uint32_t>(static_cast<uint8_t>(bytes[pos + 2])) << 16 |
         static_cast<uint32_t>(static_cast<uint8_t>(bytes[pos + 3])) << 24;
}

void append_u32le(std::string& out, uint32_t v) {
  out += static_cast<char>(v & 0xff);
  out += static_cast<char>((v >> 8) & 0xff);
  out += static_cast<char>((v >> 16) & 0xff);
  out += static_cast<char>((v >> 24) & 0xff);
}

}  // namespace

void validate_feature_map(const FeatureMap& map) {
  if (map.channels == 0 || map.height == 0 || map.width == 0) {
    fail(ErrorCode::zero_dim, "feature map dims must be positive");
  }
  uint64_t count = static_cast<uint64_t>(map.channels) * map.height * map.width;
  if (map.data.size() != count) {
    fail(ErrorCode::dim_mismatch, "feature map data length does not match dims");
  }
  for (float v : map.data) {
    if (!std::isfinite(v)) fail(ErrorCode::range_error, "feature map holds a non-finite value");
  }
}

FeatureMap read_tensor(const fs::path& path, uint64_t element_cap) {
  const std::string bytes = read_binary_file(path);
  if (bytes.size() < 4 || std::memcmp(bytes.data(), kMagic, 4) != 0) {
    fail(ErrorCode::bad_magic, "not an FTEN file: " + path.string());
  }
  if (bytes.size() < kHeaderBytes) {
    fail(ErrorCode::truncated_payload, "header truncated: " + path.string());
  }
  const uint8_t version = static_cast<uint8_t>(bytes[4]);
  const uint8_t dtype = static_cast<uint8_t>(bytes[5]);
  const uint8_t ndim = static_cast<uint8_t>(bytes[6]);
  const uint8_t reserved = static_cast<uint8_t>(bytes[7]);
  if (version != 1) {
    fail(ErrorCode::unsupported_version, "version " + std::to_string(version) + ", expected 1");
  }
  if (dtype != 1 || ndim != 3 || reserved != 0) {
    fail(ErrorCode::unsupported_version,
         "unsupported dtype/ndim/reserved combination in " + path.string());
  }

  FeatureMap map;
  map.channels = read_u32le(bytes, 8);
  map.height = read_u32le(bytes, 12);
  map.width = read_u32le(bytes, 16);
  if (map.channels == 0 || map.height == 0 || map.width == 0) {
    fail(ErrorCode::zero_dim, "zero dimension in " + path.string());
  }
  const uint64_t count = static_cast<uint64_t>(map.channels) * map.height * map.width;
  if (count > element_cap) {
    fail(ErrorCode::dim_overflow, "element count " + std::to_string(count) + " exceeds cap " +
                                      std::to_string(element_cap));
  }
  const uint64_t payload = count * 4;
  if (bytes.size() - kHeaderBytes < payload) {
    fail(ErrorCode::truncated_payload,
         "payload holds " + std::to_string(bytes.size() - kHeaderBytes) + " bytes, need " +
             std::to_string(payload) + ": " + path.string());
  }
  if (bytes.size() - kHeaderBytes > payload) {
    fail(ErrorCode::io_failure, "trailing bytes after payload: " + path.string());
  }

  map.data.resize(count);
  for (uint64_t i = 0; i < count; ++i) {
    map.data[i] = std::bit_cast<float>(read_u32le(bytes, kHeaderBytes + i * 4));
  }
  validate_feature_map(map);
  return map;
}

void write_tensor(const FeatureMap& map, const fs::path& path) {
  validate_feature_map(map);
  std::string out;
  out.reserve(kHeaderBytes + map.data.size() * 4);
  out.append(kMagic, 4);
  out += static_cast<char>(1);  // version
  out += static_cast<char>(1);  // dtype f32
  out += static_cast<char>(3);  // ndim
  out += static_cast<char>(0);  // reserved
  append_u32le(out, map.channels);
  append_u32le(out, map.height);
  append_u32le(out, map.width);
  for (float v : map.data) {
    append_u32le(out, std::bit_cast<uint32_t>(v));
  }
  write_file_atomic(path, out);
}

}  // namespace driftcurate::io
