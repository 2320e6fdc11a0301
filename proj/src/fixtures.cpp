#include "driftcurate/fixtures.hpp"

#include <algorithm>
#include <cstdio>
#include <vector>

#include "driftcurate/error.hpp"
#include "driftcurate/manifest.hpp"
#include "driftcurate/pnm.hpp"

namespace driftcurate::fixtures {

namespace {

double smoothstep(double t) { return t * t * (3.0 - 2.0 * t); }

void add_octave(io::GrayPlane& acc, Rng& rng, int cell, double amplitude) {
  const int nodes_y = acc.height / cell + 2;
  const int nodes_x = acc.width / cell + 2;
  std::vector<double> lattice(static_cast<size_t>(nodes_y) * nodes_x);
  for (double& v : lattice) v = rng.uniform01();
  const auto node = [&](int gy, int gx) {
    return lattice[static_cast<size_t>(gy) * nodes_x + gx];
  };
  for (int i = 0; i < acc.height; ++i) {
    const int gy = i / cell;
    const double ty = smoothstep(static_cast<double>(i % cell) / cell);
    for (int j = 0; j < acc.width; ++j) {
      const int gx = j / cell;
      const double tx = smoothstep(static_cast<double>(j % cell) / cell);
      const double top = node(gy, gx) + tx * (node(gy, gx + 1) - node(gy, gx));
      const double bottom = node(gy + 1, gx) + tx * (node(gy + 1, gx + 1) - node(gy + 1, gx));
      acc.at(i, j) += amplitude * (top + ty * (bottom - top));
    }
  }
}

}  // namespace

io::GrayPlane value_noise_texture(uint64_t seed, int size) {
  if (size < 8) {
    fail(ErrorCode::degenerate_dims, "texture size must be >= 8");
  }
  Rng rng(seed);
  io::GrayPlane plane = io::make_plane(size, size);
  double amplitude = 1.0;
  for (int cell : {32, 16, 8, 4}) {
    add_octave(plane, rng, std::min(cell, size / 2), amplitude);
    amplitude *= 0.5;
  }
  const auto [lo_it, hi_it] = std::minmax_element(plane.values.begin(), plane.values.end());
  const double lo = *lo_it;
  const double range = *hi_it - lo;
  for (double& v : plane.values) {
    // quotient first: (v - lo) / range <= 1 exactly, so the product stays
    // inside [0, 255] with no clamp
    v = range > 0.0 ? 255.0 * ((v - lo) / range) : 128.0;
  }
  return plane;
}

io::GrayPlane median_mask(const io::GrayPlane& texture) {
  io::validate_plane(texture);
  std::vector<double> sorted = texture.values;
  std::nth_element(sorted.begin(), sorted.begin() + sorted.size() / 2, sorted.end());
  const double median = sorted[sorted.size() / 2];
  io::GrayPlane mask = io::make_plane(texture.height, texture.width);
  for (size_t i = 0; i < mask.values.size(); ++i) {
    mask.values[i] = texture.values[i] >= median ? 255.0 : 0.0;
  }
  return mask;
}

io::FeatureMap cluster_feature_map(Rng& rng, bool positive, uint32_t channels, int size) {
  if (channels == 0 || size < 1) {
    fail(ErrorCode::degenerate_dims, "feature map needs channels >= 1, size >= 1");
  }
  static constexpr double kMeans[4] = {2.0, -1.0, 0.5, 1.5};
  io::FeatureMap map;
  map.channels = channels;
  map.height = static_cast<uint32_t>(size);
  map.width = static_cast<uint32_t>(size);
  map.data.resize(static_cast<size_t>(channels) * size * size);
  size_t idx = 0;
  for (uint32_t ch = 0; ch < channels; ++ch) {
    const double mean = (positive ? 1.0 : -1.0) * kMeans[ch % 4];
    for (int p = 0; p < size * size; ++p) {
      map.data[idx++] = static_cast<float>(mean + 0.3 * rng.gaussian());
    }
  }
  return map;
}

void generate_corpus(const std::filesystem::path& out_dir, const CorpusOptions& options) {
  if (options.count < 1) {
    fail(ErrorCode::invalid_argument, "corpus count must be positive");
  }
  std::error_code ec;
  for (const char* sub : {"images", "masks", "maps"}) {
    std::filesystem::create_directories(out_dir / sub, ec);
    if (ec) fail(ErrorCode::io_failure, "cannot create " + (out_dir / sub).string());
  }
  io::DatasetManifest manifest;
  for (int i = 0; i < options.count; ++i) {
    char name[16];
    std::snprintf(name, sizeof(name), "tex%03d", i);
    const uint64_t entry_seed =
        options.seed * 6364136223846793005ull + static_cast<uint64_t>(i) + 1442695040888963407ull;

    const io::GrayPlane texture = value_noise_texture(entry_seed, options.texture_size);
    io::Image img;
    img.width = texture.width;
    img.height = texture.height;
    img.channels = 1;
    img.pixels = texture.values;
    io::save_image(img, out_dir / "images" / (std::string(name) + ".pgm"));

    io::Image mask_img;
    const io::GrayPlane mask = median_mask(texture);
    mask_img.width = mask.width;
    mask_img.height = mask.height;
    mask_img.channels = 1;
    mask_img.pixels = mask.values;
    io::save_image(mask_img, out_dir / "masks" / (std::string(name) + ".pgm"));

    Rng map_rng(entry_seed ^ 0x9e3779b97f4a7c15ull);
    const io::FeatureMap map =
        cluster_feature_map(map_rng, i % 2 == 0, options.map_channels, options.map_size);
    io::write_tensor(map, out_dir / "maps" / (std::string(name) + ".ften"));

    io::ManifestEntry entry;
    entry.id = name;
    entry.image_path = std::string("images/") + name + ".pgm";
    entry.mask_path = std::string("masks/") + name + ".pgm";
    entry.feature_path = std::string("maps/") + name + ".ften";
    manifest.entries.push_back(std::move(entry));
  }
  io::save_manifest(manifest, out_dir / "manifest.json");
}

}  // namespace driftcurate::fixtures
