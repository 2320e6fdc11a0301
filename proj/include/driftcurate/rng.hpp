#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <vector>

namespace driftcurate {

// mt19937_64 has a byte-exact output sequence fixed by the standard; the
// draws below avoid std::*_distribution and std::shuffle, whose algorithms
// are implementation-defined and would break seeded reproducibility.
class Rng {
 public:
  explicit Rng(uint64_t seed) : engine_(seed) {}

  uint64_t next_u64() { return engine_(); }

  // Unbiased draw in [0, n) via 128-bit multiply with rejection.
  uint64_t bounded(uint64_t n) {
    if (n == 0) return 0;
    while (true) {
      uint64_t x = next_u64();
      __uint128_t m = static_cast<__uint128_t>(x) * n;
      uint64_t lo = static_cast<uint64_t>(m);
      if (lo < n) {
        uint64_t floor = (0 - n) % n;
        if (lo < floor) continue;
      }
      return static_cast<uint64_t>(m >> 64);
    }
  }

  // 53-bit uniform in [0, 1).
  double uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  // Box-Muller; consumes two uniforms per pair, caches the second draw.
  double gaussian() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double u1 = uniform01();
    double u2 = uniform01();
    // keep log argument strictly positive
    double r = std::sqrt(-2.0 * std::log(1.0 - u1));
    double theta = 2.0 * std::numbers::pi * u2;
    spare_ = r * std::sin(theta);
    has_spare_ = true;
    return r * std::cos(theta);
  }

 private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

inline std::vector<size_t> permutation(Rng& rng, size_t n) {
  std::vector<size_t> idx(n);
  for (size_t i = 0; i < n; ++i) idx[i] = i;
  for (size_t i = n; i > 1; --i) {
    size_t j = static_cast<size_t>(rng.bounded(i));
    std::swap(idx[i - 1], idx[j]);
  }
  return idx;
}

// k distinct indices from [0, population), in draw order.
inline std::vector<size_t> sample_without_replacement(Rng& rng, size_t population, size_t k) {
  std::vector<size_t> idx(population);
  for (size_t i = 0; i < population; ++i) idx[i] = i;
  std::vector<size_t> picks;
  picks.reserve(k);
  for (size_t i = 0; i < k && i < population; ++i) {
    size_t j = i + static_cast<size_t>(rng.bounded(population - i));
    std::swap(idx[i], idx[j]);
    picks.push_back(idx[i]);
  }
  return picks;
}

}  // namespace driftcurate
