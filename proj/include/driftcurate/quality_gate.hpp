#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include "driftcurate/brisque.hpp"
#include "driftcurate/manifest.hpp"

namespace driftcurate::gate {

enum class Polarity { higher_is_better, lower_is_better };

struct SelectionThreshold {
  double t = 0.0;
  Polarity polarity = Polarity::lower_is_better;
};

// Exact partition of the input: every entry lands in one side, order kept.
struct SelectionResult {
  io::DatasetManifest selected;
  io::DatasetManifest rejected;
  SelectionThreshold threshold;
};

// higher_is_better keeps score >= t, lower_is_better keeps score <= t
// (closed on the good side in both conventions).
SelectionResult select_by_threshold(const io::DatasetManifest& scores, SelectionThreshold th);

// Scores every entry in place. Unloadable or unscorable entries get
// verdict rejected plus a reason; the run continues.
void score_manifest(io::DatasetManifest& manifest, const brisque::QualityModel& model, double c,
                    const std::filesystem::path& base_dir);

struct HistogramBin {
  double lo = 0.0;
  double hi = 0.0;
  uint64_t count = 0;
};

// Equal-width bins over [min, max + 1e-9].
std::vector<HistogramBin> score_histogram(const std::vector<double>& scores, int bin_count);

// Seeded sample without replacement: the largest n such that
// ceil(fraction_a * n) fits in a and the rest fits in b. Ids get "a:"/"b:"
// prefixes; source order is kept, a entries first.
io::DatasetManifest mix_manifests(const io::DatasetManifest& a, const io::DatasetManifest& b,
                                  double fraction_a, uint64_t seed);

}  // namespace driftcurate::gate
