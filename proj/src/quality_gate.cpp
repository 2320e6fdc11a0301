#include "driftcurate/quality_gate.hpp"

#include <algorithm>
#include <cmath>

#include "driftcurate/csv.hpp"
#include "driftcurate/error.hpp"
#include "driftcurate/pnm.hpp"
#include "driftcurate/rng.hpp"

namespace driftcurate::gate {

SelectionResult select_by_threshold(const io::DatasetManifest& scores, SelectionThreshold th) {
  io::validate_manifest(scores);
  if (!std::isfinite(th.t)) {
    fail(ErrorCode::invalid_argument, "threshold must be finite");
  }
  SelectionResult result;
  result.threshold = th;
  for (const io::ManifestEntry& entry : scores.entries) {
    if (!entry.score) {
      fail(ErrorCode::missing_score, "entry has no score: " + entry.id);
    }
    const double s = *entry.score;
    const bool keep = th.polarity == Polarity::higher_is_better ? s >= th.t : s <= th.t;
    io::ManifestEntry copy = entry;
    copy.verdict = keep ? io::Verdict::selected : io::Verdict::rejected;
    (keep ? result.selected : result.rejected).entries.push_back(std::move(copy));
  }
  return result;
}

void score_manifest(io::DatasetManifest& manifest, const brisque::QualityModel& model, double c,
                    const std::filesystem::path& base_dir) {
  io::validate_manifest(manifest);
  brisque::validate_quality_model(model);
  for (io::ManifestEntry& entry : manifest.entries) {
    try {
      const io::Image img =
          io::load_image(io::resolve_manifest_path(base_dir, entry.image_path));
      const brisque::BrisqueFeatures f = brisque::brisque_features(brisque::to_luma(img), c);
      entry.score = brisque::score(f, model).sigma;
      entry.verdict.reset();
      entry.reason.reset();
    } catch (const Error& err) {
      entry.score.reset();
      entry.verdict = io::Verdict::rejected;
      entry.reason = err.what();
    }
  }
}

std::vector<HistogramBin> score_histogram(const std::vector<double>& scores, int bin_count) {
  if (scores.empty()) {
    fail(ErrorCode::empty_input, "histogram needs at least one score");
  }
  if (bin_count < 1) {
    fail(ErrorCode::invalid_argument, "bin count must be positive");
  }
  for (double s : scores) {
    if (!std::isfinite(s)) fail(ErrorCode::range_error, "scores must be finite");
  }
  const auto [lo_it, hi_it] = std::minmax_element(scores.begin(), scores.end());
  const double lo = *lo_it;
  const double hi = *hi_it + 1e-9;  // maximum lands inside the last bin
  const double width = (hi - lo) / bin_count;
  std::vector<HistogramBin> bins(bin_count);
  for (int i = 0; i < bin_count; ++i) {
    bins[i].lo = lo + width * i;
    bins[i].hi = lo + width * (i + 1);
  }
  for (double s : scores) {
    int idx = static_cast<int>((s - lo) / width);
    idx = std::clamp(idx, 0, bin_count - 1);
    ++bins[idx].count;
  }
  return bins;
}

namespace {

size_t take_from_a(double fraction_a, size_t n) {
  // tolerant ceil so 0.7 * 100 does not spill to 71
  return static_cast<size_t>(std::ceil(fraction_a * static_cast<double>(n) - 1e-9));
}

}  // namespace

io::DatasetManifest mix_manifests(const io::DatasetManifest& a, const io::DatasetManifest& b,
                                  double fraction_a, uint64_t seed) {
  io::validate_manifest(a);
  io::validate_manifest(b);
  if (!(fraction_a >= 0.0 && fraction_a <= 1.0)) {
    fail(ErrorCode::invalid_argument, "fraction must lie in [0,1]");
  }
  size_t n = a.entries.size() + b.entries.size();
  size_t from_a = 0;
  for (; n > 0; --n) {
    from_a = take_from_a(fraction_a, n);
    if (from_a <= a.entries.size() && n - from_a <= b.entries.size()) break;
  }
  if (n == 0) {
    fail(ErrorCode::fraction_infeasible,
         "no target size satisfies fraction " + io::format_double(fraction_a) + " with |a|=" +
             std::to_string(a.entries.size()) + ", |b|=" + std::to_string(b.entries.size()));
  }
  const size_t from_b = n - from_a;

  Rng rng(seed);
  std::vector<size_t> pick_a = sample_without_replacement(rng, a.entries.size(), from_a);
  std::vector<size_t> pick_b = sample_without_replacement(rng, b.entries.size(), from_b);
  std::sort(pick_a.begin(), pick_a.end());
  std::sort(pick_b.begin(), pick_b.end());

  io::DatasetManifest out;
  out.entries.reserve(n);
  for (size_t i : pick_a) {
    io::ManifestEntry e = a.entries[i];
    e.id = "a:" + e.id;
    out.entries.push_back(std::move(e));
  }
  for (size_t i : pick_b) {
    io::ManifestEntry e = b.entries[i];
    e.id = "b:" + e.id;
    out.entries.push_back(std::move(e));
  }
  return out;
}

}  // namespace driftcurate::gate
