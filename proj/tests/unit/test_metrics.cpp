#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "driftcurate/error.hpp"
#include "driftcurate/metrics.hpp"
#include "driftcurate/pnm.hpp"
#include "driftcurate/rng.hpp"
#include "helpers.hpp"

using namespace driftcurate;

namespace {

// Brute-force oracle: rescans every pixel at each of the 257 thresholds
// and assembles the anchored curve from scratch.
double pr_auc_oracle(const std::vector<double>& probs, const std::vector<int>& truth) {
  size_t total_pos = 0;
  for (int t : truth) total_pos += t;
  REQUIRE(total_pos > 0);
  struct Pt {
    double recall, precision;
  };
  std::vector<Pt> pts;
  // sweep in curve order, threshold descending: recall ascends, and points
  // sharing a recall keep the sweep's precision order
  for (int k = 256; k >= 0; --k) {
    const double t = static_cast<double>(k) / 256.0;
    size_t tp = 0, pp = 0;
    for (size_t i = 0; i < probs.size(); ++i) {
      if (probs[i] >= t) {
        ++pp;
        tp += truth[i];
      }
    }
    if (tp == 0) continue;
    pts.push_back({static_cast<double>(tp) / total_pos, static_cast<double>(tp) / pp});
  }
  std::stable_sort(pts.begin(), pts.end(),
                   [](const Pt& a, const Pt& b) { return a.recall < b.recall; });
  std::vector<Pt> curve;
  curve.push_back({0.0, pts.front().precision});
  curve.insert(curve.end(), pts.begin(), pts.end());
  curve.push_back({1.0, static_cast<double>(total_pos) / probs.size()});
  double auc = 0.0;
  for (size_t i = 1; i < curve.size(); ++i) {
    auc += (curve[i].recall - curve[i - 1].recall) * (curve[i].precision + curve[i - 1].precision) /
           2.0;
  }
  return auc;
}

metrics::PredictionRecord record_of(const std::vector<double>& probs,
                                    const std::vector<int>& truth) {
  metrics::PredictionRecord rec;
  rec.prob = io::make_plane(1, static_cast<int>(probs.size()));
  rec.truth = io::make_plane(1, static_cast<int>(truth.size()));
  for (size_t i = 0; i < probs.size(); ++i) rec.prob.values[i] = probs[i];
  for (size_t i = 0; i < truth.size(); ++i) rec.truth.values[i] = truth[i];
  return rec;
}

}  // namespace

TEST_CASE("binarize applies the closed threshold") {
  const io::GrayPlane prob = plane_of(1, 3, {0.2, 0.5, 0.7});
  CHECK(metrics::binarize(prob, 0.5).values == std::vector<double>{0, 1, 1});
  CHECK(metrics::binarize(prob, 0.0).values == std::vector<double>{1, 1, 1});
  CHECK(metrics::binarize(prob, 1.0).values == std::vector<double>{0, 0, 0});
}

TEST_CASE("dice hand cases") {
  const io::GrayPlane a = plane_of(1, 4, {1, 1, 0, 0});
  const io::GrayPlane b = plane_of(1, 4, {1, 0, 0, 0});
  CHECK(metrics::dice(a, b) == 2.0 / 3.0);
  CHECK(metrics::dice(a, a) == 1.0);
  const io::GrayPlane empty = plane_of(1, 4, {0, 0, 0, 0});
  CHECK(metrics::dice(empty, empty) == 1.0);
  const io::GrayPlane c = plane_of(1, 4, {0, 0, 1, 1});
  CHECK(metrics::dice(a, c) == 0.0);
  const io::GrayPlane wide = plane_of(2, 2, {1, 0, 0, 0});
  CHECK(raises(ErrorCode::dim_mismatch, [&] { metrics::dice(a, wide); }));
}

TEST_CASE("dice is symmetric and self-identical on random masks") {
  Rng rng(17);
  for (int trial = 0; trial < 200; ++trial) {
    const int n = 1 + static_cast<int>(rng.bounded(32));
    io::GrayPlane a = io::make_plane(1, n);
    io::GrayPlane b = io::make_plane(1, n);
    for (int i = 0; i < n; ++i) {
      a.values[i] = static_cast<double>(rng.bounded(2));
      b.values[i] = static_cast<double>(rng.bounded(2));
    }
    CHECK(metrics::dice(a, b) == metrics::dice(b, a));
    CHECK(metrics::dice(a, a) == 1.0);
  }
}

TEST_CASE("precision recall f hand cases") {
  const io::GrayPlane truth = plane_of(1, 2, {1, 0});
  const io::GrayPlane ones = plane_of(1, 2, {1, 1});
  metrics::Prf prf = metrics::precision_recall_f(ones, truth);
  CHECK(prf.precision == 0.5);
  CHECK(prf.recall == 1.0);
  CHECK(prf.f_score == 2.0 / 3.0);

  prf = metrics::precision_recall_f(truth, truth);
  CHECK(prf.precision == 1.0);
  CHECK(prf.recall == 1.0);
  CHECK(prf.f_score == 1.0);

  const io::GrayPlane zeros = plane_of(1, 2, {0, 0});
  prf = metrics::precision_recall_f(zeros, truth);
  CHECK(prf.precision == 0.0);
  CHECK(prf.recall == 0.0);
  CHECK(prf.f_score == 0.0);

  // nothing predicted, nothing present
  prf = metrics::precision_recall_f(zeros, zeros);
  CHECK(prf.precision == 1.0);
  CHECK(prf.recall == 1.0);
  CHECK(prf.f_score == 1.0);
}

TEST_CASE("f stays between min and max of precision and recall") {
  Rng rng(23);
  for (int trial = 0; trial < 300; ++trial) {
    const int n = 2 + static_cast<int>(rng.bounded(62));
    io::GrayPlane pred = io::make_plane(1, n);
    io::GrayPlane truth = io::make_plane(1, n);
    for (int i = 0; i < n; ++i) {
      pred.values[i] = static_cast<double>(rng.bounded(2));
      truth.values[i] = static_cast<double>(rng.bounded(2));
    }
    const metrics::Prf prf = metrics::precision_recall_f(pred, truth);
    if (prf.precision > 0.0 && prf.recall > 0.0) {
      CHECK(prf.f_score >= std::min(prf.precision, prf.recall) - 1e-12);
      CHECK(prf.f_score <= std::max(prf.precision, prf.recall) + 1e-12);
      CHECK(prf.f_score <= 2.0 * std::min(prf.precision, prf.recall) + 1e-12);
    }
  }
}

TEST_CASE("pr_auc matches the frozen 4-pixel value") {
  const auto rec = record_of({0.9, 0.8, 0.4, 0.1}, {1, 0, 1, 0});
  const double got = metrics::pr_auc({rec});
  CHECK(got == doctest::Approx(19.0 / 24.0).epsilon(1e-12));
  CHECK(got == doctest::Approx(pr_auc_oracle({0.9, 0.8, 0.4, 0.1}, {1, 0, 1, 0})).epsilon(1e-12));
}

TEST_CASE("pr_auc endpoint behavior") {
  // perfectly separable
  const auto sep = record_of({1.0, 1.0, 0.0, 0.0}, {1, 1, 0, 0});
  CHECK(metrics::pr_auc({sep}) == doctest::Approx(1.0).epsilon(1e-9));
  // constant probabilities give AUC = prevalence
  const auto flat = record_of({0.5, 0.5, 0.5, 0.5}, {1, 0, 0, 0});
  CHECK(metrics::pr_auc({flat}) == doctest::Approx(0.25).epsilon(1e-9));
  // no positives anywhere
  const auto nopos = record_of({0.5, 0.1}, {0, 0});
  CHECK(raises(ErrorCode::no_positives, [&] { metrics::pr_auc({nopos}); }));
}

TEST_CASE("pr_auc equals the brute-force oracle on random small fixtures") {
  Rng rng(29);
  for (int trial = 0; trial < 250; ++trial) {
    const int n = 1 + static_cast<int>(rng.bounded(64));
    std::vector<double> probs(n);
    std::vector<int> truth(n);
    bool any_pos = false;
    for (int i = 0; i < n; ++i) {
      // mix of grid-aligned and arbitrary probabilities
      probs[i] = rng.bounded(2) ? rng.uniform01()
                                : static_cast<double>(rng.bounded(257)) / 256.0;
      truth[i] = static_cast<int>(rng.bounded(2));
      any_pos = any_pos || truth[i] == 1;
    }
    if (!any_pos) truth[0] = 1;
    const double got = metrics::pr_auc({record_of(probs, truth)});
    const double want = pr_auc_oracle(probs, truth);
    CHECK(std::abs(got - want) < 1e-9);
  }
}

TEST_CASE("pr_auc pools across records") {
  Rng rng(31);
  std::vector<double> p1(10), p2(6);
  std::vector<int> t1(10), t2(6);
  for (auto* v : {&p1, &p2})
    for (double& x : *v) x = rng.uniform01();
  for (auto* v : {&t1, &t2})
    for (int& x : *v) x = static_cast<int>(rng.bounded(2));
  t1[0] = 1;
  std::vector<double> pooled = p1;
  pooled.insert(pooled.end(), p2.begin(), p2.end());
  std::vector<int> pooled_t = t1;
  pooled_t.insert(pooled_t.end(), t2.begin(), t2.end());
  const double split = metrics::pr_auc({record_of(p1, t1), record_of(p2, t2)});
  const double merged = metrics::pr_auc({record_of(pooled, pooled_t)});
  CHECK(split == doctest::Approx(merged).epsilon(1e-12));
}

TEST_CASE("pr_auc is invariant under grid-preserving monotone transforms") {
  // squashing [0,1] toward 1 keeps relative order; with probabilities on
  // the 1/256 grid the transform below maps grid points to grid points
  std::vector<double> probs;
  std::vector<int> truth;
  Rng rng(37);
  for (int i = 0; i < 40; ++i) {
    probs.push_back(static_cast<double>(rng.bounded(129)) / 256.0);  // in [0, 0.5]
    truth.push_back(static_cast<int>(rng.bounded(2)));
  }
  truth[0] = 1;
  std::vector<double> shifted = probs;
  for (double& p : shifted) p = p * 2.0;  // strictly monotone, still on-grid
  CHECK(metrics::pr_auc({record_of(probs, truth)}) ==
        doctest::Approx(metrics::pr_auc({record_of(shifted, truth)})).epsilon(1e-12));
}

TEST_CASE("evaluate_manifest aggregates, writes dice back, and counts skips") {
  TempDir tmp("eval_manifest");
  // truth masks
  io::Image truth_a;
  truth_a.width = 2;
  truth_a.height = 2;
  truth_a.channels = 1;
  truth_a.pixels = {255, 255, 0, 0};
  io::save_image(truth_a, tmp.file("a_truth.pgm"));
  io::Image truth_b = truth_a;
  truth_b.pixels = {255, 0, 0, 0};
  io::save_image(truth_b, tmp.file("b_truth.pgm"));
  // predictions: a perfect, b disjoint
  io::save_image(truth_a, tmp.file("a_pred.pgm"));
  io::Image pred_b = truth_a;
  pred_b.pixels = {0, 0, 255, 255};
  io::save_image(pred_b, tmp.file("b_pred.pgm"));

  io::DatasetManifest manifest;
  for (const char* id : {"a", "b", "c"}) {
    io::ManifestEntry e;
    e.id = id;
    e.image_path = std::string(id) + ".pgm";
    e.mask_path = std::string(id) + "_truth.pgm";
    manifest.entries.push_back(e);
  }
  const metrics::PredictionResolver resolver =
      [&](const io::ManifestEntry& e) -> std::optional<std::filesystem::path> {
    const auto p = tmp.file(e.id + std::string("_pred.pgm"));
    if (std::filesystem::exists(p)) return p;
    return std::nullopt;  // entry c has no prediction
  };
  std::vector<metrics::PerImageMetrics> per_image;
  const metrics::MetricsReport report =
      metrics::evaluate_manifest(manifest, 0.5, tmp.path, resolver, &per_image);
  CHECK(report.evaluated == 2);
  CHECK(report.skipped == 1);
  CHECK(report.dice == doctest::Approx(0.5));  // (1.0 + 0.0) / 2
  CHECK(report.threshold_used == 0.5);
  CHECK(manifest.entries[0].dice == 1.0);
  CHECK(manifest.entries[1].dice == 0.0);
  CHECK_FALSE(manifest.entries[2].dice.has_value());
  REQUIRE(per_image.size() == 2);
  CHECK(per_image[0].id == "a");
  CHECK(per_image[0].dice == 1.0);
  CHECK(report.warnings.size() == 1);

  // single-record report equals the single-record metrics
  io::DatasetManifest solo;
  solo.entries = {manifest.entries[0]};
  solo.entries[0].dice.reset();
  const metrics::MetricsReport one = metrics::evaluate_manifest(solo, 0.5, tmp.path, resolver);
  CHECK(one.dice == 1.0);
  CHECK(one.precision == 1.0);
  CHECK(one.recall == 1.0);
  CHECK(one.evaluated == 1);
}

TEST_CASE("evaluate_manifest with nothing evaluable fails loudly") {
  io::DatasetManifest manifest;
  io::ManifestEntry e;
  e.id = "x";
  e.image_path = "x.pgm";
  manifest.entries.push_back(e);  // no mask_path
  const metrics::PredictionResolver resolver =
      [](const io::ManifestEntry&) -> std::optional<std::filesystem::path> {
    return std::nullopt;
  };
  io::DatasetManifest copy = manifest;
  CHECK(raises(ErrorCode::empty_input,
               [&] { metrics::evaluate_manifest(copy, 0.5, ".", resolver); }));
}
