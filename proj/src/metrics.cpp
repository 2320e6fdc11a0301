#include "driftcurate/metrics.hpp"

#include <array>
#include <cmath>

#include <json.hpp>

#include "driftcurate/error.hpp"
#include "driftcurate/pnm.hpp"

namespace driftcurate::metrics {

namespace {

void require_same_dims(const io::GrayPlane& a, const io::GrayPlane& b) {
  if (a.width != b.width || a.height != b.height) {
    fail(ErrorCode::dim_mismatch, std::to_string(a.width) + "x" + std::to_string(a.height) +
                                      " vs " + std::to_string(b.width) + "x" +
                                      std::to_string(b.height));
  }
}

struct Counts {
  size_t tp = 0, fp = 0, fn = 0;
};

Counts confusion(const io::GrayPlane& pred, const io::GrayPlane& truth) {
  Counts c;
  for (size_t i = 0; i < pred.values.size(); ++i) {
    const bool p = pred.values[i] != 0.0;
    const bool t = truth.values[i] != 0.0;
    if (p && t) ++c.tp;
    else if (p) ++c.fp;
    else if (t) ++c.fn;
  }
  return c;
}

Prf prf_from_counts(const Counts& c) {
  Prf out;
  if (c.tp + c.fp == 0) {
    // nothing predicted: perfect precision only when nothing was there to find
    out.precision = c.fn == 0 ? 1.0 : 0.0;
  } else {
    out.precision = static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fp);
  }
  out.recall = c.tp + c.fn == 0 ? 1.0 : static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fn);
  const double pr = out.precision + out.recall;
  out.f_score = pr > 0.0 ? 2.0 * out.precision * out.recall / pr : 0.0;
  return out;
}

}  // namespace

io::GrayPlane binarize(const io::GrayPlane& prob, double t) {
  io::validate_plane(prob);
  if (!(t >= 0.0 && t <= 1.0)) {
    fail(ErrorCode::invalid_argument, "threshold must lie in [0,1]");
  }
  io::GrayPlane out = io::make_plane(prob.height, prob.width);
  for (size_t i = 0; i < prob.values.size(); ++i) {
    out.values[i] = prob.values[i] >= t ? 1.0 : 0.0;
  }
  return out;
}

double dice(const io::GrayPlane& pred, const io::GrayPlane& truth) {
  require_same_dims(pred, truth);
  size_t inter = 0, pred_n = 0, truth_n = 0;
  for (size_t i = 0; i < pred.values.size(); ++i) {
    const bool p = pred.values[i] != 0.0;
    const bool t = truth.values[i] != 0.0;
    inter += p && t;
    pred_n += p;
    truth_n += t;
  }
  if (pred_n + truth_n == 0) return 1.0;  // both empty: nothing missed
  return 2.0 * static_cast<double>(inter) / static_cast<double>(pred_n + truth_n);
}

Prf precision_recall_f(const io::GrayPlane& pred, const io::GrayPlane& truth) {
  require_same_dims(pred, truth);
  return prf_from_counts(confusion(pred, truth));
}

double pr_auc(const std::vector<PredictionRecord>& records) {
  // prob >= k/256 is equivalent to floor(256*prob) >= k (256*prob is exact),
  // so one histogram pass covers all 257 thresholds.
  std::array<uint64_t, 257> pos{}, neg{};
  uint64_t total = 0;
  for (const PredictionRecord& rec : records) {
    require_same_dims(rec.prob, rec.truth);
    for (size_t i = 0; i < rec.prob.values.size(); ++i) {
      const double p = rec.prob.values[i];
      if (!(p >= 0.0 && p <= 1.0)) {
        fail(ErrorCode::range_error, "probability outside [0,1]");
      }
      const int bin = static_cast<int>(p * 256.0);
      if (rec.truth.values[i] != 0.0) ++pos[bin];
      else ++neg[bin];
      ++total;
    }
  }
  uint64_t total_pos = 0;
  for (uint64_t v : pos) total_pos += v;
  if (total_pos == 0) {
    fail(ErrorCode::no_positives, "pr_auc needs at least one positive ground-truth pixel");
  }

  struct Point {
    double recall, precision;
  };
  std::vector<Point> pts;
  uint64_t tp = 0, pp = 0;
  for (int k = 256; k >= 0; --k) {  // recall ascends as the threshold drops
    tp += pos[k];
    pp += pos[k] + neg[k];
    if (tp == 0) continue;
    pts.push_back({static_cast<double>(tp) / static_cast<double>(total_pos),
                   static_cast<double>(tp) / static_cast<double>(pp)});
  }
  const double prevalence = static_cast<double>(total_pos) / static_cast<double>(total);
  std::vector<Point> curve;
  curve.reserve(pts.size() + 2);
  curve.push_back({0.0, pts.front().precision});
  curve.insert(curve.end(), pts.begin(), pts.end());
  curve.push_back({1.0, prevalence});

  double auc = 0.0;
  for (size_t i = 1; i < curve.size(); ++i) {
    auc += (curve[i].recall - curve[i - 1].recall) *
           (curve[i].precision + curve[i - 1].precision) * 0.5;
  }
  return auc;
}

MetricsReport evaluate_manifest(io::DatasetManifest& manifest, double t,
                                const std::filesystem::path& base_dir,
                                const PredictionResolver& resolver,
                                std::vector<PerImageMetrics>* per_image) {
  io::validate_manifest(manifest);
  if (!(t >= 0.0 && t <= 1.0)) {
    fail(ErrorCode::invalid_argument, "threshold must lie in [0,1]");
  }
  MetricsReport report;
  report.threshold_used = t;
  std::vector<PredictionRecord> pooled;
  double dice_sum = 0.0, p_sum = 0.0, r_sum = 0.0, f_sum = 0.0;
  for (io::ManifestEntry& entry : manifest.entries) {
    const auto skip = [&](const std::string& why) {
      ++report.skipped;
      report.warnings.push_back(entry.id + ": " + why);
    };
    if (!entry.mask_path) {
      skip("no truth mask path");
      continue;
    }
    const std::optional<std::filesystem::path> pred_path = resolver(entry);
    if (!pred_path) {
      skip(Error(ErrorCode::missing_prediction, "no prediction for this entry").what());
      continue;
    }
    try {
      PredictionRecord rec;
      rec.truth = io::load_binary_mask(io::resolve_manifest_path(base_dir, *entry.mask_path));
      rec.prob = io::load_probability_mask(*pred_path);
      require_same_dims(rec.prob, rec.truth);
      const io::GrayPlane pred = binarize(rec.prob, t);
      const double d = dice(pred, rec.truth);
      const Prf prf = precision_recall_f(pred, rec.truth);
      entry.dice = d;
      dice_sum += d;
      p_sum += prf.precision;
      r_sum += prf.recall;
      f_sum += prf.f_score;
      ++report.evaluated;
      if (per_image) {
        per_image->push_back({entry.id, d, prf.precision, prf.recall, prf.f_score});
      }
      pooled.push_back(std::move(rec));
    } catch (const Error& err) {
      skip(err.what());
    }
  }
  if (report.evaluated == 0) {
    fail(ErrorCode::empty_input, "no entry could be evaluated");
  }
  const double n = report.evaluated;
  report.dice = dice_sum / n;
  report.precision = p_sum / n;
  report.recall = r_sum / n;
  report.f_score = f_sum / n;
  report.pr_auc = pr_auc(pooled);
  return report;
}

std::string report_to_json(const MetricsReport& report) {
  nlohmann::ordered_json doc;
  doc["dice"] = report.dice;
  doc["precision"] = report.precision;
  doc["recall"] = report.recall;
  doc["f_score"] = report.f_score;
  doc["pr_auc"] = report.pr_auc;
  doc["threshold_used"] = report.threshold_used;
  doc["evaluated"] = report.evaluated;
  doc["skipped"] = report.skipped;
  return doc.dump(2) + "\n";
}

}  // namespace driftcurate::metrics
