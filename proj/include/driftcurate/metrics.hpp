#pragma once

#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "driftcurate/image.hpp"
#include "driftcurate/manifest.hpp"

namespace driftcurate::metrics {

// prob in [0,1], truth in {0,1}, matching dims.
struct PredictionRecord {
  io::GrayPlane prob;
  io::GrayPlane truth;
};

struct Prf {
  double precision = 0.0;
  double recall = 0.0;
  double f_score = 0.0;
};

struct MetricsReport {
  double dice = 0.0;       // macro average over images
  double precision = 0.0;  // macro
  double recall = 0.0;     // macro
  double f_score = 0.0;    // macro
  double pr_auc = 0.0;     // pooled over all pixels
  double threshold_used = 0.0;
  int evaluated = 0;
  int skipped = 0;
  std::vector<std::string> warnings;
};

// Per-image rows for the CSV surface.
struct PerImageMetrics {
  std::string id;
  double dice = 0.0;
  double precision = 0.0;
  double recall = 0.0;
  double f_score = 0.0;
};

io::GrayPlane binarize(const io::GrayPlane& prob, double t);

double dice(const io::GrayPlane& pred, const io::GrayPlane& truth);

Prf precision_recall_f(const io::GrayPlane& pred, const io::GrayPlane& truth);

// Pools pixels across all records and sweeps thresholds k/256, k = 0..256.
double pr_auc(const std::vector<PredictionRecord>& records);

// Maps a manifest entry to its prediction-mask path; nullopt means the
// prediction is missing and the entry is skipped.
using PredictionResolver =
    std::function<std::optional<std::filesystem::path>(const io::ManifestEntry&)>;

// Evaluates each entry's prediction against its mask_path truth at
// threshold t; writes per-image dice back into the manifest. Entries whose
// files are missing or mismatched are skipped and counted.
MetricsReport evaluate_manifest(io::DatasetManifest& manifest, double t,
                                const std::filesystem::path& base_dir,
                                const PredictionResolver& resolver,
                                std::vector<PerImageMetrics>* per_image = nullptr);

std::string report_to_json(const MetricsReport& report);

}  // namespace driftcurate::metrics
