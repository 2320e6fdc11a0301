#include "driftcurate/feature_gate.hpp"

#include <algorithm>
#include <cmath>

#include <json.hpp>

#include "driftcurate/error.hpp"
#include "driftcurate/fsio.hpp"
#include "driftcurate/rng.hpp"

using ordered_json = nlohmann::ordered_json;

namespace driftcurate::fgate {

namespace {

void validate_levels(const std::vector<int>& levels) {
  if (levels.empty()) {
    fail(ErrorCode::invalid_argument, "pooling needs at least one level");
  }
  for (int l : levels) {
    if (l < 1) fail(ErrorCode::invalid_argument, "pooling levels must be positive");
  }
}

}  // namespace

PooledVector spp_pool(const io::FeatureMap& map, const std::vector<int>& levels) {
  io::validate_feature_map(map);
  validate_levels(levels);
  const int max_level = *std::max_element(levels.begin(), levels.end());
  if (map.height < static_cast<uint32_t>(max_level) ||
      map.width < static_cast<uint32_t>(max_level)) {
    fail(ErrorCode::map_too_small, "map " + std::to_string(map.width) + "x" +
                                       std::to_string(map.height) +
                                       " cannot host a level-" + std::to_string(max_level) +
                                       " grid");
  }
  PooledVector out;
  size_t bins = 0;
  for (int l : levels) bins += static_cast<size_t>(l) * l;
  out.values.reserve(bins * map.channels);
  for (uint32_t ch = 0; ch < map.channels; ++ch) {
    for (int l : levels) {
      for (int r = 0; r < l; ++r) {
        const uint32_t row_lo = static_cast<uint32_t>(static_cast<uint64_t>(r) * map.height / l);
        const uint32_t row_hi =
            static_cast<uint32_t>(static_cast<uint64_t>(r + 1) * map.height / l);
        for (int s = 0; s < l; ++s) {
          const uint32_t col_lo = static_cast<uint32_t>(static_cast<uint64_t>(s) * map.width / l);
          const uint32_t col_hi =
              static_cast<uint32_t>(static_cast<uint64_t>(s + 1) * map.width / l);
          double best = map.at(ch, row_lo, col_lo);
          for (uint32_t i = row_lo; i < row_hi; ++i) {
            for (uint32_t j = col_lo; j < col_hi; ++j) {
              best = std::max(best, static_cast<double>(map.at(ch, i, j)));
            }
          }
          out.values.push_back(best);
        }
      }
    }
  }
  return out;
}

std::vector<std::pair<std::string, GateLabel>> label_by_dice(const io::DatasetManifest& manifest,
                                                             double tau) {
  io::validate_manifest(manifest);
  if (!(tau >= 0.0 && tau <= 1.0)) {
    fail(ErrorCode::invalid_argument, "tau must lie in [0,1]");
  }
  std::vector<std::pair<std::string, GateLabel>> out;
  out.reserve(manifest.entries.size());
  for (const io::ManifestEntry& entry : manifest.entries) {
    if (!entry.dice) {
      fail(ErrorCode::missing_dice, "entry has no dice value: " + entry.id);
    }
    out.emplace_back(entry.id, *entry.dice >= tau ? GateLabel::positive : GateLabel::negative);
  }
  return out;
}

SvmModel train_svm(const std::vector<std::pair<PooledVector, GateLabel>>& rows,
                   const SvmTrainOptions& options) {
  if (rows.size() < 2) {
    fail(ErrorCode::degenerate_input, "svm training needs at least 2 rows");
  }
  if (!(options.c_param > 0.0)) {
    fail(ErrorCode::invalid_argument, "c_param must be positive");
  }
  const size_t k = rows[0].first.values.size();
  if (k == 0) {
    fail(ErrorCode::degenerate_input, "empty feature vectors");
  }
  size_t n_pos = 0;
  for (const auto& [vec, label] : rows) {
    if (vec.values.size() != k) {
      fail(ErrorCode::length_mismatch, "vector length " + std::to_string(vec.values.size()) +
                                           " != " + std::to_string(k));
    }
    for (double v : vec.values) {
      if (!std::isfinite(v)) fail(ErrorCode::range_error, "non-finite feature value");
    }
    n_pos += label == GateLabel::positive;
  }
  const size_t n = rows.size();
  if (n_pos == 0 || n_pos == n) {
    fail(ErrorCode::single_class, "training rows carry only one label");
  }
  bool all_same = true;
  for (size_t i = 1; i < n && all_same; ++i) {
    all_same = rows[i].first.values == rows[0].first.values;
  }
  if (all_same) {
    fail(ErrorCode::degenerate, "all training vectors are identical across classes");
  }

  SvmModel model;
  model.c_param = options.c_param;
  model.levels = options.levels;
  model.v_expected = options.v_expected;
  model.mean.assign(k, 0.0);
  model.std.assign(k, 1.0);
  for (size_t d = 0; d < k; ++d) {
    double s = 0.0;
    for (const auto& [vec, label] : rows) s += vec.values[d];
    model.mean[d] = s / static_cast<double>(n);
    double sq = 0.0;
    for (const auto& [vec, label] : rows) {
      const double c = vec.values[d] - model.mean[d];
      sq += c * c;
    }
    const double var = sq / static_cast<double>(n);
    if (var > 0.0) model.std[d] = std::sqrt(var);
  }

  const size_t dim = k + 1;  // constant-1 bias feature
  std::vector<double> x(n * dim);
  std::vector<double> y(n);
  std::vector<double> q(n);  // squared row norms
  for (size_t i = 0; i < n; ++i) {
    double norm_sq = 0.0;
    for (size_t d = 0; d < k; ++d) {
      const double v = (rows[i].first.values[d] - model.mean[d]) / model.std[d];
      x[i * dim + d] = v;
      norm_sq += v * v;
    }
    x[i * dim + k] = 1.0;
    q[i] = norm_sq + 1.0;
    y[i] = rows[i].second == GateLabel::positive ? 1.0 : -1.0;
  }

  Rng rng(options.seed);
  const std::vector<size_t> order = permutation(rng, n);
  std::vector<double> alpha(n, 0.0);
  std::vector<double> w(dim, 0.0);
  const double c_cap = options.c_param;
  const uint64_t update_budget = 10ull * n * k;
  uint64_t updates = 0;
  while (updates < update_budget) {
    for (size_t oi = 0; oi < n; ++oi) {
      const size_t i = order[oi];
      double wx = 0.0;
      for (size_t d = 0; d < dim; ++d) wx += w[d] * x[i * dim + d];
      const double g = y[i] * wx - 1.0;
      double pg = g;
      if (alpha[i] == 0.0) pg = std::min(g, 0.0);
      else if (alpha[i] == c_cap) pg = std::max(g, 0.0);
      if (pg != 0.0) {
        const double next = std::clamp(alpha[i] - g / q[i], 0.0, c_cap);
        const double delta = next - alpha[i];
        if (delta != 0.0) {
          for (size_t d = 0; d < dim; ++d) w[d] += delta * y[i] * x[i * dim + d];
          alpha[i] = next;
        }
      }
    }
    updates += n;
    double w_sq = 0.0, hinge = 0.0, alpha_sum = 0.0;
    for (double v : w) w_sq += v * v;
    for (size_t i = 0; i < n; ++i) {
      double wx = 0.0;
      for (size_t d = 0; d < dim; ++d) wx += w[d] * x[i * dim + d];
      hinge += std::max(0.0, 1.0 - y[i] * wx);
      alpha_sum += alpha[i];
    }
    const double gap = w_sq + c_cap * hinge - alpha_sum;  // primal minus dual
    if (gap < 1e-6) break;
  }

  model.weights.assign(w.begin(), w.begin() + k);
  model.bias = w[k];
  return model;
}

void validate_svm_model(const SvmModel& model) {
  const size_t k = model.weights.size();
  if (k == 0) fail(ErrorCode::length_mismatch, "model has no weights");
  if (model.mean.size() != k || model.std.size() != k) {
    fail(ErrorCode::length_mismatch, "mean/std length differs from weights");
  }
  for (double s : model.std) {
    if (!(s > 0.0)) fail(ErrorCode::range_error, "std entries must be positive");
  }
  if (!std::isfinite(model.bias)) fail(ErrorCode::range_error, "bias must be finite");
  if (!(model.c_param > 0.0)) fail(ErrorCode::range_error, "c_param must be positive");
  validate_levels(model.levels);
  if (model.v_expected == 0) {
    fail(ErrorCode::invalid_argument, "model must record its channel count");
  }
  size_t bins = 0;
  for (int l : model.levels) bins += static_cast<size_t>(l) * l;
  if (bins * model.v_expected != k) {
    fail(ErrorCode::length_mismatch, "weights length " + std::to_string(k) +
                                         " inconsistent with levels and channel count");
  }
}

std::pair<GateLabel, double> svm_predict(const SvmModel& model, const PooledVector& v) {
  if (v.values.size() != model.weights.size()) {
    fail(ErrorCode::length_mismatch, "vector length " + std::to_string(v.values.size()) +
                                         " != model dimension " +
                                         std::to_string(model.weights.size()));
  }
  double margin = model.bias;
  for (size_t d = 0; d < model.weights.size(); ++d) {
    margin += model.weights[d] * (v.values[d] - model.mean[d]) / model.std[d];
  }
  return {margin >= 0.0 ? GateLabel::positive : GateLabel::negative, margin};
}

gate::SelectionResult gate_new_data(const SvmModel& model, const io::DatasetManifest& manifest,
                                    const std::filesystem::path& base_dir) {
  validate_svm_model(model);
  io::validate_manifest(manifest);
  gate::SelectionResult result;
  result.threshold = {0.0, gate::Polarity::higher_is_better};  // margin sign
  for (const io::ManifestEntry& entry : manifest.entries) {
    io::ManifestEntry copy = entry;
    try {
      if (!entry.feature_path) {
        fail(ErrorCode::missing_file, "entry has no feature map path");
      }
      const io::FeatureMap map =
          io::read_tensor(io::resolve_manifest_path(base_dir, *entry.feature_path));
      if (map.channels != model.v_expected) {
        fail(ErrorCode::model_dimension_mismatch,
             "map has " + std::to_string(map.channels) + " channels, model expects v_expected=" +
                 std::to_string(model.v_expected));
      }
      const auto [label, margin] = svm_predict(model, spp_pool(map, model.levels));
      copy.margin = margin;
      const bool keep = label == GateLabel::positive;
      copy.verdict = keep ? io::Verdict::selected : io::Verdict::rejected;
      (keep ? result.selected : result.rejected).entries.push_back(std::move(copy));
    } catch (const Error& err) {
      copy.margin.reset();
      copy.verdict = io::Verdict::rejected;
      copy.reason = err.what();
      result.rejected.entries.push_back(std::move(copy));
    }
  }
  return result;
}

namespace {

std::vector<double> doubles_from_json(const ordered_json& arr, const char* what) {
  if (!arr.is_array() || arr.empty()) {
    fail(ErrorCode::malformed_json, std::string(what) + " must be a nonempty array");
  }
  std::vector<double> out;
  out.reserve(arr.size());
  for (const ordered_json& v : arr) {
    if (!v.is_number()) fail(ErrorCode::malformed_json, std::string(what) + " holds a non-number");
    out.push_back(v.get<double>());
  }
  return out;
}

}  // namespace

SvmModel load_svm_model(const std::filesystem::path& path) {
  ordered_json doc;
  try {
    doc = ordered_json::parse(io::read_binary_file(path));
  } catch (const nlohmann::json::parse_error& err) {
    fail(ErrorCode::malformed_json, err.what());
  }
  if (!doc.is_object()) fail(ErrorCode::malformed_json, "svm model must be a JSON object");
  for (const char* key : {"weights", "bias", "c_param", "mean", "std", "levels", "v_expected"}) {
    if (!doc.contains(key)) {
      fail(ErrorCode::malformed_json, std::string("svm model misses ") + key);
    }
  }
  SvmModel model;
  model.weights = doubles_from_json(doc["weights"], "weights");
  if (!doc["bias"].is_number() || !doc["c_param"].is_number()) {
    fail(ErrorCode::malformed_json, "bias and c_param must be numbers");
  }
  model.bias = doc["bias"].get<double>();
  model.c_param = doc["c_param"].get<double>();
  model.mean = doubles_from_json(doc["mean"], "mean");
  model.std = doubles_from_json(doc["std"], "std");
  if (!doc["levels"].is_array() || !doc["v_expected"].is_number_unsigned()) {
    fail(ErrorCode::malformed_json, "levels must be an array, v_expected unsigned");
  }
  for (const ordered_json& l : doc["levels"]) {
    if (!l.is_number_integer()) fail(ErrorCode::malformed_json, "levels must be integers");
    model.levels.push_back(l.get<int>());
  }
  model.v_expected = doc["v_expected"].get<uint32_t>();
  validate_svm_model(model);
  return model;
}

void save_svm_model(const SvmModel& model, const std::filesystem::path& path) {
  validate_svm_model(model);
  ordered_json doc;
  doc["weights"] = model.weights;
  doc["bias"] = model.bias;
  doc["c_param"] = model.c_param;
  doc["mean"] = model.mean;
  doc["std"] = model.std;
  doc["levels"] = model.levels;
  doc["v_expected"] = model.v_expected;
  io::write_file_atomic(path, doc.dump(2) + "\n");
}

}  // namespace driftcurate::fgate
