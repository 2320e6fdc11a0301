#include "driftcurate/brisque.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include <json.hpp>

#include "driftcurate/distort.hpp"
#include "driftcurate/error.hpp"
#include "driftcurate/fsio.hpp"

using ordered_json = nlohmann::ordered_json;

namespace driftcurate::brisque {

double gamma_fn(double x) {
  // Lanczos, g = 7, 9 coefficients; relative error < 1e-10 on the domain
  // used by the fit grid.
  static constexpr double kCoef[9] = {
      0.99999999999980993,    676.5203681218851,     -1259.1392167224028,
      771.32342877765313,     -176.61502916214059,   12.507343278686905,
      -0.13857109526572012,   9.9843695780195716e-6, 1.5056327351493116e-7};
  constexpr double g = 7.0;
  if (x < 0.5) {
    // reflection
    return std::numbers::pi / (std::sin(std::numbers::pi * x) * gamma_fn(1.0 - x));
  }
  x -= 1.0;
  double acc = kCoef[0];
  for (int i = 1; i < 9; ++i) {
    acc += kCoef[i] / (x + static_cast<double>(i));
  }
  double t = x + g + 0.5;
  return std::sqrt(2.0 * std::numbers::pi) * std::pow(t, x + 0.5) * std::exp(-t) * acc;
}

namespace {

double rho_of(double g) {
  double g2 = gamma_fn(2.0 / g);
  return g2 * g2 / (gamma_fn(1.0 / g) * gamma_fn(3.0 / g));
}

struct RhoGrid {
  std::vector<double> alpha;
  std::vector<double> rho;
};

const RhoGrid& rho_grid() {
  static const RhoGrid grid = [] {
    RhoGrid g;
    const int n = static_cast<int>(std::llround((kAlphaGridHi - kAlphaGridLo) / kAlphaGridStep)) + 1;
    g.alpha.resize(n);
    g.rho.resize(n);
    for (int i = 0; i < n; ++i) {
      g.alpha[i] = kAlphaGridLo + kAlphaGridStep * i;
      g.rho[i] = rho_of(g.alpha[i]);
    }
    return g;
  }();
  return grid;
}

}  // namespace

double invert_rho(double target) {
  const RhoGrid& grid = rho_grid();
  size_t best = 0;
  double best_diff = std::abs(grid.rho[0] - target);
  for (size_t i = 1; i < grid.rho.size(); ++i) {
    double diff = std::abs(grid.rho[i] - target);
    if (diff < best_diff) {  // strict: ties keep the smaller alpha
      best_diff = diff;
      best = i;
    }
  }
  return grid.alpha[best];
}

io::GrayPlane to_luma(const io::Image& img) {
  io::validate_image(img);
  io::GrayPlane plane = io::make_plane(img.height, img.width);
  if (img.channels == 1) {
    plane.values = img.pixels;
    return plane;
  }
  for (size_t i = 0; i < plane.values.size(); ++i) {
    const double r = img.pixels[i * 3];
    const double g = img.pixels[i * 3 + 1];
    const double b = img.pixels[i * 3 + 2];
    plane.values[i] = 0.299 * r + 0.587 * g + 0.114 * b;
  }
  return plane;
}

namespace {

constexpr int kWindowRadius = 3;  // 7x7
constexpr double kWindowSigma = 7.0 / 6.0;

const std::array<std::array<double, 7>, 7>& window_weights() {
  static const auto weights = [] {
    std::array<std::array<double, 7>, 7> w{};
    for (int di = -kWindowRadius; di <= kWindowRadius; ++di) {
      for (int dj = -kWindowRadius; dj <= kWindowRadius; ++dj) {
        w[di + kWindowRadius][dj + kWindowRadius] =
            std::exp(-(di * di + dj * dj) / (2.0 * kWindowSigma * kWindowSigma));
      }
    }
    return w;
  }();
  return weights;
}

}  // namespace

io::GrayPlane mscn(const io::GrayPlane& plane, double c) {
  io::validate_plane(plane);
  if (plane.width < 2 || plane.height < 2) {
    fail(ErrorCode::degenerate_dims, "mscn needs dims >= 2x2");
  }
  if (!(c > 0.0)) {
    fail(ErrorCode::invalid_argument, "mscn stabilizer c must be positive");
  }
  const auto& w = window_weights();
  io::GrayPlane out = io::make_plane(plane.height, plane.width);
  for (int i = 0; i < plane.height; ++i) {
    for (int j = 0; j < plane.width; ++j) {
      const double center = plane.at(i, j);
      double wsum = 0.0, s1 = 0.0, s2 = 0.0, diff = 0.0;
      const int di_lo = std::max(-kWindowRadius, -i);
      const int di_hi = std::min(kWindowRadius, plane.height - 1 - i);
      const int dj_lo = std::max(-kWindowRadius, -j);
      const int dj_hi = std::min(kWindowRadius, plane.width - 1 - j);
      for (int di = di_lo; di <= di_hi; ++di) {
        for (int dj = dj_lo; dj <= dj_hi; ++dj) {
          const double wt = w[di + kWindowRadius][dj + kWindowRadius];
          const double v = plane.at(i + di, j + dj);
          wsum += wt;
          s1 += wt * v;
          s2 += wt * v * v;
          diff += wt * (center - v);  // keeps constant planes at exact zero
        }
      }
      const double mu = s1 / wsum;
      const double var = std::max(0.0, s2 / wsum - mu * mu);
      out.at(i, j) = (diff / wsum) / (std::sqrt(var) + c);
    }
  }
  return out;
}

OrientationProducts pairwise_products(const io::GrayPlane& m) {
  io::validate_plane(m);
  if (m.width < 2 || m.height < 2) {
    fail(ErrorCode::degenerate_dims, "pairwise products need dims >= 2x2");
  }
  const int h = m.height, w = m.width;
  OrientationProducts out{
      io::make_plane(h, w - 1),
      io::make_plane(h - 1, w),
      io::make_plane(h - 1, w - 1),
      io::make_plane(h - 1, w - 1),
  };
  for (int i = 0; i < h; ++i) {
    for (int j = 0; j + 1 < w; ++j) {
      out.h.at(i, j) = m.at(i, j) * m.at(i, j + 1);
    }
  }
  for (int i = 0; i + 1 < h; ++i) {
    for (int j = 0; j < w; ++j) {
      out.v.at(i, j) = m.at(i, j) * m.at(i + 1, j);
    }
  }
  for (int i = 0; i + 1 < h; ++i) {
    for (int j = 0; j + 1 < w; ++j) {
      out.d1.at(i, j) = m.at(i, j) * m.at(i + 1, j + 1);
      out.d2.at(i, j) = m.at(i, j + 1) * m.at(i + 1, j);
    }
  }
  return out;
}

namespace {

struct SampleMoments {
  double mean = 0.0;
  double mean_abs = 0.0;
  double mean_sq = 0.0;
};

SampleMoments moments(std::span<const double> samples) {
  SampleMoments m;
  for (double x : samples) {
    m.mean += x;
    m.mean_abs += std::abs(x);
    m.mean_sq += x * x;
  }
  const double n = static_cast<double>(samples.size());
  m.mean /= n;
  m.mean_abs /= n;
  m.mean_sq /= n;
  return m;
}

}  // namespace

GgdParams fit_ggd(std::span<const double> samples) {
  if (samples.size() < 100) {
    fail(ErrorCode::degenerate_input,
         "ggd fit needs >= 100 samples, got " + std::to_string(samples.size()));
  }
  const SampleMoments m = moments(samples);
  const double variance = m.mean_sq - m.mean * m.mean;
  if (!(variance > 1e-12)) {
    fail(ErrorCode::degenerate_input, "ggd fit on (near-)constant samples");
  }
  GgdParams params;
  params.alpha = invert_rho(m.mean_abs * m.mean_abs / m.mean_sq);
  params.sigma = std::sqrt(m.mean_sq);
  return params;
}

AggdParams fit_aggd(std::span<const double> samples) {
  if (samples.size() < 100) {
    fail(ErrorCode::degenerate_input,
         "aggd fit needs >= 100 samples, got " + std::to_string(samples.size()));
  }
  size_t n_neg = 0, n_pos = 0;
  double sq_neg = 0.0, sq_pos = 0.0, abs_sum = 0.0, sq_sum = 0.0;
  for (double x : samples) {
    if (x < 0.0) {
      ++n_neg;
      sq_neg += x * x;
    } else if (x > 0.0) {
      ++n_pos;
      sq_pos += x * x;
    }
    abs_sum += std::abs(x);
    sq_sum += x * x;
  }
  if (n_neg == 0 || n_pos == 0) {
    fail(ErrorCode::one_sided_data, "aggd fit needs both negative and positive samples");
  }
  const double n = static_cast<double>(samples.size());
  if (!(sq_sum / n > 1e-12)) {
    fail(ErrorCode::degenerate_input, "aggd fit on (near-)zero samples");
  }

  AggdParams params;
  params.sigma_left = std::sqrt(sq_neg / static_cast<double>(n_neg));
  params.sigma_right = std::sqrt(sq_pos / static_cast<double>(n_pos));
  const double gamma_hat = params.sigma_left / params.sigma_right;
  const double mean_abs = abs_sum / n;
  const double r_hat = mean_abs * mean_abs / (sq_sum / n);
  const double g2 = gamma_hat * gamma_hat;
  const double r_big = r_hat * (gamma_hat * g2 + 1.0) * (gamma_hat + 1.0) / ((g2 + 1.0) * (g2 + 1.0));
  params.alpha = invert_rho(r_big);
  params.eta = (params.sigma_right - params.sigma_left) * gamma_fn(2.0 / params.alpha) /
               gamma_fn(1.0 / params.alpha);
  return params;
}

namespace {

// 18 features: GGD pair for the MSCN field, AGGD quadruple per orientation.
void scale_features(const io::GrayPlane& plane, double c, double* out) {
  const io::GrayPlane m = mscn(plane, c);
  const GgdParams ggd = fit_ggd(m.values);
  out[0] = ggd.alpha;
  out[1] = ggd.sigma * ggd.sigma;
  const OrientationProducts prods = pairwise_products(m);
  const io::GrayPlane* planes[4] = {&prods.h, &prods.v, &prods.d1, &prods.d2};
  for (int k = 0; k < 4; ++k) {
    const AggdParams aggd = fit_aggd(planes[k]->values);
    out[2 + 4 * k] = aggd.alpha;
    out[3 + 4 * k] = aggd.eta;
    out[4 + 4 * k] = aggd.sigma_left * aggd.sigma_left;
    out[5 + 4 * k] = aggd.sigma_right * aggd.sigma_right;
  }
}

}  // namespace

BrisqueFeatures brisque_features(const io::GrayPlane& plane, double c) {
  io::validate_plane(plane);
  if (plane.width < 16 || plane.height < 16) {
    fail(ErrorCode::degenerate_dims, "brisque needs dims >= 16x16");
  }
  BrisqueFeatures features;
  try {
    scale_features(plane, c, features.values.data());
    const io::GrayPlane half = distort::pyr_down(plane);
    scale_features(half, c, features.values.data() + kFeatureCount / 2);
  } catch (const Error& err) {
    if (err.code() == ErrorCode::degenerate_input || err.code() == ErrorCode::one_sided_data) {
      fail(ErrorCode::unscorable_image, err.what());
    }
    throw;
  }
  return features;
}

void validate_quality_model(const QualityModel& model) {
  for (int i = 0; i < kFeatureCount; ++i) {
    if (!std::isfinite(model.feature_lo[i]) || !std::isfinite(model.feature_hi[i]) ||
        !(model.feature_lo[i] < model.feature_hi[i])) {
      fail(ErrorCode::range_error,
           "scaling range must satisfy lo < hi at feature " + std::to_string(i));
    }
  }
  if (model.kind == ModelKind::rbf_svr) {
    if (!(model.gamma > 0.0)) {
      fail(ErrorCode::range_error, "rbf gamma must be positive");
    }
    if (model.support_vectors.empty()) {
      fail(ErrorCode::model_dimension_mismatch, "rbf model has no support vectors");
    }
  }
}

namespace {

std::array<double, kFeatureCount> scale_to_unit(const BrisqueFeatures& f,
                                                const QualityModel& model) {
  std::array<double, kFeatureCount> scaled{};
  for (int i = 0; i < kFeatureCount; ++i) {
    double v = 2.0 * (f.values[i] - model.feature_lo[i]) /
                   (model.feature_hi[i] - model.feature_lo[i]) -
               1.0;
    scaled[i] = std::clamp(v, -1.0, 1.0);
  }
  return scaled;
}

}  // namespace

QualityScore score(const BrisqueFeatures& features, const QualityModel& model) {
  validate_quality_model(model);
  const auto scaled = scale_to_unit(features, model);
  if (model.kind == ModelKind::linear) {
    double acc = model.bias;
    for (int i = 0; i < kFeatureCount; ++i) acc += model.weights[i] * scaled[i];
    return QualityScore{acc};
  }
  double acc = 0.0;
  for (const SupportVector& sv : model.support_vectors) {
    double dist_sq = 0.0;
    for (int i = 0; i < kFeatureCount; ++i) {
      const double d = scaled[i] - sv.values[i];
      dist_sq += d * d;
    }
    acc += sv.coef * std::exp(-model.gamma * dist_sq);
  }
  return QualityScore{acc - model.rho};
}

namespace {

// Cholesky solve of (M + lambda I) x = b for a symmetric positive-definite M.
std::vector<double> cholesky_solve(std::vector<double> m, std::vector<double> b, int n) {
  for (int j = 0; j < n; ++j) {
    double d = m[j * n + j];
    for (int k = 0; k < j; ++k) d -= m[j * n + k] * m[j * n + k];
    if (!(d > 0.0)) {
      fail(ErrorCode::degenerate_input, "normal matrix is not positive definite");
    }
    m[j * n + j] = std::sqrt(d);
    for (int i = j + 1; i < n; ++i) {
      double s = m[i * n + j];
      for (int k = 0; k < j; ++k) s -= m[i * n + k] * m[j * n + k];
      m[i * n + j] = s / m[j * n + j];
    }
  }
  // forward then back substitution
  for (int i = 0; i < n; ++i) {
    double s = b[i];
    for (int k = 0; k < i; ++k) s -= m[i * n + k] * b[k];
    b[i] = s / m[i * n + i];
  }
  for (int i = n - 1; i >= 0; --i) {
    double s = b[i];
    for (int k = i + 1; k < n; ++k) s -= m[k * n + i] * b[k];
    b[i] = s / m[i * n + i];
  }
  return b;
}

}  // namespace

QualityModel train_quality_model(const std::vector<std::pair<BrisqueFeatures, double>>& rows) {
  constexpr int kMinRows = kFeatureCount + 1;
  if (rows.size() < static_cast<size_t>(kMinRows)) {
    fail(ErrorCode::too_few_rows, "need >= " + std::to_string(kMinRows) + " rows, got " +
                                      std::to_string(rows.size()));
  }
  QualityModel model;
  model.kind = ModelKind::linear;
  for (int i = 0; i < kFeatureCount; ++i) {
    double lo = rows[0].first.values[i];
    double hi = lo;
    for (const auto& [f, label] : rows) {
      lo = std::min(lo, f.values[i]);
      hi = std::max(hi, f.values[i]);
    }
    if (!(lo < hi)) {
      lo -= 1e-6;
      hi += 1e-6;
    }
    model.feature_lo[i] = lo;
    model.feature_hi[i] = hi;
  }

  constexpr int kDim = kFeatureCount + 1;  // bias column
  constexpr double kRidge = 1e-6;
  std::vector<double> mat(kDim * kDim, 0.0);
  std::vector<double> rhs(kDim, 0.0);
  std::array<double, kDim> row{};
  for (const auto& [f, label] : rows) {
    const auto scaled = scale_to_unit(f, model);
    std::copy(scaled.begin(), scaled.end(), row.begin());
    row[kFeatureCount] = 1.0;
    for (int i = 0; i < kDim; ++i) {
      for (int j = 0; j <= i; ++j) mat[i * kDim + j] += row[i] * row[j];
      rhs[i] += row[i] * label;
    }
  }
  for (int i = 0; i < kDim; ++i) {
    for (int j = i + 1; j < kDim; ++j) mat[i * kDim + j] = mat[j * kDim + i];
    mat[i * kDim + i] += kRidge;
  }
  const std::vector<double> solution = cholesky_solve(std::move(mat), std::move(rhs), kDim);
  std::copy(solution.begin(), solution.begin() + kFeatureCount, model.weights.begin());
  model.bias = solution[kFeatureCount];
  return model;
}

namespace {

std::array<double, kFeatureCount> array_from_json(const ordered_json& arr, const char* what) {
  if (!arr.is_array() || arr.size() != kFeatureCount) {
    fail(ErrorCode::model_dimension_mismatch,
         std::string(what) + " must be an array of " + std::to_string(kFeatureCount));
  }
  std::array<double, kFeatureCount> out{};
  for (int i = 0; i < kFeatureCount; ++i) {
    if (!arr[i].is_number()) {
      fail(ErrorCode::malformed_json, std::string(what) + " holds a non-number");
    }
    out[i] = arr[i].get<double>();
  }
  return out;
}

}  // namespace

QualityModel load_quality_model(const std::filesystem::path& path) {
  ordered_json doc;
  try {
    doc = ordered_json::parse(io::read_binary_file(path));
  } catch (const nlohmann::json::parse_error& err) {
    fail(ErrorCode::malformed_json, err.what());
  }
  if (!doc.is_object() || !doc.contains("kind") || !doc["kind"].is_string()) {
    fail(ErrorCode::malformed_json, "quality model needs a string \"kind\"");
  }
  QualityModel model;
  const std::string kind = doc["kind"].get<std::string>();
  model.feature_lo = array_from_json(doc.value("feature_lo", ordered_json()), "feature_lo");
  model.feature_hi = array_from_json(doc.value("feature_hi", ordered_json()), "feature_hi");
  if (kind == "linear") {
    model.kind = ModelKind::linear;
    model.weights = array_from_json(doc.value("weights", ordered_json()), "weights");
    if (!doc.contains("bias") || !doc["bias"].is_number()) {
      fail(ErrorCode::malformed_json, "linear model needs a numeric bias");
    }
    model.bias = doc["bias"].get<double>();
  } else if (kind == "rbf_svr") {
    model.kind = ModelKind::rbf_svr;
    if (!doc.contains("gamma") || !doc["gamma"].is_number() || !doc.contains("rho") ||
        !doc["rho"].is_number() || !doc.contains("support_vectors") ||
        !doc["support_vectors"].is_array()) {
      fail(ErrorCode::malformed_json, "rbf_svr model needs gamma, rho, support_vectors");
    }
    model.gamma = doc["gamma"].get<double>();
    model.rho = doc["rho"].get<double>();
    for (const ordered_json& item : doc["support_vectors"]) {
      if (!item.is_object() || !item.contains("coef") || !item["coef"].is_number()) {
        fail(ErrorCode::malformed_json, "support vector needs a numeric coef");
      }
      SupportVector sv;
      sv.coef = item["coef"].get<double>();
      sv.values = array_from_json(item.value("values", ordered_json()), "support vector values");
      model.support_vectors.push_back(sv);
    }
  } else {
    fail(ErrorCode::malformed_json, "unknown model kind: " + kind);
  }
  validate_quality_model(model);
  return model;
}

void save_quality_model(const QualityModel& model, const std::filesystem::path& path) {
  validate_quality_model(model);
  ordered_json doc;
  doc["kind"] = model.kind == ModelKind::linear ? "linear" : "rbf_svr";
  doc["feature_lo"] = model.feature_lo;
  doc["feature_hi"] = model.feature_hi;
  if (model.kind == ModelKind::linear) {
    doc["weights"] = model.weights;
    doc["bias"] = model.bias;
  } else {
    doc["gamma"] = model.gamma;
    doc["rho"] = model.rho;
    ordered_json svs = ordered_json::array();
    for (const SupportVector& sv : model.support_vectors) {
      ordered_json item;
      item["coef"] = sv.coef;
      item["values"] = sv.values;
      svs.push_back(std::move(item));
    }
    doc["support_vectors"] = std::move(svs);
  }
  io::write_file_atomic(path, doc.dump(2) + "\n");
}

}  // namespace driftcurate::brisque
