#pragma once

#include <array>
#include <filesystem>
#include <span>
#include <utility>
#include <vector>

#include "driftcurate/image.hpp"

namespace driftcurate::brisque {

inline constexpr int kFeatureCount = 36;
inline constexpr double kDefaultMscnC = 1.0;
inline constexpr double kAlphaGridLo = 0.2;
inline constexpr double kAlphaGridHi = 10.0;
inline constexpr double kAlphaGridStep = 0.001;

struct GgdParams {
  double alpha = 0.0;
  double sigma = 0.0;  // scale, sqrt(mean(x^2))
};

struct AggdParams {
  double alpha = 0.0;
  double sigma_left = 0.0;
  double sigma_right = 0.0;
  double eta = 0.0;
};

// Per scale: [GGD alpha, GGD sigma^2] then per orientation H, V, D1, D2:
// [AGGD alpha, eta, sigma_left^2, sigma_right^2]. Scale 1 block first.
struct BrisqueFeatures {
  std::array<double, kFeatureCount> values{};
};

enum class ModelKind { linear, rbf_svr };

struct SupportVector {
  double coef = 0.0;
  std::array<double, kFeatureCount> values{};
};

struct QualityModel {
  ModelKind kind = ModelKind::linear;
  std::array<double, kFeatureCount> feature_lo{};
  std::array<double, kFeatureCount> feature_hi{};
  // linear
  std::array<double, kFeatureCount> weights{};
  double bias = 0.0;
  // rbf_svr
  double gamma = 0.0;
  double rho = 0.0;
  std::vector<SupportVector> support_vectors;
};

void validate_quality_model(const QualityModel& model);

struct QualityScore {
  double sigma = 0.0;  // lower = better perceptual quality
};

// Gamma function, Lanczos approximation (g = 7, 9 coefficients).
double gamma_fn(double x);

// Inverts r(g) = gamma(2/g)^2 / (gamma(1/g) * gamma(3/g)) over the fit grid
// [0.2, 10] step 0.001; nearest grid point, ties toward smaller g.
double invert_rho(double target);

io::GrayPlane to_luma(const io::Image& img);

// Eq-style local normalization: (I - mu) / (sigma + c) with a 7x7 Gaussian
// window (std 7/6), weights renormalized where the window is truncated at
// the borders. The numerator is accumulated as weighted differences so a
// constant plane maps to exact zeros.
io::GrayPlane mscn(const io::GrayPlane& plane, double c);

struct OrientationProducts {
  io::GrayPlane h;   // (h,   w-1)
  io::GrayPlane v;   // (h-1, w)
  io::GrayPlane d1;  // (h-1, w-1)
  io::GrayPlane d2;  // (h-1, w-1)
};

OrientationProducts pairwise_products(const io::GrayPlane& mscn_plane);

GgdParams fit_ggd(std::span<const double> samples);
AggdParams fit_aggd(std::span<const double> samples);

BrisqueFeatures brisque_features(const io::GrayPlane& plane, double c);

QualityScore score(const BrisqueFeatures& features, const QualityModel& model);

// Ridge least squares (lambda = 1e-6) on min-max scaled features with a
// bias column; scaling ranges come from the training rows.
QualityModel train_quality_model(const std::vector<std::pair<BrisqueFeatures, double>>& rows);

QualityModel load_quality_model(const std::filesystem::path& path);
void save_quality_model(const QualityModel& model, const std::filesystem::path& path);

// Plain-text epsilon-SVR interchange format plus its companion
// per-feature scaling-range file.
QualityModel import_svr_model(const std::filesystem::path& model_path,
                              const std::filesystem::path& range_path);

}  // namespace driftcurate::brisque
