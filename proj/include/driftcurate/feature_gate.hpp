#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "driftcurate/manifest.hpp"
#include "driftcurate/quality_gate.hpp"
#include "driftcurate/tensor.hpp"

namespace driftcurate::fgate {

struct PooledVector {
  std::vector<double> values;
};

enum class GateLabel { negative, positive };

struct SvmModel {
  std::vector<double> weights;  // in standardized space
  double bias = 0.0;
  double c_param = 1.0;
  std::vector<double> mean;  // per-dimension standardization
  std::vector<double> std;   // always > 0; zero-variance dims get 1
  std::vector<int> levels;   // pooling grid sizes
  uint32_t v_expected = 0;   // channel count the model was trained on
};

void validate_svm_model(const SvmModel& model);

// Max pooling over an L x L grid per level, concatenated channel-major,
// levels in the given order, cells row-major. Output length V * sum(L^2).
PooledVector spp_pool(const io::FeatureMap& map, const std::vector<int>& levels);

// dice >= tau labels positive.
std::vector<std::pair<std::string, GateLabel>> label_by_dice(const io::DatasetManifest& manifest,
                                                             double tau);

struct SvmTrainOptions {
  double c_param = 1.0;
  uint64_t seed = 0;
  // stored on the model for gate_new_data; the trainer itself only sees vectors
  std::vector<int> levels{1, 2, 4};
  uint32_t v_expected = 0;
};

// Linear soft-margin SVM, dual coordinate descent over standardized
// vectors with the bias as an extra constant feature. Deterministic:
// a seeded permutation fixes the sweep order, then cyclic passes until
// the duality gap drops below 1e-6 or the update budget 10*n*k runs out.
SvmModel train_svm(const std::vector<std::pair<PooledVector, GateLabel>>& rows,
                   const SvmTrainOptions& options);

// margin = w . standardize(v) + b; positive iff margin >= 0.
std::pair<GateLabel, double> svm_predict(const SvmModel& model, const PooledVector& v);

// Pools each entry's feature map and routes it by the SVM sign. Entries
// whose maps fail to load or pool are rejected with a reason.
gate::SelectionResult gate_new_data(const SvmModel& model, const io::DatasetManifest& manifest,
                                    const std::filesystem::path& base_dir);

SvmModel load_svm_model(const std::filesystem::path& path);
void save_svm_model(const SvmModel& model, const std::filesystem::path& path);

}  // namespace driftcurate::fgate
