#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <set>
#include <vector>

#include "driftcurate/error.hpp"
#include "driftcurate/feature_gate.hpp"
#include "driftcurate/fixtures.hpp"
#include "driftcurate/fsio.hpp"
#include "driftcurate/quality_gate.hpp"
#include "driftcurate/rng.hpp"
#include "driftcurate/tensor.hpp"
#include "helpers.hpp"

using namespace driftcurate;

namespace {

io::DatasetManifest scored_manifest(const std::vector<double>& scores) {
  io::DatasetManifest m;
  for (size_t i = 0; i < scores.size(); ++i) {
    io::ManifestEntry e;
    e.id = "e" + std::to_string(i);
    e.image_path = e.id + ".pgm";
    e.score = scores[i];
    m.entries.push_back(std::move(e));
  }
  return m;
}

std::vector<std::string> ids_of(const io::DatasetManifest& m) {
  std::vector<std::string> ids;
  for (const io::ManifestEntry& e : m.entries) ids.push_back(e.id);
  return ids;
}

}  // namespace

TEST_CASE("select_by_threshold boundary and ordering") {
  const io::DatasetManifest m = scored_manifest({10, 59.9, 60, 80});
  const gate::SelectionResult low =
      gate::select_by_threshold(m, {60.0, gate::Polarity::lower_is_better});
  CHECK(ids_of(low.selected) == std::vector<std::string>{"e0", "e1", "e2"});
  CHECK(ids_of(low.rejected) == std::vector<std::string>{"e3"});

  const gate::SelectionResult high =
      gate::select_by_threshold(m, {60.0, gate::Polarity::higher_is_better});
  CHECK(ids_of(high.selected) == std::vector<std::string>{"e2", "e3"});  // 60 is kept
  CHECK(ids_of(high.rejected) == std::vector<std::string>{"e0", "e1"});

  const gate::SelectionResult empty =
      gate::select_by_threshold(io::DatasetManifest{}, {0.0, gate::Polarity::lower_is_better});
  CHECK(empty.selected.entries.empty());
  CHECK(empty.rejected.entries.empty());

  io::DatasetManifest unscored = m;
  unscored.entries[2].score.reset();
  CHECK(raises(ErrorCode::missing_score, [&] {
    gate::select_by_threshold(unscored, {60.0, gate::Polarity::lower_is_better});
  }));
}

TEST_CASE("selection is a sound partition, monotone in the threshold") {
  Rng rng(7);
  for (int trial = 0; trial < 1000; ++trial) {
    const size_t n = rng.bounded(50);
    std::vector<double> scores(n);
    for (double& s : scores) s = 200.0 * rng.uniform01() - 100.0;
    const io::DatasetManifest m = scored_manifest(scores);
    const double t = 200.0 * rng.uniform01() - 100.0;
    const gate::Polarity pol =
        rng.bounded(2) ? gate::Polarity::higher_is_better : gate::Polarity::lower_is_better;
    const gate::SelectionResult r = gate::select_by_threshold(m, {t, pol});

    // exact partition: sizes add up and the interleaved order reproduces the input
    REQUIRE(r.selected.entries.size() + r.rejected.entries.size() == n);
    std::vector<std::string> merged;
    size_t si = 0, ri = 0;
    for (const io::ManifestEntry& e : m.entries) {
      if (si < r.selected.entries.size() && r.selected.entries[si].id == e.id) {
        merged.push_back(r.selected.entries[si++].id);
      } else {
        REQUIRE(ri < r.rejected.entries.size());
        REQUIRE(r.rejected.entries[ri].id == e.id);
        merged.push_back(r.rejected.entries[ri++].id);
      }
    }
    CHECK(merged == ids_of(m));

    // gate soundness: closed on the good side
    for (const io::ManifestEntry& e : r.selected.entries) {
      CHECK((pol == gate::Polarity::higher_is_better ? *e.score >= t : *e.score <= t));
    }
    for (const io::ManifestEntry& e : r.rejected.entries) {
      CHECK((pol == gate::Polarity::higher_is_better ? *e.score < t : *e.score > t));
    }

    // monotone: loosening the gate never shrinks the selected set
    const double t2 = pol == gate::Polarity::lower_is_better ? t + 50.0 * rng.uniform01()
                                                             : t - 50.0 * rng.uniform01();
    const gate::SelectionResult r2 = gate::select_by_threshold(m, {t2, pol});
    CHECK(r2.selected.entries.size() >= r.selected.entries.size());
    const std::vector<std::string> wide_ids = ids_of(r2.selected);
    const std::set<std::string> wider(wide_ids.begin(), wide_ids.end());
    for (const io::ManifestEntry& e : r.selected.entries) {
      CHECK(wider.count(e.id) == 1);
    }
  }
}

TEST_CASE("score_histogram partitions counts") {
  const auto bins = gate::score_histogram({0.0, 10.0}, 2);
  REQUIRE(bins.size() == 2);
  CHECK(bins[0].count == 1);
  CHECK(bins[1].count == 1);
  CHECK(bins[0].lo == 0.0);
  CHECK(bins[1].hi > 10.0);

  const auto flat = gate::score_histogram({5.0, 5.0, 5.0}, 4);
  uint64_t total = 0;
  for (const auto& b : flat) total += b.count;
  CHECK(total == 3);
  CHECK(flat[0].count == 3);

  Rng rng(19);
  std::vector<double> scores(1000);
  for (double& s : scores) s = 100.0 * rng.gaussian();
  const auto big = gate::score_histogram(scores, 17);
  total = 0;
  for (const auto& b : big) total += b.count;
  CHECK(total == 1000);

  CHECK(raises(ErrorCode::empty_input, [] { gate::score_histogram({}, 4); }));
}

TEST_CASE("mix_manifests honors the 70/30 protocol") {
  std::vector<double> scores_a(70, 1.0), scores_b(30, 2.0);
  const io::DatasetManifest a = scored_manifest(scores_a);
  const io::DatasetManifest b = scored_manifest(scores_b);
  const io::DatasetManifest mixed = gate::mix_manifests(a, b, 0.7, 11);
  CHECK(mixed.entries.size() == 100);
  size_t from_a = 0;
  for (const io::ManifestEntry& e : mixed.entries) {
    from_a += e.id.rfind("a:", 0) == 0;
  }
  CHECK(from_a == 70);
  io::validate_manifest(mixed);  // prefixed ids stay unique
}

TEST_CASE("mix_manifests determinism and bounds") {
  std::vector<double> sa(20, 1.0), sb(50, 2.0);
  const io::DatasetManifest a = scored_manifest(sa);
  const io::DatasetManifest b = scored_manifest(sb);

  const io::DatasetManifest m1 = gate::mix_manifests(a, b, 0.5, 3);
  const io::DatasetManifest m2 = gate::mix_manifests(a, b, 0.5, 3);
  CHECK(ids_of(m1) == ids_of(m2));
  CHECK(m1.entries.size() == 40);  // bounded by |a| = 20 at fraction 0.5

  const io::DatasetManifest m3 = gate::mix_manifests(a, b, 0.5, 4);
  CHECK(ids_of(m3) != ids_of(m1));  // different seed, different draw
  CHECK(m3.entries.size() == 40);

  const io::DatasetManifest all_a = gate::mix_manifests(a, b, 1.0, 5);
  CHECK(all_a.entries.size() == 20);
  for (const io::ManifestEntry& e : all_a.entries) CHECK(e.id.rfind("a:", 0) == 0);

  const io::DatasetManifest all_b = gate::mix_manifests(a, b, 0.0, 6);
  CHECK(all_b.entries.size() == 50);
  for (const io::ManifestEntry& e : all_b.entries) CHECK(e.id.rfind("b:", 0) == 0);

  CHECK(raises(ErrorCode::fraction_infeasible, [&] {
    gate::mix_manifests(io::DatasetManifest{}, io::DatasetManifest{}, 0.5, 1);
  }));
  CHECK(raises(ErrorCode::fraction_infeasible,
               [&] { gate::mix_manifests(io::DatasetManifest{}, b, 1.0, 1); }));
}

TEST_CASE("spp_pool hand cases and length law") {
  io::FeatureMap map;
  map.channels = 1;
  map.height = 4;
  map.width = 4;
  map.data.resize(16);
  for (int i = 0; i < 16; ++i) map.data[i] = static_cast<float>(i + 1);
  const fgate::PooledVector quads = fgate::spp_pool(map, {2});
  CHECK(quads.values == std::vector<double>{6, 8, 14, 16});

  const fgate::PooledVector full = fgate::spp_pool(map, {1, 2});
  CHECK(full.values == std::vector<double>{16, 6, 8, 14, 16});

  io::FeatureMap flat;
  flat.channels = 3;
  flat.height = 5;
  flat.width = 7;
  flat.data.assign(3 * 5 * 7, 2.5f);
  const fgate::PooledVector pooled = fgate::spp_pool(flat, {1, 2});
  CHECK(pooled.values.size() == 3 * 5);
  for (double v : pooled.values) CHECK(v == 2.5);

  // same k for different spatial sizes
  io::FeatureMap big;
  big.channels = 3;
  big.height = 64;
  big.width = 64;
  big.data.assign(3 * 64 * 64, 0.0f);
  CHECK(fgate::spp_pool(big, {1, 2, 4}).values.size() == 63);
  io::FeatureMap small;
  small.channels = 3;
  small.height = 8;
  small.width = 8;
  small.data.assign(3 * 8 * 8, 0.0f);
  CHECK(fgate::spp_pool(small, {1, 2, 4}).values.size() == 63);

  io::FeatureMap tiny;
  tiny.channels = 1;
  tiny.height = 3;
  tiny.width = 3;
  tiny.data.assign(9, 0.0f);
  CHECK(raises(ErrorCode::map_too_small, [&] { fgate::spp_pool(tiny, {4}); }));
}

TEST_CASE("spp_pool is monotone under pointwise increase") {
  Rng rng(43);
  io::FeatureMap map;
  map.channels = 2;
  map.height = 9;
  map.width = 6;
  map.data.resize(2 * 9 * 6);
  for (float& v : map.data) v = static_cast<float>(rng.gaussian());
  const fgate::PooledVector before = fgate::spp_pool(map, {1, 2, 4});
  io::FeatureMap bumped = map;
  for (float& v : bumped.data) v += 0.25f;
  const fgate::PooledVector after = fgate::spp_pool(bumped, {1, 2, 4});
  for (size_t i = 0; i < before.values.size(); ++i) {
    CHECK(after.values[i] >= before.values[i]);
  }
}

TEST_CASE("label_by_dice thresholds closed on the good side") {
  io::DatasetManifest m = scored_manifest({1, 2, 3});
  m.entries[0].dice = 1.0;
  m.entries[1].dice = 0.5;
  m.entries[2].dice = 0.49;
  const auto labels = fgate::label_by_dice(m, 0.5);
  CHECK(labels[0].second == fgate::GateLabel::positive);
  CHECK(labels[1].second == fgate::GateLabel::positive);
  CHECK(labels[2].second == fgate::GateLabel::negative);

  m.entries[1].dice.reset();
  CHECK(raises(ErrorCode::missing_dice, [&] { fgate::label_by_dice(m, 0.5); }));
}

TEST_CASE("svm separates the toy 2-d set") {
  std::vector<std::pair<fgate::PooledVector, fgate::GateLabel>> rows = {
      {{{2.0, 0.0}}, fgate::GateLabel::positive},
      {{{3.0, 1.0}}, fgate::GateLabel::positive},
      {{{-2.0, 0.0}}, fgate::GateLabel::negative},
      {{{-3.0, -1.0}}, fgate::GateLabel::negative},
  };
  fgate::SvmTrainOptions options;
  options.c_param = 1.0;
  options.seed = 3;
  options.levels = {1};
  options.v_expected = 2;
  const fgate::SvmModel model = fgate::train_svm(rows, options);
  for (const auto& [vec, label] : rows) {
    const auto [pred, margin] = fgate::svm_predict(model, vec);
    CHECK(pred == label);
    if (label == fgate::GateLabel::positive) CHECK(margin >= 0.0);
    if (label == fgate::GateLabel::negative) CHECK(margin < 0.0);
  }
}

TEST_CASE("svm training is deterministic and validates inputs") {
  Rng rng(53);
  std::vector<std::pair<fgate::PooledVector, fgate::GateLabel>> rows;
  for (int i = 0; i < 30; ++i) {
    fgate::PooledVector v;
    const double offset = i % 2 == 0 ? 1.5 : -1.5;
    for (int d = 0; d < 5; ++d) v.values.push_back(offset + 0.4 * rng.gaussian());
    rows.emplace_back(std::move(v),
                      i % 2 == 0 ? fgate::GateLabel::positive : fgate::GateLabel::negative);
  }
  fgate::SvmTrainOptions options;
  options.seed = 9;
  options.levels = {1};
  options.v_expected = 5;
  const fgate::SvmModel m1 = fgate::train_svm(rows, options);
  const fgate::SvmModel m2 = fgate::train_svm(rows, options);
  CHECK(m1.weights == m2.weights);  // bitwise
  CHECK(m1.bias == m2.bias);
  CHECK(m1.mean == m2.mean);
  CHECK(m1.std == m2.std);

  auto single = rows;
  for (auto& [vec, label] : single) label = fgate::GateLabel::positive;
  CHECK(raises(ErrorCode::single_class, [&] { fgate::train_svm(single, options); }));

  auto ragged = rows;
  ragged[3].first.values.push_back(0.0);
  CHECK(raises(ErrorCode::length_mismatch, [&] { fgate::train_svm(ragged, options); }));

  std::vector<std::pair<fgate::PooledVector, fgate::GateLabel>> same = {
      {{{1.0, 2.0}}, fgate::GateLabel::positive},
      {{{1.0, 2.0}}, fgate::GateLabel::negative},
  };
  CHECK(raises(ErrorCode::degenerate, [&] {
    fgate::SvmTrainOptions o;
    o.levels = {1};
    o.v_expected = 2;
    fgate::train_svm(same, o);
  }));
}

TEST_CASE("svm margin is affine in the input") {
  std::vector<std::pair<fgate::PooledVector, fgate::GateLabel>> rows = {
      {{{2.0, 1.0, 0.0}}, fgate::GateLabel::positive},
      {{{1.5, 2.0, 1.0}}, fgate::GateLabel::positive},
      {{{-2.0, -1.0, 0.5}}, fgate::GateLabel::negative},
      {{{-1.5, -2.0, -1.0}}, fgate::GateLabel::negative},
  };
  fgate::SvmTrainOptions options;
  options.levels = {1};
  options.v_expected = 3;
  const fgate::SvmModel model = fgate::train_svm(rows, options);
  Rng rng(61);
  for (int trial = 0; trial < 50; ++trial) {
    fgate::PooledVector u, v, blend;
    const double a = rng.uniform01();
    for (int d = 0; d < 3; ++d) {
      u.values.push_back(rng.gaussian());
      v.values.push_back(rng.gaussian());
      blend.values.push_back(a * u.values[d] + (1.0 - a) * v.values[d]);
    }
    const double mu = fgate::svm_predict(model, u).second;
    const double mv = fgate::svm_predict(model, v).second;
    const double mb = fgate::svm_predict(model, blend).second;
    CHECK(mb == doctest::Approx(a * mu + (1.0 - a) * mv).epsilon(1e-9));
  }

  fgate::PooledVector wrong;
  wrong.values = {1.0};
  CHECK(raises(ErrorCode::length_mismatch, [&] { fgate::svm_predict(model, wrong); }));
}

TEST_CASE("svm model json survives write-read-write byte identically") {
  TempDir tmp("svm_json");
  std::vector<std::pair<fgate::PooledVector, fgate::GateLabel>> rows = {
      {{{2.0, 0.5}}, fgate::GateLabel::positive},
      {{{-2.0, -0.5}}, fgate::GateLabel::negative},
      {{{2.5, 0.25}}, fgate::GateLabel::positive},
      {{{-2.5, -0.25}}, fgate::GateLabel::negative},
  };
  fgate::SvmTrainOptions options;
  options.levels = {1};
  options.v_expected = 2;
  const fgate::SvmModel model = fgate::train_svm(rows, options);
  fgate::save_svm_model(model, tmp.file("m.json"));
  const fgate::SvmModel back = fgate::load_svm_model(tmp.file("m.json"));
  fgate::save_svm_model(back, tmp.file("m2.json"));
  CHECK(io::read_binary_file(tmp.file("m.json")) == io::read_binary_file(tmp.file("m2.json")));
  CHECK(back.weights == model.weights);
  CHECK(back.v_expected == 2);
}

TEST_CASE("gate_new_data routes cluster fixtures to the matching side") {
  TempDir tmp("gate_route");
  // train on generator output, then gate fresh draws
  std::vector<std::pair<fgate::PooledVector, fgate::GateLabel>> rows;
  Rng rng(71);
  for (int i = 0; i < 40; ++i) {
    const bool positive = i % 2 == 0;
    const io::FeatureMap map = fixtures::cluster_feature_map(rng, positive, 4, 16);
    rows.emplace_back(fgate::spp_pool(map, {1, 2, 4}),
                      positive ? fgate::GateLabel::positive : fgate::GateLabel::negative);
  }
  fgate::SvmTrainOptions options;
  options.seed = 5;
  options.levels = {1, 2, 4};
  options.v_expected = 4;
  const fgate::SvmModel model = fgate::train_svm(rows, options);

  io::DatasetManifest manifest;
  std::vector<bool> truth;
  for (int i = 0; i < 20; ++i) {
    const bool positive = i % 2 == 0;
    const io::FeatureMap map = fixtures::cluster_feature_map(rng, positive, 4, 16);
    const std::string name = "new" + std::to_string(i);
    io::write_tensor(map, tmp.file(name + ".ften"));
    io::ManifestEntry e;
    e.id = name;
    e.image_path = name + ".pgm";
    e.feature_path = name + ".ften";
    manifest.entries.push_back(e);
    truth.push_back(positive);
  }
  const gate::SelectionResult result = fgate::gate_new_data(model, manifest, tmp.path);
  CHECK(result.selected.entries.size() + result.rejected.entries.size() == 20);
  int matching = 0;
  for (const io::ManifestEntry& e : result.selected.entries) {
    CHECK(e.margin.has_value());
    CHECK(*e.margin >= 0.0);
    matching += truth[std::stoul(e.id.substr(3))];
  }
  for (const io::ManifestEntry& e : result.rejected.entries) {
    if (e.margin) CHECK(*e.margin < 0.0);
    matching += !truth[std::stoul(e.id.substr(3))];
  }
  CHECK(matching >= 18);
}

TEST_CASE("gate_new_data rejects broken entries with a reason") {
  TempDir tmp("gate_errors");
  std::vector<std::pair<fgate::PooledVector, fgate::GateLabel>> rows = {
      {{{1.0, 1.0, 1.0, 1.0, 1.0}}, fgate::GateLabel::positive},
      {{{-1.0, -1.0, -1.0, -1.0, -1.0}}, fgate::GateLabel::negative},
      {{{1.1, 1.0, 0.9, 1.0, 1.0}}, fgate::GateLabel::positive},
      {{{-1.1, -1.0, -0.9, -1.0, -1.0}}, fgate::GateLabel::negative},
  };
  fgate::SvmTrainOptions options;
  options.levels = {1};
  options.v_expected = 5;
  const fgate::SvmModel model = fgate::train_svm(rows, options);

  io::FeatureMap wrong_channels;
  wrong_channels.channels = 2;
  wrong_channels.height = 4;
  wrong_channels.width = 4;
  wrong_channels.data.assign(32, 1.0f);
  io::write_tensor(wrong_channels, tmp.file("bad.ften"));

  io::DatasetManifest manifest;
  io::ManifestEntry missing;
  missing.id = "missing";
  missing.image_path = "missing.pgm";
  missing.feature_path = "missing.ften";
  io::ManifestEntry bad;
  bad.id = "bad";
  bad.image_path = "bad.pgm";
  bad.feature_path = "bad.ften";
  io::ManifestEntry none;
  none.id = "none";
  none.image_path = "none.pgm";
  manifest.entries = {missing, bad, none};

  const gate::SelectionResult result = fgate::gate_new_data(model, manifest, tmp.path);
  CHECK(result.selected.entries.empty());
  REQUIRE(result.rejected.entries.size() == 3);
  for (const io::ManifestEntry& e : result.rejected.entries) {
    CHECK(e.reason.has_value());
    CHECK_FALSE(e.margin.has_value());
  }
  CHECK(result.rejected.entries[1].reason->find("v_expected") != std::string::npos);
}

TEST_CASE("all-rejecting model rejects everything") {
  fgate::SvmModel model;
  model.weights = {0.0, 0.0};
  model.bias = -1.0;
  model.mean = {0.0, 0.0};
  model.std = {1.0, 1.0};
  model.levels = {1};
  model.v_expected = 2;
  fgate::PooledVector v;
  v.values = {123.0, -55.0};
  const auto [label, margin] = fgate::svm_predict(model, v);
  CHECK(label == fgate::GateLabel::negative);
  CHECK(margin == -1.0);
}
