#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "driftcurate/csv.hpp"
#include "driftcurate/distort.hpp"
#include "driftcurate/error.hpp"
#include "driftcurate/feature_gate.hpp"
#include "driftcurate/fixtures.hpp"
#include "driftcurate/fsio.hpp"
#include "driftcurate/metrics.hpp"
#include "driftcurate/pnm.hpp"
#include "driftcurate/quality_gate.hpp"
#include "driftcurate/tensor.hpp"

namespace fs = std::filesystem;
using namespace driftcurate;

namespace {

std::vector<fs::path> list_files(const fs::path& dir, std::initializer_list<const char*> exts) {
  if (!fs::is_directory(dir)) {
    fail(ErrorCode::missing_file, "not a directory: " + dir.string());
  }
  std::vector<fs::path> files;
  for (const fs::directory_entry& e : fs::directory_iterator(dir)) {
    if (!e.is_regular_file()) continue;
    const std::string ext = e.path().extension().string();
    if (std::any_of(exts.begin(), exts.end(), [&](const char* x) { return ext == x; })) {
      files.push_back(e.path());
    }
  }
  std::sort(files.begin(), files.end());
  return files;
}

gate::Polarity parse_polarity(const std::string& name) {
  if (name == "high") return gate::Polarity::higher_is_better;
  if (name == "low") return gate::Polarity::lower_is_better;
  fail(ErrorCode::invalid_argument, "polarity must be high or low");
}

std::optional<double> parse_optional_double(const std::string& cell, const std::string& where) {
  if (cell.empty()) return std::nullopt;
  try {
    size_t used = 0;
    const double v = std::stod(cell, &used);
    if (used == cell.size()) return v;
  } catch (const std::exception&) {
  }
  fail(ErrorCode::invalid_argument, "cannot parse number \"" + cell + "\" in " + where);
}

std::vector<int> parse_levels(const std::string& text) {
  std::vector<int> levels;
  size_t pos = 0;
  while (pos < text.size()) {
    size_t comma = text.find(',', pos);
    if (comma == std::string::npos) comma = text.size();
    const std::string tok = text.substr(pos, comma - pos);
    try {
      levels.push_back(std::stoi(tok));
    } catch (const std::exception&) {
      fail(ErrorCode::invalid_argument, "bad pooling level \"" + tok + "\"");
    }
    pos = comma + 1;
  }
  return levels;
}

int cmd_score(const fs::path& manifest_path, const fs::path& model_path, const fs::path& out_csv,
              double mscn_c) {
  io::DatasetManifest manifest = io::load_manifest(manifest_path);
  const brisque::QualityModel model = brisque::load_quality_model(model_path);
  gate::score_manifest(manifest, model, mscn_c, manifest_path.parent_path());

  io::CsvTable table;
  table.header = {"id", "score", "verdict", "reason"};
  int failures = 0;
  for (const io::ManifestEntry& e : manifest.entries) {
    table.rows.push_back({e.id, e.score ? io::format_double(*e.score) : "",
                          e.verdict ? io::verdict_name(*e.verdict) : "",
                          e.reason.value_or("")});
    failures += e.reason.has_value();
  }
  io::write_csv(table, out_csv);
  io::save_manifest(manifest, manifest_path);
  if (failures > 0) {
    std::cerr << failures << " of " << manifest.entries.size() << " entries failed scoring\n";
  }
  return 0;
}

int cmd_distort(const fs::path& in_dir, const fs::path& out_dir, int levels) {
  const std::vector<fs::path> files = list_files(in_dir, {".pgm", ".ppm"});
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) fail(ErrorCode::io_failure, "cannot create " + out_dir.string());
  int skipped = 0;
  for (const fs::path& file : files) {
    try {
      io::save_image(distort::degrade(io::load_image(file), levels), out_dir / file.filename());
    } catch (const Error& err) {
      std::cerr << file.filename().string() << " skipped: " << err.what() << "\n";
      ++skipped;
    }
  }
  if (skipped > 0) {
    std::cerr << skipped << " of " << files.size() << " files skipped\n";
  }
  return 0;
}

int cmd_select(const fs::path& scores_csv, double threshold, const std::string& polarity,
               const std::string& out_prefix) {
  const gate::SelectionThreshold th{threshold, parse_polarity(polarity)};
  const io::CsvTable in = io::read_csv(scores_csv);
  const int id_col = in.column("id");
  const int score_col = in.column("score");
  if (id_col < 0 || score_col < 0) {
    fail(ErrorCode::malformed_header, "scores CSV needs id and score columns");
  }
  const int reason_col = in.column("reason");

  io::CsvTable selected, rejected;
  selected.header = rejected.header = {"id", "score", "verdict", "reason"};
  for (const std::vector<std::string>& row : in.rows) {
    const std::string& id = row[id_col];
    const std::optional<double> score = parse_optional_double(row[score_col], "row " + id);
    std::string reason = reason_col >= 0 ? row[reason_col] : "";
    if (!score) {
      // already rejected upstream (unscorable); keep it on the rejected side
      rejected.rows.push_back({id, "", "rejected", reason});
      continue;
    }
    const bool keep = th.polarity == gate::Polarity::higher_is_better ? *score >= th.t
                                                                      : *score <= th.t;
    (keep ? selected : rejected)
        .rows.push_back({id, row[score_col], keep ? "selected" : "rejected", reason});
  }
  io::write_csv(selected, out_prefix + "_selected.csv");
  io::write_csv(rejected, out_prefix + "_rejected.csv");
  if (selected.rows.empty()) std::cerr << "warning: threshold selects nothing\n";
  if (rejected.rows.empty()) std::cerr << "warning: threshold rejects nothing\n";
  return 0;
}

int cmd_gate_train(const fs::path& manifest_path, const fs::path& out_model, double tau,
                   double c_param, uint64_t seed, const std::string& levels_text) {
  const io::DatasetManifest manifest = io::load_manifest(manifest_path);
  const std::vector<int> levels = parse_levels(levels_text);
  const auto labels = fgate::label_by_dice(manifest, tau);

  std::vector<std::pair<fgate::PooledVector, fgate::GateLabel>> rows;
  uint32_t v_expected = 0;
  for (size_t i = 0; i < manifest.entries.size(); ++i) {
    const io::ManifestEntry& entry = manifest.entries[i];
    if (!entry.feature_path) {
      fail(ErrorCode::missing_file, "entry has no feature map path: " + entry.id);
    }
    const io::FeatureMap map = io::read_tensor(
        io::resolve_manifest_path(manifest_path.parent_path(), *entry.feature_path));
    if (v_expected == 0) {
      v_expected = map.channels;
    } else if (map.channels != v_expected) {
      fail(ErrorCode::model_dimension_mismatch,
           entry.id + " has " + std::to_string(map.channels) + " channels, expected " +
               std::to_string(v_expected));
    }
    rows.emplace_back(fgate::spp_pool(map, levels), labels[i].second);
  }
  fgate::SvmTrainOptions options;
  options.c_param = c_param;
  options.seed = seed;
  options.levels = levels;
  options.v_expected = v_expected;
  fgate::save_svm_model(fgate::train_svm(rows, options), out_model);
  return 0;
}

int cmd_gate_apply(const fs::path& model_path, const fs::path& manifest_path,
                   const fs::path& out_csv, const std::string& out_prefix) {
  const fgate::SvmModel model = fgate::load_svm_model(model_path);
  const io::DatasetManifest manifest = io::load_manifest(manifest_path);
  const gate::SelectionResult result =
      fgate::gate_new_data(model, manifest, manifest_path.parent_path());

  size_t pooled = result.selected.entries.size();
  for (const io::ManifestEntry& e : result.rejected.entries) pooled += e.margin.has_value();
  if (!manifest.entries.empty() && pooled == 0) {
    // nothing could be pooled at all; surface the first reason (it names
    // v_expected on a channel mismatch)
    std::cerr << "error: " << result.rejected.entries.front().reason.value_or("no entry usable")
              << "\n";
    return 1;
  }

  io::CsvTable table;
  table.header = {"id", "margin", "verdict"};
  int failures = 0;
  for (const io::DatasetManifest* part : {&result.selected, &result.rejected}) {
    for (const io::ManifestEntry& e : part->entries) {
      table.rows.push_back({e.id, e.margin ? io::format_double(*e.margin) : "",
                            e.verdict ? io::verdict_name(*e.verdict) : ""});
      failures += e.reason.has_value();
    }
  }
  io::write_csv(table, out_csv);
  if (!out_prefix.empty()) {
    io::save_manifest(result.selected, out_prefix + "_selected.json");
    io::save_manifest(result.rejected, out_prefix + "_rejected.json");
  }
  if (failures > 0) {
    std::cerr << failures << " of " << manifest.entries.size() << " entries failed the gate\n";
  }
  return 0;
}

int cmd_eval(const fs::path& pred_dir, const fs::path& truth_dir, double threshold,
             const fs::path& out_json, const fs::path& per_image_csv) {
  io::DatasetManifest manifest;
  for (const fs::path& truth : list_files(truth_dir, {".pgm"})) {
    io::ManifestEntry entry;
    entry.id = truth.stem().string();
    entry.image_path = truth.filename().string();
    entry.mask_path = truth.filename().string();
    manifest.entries.push_back(std::move(entry));
  }
  const metrics::PredictionResolver resolver =
      [&](const io::ManifestEntry& entry) -> std::optional<fs::path> {
    const fs::path candidate = pred_dir / *entry.mask_path;
    if (fs::exists(candidate)) return candidate;
    return std::nullopt;
  };
  std::vector<metrics::PerImageMetrics> per_image;
  const metrics::MetricsReport report =
      metrics::evaluate_manifest(manifest, threshold, truth_dir, resolver, &per_image);
  for (const std::string& w : report.warnings) std::cerr << "warning: " << w << "\n";
  io::write_file_atomic(out_json, metrics::report_to_json(report));
  if (!per_image_csv.empty()) {
    io::CsvTable table;
    table.header = {"id", "dice", "precision", "recall", "f_score"};
    for (const metrics::PerImageMetrics& m : per_image) {
      table.rows.push_back({m.id, io::format_double(m.dice), io::format_double(m.precision),
                            io::format_double(m.recall), io::format_double(m.f_score)});
    }
    io::write_csv(table, per_image_csv);
  }
  return 0;
}

int cmd_fixtures(const fs::path& out_dir, uint64_t seed, int count) {
  fixtures::CorpusOptions options;
  options.count = count;
  options.seed = seed;
  fixtures::generate_corpus(out_dir, options);
  return 0;
}

int cmd_mix(const fs::path& a_path, const fs::path& b_path, double fraction, uint64_t seed,
            const fs::path& out_path) {
  const io::DatasetManifest mixed = gate::mix_manifests(
      io::load_manifest(a_path), io::load_manifest(b_path), fraction, seed);
  io::save_manifest(mixed, out_path);
  return 0;
}

int cmd_hist(const fs::path& scores_csv, int bins, const fs::path& out_csv) {
  const io::CsvTable in = io::read_csv(scores_csv);
  const int score_col = in.column("score");
  if (score_col < 0) {
    fail(ErrorCode::malformed_header, "scores CSV needs a score column");
  }
  std::vector<double> scores;
  for (const std::vector<std::string>& row : in.rows) {
    const std::optional<double> s = parse_optional_double(row[score_col], "histogram input");
    if (s) scores.push_back(*s);
  }
  io::CsvTable table;
  table.header = {"bin_lo", "bin_hi", "count"};
  for (const gate::HistogramBin& bin : gate::score_histogram(scores, bins)) {
    table.rows.push_back(
        {io::format_double(bin.lo), io::format_double(bin.hi), std::to_string(bin.count)});
  }
  io::write_csv(table, out_csv);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"quality-aware training-data curation"};
  app.require_subcommand(1);

  std::string manifest_path, model_path, out_path, in_dir, out_dir, scores_csv, polarity = "low";
  std::string out_prefix, a_path, b_path, pred_dir, truth_dir, per_image_csv, levels_text = "1,2,4";
  double threshold = 0.5, mscn_c = brisque::kDefaultMscnC, tau = 0.5, c_param = 1.0;
  double fraction = 0.7;
  int levels = 1, bins = 16, count = 20;
  uint64_t seed = 1;

  CLI::App* score = app.add_subcommand("score", "score a manifest with a quality model");
  score->add_option("--manifest", manifest_path)->required();
  score->add_option("--model", model_path)->required();
  score->add_option("--out", out_path, "scores CSV")->required();
  score->add_option("--mscn-c", mscn_c, "MSCN stabilizer constant");

  CLI::App* distort_cmd = app.add_subcommand("distort", "pyramidally degrade a directory");
  distort_cmd->add_option("--in", in_dir)->required();
  distort_cmd->add_option("--out", out_dir)->required();
  distort_cmd->add_option("--levels", levels, "down/up round trips")->required();

  CLI::App* select = app.add_subcommand("select", "partition scored entries by threshold");
  select->add_option("--scores", scores_csv)->required();
  select->add_option("--threshold", threshold)->required();
  select->add_option("--polarity", polarity)->check(CLI::IsMember({"high", "low"}));
  select->add_option("--out-prefix", out_prefix)->required();

  CLI::App* gate_cmd = app.add_subcommand("gate", "feature-map SVM gate");
  gate_cmd->require_subcommand(1);
  CLI::App* gate_train = gate_cmd->add_subcommand("train", "train from a labeled manifest");
  gate_train->add_option("--manifest", manifest_path)->required();
  gate_train->add_option("--out", out_path, "SVM model JSON")->required();
  gate_train->add_option("--tau", tau, "dice threshold for positive labels");
  gate_train->add_option("--c-param", c_param);
  gate_train->add_option("--seed", seed);
  gate_train->add_option("--levels", levels_text, "pooling grids, comma separated");
  CLI::App* gate_apply = gate_cmd->add_subcommand("apply", "route a manifest through the gate");
  gate_apply->add_option("--model", model_path)->required();
  gate_apply->add_option("--manifest", manifest_path)->required();
  gate_apply->add_option("--out", out_path, "gate CSV")->required();
  gate_apply->add_option("--out-prefix", out_prefix, "also write selected/rejected manifests");

  CLI::App* eval = app.add_subcommand("eval", "compare prediction masks against truth masks");
  eval->add_option("--pred", pred_dir)->required();
  eval->add_option("--truth", truth_dir)->required();
  eval->add_option("--threshold", threshold);
  eval->add_option("--out", out_path, "report JSON")->required();
  eval->add_option("--per-image", per_image_csv, "per-image metrics CSV");

  CLI::App* fixtures_cmd = app.add_subcommand("fixtures", "generate the procedural test corpus");
  fixtures_cmd->add_option("--out", out_dir)->required();
  fixtures_cmd->add_option("--seed", seed);
  fixtures_cmd->add_option("--count", count)->check(CLI::PositiveNumber);

  CLI::App* mix = app.add_subcommand("mix", "seeded mixture of two manifests");
  mix->add_option("--a", a_path)->required();
  mix->add_option("--b", b_path)->required();
  mix->add_option("--fraction", fraction, "share drawn from a")->check(CLI::Range(0.0, 1.0));
  mix->add_option("--seed", seed);
  mix->add_option("--out", out_path)->required();

  CLI::App* hist = app.add_subcommand("hist", "score histogram CSV");
  hist->add_option("--scores", scores_csv)->required();
  hist->add_option("--bins", bins)->check(CLI::PositiveNumber);
  hist->add_option("--out", out_path)->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (app.got_subcommand(score)) {
      return cmd_score(manifest_path, model_path, out_path, mscn_c);
    }
    if (app.got_subcommand(distort_cmd)) {
      return cmd_distort(in_dir, out_dir, levels);
    }
    if (app.got_subcommand(select)) {
      return cmd_select(scores_csv, threshold, polarity, out_prefix);
    }
    if (app.got_subcommand(gate_cmd)) {
      if (gate_cmd->got_subcommand(gate_train)) {
        return cmd_gate_train(manifest_path, out_path, tau, c_param, seed, levels_text);
      }
      return cmd_gate_apply(model_path, manifest_path, out_path, out_prefix);
    }
    if (app.got_subcommand(eval)) {
      return cmd_eval(pred_dir, truth_dir, threshold, out_path, per_image_csv);
    }
    if (app.got_subcommand(fixtures_cmd)) {
      return cmd_fixtures(out_dir, seed, count);
    }
    if (app.got_subcommand(mix)) {
      return cmd_mix(a_path, b_path, fraction, seed, out_path);
    }
    if (app.got_subcommand(hist)) {
      return cmd_hist(scores_csv, bins, out_path);
    }
  } catch (const Error& err) {
    std::cerr << "error: " << err.what() << "\n";
    return 1;
  } catch (const std::exception& err) {
    std::cerr << "error: " << err.what() << "\n";
    return 1;
  }
  return 1;
}
