#include <charconv>
#include <sstream>
#include <string>
#include <vector>

#include "driftcurate/brisque.hpp"
#include "driftcurate/error.hpp"
#include "driftcurate/fsio.hpp"

namespace driftcurate::brisque {

namespace {

double parse_double(const std::string& tok, const char* context) {
  double out = 0.0;
  const char* first = tok.data();
  const char* last = tok.data() + tok.size();
  auto [ptr, ec] = std::from_chars(first, last, out);
  if (ec != std::errc() || ptr != last) {
    fail(ErrorCode::malformed_header,
         std::string(context) + ": cannot parse number \"" + tok + "\"");
  }
  return out;
}

int parse_index(const std::string& tok, const char* context) {
  int out = 0;
  auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), out);
  if (ec != std::errc() || ptr != tok.data() + tok.size()) {
    fail(ErrorCode::malformed_header,
         std::string(context) + ": cannot parse index \"" + tok + "\"");
  }
  return out;
}

std::vector<std::string> split_ws(const std::string& line) {
  std::vector<std::string> toks;
  std::istringstream stream(line);
  std::string t;
  while (stream >> t) toks.push_back(t);
  return toks;
}

std::vector<std::string> read_lines(const std::filesystem::path& path) {
  const std::string text = io::read_binary_file(path);
  std::vector<std::string> lines;
  std::string cur;
  for (char ch : text) {
    if (ch == '\n') {
      if (!cur.empty() && cur.back() == '\r') cur.pop_back();
      lines.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(ch);
    }
  }
  if (!cur.empty()) lines.push_back(cur);
  return lines;
}

// "index lo hi" rows, 1-based indices; optional leading "x" line and an
// optional two-number target-range line are skipped.
void parse_range_file(const std::filesystem::path& path, QualityModel& model) {
  bool seen[kFeatureCount] = {};
  for (const std::string& line : read_lines(path)) {
    const std::vector<std::string> toks = split_ws(line);
    if (toks.empty()) continue;
    if (toks.size() == 1 && (toks[0] == "x" || toks[0] == "y")) continue;
    if (toks.size() == 2) continue;  // target range of the scaler, not a feature row
    if (toks.size() != 3) {
      fail(ErrorCode::malformed_header, "range row must be \"index lo hi\": " + line);
    }
    const int idx = parse_index(toks[0], "range file");
    if (idx < 1 || idx > kFeatureCount) {
      fail(ErrorCode::model_dimension_mismatch,
           "range index " + std::to_string(idx) + " outside 1.." +
               std::to_string(kFeatureCount));
    }
    model.feature_lo[idx - 1] = parse_double(toks[1], "range lo");
    model.feature_hi[idx - 1] = parse_double(toks[2], "range hi");
    seen[idx - 1] = true;
  }
  for (int i = 0; i < kFeatureCount; ++i) {
    if (!seen[i]) {
      fail(ErrorCode::model_dimension_mismatch,
           "range file misses feature " + std::to_string(i + 1));
    }
  }
}

}  // namespace

QualityModel import_svr_model(const std::filesystem::path& model_path,
                              const std::filesystem::path& range_path) {
  QualityModel model;
  model.kind = ModelKind::rbf_svr;
  parse_range_file(range_path, model);

  const std::vector<std::string> lines = read_lines(model_path);
  size_t row = 0;
  long total_sv = -1;
  bool header_done = false;
  for (; row < lines.size(); ++row) {
    const std::vector<std::string> toks = split_ws(lines[row]);
    if (toks.empty()) continue;
    const std::string& key = toks[0];
    if (key == "SV") {
      header_done = true;
      ++row;
      break;
    }
    if (key == "svm_type") {
      if (toks.size() != 2 || toks[1] != "epsilon_svr") {
        fail(ErrorCode::malformed_header, "importer handles svm_type epsilon_svr only");
      }
    } else if (key == "kernel_type") {
      if (toks.size() != 2 || toks[1] != "rbf") {
        fail(ErrorCode::malformed_header, "importer handles kernel_type rbf only");
      }
    } else if (key == "gamma") {
      if (toks.size() != 2) fail(ErrorCode::malformed_header, "gamma line needs one value");
      model.gamma = parse_double(toks[1], "gamma");
    } else if (key == "rho") {
      if (toks.size() != 2) fail(ErrorCode::malformed_header, "rho line needs one value");
      model.rho = parse_double(toks[1], "rho");
    } else if (key == "total_sv") {
      if (toks.size() != 2) fail(ErrorCode::malformed_header, "total_sv line needs one value");
      total_sv = parse_index(toks[1], "total_sv");
    }
    // other header keys (nr_class, label, probA, ...) carry nothing we use
  }
  if (!header_done) {
    fail(ErrorCode::malformed_header, "model file has no SV section");
  }
  for (; row < lines.size(); ++row) {
    const std::vector<std::string> toks = split_ws(lines[row]);
    if (toks.empty()) continue;
    SupportVector sv;
    sv.coef = parse_double(toks[0], "sv coef");
    sv.values.fill(0.0);
    for (size_t t = 1; t < toks.size(); ++t) {
      const size_t colon = toks[t].find(':');
      if (colon == std::string::npos) {
        fail(ErrorCode::malformed_header, "sv term must be index:value, got " + toks[t]);
      }
      const int idx = parse_index(toks[t].substr(0, colon), "sv index");
      if (idx < 1 || idx > kFeatureCount) {
        fail(ErrorCode::model_dimension_mismatch,
             "sv index " + std::to_string(idx) + " outside 1.." +
                 std::to_string(kFeatureCount));
      }
      sv.values[idx - 1] = parse_double(toks[t].substr(colon + 1), "sv value");
    }
    model.support_vectors.push_back(std::move(sv));
  }
  if (total_sv >= 0 && static_cast<size_t>(total_sv) != model.support_vectors.size()) {
    fail(ErrorCode::malformed_header,
         "total_sv says " + std::to_string(total_sv) + " but file holds " +
             std::to_string(model.support_vectors.size()));
  }
  validate_quality_model(model);
  return model;
}

}  // namespace driftcurate::brisque
