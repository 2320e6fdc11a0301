#include "driftcurate/manifest.hpp"

#include <cmath>
#include <unordered_set>

#include <json.hpp>

#include "driftcurate/error.hpp"
#include "driftcurate/fsio.hpp"

namespace fs = std::filesystem;
using ordered_json = nlohmann::ordered_json;

namespace driftcurate::io {

const char* verdict_name(Verdict v) {
  return v == Verdict::selected ? "selected" : "rejected";
}

void validate_manifest(const DatasetManifest& manifest) {
  std::unordered_set<std::string> seen;
  for (const ManifestEntry& e : manifest.entries) {
    if (e.id.empty()) {
      fail(ErrorCode::malformed_json, "entry with empty id");
    }
    if (!seen.insert(e.id).second) {
      fail(ErrorCode::duplicate_id, "duplicate entry id: " + e.id);
    }
    if (e.image_path.empty()) {
      fail(ErrorCode::malformed_json, "entry " + e.id + " has empty image_path");
    }
    if (e.mask_path && e.mask_path->empty()) {
      fail(ErrorCode::malformed_json, "entry " + e.id + " has empty mask_path");
    }
    if (e.feature_path && e.feature_path->empty()) {
      fail(ErrorCode::malformed_json, "entry " + e.id + " has empty feature_path");
    }
    if (e.score && !std::isfinite(*e.score)) {
      fail(ErrorCode::range_error, "entry " + e.id + " has non-finite score");
    }
    if (e.dice && (!std::isfinite(*e.dice) || *e.dice < 0.0 || *e.dice > 1.0)) {
      fail(ErrorCode::range_error, "entry " + e.id + " has dice outside [0,1]");
    }
    if (e.margin && !std::isfinite(*e.margin)) {
      fail(ErrorCode::range_error, "entry " + e.id + " has non-finite margin");
    }
  }
}

namespace {

std::optional<std::string> opt_string(const ordered_json& obj, const char* key) {
  auto it = obj.find(key);
  if (it == obj.end() || it->is_null()) return std::nullopt;
  if (!it->is_string()) {
    fail(ErrorCode::malformed_json, std::string("field ") + key + " must be a string");
  }
  return it->get<std::string>();
}

std::optional<double> opt_number(const ordered_json& obj, const char* key) {
  auto it = obj.find(key);
  if (it == obj.end() || it->is_null()) return std::nullopt;
  if (!it->is_number()) {
    fail(ErrorCode::malformed_json, std::string("field ") + key + " must be a number");
  }
  return it->get<double>();
}

}  // namespace

DatasetManifest manifest_from_json(const std::string& text) {
  ordered_json doc;
  try {
    doc = ordered_json::parse(text);
  } catch (const nlohmann::json::parse_error& err) {
    fail(ErrorCode::malformed_json, err.what());
  }
  if (!doc.is_object() || !doc.contains("entries") || !doc["entries"].is_array()) {
    fail(ErrorCode::malformed_json, "manifest must be an object with an \"entries\" array");
  }

  DatasetManifest manifest;
  for (const ordered_json& item : doc["entries"]) {
    if (!item.is_object()) {
      fail(ErrorCode::malformed_json, "manifest entry must be an object");
    }
    ManifestEntry e;
    auto id = opt_string(item, "id");
    auto image_path = opt_string(item, "image_path");
    if (!id || !image_path) {
      fail(ErrorCode::malformed_json, "entry requires id and image_path");
    }
    e.id = *id;
    e.image_path = *image_path;
    e.mask_path = opt_string(item, "mask_path");
    e.feature_path = opt_string(item, "feature_path");
    e.score = opt_number(item, "score");
    e.dice = opt_number(item, "dice");
    if (auto verdict = opt_string(item, "verdict")) {
      if (*verdict == "selected") {
        e.verdict = Verdict::selected;
      } else if (*verdict == "rejected") {
        e.verdict = Verdict::rejected;
      } else {
        fail(ErrorCode::malformed_json, "verdict must be \"selected\" or \"rejected\"");
      }
    }
    e.reason = opt_string(item, "reason");
    e.margin = opt_number(item, "margin");
    manifest.entries.push_back(std::move(e));
  }
  validate_manifest(manifest);
  return manifest;
}

std::string manifest_to_json(const DatasetManifest& manifest) {
  validate_manifest(manifest);
  ordered_json entries = ordered_json::array();
  for (const ManifestEntry& e : manifest.entries) {
    ordered_json item;
    item["id"] = e.id;
    item["image_path"] = e.image_path;
    if (e.mask_path) item["mask_path"] = *e.mask_path;
    if (e.feature_path) item["feature_path"] = *e.feature_path;
    if (e.score) item["score"] = *e.score;
    if (e.dice) item["dice"] = *e.dice;
    if (e.verdict) item["verdict"] = verdict_name(*e.verdict);
    if (e.reason) item["reason"] = *e.reason;
    if (e.margin) item["margin"] = *e.margin;
    entries.push_back(std::move(item));
  }
  ordered_json doc;
  doc["entries"] = std::move(entries);
  return doc.dump(2) + "\n";
}

DatasetManifest load_manifest(const fs::path& path) {
  return manifest_from_json(read_binary_file(path));
}

void save_manifest(const DatasetManifest& manifest, const fs::path& path) {
  write_file_atomic(path, manifest_to_json(manifest));
}

fs::path resolve_manifest_path(const fs::path& manifest_dir, const std::string& stored) {
  fs::path p(stored);
  if (p.is_absolute()) return p;
  return manifest_dir / p;
}

}  // namespace driftcurate::io
