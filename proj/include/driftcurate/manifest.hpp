#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace driftcurate::io {

enum class Verdict { selected, rejected };

const char* verdict_name(Verdict v);

struct ManifestEntry {
  std::string id;
  std::string image_path;
  std::optional<std::string> mask_path;
  std::optional<std::string> feature_path;
  std::optional<double> score;
  std::optional<double> dice;
  std::optional<Verdict> verdict;
  // set when a gate rejects an entry without scoring it
  std::optional<std::string> reason;
  // set by the feature gate
  std::optional<double> margin;
};

struct DatasetManifest {
  std::vector<ManifestEntry> entries;
};

void validate_manifest(const DatasetManifest& manifest);

DatasetManifest manifest_from_json(const std::string& text);
std::string manifest_to_json(const DatasetManifest& manifest);

DatasetManifest load_manifest(const std::filesystem::path& path);
void save_manifest(const DatasetManifest& manifest, const std::filesystem::path& path);

// Paths stored inside a manifest resolve against the manifest's directory.
std::filesystem::path resolve_manifest_path(const std::filesystem::path& manifest_dir,
                                            const std::string& stored);

}  // namespace driftcurate::io
