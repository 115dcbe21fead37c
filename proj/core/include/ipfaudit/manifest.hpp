#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "ipfaudit/csv_ingest.hpp"
#include "ipfaudit/dataset.hpp"
#include "ipfaudit/pcap.hpp"

namespace ipfaudit {

inline constexpr int kManifestFormatVersion = 1;

enum class InputFormat { pcap, csv };

// One capture or table in a dataset manifest.
//
// JSON fields (bit-exact names):
//   "path"           string, relative to the manifest's directory
//   "format"         "pcap" | "csv" (default: from the file extension)
//   "session"        non-negative integer (default: entry position)
//   "label_rule"     object, see label_rule_from_json
//   "schema_map"     object, csv only: source column -> feature name
//                    (default: columns already named like catalogue features)
//   "delimiter"      one-character string, csv only (default ",")
//   "session_column" string, csv only: per-row session override
struct ManifestEntry {
  std::string path;
  InputFormat format = InputFormat::pcap;
  SessionId session;
  nlohmann::json label_rule;
  std::optional<SchemaMap> schema_map;
  char delimiter = ',';
  std::optional<std::string> session_column;
};

// Top level: {"format_version": 1, "description": "...", "entries": [...]}
struct DatasetManifest {
  int format_version = kManifestFormatVersion;
  std::string description;
  std::vector<ManifestEntry> entries;
  std::filesystem::path base_dir;
};

// Throws SchemaError on missing or ill-typed fields.
DatasetManifest parse_manifest(const nlohmann::json& j,
                               const std::filesystem::path& base_dir);
// Throws FormatError if the file cannot be read or is not JSON.
DatasetManifest load_manifest(const std::filesystem::path& path);
nlohmann::json to_json(const DatasetManifest& m);

struct LoadedDataset {
  LabeledDataset dataset;
  std::vector<std::string> warnings;
};

// Reads every entry, applies its label rule and session, concatenates in
// entry order and computes flow keys.
LoadedDataset build_dataset(const DatasetManifest& manifest);

// Label rule JSON:
//   {"type": "by_source_address", "addresses": ["10.0.0.66", ...]}
//   {"type": "by_time_boundary", "cutoff": 12.5}
//   {"type": "by_column", "labels": ["benign", "malicious", ...]}
//   {"type": "by_column", "labels_path": "s0.labels.csv"}   (column "label")
//   {"type": "by_column", "column": "label"}                (csv inputs)
// `table` supplies the row source for the "column" form.
LabelRule label_rule_from_json(const nlohmann::json& j,
                               const std::filesystem::path& base_dir,
                               const CsvTable* table, std::size_t expected_rows);
nlohmann::json to_json(const LabelRule& rule);

// Labels CSV: "frame_index,label" header, one row per record.
std::string labels_csv(std::span<const Label> labels);

}  // namespace ipfaudit
