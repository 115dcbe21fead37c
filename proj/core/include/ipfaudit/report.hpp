#pragma once

#include <filesystem>
#include <string>

#include <nlohmann/json.hpp>

namespace ipfaudit {

inline constexpr int kRunConfigFormatVersion = 1;

std::string_view version() noexcept;

// Everything needed to reproduce an output file: the subcommand and its
// resolved parameters (inputs, k, repeats, seed, thresholds, features,
// output directory). Embedded in every emitted file.
struct RunConfig {
  std::string command;
  nlohmann::json parameters = nlohmann::json::object();
};

// {"tool": "ipfaudit", "version": ..., "format_version": 1,
//  "command": ..., "parameters": {...}}
nlohmann::json to_json(const RunConfig& c);

// "# ipfaudit <version> <compact config json>\n"; CSV readers in this
// project skip lines starting with '#'.
std::string csv_comment_header(const RunConfig& c);

// {"run_config": ..., <body fields>}; body must be an object.
nlohmann::json with_run_config(const RunConfig& c, nlohmann::json body);

// Pretty-printed with a trailing newline.
std::string dump_json(const nlohmann::json& j);

// Creates parent directories. Throws Error when the file cannot be written.
void write_text_file(const std::filesystem::path& path, const std::string& content);

}  // namespace ipfaudit
