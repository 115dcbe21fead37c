#include "ipfaudit/report.hpp"

#include <fstream>

#include "ipfaudit/errors.hpp"

namespace ipfaudit {

std::string_view version() noexcept { return IPFAUDIT_VERSION; }

nlohmann::json to_json(const RunConfig& c) {
  return {{"tool", "ipfaudit"},
          {"version", version()},
          {"format_version", kRunConfigFormatVersion},
          {"command", c.command},
          {"parameters", c.parameters}};
}

std::string csv_comment_header(const RunConfig& c) {
  return "# ipfaudit " + std::string(version()) + " " + to_json(c).dump() + "\n";
}

nlohmann::json with_run_config(const RunConfig& c, nlohmann::json body) {
  if (!body.is_object()) throw Error("report body must be a JSON object");
  nlohmann::json out{{"run_config", to_json(c)}};
  for (auto& [key, value] : body.items()) out[key] = std::move(value);
  return out;
}

std::string dump_json(const nlohmann::json& j) { return j.dump(2) + "\n"; }

void write_text_file(const std::filesystem::path& path, const std::string& content) {
  std::error_code ec;
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path(), ec);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write '" + path.string() + "'");
  out << content;
  if (!out) throw Error("failed writing '" + path.string() + "'");
}

}  // namespace ipfaudit
