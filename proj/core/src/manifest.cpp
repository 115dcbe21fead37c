#include "ipfaudit/manifest.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "ipfaudit/errors.hpp"

namespace ipfaudit {
namespace {

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

template <typename T>
T get_field(const nlohmann::json& j, const char* key, const std::string& where) {
  if (!j.contains(key)) throw SchemaError(where + ": missing field '" + key + "'");
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception&) {
    throw SchemaError(where + ": field '" + key + "' has the wrong type");
  }
}

std::vector<Label> parse_label_cells(const CsvTable& table, std::size_t col,
                                     const std::set<std::string>& malicious) {
  std::vector<Label> labels;
  labels.reserve(table.rows.size());
  for (std::size_t row = 0; row < table.rows.size(); ++row) {
    const std::string& cell = table.rows[row][col];
    if (!malicious.empty()) {
      labels.push_back(malicious.contains(cell) ? Label::malicious : Label::benign);
      continue;
    }
    auto l = parse_label(cell);
    if (!l) throw RowError(row, "unrecognised label '" + cell + "'");
    labels.push_back(*l);
  }
  return labels;
}

}  // namespace

LabelRule label_rule_from_json(const nlohmann::json& j,
                               const std::filesystem::path& base_dir,
                               const CsvTable* table, std::size_t expected_rows) {
  const std::string where = "label_rule";
  if (!j.is_object()) throw SchemaError(where + ": expected an object");
  const auto type = get_field<std::string>(j, "type", where);
  if (type == "by_source_address") {
    label_rule::BySourceAddress rule;
    for (const auto& a : get_field<std::vector<std::string>>(j, "addresses", where)) {
      auto ip = parse_ipv4(a);
      if (!ip) throw SchemaError(where + ": bad IPv4 address '" + a + "'");
      rule.addresses.insert(*ip);
    }
    return rule;
  }
  if (type == "by_time_boundary")
    return label_rule::ByTimeBoundary{get_field<double>(j, "cutoff", where)};
  if (type == "by_column") {
    std::set<std::string> malicious;
    if (j.contains("malicious_values"))
      for (const auto& v : get_field<std::vector<std::string>>(j, "malicious_values", where))
        malicious.insert(v);
    label_rule::ByColumn rule;
    if (j.contains("labels")) {
      for (const auto& s : get_field<std::vector<std::string>>(j, "labels", where)) {
        auto l = parse_label(s);
        if (!l) throw SchemaError(where + ": unrecognised label '" + s + "'");
        rule.labels.push_back(*l);
      }
    } else if (j.contains("labels_path")) {
      const auto path = base_dir / get_field<std::string>(j, "labels_path", where);
      CsvTable labels = parse_csv_table(read_text(path));
      rule.labels = parse_label_cells(labels, labels.column("label"), malicious);
    } else if (j.contains("column")) {
      if (!table) throw SchemaError(where + ": 'column' form needs a csv input");
      rule.labels = parse_label_cells(
          *table, table->column(get_field<std::string>(j, "column", where)), malicious);
    } else {
      throw SchemaError(where + ": by_column needs 'labels', 'labels_path' or 'column'");
    }
    if (rule.labels.size() != expected_rows)
      throw PreconditionError(where + ": " + std::to_string(rule.labels.size()) +
                              " labels for " + std::to_string(expected_rows) + " records");
    return rule;
  }
  throw SchemaError(where + ": unknown type '" + type + "'");
}

nlohmann::json to_json(const LabelRule& rule) {
  return std::visit(
      [](const auto& r) -> nlohmann::json {
        using R = std::decay_t<decltype(r)>;
        if constexpr (std::is_same_v<R, label_rule::BySourceAddress>) {
          std::vector<std::string> addrs;
          for (auto a : r.addresses) addrs.push_back(format_ipv4(a));
          return {{"type", "by_source_address"}, {"addresses", addrs}};
        } else if constexpr (std::is_same_v<R, label_rule::ByTimeBoundary>) {
          return {{"type", "by_time_boundary"}, {"cutoff", r.cutoff}};
        } else {
          std::vector<std::string> labels;
          for (auto l : r.labels) labels.emplace_back(to_string(l));
          return {{"type", "by_column"}, {"labels", labels}};
        }
      },
      rule);
}

std::string labels_csv(std::span<const Label> labels) {
  std::string out = "frame_index,label\n";
  for (std::size_t i = 0; i < labels.size(); ++i) {
    out += std::to_string(i);
    out += ',';
    out += to_string(labels[i]);
    out += '\n';
  }
  return out;
}

DatasetManifest parse_manifest(const nlohmann::json& j,
                               const std::filesystem::path& base_dir) {
  if (!j.is_object()) throw SchemaError("manifest: expected a JSON object");
  DatasetManifest m;
  m.base_dir = base_dir;
  m.format_version = j.value("format_version", kManifestFormatVersion);
  if (m.format_version != kManifestFormatVersion)
    throw SchemaError("manifest: unsupported format_version " +
                      std::to_string(m.format_version));
  m.description = j.value("description", std::string{});
  if (!j.contains("entries") || !j.at("entries").is_array())
    throw SchemaError("manifest: missing 'entries' array");
  std::size_t idx = 0;
  for (const auto& e : j.at("entries")) {
    const std::string where = "manifest entry " + std::to_string(idx);
    if (!e.is_object()) throw SchemaError(where + ": expected an object");
    ManifestEntry entry;
    entry.path = get_field<std::string>(e, "path", where);
    std::string fmt;
    if (e.contains("format")) {
      fmt = get_field<std::string>(e, "format", where);
    } else {
      fmt = std::filesystem::path(entry.path).extension() == ".csv" ? "csv" : "pcap";
    }
    if (fmt == "pcap") {
      entry.format = InputFormat::pcap;
    } else if (fmt == "csv") {
      entry.format = InputFormat::csv;
    } else {
      throw SchemaError(where + ": unknown format '" + fmt + "'");
    }
    const auto session = e.contains("session") ? get_field<long long>(e, "session", where)
                                               : static_cast<long long>(idx);
    if (session < 0 || session > 0xFFFFFFFFLL)
      throw SchemaError(where + ": session must be a non-negative integer");
    entry.session = SessionId{static_cast<std::uint32_t>(session)};
    if (!e.contains("label_rule")) throw SchemaError(where + ": missing field 'label_rule'");
    entry.label_rule = e.at("label_rule");
    {
      const std::string rw = where + ".label_rule";
      if (!entry.label_rule.is_object()) throw SchemaError(rw + ": expected an object");
      const auto type = get_field<std::string>(entry.label_rule, "type", rw);
      if (type != "by_source_address" && type != "by_time_boundary" && type != "by_column")
        throw SchemaError(rw + ": unknown type '" + type + "'");
    }
    if (e.contains("schema_map"))
      entry.schema_map = get_field<std::map<std::string, std::string>>(e, "schema_map", where);
    if (e.contains("delimiter")) {
      auto d = get_field<std::string>(e, "delimiter", where);
      if (d.size() != 1) throw SchemaError(where + ": delimiter must be one character");
      entry.delimiter = d[0];
    }
    if (e.contains("session_column"))
      entry.session_column = get_field<std::string>(e, "session_column", where);
    m.entries.push_back(std::move(entry));
    ++idx;
  }
  return m;
}

DatasetManifest load_manifest(const std::filesystem::path& path) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(read_text(path));
  } catch (const nlohmann::json::parse_error& e) {
    throw FormatError("manifest '" + path.string() + "': " + e.what());
  }
  return parse_manifest(j, path.parent_path());
}

nlohmann::json to_json(const DatasetManifest& m) {
  nlohmann::json entries = nlohmann::json::array();
  for (const auto& e : m.entries) {
    nlohmann::json j{{"path", e.path},
                     {"format", e.format == InputFormat::pcap ? "pcap" : "csv"},
                     {"session", e.session.value},
                     {"label_rule", e.label_rule}};
    if (e.schema_map) j["schema_map"] = *e.schema_map;
    if (e.format == InputFormat::csv) j["delimiter"] = std::string(1, e.delimiter);
    if (e.session_column) j["session_column"] = *e.session_column;
    entries.push_back(std::move(j));
  }
  return {{"format_version", m.format_version},
          {"description", m.description},
          {"entries", entries}};
}

LoadedDataset build_dataset(const DatasetManifest& manifest) {
  if (manifest.entries.empty()) throw SchemaError("manifest: no entries");
  std::vector<LabeledDataset> parts;
  std::vector<std::string> warnings;
  for (const auto& e : manifest.entries) {
    const auto path = manifest.base_dir / e.path;
    std::vector<PacketRecord> records;
    std::vector<SessionId> sessions;
    std::optional<CsvTable> table;
    if (e.format == InputFormat::pcap) {
      auto parsed = parse_capture(read_file_bytes(path.string()));
      for (const auto& w : parsed.warnings)
        warnings.push_back(e.path + ": frame " + std::to_string(w.frame_index) +
                           ": " + w.message);
      records = std::move(parsed.records);
      sessions.assign(records.size(), e.session);
    } else {
      table = parse_csv_table(read_text(path), e.delimiter);
      records = ingest_csv(*table, e.schema_map ? *e.schema_map : identity_schema(*table));
      if (e.session_column) {
        const std::size_t col = table->column(*e.session_column);
        for (std::size_t row = 0; row < table->rows.size(); ++row) {
          const std::string& cell = table->rows[row][col];
          std::uint32_t v = 0;
          auto [end, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
          if (ec != std::errc{} || end != cell.data() + cell.size())
            throw RowError(row, "bad session id '" + cell + "'");
          sessions.push_back(SessionId{v});
        }
      } else {
        sessions.assign(records.size(), e.session);
      }
    }
    LabelRule rule = label_rule_from_json(e.label_rule, manifest.base_dir,
                                          table ? &*table : nullptr, records.size());
    auto labels = assign_labels(records, rule);
    parts.emplace_back(std::move(records), std::move(labels), std::move(sessions));
  }
  // Entries may deliberately share a session id, so concatenate directly
  // rather than through merge_sessions' renumbering.
  std::vector<PacketRecord> records;
  std::vector<Label> labels;
  std::vector<SessionId> sessions;
  for (const auto& p : parts) {
    records.insert(records.end(), p.records().begin(), p.records().end());
    labels.insert(labels.end(), p.labels().begin(), p.labels().end());
    sessions.insert(sessions.end(), p.sessions().begin(), p.sessions().end());
  }
  LabeledDataset all(std::move(records), std::move(labels), std::move(sessions));
  return {all.with_flows(), std::move(warnings)};
}

}  // namespace ipfaudit
