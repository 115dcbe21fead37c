#include "ipfaudit/csv_ingest.hpp"

#include <charconv>
#include <cmath>
#include <limits>

#include "ipfaudit/errors.hpp"

namespace ipfaudit {
namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r'))
    s.remove_suffix(1);
  return s;
}

std::vector<std::string> split_line(std::string_view line, char delim) {
  std::vector<std::string> cells;
  std::string cell;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          cell += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        cell += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == delim) {
      cells.emplace_back(trim(cell));
      cell.clear();
    } else {
      cell += c;
    }
  }
  cells.emplace_back(trim(cell));
  return cells;
}

std::optional<double> parse_number(std::string_view s) {
  double v = 0;
  auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || end != s.data() + s.size() || !std::isfinite(v))
    return std::nullopt;
  return v;
}

template <typename T>
T checked_unsigned(std::size_t row, std::string_view col, std::string_view cell) {
  auto v = parse_number(cell);
  if (!v || *v < 0 || *v > static_cast<double>(std::numeric_limits<T>::max()) ||
      std::floor(*v) != *v)
    throw RowError(row, "column '" + std::string(col) + "': '" + std::string(cell) +
                            "' is not a valid unsigned value");
  return static_cast<T>(*v);
}

void assign(PacketRecord& r, FeatureId id, std::size_t row, std::string_view col,
            std::string_view cell) {
  switch (id) {
    case FeatureId::frame_index:
      r.frame_index = checked_unsigned<std::uint64_t>(row, col, cell);
      return;
    case FeatureId::timestamp: {
      auto v = parse_number(cell);
      if (!v || *v < 0)
        throw RowError(row, "column '" + std::string(col) + "': bad timestamp '" +
                                std::string(cell) + "'");
      r.timestamp = *v;
      return;
    }
    case FeatureId::frame_len:
      r.frame_len = checked_unsigned<std::uint32_t>(row, col, cell);
      return;
    case FeatureId::payload_len:
      r.payload_len = checked_unsigned<std::uint32_t>(row, col, cell);
      return;
    case FeatureId::link_src:
    case FeatureId::link_dst: {
      auto mac = parse_mac(cell);
      std::uint64_t v = mac ? *mac : 0;
      if (!mac) {
        v = checked_unsigned<std::uint64_t>(row, col, cell);
        if (v >> 48) throw RowError(row, "column '" + std::string(col) + "': not a 48-bit address");
      }
      (id == FeatureId::link_src ? r.link_src : r.link_dst) = v;
      return;
    }
    case FeatureId::net_src:
    case FeatureId::net_dst: {
      auto ip = parse_ipv4(cell);
      std::uint32_t v = ip ? *ip : checked_unsigned<std::uint32_t>(row, col, cell);
      (id == FeatureId::net_src ? r.net_src : r.net_dst) = v;
      return;
    }
    case FeatureId::protocol: {
      auto p = parse_protocol(cell);
      if (!p) {
        // Any other IP protocol number is tracked as "other".
        if (parse_number(cell)) {
          p = Protocol::other;
        } else {
          throw RowError(row, "column '" + std::string(col) + "': unknown protocol '" +
                                  std::string(cell) + "'");
        }
      }
      r.protocol = *p;
      return;
    }
    case FeatureId::ttl:
      r.ttl = checked_unsigned<std::uint8_t>(row, col, cell);
      return;
    case FeatureId::ip_id:
      r.ip_id = checked_unsigned<std::uint16_t>(row, col, cell);
      return;
    case FeatureId::src_port:
      r.src_port = checked_unsigned<std::uint16_t>(row, col, cell);
      return;
    case FeatureId::dst_port:
      r.dst_port = checked_unsigned<std::uint16_t>(row, col, cell);
      return;
    case FeatureId::tcp_flags:
      r.tcp_flags = checked_unsigned<std::uint8_t>(row, col, cell);
      return;
    case FeatureId::seq_num:
      r.seq_num = checked_unsigned<std::uint32_t>(row, col, cell);
      return;
    case FeatureId::ack_num:
      r.ack_num = checked_unsigned<std::uint32_t>(row, col, cell);
      return;
    case FeatureId::window:
      r.window = checked_unsigned<std::uint16_t>(row, col, cell);
      return;
    case FeatureId::checksum:
      r.checksum = checked_unsigned<std::uint16_t>(row, col, cell);
      return;
  }
}

}  // namespace

std::size_t CsvTable::column(std::string_view name) const {
  for (std::size_t i = 0; i < header.size(); ++i)
    if (header[i] == name) return i;
  throw SchemaError("column '" + std::string(name) + "' not found in header");
}

CsvTable parse_csv_table(std::string_view text, char delimiter) {
  CsvTable table;
  bool have_header = false;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t nl = text.find('\n', pos);
    if (nl == std::string_view::npos) nl = text.size();
    std::string_view line = trim(text.substr(pos, nl - pos));
    pos = nl + 1;
    if (line.empty() || line.front() == '#') continue;
    auto cells = split_line(line, delimiter);
    if (!have_header) {
      table.header = std::move(cells);
      have_header = true;
    } else {
      if (cells.size() != table.header.size())
        throw RowError(table.rows.size(),
                       "expected " + std::to_string(table.header.size()) +
                           " cells, found " + std::to_string(cells.size()));
      table.rows.push_back(std::move(cells));
    }
  }
  if (!have_header) throw SchemaError("table has no header row");
  return table;
}

SchemaMap identity_schema(const CsvTable& table) {
  SchemaMap map;
  for (const auto& col : table.header)
    if (find_feature(col)) map.emplace(col, col);
  return map;
}

std::vector<PacketRecord> ingest_csv(const CsvTable& table,
                                     const SchemaMap& schema_map) {
  struct Binding {
    std::size_t column;
    FeatureId id;
    std::string name;
  };
  std::vector<Binding> bindings;
  for (const auto& [source, target] : schema_map) {
    auto id = find_feature(target);
    if (!id)
      throw SchemaError("mapping '" + source + "' -> '" + target +
                        "': target is not a catalogue feature (labels are "
                        "attached by the dataset layer, not here)");
    bindings.push_back({table.column(source), *id, source});
  }

  std::vector<PacketRecord> records(table.rows.size());
  for (std::size_t row = 0; row < table.rows.size(); ++row) {
    PacketRecord& r = records[row];
    r.frame_index = row;
    for (const auto& b : bindings) {
      std::string_view cell = table.rows[row][b.column];
      if (cell.empty() || cell == "-1") continue;
      assign(r, b.id, row, b.name, cell);
    }
  }
  return records;
}

std::vector<PacketRecord> ingest_csv(std::string_view table,
                                     const SchemaMap& schema_map, char delimiter) {
  return ingest_csv(parse_csv_table(table, delimiter), schema_map);
}

}  // namespace ipfaudit
