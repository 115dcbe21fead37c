#pragma once

#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "ipfaudit/packet.hpp"

namespace ipfaudit {

// Minimal delimited-text table. Handles double-quoted cells, skips blank
// lines and lines starting with '#'.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  // Index of a header column; throws SchemaError if absent.
  std::size_t column(std::string_view name) const;
};

CsvTable parse_csv_table(std::string_view text, char delimiter = ',');

// Maps source column name -> catalogue feature name.
using SchemaMap = std::map<std::string, std::string>;

// Reads pre-extracted packet tables. Only mapped features are populated;
// frame_index defaults to the data row index. Throws SchemaError for a
// mapped column missing from the header or a mapping onto a non-catalogue
// target (labels included), and RowError for an undecodable cell.
// Cells that are empty or "-1" are absent.
std::vector<PacketRecord> ingest_csv(std::string_view table,
                                     const SchemaMap& schema_map,
                                     char delimiter = ',');
std::vector<PacketRecord> ingest_csv(const CsvTable& table,
                                     const SchemaMap& schema_map);

// Mapping of every header column whose name is a catalogue feature.
SchemaMap identity_schema(const CsvTable& table);

}  // namespace ipfaudit
