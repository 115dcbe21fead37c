#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace ipfaudit {

enum class Protocol : std::uint8_t { tcp, udp, icmp, arp, other };

std::string_view to_string(Protocol p) noexcept;
std::optional<Protocol> parse_protocol(std::string_view text) noexcept;

namespace tcp_flag {
inline constexpr std::uint8_t kFin = 0x01;
inline constexpr std::uint8_t kSyn = 0x02;
inline constexpr std::uint8_t kRst = 0x04;
inline constexpr std::uint8_t kPsh = 0x08;
inline constexpr std::uint8_t kAck = 0x10;
inline constexpr std::uint8_t kUrg = 0x20;
}  // namespace tcp_flag

// One packet's individual-packet features. Every feature is optional:
// pcap parsing leaves fields absent when a layer is missing or truncated,
// and CSV ingestion leaves unmapped fields absent.
struct PacketRecord {
  std::uint64_t frame_index = 0;
  std::optional<double> timestamp;  // seconds since the capture epoch
  std::optional<std::uint32_t> frame_len;
  std::optional<std::uint32_t> payload_len;
  std::optional<std::uint64_t> link_src;  // 48-bit hardware address
  std::optional<std::uint64_t> link_dst;
  std::optional<std::uint32_t> net_src;  // IPv4, host byte order
  std::optional<std::uint32_t> net_dst;
  std::optional<Protocol> protocol;
  std::optional<std::uint8_t> ttl;
  std::optional<std::uint16_t> ip_id;
  std::optional<std::uint16_t> src_port;
  std::optional<std::uint16_t> dst_port;
  std::optional<std::uint8_t> tcp_flags;
  std::optional<std::uint32_t> seq_num;
  std::optional<std::uint32_t> ack_num;
  std::optional<std::uint16_t> window;
  std::optional<std::uint16_t> checksum;

  bool operator==(const PacketRecord&) const = default;
};

enum class ValueKind : std::uint8_t { numeric, categorical };
enum class IdentifierClass : std::uint8_t {
  host_identifier,
  session_identifier,
  content,
  temporal
};
enum class FeatureSource : std::uint8_t {
  link_layer,
  network_layer,
  transport_layer,
  frame_meta
};

std::string_view to_string(ValueKind k) noexcept;
std::string_view to_string(IdentifierClass c) noexcept;
std::string_view to_string(FeatureSource s) noexcept;

enum class FeatureId : std::uint8_t {
  frame_index,
  timestamp,
  frame_len,
  payload_len,
  link_src,
  link_dst,
  net_src,
  net_dst,
  protocol,
  ttl,
  ip_id,
  src_port,
  dst_port,
  tcp_flags,
  seq_num,
  ack_num,
  window,
  checksum,
};

inline constexpr std::size_t kFeatureCount = 18;

struct FeatureDescriptor {
  FeatureId id;
  std::string_view name;
  ValueKind value_kind;
  IdentifierClass identifier_class;
  FeatureSource source;
};

// The fixed feature catalogue in canonical column order.
std::span<const FeatureDescriptor> catalogue() noexcept;

// Throws SchemaError for unknown names.
const FeatureDescriptor& feature(std::string_view name);
const FeatureDescriptor& feature(FeatureId id) noexcept;
std::optional<FeatureId> find_feature(std::string_view name) noexcept;
std::vector<std::string> catalogue_names();

// Raw numeric value of a feature in a record, before categorical coding.
std::optional<double> raw_value(const PacketRecord& r, FeatureId id) noexcept;

// Absent cells in a FeatureMatrix. Every catalogue feature is unsigned
// (or a non-negative code/timestamp), so -1 never collides.
inline constexpr double kAbsent = -1.0;

// Dense row-major numeric matrix with named columns.
class FeatureMatrix {
 public:
  FeatureMatrix() = default;
  FeatureMatrix(std::vector<std::string> columns, std::size_t rows);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return columns_.size(); }
  const std::vector<std::string>& columns() const noexcept { return columns_; }

  double at(std::size_t r, std::size_t c) const { return values_[r * cols() + c]; }
  double& at(std::size_t r, std::size_t c) { return values_[r * cols() + c]; }
  std::span<const double> row(std::size_t r) const {
    return {values_.data() + r * cols(), cols()};
  }
  std::vector<double> column(std::size_t c) const;

  FeatureMatrix select_rows(std::span<const std::size_t> indices) const;

  bool operator==(const FeatureMatrix&) const = default;

 private:
  std::vector<std::string> columns_;
  std::size_t rows_ = 0;
  std::vector<double> values_;
};

// Projects records onto the named features in the given order.
// Categorical features are integer-coded by first appearance.
// Throws SchemaError for unknown names.
FeatureMatrix project(std::span<const PacketRecord> records,
                      std::span<const std::string> features);

// Address helpers.
std::string format_ipv4(std::uint32_t addr);
std::optional<std::uint32_t> parse_ipv4(std::string_view text) noexcept;
std::string format_mac(std::uint64_t mac);
std::optional<std::uint64_t> parse_mac(std::string_view text) noexcept;

// Canonical CSV: one column per catalogue feature in catalogue order,
// -1 for absent cells. Addresses are written in their textual form.
std::string to_canonical_csv(std::span<const PacketRecord> records);

// Shortest decimal form that round-trips.
std::string format_double(double v);

}  // namespace ipfaudit
