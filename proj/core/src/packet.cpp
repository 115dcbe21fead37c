#include "ipfaudit/packet.hpp"

#include <array>
#include <charconv>
#include <cstdio>
#include <unordered_map>

#include "ipfaudit/errors.hpp"

namespace ipfaudit {
namespace {

using enum FeatureId;
using enum ValueKind;
using enum IdentifierClass;
using enum FeatureSource;

constexpr std::array<FeatureDescriptor, kFeatureCount> kCatalogue{{
    {frame_index, "frame_index", numeric, session_identifier, frame_meta},
    {timestamp, "timestamp", numeric, temporal, frame_meta},
    {frame_len, "frame_len", numeric, content, frame_meta},
    {payload_len, "payload_len", numeric, content, transport_layer},
    {link_src, "link_src", categorical, host_identifier, link_layer},
    {link_dst, "link_dst", categorical, host_identifier, link_layer},
    {net_src, "net_src", categorical, host_identifier, network_layer},
    {net_dst, "net_dst", categorical, host_identifier, network_layer},
    {protocol, "protocol", categorical, content, network_layer},
    {ttl, "ttl", numeric, content, network_layer},
    {ip_id, "ip_id", numeric, session_identifier, network_layer},
    {src_port, "src_port", numeric, session_identifier, transport_layer},
    {dst_port, "dst_port", numeric, session_identifier, transport_layer},
    {tcp_flags, "tcp_flags", numeric, content, transport_layer},
    {seq_num, "seq_num", numeric, session_identifier, transport_layer},
    {ack_num, "ack_num", numeric, session_identifier, transport_layer},
    {window, "window", numeric, content, transport_layer},
    // The transport checksum covers the address pseudo-header.
    {checksum, "checksum", numeric, host_identifier, transport_layer},
}};

template <typename T>
std::optional<double> widen(const std::optional<T>& v) {
  if (!v) return std::nullopt;
  return static_cast<double>(*v);
}

}  // namespace

std::string_view to_string(Protocol p) noexcept {
  switch (p) {
    case Protocol::tcp: return "tcp";
    case Protocol::udp: return "udp";
    case Protocol::icmp: return "icmp";
    case Protocol::arp: return "arp";
    case Protocol::other: return "other";
  }
  return "other";
}

std::optional<Protocol> parse_protocol(std::string_view text) noexcept {
  if (text == "tcp" || text == "TCP" || text == "6") return Protocol::tcp;
  if (text == "udp" || text == "UDP" || text == "17") return Protocol::udp;
  if (text == "icmp" || text == "ICMP" || text == "1") return Protocol::icmp;
  if (text == "arp" || text == "ARP") return Protocol::arp;
  if (text == "other") return Protocol::other;
  return std::nullopt;
}

std::string_view to_string(ValueKind k) noexcept {
  return k == ValueKind::numeric ? "numeric" : "categorical";
}

std::string_view to_string(IdentifierClass c) noexcept {
  switch (c) {
    case IdentifierClass::host_identifier: return "host_identifier";
    case IdentifierClass::session_identifier: return "session_identifier";
    case IdentifierClass::content: return "content";
    case IdentifierClass::temporal: return "temporal";
  }
  return "content";
}

std::string_view to_string(FeatureSource s) noexcept {
  switch (s) {
    case FeatureSource::link_layer: return "link_layer";
    case FeatureSource::network_layer: return "network_layer";
    case FeatureSource::transport_layer: return "transport_layer";
    case FeatureSource::frame_meta: return "frame_meta";
  }
  return "frame_meta";
}

std::span<const FeatureDescriptor> catalogue() noexcept { return kCatalogue; }

std::optional<FeatureId> find_feature(std::string_view name) noexcept {
  for (const auto& d : kCatalogue) {
    if (d.name == name) return d.id;
  }
  return std::nullopt;
}

const FeatureDescriptor& feature(std::string_view name) {
  auto id = find_feature(name);
  if (!id) throw SchemaError("unknown feature '" + std::string(name) + "'");
  return feature(*id);
}

const FeatureDescriptor& feature(FeatureId id) noexcept {
  return kCatalogue[static_cast<std::size_t>(id)];
}

std::vector<std::string> catalogue_names() {
  std::vector<std::string> names;
  names.reserve(kCatalogue.size());
  for (const auto& d : kCatalogue) names.emplace_back(d.name);
  return names;
}

std::optional<double> raw_value(const PacketRecord& r, FeatureId id) noexcept {
  switch (id) {
    case FeatureId::frame_index: return static_cast<double>(r.frame_index);
    case FeatureId::timestamp: return r.timestamp;
    case FeatureId::frame_len: return widen(r.frame_len);
    case FeatureId::payload_len: return widen(r.payload_len);
    case FeatureId::link_src: return widen(r.link_src);
    case FeatureId::link_dst: return widen(r.link_dst);
    case FeatureId::net_src: return widen(r.net_src);
    case FeatureId::net_dst: return widen(r.net_dst);
    case FeatureId::protocol:
      if (!r.protocol) return std::nullopt;
      return static_cast<double>(static_cast<int>(*r.protocol));
    case FeatureId::ttl: return widen(r.ttl);
    case FeatureId::ip_id: return widen(r.ip_id);
    case FeatureId::src_port: return widen(r.src_port);
    case FeatureId::dst_port: return widen(r.dst_port);
    case FeatureId::tcp_flags: return widen(r.tcp_flags);
    case FeatureId::seq_num: return widen(r.seq_num);
    case FeatureId::ack_num: return widen(r.ack_num);
    case FeatureId::window: return widen(r.window);
    case FeatureId::checksum: return widen(r.checksum);
  }
  return std::nullopt;
}

FeatureMatrix::FeatureMatrix(std::vector<std::string> columns, std::size_t rows)
    : columns_(std::move(columns)),
      rows_(rows),
      values_(rows_ * columns_.size(), 0.0) {}

std::vector<double> FeatureMatrix::column(std::size_t c) const {
  std::vector<double> out(rows_);
  for (std::size_t r = 0; r < rows_; ++r) out[r] = at(r, c);
  return out;
}

FeatureMatrix FeatureMatrix::select_rows(
    std::span<const std::size_t> indices) const {
  FeatureMatrix out(columns_, indices.size());
  const std::size_t m = cols();
  for (std::size_t i = 0; i < indices.size(); ++i) {
    const double* src = values_.data() + indices[i] * m;
    std::copy(src, src + m, out.values_.data() + i * m);
  }
  return out;
}

FeatureMatrix project(std::span<const PacketRecord> records,
                      std::span<const std::string> features) {
  std::vector<const FeatureDescriptor*> descs;
  descs.reserve(features.size());
  for (const auto& name : features) descs.push_back(&feature(name));

  FeatureMatrix out(std::vector<std::string>(features.begin(), features.end()),
                    records.size());
  for (std::size_t c = 0; c < descs.size(); ++c) {
    const FeatureDescriptor& d = *descs[c];
    std::unordered_map<double, double> codes;
    for (std::size_t r = 0; r < records.size(); ++r) {
      auto v = raw_value(records[r], d.id);
      if (!v) {
        out.at(r, c) = kAbsent;
      } else if (d.value_kind == ValueKind::categorical) {
        auto [it, inserted] =
            codes.try_emplace(*v, static_cast<double>(codes.size()));
        out.at(r, c) = it->second;
      } else {
        out.at(r, c) = *v;
      }
    }
  }
  return out;
}

std::string format_ipv4(std::uint32_t addr) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%u.%u.%u.%u", (addr >> 24) & 0xFF,
                (addr >> 16) & 0xFF, (addr >> 8) & 0xFF, addr & 0xFF);
  return buf;
}

std::optional<std::uint32_t> parse_ipv4(std::string_view text) noexcept {
  std::uint32_t addr = 0;
  const char* p = text.data();
  const char* end = text.data() + text.size();
  for (int part = 0; part < 4; ++part) {
    unsigned octet = 0;
    auto [next, ec] = std::from_chars(p, end, octet);
    if (ec != std::errc{} || next == p || octet > 255) return std::nullopt;
    addr = (addr << 8) | octet;
    p = next;
    if (part < 3) {
      if (p == end || *p != '.') return std::nullopt;
      ++p;
    }
  }
  if (p != end) return std::nullopt;
  return addr;
}

std::string format_mac(std::uint64_t mac) {
  char buf[18];
  std::snprintf(buf, sizeof buf, "%02x:%02x:%02x:%02x:%02x:%02x",
                static_cast<unsigned>((mac >> 40) & 0xFF),
                static_cast<unsigned>((mac >> 32) & 0xFF),
                static_cast<unsigned>((mac >> 24) & 0xFF),
                static_cast<unsigned>((mac >> 16) & 0xFF),
                static_cast<unsigned>((mac >> 8) & 0xFF),
                static_cast<unsigned>(mac & 0xFF));
  return buf;
}

std::optional<std::uint64_t> parse_mac(std::string_view text) noexcept {
  if (text.size() != 17) return std::nullopt;
  std::uint64_t mac = 0;
  for (int part = 0; part < 6; ++part) {
    const char* p = text.data() + part * 3;
    unsigned byte = 0;
    auto [next, ec] = std::from_chars(p, p + 2, byte, 16);
    if (ec != std::errc{} || next != p + 2) return std::nullopt;
    if (part < 5 && p[2] != ':' && p[2] != '-') return std::nullopt;
    mac = (mac << 8) | byte;
  }
  return mac;
}

std::string format_double(double v) {
  char buf[32];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, end);
}

std::string to_canonical_csv(std::span<const PacketRecord> records) {
  std::string out;
  bool first = true;
  for (const auto& d : kCatalogue) {
    if (!first) out += ',';
    out += d.name;
    first = false;
  }
  out += '\n';
  for (const auto& r : records) {
    for (std::size_t c = 0; c < kCatalogue.size(); ++c) {
      if (c) out += ',';
      const FeatureId id = kCatalogue[c].id;
      auto v = raw_value(r, id);
      if (!v) {
        out += "-1";
        continue;
      }
      switch (id) {
        case FeatureId::link_src: out += format_mac(*r.link_src); break;
        case FeatureId::link_dst: out += format_mac(*r.link_dst); break;
        case FeatureId::net_src: out += format_ipv4(*r.net_src); break;
        case FeatureId::net_dst: out += format_ipv4(*r.net_dst); break;
        case FeatureId::protocol: out += to_string(*r.protocol); break;
        default: out += format_double(*v); break;
      }
    }
    out += '\n';
  }
  return out;
}

}  // namespace ipfaudit
