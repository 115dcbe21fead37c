#include "ipfaudit/pcap.hpp"

#include <cmath>
#include <fstream>
#include <iterator>

#include "ipfaudit/errors.hpp"

namespace ipfaudit {
namespace {

constexpr std::uint32_t kMagicMicros = 0xA1B2C3D4;
constexpr std::uint32_t kMagicNanos = 0xA1B23C4D;

constexpr std::uint16_t kEtherIpv4 = 0x0800;
constexpr std::uint16_t kEtherIpv6 = 0x86DD;
constexpr std::uint16_t kEtherArp = 0x0806;
constexpr std::uint16_t kEtherVlan = 0x8100;
// IEEE local experimental ethertype, used for records with no IP layer.
constexpr std::uint16_t kEtherExperimental = 0x88B5;
// IANA "use for experimentation" protocol number for IP records whose
// protocol is outside the tracked set.
constexpr std::uint8_t kIpProtoExperimental = 253;

constexpr std::size_t kEthernetHeader = 14;
constexpr std::size_t kIpv4Header = 20;
constexpr std::size_t kIpv6Header = 40;
constexpr std::size_t kTcpHeader = 20;
constexpr std::size_t kUdpHeader = 8;
constexpr std::size_t kIcmpHeader = 8;
constexpr std::size_t kArpBody = 28;

std::uint16_t be16(const std::uint8_t* p) {
  return static_cast<std::uint16_t>((p[0] << 8) | p[1]);
}
std::uint32_t be32(const std::uint8_t* p) {
  return (std::uint32_t{p[0]} << 24) | (std::uint32_t{p[1]} << 16) |
         (std::uint32_t{p[2]} << 8) | std::uint32_t{p[3]};
}
std::uint64_t be48(const std::uint8_t* p) {
  std::uint64_t v = 0;
  for (int i = 0; i < 6; ++i) v = (v << 8) | p[i];
  return v;
}

class HeaderReader {
 public:
  HeaderReader(const std::uint8_t* p, bool swapped) : p_(p), swapped_(swapped) {}
  std::uint32_t u32(std::size_t off) const {
    const std::uint8_t* q = p_ + off;
    if (swapped_) return be32(q);
    return std::uint32_t{q[0]} | (std::uint32_t{q[1]} << 8) |
           (std::uint32_t{q[2]} << 16) | (std::uint32_t{q[3]} << 24);
  }

 private:
  const std::uint8_t* p_;
  bool swapped_;
};

void put16(std::vector<std::uint8_t>& out, std::size_t at, std::uint16_t v) {
  out[at] = static_cast<std::uint8_t>(v >> 8);
  out[at + 1] = static_cast<std::uint8_t>(v);
}
void put32(std::vector<std::uint8_t>& out, std::size_t at, std::uint32_t v) {
  for (int i = 0; i < 4; ++i)
    out[at + i] = static_cast<std::uint8_t>(v >> (24 - 8 * i));
}
void put48(std::vector<std::uint8_t>& out, std::size_t at, std::uint64_t v) {
  for (int i = 0; i < 6; ++i)
    out[at + i] = static_cast<std::uint8_t>(v >> (40 - 8 * i));
}
void append_le32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}
void append_le16(std::vector<std::uint8_t>& out, std::uint16_t v) {
  out.push_back(static_cast<std::uint8_t>(v));
  out.push_back(static_cast<std::uint8_t>(v >> 8));
}

std::uint16_t fold(std::uint32_t sum) {
  while (sum >> 16) sum = (sum & 0xFFFF) + (sum >> 16);
  return static_cast<std::uint16_t>(sum);
}

// Decodes the transport header at `l4` (with `avail` captured bytes) into r.
// `l4_total` is the transport segment length claimed by the IP header.
void decode_transport(PacketRecord& r, std::uint8_t ip_proto,
                      const std::uint8_t* l4, std::size_t avail,
                      std::size_t l4_total, bool& truncated) {
  switch (ip_proto) {
    case 6:
      r.protocol = Protocol::tcp;
      if (avail < kTcpHeader) {
        truncated = true;
        return;
      }
      r.src_port = be16(l4);
      r.dst_port = be16(l4 + 2);
      r.seq_num = be32(l4 + 4);
      r.ack_num = be32(l4 + 8);
      r.tcp_flags = l4[13];
      r.window = be16(l4 + 14);
      r.checksum = be16(l4 + 16);
      {
        const std::size_t off = static_cast<std::size_t>(l4[12] >> 4) * 4;
        r.payload_len = static_cast<std::uint32_t>(
            l4_total > off ? l4_total - off : 0);
      }
      return;
    case 17:
      r.protocol = Protocol::udp;
      if (avail < kUdpHeader) {
        truncated = true;
        return;
      }
      r.src_port = be16(l4);
      r.dst_port = be16(l4 + 2);
      r.checksum = be16(l4 + 6);
      {
        const std::size_t udp_len = be16(l4 + 4);
        const std::size_t seg = udp_len >= kUdpHeader ? udp_len : l4_total;
        r.payload_len = static_cast<std::uint32_t>(
            seg > kUdpHeader ? seg - kUdpHeader : 0);
      }
      return;
    case 1:
    case 58:
      r.protocol = Protocol::icmp;
      if (avail < 4) {
        truncated = true;
        return;
      }
      r.checksum = be16(l4 + 2);
      r.payload_len = static_cast<std::uint32_t>(
          l4_total > kIcmpHeader ? l4_total - kIcmpHeader : 0);
      return;
    default:
      r.protocol = Protocol::other;
      r.payload_len = static_cast<std::uint32_t>(l4_total);
      return;
  }
}

PacketRecord decode_frame(std::uint64_t index, double ts, std::uint32_t orig_len,
                          const std::uint8_t* p, std::size_t caplen,
                          bool& truncated) {
  PacketRecord r;
  r.frame_index = index;
  r.timestamp = ts;
  r.frame_len = orig_len;
  if (caplen < kEthernetHeader) {
    truncated = true;
    return r;
  }
  r.link_dst = be48(p);
  r.link_src = be48(p + 6);
  std::size_t off = 12;
  std::uint16_t ethertype = be16(p + off);
  off += 2;
  if (ethertype == kEtherVlan) {
    if (caplen < off + 4) {
      truncated = true;
      return r;
    }
    ethertype = be16(p + off + 2);
    off += 4;
  }
  const std::uint8_t* l3 = p + off;
  const std::size_t l3_avail = caplen - off;
  const std::size_t l3_wire = orig_len > off ? orig_len - off : 0;

  if (ethertype == kEtherIpv4) {
    if (l3_avail < kIpv4Header) {
      truncated = true;
      return r;
    }
    const std::size_t ihl = static_cast<std::size_t>(l3[0] & 0x0F) * 4;
    std::size_t total = be16(l3 + 2);
    if (total > l3_wire) total = l3_wire;
    r.ip_id = be16(l3 + 4);
    r.ttl = l3[8];
    r.net_src = be32(l3 + 12);
    r.net_dst = be32(l3 + 16);
    if (ihl < kIpv4Header || l3_avail < ihl) {
      r.protocol = Protocol::other;
      truncated = truncated || l3_avail < ihl;
      return r;
    }
    const std::size_t l4_total = total > ihl ? total - ihl : 0;
    decode_transport(r, l3[9], l3 + ihl, l3_avail - ihl, l4_total, truncated);
  } else if (ethertype == kEtherIpv6) {
    if (l3_avail < kIpv6Header) {
      truncated = true;
      return r;
    }
    // Addresses are 128-bit and stay absent; only the next header is used.
    r.ttl = l3[7];
    const std::size_t l4_total = be16(l3 + 4);
    decode_transport(r, l3[6], l3 + kIpv6Header, l3_avail - kIpv6Header,
                     l4_total, truncated);
  } else if (ethertype == kEtherArp) {
    r.protocol = Protocol::arp;
    r.payload_len = 0;
    if (l3_avail < kArpBody) {
      truncated = true;
      return r;
    }
    if (be16(l3 + 2) == kEtherIpv4 && l3[5] == 4) {
      r.net_src = be32(l3 + 14);
      r.net_dst = be32(l3 + 24);
    }
  } else {
    r.protocol = Protocol::other;
    r.payload_len = static_cast<std::uint32_t>(l3_wire);
  }
  return r;
}

}  // namespace

double timestamp_from_parts(std::uint32_t seconds, std::uint32_t micros) noexcept {
  return static_cast<double>(seconds) + static_cast<double>(micros) / 1e6;
}

std::uint32_t ones_complement_sum(std::span<const std::uint8_t> bytes,
                                  std::uint32_t initial) noexcept {
  std::uint64_t sum = initial;
  std::size_t i = 0;
  for (; i + 1 < bytes.size(); i += 2) sum += be16(bytes.data() + i);
  if (i < bytes.size()) sum += static_cast<std::uint32_t>(bytes[i]) << 8;
  while (sum >> 16) sum = (sum & 0xFFFF) + (sum >> 16);
  return static_cast<std::uint32_t>(sum);
}

std::uint32_t header_bytes(Protocol p) noexcept {
  switch (p) {
    case Protocol::tcp: return kEthernetHeader + kIpv4Header + kTcpHeader;
    case Protocol::udp: return kEthernetHeader + kIpv4Header + kUdpHeader;
    case Protocol::icmp: return kEthernetHeader + kIpv4Header + kIcmpHeader;
    case Protocol::arp: return kEthernetHeader + kArpBody;
    case Protocol::other: return kEthernetHeader + kIpv4Header;
  }
  return kEthernetHeader;
}

std::optional<std::uint16_t> transport_checksum(const PacketRecord& r) {
  if (!r.protocol || (*r.protocol != Protocol::tcp && *r.protocol != Protocol::udp))
    return std::nullopt;
  const bool is_tcp = *r.protocol == Protocol::tcp;
  const std::size_t hdr = is_tcp ? kTcpHeader : kUdpHeader;
  const std::uint32_t seg_len =
      static_cast<std::uint32_t>(hdr + r.payload_len.value_or(0));
  std::vector<std::uint8_t> buf(12 + hdr, 0);
  put32(buf, 0, r.net_src.value_or(0));
  put32(buf, 4, r.net_dst.value_or(0));
  buf[9] = is_tcp ? 6 : 17;
  put16(buf, 10, static_cast<std::uint16_t>(seg_len));
  put16(buf, 12, r.src_port.value_or(0));
  put16(buf, 14, r.dst_port.value_or(0));
  if (is_tcp) {
    put32(buf, 16, r.seq_num.value_or(0));
    put32(buf, 20, r.ack_num.value_or(0));
    buf[24] = 0x50;
    buf[25] = r.tcp_flags.value_or(0);
    put16(buf, 26, r.window.value_or(0));
  } else {
    put16(buf, 16, static_cast<std::uint16_t>(seg_len));
  }
  // Zero payload bytes do not change the sum.
  std::uint16_t c = static_cast<std::uint16_t>(~fold(ones_complement_sum(buf)));
  if (!is_tcp && c == 0) c = 0xFFFF;
  return c;
}

ParsedCapture parse_capture(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < kPcapGlobalHeaderSize)
    throw FormatError("pcap: stream shorter than the 24-byte global header");
  const std::uint32_t magic_le = HeaderReader(bytes.data(), false).u32(0);
  bool swapped = false;
  bool nanos = false;
  if (magic_le == kMagicMicros || magic_le == kMagicNanos) {
    nanos = magic_le == kMagicNanos;
  } else {
    const std::uint32_t magic_be = be32(bytes.data());
    if (magic_be != kMagicMicros && magic_be != kMagicNanos)
      throw FormatError("pcap: unrecognised magic number");
    swapped = true;
    nanos = magic_be == kMagicNanos;
  }
  HeaderReader global(bytes.data(), swapped);
  const std::uint32_t link_type = global.u32(20) & 0x0FFFFFFF;
  if (link_type != kLinkTypeEthernet)
    throw FormatError("pcap: unsupported link type " + std::to_string(link_type));

  ParsedCapture out;
  std::size_t pos = kPcapGlobalHeaderSize;
  std::uint64_t index = 0;
  while (pos < bytes.size()) {
    if (bytes.size() - pos < kPcapRecordHeaderSize) {
      out.warnings.push_back(
          {index, "trailing " + std::to_string(bytes.size() - pos) +
                      " bytes do not form a record header"});
      break;
    }
    HeaderReader rec(bytes.data() + pos, swapped);
    const std::uint32_t sec = rec.u32(0);
    std::uint32_t frac = rec.u32(4);
    const std::uint32_t incl = rec.u32(8);
    const std::uint32_t orig = rec.u32(12);
    pos += kPcapRecordHeaderSize;
    const double ts = nanos ? static_cast<double>(sec) + static_cast<double>(frac) / 1e9
                            : timestamp_from_parts(sec, frac);
    std::size_t caplen = incl;
    bool truncated = false;
    if (caplen > bytes.size() - pos) {
      caplen = bytes.size() - pos;
      out.warnings.push_back({index, "frame truncated: " + std::to_string(caplen) +
                                         " of " + std::to_string(incl) +
                                         " captured bytes present"});
    }
    PacketRecord r = decode_frame(index, ts, std::max(orig, incl),
                                  bytes.data() + pos, caplen, truncated);
    if (truncated && caplen == incl)
      out.warnings.push_back({index, "frame shorter than its protocol headers"});
    out.records.push_back(std::move(r));
    pos += caplen;
    ++index;
  }
  return out;
}

std::vector<std::uint8_t> write_pcap(std::span<const PacketRecord> records) {
  std::vector<std::uint8_t> out;
  out.reserve(kPcapGlobalHeaderSize + records.size() * 96);
  append_le32(out, kMagicMicros);
  append_le16(out, 2);
  append_le16(out, 4);
  append_le32(out, 0);       // thiszone
  append_le32(out, 0);       // sigfigs
  append_le32(out, 262144);  // snaplen
  append_le32(out, kLinkTypeEthernet);

  for (const PacketRecord& r : records) {
    const std::string where = "record " + std::to_string(r.frame_index);
    if (!r.link_src || !r.link_dst)
      throw PreconditionError("write_pcap: " + where + " has no link-layer addresses");
    if (!r.frame_len) throw PreconditionError("write_pcap: " + where + " has no frame_len");
    const Protocol proto = r.protocol.value_or(Protocol::other);
    const bool ip = proto != Protocol::arp && (r.net_src || r.net_dst ||
                                               proto != Protocol::other);
    if (ip && (!r.net_src || !r.net_dst))
      throw PreconditionError("write_pcap: " + where + " has no network addresses");
    const std::uint32_t payload = r.payload_len.value_or(0);
    std::uint32_t need = ip ? header_bytes(proto) + payload
                            : static_cast<std::uint32_t>(kEthernetHeader) +
                                  (proto == Protocol::arp ? kArpBody : payload);
    if (*r.frame_len < need)
      throw PreconditionError("write_pcap: " + where + " frame_len " +
                              std::to_string(*r.frame_len) + " < " +
                              std::to_string(need) + " bytes of headers and payload");

    std::vector<std::uint8_t> frame(*r.frame_len, 0);
    put48(frame, 0, *r.link_dst);
    put48(frame, 6, *r.link_src);
    if (proto == Protocol::arp) {
      put16(frame, 12, kEtherArp);
      put16(frame, 14, 1);
      put16(frame, 16, kEtherIpv4);
      frame[18] = 6;
      frame[19] = 4;
      put16(frame, 20, 1);
      put48(frame, 22, *r.link_src);
      put32(frame, 28, r.net_src.value_or(0));
      put32(frame, 38, r.net_dst.value_or(0));
    } else if (!ip) {
      put16(frame, 12, kEtherExperimental);
    } else {
      put16(frame, 12, kEtherIpv4);
      const std::size_t l3 = kEthernetHeader;
      const std::uint32_t total = header_bytes(proto) - kEthernetHeader + payload;
      frame[l3] = 0x45;
      put16(frame, l3 + 2, static_cast<std::uint16_t>(total));
      put16(frame, l3 + 4, r.ip_id.value_or(0));
      frame[l3 + 8] = r.ttl.value_or(64);
      frame[l3 + 9] = proto == Protocol::tcp    ? 6
                      : proto == Protocol::udp  ? 17
                      : proto == Protocol::icmp ? 1
                                                : kIpProtoExperimental;
      put32(frame, l3 + 12, *r.net_src);
      put32(frame, l3 + 16, *r.net_dst);
      put16(frame, l3 + 10,
            static_cast<std::uint16_t>(~fold(ones_complement_sum(
                std::span<const std::uint8_t>(frame.data() + l3, kIpv4Header)))));
      const std::size_t l4 = l3 + kIpv4Header;
      if (proto == Protocol::tcp) {
        put16(frame, l4, r.src_port.value_or(0));
        put16(frame, l4 + 2, r.dst_port.value_or(0));
        put32(frame, l4 + 4, r.seq_num.value_or(0));
        put32(frame, l4 + 8, r.ack_num.value_or(0));
        frame[l4 + 12] = 0x50;
        frame[l4 + 13] = r.tcp_flags.value_or(0);
        put16(frame, l4 + 14, r.window.value_or(0));
        put16(frame, l4 + 16, r.checksum.value_or(0));
      } else if (proto == Protocol::udp) {
        put16(frame, l4, r.src_port.value_or(0));
        put16(frame, l4 + 2, r.dst_port.value_or(0));
        put16(frame, l4 + 4, static_cast<std::uint16_t>(kUdpHeader + payload));
        put16(frame, l4 + 6, r.checksum.value_or(0));
      } else if (proto == Protocol::icmp) {
        frame[l4] = 8;
        put16(frame, l4 + 2, r.checksum.value_or(0));
      }
    }

    const double ts = r.timestamp.value_or(0.0);
    if (!(ts >= 0.0) || ts >= 4294967296.0)
      throw PreconditionError("write_pcap: " + where + " timestamp out of range");
    std::uint32_t sec = static_cast<std::uint32_t>(std::floor(ts));
    auto micros = static_cast<std::int64_t>(std::llround((ts - sec) * 1e6));
    if (micros >= 1000000) {
      ++sec;
      micros -= 1000000;
    }
    append_le32(out, sec);
    append_le32(out, static_cast<std::uint32_t>(micros));
    append_le32(out, *r.frame_len);
    append_le32(out, *r.frame_len);
    out.insert(out.end(), frame.begin(), frame.end());
  }
  return out;
}

std::vector<std::uint8_t> read_file_bytes(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open '" + path + "'");
  return std::vector<std::uint8_t>(std::istreambuf_iterator<char>(in),
                                   std::istreambuf_iterator<char>());
}

}  // namespace ipfaudit
