#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "ipfaudit/packet.hpp"

namespace ipfaudit {

inline constexpr std::size_t kPcapGlobalHeaderSize = 24;
inline constexpr std::size_t kPcapRecordHeaderSize = 16;
inline constexpr std::uint32_t kLinkTypeEthernet = 1;

struct CaptureWarning {
  std::uint64_t frame_index;
  std::string message;
};

struct ParsedCapture {
  std::vector<PacketRecord> records;
  std::vector<CaptureWarning> warnings;
};

// Decodes a classic pcap stream (either byte order, micro- or nanosecond
// timestamps, Ethernet link type). Throws FormatError on a malformed global
// header. Truncated frames produce a warning and a partially filled record.
ParsedCapture parse_capture(std::span<const std::uint8_t> bytes);

// Serialises records as a little-endian microsecond pcap. Link addresses and
// frame_len are required; IP protocols also need both network addresses.
// Throws PreconditionError when a record cannot be encoded.
std::vector<std::uint8_t> write_pcap(std::span<const PacketRecord> records);

// Timestamp from pcap parts; shared by the writer, parser and generator so
// the three agree bit for bit.
double timestamp_from_parts(std::uint32_t seconds, std::uint32_t micros) noexcept;

// RFC 1071 ones'-complement sum over the buffer (folded, not inverted).
std::uint32_t ones_complement_sum(std::span<const std::uint8_t> bytes,
                                  std::uint32_t initial = 0) noexcept;

// TCP/UDP checksum over the pseudo-header and header of a record whose
// payload is all zeros. Returns nullopt for other protocols.
std::optional<std::uint16_t> transport_checksum(const PacketRecord& r);

// Bytes needed for the headers of a record's protocol stack.
std::uint32_t header_bytes(Protocol p) noexcept;

std::vector<std::uint8_t> read_file_bytes(const std::string& path);

}  // namespace ipfaudit
