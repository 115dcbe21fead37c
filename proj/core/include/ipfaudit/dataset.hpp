#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "ipfaudit/packet.hpp"

namespace ipfaudit {

enum class Label : std::uint8_t { benign = 0, malicious = 1 };

std::string_view to_string(Label l) noexcept;
std::optional<Label> parse_label(std::string_view text) noexcept;

struct SessionId {
  std::uint32_t value = 0;
  auto operator<=>(const SessionId&) const = default;
};

struct Endpoint {
  std::uint32_t address = 0;
  std::uint16_t port = 0;
  auto operator<=>(const Endpoint&) const = default;
};

// Bidirectional flow key: lo <= hi lexicographically on (address, port).
struct FlowKey {
  Protocol proto = Protocol::other;
  Endpoint lo;
  Endpoint hi;
  auto operator<=>(const FlowKey&) const = default;
};

std::string to_string(const FlowKey& key);

// Records plus per-record labels and sessions, and optionally flows.
// The three (four) sequences always have equal length.
class LabeledDataset {
 public:
  LabeledDataset() = default;
  // Throws PreconditionError on length mismatch.
  LabeledDataset(std::vector<PacketRecord> records, std::vector<Label> labels,
                 std::vector<SessionId> sessions,
                 std::optional<std::vector<FlowKey>> flows = std::nullopt);

  std::size_t size() const noexcept { return records_.size(); }
  bool empty() const noexcept { return records_.empty(); }

  const std::vector<PacketRecord>& records() const noexcept { return records_; }
  const std::vector<Label>& labels() const noexcept { return labels_; }
  const std::vector<SessionId>& sessions() const noexcept { return sessions_; }
  const std::optional<std::vector<FlowKey>>& flows() const noexcept { return flows_; }

  // Distinct sessions, ascending.
  std::vector<SessionId> session_ids() const;
  std::size_t count(Label l) const noexcept;
  bool has_both_classes() const noexcept;

  // Copy with flow keys computed by group_flows.
  LabeledDataset with_flows() const;
  // Copy restricted to the given sessions (order preserved).
  LabeledDataset select_sessions(const std::set<SessionId>& keep) const;

 private:
  std::vector<PacketRecord> records_;
  std::vector<Label> labels_;
  std::vector<SessionId> sessions_;
  std::optional<std::vector<FlowKey>> flows_;
};

namespace label_rule {
struct BySourceAddress {
  std::set<std::uint32_t> addresses;
};
// Records with timestamp >= cutoff are malicious; absent timestamps benign.
struct ByTimeBoundary {
  double cutoff = 0.0;
};
struct ByColumn {
  std::vector<Label> labels;
};
}  // namespace label_rule

using LabelRule = std::variant<label_rule::BySourceAddress,
                               label_rule::ByTimeBoundary, label_rule::ByColumn>;

// Throws PreconditionError when a ByColumn vector has the wrong length.
std::vector<Label> assign_labels(std::span<const PacketRecord> records,
                                 const LabelRule& rule);

// Per-record bidirectional flow keys. Protocols without ports get port 0.
std::vector<FlowKey> group_flows(std::span<const PacketRecord> records);

// Concatenates datasets. Session ids are kept when they are disjoint across
// inputs, otherwise every (input, session) pair is renumbered 0..k-1 in
// order of first appearance. Flows survive only if every input has them.
// Throws PreconditionError for an empty input list.
LabeledDataset merge_sessions(std::span<const LabeledDataset> datasets);

}  // namespace ipfaudit
