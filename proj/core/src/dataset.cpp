#include "ipfaudit/dataset.hpp"

#include <algorithm>
#include <map>

#include "ipfaudit/errors.hpp"

namespace ipfaudit {

std::string_view to_string(Label l) noexcept {
  return l == Label::malicious ? "malicious" : "benign";
}

std::optional<Label> parse_label(std::string_view text) noexcept {
  if (text == "benign" || text == "0" || text == "BENIGN" || text == "normal" ||
      text == "Normal")
    return Label::benign;
  if (text == "malicious" || text == "1" || text == "attack" ||
      text == "MALICIOUS" || text == "Attack")
    return Label::malicious;
  return std::nullopt;
}

std::string to_string(const FlowKey& key) {
  return std::string(to_string(key.proto)) + " " + format_ipv4(key.lo.address) +
         ":" + std::to_string(key.lo.port) + " <-> " +
         format_ipv4(key.hi.address) + ":" + std::to_string(key.hi.port);
}

LabeledDataset::LabeledDataset(std::vector<PacketRecord> records,
                               std::vector<Label> labels,
                               std::vector<SessionId> sessions,
                               std::optional<std::vector<FlowKey>> flows)
    : records_(std::move(records)),
      labels_(std::move(labels)),
      sessions_(std::move(sessions)),
      flows_(std::move(flows)) {
  if (labels_.size() != records_.size() || sessions_.size() != records_.size())
    throw PreconditionError("dataset: records, labels and sessions differ in length");
  if (flows_ && flows_->size() != records_.size())
    throw PreconditionError("dataset: flow keys differ in length from records");
}

std::vector<SessionId> LabeledDataset::session_ids() const {
  std::vector<SessionId> ids(sessions_.begin(), sessions_.end());
  std::sort(ids.begin(), ids.end());
  ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
  return ids;
}

std::size_t LabeledDataset::count(Label l) const noexcept {
  return static_cast<std::size_t>(std::count(labels_.begin(), labels_.end(), l));
}

bool LabeledDataset::has_both_classes() const noexcept {
  return count(Label::benign) > 0 && count(Label::malicious) > 0;
}

LabeledDataset LabeledDataset::with_flows() const {
  return LabeledDataset(records_, labels_, sessions_, group_flows(records_));
}

LabeledDataset LabeledDataset::select_sessions(const std::set<SessionId>& keep) const {
  std::vector<PacketRecord> records;
  std::vector<Label> labels;
  std::vector<SessionId> sessions;
  std::optional<std::vector<FlowKey>> flows;
  if (flows_) flows.emplace();
  for (std::size_t i = 0; i < size(); ++i) {
    if (!keep.contains(sessions_[i])) continue;
    records.push_back(records_[i]);
    labels.push_back(labels_[i]);
    sessions.push_back(sessions_[i]);
    if (flows_) flows->push_back((*flows_)[i]);
  }
  return LabeledDataset(std::move(records), std::move(labels), std::move(sessions),
                        std::move(flows));
}

std::vector<Label> assign_labels(std::span<const PacketRecord> records,
                                 const LabelRule& rule) {
  std::vector<Label> out(records.size(), Label::benign);
  std::visit(
      [&](const auto& r) {
        using R = std::decay_t<decltype(r)>;
        if constexpr (std::is_same_v<R, label_rule::BySourceAddress>) {
          for (std::size_t i = 0; i < records.size(); ++i)
            if (records[i].net_src && r.addresses.contains(*records[i].net_src))
              out[i] = Label::malicious;
        } else if constexpr (std::is_same_v<R, label_rule::ByTimeBoundary>) {
          for (std::size_t i = 0; i < records.size(); ++i)
            if (records[i].timestamp && *records[i].timestamp >= r.cutoff)
              out[i] = Label::malicious;
        } else {
          if (r.labels.size() != records.size())
            throw PreconditionError(
                "label column has " + std::to_string(r.labels.size()) +
                " entries for " + std::to_string(records.size()) + " records");
          out = r.labels;
        }
      },
      rule);
  return out;
}

std::vector<FlowKey> group_flows(std::span<const PacketRecord> records) {
  std::vector<FlowKey> keys;
  keys.reserve(records.size());
  for (const PacketRecord& r : records) {
    FlowKey k;
    k.proto = r.protocol.value_or(Protocol::other);
    const bool ported = k.proto == Protocol::tcp || k.proto == Protocol::udp;
    Endpoint a{r.net_src.value_or(0),
               ported ? r.src_port.value_or(0) : std::uint16_t{0}};
    Endpoint b{r.net_dst.value_or(0),
               ported ? r.dst_port.value_or(0) : std::uint16_t{0}};
    k.lo = std::min(a, b);
    k.hi = std::max(a, b);
    keys.push_back(k);
  }
  return keys;
}

LabeledDataset merge_sessions(std::span<const LabeledDataset> datasets) {
  if (datasets.empty()) throw PreconditionError("merge_sessions: no datasets");

  std::set<SessionId> seen;
  bool disjoint = true;
  for (const auto& d : datasets) {
    auto ids = d.session_ids();
    for (SessionId id : ids) {
      if (!seen.insert(id).second) disjoint = false;
    }
  }

  const bool keep_flows = std::all_of(datasets.begin(), datasets.end(),
                                      [](const auto& d) { return d.flows().has_value(); });
  std::vector<PacketRecord> records;
  std::vector<Label> labels;
  std::vector<SessionId> sessions;
  std::optional<std::vector<FlowKey>> flows;
  if (keep_flows) flows.emplace();

  std::map<std::pair<std::size_t, SessionId>, SessionId> renumber;
  for (std::size_t di = 0; di < datasets.size(); ++di) {
    const auto& d = datasets[di];
    records.insert(records.end(), d.records().begin(), d.records().end());
    labels.insert(labels.end(), d.labels().begin(), d.labels().end());
    for (SessionId s : d.sessions()) {
      if (disjoint) {
        sessions.push_back(s);
      } else {
        auto [it, inserted] = renumber.try_emplace(
            {di, s}, SessionId{static_cast<std::uint32_t>(renumber.size())});
        sessions.push_back(it->second);
      }
    }
    if (keep_flows) flows->insert(flows->end(), d.flows()->begin(), d.flows()->end());
  }
  return LabeledDataset(std::move(records), std::move(labels), std::move(sessions),
                        std::move(flows));
}

}  // namespace ipfaudit
