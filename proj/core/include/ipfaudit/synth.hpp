#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "ipfaudit/dataset.hpp"

namespace ipfaudit {

inline constexpr std::uint32_t kMinFrame = 60;
inline constexpr std::uint32_t kMaxFrame = 1514;

// Frame-size distribution in bytes.
struct SizeModel {
  enum class Kind { constant, uniform, bimodal };
  Kind kind = Kind::constant;
  std::uint32_t a = 1400;  // constant value, uniform lower bound, first mode
  std::uint32_t b = 1400;  // uniform upper bound, second mode
  double mix = 0.5;        // bimodal: probability of the second mode

  static SizeModel constant(std::uint32_t bytes) { return {Kind::constant, bytes, bytes, 0.0}; }
  static SizeModel uniform(std::uint32_t lo, std::uint32_t hi) { return {Kind::uniform, lo, hi, 0.0}; }
  static SizeModel bimodal(std::uint32_t a, std::uint32_t b, double mix) {
    return {Kind::bimodal, a, b, mix};
  }
  double mean() const noexcept;
  // The same model moved by `delta` bytes, clamped to frame bounds.
  SizeModel shifted(double delta) const;
  bool operator==(const SizeModel&) const = default;
};

enum class ScenarioKind {
  syn_flood,
  udp_flood,
  http_flood_like,
  benign_background,
  time_block,
  rhythmic_mix
};
std::string_view to_string(ScenarioKind k) noexcept;

// Second session requested alongside the first (see generate_pair).
struct PairRequest {
  double similarity = 1.0;
  std::uint64_t seed = 2;
  bool operator==(const PairRequest&) const = default;
};

struct ScenarioSpec {
  ScenarioKind kind = ScenarioKind::udp_flood;
  std::uint64_t seed = 1;
  double duration = 10.0;               // seconds
  double rate = 100.0;                  // attack events per second
  SizeModel size_model = SizeModel::constant(1400);
  std::uint32_t attacker = 0x0A420001;  // 10.66.0.1
  std::uint32_t victim = 0xC0A8010A;    // 192.168.1.10
  double benign_flow_rate = 20.0;       // benign flows per second
  SizeModel benign_size = SizeModel::uniform(60, 590);
  // Probability that an attack frame takes its size from benign_size.
  double attack_size_blend = 0.0;
  // Attack start (floods), label boundary (time_block) or start of the
  // alternating bursts (rhythmic_mix). Defaults: 0 for floods, half the
  // duration otherwise.
  std::optional<double> cutoff;
  double burst = 1.0;                   // rhythmic_mix burst length, seconds
  std::uint16_t port_lo = 32768;        // ephemeral source ports
  std::uint16_t port_hi = 60999;
  std::uint32_t session = 0;
  std::optional<std::uint16_t> service_port;  // default 80, 53 for udp_flood
  std::uint32_t benign_hosts = 8;
  // Trailer bytes appended to benign TCP control frames (SYN, SYN/ACK, ACK).
  std::uint32_t control_pad = 0;
  std::optional<PairRequest> pair;

  double effective_cutoff() const noexcept;
  std::uint16_t effective_service_port() const noexcept;
  // Throws PreconditionError for out-of-range parameters.
  void validate() const;
  bool operator==(const ScenarioSpec&) const = default;
};

// Role of every emitted packet: "benign_tcp", "benign_dns", "attack",
// "attack_reply".
struct EmittedPacket {
  std::string role;
  std::uint32_t flow = 0;
};

struct GeneratedSession {
  ScenarioSpec spec;
  LabelRule rule;
  LabeledDataset dataset;               // with flow keys
  std::vector<EmittedPacket> emitted;   // parallel to dataset records
  std::size_t attack_events = 0;
  std::size_t benign_flows = 0;
};

// Deterministic in the spec. Benign traffic: TCP flows (handshake, 1-4
// request/response exchanges, no teardown) and DNS-like UDP exchanges from
// `benign_hosts` clients, exponential inter-arrival. Floods run at a
// constant rate. Labels come from the declared rule: by source address
// (the attacker), or by time boundary for time_block.
GeneratedSession generate(const ScenarioSpec& spec);

// Session A is the spec on the lower half of the port range; session B
// uses seed2, the upper half, addresses moved by 2^16 and session + 1.
// B's size models and attack rate are interpolated between A's regime
// (similarity 1) and a swapped regime (similarity 0) where attack frames
// take the benign mean size, benign frames shift by the same gap (TCP
// control frames too, through control_pad, when the shift is upward) and
// the attack rate doubles.
std::pair<GeneratedSession, GeneratedSession> generate_pair(const ScenarioSpec& spec,
                                                            double similarity,
                                                            std::uint64_t seed2);

nlohmann::json to_json(const SizeModel& m);
SizeModel size_model_from_json(const nlohmann::json& j);
nlohmann::json to_json(const ScenarioSpec& s);
// Throws SchemaError for unknown kinds, bad addresses or ill-typed fields.
ScenarioSpec scenario_from_json(const nlohmann::json& j);

// Emission manifest: spec, label rule, benign mix, counts and one entry per
// packet with its role, flow and fields.
nlohmann::json manifest_json(const GeneratedSession& g);

}  // namespace ipfaudit
