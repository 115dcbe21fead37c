#include "ipfaudit/synth.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

#include "ipfaudit/errors.hpp"
#include "ipfaudit/manifest.hpp"
#include "ipfaudit/pcap.hpp"
#include "ipfaudit/rng.hpp"

namespace ipfaudit {
namespace {

constexpr std::uint32_t kResolverOffset = 0x000000F5;  // victim network .245
constexpr std::uint32_t kClientBase = 100;

std::uint64_t mac_for(std::uint32_t ip) { return 0x020000000000ULL | ip; }

std::uint32_t clamp_frame(double v) {
  return static_cast<std::uint32_t>(
      std::clamp(std::llround(v), static_cast<long long>(kMinFrame),
                 static_cast<long long>(kMaxFrame)));
}

std::uint32_t sample(const SizeModel& m, Rng& rng) {
  switch (m.kind) {
    case SizeModel::Kind::constant: return m.a;
    case SizeModel::Kind::uniform: return static_cast<std::uint32_t>(rng.between(m.a, m.b));
    case SizeModel::Kind::bimodal: return rng.unit() < m.mix ? m.b : m.a;
  }
  return m.a;
}

double quantise(double t) {
  auto sec = static_cast<std::uint32_t>(std::floor(t));
  auto micros = std::llround((t - sec) * 1e6);
  if (micros >= 1000000) {
    ++sec;
    micros -= 1000000;
  }
  return timestamp_from_parts(sec, static_cast<std::uint32_t>(micros));
}

struct Host {
  std::uint32_t ip;
  std::uint8_t ttl;
  std::uint16_t window;
};

class Emitter {
 public:
  void tcp(double t, const Host& src, std::uint16_t sport, const Host& dst,
           std::uint16_t dport, std::uint8_t flags, std::uint32_t seq, std::uint32_t ack,
           std::uint32_t frame, const char* role, std::uint32_t flow) {
    PacketRecord r = base(t, src, dst, Protocol::tcp, frame);
    r.src_port = sport;
    r.dst_port = dport;
    r.tcp_flags = flags;
    r.seq_num = seq;
    r.ack_num = (flags & tcp_flag::kAck) ? ack : 0;
    r.window = src.window;
    push(std::move(r), role, flow);
  }

  void udp(double t, const Host& src, std::uint16_t sport, const Host& dst,
           std::uint16_t dport, std::uint32_t frame, const char* role, std::uint32_t flow) {
    PacketRecord r = base(t, src, dst, Protocol::udp, frame);
    r.src_port = sport;
    r.dst_port = dport;
    push(std::move(r), role, flow);
  }

  // Orders by quantised time (emission order on ties), then numbers frames,
  // assigns per-host IP identifiers and fills transport checksums.
  void finish(std::uint64_t seed, std::vector<PacketRecord>& records,
              std::vector<EmittedPacket>& emitted) {
    std::vector<std::size_t> order(records_.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      return *records_[a].timestamp < *records_[b].timestamp;
    });
    std::map<std::uint32_t, std::uint16_t> ip_id;
    for (std::size_t i = 0; i < order.size(); ++i) {
      PacketRecord r = records_[order[i]];
      r.frame_index = i;
      auto [it, fresh] = ip_id.try_emplace(
          *r.net_src, static_cast<std::uint16_t>(mix64(seed ^ *r.net_src) & 0xFFFF));
      r.ip_id = it->second++;
      r.checksum = transport_checksum(r);
      records.push_back(std::move(r));
      emitted.push_back(meta_[order[i]]);
    }
  }

 private:
  static PacketRecord base(double t, const Host& src, const Host& dst, Protocol p,
                           std::uint32_t frame) {
    PacketRecord r;
    r.timestamp = quantise(t);
    frame = std::max(frame, kMinFrame);
    r.frame_len = frame;
    r.link_src = mac_for(src.ip);
    r.link_dst = mac_for(dst.ip);
    r.net_src = src.ip;
    r.net_dst = dst.ip;
    r.protocol = p;
    r.ttl = src.ttl;
    return r;
  }

  void push(PacketRecord r, const char* role, std::uint32_t flow) {
    // Control segments carry no data; the rest fill the frame.
    const bool control = r.protocol == Protocol::tcp &&
                         !(*r.tcp_flags & tcp_flag::kPsh);
    r.payload_len = control ? 0 : *r.frame_len - header_bytes(*r.protocol);
    records_.push_back(std::move(r));
    meta_.push_back({role, flow});
  }

  std::vector<PacketRecord> records_;
  std::vector<EmittedPacket> meta_;
};

struct Ports {
  std::uint16_t lo, hi;
  std::uint16_t draw(Rng& rng) const {
    return static_cast<std::uint16_t>(rng.between(lo, hi));
  }
};

void benign_traffic(const ScenarioSpec& s, Emitter& out, std::uint32_t& flow,
                    std::size_t& flows) {
  if (s.benign_flow_rate <= 0.0) return;
  Rng rng(derive_seed(s.seed, "benign"));
  const Ports ports{s.port_lo, s.port_hi};
  const Host server{s.victim, 64, 65160};
  const Host resolver{(s.victim & 0xFFFFFF00u) | kResolverOffset, 64, 65535};
  std::vector<Host> clients;
  for (std::uint32_t i = 0; i < s.benign_hosts; ++i)
    clients.push_back({(s.victim & 0xFFFFFF00u) | (kClientBase + i), 64, 64240});

  for (double t = rng.exponential(s.benign_flow_rate); t < s.duration;
       t += rng.exponential(s.benign_flow_rate)) {
    const Host& client = clients[rng.below(clients.size())];
    const std::uint16_t sport = ports.draw(rng);
    const double rtt = 0.001 + 0.02 * rng.unit();
    ++flow;
    ++flows;
    if (rng.unit() < 0.3) {
      out.udp(t, client, sport, resolver, 53, sample(s.benign_size, rng), "benign_dns", flow);
      out.udp(t + rtt, resolver, 53, client, sport, sample(s.benign_size, rng), "benign_dns",
              flow);
      continue;
    }
    const std::uint16_t dport = rng.unit() < 0.5 ? 80 : 443;
    const auto cisn = static_cast<std::uint32_t>(rng.next());
    const auto sisn = static_cast<std::uint32_t>(rng.next());
    using namespace tcp_flag;
    const std::uint32_t ctl = kMinFrame + s.control_pad;
    out.tcp(t, client, sport, server, dport, kSyn, cisn, 0, ctl, "benign_tcp", flow);
    out.tcp(t + rtt / 2, server, dport, client, sport, kSyn | kAck, sisn, cisn + 1, ctl,
            "benign_tcp", flow);
    out.tcp(t + rtt, client, sport, server, dport, kAck, cisn + 1, sisn + 1, ctl,
            "benign_tcp", flow);
    std::uint32_t cseq = cisn + 1, sseq = sisn + 1;
    double at = t + rtt;
    const auto exchanges = 1 + rng.below(4);
    for (std::uint64_t e = 0; e < exchanges; ++e) {
      at += 0.0005 + 0.01 * rng.unit();
      const std::uint32_t req = sample(s.benign_size, rng);
      const std::uint32_t resp = sample(s.benign_size, rng);
      out.tcp(at, client, sport, server, dport, kPsh | kAck, cseq, sseq, req, "benign_tcp",
              flow);
      cseq += req - header_bytes(Protocol::tcp);
      at += rtt / 2;
      out.tcp(at, server, dport, client, sport, kPsh | kAck, sseq, cseq, resp, "benign_tcp",
              flow);
      sseq += resp - header_bytes(Protocol::tcp);
    }
  }
}

void attack_traffic(const ScenarioSpec& s, Emitter& out, std::uint32_t& flow,
                    std::size_t& events) {
  if (s.kind == ScenarioKind::benign_background) return;
  Rng rng(derive_seed(s.seed, "attack"));
  const Ports ports{s.port_lo, s.port_hi};
  const Host attacker{s.attacker, 57, 1024};
  const Host victim{s.victim, 64, 65160};
  const std::uint16_t service = s.effective_service_port();
  const double start = s.kind == ScenarioKind::time_block || s.kind == ScenarioKind::rhythmic_mix
                           ? s.effective_cutoff()
                           : s.cutoff.value_or(0.0);
  auto attack_size = [&] {
    const std::uint32_t own = sample(s.size_model, rng);
    const std::uint32_t blended = sample(s.benign_size, rng);
    return rng.unit() < s.attack_size_blend ? blended : own;
  };
  auto active = [&](double t) {
    if (s.kind != ScenarioKind::rhythmic_mix) return true;
    return static_cast<std::uint64_t>(std::floor((t - start) / s.burst)) % 2 == 0;
  };

  std::vector<double> times;
  const double step = 1.0 / s.rate;
  for (std::uint64_t k = 0;; ++k) {
    const double t = start + static_cast<double>(k) * step;
    if (t >= s.duration) break;
    if (active(t)) times.push_back(t);
  }
  events = times.size();

  const bool udp_kind = s.kind == ScenarioKind::udp_flood ||
                        s.kind == ScenarioKind::time_block ||
                        s.kind == ScenarioKind::rhythmic_mix;
  std::vector<std::uint16_t> udp_ports;
  if (udp_kind) {
    const std::size_t range = static_cast<std::size_t>(s.port_hi - s.port_lo) + 1;
    if (times.size() > range)
      throw PreconditionError("synth: " + std::to_string(times.size()) +
                              " flood packets need distinct source ports but the range holds " +
                              std::to_string(range));
    std::vector<std::uint16_t> pool(range);
    for (std::size_t i = 0; i < range; ++i) pool[i] = static_cast<std::uint16_t>(s.port_lo + i);
    // Partial Fisher-Yates: the first times.size() entries are a sample
    // without replacement.
    for (std::size_t i = 0; i < times.size(); ++i)
      std::swap(pool[i], pool[i + rng.below(range - i)]);
    udp_ports.assign(pool.begin(), pool.begin() + static_cast<std::ptrdiff_t>(times.size()));
  }

  using namespace tcp_flag;
  for (std::size_t e = 0; e < times.size(); ++e) {
    const double t = times[e];
    ++flow;
    if (udp_kind) {
      out.udp(t, attacker, udp_ports[e], victim, service, attack_size(), "attack", flow);
      continue;
    }
    const std::uint16_t sport = ports.draw(rng);
    const auto aisn = static_cast<std::uint32_t>(rng.next());
    const auto visn = static_cast<std::uint32_t>(rng.next());
    const double reply = 0.0002 + 0.0008 * rng.unit();
    if (s.kind == ScenarioKind::syn_flood) {
      out.tcp(t, attacker, sport, victim, service, kSyn, aisn, 0, kMinFrame, "attack", flow);
      out.tcp(t + reply, victim, service, attacker, sport, kSyn | kAck, visn, aisn + 1,
              kMinFrame, "attack_reply", flow);
      continue;
    }
    // http_flood_like: completed handshake, then one request.
    out.tcp(t, attacker, sport, victim, service, kSyn, aisn, 0, kMinFrame, "attack", flow);
    out.tcp(t + reply, victim, service, attacker, sport, kSyn | kAck, visn, aisn + 1,
            kMinFrame, "attack_reply", flow);
    out.tcp(t + 2 * reply, attacker, sport, victim, service, kAck, aisn + 1, visn + 1,
            kMinFrame, "attack", flow);
    out.tcp(t + 2 * reply + 0.0001, attacker, sport, victim, service, kPsh | kAck, aisn + 1,
            visn + 1, attack_size(), "attack", flow);
  }
}

void check_size_model(const SizeModel& m, const char* what) {
  auto in_bounds = [](std::uint32_t v) { return v >= kMinFrame && v <= kMaxFrame; };
  if (!in_bounds(m.a) || !in_bounds(m.b))
    throw PreconditionError(std::string("synth: ") + what + " sizes must lie in [" +
                            std::to_string(kMinFrame) + ", " + std::to_string(kMaxFrame) + "]");
  if (m.kind == SizeModel::Kind::uniform && m.a > m.b)
    throw PreconditionError(std::string("synth: ") + what + " uniform bounds are reversed");
  if (m.kind == SizeModel::Kind::bimodal && !(m.mix >= 0.0 && m.mix <= 1.0))
    throw PreconditionError(std::string("synth: ") + what + " mix must lie in [0, 1]");
}

template <typename T>
T field(const nlohmann::json& j, const char* key, T fallback) {
  if (!j.contains(key)) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception&) {
    throw SchemaError(std::string("scenario: field '") + key + "' has the wrong type");
  }
}

std::uint32_t address_field(const nlohmann::json& j, const char* key, std::uint32_t fallback) {
  if (!j.contains(key)) return fallback;
  const auto text = field<std::string>(j, key, "");
  auto ip = parse_ipv4(text);
  if (!ip) throw SchemaError(std::string("scenario: bad address in '") + key + "'");
  return *ip;
}

constexpr std::array<std::pair<ScenarioKind, std::string_view>, 6> kKinds{{
    {ScenarioKind::syn_flood, "syn_flood"},
    {ScenarioKind::udp_flood, "udp_flood"},
    {ScenarioKind::http_flood_like, "http_flood_like"},
    {ScenarioKind::benign_background, "benign_background"},
    {ScenarioKind::time_block, "time_block"},
    {ScenarioKind::rhythmic_mix, "rhythmic_mix"},
}};

}  // namespace

double SizeModel::mean() const noexcept {
  switch (kind) {
    case Kind::constant: return a;
    case Kind::uniform: return (static_cast<double>(a) + b) / 2.0;
    case Kind::bimodal: return (1.0 - mix) * a + mix * b;
  }
  return a;
}

SizeModel SizeModel::shifted(double delta) const {
  SizeModel m = *this;
  m.a = clamp_frame(a + delta);
  m.b = clamp_frame(b + delta);
  return m;
}

std::string_view to_string(ScenarioKind k) noexcept {
  for (const auto& [kind, name] : kKinds)
    if (kind == k) return name;
  return "udp_flood";
}

double ScenarioSpec::effective_cutoff() const noexcept {
  if (cutoff) return *cutoff;
  return kind == ScenarioKind::time_block || kind == ScenarioKind::rhythmic_mix ? duration / 2
                                                                                : 0.0;
}

std::uint16_t ScenarioSpec::effective_service_port() const noexcept {
  if (service_port) return *service_port;
  return kind == ScenarioKind::syn_flood || kind == ScenarioKind::http_flood_like ? 80 : 53;
}

void ScenarioSpec::validate() const {
  if (!(duration > 0.0) || !std::isfinite(duration))
    throw PreconditionError("synth: duration must be positive");
  if (!(rate > 0.0) || !std::isfinite(rate))
    throw PreconditionError("synth: rate must be positive");
  if (!(benign_flow_rate >= 0.0) || !std::isfinite(benign_flow_rate))
    throw PreconditionError("synth: benign_flow_rate must be non-negative");
  if (!(attack_size_blend >= 0.0 && attack_size_blend <= 1.0))
    throw PreconditionError("synth: attack_size_blend must lie in [0, 1]");
  if (cutoff && !(*cutoff >= 0.0 && *cutoff <= duration))
    throw PreconditionError("synth: cutoff must lie in [0, duration]");
  if (!(burst > 0.0)) throw PreconditionError("synth: burst must be positive");
  if (port_lo > port_hi) throw PreconditionError("synth: port range is reversed");
  if (benign_hosts == 0 || benign_hosts > 100)
    throw PreconditionError("synth: benign_hosts must lie in [1, 100]");
  if (pair && !(pair->similarity >= 0.0 && pair->similarity <= 1.0))
    throw PreconditionError("synth: similarity must lie in [0, 1]");
  if (control_pad > kMaxFrame - kMinFrame)
    throw PreconditionError("synth: control_pad exceeds the maximum frame length");
  check_size_model(size_model, "size_model");
  check_size_model(benign_size, "benign_size");
}

GeneratedSession generate(const ScenarioSpec& spec) {
  spec.validate();
  Emitter out;
  std::uint32_t flow = 0;
  std::size_t benign_flows = 0, events = 0;
  benign_traffic(spec, out, flow, benign_flows);
  attack_traffic(spec, out, flow, events);

  std::vector<PacketRecord> records;
  std::vector<EmittedPacket> emitted;
  out.finish(spec.seed, records, emitted);

  LabelRule rule;
  if (spec.kind == ScenarioKind::time_block)
    rule = label_rule::ByTimeBoundary{spec.effective_cutoff()};
  else
    rule = label_rule::BySourceAddress{{spec.attacker}};
  auto labels = assign_labels(records, rule);
  std::vector<SessionId> sessions(records.size(), SessionId{spec.session});
  LabeledDataset dataset(std::move(records), std::move(labels), std::move(sessions));
  return {spec, rule, dataset.with_flows(), std::move(emitted), events, benign_flows};
}

std::pair<GeneratedSession, GeneratedSession> generate_pair(const ScenarioSpec& spec,
                                                            double similarity,
                                                            std::uint64_t seed2) {
  if (!(similarity >= 0.0 && similarity <= 1.0))
    throw PreconditionError("synth: similarity must lie in [0, 1]");
  spec.validate();
  const std::uint16_t mid =
      static_cast<std::uint16_t>(spec.port_lo + (spec.port_hi - spec.port_lo) / 2);
  if (mid == spec.port_hi) throw PreconditionError("synth: port range too small to split");

  ScenarioSpec a = spec;
  a.pair.reset();
  a.port_hi = mid;

  ScenarioSpec b = a;
  b.seed = seed2;
  b.port_lo = static_cast<std::uint16_t>(mid + 1);
  b.port_hi = spec.port_hi;
  b.session = spec.session + 1;
  b.attacker = spec.attacker + (1u << 16);
  b.victim = spec.victim + (1u << 16);
  const double gap = spec.benign_size.mean() - spec.size_model.mean();
  const double w = 1.0 - similarity;
  b.size_model = spec.size_model.shifted(w * gap);
  b.benign_size = spec.benign_size.shifted(-w * gap);
  if (-w * gap > 0.0) b.control_pad = spec.control_pad + static_cast<std::uint32_t>(-w * gap);
  b.rate = spec.rate * (1.0 + w);
  return {generate(a), generate(b)};
}

nlohmann::json to_json(const SizeModel& m) {
  switch (m.kind) {
    case SizeModel::Kind::constant: return {{"type", "constant"}, {"bytes", m.a}};
    case SizeModel::Kind::uniform: return {{"type", "uniform"}, {"lo", m.a}, {"hi", m.b}};
    case SizeModel::Kind::bimodal:
      return {{"type", "bimodal"}, {"a", m.a}, {"b", m.b}, {"mix", m.mix}};
  }
  return {};
}

SizeModel size_model_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw SchemaError("scenario: size model must be an object");
  const auto type = field<std::string>(j, "type", "");
  if (type == "constant") {
    if (!j.contains("bytes")) throw SchemaError("scenario: constant size needs 'bytes'");
    return SizeModel::constant(field<std::uint32_t>(j, "bytes", 0));
  }
  if (type == "uniform") {
    if (!j.contains("lo") || !j.contains("hi"))
      throw SchemaError("scenario: uniform size needs 'lo' and 'hi'");
    return SizeModel::uniform(field<std::uint32_t>(j, "lo", 0), field<std::uint32_t>(j, "hi", 0));
  }
  if (type == "bimodal") {
    if (!j.contains("a") || !j.contains("b"))
      throw SchemaError("scenario: bimodal size needs 'a' and 'b'");
    return SizeModel::bimodal(field<std::uint32_t>(j, "a", 0), field<std::uint32_t>(j, "b", 0),
                              field<double>(j, "mix", 0.5));
  }
  throw SchemaError("scenario: unknown size model type '" + type + "'");
}

nlohmann::json to_json(const ScenarioSpec& s) {
  nlohmann::json j{{"kind", to_string(s.kind)},
                   {"seed", s.seed},
                   {"duration", s.duration},
                   {"rate", s.rate},
                   {"size_model", to_json(s.size_model)},
                   {"attacker", format_ipv4(s.attacker)},
                   {"victim", format_ipv4(s.victim)},
                   {"benign_flow_rate", s.benign_flow_rate},
                   {"benign_size", to_json(s.benign_size)},
                   {"attack_size_blend", s.attack_size_blend},
                   {"burst", s.burst},
                   {"port_lo", s.port_lo},
                   {"port_hi", s.port_hi},
                   {"session", s.session},
                   {"benign_hosts", s.benign_hosts},
                   {"control_pad", s.control_pad}};
  if (s.cutoff) j["cutoff"] = *s.cutoff;
  if (s.service_port) j["service_port"] = *s.service_port;
  if (s.pair) j["pair"] = {{"similarity", s.pair->similarity}, {"seed", s.pair->seed}};
  return j;
}

ScenarioSpec scenario_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw SchemaError("scenario: expected a JSON object");
  ScenarioSpec s;
  const auto kind = field<std::string>(j, "kind", "");
  bool found = false;
  for (const auto& [k, name] : kKinds)
    if (name == kind) {
      s.kind = k;
      found = true;
    }
  if (!found) throw SchemaError("scenario: unknown kind '" + kind + "'");
  s.seed = field<std::uint64_t>(j, "seed", s.seed);
  s.duration = field<double>(j, "duration", s.duration);
  s.rate = field<double>(j, "rate", s.rate);
  if (j.contains("size_model")) s.size_model = size_model_from_json(j.at("size_model"));
  s.attacker = address_field(j, "attacker", s.attacker);
  s.victim = address_field(j, "victim", s.victim);
  s.benign_flow_rate = field<double>(j, "benign_flow_rate", s.benign_flow_rate);
  if (j.contains("benign_size")) s.benign_size = size_model_from_json(j.at("benign_size"));
  s.attack_size_blend = field<double>(j, "attack_size_blend", s.attack_size_blend);
  if (j.contains("cutoff")) s.cutoff = field<double>(j, "cutoff", 0.0);
  s.burst = field<double>(j, "burst", s.burst);
  s.port_lo = field<std::uint16_t>(j, "port_lo", s.port_lo);
  s.port_hi = field<std::uint16_t>(j, "port_hi", s.port_hi);
  s.session = field<std::uint32_t>(j, "session", s.session);
  if (j.contains("service_port")) s.service_port = field<std::uint16_t>(j, "service_port", 0);
  s.benign_hosts = field<std::uint32_t>(j, "benign_hosts", s.benign_hosts);
  s.control_pad = field<std::uint32_t>(j, "control_pad", s.control_pad);
  if (j.contains("pair")) {
    const auto& p = j.at("pair");
    s.pair = PairRequest{field<double>(p, "similarity", 1.0), field<std::uint64_t>(p, "seed", 2)};
  }
  return s;
}

nlohmann::json manifest_json(const GeneratedSession& g) {
  const auto& d = g.dataset;
  nlohmann::json packets = nlohmann::json::array();
  for (std::size_t i = 0; i < d.size(); ++i) {
    const PacketRecord& r = d.records()[i];
    nlohmann::json p{{"frame_index", r.frame_index},
                     {"role", g.emitted[i].role},
                     {"flow", g.emitted[i].flow},
                     {"label", to_string(d.labels()[i])},
                     {"timestamp", *r.timestamp},
                     {"frame_len", *r.frame_len},
                     {"payload_len", *r.payload_len},
                     {"protocol", to_string(*r.protocol)},
                     {"net_src", format_ipv4(*r.net_src)},
                     {"net_dst", format_ipv4(*r.net_dst)},
                     {"src_port", *r.src_port},
                     {"dst_port", *r.dst_port},
                     {"ttl", *r.ttl},
                     {"ip_id", *r.ip_id}};
    if (r.tcp_flags) {
      p["tcp_flags"] = *r.tcp_flags;
      p["seq_num"] = *r.seq_num;
      p["ack_num"] = *r.ack_num;
      p["window"] = *r.window;
    }
    if (r.checksum) p["checksum"] = *r.checksum;
    packets.push_back(std::move(p));
  }
  const std::uint32_t net = g.spec.victim & 0xFFFFFF00u;
  nlohmann::json mix{
      {"flow_rate", g.spec.benign_flow_rate},
      {"size_model", to_json(g.spec.benign_size)},
      {"dns_share", 0.3},
      {"tcp_service_ports", {80, 443}},
      {"tcp_exchanges", {{"min", 1}, {"max", 4}}},
      {"clients", {{"first", format_ipv4(net | kClientBase)},
                   {"count", g.spec.benign_hosts}}},
      {"server", format_ipv4(g.spec.victim)},
      {"resolver", format_ipv4(net | kResolverOffset)},
      {"inter_arrival", "exponential"}};
  return {{"format_version", 1},
          {"spec", to_json(g.spec)},
          {"label_rule", to_json(g.rule)},
          {"benign_mix", mix},
          {"counts",
           {{"packets", d.size()},
            {"malicious", d.count(Label::malicious)},
            {"benign", d.count(Label::benign)},
            {"attack_events", g.attack_events},
            {"benign_flows", g.benign_flows}}},
          {"packets", packets}};
}

}  // namespace ipfaudit
