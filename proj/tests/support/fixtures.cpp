#include "fixtures.hpp"

#include <unistd.h>

#include <fstream>

#include <nlohmann/json.hpp>

namespace ipfaudit::testing {

std::filesystem::path scenario_dir() { return IPFAUDIT_SCENARIO_DIR; }

ScenarioSpec load_scenario(const std::string& name) {
  std::ifstream in(scenario_dir() / (name + ".json"));
  if (!in) throw std::runtime_error("missing scenario " + name);
  return scenario_from_json(nlohmann::json::parse(in));
}

std::filesystem::path scratch_dir(const std::string& tag) {
  static std::uint64_t counter = 0;
  auto dir = std::filesystem::temp_directory_path() /
             ("ipfaudit_test_" + tag + "_" + std::to_string(::getpid()) + "_" +
              std::to_string(counter++));
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

PacketRecord random_record(Rng& rng, std::uint64_t frame_index) {
  PacketRecord r;
  r.frame_index = frame_index;
  r.timestamp = static_cast<double>(frame_index) * 0.001;
  r.frame_len = static_cast<std::uint32_t>(rng.between(60, 1514));
  r.payload_len = *r.frame_len - 42;
  r.link_src = rng.next() & 0xFFFFFFFFFFFFull;
  r.link_dst = rng.next() & 0xFFFFFFFFFFFFull;
  r.net_src = static_cast<std::uint32_t>(rng.next());
  r.net_dst = static_cast<std::uint32_t>(rng.next());
  r.protocol = Protocol::udp;
  r.ttl = static_cast<std::uint8_t>(rng.between(1, 255));
  r.ip_id = static_cast<std::uint16_t>(rng.next());
  r.src_port = static_cast<std::uint16_t>(rng.between(1024, 65535));
  r.dst_port = static_cast<std::uint16_t>(rng.between(1, 1023));
  r.checksum = static_cast<std::uint16_t>(rng.next());
  return r;
}

std::vector<Label> random_labels(Rng& rng, std::size_t n, std::size_t min_each) {
  std::vector<Label> y(n);
  for (auto& l : y) l = rng.below(2) ? Label::malicious : Label::benign;
  for (std::size_t i = 0; i < min_each && 2 * i + 1 < n; ++i) {
    y[2 * i] = Label::benign;
    y[2 * i + 1] = Label::malicious;
  }
  rng.shuffle(std::span<Label>(y));
  return y;
}

LabeledDataset random_dataset(Rng& rng, std::size_t sessions, std::size_t per_session) {
  std::vector<PacketRecord> records;
  std::vector<Label> labels;
  std::vector<SessionId> ids;
  std::uint64_t frame = 0;
  for (std::size_t s = 0; s < sessions; ++s) {
    auto y = random_labels(rng, per_session);
    for (std::size_t i = 0; i < per_session; ++i) {
      records.push_back(random_record(rng, frame++));
      labels.push_back(y[i]);
      ids.push_back(SessionId{static_cast<std::uint32_t>(s)});
    }
  }
  return LabeledDataset(std::move(records), std::move(labels), std::move(ids)).with_flows();
}

FeatureMatrix matrix_of(const std::vector<std::vector<double>>& rows) {
  const std::size_t m = rows.empty() ? 0 : rows[0].size();
  std::vector<std::string> cols;
  for (std::size_t j = 0; j < m; ++j) cols.push_back("x" + std::to_string(j));
  FeatureMatrix x(cols, rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < m; ++j) x.at(i, j) = rows[i][j];
  return x;
}

}  // namespace ipfaudit::testing
