#include <gtest/gtest.h>

#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "fixtures.hpp"
#include "ipfaudit/cli.hpp"
#include "ipfaudit/csv_ingest.hpp"
#include "ipfaudit/report.hpp"

using namespace ipfaudit;
using ipfaudit::testing::scenario_dir;
using ipfaudit::testing::scratch_dir;

namespace {

int run(std::vector<std::string> args) {
  args.insert(args.begin(), "ipfaudit");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  return run_cli(static_cast<int>(argv.size()), argv.data());
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string scenario(const std::string& name) { return (scenario_dir() / (name + ".json")).string(); }

}  // namespace

TEST(Cli, SynthThenExtractRowCountMatchesManifest) {
  const auto dir = scratch_dir("cli_synth");
  ASSERT_EQ(run({"synth", scenario("http_flood"), "--out", dir.string()}), kExitOk);
  const auto manifest = nlohmann::json::parse(slurp(dir / "session_0.manifest.json"));
  ASSERT_EQ(run({"extract", (dir / "session_0.pcap").string(), "--out", (dir / "x.csv").string()}),
            kExitOk);
  const auto text = slurp(dir / "x.csv");
  EXPECT_EQ(text.rfind("# ipfaudit ", 0), 0u);
  const auto table = parse_csv_table(text);
  EXPECT_EQ(table.rows.size(), manifest["counts"]["packets"].get<std::size_t>());
  EXPECT_EQ(table.header.size(), kFeatureCount);
  EXPECT_TRUE(manifest.contains("run_config"));
}

TEST(Cli, ExtractMissingFileIsInputError) {
  EXPECT_EQ(run({"extract", "/nonexistent.pcap", "--out", "-"}), kExitInput);
  EXPECT_EQ(run({"frobnicate"}), kExitInput);
}

TEST(Cli, ExtractHandshakeCsv) {
  const auto dir = scratch_dir("cli_csv");
  write_text_file(dir / "in.csv", "frame_len,tcp_flags\n60,2\n60,18\n60,16\n");
  ASSERT_EQ(run({"extract", (dir / "in.csv").string(), "--out", (dir / "out.csv").string()}), kExitOk);
  EXPECT_EQ(parse_csv_table(slurp(dir / "out.csv")).rows.size(), 3u);
}

TEST(Cli, AuditOutputsAndDeterminism) {
  const auto dir = scratch_dir("cli_audit");
  ASSERT_EQ(run({"synth", scenario("udp_flood_pair"), "--out", (dir / "data").string()}), kExitOk);
  const std::vector<std::string> base{"audit", (dir / "data" / "dataset.json").string(),
                                      "--features", "frame_len,net_src", "--k", "5",
                                      "--repeats", "2", "--seed", "3"};
  auto a = base, b = base;
  a.insert(a.end(), {"--out", (dir / "a").string()});
  b.insert(b.end(), {"--out", (dir / "b").string(), "--threads", "2"});
  ASSERT_EQ(run(a), kExitOk);
  ASSERT_EQ(run(b), kExitOk);
  for (const char* f : {"metrics.csv", "histograms.csv", "trees/frame_len.dot", "audit.txt"})
    EXPECT_TRUE(std::filesystem::exists(dir / "a" / f)) << f;
  const auto report = nlohmann::json::parse(slurp(dir / "a" / "audit.json"));
  EXPECT_EQ(report["run_config"]["command"], "audit");
  std::map<std::string, std::string> verdicts;
  for (const auto& v : report["features"]) verdicts[v["feature"]] = v["verdict"];
  EXPECT_EQ(verdicts["frame_len"], "low_complexity_shortcut");
  EXPECT_EQ(verdicts["net_src"], "leaky_identifier");
  // Rerun with identical config is byte-identical.
  auto c = a;
  c.back() = (dir / "c").string();
  ASSERT_EQ(run(c), kExitOk);
  for (const char* f : {"metrics.csv", "histograms.csv", "trees/frame_len.dot", "audit.txt"})
    EXPECT_EQ(slurp(dir / "a" / f).substr(slurp(dir / "a" / f).find('\n')),
              slurp(dir / "c" / f).substr(slurp(dir / "c" / f).find('\n')))
        << f;
  auto ja = report, jc = nlohmann::json::parse(slurp(dir / "c" / "audit.json"));
  ja.erase("run_config");
  jc.erase("run_config");
  EXPECT_EQ(ja.dump(), jc.dump());
  auto jb = nlohmann::json::parse(slurp(dir / "b" / "audit.json"));
  jb.erase("run_config");
  jb["config"].erase("threads");
  ja["config"].erase("threads");
  EXPECT_EQ(ja.dump(), jb.dump());
}

TEST(Cli, RerunWithEmbeddedConfigIsByteIdentical) {
  const auto dir = scratch_dir("cli_rerun");
  ASSERT_EQ(run({"synth", scenario("syn_flood_pair"), "--out", (dir / "data").string()}), kExitOk);
  const std::vector<std::string> args{"complexity", (dir / "data" / "dataset.json").string(),
                                      "--features", "frame_len,ttl", "--out",
                                      (dir / "o").string()};
  ASSERT_EQ(run(args), kExitOk);
  const auto first = slurp(dir / "o" / "complexity.json");
  ASSERT_EQ(run(args), kExitOk);
  EXPECT_EQ(slurp(dir / "o" / "complexity.json"), first);
}

TEST(Cli, SingleSessionAuditIsPrecondition) {
  const auto dir = scratch_dir("cli_single");
  ASSERT_EQ(run({"synth", scenario("http_flood"), "--out", dir.string()}), kExitOk);
  ::testing::internal::CaptureStderr();
  EXPECT_EQ(run({"audit", (dir / "dataset.json").string(), "--out", (dir / "o").string()}),
            kExitPrecondition);
  const auto err = ::testing::internal::GetCapturedStderr();
  EXPECT_NE(err.find("session-isolated"), std::string::npos);
}

TEST(Cli, ProbeOnSingleClassIsPrecondition) {
  const auto dir = scratch_dir("cli_probe");
  write_text_file(dir / "t.csv", "frame_len\n60\n61\n62\n63\n");
  write_text_file(dir / "m.json",
                  R"({"entries":[{"path":"t.csv","label_rule":{"type":"by_column","labels":["benign","benign","benign","benign"]}}]})");
  EXPECT_EQ(run({"probe", (dir / "m.json").string(), "--out", (dir / "o").string()}),
            kExitPrecondition);
}

TEST(Cli, ProbeAndComplexityOutputs) {
  const auto dir = scratch_dir("cli_probe2");
  ASSERT_EQ(run({"synth", scenario("telnet_pair"), "--out", (dir / "data").string()}), kExitOk);
  const auto manifest = (dir / "data" / "dataset.json").string();
  ASSERT_EQ(run({"probe", manifest, "--feature", "dst_port", "--split", "isolated", "--out",
                 (dir / "p").string()}),
            kExitOk);
  EXPECT_NE(slurp(dir / "p" / "tree.dot").find("dst_port"), std::string::npos);
  ASSERT_EQ(run({"complexity", manifest, "--features", "dst_port", "--out", (dir / "c").string()}),
            kExitOk);
  const auto j = nlohmann::json::parse(slurp(dir / "c" / "complexity.json"));
  EXPECT_LT(j["per_feature"]["dst_port"]["aggregate"].get<double>(), 45.0);
  EXPECT_EQ(run({"probe", manifest, "--split", "bogus", "--out", (dir / "q").string()}), kExitInput);
}

TEST(Cli, SweepWritesRows) {
  const auto dir = scratch_dir("cli_sweep");
  ASSERT_EQ(run({"sweep", scenario("sweep_udp"), "--points", "3", "--k", "3", "--repeats", "1",
                 "--max-samples", "300", "--out", dir.string()}),
            kExitOk);
  const auto table = parse_csv_table(slurp(dir / "sweep.csv"));
  EXPECT_EQ(table.rows.size(), 3u);
  const auto j = nlohmann::json::parse(slurp(dir / "sweep.json"));
  EXPECT_TRUE(j["correlation"].contains("spearman"));
}
