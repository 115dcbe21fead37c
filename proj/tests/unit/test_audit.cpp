#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "fixtures.hpp"
#include "ipfaudit/audit.hpp"
#include "ipfaudit/errors.hpp"
#include "ipfaudit/synth.hpp"

using namespace ipfaudit;
using ipfaudit::testing::load_scenario;

namespace {

AuditConfig quick_config() {
  AuditConfig c;
  c.k = 5;
  c.repeats = 2;
  c.seed = 1;
  return c;
}

// Average-rank Spearman written out longhand.
double naive_spearman(const std::vector<std::pair<double, double>>& pairs) {
  auto ranks = [&](bool first) {
    std::vector<double> r(pairs.size());
    for (std::size_t i = 0; i < pairs.size(); ++i) {
      const double v = first ? pairs[i].first : pairs[i].second;
      double below = 0, equal = 0;
      for (const auto& p : pairs) {
        const double w = first ? p.first : p.second;
        below += w < v;
        equal += w == v;
      }
      r[i] = below + (equal + 1) / 2;
    }
    return r;
  };
  const auto a = ranks(true), b = ranks(false);
  const double n = static_cast<double>(pairs.size());
  double ma = 0, mb = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    ma += a[i] / n;
    mb += b[i] / n;
  }
  double sab = 0, saa = 0, sbb = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    sab += (a[i] - ma) * (b[i] - mb);
    saa += (a[i] - ma) * (a[i] - ma);
    sbb += (b[i] - mb) * (b[i] - mb);
  }
  return saa == 0 || sbb == 0 ? 0.0 : sab / std::sqrt(saa * sbb);
}

}  // namespace

TEST(ClassifyVerdict, Examples) {
  EXPECT_EQ(classify_verdict(0.99, 0.40, 0.59, 60, IdentifierClass::session_identifier),
            Verdict::leaky_identifier);
  EXPECT_EQ(classify_verdict(0.99, 0.99, 0.00, 10, IdentifierClass::content),
            Verdict::low_complexity_shortcut);
  EXPECT_EQ(classify_verdict(0.50, 0.50, 0.00, 80, IdentifierClass::content),
            Verdict::uninformative);
  EXPECT_EQ(classify_verdict(0.95, 0.93, 0.02, 50, IdentifierClass::content),
            Verdict::consistent);
}

TEST(ClassifyVerdict, ThresholdsAreConfigurable) {
  VerdictThresholds t{0.8, 0.1, 20};
  EXPECT_EQ(classify_verdict(0.85, 0.72, 0.13, 10, IdentifierClass::content, t),
            Verdict::leaky_identifier);
  EXPECT_EQ(classify_verdict(0.85, 0.85, 0.0, 25, IdentifierClass::content, t),
            Verdict::consistent);
}

TEST(Correlate, Examples) {
  const std::vector<std::pair<double, double>> mono{{10, 0.99}, {50, 0.70}, {90, 0.40}};
  const auto c = correlate_complexity(mono);
  EXPECT_DOUBLE_EQ(c.spearman, -1.0);
  EXPECT_EQ(c.below_count, 1u);
  EXPECT_EQ(c.above_count, 2u);
  EXPECT_DOUBLE_EQ(*c.below_mean_f1, 0.99);
  EXPECT_DOUBLE_EQ(*c.above_mean_f1, 0.55);
  const std::vector<std::pair<double, double>> flat{{10, 0.5}, {50, 0.5}, {90, 0.5}};
  EXPECT_EQ(correlate_complexity(flat).spearman, 0.0);
  EXPECT_FALSE(correlate_complexity(flat, 5).below_mean_f1);
  const std::vector<std::pair<double, double>> two{{1, 1}, {2, 2}};
  EXPECT_THROW(correlate_complexity(two), PreconditionError);
}

TEST(Correlate, MatchesNaiveOracleWithTies) {
  Rng rng(44);
  for (int t = 0; t < 300; ++t) {
    std::vector<std::pair<double, double>> pairs(3 + rng.below(15));
    for (auto& p : pairs) p = {static_cast<double>(rng.below(6)), static_cast<double>(rng.below(4))};
    EXPECT_NEAR(correlate_complexity(pairs).spearman, naive_spearman(pairs), 1e-12);
  }
}

TEST(AuditFeature, IdentifierFixtureIsLeaky) {
  const auto spec = load_scenario("syn_flood_pair");
  const auto [a, b] = generate_pair(spec, spec.pair->similarity, spec.pair->seed);
  const auto v = audit_feature(a.dataset, b.dataset, "net_src", quick_config());
  EXPECT_EQ(v.verdict, Verdict::leaky_identifier);
  EXPECT_EQ(v.identifier_class, IdentifierClass::host_identifier);
  EXPECT_GE(v.generalisation_gap, 0.2);
  EXPECT_NEAR(v.generalisation_gap, v.cv.mean.f1_macro - v.isolated.mean.f1_macro, 1e-12);
}

TEST(AuditFeature, TelnetPortIsShortcut) {
  const auto spec = load_scenario("telnet_pair");
  const auto [a, b] = generate_pair(spec, spec.pair->similarity, spec.pair->seed);
  const auto v = audit_feature(a.dataset, b.dataset, "dst_port", quick_config());
  EXPECT_EQ(v.verdict, Verdict::low_complexity_shortcut);
}

TEST(AuditFeature, NoiseIsUninformative) {
  Rng rng(10);
  auto noisy = [&](std::uint32_t session) {
    std::vector<PacketRecord> recs(300);
    std::vector<Label> y(300);
    for (std::size_t i = 0; i < recs.size(); ++i) {
      recs[i].frame_len = static_cast<std::uint32_t>(rng.between(60, 1514));
      y[i] = rng.below(2) ? Label::malicious : Label::benign;
    }
    return LabeledDataset(recs, y, std::vector<SessionId>(300, SessionId{session}));
  };
  const auto v = audit_feature(noisy(0), noisy(1), "frame_len", quick_config());
  EXPECT_EQ(v.verdict, Verdict::uninformative);
  EXPECT_NEAR(v.isolated.mean.f1_macro, 0.5, 0.1);
}

TEST(AuditFeature, DuplicatedSessionsAreNeverLeaky) {
  for (const char* name : {"udp_flood_pair", "syn_flood_pair"}) {
    const auto spec = load_scenario(name);
    const auto g = generate(spec);
    auto twin_records = g.dataset.records();
    const LabeledDataset twin(twin_records, g.dataset.labels(),
                              std::vector<SessionId>(twin_records.size(), SessionId{1}));
    for (const char* feature : {"net_src", "frame_len", "src_port", "ip_id"}) {
      const auto v = audit_feature(g.dataset, twin, feature, quick_config());
      EXPECT_NE(v.verdict, Verdict::leaky_identifier) << name << " " << feature;
      EXPECT_LE(v.generalisation_gap, 0.2) << name << " " << feature;
    }
  }
}

TEST(AuditFeature, VerdictInvariantUnderIncreasingRescaling) {
  const auto spec = load_scenario("udp_flood_pair");
  const auto [a, b] = generate_pair(spec, 1.0, spec.pair->seed);
  auto rescale = [](const LabeledDataset& d) {
    auto recs = d.records();
    for (auto& r : recs) {
      r.frame_len = *r.frame_len * 3 + 7;
      r.ttl = static_cast<std::uint8_t>(*r.ttl / 2 + 100);
    }
    return LabeledDataset(recs, d.labels(), d.sessions());
  };
  for (const char* feature : {"frame_len", "ttl"}) {
    const auto v1 = audit_feature(a.dataset, b.dataset, feature, quick_config());
    const auto v2 = audit_feature(rescale(a.dataset), rescale(b.dataset), feature, quick_config());
    EXPECT_EQ(v1.verdict, v2.verdict) << feature;
  }
}

TEST(AuditFeature, Preconditions) {
  const auto spec = load_scenario("udp_flood_pair");
  const auto g = generate(spec);
  std::vector<Label> benign(g.dataset.size(), Label::benign);
  const LabeledDataset one_class(g.dataset.records(), benign,
                                 std::vector<SessionId>(benign.size(), SessionId{1}));
  EXPECT_THROW(audit_feature(g.dataset, one_class, "frame_len", quick_config()),
               PreconditionError);
}

TEST(RunAudit, DeterministicAndOrdered) {
  const auto spec = load_scenario("udp_flood_pair");
  const auto [a, b] = generate_pair(spec, 1.0, spec.pair->seed);
  auto cfg = quick_config();
  cfg.features = {"ttl", "frame_len", "net_src"};
  const auto r1 = run_audit(a.dataset, b.dataset, cfg, "udp");
  cfg.threads = 3;
  const auto r2 = run_audit(a.dataset, b.dataset, cfg, "udp");
  ASSERT_EQ(r1.features.size(), 3u);
  // catalogue order regardless of request order
  EXPECT_EQ(r1.features[0].feature, "frame_len");
  EXPECT_EQ(r1.features[1].feature, "net_src");
  EXPECT_EQ(r1.features[2].feature, "ttl");
  auto j1 = to_json(r1), j2 = to_json(r2);
  j1["config"].erase("threads");
  j2["config"].erase("threads");
  EXPECT_EQ(j1.dump(), j2.dump());
  EXPECT_EQ(j1["schema_version"], kAuditSchemaVersion);
  EXPECT_EQ(r1.isolated_leakage_findings, 0u);
  EXPECT_GT(r1.cv_leakage_findings, 0u);
  ASSERT_TRUE(r1.correlation.has_value());
  for (const auto& v : r1.features) {
    EXPECT_GE(v.generalisation_gap, -1.0);
    EXPECT_LE(v.generalisation_gap, 1.0);
  }
  const auto table = audit_table(r1);
  EXPECT_NE(table.find("low_complexity_shortcut"), std::string::npos);
  const auto csv = audit_metrics_csv(r1);
  EXPECT_NE(csv.find("frame_len,isolated,1,"), std::string::npos);
}

TEST(Histograms, ExactAndBinnedRows) {
  std::vector<PacketRecord> recs(200);
  std::vector<Label> y(200);
  for (std::size_t i = 0; i < recs.size(); ++i) {
    recs[i].dst_port = i % 2 ? 23 : 80;
    recs[i].frame_len = static_cast<std::uint32_t>(60 + i);
    y[i] = i % 2 ? Label::malicious : Label::benign;
  }
  const LabeledDataset d(recs, y, std::vector<SessionId>(200, SessionId{4}));
  const std::vector<std::string> f{"dst_port", "frame_len"};
  const auto csv = histograms_csv(d, f, 8, 64);
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "feature,session,label,bin_lo,bin_hi,count");
  EXPECT_NE(csv.find("dst_port,4,malicious,23,23,100"), std::string::npos);
  std::size_t frame_rows = 0, total = 0;
  std::istringstream in(csv);
  for (std::string line; std::getline(in, line);)
    if (line.rfind("frame_len,", 0) == 0) {
      ++frame_rows;
      total += std::stoul(line.substr(line.rfind(',') + 1));
    }
  EXPECT_LE(frame_rows, 16u);
  EXPECT_EQ(total, 200u);
}
