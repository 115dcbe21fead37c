#include <gtest/gtest.h>

#include <cmath>

#include "complexity_reference.hpp"
#include "fixtures.hpp"
#include "ipfaudit/complexity.hpp"
#include "ipfaudit/errors.hpp"

using namespace ipfaudit;
using ipfaudit::testing::matrix_of;

namespace {
constexpr Label B = Label::benign;
constexpr Label M = Label::malicious;

using Rows = std::vector<std::vector<double>>;

Rows one_d(const std::vector<double>& v) {
  Rows r;
  for (double x : v) r.push_back({x});
  return r;
}

std::vector<Label> flip(std::vector<Label> v) {
  for (auto& l : v) l = l == B ? M : B;
  return v;
}

void expect_matches_reference(const Rows& rows, const std::vector<Label>& y,
                              const ComplexityOptions& opt = {}) {
  const auto ref = ipfaudit::testing::reference_measures(rows, y, opt);
  const auto rep = compute_report(matrix_of(rows), y, opt);
  for (const auto& info : measures()) {
    const std::string name(info.name);
    if (name == "Hubs" && ref.hub_eigen_gap < 1e-3) continue;
    EXPECT_NEAR(rep.score(name), ref.scores.at(name), name == "Hubs" ? 1e-6 : 1e-9) << name;
  }
}
}  // namespace

TEST(Complexity, CatalogueShape) {
  ASSERT_EQ(measures().size(), 22u);
  std::array<int, kCategoryCount> per{};
  for (const auto& m : measures()) ++per[static_cast<std::size_t>(m.category)];
  EXPECT_EQ(per, (std::array<int, kCategoryCount>{5, 3, 6, 3, 3, 2}));
  EXPECT_EQ(find_measure("LSC"), 13u);
  EXPECT_FALSE(find_measure("F9"));
}

TEST(Complexity, C2BalancedIsZero) {
  const auto x = matrix_of(one_d({1, 2, 3, 4}));
  EXPECT_EQ(compute_measure("C2", x, std::vector<Label>{B, M, B, M}), 0.0);
  EXPECT_EQ(compute_measure("C1", x, std::vector<Label>{B, M, B, M}), 0.0);
}

TEST(Complexity, N3SeparatedClusters) {
  const auto x = matrix_of(one_d({0, 1, 2, 10, 11, 12}));
  const std::vector<Label> y{B, B, B, M, M, M};
  EXPECT_EQ(compute_measure("N3", x, y), 0.0);
}

TEST(Complexity, N1InterleavedLine) {
  const auto x = matrix_of(one_d({0, 2, 4, 1, 3, 5}));
  const std::vector<Label> y{B, B, B, M, M, M};
  EXPECT_EQ(compute_measure("N1", x, y), 1.0);
}

TEST(Complexity, SeparatedClustersAreSubCritical) {
  Rows rows;
  std::vector<Label> y;
  Rng rng(3);
  for (int i = 0; i < 40; ++i) {
    rows.push_back({rng.unit()});
    y.push_back(B);
    rows.push_back({100 + rng.unit()});
    y.push_back(M);
  }
  EXPECT_LT(compute_report(matrix_of(rows), y).aggregate, 45.0);
}

TEST(Complexity, IdenticalValuesAreMaximallyHard) {
  const auto x = matrix_of(one_d(std::vector<double>(10, 7.0)));
  const std::vector<Label> y{B, B, B, B, B, M, M, M, M, M};
  const auto r = compute_report(x, y);
  EXPECT_EQ(r.score("F3"), 1.0);
  EXPECT_EQ(r.score("F1"), 1.0);
  // All distances zero: lowest index wins, so every point's neighbour is
  // index 0 or 1 (benign) and the malicious half is wrong.
  EXPECT_DOUBLE_EQ(r.score("N3"), 0.5);
}

TEST(Complexity, MatchesReferenceOnFixedThirtyPoints) {
  Rng rng(30);
  Rows rows;
  std::vector<Label> y;
  for (int i = 0; i < 30; ++i) {
    const bool m = i % 3 == 0;
    rows.push_back({(m ? 3.0 : 0.0) + 2.0 * rng.unit()});
    y.push_back(m ? M : B);
  }
  expect_matches_reference(rows, y);
}

TEST(Complexity, MatchesReferenceOnRandomMultiFeature) {
  Rng rng(77);
  for (int t = 0; t < 40; ++t) {
    const std::size_t n = 6 + rng.below(30), m = 1 + rng.below(4);
    Rows rows(n, std::vector<double>(m));
    for (auto& r : rows)
      for (auto& v : r) v = rng.below(3) ? rng.unit() * 10 : static_cast<double>(rng.below(4));
    ComplexityOptions opt;
    opt.seed = rng.next();
    expect_matches_reference(rows, ipfaudit::testing::random_labels(rng, n, 2), opt);
  }
}

TEST(Complexity, ScaleInvariance) {
  Rng rng(5);
  for (int t = 0; t < 30; ++t) {
    const std::size_t n = 6 + rng.below(20), m = 1 + rng.below(3);
    Rows rows(n, std::vector<double>(m));
    for (auto& r : rows)
      for (auto& v : r) v = rng.unit();
    Rows scaled = rows;
    for (auto& r : scaled)
      for (std::size_t j = 0; j < m; ++j) r[j] *= static_cast<double>(j + 2) * 13.0;
    const auto y = ipfaudit::testing::random_labels(rng, n, 2);
    const auto a = compute_report(matrix_of(rows), y);
    const auto b = compute_report(matrix_of(scaled), y);
    for (const char* name : {"N1", "N2", "N3", "T1", "LSC", "Density", "ClsCoef", "Hubs"})
      EXPECT_NEAR(a.score(name), b.score(name), 1e-9) << name;
  }
}

TEST(Complexity, LabelPermutationSymmetry) {
  Rng rng(6);
  for (int t = 0; t < 30; ++t) {
    const std::size_t n = 6 + rng.below(20), m = 1 + rng.below(3);
    Rows rows(n, std::vector<double>(m));
    for (auto& r : rows)
      for (auto& v : r) v = rng.unit();
    const auto y = ipfaudit::testing::random_labels(rng, n, 2);
    const auto a = compute_report(matrix_of(rows), y);
    const auto b = compute_report(matrix_of(rows), flip(y));
    for (std::size_t i = 0; i < kMeasureCount; ++i)
      EXPECT_NEAR(a.scores[i], b.scores[i], 1e-9) << measures()[i].name;
  }
}

TEST(Complexity, InterleavingDoesNotDecreaseN1OrN3) {
  // 2k points on a line; swap labels inward step by step from separated
  // (BBBB MMMM) to alternating (BMBM BMBM).
  const std::size_t k = 6;
  Rows rows;
  for (std::size_t i = 0; i < 2 * k; ++i) rows.push_back({static_cast<double>(i)});
  std::vector<Label> separated(2 * k, B), alternating(2 * k, B);
  for (std::size_t i = k; i < 2 * k; ++i) separated[i] = M;
  for (std::size_t i = 1; i < 2 * k; i += 2) alternating[i] = M;
  const auto x = matrix_of(rows);
  EXPECT_LE(compute_measure("N1", x, separated), compute_measure("N1", x, alternating));
  EXPECT_LE(compute_measure("N3", x, separated), compute_measure("N3", x, alternating));
}

TEST(Complexity, Preconditions) {
  const auto x = matrix_of(one_d({1, 2, 3}));
  EXPECT_THROW(compute_report(x, std::vector<Label>{B, B, B}), PreconditionError);
  EXPECT_THROW(compute_report(x, std::vector<Label>{B, B, M}), PreconditionError);
  EXPECT_NO_THROW(compute_measure("F1", x, std::vector<Label>{B, B, M}));
  EXPECT_THROW(compute_measure("Q9", x, std::vector<Label>{B, B, M}), SchemaError);
  FeatureMatrix none({}, 3);
  EXPECT_THROW(compute_measure("F1", none, std::vector<Label>{B, B, M}), PreconditionError);
}

TEST(Complexity, SubsampleIsStratifiedAndDeterministic) {
  std::vector<Label> y(1000, B);
  for (std::size_t i = 0; i < 100; ++i) y[i * 10] = M;
  const auto a = stratified_subsample(y, 200, 4);
  EXPECT_EQ(a, stratified_subsample(y, 200, 4));
  EXPECT_EQ(a.size(), 200u);
  std::size_t mal = 0;
  for (auto i : a) mal += y[i] == M;
  EXPECT_EQ(mal, 20u);
  EXPECT_TRUE(std::is_sorted(a.begin(), a.end()));
}

TEST(Complexity, ReportAggregateAndCsv) {
  Rng rng(2);
  Rows rows(20, std::vector<double>(2));
  for (auto& r : rows)
    for (auto& v : r) v = rng.unit();
  const auto y = ipfaudit::testing::random_labels(rng, 20, 3);
  const auto r = compute_report(matrix_of(rows), y);
  double mean = 0;
  for (double s : r.scores) mean += s;
  EXPECT_NEAR(r.aggregate, 100 * mean / 22, 1e-9);
  EXPECT_EQ(r.samples, 20u);
  const auto j = to_json(r);
  EXPECT_EQ(j["measures"].size(), 22u);
  EXPECT_EQ(j["categories"].size(), 6u);
  std::size_t commas = 0;
  for (char c : complexity_csv_row(r)) commas += c == ',';
  EXPECT_EQ(commas, 22u + 6u);
  EXPECT_EQ(complexity_csv_header().substr(0, 7), "F1,F1v,");
}
