#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "ipfaudit/dataset.hpp"
#include "ipfaudit/packet.hpp"

namespace ipfaudit {

enum class MeasureCategory { feature, linearity, neighborhood, network, dimensionality, imbalance };
std::string_view to_string(MeasureCategory c) noexcept;

inline constexpr std::size_t kMeasureCount = 22;
inline constexpr std::size_t kCategoryCount = 6;

struct MeasureInfo {
  std::string_view name;
  MeasureCategory category;
};

// The 22 measures in report order:
// F1 F1v F2 F3 F4 | L1 L2 L3 | N1 N2 N3 N4 T1 LSC | Density ClsCoef Hubs |
// T2 T3 T4 | C1 C2
std::span<const MeasureInfo> measures() noexcept;
std::optional<std::size_t> find_measure(std::string_view name) noexcept;

struct ComplexityOptions {
  double epsilon = 0.15;        // network graph radius, fraction of max distance
  double pca_variance = 0.95;   // explained-variance target for T3/T4
  double svm_lambda = 1.0;      // L2 regularisation of the linear classifier
  std::size_t svm_iterations = 2000;
  std::uint64_t seed = 0;       // interpolated points for L3/N4; subsampling
  // When set and exceeded, measures run on a stratified subsample.
  std::optional<std::size_t> max_samples;

  bool operator==(const ComplexityOptions&) const = default;
};

struct ComplexityReport {
  std::array<double, kMeasureCount> scores{};
  std::array<double, kCategoryCount> category_means{};
  double aggregate = 0.0;  // 100 x mean of the 22 scores
  std::size_t samples = 0;  // after subsampling
  std::size_t features = 0;

  double score(std::string_view name) const;
  double category_mean(MeasureCategory c) const noexcept {
    return category_means[static_cast<std::size_t>(c)];
  }
};

// Every measure lies in [0,1], higher meaning harder. Features are
// standardised (z-scores, population deviation; constant features become
// zero) before any distance is taken.
//
// Throws PreconditionError when a class is missing, when there are no
// features, or (neighbourhood and network measures) when a class has fewer
// than two samples. Unknown names throw SchemaError.
double compute_measure(std::string_view name, const FeatureMatrix& x,
                       std::span<const Label> y, const ComplexityOptions& options = {});

ComplexityReport compute_report(const FeatureMatrix& x, std::span<const Label> y,
                                const ComplexityOptions& options = {});

// Ascending indices of a class-proportional sample of at most max_samples
// rows (at least two per class where available).
std::vector<std::size_t> stratified_subsample(std::span<const Label> y,
                                              std::size_t max_samples,
                                              std::uint64_t seed);

nlohmann::json to_json(const ComplexityReport& r);

// "F1,...,C2,feature,linearity,...,imbalance,aggregate"
std::string complexity_csv_header();
std::string complexity_csv_row(const ComplexityReport& r);

}  // namespace ipfaudit
