#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string_view>

#include <nlohmann/json.hpp>

#include "ipfaudit/dataset.hpp"

namespace ipfaudit {

// Binary confusion counts; malicious is the positive class.
struct Confusion {
  std::uint64_t tp = 0;
  std::uint64_t fn = 0;
  std::uint64_t fp = 0;
  std::uint64_t tn = 0;

  std::uint64_t total() const noexcept { return tp + fn + fp + tn; }
  bool operator==(const Confusion&) const = default;
};

struct Metrics {
  double accuracy = 0.0;
  double precision_macro = 0.0;
  double recall_macro = 0.0;
  double f1_macro = 0.0;
  double kappa = 0.0;

  bool operator==(const Metrics&) const = default;
};

// Column order of the metric tables.
inline constexpr std::array<std::string_view, 5> kMetricNames{
    "Accuracy", "Precision", "Recall", "F1", "Kappa"};

double metric_value(const Metrics& m, std::size_t index) noexcept;

// Throws PreconditionError for unequal lengths.
Confusion confusion(std::span<const Label> predicted, std::span<const Label> actual);

// Macro averages run over the classes that occur in either vector; a class
// that is never predicted contributes precision 0 and F1 0. Kappa is 0 when
// chance agreement is 1. Throws PreconditionError for an empty confusion.
Metrics metrics_from_confusion(const Confusion& c);

Metrics evaluate(std::span<const Label> predicted, std::span<const Label> actual);

nlohmann::json to_json(const Confusion& c);
nlohmann::json to_json(const Metrics& m);

}  // namespace ipfaudit
