#pragma once

#include <cstdint>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "ipfaudit/complexity.hpp"
#include "ipfaudit/dataset.hpp"
#include "ipfaudit/probe.hpp"

namespace ipfaudit {

inline constexpr int kAuditSchemaVersion = 1;

enum class Verdict { leaky_identifier, low_complexity_shortcut, consistent, uninformative };
std::string_view to_string(Verdict v) noexcept;

struct VerdictThresholds {
  double high = 0.90;
  double gap = 0.20;
  double critical_complexity = 45.0;

  bool operator==(const VerdictThresholds&) const = default;
};

struct AuditConfig {
  std::uint32_t k = 10;
  std::uint32_t repeats = 10;
  std::uint64_t seed = 0;
  VerdictThresholds thresholds;
  TreeParams tree;
  ComplexityOptions complexity{.max_samples = 2000};
  unsigned threads = 1;
  // Empty means the whole catalogue.
  std::vector<std::string> features;
};

// Rules in order: (1) cv >= high and gap >= gap -> leaky_identifier;
// (2) cv, iso >= high and complexity < critical -> low_complexity_shortcut;
// (3) cv, iso >= high -> consistent; (4) uninformative. The identifier
// class is informational only.
Verdict classify_verdict(double cv_f1, double iso_f1, double gap, double complexity_1d,
                         IdentifierClass identifier_class,
                         const VerdictThresholds& thresholds = {});

struct FeatureVerdict {
  std::string feature;
  IdentifierClass identifier_class = IdentifierClass::content;
  ProbeResult cv;
  ProbeResult isolated;
  ComplexityReport complexity;
  double complexity_1d = 0.0;  // complexity.aggregate
  double generalisation_gap = 0.0;
  Verdict verdict = Verdict::uninformative;
};

struct Correlation {
  double spearman = 0.0;
  std::size_t below_count = 0;
  std::size_t above_count = 0;
  std::optional<double> below_mean_f1;  // scores < critical
  std::optional<double> above_mean_f1;  // scores >= critical
};

// Spearman rank correlation of (complexity, f1) pairs with average ranks
// for ties; 0 when either side has no rank variance. Throws
// PreconditionError for fewer than three pairs.
Correlation correlate_complexity(std::span<const std::pair<double, double>> pairs,
                                 double critical = 45.0);

struct AuditReport {
  std::string description;
  AuditConfig config;
  std::vector<SessionId> train_sessions;
  std::vector<SessionId> test_sessions;
  std::size_t records = 0;
  std::size_t cv_leakage_findings = 0;        // over the first cv plan
  std::size_t isolated_leakage_findings = 0;
  std::vector<FeatureVerdict> features;       // catalogue order
  std::optional<Correlation> correlation;     // over (complexity, isolated f1)
};

// The merged dataset and the train/test partition an audit runs on.
struct AuditInput {
  LabeledDataset merged;
  std::set<SessionId> train_sessions;
  std::set<SessionId> test_sessions;
};

// Merges two session datasets (renumbering on id clashes); the first
// supplies the training sessions.
AuditInput make_audit_input(const LabeledDataset& train, const LabeledDataset& test);

// Throws PreconditionError when either side is empty or lacks a class.
FeatureVerdict audit_feature(const LabeledDataset& train_session,
                             const LabeledDataset& test_session,
                             const std::string& feature, const AuditConfig& config);

AuditReport run_audit(const AuditInput& input, const AuditConfig& config,
                      std::string description = {});
AuditReport run_audit(const LabeledDataset& train_session,
                      const LabeledDataset& test_session, const AuditConfig& config,
                      std::string description = {});

nlohmann::json to_json(const AuditConfig& c);
nlohmann::json to_json(const Correlation& c);
nlohmann::json to_json(const FeatureVerdict& v);
nlohmann::json to_json(const AuditReport& r);

// Fixed-width text table, one row per feature.
std::string audit_table(const AuditReport& r);

// "feature,regime,plans,Accuracy,Accuracy_std,..." rows for cv and isolated.
std::string audit_metrics_csv(const AuditReport& r);

// Per-feature value histograms by session and class:
// "feature,session,label,bin_lo,bin_hi,count". Features with at most
// `exact_limit` distinct values get one row per value.
std::string histograms_csv(const LabeledDataset& dataset,
                           std::span<const std::string> features,
                           std::size_t bins = 32, std::size_t exact_limit = 64);

}  // namespace ipfaudit
