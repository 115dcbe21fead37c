#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "ipfaudit/dataset.hpp"
#include "ipfaudit/metrics.hpp"
#include "ipfaudit/split.hpp"
#include "ipfaudit/tree.hpp"

namespace ipfaudit {

struct ProbeOptions {
  TreeParams tree;
  // Worker threads for plan evaluation; 0 picks the hardware concurrency.
  // Results do not depend on this value.
  unsigned threads = 1;
};

struct ProbeResult {
  std::vector<std::string> features;
  std::string provenance;
  std::vector<Metrics> per_plan;
  Metrics mean;
  Metrics stddev;  // population standard deviation
  DecisionTree first_tree;  // fitted on the first plan's training side
};

// Mean and population standard deviation of each metric, in plan order.
void summarise(std::span<const Metrics> per_plan, Metrics& mean, Metrics& stddev);

// Fits on each plan's training rows and scores its test rows. Throws
// PreconditionError for no plans, an empty side or an out-of-range index.
// A single-class training side yields a single-leaf tree.
ProbeResult run_probe(const FeatureMatrix& x, std::span<const Label> y,
                      std::span<const SplitPlan> plans,
                      const ProbeOptions& options = {});

// Projects the dataset onto the named features once, so categorical codes
// agree between training and test rows.
ProbeResult run_probe(const LabeledDataset& dataset,
                      std::span<const std::string> features,
                      std::span<const SplitPlan> plans,
                      const ProbeOptions& options = {});
ProbeResult run_probe(const LabeledDataset& dataset, const std::string& feature,
                      std::span<const SplitPlan> plans,
                      const ProbeOptions& options = {});

std::string summarise_provenance(std::span<const SplitPlan> plans);

nlohmann::json to_json(const ProbeResult& r);

// "feature,regime,plans,Accuracy,Accuracy_std,...,Kappa,Kappa_std"
std::string probe_csv_header();
std::string probe_csv_row(const ProbeResult& r, std::string_view regime);

}  // namespace ipfaudit
