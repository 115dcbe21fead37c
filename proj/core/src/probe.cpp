#include "ipfaudit/probe.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <thread>

#include "ipfaudit/errors.hpp"

namespace ipfaudit {
namespace {

double& field(Metrics& m, std::size_t i) {
  switch (i) {
    case 0: return m.accuracy;
    case 1: return m.precision_macro;
    case 2: return m.recall_macro;
    case 3: return m.f1_macro;
    default: return m.kappa;
  }
}

std::string join(std::span<const std::string> parts, char sep) {
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i) out += sep;
    out += parts[i];
  }
  return out;
}

void check_plan(const SplitPlan& plan, std::size_t rows, std::size_t index) {
  const std::string where = "plan " + std::to_string(index);
  if (plan.train_idx.empty()) throw PreconditionError(where + ": empty training side");
  if (plan.test_idx.empty()) throw PreconditionError(where + ": empty test side");
  for (auto idx : {&plan.train_idx, &plan.test_idx})
    for (std::size_t i : *idx)
      if (i >= rows)
        throw PreconditionError(where + ": index " + std::to_string(i) +
                                " out of range for " + std::to_string(rows) + " rows");
}

}  // namespace

void summarise(std::span<const Metrics> per_plan, Metrics& mean, Metrics& stddev) {
  mean = {};
  stddev = {};
  if (per_plan.empty()) return;
  const double n = static_cast<double>(per_plan.size());
  for (std::size_t k = 0; k < kMetricNames.size(); ++k) {
    double sum = 0.0;
    for (const Metrics& m : per_plan) sum += metric_value(m, k);
    const double mu = sum / n;
    double sq = 0.0;
    for (const Metrics& m : per_plan) {
      const double d = metric_value(m, k) - mu;
      sq += d * d;
    }
    field(mean, k) = mu;
    field(stddev, k) = std::sqrt(sq / n);
  }
}

std::string summarise_provenance(std::span<const SplitPlan> plans) {
  if (plans.empty()) return "no plans";
  if (plans.size() == 1) return describe(plans.front().provenance);
  const auto* first = std::get_if<CvFoldProvenance>(&plans.front().provenance);
  if (first) {
    std::uint32_t repeats = 0;
    bool uniform = true;
    for (const auto& p : plans) {
      const auto* cv = std::get_if<CvFoldProvenance>(&p.provenance);
      if (!cv || cv->folds != first->folds || cv->seed != first->seed) {
        uniform = false;
        break;
      }
      repeats = std::max(repeats, cv->repeat + 1);
    }
    if (uniform)
      return "stratified " + std::to_string(repeats) + "x" + std::to_string(first->folds) +
             "-fold cv, seed " + std::to_string(first->seed);
  }
  return std::to_string(plans.size()) + " plans";
}

ProbeResult run_probe(const FeatureMatrix& x, std::span<const Label> y,
                      std::span<const SplitPlan> plans, const ProbeOptions& options) {
  if (y.size() != x.rows())
    throw PreconditionError("probe: " + std::to_string(x.rows()) + " rows but " +
                            std::to_string(y.size()) + " labels");
  if (plans.empty()) throw PreconditionError("probe: no split plans");
  for (std::size_t i = 0; i < plans.size(); ++i) check_plan(plans[i], x.rows(), i);

  ProbeResult result;
  result.features = x.columns();
  result.provenance = summarise_provenance(plans);
  result.per_plan.resize(plans.size());

  auto run_one = [&](std::size_t i) {
    const SplitPlan& plan = plans[i];
    const FeatureMatrix train = x.select_rows(plan.train_idx);
    const FeatureMatrix test = x.select_rows(plan.test_idx);
    std::vector<Label> train_y, test_y;
    train_y.reserve(plan.train_idx.size());
    test_y.reserve(plan.test_idx.size());
    for (std::size_t r : plan.train_idx) train_y.push_back(y[r]);
    for (std::size_t r : plan.test_idx) test_y.push_back(y[r]);
    DecisionTree tree = fit_tree(train, train_y, options.tree);
    result.per_plan[i] = evaluate(predict(tree, test), test_y);
    if (i == 0) result.first_tree = std::move(tree);
  };

  unsigned threads = options.threads ? options.threads : std::thread::hardware_concurrency();
  threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(plans.size())));
  if (threads == 1) {
    for (std::size_t i = 0; i < plans.size(); ++i) run_one(i);
  } else {
    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < threads; ++t) {
      pool.emplace_back([&] {
        for (std::size_t i = next++; i < plans.size(); i = next++) {
          try {
            run_one(i);
          } catch (...) {
            std::lock_guard lock(error_mutex);
            if (!error) error = std::current_exception();
          }
        }
      });
    }
    for (auto& th : pool) th.join();
    if (error) std::rethrow_exception(error);
  }
  summarise(result.per_plan, result.mean, result.stddev);
  return result;
}

ProbeResult run_probe(const LabeledDataset& dataset, std::span<const std::string> features,
                      std::span<const SplitPlan> plans, const ProbeOptions& options) {
  for (const auto& f : features) feature(f);
  return run_probe(project(dataset.records(), features), dataset.labels(), plans, options);
}

ProbeResult run_probe(const LabeledDataset& dataset, const std::string& feature_name,
                      std::span<const SplitPlan> plans, const ProbeOptions& options) {
  return run_probe(dataset, std::span<const std::string>(&feature_name, 1), plans, options);
}

nlohmann::json to_json(const ProbeResult& r) {
  nlohmann::json per_plan = nlohmann::json::array();
  for (const auto& m : r.per_plan) per_plan.push_back(to_json(m));
  return {{"features", r.features},
          {"provenance", r.provenance},
          {"plans", r.per_plan.size()},
          {"mean", to_json(r.mean)},
          {"std", to_json(r.stddev)},
          {"per_plan", per_plan}};
}

std::string probe_csv_header() {
  std::string out = "feature,regime,plans";
  for (auto name : kMetricNames) {
    out += ',';
    out += name;
    out += ',';
    out += name;
    out += "_std";
  }
  return out;
}

std::string probe_csv_row(const ProbeResult& r, std::string_view regime) {
  std::string out = join(r.features, '+');
  out += ',';
  out += regime;
  out += ',';
  out += std::to_string(r.per_plan.size());
  for (std::size_t k = 0; k < kMetricNames.size(); ++k) {
    out += ',';
    out += format_double(metric_value(r.mean, k));
    out += ',';
    out += format_double(metric_value(r.stddev, k));
  }
  return out;
}

}  // namespace ipfaudit
