#include "ipfaudit/audit.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <tuple>

#include "ipfaudit/errors.hpp"
#include "ipfaudit/rng.hpp"
#include "ipfaudit/split.hpp"

namespace ipfaudit {
namespace {

std::vector<double> average_ranks(std::span<const double> v) {
  std::vector<std::size_t> order(v.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
  std::vector<double> ranks(v.size());
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i;
    while (j + 1 < order.size() && v[order[j + 1]] == v[order[i]]) ++j;
    const double rank = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
    for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = rank;
    i = j + 1;
  }
  return ranks;
}

double pearson(std::span<const double> a, std::span<const double> b) {
  const double n = static_cast<double>(a.size());
  double ma = 0.0, mb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    ma += a[i];
    mb += b[i];
  }
  ma /= n;
  mb /= n;
  double cov = 0.0, va = 0.0, vb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    cov += (a[i] - ma) * (b[i] - mb);
    va += (a[i] - ma) * (a[i] - ma);
    vb += (b[i] - mb) * (b[i] - mb);
  }
  if (va == 0.0 || vb == 0.0) return 0.0;
  return std::clamp(cov / std::sqrt(va * vb), -1.0, 1.0);
}

void require_usable(const LabeledDataset& d, const char* side) {
  if (d.empty()) throw PreconditionError(std::string("audit: ") + side + " session is empty");
  if (!d.has_both_classes())
    throw PreconditionError(std::string("audit: ") + side +
                            " session must contain both classes");
}

std::string fixed(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

std::vector<std::string> audited_features(const AuditConfig& config) {
  if (config.features.empty()) return catalogue_names();
  // Validate, then order by catalogue position.
  std::vector<std::pair<std::size_t, std::string>> picked;
  for (const auto& name : config.features)
    picked.emplace_back(static_cast<std::size_t>(feature(name).id), name);
  std::sort(picked.begin(), picked.end());
  picked.erase(std::unique(picked.begin(), picked.end()), picked.end());
  std::vector<std::string> out;
  for (auto& p : picked) out.push_back(std::move(p.second));
  return out;
}

struct Plans {
  std::vector<SplitPlan> cv;
  SplitPlan isolated;
};

Plans make_plans(const AuditInput& input, const AuditConfig& config) {
  Plans p;
  p.cv = make_cv_splits(input.merged, config.k, config.repeats,
                        derive_seed(config.seed, "cv"));
  p.isolated = make_isolated_split(input.merged, input.train_sessions, input.test_sessions);
  return p;
}

FeatureVerdict audit_one(const AuditInput& input, const Plans& plans,
                         const std::string& name, const AuditConfig& config) {
  const FeatureDescriptor& desc = feature(name);
  const std::string cols[] = {name};
  const FeatureMatrix x = project(input.merged.records(), cols);
  const auto& y = input.merged.labels();
  ProbeOptions probe{config.tree, config.threads};

  FeatureVerdict v;
  v.feature = name;
  v.identifier_class = desc.identifier_class;
  v.cv = run_probe(x, y, plans.cv, probe);
  v.isolated = run_probe(x, y, std::span<const SplitPlan>(&plans.isolated, 1), probe);
  ComplexityOptions copt = config.complexity;
  copt.seed = derive_seed(config.seed, "complexity");
  v.complexity = compute_report(x, y, copt);
  v.complexity_1d = v.complexity.aggregate;
  v.generalisation_gap = v.cv.mean.f1_macro - v.isolated.mean.f1_macro;
  v.verdict = classify_verdict(v.cv.mean.f1_macro, v.isolated.mean.f1_macro,
                               v.generalisation_gap, v.complexity_1d, v.identifier_class,
                               config.thresholds);
  return v;
}

}  // namespace

std::string_view to_string(Verdict v) noexcept {
  switch (v) {
    case Verdict::leaky_identifier: return "leaky_identifier";
    case Verdict::low_complexity_shortcut: return "low_complexity_shortcut";
    case Verdict::consistent: return "consistent";
    case Verdict::uninformative: return "uninformative";
  }
  return "uninformative";
}

Verdict classify_verdict(double cv_f1, double iso_f1, double gap, double complexity_1d,
                         IdentifierClass, const VerdictThresholds& t) {
  const bool cv_high = cv_f1 >= t.high;
  const bool iso_high = iso_f1 >= t.high;
  if (cv_high && gap >= t.gap) return Verdict::leaky_identifier;
  if (cv_high && iso_high && complexity_1d < t.critical_complexity)
    return Verdict::low_complexity_shortcut;
  if (cv_high && iso_high) return Verdict::consistent;
  return Verdict::uninformative;
}

Correlation correlate_complexity(std::span<const std::pair<double, double>> pairs,
                                 double critical) {
  if (pairs.size() < 3)
    throw PreconditionError("correlation needs at least 3 pairs, got " +
                            std::to_string(pairs.size()));
  std::vector<double> c, f;
  for (const auto& [score, f1] : pairs) {
    c.push_back(score);
    f.push_back(f1);
  }
  Correlation out;
  out.spearman = pearson(average_ranks(c), average_ranks(f));
  double below = 0.0, above = 0.0;
  for (const auto& [score, f1] : pairs) {
    if (score < critical) {
      below += f1;
      ++out.below_count;
    } else {
      above += f1;
      ++out.above_count;
    }
  }
  if (out.below_count) out.below_mean_f1 = below / static_cast<double>(out.below_count);
  if (out.above_count) out.above_mean_f1 = above / static_cast<double>(out.above_count);
  return out;
}

AuditInput make_audit_input(const LabeledDataset& train, const LabeledDataset& test) {
  require_usable(train, "training");
  require_usable(test, "test");
  const LabeledDataset parts[] = {train, test};
  AuditInput in{merge_sessions(parts), {}, {}};
  const auto& sessions = in.merged.sessions();
  for (std::size_t i = 0; i < sessions.size(); ++i)
    (i < train.size() ? in.train_sessions : in.test_sessions).insert(sessions[i]);
  return in;
}

FeatureVerdict audit_feature(const LabeledDataset& train_session,
                             const LabeledDataset& test_session,
                             const std::string& feature_name, const AuditConfig& config) {
  const AuditInput input = make_audit_input(train_session, test_session);
  return audit_one(input, make_plans(input, config), feature_name, config);
}

AuditReport run_audit(const AuditInput& input, const AuditConfig& config,
                      std::string description) {
  const auto names = audited_features(config);
  const Plans plans = make_plans(input, config);

  AuditReport r;
  r.description = std::move(description);
  r.config = config;
  r.train_sessions.assign(input.train_sessions.begin(), input.train_sessions.end());
  r.test_sessions.assign(input.test_sessions.begin(), input.test_sessions.end());
  r.records = input.merged.size();
  r.cv_leakage_findings = leakage_check(plans.cv.front(), input.merged).size();
  r.isolated_leakage_findings = leakage_check(plans.isolated, input.merged).size();
  for (const auto& name : names) r.features.push_back(audit_one(input, plans, name, config));
  if (r.features.size() >= 3) {
    std::vector<std::pair<double, double>> pairs;
    for (const auto& v : r.features)
      pairs.emplace_back(v.complexity_1d, v.isolated.mean.f1_macro);
    r.correlation = correlate_complexity(pairs, config.thresholds.critical_complexity);
  }
  return r;
}

AuditReport run_audit(const LabeledDataset& train_session, const LabeledDataset& test_session,
                      const AuditConfig& config, std::string description) {
  return run_audit(make_audit_input(train_session, test_session), config,
                   std::move(description));
}

nlohmann::json to_json(const AuditConfig& c) {
  nlohmann::json j{{"k", c.k},
                   {"repeats", c.repeats},
                   {"seed", c.seed},
                   {"high_threshold", c.thresholds.high},
                   {"gap_threshold", c.thresholds.gap},
                   {"critical_complexity", c.thresholds.critical_complexity},
                   {"min_samples_split", c.tree.min_samples_split},
                   {"features", c.features}};
  j["max_depth"] = c.tree.max_depth ? nlohmann::json(*c.tree.max_depth) : nlohmann::json();
  j["complexity_max_samples"] = c.complexity.max_samples
                                    ? nlohmann::json(*c.complexity.max_samples)
                                    : nlohmann::json();
  return j;
}

nlohmann::json to_json(const Correlation& c) {
  auto opt = [](const std::optional<double>& v) {
    return v ? nlohmann::json(*v) : nlohmann::json();
  };
  return {{"spearman", c.spearman},
          {"below_count", c.below_count},
          {"above_count", c.above_count},
          {"below_mean_f1", opt(c.below_mean_f1)},
          {"above_mean_f1", opt(c.above_mean_f1)}};
}

nlohmann::json to_json(const FeatureVerdict& v) {
  return {{"feature", v.feature},
          {"identifier_class", to_string(v.identifier_class)},
          {"cv", to_json(v.cv)},
          {"isolated", to_json(v.isolated)},
          {"complexity", to_json(v.complexity)},
          {"complexity_1d", v.complexity_1d},
          {"generalisation_gap", v.generalisation_gap},
          {"verdict", to_string(v.verdict)}};
}

nlohmann::json to_json(const AuditReport& r) {
  auto ids = [](const std::vector<SessionId>& s) {
    std::vector<std::uint32_t> out;
    for (auto id : s) out.push_back(id.value);
    return out;
  };
  nlohmann::json features = nlohmann::json::array();
  for (const auto& v : r.features) features.push_back(to_json(v));
  return {{"schema_version", kAuditSchemaVersion},
          {"description", r.description},
          {"config", to_json(r.config)},
          {"train_sessions", ids(r.train_sessions)},
          {"test_sessions", ids(r.test_sessions)},
          {"records", r.records},
          {"cv_leakage_findings", r.cv_leakage_findings},
          {"isolated_leakage_findings", r.isolated_leakage_findings},
          {"features", features},
          {"correlation", r.correlation ? to_json(*r.correlation) : nlohmann::json()}};
}

std::string audit_table(const AuditReport& r) {
  char line[256];
  std::string out;
  std::snprintf(line, sizeof line, "%-12s %-18s %-15s %-15s %7s %10s  %s\n", "feature",
                "class", "cv f1", "isolated f1", "gap", "complexity", "verdict");
  out += line;
  for (const auto& v : r.features) {
    const std::string cv = fixed(v.cv.mean.f1_macro, 3) + "+-" + fixed(v.cv.stddev.f1_macro, 3);
    const std::string iso =
        fixed(v.isolated.mean.f1_macro, 3) + "+-" + fixed(v.isolated.stddev.f1_macro, 3);
    std::snprintf(line, sizeof line, "%-12s %-18s %-15s %-15s %7.3f %10.1f  %s\n",
                  v.feature.c_str(), std::string(to_string(v.identifier_class)).c_str(),
                  cv.c_str(), iso.c_str(), v.generalisation_gap, v.complexity_1d,
                  std::string(to_string(v.verdict)).c_str());
    out += line;
  }
  if (r.correlation) {
    out += "spearman(complexity, isolated f1) = " + fixed(r.correlation->spearman, 3) + "\n";
  }
  return out;
}

std::string audit_metrics_csv(const AuditReport& r) {
  std::string out = probe_csv_header() + "\n";
  for (const auto& v : r.features) {
    out += probe_csv_row(v.cv, "cv") + "\n";
    out += probe_csv_row(v.isolated, "isolated") + "\n";
  }
  return out;
}

std::string histograms_csv(const LabeledDataset& dataset,
                           std::span<const std::string> features, std::size_t bins,
                           std::size_t exact_limit) {
  std::string out = "feature,session,label,bin_lo,bin_hi,count\n";
  if (bins == 0) bins = 1;
  for (const auto& name : features) {
    const std::string cols[] = {name};
    const FeatureMatrix x = project(dataset.records(), cols);
    const std::vector<double> values = x.column(0);
    std::vector<double> distinct = values;
    std::sort(distinct.begin(), distinct.end());
    distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
    const bool exact = distinct.size() <= exact_limit;
    const double lo = distinct.empty() ? 0.0 : distinct.front();
    const double hi = distinct.empty() ? 0.0 : distinct.back();
    const double width = (hi - lo) / static_cast<double>(bins);

    // (session, label, bin) -> count, in ascending key order.
    std::map<std::tuple<SessionId, Label, std::size_t>, std::size_t> counts;
    for (std::size_t i = 0; i < values.size(); ++i) {
      std::size_t bin;
      if (exact) {
        bin = static_cast<std::size_t>(
            std::lower_bound(distinct.begin(), distinct.end(), values[i]) - distinct.begin());
      } else {
        bin = width > 0.0 ? static_cast<std::size_t>((values[i] - lo) / width) : 0;
        bin = std::min(bin, bins - 1);
      }
      ++counts[{dataset.sessions()[i], dataset.labels()[i], bin}];
    }
    for (const auto& [key, count] : counts) {
      const auto& [session, label, bin] = key;
      const double b_lo = exact ? distinct[bin] : lo + width * static_cast<double>(bin);
      const double b_hi = exact ? distinct[bin] : lo + width * static_cast<double>(bin + 1);
      out += name + "," + std::to_string(session.value) + "," + std::string(to_string(label)) +
             "," + format_double(b_lo) + "," + format_double(b_hi) + "," +
             std::to_string(count) + "\n";
    }
  }
  return out;
}

}  // namespace ipfaudit
