#include "ipfaudit/sweep.hpp"

#include "ipfaudit/errors.hpp"
#include "ipfaudit/rng.hpp"

namespace ipfaudit {

std::vector<ScenarioSpec> sweep_scenarios(const ScenarioSpec& tmpl, std::size_t points,
                                          std::uint64_t seed) {
  std::vector<ScenarioSpec> out;
  for (std::size_t i = 0; i < points; ++i) {
    ScenarioSpec s = tmpl;
    s.pair.reset();
    s.attack_size_blend =
        points > 1 ? static_cast<double>(i) / static_cast<double>(points - 1) : 0.0;
    s.seed = derive_seed(seed, static_cast<std::uint64_t>(i)) >> 1;
    out.push_back(s);
  }
  return out;
}

SweepResult run_sweep(const ScenarioSpec& tmpl, std::size_t points, std::uint64_t seed,
                      const AuditConfig& config, const std::string& feature_name) {
  if (points < 3) throw PreconditionError("sweep: at least 3 points are needed");
  SweepResult r;
  r.feature = feature_name;
  std::vector<std::pair<double, double>> pairs;
  const auto specs = sweep_scenarios(tmpl, points, seed);
  for (std::size_t i = 0; i < specs.size(); ++i) {
    const auto [a, b] = generate_pair(specs[i], 1.0, specs[i].seed + 1);
    AuditConfig cfg = config;
    cfg.seed = derive_seed(config.seed, static_cast<std::uint64_t>(i));
    const FeatureVerdict v = audit_feature(a.dataset, b.dataset, feature_name, cfg);
    SweepPoint p;
    p.index = i;
    p.blend = specs[i].attack_size_blend;
    p.seed = specs[i].seed;
    p.complexity = v.complexity_1d;
    p.cv_f1 = v.cv.mean.f1_macro;
    p.isolated_f1 = v.isolated.mean.f1_macro;
    p.verdict = v.verdict;
    r.points.push_back(p);
    pairs.emplace_back(p.complexity, p.isolated_f1);
  }
  r.correlation = correlate_complexity(pairs, config.thresholds.critical_complexity);
  return r;
}

std::string sweep_csv(const SweepResult& r) {
  std::string out = "index,blend,seed,complexity,cv_f1,isolated_f1,verdict\n";
  for (const auto& p : r.points) {
    out += std::to_string(p.index) + "," + format_double(p.blend) + "," +
           std::to_string(p.seed) + "," + format_double(p.complexity) + "," +
           format_double(p.cv_f1) + "," + format_double(p.isolated_f1) + "," +
           std::string(to_string(p.verdict)) + "\n";
  }
  return out;
}

nlohmann::json to_json(const SweepResult& r) {
  nlohmann::json points = nlohmann::json::array();
  for (const auto& p : r.points)
    points.push_back({{"index", p.index},
                      {"blend", p.blend},
                      {"seed", p.seed},
                      {"complexity", p.complexity},
                      {"cv_f1", p.cv_f1},
                      {"isolated_f1", p.isolated_f1},
                      {"verdict", to_string(p.verdict)}});
  return {{"feature", r.feature}, {"points", points}, {"correlation", to_json(r.correlation)}};
}

}  // namespace ipfaudit
