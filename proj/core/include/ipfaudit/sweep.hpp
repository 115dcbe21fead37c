#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "ipfaudit/audit.hpp"
#include "ipfaudit/synth.hpp"

namespace ipfaudit {

struct SweepPoint {
  std::size_t index = 0;
  double blend = 0.0;          // attack_size_blend of the scenario
  std::uint64_t seed = 0;      // session A seed; session B uses seed + 1
  double complexity = 0.0;     // single-feature aggregate
  double cv_f1 = 0.0;
  double isolated_f1 = 0.0;
  Verdict verdict = Verdict::uninformative;
};

struct SweepResult {
  std::string feature;
  std::vector<SweepPoint> points;
  Correlation correlation;  // (complexity, isolated f1)
};

// `points` variants of the template with attack_size_blend spread evenly
// over [0, 1] and per-point seeds derived from `seed`.
std::vector<ScenarioSpec> sweep_scenarios(const ScenarioSpec& tmpl, std::size_t points,
                                          std::uint64_t seed);

// Generates each scenario as a similarity-1 session pair and audits one
// feature on it. Throws PreconditionError for fewer than three points.
SweepResult run_sweep(const ScenarioSpec& tmpl, std::size_t points, std::uint64_t seed,
                      const AuditConfig& config, const std::string& feature = "frame_len");

std::string sweep_csv(const SweepResult& r);
nlohmann::json to_json(const SweepResult& r);

}  // namespace ipfaudit
