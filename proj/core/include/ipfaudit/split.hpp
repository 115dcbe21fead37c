#pragma once

#include <cstdint>
#include <set>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "ipfaudit/dataset.hpp"

namespace ipfaudit {

struct CvFoldProvenance {
  std::uint32_t repeat = 0;
  std::uint32_t fold = 0;
  std::uint32_t folds = 0;
  std::uint64_t seed = 0;
};

struct SessionIsolatedProvenance {
  std::vector<SessionId> train_sessions;
  std::vector<SessionId> test_sessions;
};

using SplitProvenance = std::variant<CvFoldProvenance, SessionIsolatedProvenance>;

// Train/test index sets (ascending, disjoint) into one LabeledDataset.
struct SplitPlan {
  std::vector<std::size_t> train_idx;
  std::vector<std::size_t> test_idx;
  SplitProvenance provenance;
};

// Stratified repeated k-fold. Each repeat shuffles every class with a
// generator keyed by (seed, repeat) and deals the shuffled members round
// robin over the folds, continuing the fold cursor from one class to the
// next. Plans are ordered repeat-major. Throws PreconditionError when
// k < 2, the dataset has fewer than k records, or a class is missing.
std::vector<SplitPlan> make_cv_splits(std::span<const Label> labels,
                                      std::uint32_t k, std::uint32_t repeats,
                                      std::uint64_t seed);
std::vector<SplitPlan> make_cv_splits(const LabeledDataset& dataset,
                                      std::uint32_t k, std::uint32_t repeats,
                                      std::uint64_t seed);

// Assigns indices purely by session membership. Throws PreconditionError
// for empty, overlapping or unknown session sets.
SplitPlan make_isolated_split(const LabeledDataset& dataset,
                              const std::set<SessionId>& train_sessions,
                              const std::set<SessionId>& test_sessions);

struct LeakageFinding {
  enum class Kind { session, flow };
  Kind kind;
  std::string key;
  std::size_t train_count = 0;
  std::size_t test_count = 0;
};

// One finding per session (and per flow, when the dataset carries flow
// keys) present on both sides of the plan, in ascending key order.
std::vector<LeakageFinding> leakage_check(const SplitPlan& plan,
                                          const LabeledDataset& dataset);

std::string describe(const SplitProvenance& p);
nlohmann::json to_json(const SplitPlan& plan);
nlohmann::json to_json(const LeakageFinding& f);

}  // namespace ipfaudit
