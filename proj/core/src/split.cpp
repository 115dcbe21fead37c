#include "ipfaudit/split.hpp"

#include <algorithm>
#include <map>

#include "ipfaudit/errors.hpp"
#include "ipfaudit/rng.hpp"

namespace ipfaudit {

std::vector<SplitPlan> make_cv_splits(std::span<const Label> labels,
                                      std::uint32_t k, std::uint32_t repeats,
                                      std::uint64_t seed) {
  if (k < 2) throw PreconditionError("cv: k must be at least 2");
  if (labels.size() < k)
    throw PreconditionError("cv: " + std::to_string(labels.size()) +
                            " records cannot fill " + std::to_string(k) + " folds");
  std::vector<std::size_t> by_class[2];
  for (std::size_t i = 0; i < labels.size(); ++i)
    by_class[static_cast<int>(labels[i])].push_back(i);
  if (by_class[0].empty() || by_class[1].empty())
    throw PreconditionError("cv: both classes must be present");

  std::vector<SplitPlan> plans;
  plans.reserve(static_cast<std::size_t>(k) * repeats);
  std::vector<std::uint32_t> fold_of(labels.size());
  for (std::uint32_t r = 0; r < repeats; ++r) {
    Rng rng(derive_seed(seed, r));
    std::size_t cursor = 0;
    // Malicious first: the minority class in typical captures gets the
    // low-numbered folds, which also hold the extra record when N % k != 0.
    for (int cls : {1, 0}) {
      std::vector<std::size_t> members = by_class[cls];
      rng.shuffle(std::span<std::size_t>(members));
      for (std::size_t idx : members) fold_of[idx] = static_cast<std::uint32_t>(cursor++ % k);
    }
    for (std::uint32_t f = 0; f < k; ++f) {
      SplitPlan plan;
      plan.provenance = CvFoldProvenance{r, f, k, seed};
      for (std::size_t i = 0; i < labels.size(); ++i)
        (fold_of[i] == f ? plan.test_idx : plan.train_idx).push_back(i);
      plans.push_back(std::move(plan));
    }
  }
  return plans;
}

std::vector<SplitPlan> make_cv_splits(const LabeledDataset& dataset,
                                      std::uint32_t k, std::uint32_t repeats,
                                      std::uint64_t seed) {
  return make_cv_splits(dataset.labels(), k, repeats, seed);
}

SplitPlan make_isolated_split(const LabeledDataset& dataset,
                              const std::set<SessionId>& train_sessions,
                              const std::set<SessionId>& test_sessions) {
  if (train_sessions.empty() || test_sessions.empty())
    throw PreconditionError("isolated split: session sets must be non-empty");
  for (SessionId s : train_sessions)
    if (test_sessions.contains(s))
      throw PreconditionError("isolated split: session " + std::to_string(s.value) +
                              " is on both sides");
  const auto present = dataset.session_ids();
  auto check = [&](const std::set<SessionId>& ids) {
    for (SessionId s : ids)
      if (!std::binary_search(present.begin(), present.end(), s))
        throw PreconditionError("isolated split: unknown session " +
                                std::to_string(s.value));
  };
  check(train_sessions);
  check(test_sessions);

  SplitPlan plan;
  plan.provenance = SessionIsolatedProvenance{
      {train_sessions.begin(), train_sessions.end()},
      {test_sessions.begin(), test_sessions.end()}};
  const auto& sessions = dataset.sessions();
  for (std::size_t i = 0; i < sessions.size(); ++i) {
    if (train_sessions.contains(sessions[i])) {
      plan.train_idx.push_back(i);
    } else if (test_sessions.contains(sessions[i])) {
      plan.test_idx.push_back(i);
    }
  }
  return plan;
}

namespace {

template <typename Key, typename KeyFn, typename NameFn>
void collect(const SplitPlan& plan, KeyFn key_of, NameFn name_of,
             LeakageFinding::Kind kind, std::vector<LeakageFinding>& out) {
  std::map<Key, std::pair<std::size_t, std::size_t>> counts;
  for (std::size_t i : plan.train_idx) ++counts[key_of(i)].first;
  for (std::size_t i : plan.test_idx) ++counts[key_of(i)].second;
  for (const auto& [key, c] : counts)
    if (c.first > 0 && c.second > 0) out.push_back({kind, name_of(key), c.first, c.second});
}

}  // namespace

std::vector<LeakageFinding> leakage_check(const SplitPlan& plan,
                                          const LabeledDataset& dataset) {
  std::vector<LeakageFinding> out;
  const auto& sessions = dataset.sessions();
  collect<SessionId>(
      plan, [&](std::size_t i) { return sessions.at(i); },
      [](SessionId s) { return "session " + std::to_string(s.value); },
      LeakageFinding::Kind::session, out);
  if (dataset.flows()) {
    const auto& flows = *dataset.flows();
    collect<FlowKey>(
        plan, [&](std::size_t i) { return flows.at(i); },
        [](const FlowKey& k) { return to_string(k); }, LeakageFinding::Kind::flow, out);
  }
  return out;
}

std::string describe(const SplitProvenance& p) {
  return std::visit(
      [](const auto& v) -> std::string {
        using V = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<V, CvFoldProvenance>) {
          return "cv(repeat=" + std::to_string(v.repeat) + ", fold=" +
                 std::to_string(v.fold) + "/" + std::to_string(v.folds) +
                 ", seed=" + std::to_string(v.seed) + ")";
        } else {
          auto list = [](const std::vector<SessionId>& ids) {
            std::string s;
            for (std::size_t i = 0; i < ids.size(); ++i) {
              if (i) s += ',';
              s += std::to_string(ids[i].value);
            }
            return s;
          };
          return "session_isolated(train={" + list(v.train_sessions) + "}, test={" +
                 list(v.test_sessions) + "})";
        }
      },
      p);
}

nlohmann::json to_json(const SplitPlan& plan) {
  nlohmann::json prov = std::visit(
      [](const auto& v) -> nlohmann::json {
        using V = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<V, CvFoldProvenance>) {
          return {{"kind", "cv_fold"}, {"repeat", v.repeat}, {"fold", v.fold},
                  {"folds", v.folds}, {"seed", v.seed}};
        } else {
          std::vector<std::uint32_t> tr, te;
          for (auto s : v.train_sessions) tr.push_back(s.value);
          for (auto s : v.test_sessions) te.push_back(s.value);
          return {{"kind", "session_isolated"}, {"train_sessions", tr}, {"test_sessions", te}};
        }
      },
      plan.provenance);
  return {{"provenance", prov}, {"train_idx", plan.train_idx}, {"test_idx", plan.test_idx}};
}

nlohmann::json to_json(const LeakageFinding& f) {
  return {{"kind", f.kind == LeakageFinding::Kind::session ? "session" : "flow"},
          {"key", f.key},
          {"train_count", f.train_count},
          {"test_count", f.test_count}};
}

}  // namespace ipfaudit
