#include "ipfaudit/metrics.hpp"

#include "ipfaudit/errors.hpp"

namespace ipfaudit {
namespace {

struct ClassScores {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

// Scores for one class given its true positives, predicted and actual counts.
ClassScores class_scores(std::uint64_t hit, std::uint64_t predicted,
                         std::uint64_t actual) {
  ClassScores s;
  if (predicted > 0) s.precision = static_cast<double>(hit) / static_cast<double>(predicted);
  if (actual > 0) s.recall = static_cast<double>(hit) / static_cast<double>(actual);
  if (s.precision + s.recall > 0.0)
    s.f1 = 2.0 * s.precision * s.recall / (s.precision + s.recall);
  return s;
}

}  // namespace

double metric_value(const Metrics& m, std::size_t index) noexcept {
  switch (index) {
    case 0: return m.accuracy;
    case 1: return m.precision_macro;
    case 2: return m.recall_macro;
    case 3: return m.f1_macro;
    default: return m.kappa;
  }
}

Confusion confusion(std::span<const Label> predicted, std::span<const Label> actual) {
  if (predicted.size() != actual.size())
    throw PreconditionError("evaluate: " + std::to_string(predicted.size()) +
                            " predictions for " + std::to_string(actual.size()) +
                            " labels");
  Confusion c;
  for (std::size_t i = 0; i < predicted.size(); ++i) {
    const bool p = predicted[i] == Label::malicious;
    const bool a = actual[i] == Label::malicious;
    if (p && a) ++c.tp;
    else if (!p && a) ++c.fn;
    else if (p) ++c.fp;
    else ++c.tn;
  }
  return c;
}

Metrics metrics_from_confusion(const Confusion& c) {
  const std::uint64_t n = c.total();
  if (n == 0) throw PreconditionError("evaluate: no samples");
  const std::uint64_t pred_m = c.tp + c.fp, pred_b = c.tn + c.fn;
  const std::uint64_t act_m = c.tp + c.fn, act_b = c.tn + c.fp;

  Metrics m;
  m.accuracy = static_cast<double>(c.tp + c.tn) / static_cast<double>(n);

  const ClassScores mal = class_scores(c.tp, pred_m, act_m);
  const ClassScores ben = class_scores(c.tn, pred_b, act_b);
  const bool has_m = pred_m + act_m > 0;
  const bool has_b = pred_b + act_b > 0;
  const double classes = static_cast<double>(has_m) + static_cast<double>(has_b);
  m.precision_macro = ((has_m ? mal.precision : 0.0) + (has_b ? ben.precision : 0.0)) / classes;
  m.recall_macro = ((has_m ? mal.recall : 0.0) + (has_b ? ben.recall : 0.0)) / classes;
  m.f1_macro = ((has_m ? mal.f1 : 0.0) + (has_b ? ben.f1 : 0.0)) / classes;

  // kappa = (N*agree - sum_c pred_c*act_c) / (N^2 - sum_c pred_c*act_c),
  // evaluated in exact integer arithmetic before the final division.
  __extension__ using i128 = __int128;
  const i128 nn = static_cast<i128>(n);
  const i128 chance = static_cast<i128>(pred_m) * act_m + static_cast<i128>(pred_b) * act_b;
  const i128 num = nn * static_cast<i128>(c.tp + c.tn) - chance;
  const i128 den = nn * nn - chance;
  m.kappa = den == 0 ? 0.0 : static_cast<double>(num) / static_cast<double>(den);
  return m;
}

Metrics evaluate(std::span<const Label> predicted, std::span<const Label> actual) {
  return metrics_from_confusion(confusion(predicted, actual));
}

nlohmann::json to_json(const Confusion& c) {
  return {{"tp", c.tp}, {"fn", c.fn}, {"fp", c.fp}, {"tn", c.tn}};
}

nlohmann::json to_json(const Metrics& m) {
  return {{"accuracy", m.accuracy},
          {"precision_macro", m.precision_macro},
          {"recall_macro", m.recall_macro},
          {"f1_macro", m.f1_macro},
          {"kappa", m.kappa}};
}

}  // namespace ipfaudit
