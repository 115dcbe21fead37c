#include "ipfaudit/tree.hpp"

#include <algorithm>
#include <cstdio>
#include <numeric>

#include "ipfaudit/errors.hpp"

namespace ipfaudit {
namespace {

__extension__ using u128 = unsigned __int128;

// Weighted-Gini comparison without rounding. For a split with class counts
// (bl, ml | br, mr), weighted child impurity is
//   1 - [(bl^2 + ml^2)/nl + (br^2 + mr^2)/nr] / n,
// so minimising impurity maximises the bracket. We keep it as a fraction.
struct SplitScore {
  u128 num = 0;
  u128 den = 1;

  static SplitScore of(std::uint64_t bl, std::uint64_t ml, std::uint64_t br,
                       std::uint64_t mr) {
    const u128 nl = bl + ml;
    const u128 nr = br + mr;
    const u128 al = u128{bl} * bl + u128{ml} * ml;
    const u128 ar = u128{br} * br + u128{mr} * mr;
    return {al * nr + ar * nl, nl * nr};
  }
  bool better_than(const SplitScore& o) const {
    // num/den > o.num/o.den; both denominators are positive. Values stay
    // below 2^127 for up to ~10^6 samples per node.
    return num * o.den > o.num * den;
  }
};

struct Candidate {
  int feature = -1;
  double threshold = 0.0;
  std::size_t left_count = 0;
  SplitScore score;
};

double midpoint(double a, double b) {
  double mid = a + (b - a) / 2.0;
  if (!(mid < b)) mid = a;
  return mid;
}

struct Work {
  std::size_t lo;
  std::size_t hi;
  std::size_t depth;
  int parent;
  bool is_left;
};

}  // namespace

std::size_t DecisionTree::depth() const {
  if (nodes_.empty()) return 0;
  std::vector<std::size_t> d(nodes_.size(), 0);
  std::size_t best = 0;
  // Pre-order: parents precede children.
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    const TreeNode& n = nodes_[i];
    if (n.is_leaf()) continue;
    d[static_cast<std::size_t>(n.left)] = d[i] + 1;
    d[static_cast<std::size_t>(n.right)] = d[i] + 1;
    best = std::max(best, d[i] + 1);
  }
  return best;
}

Label DecisionTree::predict_row(std::span<const double> row) const {
  std::size_t i = 0;
  while (!nodes_[i].is_leaf()) {
    const TreeNode& n = nodes_[i];
    const double v = row[static_cast<std::size_t>(n.feature)];
    i = static_cast<std::size_t>((v == kAbsent || v <= n.threshold) ? n.left : n.right);
  }
  return nodes_[i].prediction();
}

DecisionTree fit_tree(const FeatureMatrix& x, std::span<const Label> y,
                      const TreeParams& params) {
  const std::size_t n = x.rows();
  const std::size_t m = x.cols();
  if (n == 0) throw PreconditionError("fit_tree: empty training set");
  if (y.size() != n)
    throw PreconditionError("fit_tree: " + std::to_string(n) + " rows but " +
                            std::to_string(y.size()) + " labels");

  // sorted[f] holds every row index ordered by (value of f, index). Each
  // node owns the same contiguous range [lo, hi) in every feature's array.
  std::vector<std::vector<std::size_t>> sorted(m, std::vector<std::size_t>(n));
  for (std::size_t f = 0; f < m; ++f) {
    auto& idx = sorted[f];
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
      return x.at(a, f) < x.at(b, f);
    });
  }
  std::vector<std::size_t> rows_only;
  if (m == 0) {
    rows_only.resize(n);
    std::iota(rows_only.begin(), rows_only.end(), std::size_t{0});
  }
  const std::vector<std::size_t>& any_order = m ? sorted[0] : rows_only;

  std::vector<TreeNode> nodes;
  std::vector<char> goes_left(n, 0);
  std::vector<Work> stack{{0, n, 0, -1, false}};
  while (!stack.empty()) {
    const Work w = stack.back();
    stack.pop_back();
    const int id = static_cast<int>(nodes.size());
    if (w.parent >= 0) {
      (w.is_left ? nodes[static_cast<std::size_t>(w.parent)].left
                 : nodes[static_cast<std::size_t>(w.parent)].right) = id;
    }
    TreeNode node;
    for (std::size_t i = w.lo; i < w.hi; ++i)
      (y[any_order[i]] == Label::malicious ? node.malicious : node.benign) += 1;
    const std::size_t count = w.hi - w.lo;

    const bool pure = node.benign == 0 || node.malicious == 0;
    const bool depth_ok = !params.max_depth || w.depth < *params.max_depth;
    Candidate best;
    if (!pure && depth_ok && count >= params.min_samples_split && count >= 2) {
      for (std::size_t f = 0; f < m; ++f) {
        const auto& idx = sorted[f];
        std::uint64_t bl = 0, ml = 0;
        for (std::size_t i = w.lo; i + 1 < w.hi; ++i) {
          (y[idx[i]] == Label::malicious ? ml : bl) += 1;
          const double a = x.at(idx[i], f);
          const double b = x.at(idx[i + 1], f);
          if (!(a < b)) continue;
          SplitScore s = SplitScore::of(bl, ml, node.benign - bl, node.malicious - ml);
          if (best.feature < 0 || s.better_than(best.score)) {
            best.feature = static_cast<int>(f);
            best.threshold = midpoint(a, b);
            best.left_count = i + 1 - w.lo;
            best.score = s;
          }
        }
      }
    }

    if (best.feature < 0) {
      nodes.push_back(node);
      continue;
    }
    node.feature = best.feature;
    node.threshold = best.threshold;
    nodes.push_back(node);

    const auto& split_idx = sorted[static_cast<std::size_t>(best.feature)];
    for (std::size_t i = w.lo; i < w.hi; ++i) goes_left[split_idx[i]] = i < w.lo + best.left_count;
    for (std::size_t f = 0; f < m; ++f) {
      if (f == static_cast<std::size_t>(best.feature)) continue;
      auto first = sorted[f].begin() + static_cast<std::ptrdiff_t>(w.lo);
      auto last = sorted[f].begin() + static_cast<std::ptrdiff_t>(w.hi);
      std::stable_partition(first, last, [&](std::size_t r) { return goes_left[r] != 0; });
    }
    const std::size_t mid = w.lo + best.left_count;
    stack.push_back({mid, w.hi, w.depth + 1, id, false});
    stack.push_back({w.lo, mid, w.depth + 1, id, true});
  }
  return DecisionTree(std::move(nodes), m, params);
}

std::vector<Label> predict(const DecisionTree& tree, const FeatureMatrix& x) {
  if (x.cols() != tree.feature_count())
    throw PreconditionError("predict: matrix has " + std::to_string(x.cols()) +
                            " columns, tree expects " +
                            std::to_string(tree.feature_count()));
  std::vector<Label> out(x.rows());
  for (std::size_t r = 0; r < x.rows(); ++r) out[r] = tree.predict_row(x.row(r));
  return out;
}

std::string export_dot(const DecisionTree& tree,
                       std::span<const std::string> feature_names) {
  std::string out =
      "digraph Tree {\n"
      "node [shape=box, style=\"rounded\", fontname=\"helvetica\"] ;\n"
      "edge [fontname=\"helvetica\"] ;\n";
  const auto& nodes = tree.nodes();
  char gini[32];
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    const TreeNode& n = nodes[i];
    const double total = static_cast<double>(n.benign + n.malicious);
    const double pb = total > 0 ? n.benign / total : 0.0;
    const double pm = total > 0 ? n.malicious / total : 0.0;
    std::snprintf(gini, sizeof gini, "%.3f", 1.0 - pb * pb - pm * pm);
    std::string label;
    if (!n.is_leaf()) {
      const auto f = static_cast<std::size_t>(n.feature);
      const std::string name =
          f < feature_names.size() ? feature_names[f] : "x[" + std::to_string(f) + "]";
      label = name + " <= " + format_double(n.threshold) + "\\n";
    }
    label += "gini = " + std::string(gini) + "\\nsamples = " +
             std::to_string(n.benign + n.malicious) + "\\nvalue = [" +
             std::to_string(n.benign) + ", " + std::to_string(n.malicious) +
             "]\\nclass = " + std::string(to_string(n.prediction()));
    out += std::to_string(i) + " [label=\"" + label + "\"] ;\n";
  }
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    const TreeNode& n = nodes[i];
    if (n.is_leaf()) continue;
    out += std::to_string(i) + " -> " + std::to_string(n.left);
    out += i == 0 ? " [labeldistance=2.5, labelangle=45, headlabel=\"True\"] ;\n" : " ;\n";
    out += std::to_string(i) + " -> " + std::to_string(n.right);
    out += i == 0 ? " [labeldistance=2.5, labelangle=-45, headlabel=\"False\"] ;\n" : " ;\n";
  }
  out += "}\n";
  return out;
}

nlohmann::json to_json(const DecisionTree& tree) {
  nlohmann::json nodes = nlohmann::json::array();
  for (const auto& n : tree.nodes()) {
    if (n.is_leaf()) {
      nodes.push_back({{"benign", n.benign}, {"malicious", n.malicious}});
    } else {
      nodes.push_back({{"feature", n.feature},
                       {"threshold", n.threshold},
                       {"left", n.left},
                       {"right", n.right},
                       {"benign", n.benign},
                       {"malicious", n.malicious}});
    }
  }
  nlohmann::json params = {{"min_samples_split", tree.params().min_samples_split},
                           {"impurity", "gini"}};
  params["max_depth"] = tree.params().max_depth ? nlohmann::json(*tree.params().max_depth)
                                                : nlohmann::json(nullptr);
  return {{"feature_count", tree.feature_count()}, {"params", params}, {"nodes", nodes}};
}

}  // namespace ipfaudit
