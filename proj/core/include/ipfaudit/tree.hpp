#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "ipfaudit/dataset.hpp"
#include "ipfaudit/packet.hpp"

namespace ipfaudit {

struct TreeParams {
  std::optional<std::size_t> max_depth;  // unlimited when empty
  std::size_t min_samples_split = 2;

  bool operator==(const TreeParams&) const = default;
};

// Internal nodes have feature >= 0 and both children set; leaves have
// feature == -1. Class counts are kept on every node (training counts).
struct TreeNode {
  int feature = -1;
  double threshold = 0.0;
  int left = -1;
  int right = -1;
  std::uint64_t benign = 0;
  std::uint64_t malicious = 0;

  bool is_leaf() const noexcept { return feature < 0; }
  // Ties go to benign.
  Label prediction() const noexcept {
    return malicious > benign ? Label::malicious : Label::benign;
  }
  bool operator==(const TreeNode&) const = default;
};

// Binary CART classifier; nodes are stored in pre-order, root at 0.
class DecisionTree {
 public:
  DecisionTree() = default;
  DecisionTree(std::vector<TreeNode> nodes, std::size_t feature_count,
               TreeParams params)
      : nodes_(std::move(nodes)), feature_count_(feature_count), params_(params) {}

  const std::vector<TreeNode>& nodes() const noexcept { return nodes_; }
  std::size_t feature_count() const noexcept { return feature_count_; }
  const TreeParams& params() const noexcept { return params_; }
  std::size_t depth() const;

  // Left iff value <= threshold; absent (-1) values always go left.
  Label predict_row(std::span<const double> row) const;

  bool operator==(const DecisionTree&) const = default;

 private:
  std::vector<TreeNode> nodes_;
  std::size_t feature_count_ = 0;
  TreeParams params_;
};

// Greedy CART with Gini impurity. Each node takes the split with the
// lowest weighted child impurity over all features and all midpoints
// between consecutive distinct values; ties keep the lowest feature index,
// then the lowest threshold. Splitting stops at purity, below
// min_samples_split, at max_depth, or when no feature varies.
// Throws PreconditionError for empty input or a row/label count mismatch.
DecisionTree fit_tree(const FeatureMatrix& x, std::span<const Label> y,
                      const TreeParams& params = {});

// Throws PreconditionError when the column count differs from training.
std::vector<Label> predict(const DecisionTree& tree, const FeatureMatrix& x);

// GraphViz digraph; pre-order node numbering.
std::string export_dot(const DecisionTree& tree,
                       std::span<const std::string> feature_names);

nlohmann::json to_json(const DecisionTree& tree);

}  // namespace ipfaudit
