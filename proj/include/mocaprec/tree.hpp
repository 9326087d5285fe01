#pragma once

#include "mocaprec/types.hpp"

#include <cstdint>
#include <vector>

namespace mocaprec {

struct TreeConfig {
  enum class SplitMode { best, random }; // best = CART/RF, random = Extra-Trees

  int max_depth = 0;            // 0 = unlimited
  int min_samples_leaf = 1;
  int n_candidate_features = 0; // 0 = floor(sqrt(p)), at least 1
  SplitMode split_mode = SplitMode::best;

  void validate() const;
  int candidates_for(int n_features) const;
};

// Flattened binary CART. Node i is a leaf iff left[i] < 0; leaves carry the
// training class counts, internal nodes the split and its impurity gain.
struct DecisionTree {
  std::vector<int> left;
  std::vector<int> right;
  std::vector<int> feature;
  std::vector<double> threshold;
  std::vector<std::vector<std::int64_t>> counts; // leaf class counts; empty for internal nodes
  std::vector<double> gain; // weighted Gini decrease, relative to the root sample count
  int n_classes = 0;

  int node_count() const { return static_cast<int>(left.size()); }
  bool is_leaf(int node) const { return left[static_cast<std::size_t>(node)] < 0; }

  template <class RowAccessor> // double operator()(int feature)
  int leaf_for(const RowAccessor& row) const {
    int node = 0;
    while (!is_leaf(node)) {
      const auto n = static_cast<std::size_t>(node);
      node = row(feature[n]) < threshold[n] ? left[n] : right[n];
    }
    return node;
  }

  // Leaf class distribution (counts normalized to sum 1).
  void leaf_distribution(int node, VectorX& out) const;

  // Per-feature summed split gain; not normalized.
  VectorX feature_gains(int n_features) const;
};

// y holds class ids in [0, n_classes). rows is the training bag (may repeat
// row indices, as bootstrap sampling does). Deterministic in seed.
DecisionTree train_tree(const MatrixX& X, const std::vector<int>& y, int n_classes,
                        const TreeConfig& config, std::uint64_t seed,
                        const std::vector<Index>& rows);

} // namespace mocaprec
