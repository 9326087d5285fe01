#pragma once

#include "mocaprec/tree.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace mocaprec {

struct ForestConfig {
  int n_trees = 300;
  bool bootstrap = true; // RF bootstraps rows; Extra-Trees uses the full sample
  TreeConfig tree;

  static ForestConfig random_forest(int n_trees = 300);
  static ForestConfig extra_trees(int n_trees = 300);
  void validate() const;
};

struct ForestModel {
  std::vector<int> classes; // sorted label values
  std::vector<std::string> feature_names; // optional column binding
  ForestConfig config;
  std::uint64_t seed = 0;
  std::vector<DecisionTree> trees;

  int n_classes() const { return static_cast<int>(classes.size()); }

  // Mean of per-tree leaf distributions, accumulated in tree order.
  VectorX predict_proba_row(const Eigen::Ref<const VectorX>& row) const;
  MatrixX predict_proba(const MatrixX& X, int threads = 0) const;
  std::vector<int> predict(const MatrixX& X, int threads = 0) const;

  // Per-tree gains normalized to sum 1, averaged, then renormalized (trees
  // that never split contribute nothing).
  VectorX importances(int n_features) const;
};

// labels are raw label values; the class list is their sorted unique set.
ForestModel train_forest(const MatrixX& X, const std::vector<int>& labels,
                         const ForestConfig& config, std::uint64_t seed, int threads = 0);

// Gaussian naive Bayes baseline.
struct GaussianNb {
  std::vector<int> classes;
  VectorX log_prior;
  MatrixX mean;     // C x p
  MatrixX variance; // C x p, floored

  VectorX predict_proba_row(const Eigen::Ref<const VectorX>& row) const;
  MatrixX predict_proba(const MatrixX& X) const;
  std::vector<int> predict(const MatrixX& X) const;
};

GaussianNb train_gaussian_nb(const MatrixX& X, const std::vector<int>& labels);

} // namespace mocaprec
