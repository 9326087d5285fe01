#include "mocaprec/forest.hpp"

#include "mocaprec/error.hpp"
#include "mocaprec/parallel.hpp"
#include "mocaprec/rng.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace mocaprec {

ForestConfig ForestConfig::random_forest(int n_trees) {
  ForestConfig c;
  c.n_trees = n_trees;
  c.bootstrap = true;
  c.tree.split_mode = TreeConfig::SplitMode::best;
  return c;
}

ForestConfig ForestConfig::extra_trees(int n_trees) {
  ForestConfig c;
  c.n_trees = n_trees;
  c.bootstrap = false;
  c.tree.split_mode = TreeConfig::SplitMode::random;
  return c;
}

void ForestConfig::validate() const {
  if (n_trees < 1) raise(Err::BadConfig, "n_trees must be >= 1");
  tree.validate();
}

namespace {

std::vector<int> class_list(const std::vector<int>& labels) {
  std::set<int> uniq(labels.begin(), labels.end());
  return {uniq.begin(), uniq.end()};
}

std::vector<int> to_class_ids(const std::vector<int>& labels, const std::vector<int>& classes) {
  std::vector<int> ids(labels.size());
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const auto it = std::lower_bound(classes.begin(), classes.end(), labels[i]);
    ids[i] = static_cast<int>(it - classes.begin());
  }
  return ids;
}

} // namespace

ForestModel train_forest(const MatrixX& X, const std::vector<int>& labels,
                         const ForestConfig& config, std::uint64_t seed, int threads) {
  config.validate();
  const auto n = static_cast<std::size_t>(X.rows());
  if (n == 0 || labels.size() != n)
    raise(Err::EmptyData, "train_forest needs a nonempty matrix with one label per row");

  ForestModel model;
  model.classes = class_list(labels);
  model.config = config;
  model.seed = seed;
  model.trees.resize(static_cast<std::size_t>(config.n_trees));
  const std::vector<int> y = to_class_ids(labels, model.classes);

  parallel_for(model.trees.size(), threads, [&](std::size_t t) {
    const std::uint64_t tree_seed = derive_seed(seed, 101, t);
    std::vector<Index> bag;
    bag.reserve(n);
    if (config.bootstrap) {
      Rng bag_rng(derive_seed(seed, 103, t));
      for (std::size_t i = 0; i < n; ++i)
        bag.push_back(static_cast<Index>(bag_rng.below(n)));
    } else {
      for (std::size_t i = 0; i < n; ++i) bag.push_back(static_cast<Index>(i));
    }
    model.trees[t] = train_tree(X, y, static_cast<int>(model.classes.size()), config.tree,
                                tree_seed, bag);
  });
  return model;
}

VectorX ForestModel::predict_proba_row(const Eigen::Ref<const VectorX>& row) const {
  VectorX acc = VectorX::Zero(n_classes());
  VectorX dist(n_classes());
  const auto at = [&row](int f) { return row(f); };
  for (const DecisionTree& tree : trees) {
    tree.leaf_distribution(tree.leaf_for(at), dist);
    acc += dist;
  }
  return acc / static_cast<double>(trees.size());
}

MatrixX ForestModel::predict_proba(const MatrixX& X, int threads) const {
  MatrixX proba(X.rows(), n_classes());
  parallel_for(static_cast<std::size_t>(X.rows()), threads, [&](std::size_t r) {
    proba.row(static_cast<Index>(r)) =
        predict_proba_row(X.row(static_cast<Index>(r)).transpose()).transpose();
  });
  return proba;
}

std::vector<int> ForestModel::predict(const MatrixX& X, int threads) const {
  const MatrixX proba = predict_proba(X, threads);
  std::vector<int> out(static_cast<std::size_t>(X.rows()));
  for (Index r = 0; r < X.rows(); ++r) {
    Index best = 0;
    proba.row(r).maxCoeff(&best);
    out[static_cast<std::size_t>(r)] = classes[static_cast<std::size_t>(best)];
  }
  return out;
}

VectorX ForestModel::importances(int n_features) const {
  VectorX acc = VectorX::Zero(n_features);
  for (const DecisionTree& tree : trees) {
    VectorX gains = tree.feature_gains(n_features);
    const double total = gains.sum();
    if (total > 0) acc += gains / total;
  }
  const double total = acc.sum();
  if (total > 0) acc /= total;
  return acc;
}

GaussianNb train_gaussian_nb(const MatrixX& X, const std::vector<int>& labels) {
  const Index n = X.rows();
  const Index p = X.cols();
  if (n == 0 || static_cast<Index>(labels.size()) != n)
    raise(Err::EmptyData, "train_gaussian_nb needs a nonempty matrix with one label per row");

  GaussianNb nb;
  nb.classes = class_list(labels);
  const auto n_classes = static_cast<Index>(nb.classes.size());
  const std::vector<int> y = to_class_ids(labels, nb.classes);

  nb.log_prior.resize(n_classes);
  nb.mean = MatrixX::Zero(n_classes, p);
  nb.variance = MatrixX::Zero(n_classes, p);
  VectorX counts = VectorX::Zero(n_classes);
  for (Index r = 0; r < n; ++r) {
    counts(y[static_cast<std::size_t>(r)]) += 1.0;
    nb.mean.row(y[static_cast<std::size_t>(r)]) += X.row(r);
  }
  for (Index c = 0; c < n_classes; ++c) nb.mean.row(c) /= counts(c);
  for (Index r = 0; r < n; ++r) {
    const auto d = X.row(r) - nb.mean.row(y[static_cast<std::size_t>(r)]);
    nb.variance.row(y[static_cast<std::size_t>(r)]) += d.cwiseProduct(d);
  }
  for (Index c = 0; c < n_classes; ++c) nb.variance.row(c) /= counts(c);

  // floor at 1e-9 x the largest overall feature variance (the usual smoothing)
  double max_var = 0.0;
  for (Index j = 0; j < p; ++j) {
    const double mu = X.col(j).mean();
    max_var = std::max(max_var, (X.col(j).array() - mu).square().mean());
  }
  double floor = 1e-9 * max_var;
  if (!(floor > 0)) floor = 1e-12;
  nb.variance = nb.variance.cwiseMax(floor);

  for (Index c = 0; c < n_classes; ++c)
    nb.log_prior(c) = std::log(counts(c) / static_cast<double>(n));
  return nb;
}

VectorX GaussianNb::predict_proba_row(const Eigen::Ref<const VectorX>& row) const {
  const auto n_classes = static_cast<Index>(classes.size());
  VectorX logp(n_classes);
  for (Index c = 0; c < n_classes; ++c) {
    double acc = log_prior(c);
    for (Index j = 0; j < mean.cols(); ++j) {
      const double var = variance(c, j);
      const double d = row(j) - mean(c, j);
      acc -= 0.5 * (std::log(2.0 * M_PI * var) + d * d / var);
    }
    logp(c) = acc;
  }
  // softmax with log-sum-exp shift
  const double shift = logp.maxCoeff();
  VectorX proba = (logp.array() - shift).exp();
  proba /= proba.sum();
  return proba;
}

MatrixX GaussianNb::predict_proba(const MatrixX& X) const {
  MatrixX proba(X.rows(), static_cast<Index>(classes.size()));
  for (Index r = 0; r < X.rows(); ++r)
    proba.row(r) = predict_proba_row(X.row(r).transpose()).transpose();
  return proba;
}

std::vector<int> GaussianNb::predict(const MatrixX& X) const {
  const MatrixX proba = predict_proba(X);
  std::vector<int> out(static_cast<std::size_t>(X.rows()));
  for (Index r = 0; r < X.rows(); ++r) {
    Index best = 0;
    proba.row(r).maxCoeff(&best);
    out[static_cast<std::size_t>(r)] = classes[static_cast<std::size_t>(best)];
  }
  return out;
}

} // namespace mocaprec
