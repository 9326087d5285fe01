#include "mocaprec/tree.hpp"

#include "mocaprec/error.hpp"
#include "mocaprec/rng.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace mocaprec {

void TreeConfig::validate() const {
  if (max_depth < 0) raise(Err::BadConfig, "max_depth must be >= 0");
  if (min_samples_leaf < 1) raise(Err::BadConfig, "min_samples_leaf must be >= 1");
  if (n_candidate_features < 0) raise(Err::BadConfig, "n_candidate_features must be >= 0");
}

int TreeConfig::candidates_for(int n_features) const {
  if (n_candidate_features > 0) return std::min(n_candidate_features, n_features);
  const int k = static_cast<int>(std::floor(std::sqrt(static_cast<double>(n_features))));
  return std::max(1, std::min(k, n_features));
}

void DecisionTree::leaf_distribution(int node, VectorX& out) const {
  const auto& c = counts[static_cast<std::size_t>(node)];
  out.resize(n_classes);
  std::int64_t total = 0;
  for (std::int64_t v : c) total += v;
  for (int i = 0; i < n_classes; ++i)
    out(i) = total > 0 ? static_cast<double>(c[static_cast<std::size_t>(i)]) /
                             static_cast<double>(total)
                       : 0.0;
}

VectorX DecisionTree::feature_gains(int n_features) const {
  VectorX gains = VectorX::Zero(n_features);
  for (int node = 0; node < node_count(); ++node) {
    if (is_leaf(node)) continue;
    gains(feature[static_cast<std::size_t>(node)]) += gain[static_cast<std::size_t>(node)];
  }
  return gains;
}

namespace {

double gini(const std::vector<std::int64_t>& counts, std::int64_t total) {
  if (total <= 0) return 0.0;
  double sq = 0.0;
  for (std::int64_t c : counts) {
    const double p = static_cast<double>(c) / static_cast<double>(total);
    sq += p * p;
  }
  return 1.0 - sq;
}

struct SplitCandidate {
  bool valid = false;
  int feature = -1;
  double threshold = 0.0;
  double child_impurity = 0.0; // (mL*GL + mR*GR) / m, to minimize
};

struct Builder {
  const MatrixX& X;
  const std::vector<int>& y;
  int n_classes;
  const TreeConfig& config;
  Rng rng;
  std::vector<Index> rows; // permuted in place; node = contiguous range

  DecisionTree tree;
  // reused across nodes and candidates; allocation churn dominates otherwise
  std::vector<std::pair<double, int>> scratch; // (value, class)
  std::vector<std::int64_t> left_counts;
  std::vector<std::int64_t> right_counts;
  std::vector<std::size_t> feature_pool;

  // partial Fisher-Yates over a persistent pool; uniform k-subsets regardless
  // of the pool's previous arrangement
  std::size_t draw_candidates(std::size_t k) {
    const std::size_t p = feature_pool.size();
    if (k > p) k = p;
    for (std::size_t i = 0; i < k; ++i) {
      const std::size_t j = i + static_cast<std::size_t>(rng.below(p - i));
      std::swap(feature_pool[i], feature_pool[j]);
    }
    return k;
  }

  int new_node() {
    tree.left.push_back(-1);
    tree.right.push_back(-1);
    tree.feature.push_back(-1);
    tree.threshold.push_back(0.0);
    tree.counts.emplace_back();
    tree.gain.push_back(0.0);
    return tree.node_count() - 1;
  }

  void count_classes(std::size_t begin, std::size_t end, std::vector<std::int64_t>& counts) {
    counts.assign(static_cast<std::size_t>(n_classes), 0);
    for (std::size_t i = begin; i < end; ++i)
      ++counts[static_cast<std::size_t>(y[static_cast<std::size_t>(rows[i])])];
  }

  SplitCandidate best_split_for_feature(int f, std::size_t begin, std::size_t end,
                                        const std::vector<std::int64_t>& node_counts) {
    SplitCandidate best;
    const auto m = static_cast<std::int64_t>(end - begin);
    const auto col = X.col(f);

    if (config.split_mode == TreeConfig::SplitMode::random) {
      double lo = col(rows[begin]);
      double hi = lo;
      for (std::size_t i = begin + 1; i < end; ++i) {
        const double v = col(rows[i]);
        lo = std::min(lo, v);
        hi = std::max(hi, v);
      }
      if (!(hi > lo)) return best;
      // threshold uniform in (lo, hi]; rows with value < t go left, so both
      // sides are nonempty by construction
      const double t = lo + (hi - lo) * (1.0 - rng.real());
      left_counts.assign(static_cast<std::size_t>(n_classes), 0);
      std::int64_t m_left = 0;
      for (std::size_t i = begin; i < end; ++i) {
        if (col(rows[i]) < t) {
          ++left_counts[static_cast<std::size_t>(y[static_cast<std::size_t>(rows[i])])];
          ++m_left;
        }
      }
      const std::int64_t m_right = m - m_left;
      if (m_left < config.min_samples_leaf || m_right < config.min_samples_leaf) return best;
      right_counts.resize(static_cast<std::size_t>(n_classes));
      for (int c = 0; c < n_classes; ++c)
        right_counts[static_cast<std::size_t>(c)] =
            node_counts[static_cast<std::size_t>(c)] - left_counts[static_cast<std::size_t>(c)];
      best.valid = true;
      best.feature = f;
      best.threshold = t;
      best.child_impurity = (static_cast<double>(m_left) * gini(left_counts, m_left) +
                             static_cast<double>(m_right) * gini(right_counts, m_right)) /
                            static_cast<double>(m);
      return best;
    }

    // best mode: sort node samples by value, sweep every boundary between
    // distinct values
    scratch.clear();
    scratch.reserve(static_cast<std::size_t>(m));
    for (std::size_t i = begin; i < end; ++i)
      scratch.emplace_back(col(rows[i]), y[static_cast<std::size_t>(rows[i])]);
    std::sort(scratch.begin(), scratch.end());
    if (!(scratch.back().first > scratch.front().first)) return best;

    left_counts.assign(static_cast<std::size_t>(n_classes), 0);
    right_counts = node_counts;
    double best_impurity = 0.0;
    for (std::int64_t i = 1; i < m; ++i) {
      const auto& prev = scratch[static_cast<std::size_t>(i - 1)];
      ++left_counts[static_cast<std::size_t>(prev.second)];
      --right_counts[static_cast<std::size_t>(prev.second)];
      const auto& cur = scratch[static_cast<std::size_t>(i)];
      if (!(cur.first > prev.first)) continue;
      if (i < config.min_samples_leaf || m - i < config.min_samples_leaf) continue;
      const double impurity = (static_cast<double>(i) * gini(left_counts, i) +
                               static_cast<double>(m - i) * gini(right_counts, m - i)) /
                              static_cast<double>(m);
      if (!best.valid || impurity < best_impurity) {
        best.valid = true;
        best.feature = f;
        best.threshold = prev.first + 0.5 * (cur.first - prev.first);
        best_impurity = impurity;
      }
    }
    best.child_impurity = best_impurity;
    return best;
  }

  void build(int node, std::size_t begin, std::size_t end, int depth, std::size_t root_size) {
    std::vector<std::int64_t> node_counts;
    count_classes(begin, end, node_counts);
    const auto m = static_cast<std::int64_t>(end - begin);
    const double node_impurity = gini(node_counts, m);

    const bool depth_capped = config.max_depth > 0 && depth >= config.max_depth;
    if (node_impurity == 0.0 || depth_capped || m < 2 * config.min_samples_leaf) {
      tree.counts[static_cast<std::size_t>(node)] = std::move(node_counts);
      return;
    }

    const int p = static_cast<int>(X.cols());
    const std::size_t k = draw_candidates(static_cast<std::size_t>(config.candidates_for(p)));
    SplitCandidate best;
    for (std::size_t c = 0; c < k; ++c) {
      SplitCandidate cand =
          best_split_for_feature(static_cast<int>(feature_pool[c]), begin, end, node_counts);
      if (cand.valid && (!best.valid || cand.child_impurity < best.child_impurity)) best = cand;
    }
    if (!best.valid) {
      tree.counts[static_cast<std::size_t>(node)] = std::move(node_counts);
      return;
    }

    const auto col = X.col(best.feature);
    auto mid_it = std::partition(rows.begin() + static_cast<std::ptrdiff_t>(begin),
                                 rows.begin() + static_cast<std::ptrdiff_t>(end),
                                 [&](Index r) { return col(r) < best.threshold; });
    const auto mid = static_cast<std::size_t>(mid_it - rows.begin());

    const auto n = static_cast<std::size_t>(node);
    tree.feature[n] = best.feature;
    tree.threshold[n] = best.threshold;
    tree.gain[n] = static_cast<double>(m) / static_cast<double>(root_size) *
                   (node_impurity - best.child_impurity);
    const int left = new_node();
    const int right = new_node();
    tree.left[n] = left;
    tree.right[n] = right;
    build(left, begin, mid, depth + 1, root_size);
    build(right, mid, end, depth + 1, root_size);
  }
};

} // namespace

DecisionTree train_tree(const MatrixX& X, const std::vector<int>& y, int n_classes,
                        const TreeConfig& config, std::uint64_t seed,
                        const std::vector<Index>& rows) {
  config.validate();
  if (X.rows() == 0 || rows.empty()) raise(Err::EmptyData, "train_tree needs at least one row");
  if (n_classes < 1) raise(Err::EmptyData, "train_tree needs at least one class");

  Builder builder{X, y, n_classes, config, Rng(seed), rows, {}, {}, {}, {}, {}};
  builder.feature_pool.resize(static_cast<std::size_t>(X.cols()));
  std::iota(builder.feature_pool.begin(), builder.feature_pool.end(), 0);
  builder.tree.n_classes = n_classes;
  const int root = builder.new_node();
  builder.build(root, 0, builder.rows.size(), 0, builder.rows.size());
  return std::move(builder.tree);
}

} // namespace mocaprec
