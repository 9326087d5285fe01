#include "mocaprec/error.hpp"
#include "mocaprec/features.hpp"
#include "mocaprec/forest.hpp"

#include <set>

namespace mocaprec {

VectorX mdi_importances(const FeatureMatrix& m, int n_trees, const TreeConfig& tree_config,
                        std::uint64_t seed, int threads) {
  if (m.rows() < 10) raise(Err::EmptyData, "MDI probe needs at least 10 rows");
  const auto labels = m.labels();
  std::set<int> classes(labels.begin(), labels.end());
  classes.erase(kUnlabeled);
  if (classes.size() < 2) raise(Err::SingleClass, "MDI probe needs >= 2 classes");

  ForestConfig config = ForestConfig::random_forest(n_trees);
  config.tree = tree_config;
  const ForestModel probe = train_forest(m.values, labels, config, seed, threads);
  return probe.importances(static_cast<int>(m.cols()));
}

} // namespace mocaprec
