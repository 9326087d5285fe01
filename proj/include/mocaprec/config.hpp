#pragma once

#include "mocaprec/ensemble.hpp"
#include "mocaprec/segment.hpp"
#include "mocaprec/streams.hpp"
#include "mocaprec/tree.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace mocaprec {

// Every pipeline tunable, loadable from a flat key=value file with `#`
// comments. Unknown keys are rejected, all values validated.
struct PipelineConfig {
  // windowing
  double window_s = 30.0;
  double overlap_fraction = 0.5;
  double sample_rate_hz = 100.0;
  double max_missing_fraction = 0.2;

  // marker schema and stream catalog
  std::vector<std::string> markers; // empty = built-in 13-marker schema
  std::string catalog_path;         // empty = built-in catalog

  // feature selection
  int feature_target = 496;
  int subset_count = 13;
  int subset_size = 200;
  int mdi_trees = 200;

  // forests
  int candidate_trees = 100;
  int forest_trees = 300;
  int max_depth = 0; // 0 = unlimited
  int min_samples_leaf = 1;
  int candidate_features = 0; // 0 = floor(sqrt(p))

  // training / evaluation protocol
  int cv_folds = 10; // inner leaderboard scoring
  int kfold_k = 10;  // evaluation folds
  std::string scheme = "kfold";              // kfold | loso | loto
  std::string model = "ensemble";            // ensemble | nb | rf | et
  std::string ensemble_composition = "auto"; // auto | 4rf1et
  std::uint64_t seed = 42;

  void validate() const;

  MarkerSchema schema() const;
  StreamCatalog catalog() const; // loads catalog_path when set
  SegmentSpec segment_spec() const;
  TreeConfig tree_config() const;
  EnsembleTrainConfig ensemble_config() const;
};

PipelineConfig parse_config(const std::vector<std::string>& lines, const std::string& origin);
PipelineConfig load_config(const std::string& path);
std::string config_to_text(const PipelineConfig& config);

} // namespace mocaprec
