#pragma once

#include "mocaprec/features.hpp"
#include "mocaprec/forest.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace mocaprec {

inline constexpr int kEnsembleMembers = 5;

enum class ModelKind { rf, et };
const char* to_string(ModelKind kind);

struct LeaderboardEntry {
  ModelKind kind = ModelKind::rf;
  int subset_index = 0;
  double cv_accuracy = 0.0;
  bool selected = false;
};

struct EnsembleMember {
  ModelKind kind = ModelKind::rf;
  int subset_index = 0;
  double cv_accuracy = 0.0;
  std::vector<std::string> features; // the subset mask, in rank order
  ForestModel forest;
};

struct EnsembleModel {
  std::vector<int> classes;
  std::vector<EnsembleMember> members; // exactly kEnsembleMembers
};

struct EnsembleTrainConfig {
  int candidate_trees = 100; // forests used for leaderboard scoring
  int final_trees = 300;     // retrained winners
  TreeConfig tree;
  int cv_folds = 10;
  bool pin_4rf_1et = false; // force the published 4 RF + 1 ET composition
  std::uint64_t seed = 42;
};

// Plurality over the member votes; ties go to the highest summed probability
// among the tied labels, then to the smallest label value.
int majority_vote(const std::vector<int>& votes, const std::vector<VectorX>& probas,
                  const std::vector<int>& classes);

// Trains RF and ET candidates on every subset, scores each by trial-level
// stratified k-fold accuracy, keeps the top five and retrains them on the
// full data. The leaderboard covers all candidates in candidate order.
EnsembleModel train_ensemble(const FeatureMatrix& matrix,
                             const std::vector<FeatureSubset>& subsets,
                             const EnsembleTrainConfig& config, int threads = 0,
                             std::vector<LeaderboardEntry>* leaderboard = nullptr);

struct SegmentPredictions {
  std::vector<int> labels; // per row
  MatrixX proba;           // per row, mean over members, columns = classes
};

SegmentPredictions predict_segments(const EnsembleModel& model, const FeatureMatrix& matrix,
                                    int threads = 0);

struct TrialPrediction {
  std::string trial_id;
  int label = kUnlabeled;
  std::vector<int> segment_labels;
};

// Groups rows by trial (order of first appearance) and votes: plurality over
// segment labels, ties by summed segment probability, then smallest label.
std::vector<TrialPrediction> vote_by_trial(const std::vector<RowMeta>& meta,
                                           const std::vector<int>& segment_labels,
                                           const MatrixX& segment_proba,
                                           const std::vector<int>& classes);

} // namespace mocaprec
