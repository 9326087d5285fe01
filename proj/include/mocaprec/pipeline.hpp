#pragma once

#include "mocaprec/config.hpp"
#include "mocaprec/confusion.hpp"
#include "mocaprec/ensemble.hpp"
#include "mocaprec/folds.hpp"
#include "mocaprec/manifest.hpp"
#include "mocaprec/model_io.hpp"

#include <functional>
#include <string>
#include <vector>

namespace mocaprec {

// Parsed + repaired + segmented + featurized dataset. Feature extraction is
// per-segment and label-free, so it happens once; selection and model fitting
// run per fold on the training rows only.
struct PipelineData {
  std::vector<TrialInfo> trials;
  FeatureMatrix features; // one row per segment
};

PipelineData load_and_featurize(const Manifest& manifest, const PipelineConfig& config,
                                int threads = 0);

struct TrainOutput {
  EnsembleModel model;
  SelectionReport selection;
  std::vector<LeaderboardEntry> leaderboard;
};

// Selection (chi-square + MDI) -> subsets -> candidate leaderboard -> top-5
// ensemble, all on the given rows.
TrainOutput train_pipeline(const FeatureMatrix& features, const PipelineConfig& config,
                           int threads = 0);

struct FoldMetrics {
  int fold = 0;
  int n_trials = 0;
  double trial_accuracy = 0.0;
  int n_segments = 0;
  double segment_accuracy = 0.0;
};

struct EvalReport {
  std::string scheme;
  std::string model;
  std::vector<FoldMetrics> folds;
  double pooled_accuracy = 0.0;
  double pooled_segment_accuracy = 0.0;
  ConfusionMatrix confusion{std::vector<int>{}};
  std::vector<std::vector<LeaderboardEntry>> fold_leaderboards; // ensemble runs only
};

// Test seam: per fold, the predictor returns (trial_id, predicted label) for
// every test trial. Metric accounting and the leakage guard live here.
using FoldPredictor =
    std::function<std::vector<std::pair<std::string, int>>(int fold, const Fold&)>;

EvalReport evaluate_with_predictor(const std::vector<TrialInfo>& trials, const FoldPlan& plan,
                                   const std::vector<int>& classes,
                                   const FoldPredictor& predictor);

FoldPlan make_fold_plan(const std::vector<TrialInfo>& trials, const PipelineConfig& config,
                        const std::string& scheme);

// Full protocol: fit the configured model per fold (selection included),
// predict held-out trials via segment voting, pool trial-level metrics.
EvalReport evaluate(const Manifest& manifest, const PipelineConfig& config,
                    const std::string& scheme, int threads = 0);
EvalReport evaluate_data(const PipelineData& data, const PipelineConfig& config,
                         const std::string& scheme, int threads = 0);

// summary.json, confusion.csv, leaderboard.csv under report_dir.
void write_report(const EvalReport& report, const std::string& report_dir);

struct PredictionRow {
  std::string trial_id;
  int label = kUnlabeled;
  std::vector<int> segment_labels;
};

std::vector<PredictionRow> predict_manifest(const LoadedModel& loaded, const Manifest& manifest,
                                            int threads = 0);
void write_predictions_csv(const std::vector<PredictionRow>& rows, const std::string& path);

} // namespace mocaprec
