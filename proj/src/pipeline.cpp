#include "mocaprec/pipeline.hpp"

#include "mocaprec/csv.hpp"
#include "mocaprec/error.hpp"
#include "mocaprec/parallel.hpp"
#include "mocaprec/rng.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <filesystem>
#include <map>
#include <set>
#include <sstream>

namespace mocaprec {

namespace {

PipelineData load_and_featurize_impl(const Manifest& manifest, const PipelineConfig& config,
                                     const StreamCatalog& catalog, int threads) {
  config.validate();
  const MarkerSchema schema = config.schema();
  catalog.validate(schema);
  const SegmentSpec seg_spec = config.segment_spec();

  std::vector<std::shared_ptr<const Trial>> trials(manifest.rows.size());
  parallel_for(manifest.rows.size(), threads, [&](std::size_t i) {
    Trial trial = parse_trial_csv(manifest.rows[i].path, schema, manifest.rows[i],
                                  config.sample_rate_hz);
    trials[i] = std::make_shared<const Trial>(
        interpolate_gaps(std::move(trial), config.max_missing_fraction));
  });

  PipelineData data;
  std::vector<Segment> segments;
  for (const auto& trial : trials) {
    data.trials.push_back({trial->trial_id, trial->subject_id, trial->label});
    auto trial_segments = segment_trial(trial, seg_spec);
    segments.insert(segments.end(), trial_segments.begin(), trial_segments.end());
  }
  data.features = build_feature_matrix(segments, catalog, threads);
  return data;
}

FeatureMatrix rows_subset(const FeatureMatrix& m, const std::vector<Index>& rows) {
  FeatureMatrix out;
  out.names = m.names;
  out.values.resize(static_cast<Index>(rows.size()), m.cols());
  out.meta.resize(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    out.values.row(static_cast<Index>(i)) = m.values.row(rows[i]);
    out.meta[i] = m.meta[static_cast<std::size_t>(rows[i])];
  }
  return out;
}

MatrixX columns_by_name(const FeatureMatrix& m, const std::vector<std::string>& names) {
  std::map<std::string, Index> index;
  for (std::size_t i = 0; i < m.names.size(); ++i)
    index.emplace(m.names[i], static_cast<Index>(i));
  MatrixX out(m.rows(), static_cast<Index>(names.size()));
  for (std::size_t j = 0; j < names.size(); ++j) {
    const auto it = index.find(names[j]);
    if (it == index.end()) raise(Err::BadConfig, "feature " + names[j] + " missing from matrix");
    out.col(static_cast<Index>(j)) = m.values.col(it->second);
  }
  return out;
}

SelectionReport run_selection(const FeatureMatrix& train, const PipelineConfig& config,
                              int threads) {
  const VectorX chi2 = chi_square_scores(train);
  const VectorX mdi = mdi_importances(train, config.mdi_trees, config.tree_config(),
                                      derive_seed(config.seed, 401), threads);
  return select_features(train.names, chi2, mdi, config.feature_target);
}

} // namespace

PipelineData load_and_featurize(const Manifest& manifest, const PipelineConfig& config,
                                int threads) {
  return load_and_featurize_impl(manifest, config, config.catalog(), threads);
}

TrainOutput train_pipeline(const FeatureMatrix& features, const PipelineConfig& config,
                           int threads) {
  for (const auto& meta : features.meta)
    if (meta.label == kUnlabeled)
      raise(Err::BadLabel, "training requires labeled trials; " + meta.trial_id + " is unlabeled");

  TrainOutput out;
  out.selection = run_selection(features, config, threads);
  const auto subsets =
      partition_feature_subsets(out.selection.selected, config.subset_count, config.subset_size);
  out.model = train_ensemble(features, subsets, config.ensemble_config(), threads,
                             &out.leaderboard);
  return out;
}

FoldPlan make_fold_plan(const std::vector<TrialInfo>& trials, const PipelineConfig& config,
                        const std::string& scheme) {
  if (scheme == "kfold") return kfold_splits(trials, config.kfold_k, derive_seed(config.seed, 411));
  if (scheme == "loso") return loso_splits(trials);
  if (scheme == "loto") return loto_splits(trials);
  raise(Err::BadConfig, "unknown scheme " + scheme);
}

EvalReport evaluate_with_predictor(const std::vector<TrialInfo>& trials, const FoldPlan& plan,
                                   const std::vector<int>& classes,
                                   const FoldPredictor& predictor) {
  validate_fold_plan(plan, trials);
  std::map<std::string, int> truth;
  for (const auto& t : trials) truth[t.trial_id] = t.label;

  EvalReport report;
  report.scheme = plan.scheme;
  report.confusion = ConfusionMatrix(classes);
  long long pooled_correct = 0, pooled_total = 0;
  for (std::size_t f = 0; f < plan.folds.size(); ++f) {
    const auto predictions = predictor(static_cast<int>(f), plan.folds[f]);
    std::set<std::string> expected(plan.folds[f].test_ids.begin(), plan.folds[f].test_ids.end());
    if (predictions.size() != expected.size())
      raise(Err::LengthMismatch, "fold " + std::to_string(f) + " predicted " +
                                     std::to_string(predictions.size()) + " of " +
                                     std::to_string(expected.size()) + " trials");
    FoldMetrics metrics;
    metrics.fold = static_cast<int>(f);
    for (const auto& [trial_id, predicted] : predictions) {
      if (!expected.count(trial_id))
        raise(Err::BadConfig, "prediction for trial " + trial_id + " outside fold test set");
      const int true_label = truth.at(trial_id);
      report.confusion.add(true_label, predicted);
      ++metrics.n_trials;
      if (predicted == true_label) metrics.trial_accuracy += 1.0;
    }
    pooled_correct += static_cast<long long>(metrics.trial_accuracy);
    pooled_total += metrics.n_trials;
    metrics.trial_accuracy =
        metrics.n_trials > 0 ? metrics.trial_accuracy / metrics.n_trials : 0.0;
    report.folds.push_back(metrics);
  }
  report.pooled_accuracy =
      pooled_total > 0 ? static_cast<double>(pooled_correct) / pooled_total : 0.0;
  return report;
}

EvalReport evaluate_data(const PipelineData& data, const PipelineConfig& config,
                         const std::string& scheme, int threads) {
  for (const auto& t : data.trials)
    if (t.label == kUnlabeled)
      raise(Err::BadLabel, "evaluation requires labeled trials; " + t.trial_id + " is unlabeled");

  std::set<int> class_set;
  for (const auto& t : data.trials) class_set.insert(t.label);
  if (class_set.size() < 2) raise(Err::SingleClass, "evaluation needs >= 2 classes");
  const std::vector<int> classes(class_set.begin(), class_set.end());

  const FoldPlan plan = make_fold_plan(data.trials, config, scheme);
  const FeatureMatrix& all = data.features;

  std::vector<std::vector<LeaderboardEntry>> leaderboards(plan.folds.size());
  std::vector<std::pair<long long, long long>> segment_stats(plan.folds.size()); // correct, total

  FoldPredictor predictor = [&](int fold_index, const Fold& fold) {
    const std::set<std::string> test_set(fold.test_ids.begin(), fold.test_ids.end());
    std::vector<Index> train_rows, test_rows;
    for (Index r = 0; r < all.rows(); ++r) {
      if (test_set.count(all.meta[static_cast<std::size_t>(r)].trial_id))
        test_rows.push_back(r);
      else
        train_rows.push_back(r);
    }
    const FeatureMatrix train = rows_subset(all, train_rows);
    const FeatureMatrix test = rows_subset(all, test_rows);

    std::vector<int> seg_labels;
    MatrixX seg_proba;
    if (config.model == "ensemble") {
      PipelineConfig fold_config = config;
      fold_config.seed = derive_seed(config.seed, 421, static_cast<std::uint64_t>(fold_index));
      const TrainOutput trained = train_pipeline(train, fold_config, threads);
      leaderboards[static_cast<std::size_t>(fold_index)] = trained.leaderboard;
      const SegmentPredictions predictions = predict_segments(trained.model, test, threads);
      seg_labels = predictions.labels;
      // expand onto the evaluation class list (a fold may miss a class)
      seg_proba = MatrixX::Zero(predictions.proba.rows(), static_cast<Index>(classes.size()));
      for (std::size_t k = 0; k < trained.model.classes.size(); ++k) {
        const auto it =
            std::lower_bound(classes.begin(), classes.end(), trained.model.classes[k]);
        seg_proba.col(static_cast<Index>(it - classes.begin())) =
            predictions.proba.col(static_cast<Index>(k));
      }
    } else {
      PipelineConfig fold_config = config;
      fold_config.seed = derive_seed(config.seed, 421, static_cast<std::uint64_t>(fold_index));
      const SelectionReport selection = run_selection(train, fold_config, threads);
      const MatrixX x_train = columns_by_name(train, selection.selected);
      const MatrixX x_test = columns_by_name(test, selection.selected);
      const std::vector<int> y_train = train.labels();

      std::vector<int> model_classes;
      MatrixX proba;
      if (config.model == "nb") {
        const GaussianNb nb = train_gaussian_nb(x_train, y_train);
        proba = nb.predict_proba(x_test);
        model_classes = nb.classes;
      } else {
        ForestConfig fc = config.model == "rf"
                              ? ForestConfig::random_forest(config.forest_trees)
                              : ForestConfig::extra_trees(config.forest_trees);
        fc.tree = fold_config.tree_config();
        if (config.model == "et") fc.tree.split_mode = TreeConfig::SplitMode::random;
        const ForestModel forest =
            train_forest(x_train, y_train, fc, derive_seed(fold_config.seed, 431), threads);
        proba = forest.predict_proba(x_test, threads);
        model_classes = forest.classes;
      }
      seg_proba = MatrixX::Zero(proba.rows(), static_cast<Index>(classes.size()));
      for (std::size_t k = 0; k < model_classes.size(); ++k) {
        const auto it = std::lower_bound(classes.begin(), classes.end(), model_classes[k]);
        seg_proba.col(static_cast<Index>(it - classes.begin())) = proba.col(static_cast<Index>(k));
      }
      seg_labels.resize(static_cast<std::size_t>(seg_proba.rows()));
      for (Index r = 0; r < seg_proba.rows(); ++r) {
        Index best = 0;
        seg_proba.row(r).maxCoeff(&best);
        seg_labels[static_cast<std::size_t>(r)] = classes[static_cast<std::size_t>(best)];
      }
    }

    auto& stats = segment_stats[static_cast<std::size_t>(fold_index)];
    for (std::size_t i = 0; i < seg_labels.size(); ++i) {
      ++stats.second;
      if (seg_labels[i] == test.meta[i].label) ++stats.first;
    }

    const auto trial_predictions = vote_by_trial(test.meta, seg_labels, seg_proba, classes);
    std::vector<std::pair<std::string, int>> out;
    out.reserve(trial_predictions.size());
    for (const auto& p : trial_predictions) out.emplace_back(p.trial_id, p.label);
    return out;
  };

  EvalReport report = evaluate_with_predictor(data.trials, plan, classes, predictor);
  report.model = config.model;
  long long seg_correct = 0, seg_total = 0;
  for (std::size_t f = 0; f < plan.folds.size(); ++f) {
    report.folds[f].n_segments = static_cast<int>(segment_stats[f].second);
    report.folds[f].segment_accuracy =
        segment_stats[f].second > 0
            ? static_cast<double>(segment_stats[f].first) / segment_stats[f].second
            : 0.0;
    seg_correct += segment_stats[f].first;
    seg_total += segment_stats[f].second;
  }
  report.pooled_segment_accuracy =
      seg_total > 0 ? static_cast<double>(seg_correct) / seg_total : 0.0;
  if (config.model == "ensemble") report.fold_leaderboards = std::move(leaderboards);
  return report;
}

EvalReport evaluate(const Manifest& manifest, const PipelineConfig& config,
                    const std::string& scheme, int threads) {
  const PipelineData data = load_and_featurize(manifest, config, threads);
  return evaluate_data(data, config, scheme, threads);
}

void write_report(const EvalReport& report, const std::string& report_dir) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(report_dir, ec);
  if (ec) raise(Err::IoError, "cannot create report dir " + report_dir);

  nlohmann::ordered_json summary;
  summary["scheme"] = report.scheme;
  summary["model"] = report.model;
  summary["pooled_accuracy"] = report.pooled_accuracy;
  summary["pooled_segment_accuracy"] = report.pooled_segment_accuracy;
  summary["n_trials"] = report.confusion.total();
  summary["folds"] = nlohmann::ordered_json::array();
  for (const auto& fold : report.folds) {
    summary["folds"].push_back({{"fold", fold.fold},
                                {"n_trials", fold.n_trials},
                                {"trial_accuracy", fold.trial_accuracy},
                                {"n_segments", fold.n_segments},
                                {"segment_accuracy", fold.segment_accuracy}});
  }
  csv::write_file_atomic((fs::path(report_dir) / "summary.json").string(), summary.dump(2) + "\n");
  csv::write_file_atomic((fs::path(report_dir) / "confusion.csv").string(),
                         report.confusion.to_csv());

  std::ostringstream board;
  board << "fold,model,subset_index,cv_accuracy,selected\n";
  for (std::size_t f = 0; f < report.fold_leaderboards.size(); ++f)
    for (const auto& entry : report.fold_leaderboards[f])
      board << f << ',' << to_string(entry.kind) << ',' << entry.subset_index << ','
            << csv::format_double(entry.cv_accuracy) << ',' << (entry.selected ? 1 : 0) << '\n';
  csv::write_file_atomic((fs::path(report_dir) / "leaderboard.csv").string(), board.str());
}

std::vector<PredictionRow> predict_manifest(const LoadedModel& loaded, const Manifest& manifest,
                                            int threads) {
  const PipelineData data =
      load_and_featurize_impl(manifest, loaded.config, loaded.catalog, threads);
  const SegmentPredictions predictions =
      predict_segments(loaded.model, data.features, threads);
  const auto trial_predictions = vote_by_trial(data.features.meta, predictions.labels,
                                               predictions.proba, loaded.model.classes);
  std::vector<PredictionRow> rows;
  rows.reserve(trial_predictions.size());
  for (const auto& p : trial_predictions) rows.push_back({p.trial_id, p.label, p.segment_labels});
  return rows;
}

void write_predictions_csv(const std::vector<PredictionRow>& rows, const std::string& path) {
  std::ostringstream out;
  out << "trial_id,predicted_label,segment_labels\n";
  for (const auto& row : rows) {
    out << row.trial_id << ',' << row.label << ',';
    for (std::size_t i = 0; i < row.segment_labels.size(); ++i)
      out << (i ? ";" : "") << row.segment_labels[i];
    out << '\n';
  }
  csv::write_file_atomic(path, out.str());
}

} // namespace mocaprec
