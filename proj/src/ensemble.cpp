#include "mocaprec/ensemble.hpp"

#include "mocaprec/error.hpp"
#include "mocaprec/folds.hpp"
#include "mocaprec/parallel.hpp"
#include "mocaprec/rng.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <unordered_map>

namespace mocaprec {

const char* to_string(ModelKind kind) { return kind == ModelKind::rf ? "rf" : "et"; }

int majority_vote(const std::vector<int>& votes, const std::vector<VectorX>& probas,
                  const std::vector<int>& classes) {
  if (votes.empty()) raise(Err::EmptyData, "majority_vote needs at least one vote");

  std::map<int, int> tally;
  for (int v : votes) ++tally[v];
  int best_count = 0;
  for (const auto& [label, count] : tally) best_count = std::max(best_count, count);

  std::vector<int> tied;
  for (const auto& [label, count] : tally)
    if (count == best_count) tied.push_back(label);
  if (tied.size() == 1) return tied.front();

  // summed probability across members, per tied label
  auto class_index = [&](int label) {
    const auto it = std::lower_bound(classes.begin(), classes.end(), label);
    if (it == classes.end() || *it != label)
      raise(Err::BadLabel, "vote label " + std::to_string(label) + " not in class list");
    return static_cast<Index>(it - classes.begin());
  };
  int best_label = tied.front();
  double best_mass = -1.0;
  for (int label : tied) { // ascending: equal mass keeps the smallest label
    double mass = 0.0;
    for (const auto& proba : probas) mass += proba(class_index(label));
    if (mass > best_mass) {
      best_mass = mass;
      best_label = label;
    }
  }
  return best_label;
}

namespace {

struct Candidate {
  ModelKind kind;
  int subset_index;
};

MatrixX gather_columns(const FeatureMatrix& matrix, const std::vector<std::string>& names) {
  std::unordered_map<std::string, Index> index;
  index.reserve(matrix.names.size());
  for (std::size_t i = 0; i < matrix.names.size(); ++i)
    index.emplace(matrix.names[i], static_cast<Index>(i));
  MatrixX out(matrix.rows(), static_cast<Index>(names.size()));
  for (std::size_t j = 0; j < names.size(); ++j) {
    const auto it = index.find(names[j]);
    if (it == index.end())
      raise(Err::BadConfig, "feature " + names[j] + " not present in matrix");
    out.col(static_cast<Index>(j)) = matrix.values.col(it->second);
  }
  return out;
}

} // namespace

EnsembleModel train_ensemble(const FeatureMatrix& matrix,
                             const std::vector<FeatureSubset>& subsets,
                             const EnsembleTrainConfig& config, int threads,
                             std::vector<LeaderboardEntry>* leaderboard) {
  matrix.validate();
  if (subsets.empty()) raise(Err::BadConfig, "no feature subsets");

  // distinct labeled trials, in row order
  std::vector<TrialInfo> trials;
  std::set<std::string> seen;
  for (const auto& meta : matrix.meta) {
    if (meta.label == kUnlabeled)
      raise(Err::BadLabel, "unlabeled row for trial " + meta.trial_id);
    if (seen.insert(meta.trial_id).second)
      trials.push_back({meta.trial_id, meta.subject_id, meta.label});
  }
  if (trials.size() < 20)
    raise(Err::TooFewTrials, "ensemble training needs >= 20 trials, have " +
                                 std::to_string(trials.size()));
  std::set<int> class_set;
  for (const auto& t : trials) class_set.insert(t.label);
  if (class_set.size() < 2) raise(Err::SingleClass, "ensemble training needs >= 2 classes");
  const std::vector<int> classes(class_set.begin(), class_set.end());

  const FoldPlan plan = kfold_splits(trials, config.cv_folds, derive_seed(config.seed, 211));

  // row index sets per fold
  const std::size_t n_folds = plan.folds.size();
  std::vector<std::vector<Index>> fold_train_rows(n_folds), fold_test_rows(n_folds);
  for (std::size_t f = 0; f < n_folds; ++f) {
    std::set<std::string> test(plan.folds[f].test_ids.begin(), plan.folds[f].test_ids.end());
    for (Index r = 0; r < matrix.rows(); ++r) {
      if (test.count(matrix.meta[static_cast<std::size_t>(r)].trial_id))
        fold_test_rows[f].push_back(r);
      else
        fold_train_rows[f].push_back(r);
    }
  }

  std::vector<Candidate> candidates;
  for (const auto& s : subsets) candidates.push_back({ModelKind::rf, s.index});
  for (const auto& s : subsets) candidates.push_back({ModelKind::et, s.index});

  // (candidate, fold) tasks; correct/total per task, reduced in index order
  struct TaskResult {
    int correct = 0;
    int total = 0;
  };
  std::vector<TaskResult> results(candidates.size() * n_folds);
  std::vector<MatrixX> candidate_columns(candidates.size());
  for (std::size_t c = 0; c < candidates.size(); ++c)
    candidate_columns[c] = gather_columns(
        matrix, subsets[static_cast<std::size_t>(candidates[c].subset_index)].features);

  const std::vector<int> all_labels = matrix.labels();
  parallel_for(results.size(), threads, [&](std::size_t task) {
    const std::size_t c = task / n_folds;
    const std::size_t f = task % n_folds;
    const Candidate& cand = candidates[c];
    const MatrixX& columns = candidate_columns[c];

    const auto& train_rows = fold_train_rows[f];
    const auto& test_rows = fold_test_rows[f];
    MatrixX x_train(static_cast<Index>(train_rows.size()), columns.cols());
    std::vector<int> y_train(train_rows.size());
    for (std::size_t i = 0; i < train_rows.size(); ++i) {
      x_train.row(static_cast<Index>(i)) = columns.row(train_rows[i]);
      y_train[i] = all_labels[static_cast<std::size_t>(train_rows[i])];
    }
    ForestConfig fc = cand.kind == ModelKind::rf
                          ? ForestConfig::random_forest(config.candidate_trees)
                          : ForestConfig::extra_trees(config.candidate_trees);
    fc.tree = config.tree;
    if (cand.kind == ModelKind::et) fc.tree.split_mode = TreeConfig::SplitMode::random;
    const ForestModel forest =
        train_forest(x_train, y_train, fc, derive_seed(config.seed, 221, c, f), 1);

    MatrixX x_test(static_cast<Index>(test_rows.size()), columns.cols());
    std::vector<RowMeta> test_meta(test_rows.size());
    std::vector<int> truth_by_trial;
    for (std::size_t i = 0; i < test_rows.size(); ++i) {
      x_test.row(static_cast<Index>(i)) = columns.row(test_rows[i]);
      test_meta[i] = matrix.meta[static_cast<std::size_t>(test_rows[i])];
    }
    MatrixX proba = forest.predict_proba(x_test, 1);
    // expand forest probabilities onto the global class list
    MatrixX full_proba = MatrixX::Zero(proba.rows(), static_cast<Index>(classes.size()));
    for (std::size_t k = 0; k < forest.classes.size(); ++k) {
      const auto it = std::lower_bound(classes.begin(), classes.end(), forest.classes[k]);
      full_proba.col(static_cast<Index>(it - classes.begin())) = proba.col(static_cast<Index>(k));
    }
    std::vector<int> seg_labels(test_rows.size());
    for (Index r = 0; r < full_proba.rows(); ++r) {
      Index best = 0;
      full_proba.row(r).maxCoeff(&best);
      seg_labels[static_cast<std::size_t>(r)] = classes[static_cast<std::size_t>(best)];
    }
    const auto predictions = vote_by_trial(test_meta, seg_labels, full_proba, classes);
    std::map<std::string, int> true_label;
    for (const auto& m : test_meta) true_label[m.trial_id] = m.label;
    TaskResult res;
    for (const auto& p : predictions) {
      ++res.total;
      if (p.label == true_label[p.trial_id]) ++res.correct;
    }
    results[task] = res;
  });

  std::vector<LeaderboardEntry> board(candidates.size());
  for (std::size_t c = 0; c < candidates.size(); ++c) {
    int correct = 0, total = 0;
    for (std::size_t f = 0; f < n_folds; ++f) {
      correct += results[c * n_folds + f].correct;
      total += results[c * n_folds + f].total;
    }
    board[c] = {candidates[c].kind, candidates[c].subset_index,
                total > 0 ? static_cast<double>(correct) / total : 0.0, false};
  }

  // rank: accuracy desc, then lower subset index, then RF before ET
  std::vector<std::size_t> order(candidates.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (board[a].cv_accuracy != board[b].cv_accuracy)
      return board[a].cv_accuracy > board[b].cv_accuracy;
    if (board[a].subset_index != board[b].subset_index)
      return board[a].subset_index < board[b].subset_index;
    return board[a].kind == ModelKind::rf && board[b].kind == ModelKind::et;
  });

  std::vector<std::size_t> winners;
  if (config.pin_4rf_1et) {
    for (std::size_t i = 0; i < order.size() && winners.size() < 4; ++i)
      if (board[order[i]].kind == ModelKind::rf) winners.push_back(order[i]);
    for (std::size_t i = 0; i < order.size() && winners.size() < 5; ++i)
      if (board[order[i]].kind == ModelKind::et) winners.push_back(order[i]);
  } else {
    for (std::size_t i = 0; i < order.size() && winners.size() < kEnsembleMembers; ++i)
      winners.push_back(order[i]);
  }
  if (winners.size() < kEnsembleMembers)
    raise(Err::BadConfig, "not enough candidates for a " +
                              std::to_string(kEnsembleMembers) + "-member ensemble");
  for (std::size_t w : winners) board[w].selected = true;

  EnsembleModel model;
  model.classes = classes;
  model.members.resize(winners.size());
  parallel_for(winners.size(), threads, [&](std::size_t i) {
    const std::size_t c = winners[i];
    const Candidate& cand = candidates[c];
    EnsembleMember member;
    member.kind = cand.kind;
    member.subset_index = cand.subset_index;
    member.cv_accuracy = board[c].cv_accuracy;
    member.features = subsets[static_cast<std::size_t>(cand.subset_index)].features;
    ForestConfig fc = cand.kind == ModelKind::rf
                          ? ForestConfig::random_forest(config.final_trees)
                          : ForestConfig::extra_trees(config.final_trees);
    fc.tree = config.tree;
    if (cand.kind == ModelKind::et) fc.tree.split_mode = TreeConfig::SplitMode::random;
    member.forest = train_forest(candidate_columns[c], all_labels, fc,
                                 derive_seed(config.seed, 231, c), 1);
    member.forest.feature_names = member.features;
    model.members[i] = std::move(member);
  });

  if (leaderboard) *leaderboard = board;
  return model;
}

SegmentPredictions predict_segments(const EnsembleModel& model, const FeatureMatrix& matrix,
                                    int threads) {
  if (model.members.size() != kEnsembleMembers)
    raise(Err::BadConfig, "ensemble must have exactly 5 members");
  const auto n_classes = static_cast<Index>(model.classes.size());

  // member probabilities expanded onto the ensemble class list
  std::vector<MatrixX> member_proba(model.members.size());
  for (std::size_t m = 0; m < model.members.size(); ++m) {
    const EnsembleMember& member = model.members[m];
    const MatrixX columns = gather_columns(matrix, member.features);
    const MatrixX proba = member.forest.predict_proba(columns, threads);
    member_proba[m] = MatrixX::Zero(matrix.rows(), n_classes);
    for (std::size_t k = 0; k < member.forest.classes.size(); ++k) {
      const auto it = std::lower_bound(model.classes.begin(), model.classes.end(),
                                       member.forest.classes[k]);
      if (it == model.classes.end() || *it != member.forest.classes[k])
        raise(Err::BadLabel, "member class outside ensemble class list");
      member_proba[m].col(static_cast<Index>(it - model.classes.begin())) =
          proba.col(static_cast<Index>(k));
    }
  }

  SegmentPredictions out;
  out.labels.resize(static_cast<std::size_t>(matrix.rows()));
  out.proba.resize(matrix.rows(), n_classes);
  for (Index r = 0; r < matrix.rows(); ++r) {
    std::vector<int> votes(model.members.size());
    std::vector<VectorX> probas(model.members.size());
    for (std::size_t m = 0; m < model.members.size(); ++m) {
      probas[m] = member_proba[m].row(r).transpose();
      Index best = 0;
      probas[m].maxCoeff(&best);
      votes[m] = model.classes[static_cast<std::size_t>(best)];
    }
    out.labels[static_cast<std::size_t>(r)] = majority_vote(votes, probas, model.classes);
    VectorX mean = VectorX::Zero(n_classes);
    for (const auto& p : probas) mean += p;
    out.proba.row(r) = (mean / static_cast<double>(probas.size())).transpose();
  }
  return out;
}

std::vector<TrialPrediction> vote_by_trial(const std::vector<RowMeta>& meta,
                                           const std::vector<int>& segment_labels,
                                           const MatrixX& segment_proba,
                                           const std::vector<int>& classes) {
  if (meta.size() != segment_labels.size() ||
      static_cast<Index>(meta.size()) != segment_proba.rows())
    raise(Err::LengthMismatch, "metadata, labels and probabilities must align");

  std::vector<std::string> order;
  std::map<std::string, std::vector<std::size_t>> groups;
  for (std::size_t i = 0; i < meta.size(); ++i) {
    auto [it, inserted] = groups.try_emplace(meta[i].trial_id);
    if (inserted) order.push_back(meta[i].trial_id);
    it->second.push_back(i);
  }

  std::vector<TrialPrediction> out;
  out.reserve(order.size());
  for (const auto& trial_id : order) {
    const auto& rows = groups[trial_id];
    TrialPrediction p;
    p.trial_id = trial_id;
    std::map<int, int> tally;
    VectorX mass = VectorX::Zero(static_cast<Index>(classes.size()));
    for (std::size_t i : rows) {
      p.segment_labels.push_back(segment_labels[i]);
      ++tally[segment_labels[i]];
      mass += segment_proba.row(static_cast<Index>(i)).transpose();
    }
    int best_count = 0;
    for (const auto& [label, count] : tally) best_count = std::max(best_count, count);
    int best_label = 0;
    double best_mass = -1.0;
    for (const auto& [label, count] : tally) { // ascending label order
      if (count != best_count) continue;
      const auto it = std::lower_bound(classes.begin(), classes.end(), label);
      const double m = mass(static_cast<Index>(it - classes.begin()));
      if (m > best_mass) {
        best_mass = m;
        best_label = label;
      }
    }
    p.label = best_label;
    out.push_back(std::move(p));
  }
  return out;
}

} // namespace mocaprec
