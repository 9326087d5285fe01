#include "mocaprec/folds.hpp"

#include "mocaprec/error.hpp"
#include "mocaprec/rng.hpp"

#include <algorithm>
#include <map>
#include <set>

namespace mocaprec {

FoldPlan kfold_splits(const std::vector<TrialInfo>& trials, int k, std::uint64_t seed) {
  if (k < 2) raise(Err::BadConfig, "k must be >= 2");
  if (static_cast<int>(trials.size()) < k)
    raise(Err::TooFewTrials, "need at least k=" + std::to_string(k) + " trials, have " +
                                 std::to_string(trials.size()));

  std::map<int, std::vector<std::string>> by_label;
  for (const auto& t : trials) by_label[t.label].push_back(t.trial_id);

  // Deal each class round-robin, carrying the fold pointer across classes so
  // overall fold sizes stay balanced too.
  std::vector<std::vector<std::string>> fold_test(static_cast<std::size_t>(k));
  std::size_t pointer = 0;
  for (auto& [label, ids] : by_label) {
    Rng rng(derive_seed(seed, 41, static_cast<std::uint64_t>(label)));
    rng.shuffle(ids);
    for (const auto& id : ids) fold_test[pointer++ % static_cast<std::size_t>(k)].push_back(id);
  }

  FoldPlan plan;
  plan.scheme = "kfold";
  for (int f = 0; f < k; ++f) {
    Fold fold;
    fold.test_ids = fold_test[static_cast<std::size_t>(f)];
    std::set<std::string> test(fold.test_ids.begin(), fold.test_ids.end());
    for (const auto& t : trials)
      if (!test.count(t.trial_id)) fold.train_ids.push_back(t.trial_id);
    plan.folds.push_back(std::move(fold));
  }
  validate_fold_plan(plan, trials);
  return plan;
}

FoldPlan loso_splits(const std::vector<TrialInfo>& trials) {
  std::map<std::string, std::vector<std::string>> by_subject;
  for (const auto& t : trials) by_subject[t.subject_id].push_back(t.trial_id);
  if (by_subject.size() < 2) raise(Err::SingleSubject, "leave-one-subject-out needs >= 2 subjects");

  FoldPlan plan;
  plan.scheme = "loso";
  for (const auto& [subject, test_ids] : by_subject) {
    Fold fold;
    fold.test_ids = test_ids;
    for (const auto& t : trials)
      if (t.subject_id != subject) fold.train_ids.push_back(t.trial_id);
    plan.folds.push_back(std::move(fold));
  }
  validate_fold_plan(plan, trials);
  return plan;
}

FoldPlan loto_splits(const std::vector<TrialInfo>& trials) {
  if (trials.size() < 2) raise(Err::TooFewTrials, "leave-one-trial-out needs >= 2 trials");
  FoldPlan plan;
  plan.scheme = "loto";
  for (const auto& t : trials) {
    Fold fold;
    fold.test_ids.push_back(t.trial_id);
    for (const auto& other : trials)
      if (other.trial_id != t.trial_id) fold.train_ids.push_back(other.trial_id);
    plan.folds.push_back(std::move(fold));
  }
  validate_fold_plan(plan, trials);
  return plan;
}

void validate_fold_plan(const FoldPlan& plan, const std::vector<TrialInfo>& trials) {
  std::set<std::string> all;
  for (const auto& t : trials) {
    if (!all.insert(t.trial_id).second)
      raise(Err::DuplicatePath, "duplicate trial id " + t.trial_id);
  }
  std::set<std::string> tested;
  for (std::size_t f = 0; f < plan.folds.size(); ++f) {
    const Fold& fold = plan.folds[f];
    std::set<std::string> train(fold.train_ids.begin(), fold.train_ids.end());
    for (const auto& id : fold.test_ids) {
      if (train.count(id))
        raise(Err::BadConfig, "trial " + id + " on both sides of fold " + std::to_string(f));
      if (!tested.insert(id).second)
        raise(Err::BadConfig, "trial " + id + " in multiple test folds");
      if (!all.count(id)) raise(Err::BadConfig, "unknown trial " + id + " in fold plan");
    }
  }
  if (tested.size() != all.size())
    raise(Err::BadConfig, "fold plan tests " + std::to_string(tested.size()) + " of " +
                              std::to_string(all.size()) + " trials");
}

} // namespace mocaprec
