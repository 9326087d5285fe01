#pragma once

#include "mocaprec/types.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace mocaprec {

struct TrialInfo {
  std::string trial_id;
  std::string subject_id;
  int label = kUnlabeled;
};

struct Fold {
  std::vector<std::string> train_ids;
  std::vector<std::string> test_ids;
};

// Folds are always at trial granularity: segments of one trial never straddle
// the train/test boundary.
struct FoldPlan {
  std::string scheme;
  std::vector<Fold> folds;
};

// Stratified by label; per class the fold sizes differ by at most one.
FoldPlan kfold_splits(const std::vector<TrialInfo>& trials, int k, std::uint64_t seed);

// One fold per subject, subjects in ascending order.
FoldPlan loso_splits(const std::vector<TrialInfo>& trials);

// Leave-one-trial-out.
FoldPlan loto_splits(const std::vector<TrialInfo>& trials);

// Leakage guard: test sets disjoint, every trial in exactly one test set, no
// trial on both sides of a fold. Throws on violation.
void validate_fold_plan(const FoldPlan& plan, const std::vector<TrialInfo>& trials);

} // namespace mocaprec
