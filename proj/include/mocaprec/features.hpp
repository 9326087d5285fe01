#pragma once

#include "mocaprec/segment.hpp"
#include "mocaprec/streams.hpp"
#include "mocaprec/tree.hpp"
#include "mocaprec/types.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace mocaprec {

// 7 time-domain + 4 spectral features per stream.
inline constexpr int kTimeFeatureCount = 7;
inline constexpr int kSpectralFeatureCount = 4;
inline constexpr int kFeaturesPerStream = kTimeFeatureCount + kSpectralFeatureCount;

const std::vector<std::string>& feature_suffixes();

struct TimeFeatures {
  double mean, median, min, max, stddev, skewness, kurtosis;
};

// Population std; skewness and excess kurtosis are 0 for zero-variance input.
TimeFeatures extract_time_features(const ArrayX& samples);

struct SpectralFeatures {
  double energy;      // sum of one-sided power / n == mean square of the centered signal
  double median_freq; // smallest bin frequency with cumulative power >= half the total
  double skewness;    // of the power-weighted frequency distribution
  double kurtosis;    // excess, same distribution
};

// Computed on the one-sided magnitude-squared spectrum of the mean-removed
// signal; all four are 0 when the total power is 0.
SpectralFeatures extract_spectral_features(const ArrayX& samples, double sample_rate_hz);

struct RowMeta {
  std::string trial_id;
  std::string subject_id;
  int label = kUnlabeled;
};

struct FeatureMatrix {
  std::vector<std::string> names; // p, unique
  MatrixX values;                 // n x p
  std::vector<RowMeta> meta;      // n

  Index rows() const { return values.rows(); }
  Index cols() const { return values.cols(); }
  int column_of(const std::string& name) const; // -1 when absent
  std::vector<int> labels() const;
  void validate() const; // finite entries, unique names, meta size
};

// Row per segment, kFeaturesPerStream columns per catalog stream, in catalog
// order. Deterministic, parallel across segments.
FeatureMatrix build_feature_matrix(const std::vector<Segment>& segments,
                                   const StreamCatalog& catalog, int threads = 0);

// Per-feature chi-square score on min-max scaled values: class-conditional
// sums against class-prior expectations. Needs >= 2 classes.
VectorX chi_square_scores(const FeatureMatrix& m);

// Importances of a probe random forest trained on the full matrix; vector
// sums to 1. Needs >= 2 classes and >= 10 rows.
VectorX mdi_importances(const FeatureMatrix& m, int n_trees, const TreeConfig& tree_config,
                        std::uint64_t seed, int threads = 0);

struct SelectionReport {
  std::vector<std::string> feature_names; // all p, column order
  VectorX chi2;
  VectorX mdi;
  std::vector<std::string> selected; // size = target, ordered by MDI rank
};

// Top half by MDI rank, remainder filled from the chi-square ranking; ties
// break toward the lower column index.
SelectionReport select_features(const std::vector<std::string>& names, const VectorX& chi2,
                                const VectorX& mdi, int target = 496);

struct FeatureSubset {
  int index = 0;
  std::vector<std::string> features;
};

// Sliding rank windows with wraparound: subset i covers MDI ranks
// [i*step, i*step + subset_size) mod |selected|, step = floor(|selected|/k).
std::vector<FeatureSubset> partition_feature_subsets(const std::vector<std::string>& selected,
                                                     int k = 13, int subset_size = 200);

// CSV with metadata columns __trial,__subject,__label.
void save_feature_matrix_csv(const FeatureMatrix& m, const std::string& path);
FeatureMatrix load_feature_matrix_csv(const std::string& path);

// CSV `feature,chi2,mdi,selected`.
void save_selection_report_csv(const SelectionReport& report, const std::string& path);

} // namespace mocaprec
