#include "mocaprec/features.hpp"

#include "mocaprec/csv.hpp"
#include "mocaprec/error.hpp"
#include "mocaprec/parallel.hpp"

#include <unsupported/Eigen/FFT>

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <set>
#include <sstream>

namespace mocaprec {

const std::vector<std::string>& feature_suffixes() {
  static const std::vector<std::string> suffixes = {
      "mean",        "median",      "min",       "max",       "std",      "skew",
      "kurt",        "spec_energy", "spec_median", "spec_skew", "spec_kurt"};
  return suffixes;
}

namespace {

// Buffer-reusing extractor; the FFT object caches its per-length plans, which
// matters when thousands of same-length streams go through it.
struct FeatureWorkspace {
  Eigen::FFT<double> fft;
  std::vector<double> values;
  std::vector<double> centered;
  std::vector<std::complex<double>> spectrum;
  std::vector<double> power;

  FeatureWorkspace() { fft.SetFlag(Eigen::FFT<double>::HalfSpectrum); }

  TimeFeatures time_features(const ArrayX& samples) {
    const Index n = samples.size();
    if (n < 2) raise(Err::TooShort, "time features need at least 2 samples");

    TimeFeatures f{};
    f.mean = samples.mean();
    f.min = samples.minCoeff();
    f.max = samples.maxCoeff();

    values.assign(samples.data(), samples.data() + n);
    const auto half = values.begin() + static_cast<std::ptrdiff_t>(n / 2);
    std::nth_element(values.begin(), half, values.end());
    if (n % 2 == 1) {
      f.median = *half;
    } else {
      const double upper = *half;
      f.median = 0.5 * (*std::max_element(values.begin(), half) + upper);
    }

    const ArrayX centered_arr = samples - f.mean;
    const double m2 = centered_arr.square().mean();
    f.stddev = std::sqrt(m2);
    if (m2 > 0) {
      const double m3 = centered_arr.cube().mean();
      const double m4 = centered_arr.square().square().mean();
      f.skewness = m3 / (m2 * f.stddev);
      f.kurtosis = m4 / (m2 * m2) - 3.0;
    }
    return f;
  }

  SpectralFeatures spectral_features(const ArrayX& samples, double sample_rate_hz);
};

} // namespace

TimeFeatures extract_time_features(const ArrayX& samples) {
  FeatureWorkspace workspace;
  return workspace.time_features(samples);
}

SpectralFeatures FeatureWorkspace::spectral_features(const ArrayX& samples,
                                                     double sample_rate_hz) {
  const Index n = samples.size();
  if (n < 4) raise(Err::TooShort, "spectral features need at least 4 samples");

  centered.resize(static_cast<std::size_t>(n));
  const double mean = samples.mean();
  for (Index i = 0; i < n; ++i) centered[static_cast<std::size_t>(i)] = samples(i) - mean;

  fft.fwd(spectrum, centered);

  // one-sided power with Parseval normalization: sum P_k == sum (s - mean)^2
  const std::size_t bins = spectrum.size(); // n/2 + 1
  power.resize(bins);
  const double inv_n = 1.0 / static_cast<double>(n);
  for (std::size_t k = 0; k < bins; ++k) {
    const bool unique_bin = k == 0 || (n % 2 == 0 && k == bins - 1);
    power[k] = (unique_bin ? 1.0 : 2.0) * std::norm(spectrum[k]) * inv_n;
  }

  SpectralFeatures f{};
  const double total = std::accumulate(power.begin(), power.end(), 0.0);
  if (!(total > 0)) return f;

  f.energy = total * inv_n;

  const double bin_hz = sample_rate_hz * inv_n;
  double cumulative = 0.0;
  for (std::size_t k = 0; k < bins; ++k) {
    cumulative += power[k];
    if (cumulative >= 0.5 * total) {
      f.median_freq = static_cast<double>(k) * bin_hz;
      break;
    }
  }

  double mu = 0.0;
  for (std::size_t k = 0; k < bins; ++k) mu += power[k] * static_cast<double>(k) * bin_hz;
  mu /= total;
  double m2 = 0.0, m3 = 0.0, m4 = 0.0;
  for (std::size_t k = 0; k < bins; ++k) {
    const double d = static_cast<double>(k) * bin_hz - mu;
    const double w = power[k] / total;
    m2 += w * d * d;
    m3 += w * d * d * d;
    m4 += w * d * d * d * d;
  }
  if (m2 > 0) {
    const double sd = std::sqrt(m2);
    f.skewness = m3 / (m2 * sd);
    f.kurtosis = m4 / (m2 * m2) - 3.0;
  }
  return f;
}

SpectralFeatures extract_spectral_features(const ArrayX& samples, double sample_rate_hz) {
  FeatureWorkspace workspace;
  return workspace.spectral_features(samples, sample_rate_hz);
}

int FeatureMatrix::column_of(const std::string& name) const {
  for (std::size_t i = 0; i < names.size(); ++i)
    if (names[i] == name) return static_cast<int>(i);
  return -1;
}

std::vector<int> FeatureMatrix::labels() const {
  std::vector<int> out(meta.size());
  for (std::size_t i = 0; i < meta.size(); ++i) out[i] = meta[i].label;
  return out;
}

void FeatureMatrix::validate() const {
  if (static_cast<Index>(names.size()) != values.cols())
    raise(Err::LengthMismatch, "feature name count != column count");
  if (static_cast<Index>(meta.size()) != values.rows())
    raise(Err::LengthMismatch, "metadata count != row count");
  std::set<std::string> uniq(names.begin(), names.end());
  if (uniq.size() != names.size()) raise(Err::BadConfig, "duplicate feature names");
  if (!values.allFinite()) raise(Err::BadConfig, "non-finite feature values");
}

FeatureMatrix build_feature_matrix(const std::vector<Segment>& segments,
                                   const StreamCatalog& catalog, int threads) {
  if (segments.empty()) raise(Err::EmptyData, "no segments to featurize");

  FeatureMatrix m;
  m.meta.resize(segments.size());
  {
    // column names from the catalog, via the first segment's stream set
    const auto streams = synthesize_streams(segments.front(), catalog);
    m.names.reserve(streams.size() * kFeaturesPerStream);
    for (const auto& s : streams)
      for (const auto& suffix : feature_suffixes()) m.names.push_back(s.name + "." + suffix);
  }
  m.values.resize(static_cast<Index>(segments.size()), static_cast<Index>(m.names.size()));

  parallel_for(segments.size(), threads, [&](std::size_t i) {
    thread_local FeatureWorkspace workspace;
    const Segment& segment = segments[i];
    m.meta[i] = {segment.trial_id(), segment.subject_id(), segment.label()};
    const auto streams = synthesize_streams(segment, catalog);
    const double fs = segment.sample_rate_hz();
    Index col = 0;
    for (const auto& s : streams) {
      const TimeFeatures tf = workspace.time_features(s.samples);
      const SpectralFeatures sf = workspace.spectral_features(s.samples, fs);
      auto row = m.values.row(static_cast<Index>(i));
      row(col + 0) = tf.mean;
      row(col + 1) = tf.median;
      row(col + 2) = tf.min;
      row(col + 3) = tf.max;
      row(col + 4) = tf.stddev;
      row(col + 5) = tf.skewness;
      row(col + 6) = tf.kurtosis;
      row(col + 7) = sf.energy;
      row(col + 8) = sf.median_freq;
      row(col + 9) = sf.skewness;
      row(col + 10) = sf.kurtosis;
      col += kFeaturesPerStream;
    }
  });
  m.validate();
  return m;
}

namespace {

std::vector<int> labeled_classes(const FeatureMatrix& m) {
  std::set<int> classes;
  for (const auto& meta : m.meta)
    if (meta.label != kUnlabeled) classes.insert(meta.label);
  return {classes.begin(), classes.end()};
}

} // namespace

VectorX chi_square_scores(const FeatureMatrix& m) {
  const auto classes = labeled_classes(m);
  if (classes.size() < 2) raise(Err::SingleClass, "chi-square needs >= 2 classes");
  const Index n = m.rows();
  const Index p = m.cols();

  std::vector<int> class_of(static_cast<std::size_t>(n));
  VectorX class_count = VectorX::Zero(static_cast<Index>(classes.size()));
  for (Index r = 0; r < n; ++r) {
    const int label = m.meta[static_cast<std::size_t>(r)].label;
    const auto it = std::lower_bound(classes.begin(), classes.end(), label);
    class_of[static_cast<std::size_t>(r)] = static_cast<int>(it - classes.begin());
    class_count(static_cast<Index>(it - classes.begin())) += 1.0;
  }

  VectorX scores = VectorX::Zero(p);
  VectorX observed(static_cast<Index>(classes.size()));
  for (Index j = 0; j < p; ++j) {
    const auto col = m.values.col(j);
    const double lo = col.minCoeff();
    const double hi = col.maxCoeff();
    if (!(hi > lo)) continue; // constant after scaling: no power
    observed.setZero();
    for (Index r = 0; r < n; ++r)
      observed(class_of[static_cast<std::size_t>(r)]) += (col(r) - lo) / (hi - lo);
    const double total = observed.sum();
    if (!(total > 0)) continue;
    double score = 0.0;
    for (Index c = 0; c < observed.size(); ++c) {
      const double expected = total * class_count(c) / static_cast<double>(n);
      const double d = observed(c) - expected;
      score += d * d / expected;
    }
    scores(j) = score;
  }
  return scores;
}

SelectionReport select_features(const std::vector<std::string>& names, const VectorX& chi2,
                                const VectorX& mdi, int target) {
  const auto p = static_cast<Index>(names.size());
  if (chi2.size() != p || mdi.size() != p)
    raise(Err::LengthMismatch, "score vectors must match feature names");
  if (target < 1 || target > p)
    raise(Err::TargetTooLarge, "selection target " + std::to_string(target) +
                                   " outside 1.." + std::to_string(p));

  auto ranking = [p](const VectorX& score) {
    std::vector<Index> order(static_cast<std::size_t>(p));
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](Index a, Index b) {
      return score(a) > score(b); // ties keep column order
    });
    return order;
  };
  const auto mdi_order = ranking(mdi);
  const auto chi_order = ranking(chi2);

  std::vector<char> chosen(static_cast<std::size_t>(p), 0);
  const auto mdi_take = static_cast<std::size_t>((target + 1) / 2);
  std::size_t taken = 0;
  for (std::size_t i = 0; i < mdi_take; ++i, ++taken)
    chosen[static_cast<std::size_t>(mdi_order[i])] = 1;
  for (std::size_t i = 0; taken < static_cast<std::size_t>(target); ++i) {
    const auto idx = static_cast<std::size_t>(chi_order[i]);
    if (chosen[idx]) continue;
    chosen[idx] = 1;
    ++taken;
  }

  SelectionReport report;
  report.feature_names = names;
  report.chi2 = chi2;
  report.mdi = mdi;
  report.selected.reserve(static_cast<std::size_t>(target));
  for (Index rank = 0; rank < p; ++rank) { // selected list ordered by MDI rank
    const auto idx = static_cast<std::size_t>(mdi_order[static_cast<std::size_t>(rank)]);
    if (chosen[idx]) report.selected.push_back(names[idx]);
  }
  return report;
}

std::vector<FeatureSubset> partition_feature_subsets(const std::vector<std::string>& selected,
                                                     int k, int subset_size) {
  const auto n = static_cast<int>(selected.size());
  if (k < 1) raise(Err::BadConfig, "subset count must be >= 1");
  if (subset_size < 1 || subset_size > n)
    raise(Err::BadConfig, "subset_size must be in 1..|selected|");

  const int step = std::max(1, n / k);
  std::vector<FeatureSubset> subsets;
  subsets.reserve(static_cast<std::size_t>(k));
  for (int i = 0; i < k; ++i) {
    FeatureSubset subset;
    subset.index = i;
    subset.features.reserve(static_cast<std::size_t>(subset_size));
    for (int j = 0; j < subset_size; ++j)
      subset.features.push_back(selected[static_cast<std::size_t>((i * step + j) % n)]);
    subsets.push_back(std::move(subset));
  }
  return subsets;
}

void save_feature_matrix_csv(const FeatureMatrix& m, const std::string& path) {
  std::ostringstream out;
  out << "__trial,__subject,__label";
  for (const auto& name : m.names) out << ',' << name;
  out << '\n';
  for (Index r = 0; r < m.rows(); ++r) {
    const auto& meta = m.meta[static_cast<std::size_t>(r)];
    out << meta.trial_id << ',' << meta.subject_id << ',';
    if (meta.label != kUnlabeled) out << meta.label;
    for (Index j = 0; j < m.cols(); ++j) out << ',' << csv::format_double(m.values(r, j));
    out << '\n';
  }
  csv::write_file_atomic(path, out.str());
}

FeatureMatrix load_feature_matrix_csv(const std::string& path) {
  const auto lines = csv::read_lines(path);
  if (lines.empty()) raise(Err::EmptyFile, path + " is empty");
  const auto header = csv::split(lines[0]);
  if (header.size() < 4 || header[0] != "__trial" || header[1] != "__subject" ||
      header[2] != "__label")
    raise(Err::BadConfig, path + ": expected __trial,__subject,__label metadata columns");

  FeatureMatrix m;
  m.names.assign(header.begin() + 3, header.end());
  std::vector<std::vector<double>> rows;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    if (lines[i].empty()) continue;
    const auto cells = csv::split(lines[i]);
    if (cells.size() != header.size())
      raise(Err::RaggedRow, path + " line " + std::to_string(i + 1));
    RowMeta meta;
    meta.trial_id = cells[0];
    meta.subject_id = cells[1];
    meta.label = cells[2].empty() ? kUnlabeled : std::stoi(cells[2]);
    m.meta.push_back(std::move(meta));
    std::vector<double> row(m.names.size());
    for (std::size_t j = 0; j < m.names.size(); ++j)
      row[j] = csv::parse_cell(cells[j + 3], path);
    rows.push_back(std::move(row));
  }
  m.values.resize(static_cast<Index>(rows.size()), static_cast<Index>(m.names.size()));
  for (std::size_t r = 0; r < rows.size(); ++r)
    for (std::size_t j = 0; j < rows[r].size(); ++j)
      m.values(static_cast<Index>(r), static_cast<Index>(j)) = rows[r][j];
  m.validate();
  return m;
}

void save_selection_report_csv(const SelectionReport& report, const std::string& path) {
  std::set<std::string> selected(report.selected.begin(), report.selected.end());
  std::ostringstream out;
  out << "feature,chi2,mdi,selected\n";
  for (std::size_t i = 0; i < report.feature_names.size(); ++i) {
    out << report.feature_names[i] << ',' << csv::format_double(report.chi2(static_cast<Index>(i)))
        << ',' << csv::format_double(report.mdi(static_cast<Index>(i))) << ','
        << (selected.count(report.feature_names[i]) ? 1 : 0) << '\n';
  }
  csv::write_file_atomic(path, out.str());
}

} // namespace mocaprec
