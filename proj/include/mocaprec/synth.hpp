#pragma once

#include "mocaprec/manifest.hpp"
#include "mocaprec/trial.hpp"

#include <cstdint>
#include <string>

namespace mocaprec {

// Deterministic synthetic MoCap dataset: subjects x classes x trials, one CSV
// per trial plus a manifest, mimicking the challenge layout at desk scale.
struct SynthSpec {
  int n_subjects = 3;
  int n_classes = 10;
  int trials_per_class = 5; // per (subject, class)
  double duration_s = 60.0;
  double sample_rate_hz = 100.0;
  double subject_time_scale_spread = 0.15; // subject tempo factor in (1 +/- spread)
  double noise_std_mm = 2.0;
  double gap_fraction = 0.0; // optional missing-sample injection per coordinate
  std::uint64_t seed = 42;

  void validate() const;
};

// Fully deterministic in (seed, subject_index, class_index, trial_index).
// subject_index in [0, n_subjects), class_index in [1, n_classes],
// trial_index in [0, trials_per_class).
Trial generate_trial(const SynthSpec& spec, int subject_index, int class_index, int trial_index);

// Writes all trial CSVs plus manifest.csv under out_dir and returns the
// manifest with paths resolved. Byte-identical across reruns and thread counts.
Manifest generate_dataset(const SynthSpec& spec, const std::string& out_dir, int threads = 0);

} // namespace mocaprec
