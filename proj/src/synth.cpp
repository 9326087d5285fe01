#include "mocaprec/synth.hpp"

#include "mocaprec/error.hpp"
#include "mocaprec/parallel.hpp"
#include "mocaprec/rng.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <limits>
#include <vector>
#include <string>

namespace mocaprec {

namespace {

constexpr double kTwoPi = 2.0 * M_PI;

enum Group { kHead = 0, kTrunk = 1, kLeftArm = 2, kRightArm = 3 };
constexpr int kGroups = 4;

struct MarkerTraits {
  int group;
  double depth; // distal markers swing more
  Vec3 base;    // shared rest pose, mm
};

MarkerTraits traits_for(const std::string& name) {
  if (name == "FrontHead") return {kHead, 0.40, {0, 90, 1480}};
  if (name == "TopHead") return {kHead, 0.30, {0, 0, 1560}};
  if (name == "RearHead") return {kHead, 0.35, {0, -90, 1480}};
  if (name == "LShoulder") return {kLeftArm, 0.45, {-190, 0, 1330}};
  if (name == "RShoulder") return {kRightArm, 0.45, {190, 0, 1330}};
  if (name == "Chest") return {kTrunk, 0.35, {0, 110, 1250}};
  if (name == "LElbow") return {kLeftArm, 0.75, {-240, 80, 1080}};
  if (name == "RElbow") return {kRightArm, 0.75, {240, 80, 1080}};
  if (name == "LWrist") return {kLeftArm, 1.00, {-220, 320, 980}};
  if (name == "RWrist") return {kRightArm, 1.00, {220, 320, 980}};
  if (name == "LWaist") return {kTrunk, 0.30, {-140, 40, 960}};
  if (name == "RWaist") return {kTrunk, 0.30, {140, 40, 960}};
  if (name == "VSacral") return {kTrunk, 0.30, {0, -60, 950}};
  // unknown extra markers: park them on the trunk with a name-derived offset
  std::uint64_t h = 1469598103934665603ULL;
  for (char ch : name) h = (h ^ static_cast<unsigned char>(ch)) * 1099511628211ULL;
  Rng r(h);
  return {kTrunk, 0.4, {r.real(-150, 150), r.real(-80, 120), r.real(900, 1500)}};
}

// Scenario-pair parameters (classes 2p+1 / 2p+2 share these).
struct PairParams {
  double pose[kGroups][3];      // per-group rest offset, mm
  double amp[kGroups][3];       // main oscillation amplitude, mm
  double axis_phase[kGroups][3];
  double f_main;                // Hz
};

PairParams pair_params(std::uint64_t seed, int pair) {
  Rng rng(derive_seed(seed, 11, static_cast<std::uint64_t>(pair)));
  PairParams p{};
  for (int g = 0; g < kGroups; ++g)
    for (int a = 0; a < 3; ++a) p.pose[g][a] = rng.real(-12.0, 12.0);
  for (int a = 0; a < 3; ++a) {
    p.amp[kHead][a] = rng.real(10.0, 22.0);
    p.amp[kTrunk][a] = rng.real(7.0, 16.0);
    p.amp[kLeftArm][a] = rng.real(38.0, 72.0);
    p.amp[kRightArm][a] = p.amp[kLeftArm][a] * rng.real(0.9, 1.1);
  }
  double shared_axis_phase[3];
  for (int a = 0; a < 3; ++a) shared_axis_phase[a] = rng.real(0.0, kTwoPi);
  for (int g = 0; g < kGroups; ++g)
    for (int a = 0; a < 3; ++a)
      p.axis_phase[g][a] = (g == kRightArm) ? p.axis_phase[kLeftArm][a] : shared_axis_phase[a];
  // adjacent pairs differ by ~7% in tempo; the subject warp (+/-15%) smears
  // the resulting spectra across pair boundaries
  p.f_main = 0.30 + 0.07 * pair + rng.real(-0.01, 0.01);
  return p;
}

struct ClassParams {
  double f_accent;
  double accent_scale[kGroups];
};

ClassParams class_params(std::uint64_t seed, int class_index) {
  Rng rng(derive_seed(seed, 13, static_cast<std::uint64_t>(class_index)));
  ClassParams c{};
  c.f_accent = 0.85 + 0.09 * (class_index - 1) + rng.real(-0.01, 0.01);
  for (int g = 0; g < kGroups; ++g) c.accent_scale[g] = rng.real(0.15, 0.35);
  return c;
}

struct TrialParams {
  double master_phase;
  double group_phase[kGroups];
  double harmonic_phase[kGroups];
  double group_amp_jitter[kGroups];
  double axis_amp_jitter[kGroups][3];
  double accent_amp_jitter[kGroups];
  double pose_drift[kGroups][3];
  double accent_phase[kGroups];
  double tempo;
};

// Keyed by (class, trial) only: with spread 0 every subject reproduces the
// same waveform up to noise, as the determinism contract requires. The
// jitters are deliberately large and shared within marker groups, so no
// single feature separates the classes cleanly.
TrialParams trial_params(std::uint64_t seed, int class_index, int trial_index) {
  Rng rng(derive_seed(seed, 17, static_cast<std::uint64_t>(class_index),
                      static_cast<std::uint64_t>(trial_index)));
  TrialParams t{};
  t.master_phase = rng.real(0.0, kTwoPi);
  for (int g = 0; g < kGroups; ++g) t.group_phase[g] = rng.normal(0.0, 0.7);
  for (int g = 0; g < kGroups; ++g) t.harmonic_phase[g] = rng.real(0.0, kTwoPi);
  for (int g = 0; g < kGroups; ++g) t.group_amp_jitter[g] = 1.0 + 0.3 * rng.symmetric();
  for (int g = 0; g < kGroups; ++g)
    for (int a = 0; a < 3; ++a) t.axis_amp_jitter[g][a] = 1.0 + 0.15 * rng.symmetric();
  for (int g = 0; g < kGroups; ++g) t.accent_amp_jitter[g] = 1.0 + 0.35 * rng.symmetric();
  for (int g = 0; g < kGroups; ++g)
    for (int a = 0; a < 3; ++a) t.pose_drift[g][a] = rng.normal(0.0, 5.0);
  for (int g = 0; g < kGroups; ++g) t.accent_phase[g] = rng.real(0.0, kTwoPi);
  t.tempo = 1.0 + 0.05 * rng.symmetric();
  return t;
}

double subject_warp(const SynthSpec& spec, int subject_index) {
  Rng rng(derive_seed(spec.seed, 19, static_cast<std::uint64_t>(subject_index)));
  return 1.0 + spec.subject_time_scale_spread * rng.symmetric();
}

void inject_gaps(Trial& trial, const SynthSpec& spec, int subject_index, int class_index,
                 int trial_index) {
  Rng rng(derive_seed(spec.seed, 29, static_cast<std::uint64_t>(subject_index),
                      static_cast<std::uint64_t>(class_index),
                      static_cast<std::uint64_t>(trial_index)));
  const Index t_count = trial.frames();
  const auto budget = static_cast<Index>(spec.gap_fraction * static_cast<double>(t_count));
  for (Index c = 0; c < trial.coords.cols(); ++c) {
    Index remaining = budget;
    while (remaining > 0) {
      const Index len = std::min<Index>(remaining, 5 + static_cast<Index>(rng.below(36)));
      // interior runs only; edge handling is exercised by dedicated tests
      const Index start = 1 + static_cast<Index>(rng.below(static_cast<std::uint64_t>(
                                  std::max<Index>(1, t_count - len - 2))));
      trial.coords.col(c)
          .segment(start, len)
          .setConstant(std::numeric_limits<double>::quiet_NaN());
      remaining -= len;
    }
  }
}

} // namespace

void SynthSpec::validate() const {
  if (n_subjects < 2) raise(Err::BadConfig, "n_subjects must be >= 2");
  if (n_classes < 1 || n_classes > kMaxLabel)
    raise(Err::BadConfig, "n_classes must be in 1..10");
  if (trials_per_class < 1) raise(Err::BadConfig, "trials_per_class must be >= 1");
  if (duration_s <= 0) raise(Err::BadConfig, "duration_s must be positive");
  if (sample_rate_hz <= 0) raise(Err::BadConfig, "sample_rate_hz must be positive");
  if (subject_time_scale_spread < 0) raise(Err::BadConfig, "spread must be >= 0");
  if (noise_std_mm < 0) raise(Err::BadConfig, "noise_std_mm must be >= 0");
  if (gap_fraction < 0 || gap_fraction > 0.15)
    raise(Err::BadConfig, "gap_fraction must be in [0, 0.15]");
}

Trial generate_trial(const SynthSpec& spec, int subject_index, int class_index, int trial_index) {
  spec.validate();
  if (subject_index < 0 || subject_index >= spec.n_subjects)
    raise(Err::BadConfig, "subject_index out of range");
  if (class_index < 1 || class_index > spec.n_classes)
    raise(Err::BadConfig, "class_index out of range");
  if (trial_index < 0 || trial_index >= spec.trials_per_class)
    raise(Err::BadConfig, "trial_index out of range");

  const int pair = (class_index - 1) / 2;
  const int variant = (class_index - 1) % 2; // 0 = inward, 1 = outward
  const PairParams pp = pair_params(spec.seed, pair);
  const ClassParams cp = class_params(spec.seed, class_index);
  const TrialParams tp = trial_params(spec.seed, class_index, trial_index);
  const double warp = subject_warp(spec, subject_index);

  Trial trial;
  trial.schema = MarkerSchema::default13();
  trial.subject_id = "S" + std::string(subject_index + 1 < 10 ? "0" : "") +
                     std::to_string(subject_index + 1);
  trial.label = class_index;
  trial.sample_rate_hz = spec.sample_rate_hz;

  const Index t_count = std::max<Index>(2, static_cast<Index>(std::llround(
                                               spec.duration_s * spec.sample_rate_hz)));
  const int m = trial.schema.size();
  trial.coords.resize(t_count, 3 * m);

  Rng noise(derive_seed(spec.seed, 23, static_cast<std::uint64_t>(subject_index),
                        static_cast<std::uint64_t>(class_index),
                        static_cast<std::uint64_t>(trial_index)));

  const double rate = warp * tp.tempo / spec.sample_rate_hz; // seconds of motion per frame
  for (int marker = 0; marker < m; ++marker) {
    const std::string& name = trial.schema.names[static_cast<std::size_t>(marker)];
    const auto tr = traits_for(name);
    const int g = tr.group;
    const bool wrist = name == "LWrist" || name == "RWrist";
    const bool elbow = name == "LElbow" || name == "RElbow";
    // per-marker jitter breaks the jitter cancellation that ratio-style
    // streams (bone and joint angles) would otherwise enjoy
    Rng marker_rng(derive_seed(spec.seed, 37, static_cast<std::uint64_t>(class_index),
                               static_cast<std::uint64_t>(trial_index),
                               static_cast<std::uint64_t>(marker)));
    const double marker_amp_jitter = 1.0 + 0.10 * marker_rng.symmetric();
    const double marker_phase_jitter = marker_rng.normal(0.0, 0.18);
    const double marker_accent_phase = marker_rng.normal(0.0, 0.3);
    const double phase_main = tp.master_phase + tp.group_phase[g] + marker_phase_jitter +
                              (g == kRightArm && variant == 1 ? M_PI : 0.0);
    for (int axis = 0; axis < 3; ++axis) {
      double amp = pp.amp[g][axis] * tr.depth * tp.group_amp_jitter[g] *
                   tp.axis_amp_jitter[g][axis] * marker_amp_jitter;
      // inward scoop leans on the anterior axis, outward sweep on the lateral
      // one; kept close to 1 so the cue only shows up jointly across axes
      if (wrist) {
        if (axis == 0) amp *= (variant == 0 ? 0.88 : 1.12);
        if (axis == 1) amp *= (variant == 0 ? 1.12 : 0.88);
      } else if (elbow) {
        if (axis == 0) amp *= (variant == 0 ? 0.92 : 1.08);
        if (axis == 1) amp *= (variant == 0 ? 1.08 : 0.92);
      }
      double accent_amp =
          cp.accent_scale[g] * pp.amp[g][axis] * tr.depth * tp.accent_amp_jitter[g];
      if (g == kHead) accent_amp *= (variant == 0 ? 0.85 : 1.20);

      const double base = tr.base[axis] + pp.pose[g][axis] + tp.pose_drift[g][axis];
      const double ph1 = phase_main + pp.axis_phase[g][axis];
      const double ph2 = 2.0 * ph1 + tp.harmonic_phase[g];
      const double ph3 = tp.accent_phase[g] + pp.axis_phase[g][axis] + marker_accent_phase;
      const double w1 = kTwoPi * pp.f_main * rate;
      const double w2 = kTwoPi * 2.0 * pp.f_main * rate;
      const double w3 = kTwoPi * cp.f_accent * rate;

      auto col = trial.coords.col(3 * marker + axis);
      for (Index t = 0; t < t_count; ++t) {
        const double ft = static_cast<double>(t);
        col(t) = base + amp * std::sin(w1 * ft + ph1) + 0.4 * amp * std::sin(w2 * ft + ph2) +
                 accent_amp * std::sin(w3 * ft + ph3);
      }
    }
  }
  if (spec.noise_std_mm > 0) {
    // row-major draw order so the noise stream is layout-independent
    for (Index t = 0; t < t_count; ++t)
      for (int k = 0; k < 3 * m; ++k) trial.coords(t, k) += noise.normal(0.0, spec.noise_std_mm);
  }
  // quantize to 1 um; keeps the CSV text compact without touching the signal
  trial.coords = (trial.coords * 1000.0).array().round() / 1000.0;
  if (spec.gap_fraction > 0) inject_gaps(trial, spec, subject_index, class_index, trial_index);
  return trial;
}

Manifest generate_dataset(const SynthSpec& spec, const std::string& out_dir, int threads) {
  spec.validate();
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) raise(Err::IoError, "cannot create " + out_dir);

  struct Unit {
    int subject, class_index, trial_index;
    std::string file;
  };
  std::vector<Unit> units;
  auto two = [](int v) {
    return (v < 10 ? "0" : "") + std::to_string(v);
  };
  for (int s = 0; s < spec.n_subjects; ++s)
    for (int c = 1; c <= spec.n_classes; ++c)
      for (int k = 0; k < spec.trials_per_class; ++k)
        units.push_back({s, c, k, "s" + two(s + 1) + "_a" + two(c) + "_t" + two(k + 1) + ".csv"});

  parallel_for(units.size(), threads, [&](std::size_t i) {
    const Unit& u = units[i];
    Trial trial = generate_trial(spec, u.subject, u.class_index, u.trial_index);
    trial.trial_id = u.file.substr(0, u.file.size() - 4);
    write_trial_csv(trial, (fs::path(out_dir) / u.file).string());
  });

  Manifest manifest;
  for (const Unit& u : units)
    manifest.rows.push_back({u.file, "S" + two(u.subject + 1),
                             u.class_index});
  save_manifest(manifest, (fs::path(out_dir) / "manifest.csv").string());
  for (auto& row : manifest.rows)
    row.path = (fs::path(out_dir) / row.path).lexically_normal().string();
  return manifest;
}

} // namespace mocaprec
