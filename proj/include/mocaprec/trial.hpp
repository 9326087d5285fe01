#pragma once

#include "mocaprec/manifest.hpp"
#include "mocaprec/types.hpp"

#include <string>
#include <vector>

namespace mocaprec {

// Ordered marker names. The challenge rig exposes 13 upper-body markers; only
// the 8 required ones are named in the data description, the rest are
// configurable.
struct MarkerSchema {
  std::vector<std::string> names;

  static MarkerSchema default13();
  static const std::vector<std::string>& required();

  int size() const { return static_cast<int>(names.size()); }
  int index_of(const std::string& name) const; // -1 when absent
  void validate() const;                       // unique, contains required set
};

// One recording. Coordinates are stored as a T x 3M matrix, marker-major
// column layout (m0.X, m0.Y, m0.Z, m1.X, ...), so each scalar coordinate
// stream is a contiguous column.
struct Trial {
  std::string trial_id;
  std::string subject_id;
  int label = kUnlabeled;
  double sample_rate_hz = 100.0;
  MarkerSchema schema;
  MatrixX coords;

  Index frames() const { return coords.rows(); }
  Vec3 at(Index t, int marker) const { return coords.block<1, 3>(t, 3 * marker).transpose(); }
  bool has_missing() const { return coords.hasNaN(); }
};

// Columns `<Marker>.X/.Y/.Z` per schema marker; an optional leading `time`
// column and unknown extra columns are skipped. Empty cells become NaN
// sentinels pending interpolate_gaps.
Trial parse_trial_csv(const std::string& path, const MarkerSchema& schema, const ManifestRow& meta,
                      double sample_rate_hz = 100.0);

// Emits the same format (with a `time` column). Values use shortest
// round-trip decimal text, so parse(write(t)) reproduces coords bit-exactly.
void write_trial_csv(const Trial& trial, const std::string& path);

// Linear interpolation across internal NaN runs, nearest-valid extension at
// the edges. Errors: TooManyMissing, AllMissing.
Trial interpolate_gaps(Trial trial, double max_missing_fraction = 0.2);

} // namespace mocaprec
