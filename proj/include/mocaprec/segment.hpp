#pragma once

#include "mocaprec/trial.hpp"

#include <memory>
#include <vector>

namespace mocaprec {

struct SegmentSpec {
  double window_s = 30.0;
  double overlap_fraction = 0.5;

  void validate() const;
  Index window_frames(double sample_rate_hz) const;
  Index stride_frames(double sample_rate_hz) const;
};

// A fixed-length window into a trial. Holds a reference to the parent's
// coordinate block, so the owning Trial must stay alive.
struct Segment {
  std::shared_ptr<const Trial> trial;
  Index start_frame = 0;
  Index length_frames = 0;

  const std::string& trial_id() const { return trial->trial_id; }
  const std::string& subject_id() const { return trial->subject_id; }
  int label() const { return trial->label; }
  double sample_rate_hz() const { return trial->sample_rate_hz; }
  const MarkerSchema& schema() const { return trial->schema; }

  // length_frames x 3M view of the parent coordinates
  auto coords() const { return trial->coords.middleRows(start_frame, length_frames); }
  // scalar coordinate column (marker-major: 3*marker + axis)
  auto coord(int column) const {
    return trial->coords.col(column).segment(start_frame, length_frames);
  }
};

// Windows start at 0, S, 2S, ... while start + W <= T. A trial shorter than
// one window yields a single whole-trial segment.
std::vector<Segment> segment_trial(std::shared_ptr<const Trial> trial, const SegmentSpec& spec);

} // namespace mocaprec
