#include "mocaprec/segment.hpp"

#include "mocaprec/error.hpp"

#include <algorithm>
#include <cmath>

namespace mocaprec {

void SegmentSpec::validate() const {
  if (!(window_s > 0)) raise(Err::BadConfig, "window_s must be positive");
  if (!(overlap_fraction >= 0 && overlap_fraction < 1))
    raise(Err::BadConfig, "overlap_fraction must be in [0, 1)");
}

Index SegmentSpec::window_frames(double sample_rate_hz) const {
  return std::max<Index>(1, static_cast<Index>(std::llround(window_s * sample_rate_hz)));
}

Index SegmentSpec::stride_frames(double sample_rate_hz) const {
  const auto window = static_cast<double>(window_frames(sample_rate_hz));
  return std::max<Index>(1, static_cast<Index>(std::llround(window * (1.0 - overlap_fraction))));
}

std::vector<Segment> segment_trial(std::shared_ptr<const Trial> trial, const SegmentSpec& spec) {
  spec.validate();
  const Index total = trial->frames();
  const Index window = spec.window_frames(trial->sample_rate_hz);
  const Index stride = spec.stride_frames(trial->sample_rate_hz);

  std::vector<Segment> segments;
  if (total < window) {
    segments.push_back({trial, 0, total});
    return segments;
  }
  for (Index start = 0; start + window <= total; start += stride)
    segments.push_back({trial, start, window});
  return segments;
}

} // namespace mocaprec
