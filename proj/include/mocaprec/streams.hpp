#pragma once

#include "mocaprec/segment.hpp"
#include "mocaprec/types.hpp"

#include <string>
#include <vector>

namespace mocaprec {

enum class StreamKind {
  position,
  velocity,
  acceleration,
  jerk,
  distance,
  joint_angle,
  joint_angle_speed,
  planar_angle,
  planar_angle_speed,
};

// A named scalar time series derived from a segment.
struct Stream {
  std::string name;
  StreamKind kind = StreamKind::position;
  ArrayX samples;
};

enum class Plane { XY, YZ, ZX };
const char* to_string(Plane plane);

struct DistancePair {
  std::string a, b;
};

struct AngleTriple {
  std::string name;
  std::string a, b, c; // vertex at b
};

struct Bone {
  std::string name;
  std::string a, b;
};

// Which streams synthesize_streams emits. The default totals exactly 218:
// 13 markers x 3 axes x 4 orders + 10 distances + 8 joint angles x 2 +
// 6 bones x 3 planes x 2.
struct StreamCatalog {
  int position_orders = 4; // position, velocity, acceleration, jerk
  std::vector<DistancePair> distances;
  std::vector<AngleTriple> joint_angles;
  std::vector<Bone> bones; // planar angles, all three coordinate planes
  bool joint_angle_speed = true;
  bool planar_angle_speed = true;

  static StreamCatalog defaults();
  static StreamCatalog load_json(const std::string& path);

  void validate(const MarkerSchema& schema) const;
  std::size_t stream_count(int n_markers) const;
};

// Forward difference scaled by the sample rate; the last sample repeats the
// previous one so the length is preserved. Throws TooShort for length < 2.
ArrayX differentiate(const ArrayX& samples, double sample_rate_hz);
Stream differentiate(const Stream& stream, double sample_rate_hz);

// ||a - b|| per frame.
Stream distance_stream(const std::string& a, const std::string& b, const Segment& segment);

// Angle at vertex b between (a - b) and (c - b), radians in [0, pi]. A frame
// with a zero-length arm repeats the previous frame's angle (0 at t = 0).
Stream joint_angle_stream(const std::string& a, const std::string& b, const std::string& c,
                          const Segment& segment);

// Elevation of the bone vector out of a coordinate plane, in [0, pi/2].
Stream planar_angle_stream(const Bone& bone, Plane plane, const Segment& segment);

// The full catalog in deterministic order; default configuration yields 218
// streams with unique names, all of segment length.
std::vector<Stream> synthesize_streams(const Segment& segment, const StreamCatalog& catalog);

// Debug dump, one column per stream.
void write_streams_csv(const std::vector<Stream>& streams, const std::string& path);

} // namespace mocaprec
