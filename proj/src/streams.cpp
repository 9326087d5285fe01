#include "mocaprec/streams.hpp"

#include "mocaprec/csv.hpp"
#include "mocaprec/error.hpp"

#include <nlohmann/json.hpp>

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace mocaprec {

const char* to_string(Plane plane) {
  switch (plane) {
    case Plane::XY: return "xy";
    case Plane::YZ: return "yz";
    case Plane::ZX: return "zx";
  }
  return "?";
}

StreamCatalog StreamCatalog::defaults() {
  StreamCatalog c;
  c.position_orders = 4;
  c.distances = {
      {"LWrist", "LShoulder"}, {"RWrist", "RShoulder"}, {"VSacral", "LElbow"},
      {"VSacral", "RElbow"},   {"FrontHead", "LElbow"}, {"FrontHead", "RElbow"},
      {"LWrist", "RWrist"},    {"VSacral", "FrontHead"}, {"LWrist", "VSacral"},
      {"RWrist", "VSacral"},
  };
  c.joint_angles = {
      {"LElbow", "LShoulder", "LElbow", "LWrist"},
      {"RElbow", "RShoulder", "RElbow", "RWrist"},
      {"LShoulder", "LElbow", "LShoulder", "VSacral"},
      {"RShoulder", "RElbow", "RShoulder", "VSacral"},
      {"LWristHead", "LWrist", "FrontHead", "VSacral"},
      {"RWristHead", "RWrist", "FrontHead", "VSacral"},
      {"LFlank", "LShoulder", "VSacral", "FrontHead"},
      {"RFlank", "RShoulder", "VSacral", "FrontHead"},
  };
  c.bones = {
      {"LUpperArm", "LShoulder", "LElbow"}, {"RUpperArm", "RShoulder", "RElbow"},
      {"LForearm", "LElbow", "LWrist"},     {"RForearm", "RElbow", "RWrist"},
      {"Trunk", "VSacral", "FrontHead"},    {"ShoulderLine", "LShoulder", "RShoulder"},
  };
  return c;
}

StreamCatalog StreamCatalog::load_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) raise(Err::MissingFile, "cannot open catalog " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    raise(Err::BadConfig, "catalog " + path + ": " + e.what());
  }
  StreamCatalog c;
  c.position_orders = j.value("position_orders", 4);
  c.joint_angle_speed = j.value("joint_angle_speed", true);
  c.planar_angle_speed = j.value("planar_angle_speed", true);
  for (const auto& d : j.value("distances", nlohmann::json::array()))
    c.distances.push_back({d.at(0).get<std::string>(), d.at(1).get<std::string>()});
  for (const auto& a : j.value("joint_angles", nlohmann::json::array()))
    c.joint_angles.push_back({a.at("name").get<std::string>(),
                              a.at("markers").at(0).get<std::string>(),
                              a.at("markers").at(1).get<std::string>(),
                              a.at("markers").at(2).get<std::string>()});
  for (const auto& b : j.value("bones", nlohmann::json::array()))
    c.bones.push_back({b.at("name").get<std::string>(), b.at("markers").at(0).get<std::string>(),
                       b.at("markers").at(1).get<std::string>()});
  if (c.position_orders < 1 || c.position_orders > 4)
    raise(Err::BadConfig, "catalog position_orders must be in 1..4");
  return c;
}

void StreamCatalog::validate(const MarkerSchema& schema) const {
  auto check = [&](const std::string& name, const char* where) {
    if (schema.index_of(name) < 0)
      raise(Err::UnknownMarker, std::string(where) + " references unknown marker " + name);
  };
  for (const auto& d : distances) {
    check(d.a, "distance");
    check(d.b, "distance");
  }
  std::set<std::string> names;
  for (const auto& a : joint_angles) {
    check(a.a, "joint angle");
    check(a.b, "joint angle");
    check(a.c, "joint angle");
    if (a.a == a.b || a.b == a.c || a.a == a.c)
      raise(Err::BadConfig, "joint angle " + a.name + " markers must be distinct");
    if (!names.insert("jang." + a.name).second)
      raise(Err::BadConfig, "duplicate joint angle name " + a.name);
  }
  for (const auto& b : bones) {
    check(b.a, "bone");
    check(b.b, "bone");
    if (!names.insert("pang." + b.name).second)
      raise(Err::BadConfig, "duplicate bone name " + b.name);
  }
}

std::size_t StreamCatalog::stream_count(int n_markers) const {
  std::size_t count = static_cast<std::size_t>(n_markers) * 3u *
                      static_cast<std::size_t>(position_orders);
  count += distances.size();
  count += joint_angles.size() * (joint_angle_speed ? 2u : 1u);
  count += bones.size() * 3u * (planar_angle_speed ? 2u : 1u);
  return count;
}

ArrayX differentiate(const ArrayX& samples, double sample_rate_hz) {
  const Index n = samples.size();
  if (n < 2) raise(Err::TooShort, "differentiate needs at least 2 samples");
  ArrayX out(n);
  out.head(n - 1) = (samples.tail(n - 1) - samples.head(n - 1)) * sample_rate_hz;
  out(n - 1) = out(n - 2);
  return out;
}

Stream differentiate(const Stream& stream, double sample_rate_hz) {
  Stream out;
  out.samples = differentiate(stream.samples, sample_rate_hz);
  switch (stream.kind) {
    case StreamKind::position:
      out.kind = StreamKind::velocity;
      out.name = stream.name + ".vel";
      break;
    case StreamKind::velocity:
      out.kind = StreamKind::acceleration;
      out.name = stream.name + ".acc";
      break;
    case StreamKind::acceleration:
      out.kind = StreamKind::jerk;
      out.name = stream.name + ".jerk";
      break;
    case StreamKind::joint_angle:
      out.kind = StreamKind::joint_angle_speed;
      out.name = stream.name + ".spd";
      break;
    case StreamKind::planar_angle:
      out.kind = StreamKind::planar_angle_speed;
      out.name = stream.name + ".spd";
      break;
    default:
      raise(Err::BadConfig, "no derivative defined for stream " + stream.name);
  }
  return out;
}

namespace {

int marker_index_or_throw(const MarkerSchema& schema, const std::string& name) {
  const int idx = schema.index_of(name);
  if (idx < 0) raise(Err::UnknownMarker, "marker " + name + " not in schema");
  return idx;
}

} // namespace

Stream distance_stream(const std::string& a, const std::string& b, const Segment& segment) {
  const int ia = marker_index_or_throw(segment.schema(), a);
  const int ib = marker_index_or_throw(segment.schema(), b);
  Stream s;
  s.name = "dist." + a + "-" + b;
  s.kind = StreamKind::distance;
  const auto dx = segment.coord(3 * ia + 0) - segment.coord(3 * ib + 0);
  const auto dy = segment.coord(3 * ia + 1) - segment.coord(3 * ib + 1);
  const auto dz = segment.coord(3 * ia + 2) - segment.coord(3 * ib + 2);
  s.samples = (dx.array().square() + dy.array().square() + dz.array().square()).sqrt();
  return s;
}

Stream joint_angle_stream(const std::string& a, const std::string& b, const std::string& c,
                          const Segment& segment) {
  const int ia = marker_index_or_throw(segment.schema(), a);
  const int ib = marker_index_or_throw(segment.schema(), b);
  const int ic = marker_index_or_throw(segment.schema(), c);
  Stream s;
  s.name = "jang." + b; // callers building catalogs override with the triple name
  s.kind = StreamKind::joint_angle;
  const Index n = segment.length_frames;
  s.samples.resize(n);
  const auto coords = segment.coords();
  for (Index t = 0; t < n; ++t) {
    const Vec3 v1 = (coords.block<1, 3>(t, 3 * ia) - coords.block<1, 3>(t, 3 * ib)).transpose();
    const Vec3 v2 = (coords.block<1, 3>(t, 3 * ic) - coords.block<1, 3>(t, 3 * ib)).transpose();
    const double n1 = v1.norm();
    const double n2 = v2.norm();
    if (n1 == 0.0 || n2 == 0.0) {
      s.samples(t) = t > 0 ? s.samples(t - 1) : 0.0;
      continue;
    }
    const double cosine = std::clamp(v1.dot(v2) / (n1 * n2), -1.0, 1.0);
    s.samples(t) = std::acos(cosine);
  }
  return s;
}

Stream planar_angle_stream(const Bone& bone, Plane plane, const Segment& segment) {
  const int ia = marker_index_or_throw(segment.schema(), bone.a);
  const int ib = marker_index_or_throw(segment.schema(), bone.b);
  Stream s;
  s.name = "pang." + bone.name + "." + to_string(plane);
  s.kind = StreamKind::planar_angle;
  const Index n = segment.length_frames;
  s.samples.resize(n);
  // in-plane axis pair per plane
  int u = 0, v = 1;
  switch (plane) {
    case Plane::XY: u = 0; v = 1; break;
    case Plane::YZ: u = 1; v = 2; break;
    case Plane::ZX: u = 2; v = 0; break;
  }
  const auto coords = segment.coords();
  for (Index t = 0; t < n; ++t) {
    const Vec3 d = (coords.block<1, 3>(t, 3 * ib) - coords.block<1, 3>(t, 3 * ia)).transpose();
    const double norm = d.norm();
    if (norm == 0.0) {
      s.samples(t) = t > 0 ? s.samples(t - 1) : 0.0;
      continue;
    }
    const double in_plane = std::sqrt(d(u) * d(u) + d(v) * d(v));
    const double cosine = std::clamp(in_plane / norm, -1.0, 1.0);
    s.samples(t) = std::acos(cosine);
  }
  return s;
}

std::vector<Stream> synthesize_streams(const Segment& segment, const StreamCatalog& catalog) {
  const MarkerSchema& schema = segment.schema();
  catalog.validate(schema);
  const double fs = segment.sample_rate_hz();
  std::vector<Stream> streams;
  streams.reserve(catalog.stream_count(schema.size()));

  static const char* axis_names[3] = {"x", "y", "z"};
  for (int marker = 0; marker < schema.size(); ++marker) {
    for (int axis = 0; axis < 3; ++axis) {
      Stream pos;
      pos.name = schema.names[static_cast<std::size_t>(marker)] + "." + axis_names[axis];
      pos.kind = StreamKind::position;
      pos.samples = segment.coord(3 * marker + axis);
      streams.push_back(std::move(pos));
      for (int order = 1; order < catalog.position_orders; ++order)
        streams.push_back(differentiate(streams.back(), fs));
    }
  }
  for (const auto& pair : catalog.distances)
    streams.push_back(distance_stream(pair.a, pair.b, segment));
  for (const auto& triple : catalog.joint_angles) {
    Stream angle = joint_angle_stream(triple.a, triple.b, triple.c, segment);
    angle.name = "jang." + triple.name;
    streams.push_back(std::move(angle));
    if (catalog.joint_angle_speed) streams.push_back(differentiate(streams.back(), fs));
  }
  for (const auto& bone : catalog.bones) {
    for (Plane plane : {Plane::XY, Plane::YZ, Plane::ZX}) {
      streams.push_back(planar_angle_stream(bone, plane, segment));
      if (catalog.planar_angle_speed) streams.push_back(differentiate(streams.back(), fs));
    }
  }
  return streams;
}

void write_streams_csv(const std::vector<Stream>& streams, const std::string& path) {
  std::ostringstream out;
  for (std::size_t i = 0; i < streams.size(); ++i) out << (i ? "," : "") << streams[i].name;
  out << '\n';
  const Index n = streams.empty() ? 0 : streams[0].samples.size();
  for (Index t = 0; t < n; ++t) {
    for (std::size_t i = 0; i < streams.size(); ++i) {
      if (i) out << ',';
      out << csv::format_double(streams[i].samples(t));
    }
    out << '\n';
  }
  csv::write_file_atomic(path, out.str());
}

} // namespace mocaprec
