#include "mocaprec/model_io.hpp"

#include "mocaprec/csv.hpp"
#include "mocaprec/error.hpp"

#include <nlohmann/json.hpp>

#include <fstream>

namespace mocaprec {

using ordered_json = nlohmann::ordered_json;

namespace {

ordered_json catalog_to_json(const StreamCatalog& c) {
  ordered_json j;
  j["position_orders"] = c.position_orders;
  j["joint_angle_speed"] = c.joint_angle_speed;
  j["planar_angle_speed"] = c.planar_angle_speed;
  j["distances"] = ordered_json::array();
  for (const auto& d : c.distances) j["distances"].push_back({d.a, d.b});
  j["joint_angles"] = ordered_json::array();
  for (const auto& a : c.joint_angles)
    j["joint_angles"].push_back({{"name", a.name}, {"markers", {a.a, a.b, a.c}}});
  j["bones"] = ordered_json::array();
  for (const auto& b : c.bones)
    j["bones"].push_back({{"name", b.name}, {"markers", {b.a, b.b}}});
  return j;
}

StreamCatalog catalog_from_json(const ordered_json& j) {
  StreamCatalog c;
  c.position_orders = j.at("position_orders").get<int>();
  c.joint_angle_speed = j.at("joint_angle_speed").get<bool>();
  c.planar_angle_speed = j.at("planar_angle_speed").get<bool>();
  c.distances.clear();
  for (const auto& d : j.at("distances"))
    c.distances.push_back({d.at(0).get<std::string>(), d.at(1).get<std::string>()});
  for (const auto& a : j.at("joint_angles"))
    c.joint_angles.push_back({a.at("name").get<std::string>(),
                              a.at("markers").at(0).get<std::string>(),
                              a.at("markers").at(1).get<std::string>(),
                              a.at("markers").at(2).get<std::string>()});
  for (const auto& b : j.at("bones"))
    c.bones.push_back({b.at("name").get<std::string>(), b.at("markers").at(0).get<std::string>(),
                       b.at("markers").at(1).get<std::string>()});
  return c;
}

ordered_json tree_to_json(const DecisionTree& t) {
  ordered_json j;
  j["left"] = t.left;
  j["right"] = t.right;
  j["feature"] = t.feature;
  j["threshold"] = t.threshold;
  j["counts"] = t.counts;
  return j;
}

DecisionTree tree_from_json(const ordered_json& j, int n_classes) {
  DecisionTree t;
  t.left = j.at("left").get<std::vector<int>>();
  t.right = j.at("right").get<std::vector<int>>();
  t.feature = j.at("feature").get<std::vector<int>>();
  t.threshold = j.at("threshold").get<std::vector<double>>();
  t.counts = j.at("counts").get<std::vector<std::vector<std::int64_t>>>();
  t.gain.assign(t.left.size(), 0.0); // training detail, not persisted
  t.n_classes = n_classes;
  if (t.right.size() != t.left.size() || t.feature.size() != t.left.size() ||
      t.threshold.size() != t.left.size() || t.counts.size() != t.left.size())
    raise(Err::BadConfig, "model file: inconsistent tree arrays");
  return t;
}

ordered_json forest_to_json(const ForestModel& f) {
  ordered_json j;
  j["classes"] = f.classes;
  j["n_trees"] = f.config.n_trees;
  j["bootstrap"] = f.config.bootstrap;
  j["split_mode"] =
      f.config.tree.split_mode == TreeConfig::SplitMode::best ? "best" : "random";
  j["max_depth"] = f.config.tree.max_depth;
  j["min_samples_leaf"] = f.config.tree.min_samples_leaf;
  j["n_candidate_features"] = f.config.tree.n_candidate_features;
  j["seed"] = f.seed;
  j["trees"] = ordered_json::array();
  for (const auto& t : f.trees) j["trees"].push_back(tree_to_json(t));
  return j;
}

ForestModel forest_from_json(const ordered_json& j) {
  ForestModel f;
  f.classes = j.at("classes").get<std::vector<int>>();
  f.config.n_trees = j.at("n_trees").get<int>();
  f.config.bootstrap = j.at("bootstrap").get<bool>();
  f.config.tree.split_mode = j.at("split_mode").get<std::string>() == "best"
                                 ? TreeConfig::SplitMode::best
                                 : TreeConfig::SplitMode::random;
  f.config.tree.max_depth = j.at("max_depth").get<int>();
  f.config.tree.min_samples_leaf = j.at("min_samples_leaf").get<int>();
  f.config.tree.n_candidate_features = j.at("n_candidate_features").get<int>();
  f.seed = j.at("seed").get<std::uint64_t>();
  for (const auto& t : j.at("trees"))
    f.trees.push_back(tree_from_json(t, static_cast<int>(f.classes.size())));
  return f;
}

} // namespace

void save_model_json(const EnsembleModel& model, const PipelineConfig& config,
                     const std::string& path) {
  if (model.members.size() != static_cast<std::size_t>(kEnsembleMembers))
    raise(Err::BadConfig, "refusing to save an ensemble without exactly 5 members");
  ordered_json j;
  j["format"] = "mocaprec-model";
  j["version"] = kModelFormatVersion;
  j["classes"] = model.classes;
  j["pipeline"] = ordered_json::object();
  j["pipeline"]["window_s"] = config.window_s;
  j["pipeline"]["overlap_fraction"] = config.overlap_fraction;
  j["pipeline"]["sample_rate_hz"] = config.sample_rate_hz;
  j["pipeline"]["max_missing_fraction"] = config.max_missing_fraction;
  j["pipeline"]["markers"] = config.schema().names;
  j["pipeline"]["catalog"] = catalog_to_json(config.catalog());
  j["pipeline"]["seed"] = config.seed;
  j["members"] = ordered_json::array();
  for (const auto& m : model.members) {
    ordered_json member;
    member["kind"] = to_string(m.kind);
    member["subset_index"] = m.subset_index;
    member["cv_accuracy"] = m.cv_accuracy;
    member["features"] = m.features;
    member["forest"] = forest_to_json(m.forest);
    j["members"].push_back(std::move(member));
  }
  csv::write_file_atomic(path, j.dump());
}

LoadedModel load_model_json(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) raise(Err::MissingFile, "cannot open model " + path);
  ordered_json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    raise(Err::BadConfig, "model " + path + ": " + e.what());
  }
  if (j.value("format", "") != "mocaprec-model")
    raise(Err::BadConfig, path + " is not a mocaprec model file");
  if (j.at("version").get<int>() != kModelFormatVersion)
    raise(Err::BadConfig, "unsupported model version in " + path);

  LoadedModel loaded;
  loaded.model.classes = j.at("classes").get<std::vector<int>>();
  const auto& p = j.at("pipeline");
  loaded.config.window_s = p.at("window_s").get<double>();
  loaded.config.overlap_fraction = p.at("overlap_fraction").get<double>();
  loaded.config.sample_rate_hz = p.at("sample_rate_hz").get<double>();
  loaded.config.max_missing_fraction = p.at("max_missing_fraction").get<double>();
  loaded.config.markers = p.at("markers").get<std::vector<std::string>>();
  loaded.config.seed = p.at("seed").get<std::uint64_t>();
  loaded.catalog = catalog_from_json(p.at("catalog"));

  for (const auto& mj : j.at("members")) {
    EnsembleMember m;
    m.kind = mj.at("kind").get<std::string>() == "rf" ? ModelKind::rf : ModelKind::et;
    m.subset_index = mj.at("subset_index").get<int>();
    m.cv_accuracy = mj.at("cv_accuracy").get<double>();
    m.features = mj.at("features").get<std::vector<std::string>>();
    m.forest = forest_from_json(mj.at("forest"));
    m.forest.feature_names = m.features;
    loaded.model.members.push_back(std::move(m));
  }
  if (loaded.model.members.size() != static_cast<std::size_t>(kEnsembleMembers))
    raise(Err::BadConfig, path + " does not contain exactly 5 members");
  return loaded;
}

} // namespace mocaprec
