#include "mocaprec/config.hpp"

#include "mocaprec/csv.hpp"
#include "mocaprec/error.hpp"

#include <charconv>
#include <filesystem>
#include <sstream>

namespace mocaprec {

namespace {

std::string strip(const std::string& s) {
  std::size_t b = s.find_first_not_of(" \t");
  if (b == std::string::npos) return "";
  std::size_t e = s.find_last_not_of(" \t");
  return s.substr(b, e - b + 1);
}

double parse_real(const std::string& key, const std::string& value) {
  double out = 0.0;
  auto res = std::from_chars(value.data(), value.data() + value.size(), out);
  if (res.ec != std::errc{} || res.ptr != value.data() + value.size())
    raise(Err::BadConfig, key + ": '" + value + "' is not a number");
  return out;
}

long long parse_int(const std::string& key, const std::string& value) {
  long long out = 0;
  auto res = std::from_chars(value.data(), value.data() + value.size(), out);
  if (res.ec != std::errc{} || res.ptr != value.data() + value.size())
    raise(Err::BadConfig, key + ": '" + value + "' is not an integer");
  return out;
}

std::vector<std::string> parse_list(const std::string& value) {
  std::vector<std::string> out;
  std::stringstream ss(value);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = strip(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

} // namespace

void PipelineConfig::validate() const {
  segment_spec().validate();
  if (sample_rate_hz <= 0) raise(Err::BadConfig, "sample_rate_hz must be positive");
  if (max_missing_fraction < 0 || max_missing_fraction > 1)
    raise(Err::BadConfig, "max_missing_fraction must be in [0, 1]");
  schema().validate();
  if (feature_target < 1) raise(Err::BadConfig, "feature_target must be >= 1");
  if (subset_count < 1) raise(Err::BadConfig, "subset_count must be >= 1");
  if (subset_size < 1) raise(Err::BadConfig, "subset_size must be >= 1");
  if (subset_size > feature_target)
    raise(Err::BadConfig, "subset_size cannot exceed feature_target");
  if (mdi_trees < 1 || candidate_trees < 1 || forest_trees < 1)
    raise(Err::BadConfig, "tree counts must be >= 1");
  tree_config().validate();
  if (cv_folds < 2) raise(Err::BadConfig, "cv_folds must be >= 2");
  if (kfold_k < 2) raise(Err::BadConfig, "kfold_k must be >= 2");
  if (scheme != "kfold" && scheme != "loso" && scheme != "loto")
    raise(Err::BadConfig, "scheme must be kfold, loso or loto");
  if (model != "ensemble" && model != "nb" && model != "rf" && model != "et")
    raise(Err::BadConfig, "model must be ensemble, nb, rf or et");
  if (ensemble_composition != "auto" && ensemble_composition != "4rf1et")
    raise(Err::BadConfig, "ensemble_composition must be auto or 4rf1et");
}

MarkerSchema PipelineConfig::schema() const {
  if (markers.empty()) return MarkerSchema::default13();
  MarkerSchema s;
  s.names = markers;
  return s;
}

StreamCatalog PipelineConfig::catalog() const {
  if (catalog_path.empty()) return StreamCatalog::defaults();
  return StreamCatalog::load_json(catalog_path);
}

SegmentSpec PipelineConfig::segment_spec() const { return {window_s, overlap_fraction}; }

TreeConfig PipelineConfig::tree_config() const {
  TreeConfig t;
  t.max_depth = max_depth;
  t.min_samples_leaf = min_samples_leaf;
  t.n_candidate_features = candidate_features;
  return t;
}

EnsembleTrainConfig PipelineConfig::ensemble_config() const {
  EnsembleTrainConfig e;
  e.candidate_trees = candidate_trees;
  e.final_trees = forest_trees;
  e.tree = tree_config();
  e.cv_folds = cv_folds;
  e.pin_4rf_1et = ensemble_composition == "4rf1et";
  e.seed = seed;
  return e;
}

PipelineConfig parse_config(const std::vector<std::string>& lines, const std::string& origin) {
  PipelineConfig config;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    std::string line = lines[i];
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = strip(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      raise(Err::BadConfig, origin + " line " + std::to_string(i + 1) + ": expected key=value");
    const std::string key = strip(line.substr(0, eq));
    const std::string value = strip(line.substr(eq + 1));

    if (key == "window_s") config.window_s = parse_real(key, value);
    else if (key == "overlap_fraction") config.overlap_fraction = parse_real(key, value);
    else if (key == "sample_rate_hz") config.sample_rate_hz = parse_real(key, value);
    else if (key == "max_missing_fraction") config.max_missing_fraction = parse_real(key, value);
    else if (key == "markers") config.markers = parse_list(value);
    else if (key == "catalog_path") config.catalog_path = value;
    else if (key == "feature_target") config.feature_target = static_cast<int>(parse_int(key, value));
    else if (key == "subset_count") config.subset_count = static_cast<int>(parse_int(key, value));
    else if (key == "subset_size") config.subset_size = static_cast<int>(parse_int(key, value));
    else if (key == "mdi_trees") config.mdi_trees = static_cast<int>(parse_int(key, value));
    else if (key == "candidate_trees") config.candidate_trees = static_cast<int>(parse_int(key, value));
    else if (key == "forest_trees") config.forest_trees = static_cast<int>(parse_int(key, value));
    else if (key == "max_depth") config.max_depth = static_cast<int>(parse_int(key, value));
    else if (key == "min_samples_leaf") config.min_samples_leaf = static_cast<int>(parse_int(key, value));
    else if (key == "candidate_features") config.candidate_features = static_cast<int>(parse_int(key, value));
    else if (key == "cv_folds") config.cv_folds = static_cast<int>(parse_int(key, value));
    else if (key == "kfold_k") config.kfold_k = static_cast<int>(parse_int(key, value));
    else if (key == "scheme") config.scheme = value;
    else if (key == "model") config.model = value;
    else if (key == "ensemble_composition") config.ensemble_composition = value;
    else if (key == "seed") config.seed = static_cast<std::uint64_t>(parse_int(key, value));
    else raise(Err::BadConfig, origin + ": unknown key '" + key + "'");
  }
  config.validate();
  return config;
}

PipelineConfig load_config(const std::string& path) {
  auto config = parse_config(csv::read_lines(path), path);
  if (!config.catalog_path.empty()) {
    // resolve relative to the config file
    namespace fs = std::filesystem;
    fs::path p(config.catalog_path);
    if (!p.is_absolute())
      config.catalog_path = (fs::path(path).parent_path() / p).lexically_normal().string();
    config.catalog().validate(config.schema());
  }
  return config;
}

std::string config_to_text(const PipelineConfig& c) {
  std::ostringstream out;
  out << "window_s=" << csv::format_double(c.window_s) << '\n';
  out << "overlap_fraction=" << csv::format_double(c.overlap_fraction) << '\n';
  out << "sample_rate_hz=" << csv::format_double(c.sample_rate_hz) << '\n';
  out << "max_missing_fraction=" << csv::format_double(c.max_missing_fraction) << '\n';
  if (!c.markers.empty()) {
    out << "markers=";
    for (std::size_t i = 0; i < c.markers.size(); ++i) out << (i ? "," : "") << c.markers[i];
    out << '\n';
  }
  if (!c.catalog_path.empty()) out << "catalog_path=" << c.catalog_path << '\n';
  out << "feature_target=" << c.feature_target << '\n';
  out << "subset_count=" << c.subset_count << '\n';
  out << "subset_size=" << c.subset_size << '\n';
  out << "mdi_trees=" << c.mdi_trees << '\n';
  out << "candidate_trees=" << c.candidate_trees << '\n';
  out << "forest_trees=" << c.forest_trees << '\n';
  out << "max_depth=" << c.max_depth << '\n';
  out << "min_samples_leaf=" << c.min_samples_leaf << '\n';
  out << "candidate_features=" << c.candidate_features << '\n';
  out << "cv_folds=" << c.cv_folds << '\n';
  out << "kfold_k=" << c.kfold_k << '\n';
  out << "scheme=" << c.scheme << '\n';
  out << "model=" << c.model << '\n';
  out << "ensemble_composition=" << c.ensemble_composition << '\n';
  out << "seed=" << c.seed << '\n';
  return out.str();
}

} // namespace mocaprec
