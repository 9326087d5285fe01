#include "mocaprec/trial.hpp"

#include "mocaprec/csv.hpp"
#include "mocaprec/error.hpp"

#include <cmath>
#include <set>
#include <sstream>

namespace mocaprec {

MarkerSchema MarkerSchema::default13() {
  MarkerSchema schema;
  schema.names = {"FrontHead", "TopHead",  "RearHead", "LShoulder", "RShoulder",
                  "Chest",     "LElbow",   "RElbow",   "LWrist",    "RWrist",
                  "LWaist",    "RWaist",   "VSacral"};
  return schema;
}

const std::vector<std::string>& MarkerSchema::required() {
  static const std::vector<std::string> req = {"FrontHead", "VSacral", "LShoulder", "RShoulder",
                                               "LElbow",    "RElbow",  "LWrist",    "RWrist"};
  return req;
}

int MarkerSchema::index_of(const std::string& name) const {
  for (std::size_t i = 0; i < names.size(); ++i)
    if (names[i] == name) return static_cast<int>(i);
  return -1;
}

void MarkerSchema::validate() const {
  std::set<std::string> uniq(names.begin(), names.end());
  if (uniq.size() != names.size()) raise(Err::BadConfig, "duplicate marker names in schema");
  for (const auto& req : required())
    if (uniq.find(req) == uniq.end())
      raise(Err::BadConfig, "schema is missing required marker " + req);
}

Trial parse_trial_csv(const std::string& path, const MarkerSchema& schema, const ManifestRow& meta,
                      double sample_rate_hz) {
  schema.validate();
  const auto lines = csv::read_lines(path);
  if (lines.empty()) raise(Err::EmptyFile, path + " is empty");

  const auto header = csv::split(lines[0]);
  const int n_cols = static_cast<int>(header.size());

  // column index per scalar coordinate, marker-major
  const int m = schema.size();
  std::vector<int> col_of(static_cast<std::size_t>(3 * m), -1);
  static const char* axis_suffix[3] = {".X", ".Y", ".Z"};
  for (int marker = 0; marker < m; ++marker) {
    for (int axis = 0; axis < 3; ++axis) {
      const std::string wanted = schema.names[static_cast<std::size_t>(marker)] + axis_suffix[axis];
      for (int c = 0; c < n_cols; ++c) {
        if (header[static_cast<std::size_t>(c)] == wanted) {
          col_of[static_cast<std::size_t>(3 * marker + axis)] = c;
          break;
        }
      }
      if (col_of[static_cast<std::size_t>(3 * marker + axis)] < 0)
        raise(Err::MissingColumn, path + " lacks column " + wanted);
    }
  }

  std::vector<std::size_t> data_lines;
  data_lines.reserve(lines.size());
  for (std::size_t i = 1; i < lines.size(); ++i)
    if (!lines[i].empty()) data_lines.push_back(i);
  if (data_lines.size() < 2)
    raise(Err::EmptyFile, path + " has fewer than 2 data rows");

  Trial trial;
  trial.trial_id = meta.path.empty() ? path : meta.path;
  {
    // strip directories and extension for a readable id
    std::string base = trial.trial_id;
    auto slash = base.find_last_of("/\\");
    if (slash != std::string::npos) base = base.substr(slash + 1);
    auto dot = base.find_last_of('.');
    if (dot != std::string::npos) base = base.substr(0, dot);
    trial.trial_id = base;
  }
  trial.subject_id = meta.subject;
  trial.label = meta.label;
  trial.sample_rate_hz = sample_rate_hz;
  trial.schema = schema;
  trial.coords.resize(static_cast<Index>(data_lines.size()), 3 * m);

  for (std::size_t r = 0; r < data_lines.size(); ++r) {
    const std::string& line = lines[data_lines[r]];
    const auto cells = csv::split(line);
    if (static_cast<int>(cells.size()) != n_cols)
      raise(Err::RaggedRow, path + " line " + std::to_string(data_lines[r] + 1) + ": expected " +
                                std::to_string(n_cols) + " cells, got " +
                                std::to_string(cells.size()));
    const std::string context = path + " line " + std::to_string(data_lines[r] + 1);
    for (int k = 0; k < 3 * m; ++k)
      trial.coords(static_cast<Index>(r), k) =
          csv::parse_cell(cells[static_cast<std::size_t>(col_of[static_cast<std::size_t>(k)])],
                          context);
  }
  return trial;
}

void write_trial_csv(const Trial& trial, const std::string& path) {
  std::ostringstream out;
  out << "time";
  for (const auto& name : trial.schema.names)
    out << ',' << name << ".X," << name << ".Y," << name << ".Z";
  out << '\n';
  const Index t_count = trial.frames();
  const int cols = static_cast<int>(trial.coords.cols());
  for (Index t = 0; t < t_count; ++t) {
    out << csv::format_double(static_cast<double>(t) / trial.sample_rate_hz);
    for (int k = 0; k < cols; ++k) {
      out << ',';
      const double v = trial.coords(t, k);
      if (!std::isnan(v)) out << csv::format_double(v);
    }
    out << '\n';
  }
  csv::write_file_atomic(path, out.str());
}

Trial interpolate_gaps(Trial trial, double max_missing_fraction) {
  const Index t_count = trial.frames();
  const Index cols = trial.coords.cols();
  for (Index c = 0; c < cols; ++c) {
    auto col = trial.coords.col(c);
    Index missing = 0;
    for (Index t = 0; t < t_count; ++t)
      if (std::isnan(col(t))) ++missing;
    if (missing == 0) continue;

    const auto coord_name = [&] {
      const int marker = static_cast<int>(c / 3);
      static const char* ax = "XYZ";
      return trial.schema.names[static_cast<std::size_t>(marker)] + "." + ax[c % 3];
    };
    if (missing == t_count)
      raise(Err::AllMissing, trial.trial_id + ": " + coord_name() + " has no valid sample");
    if (static_cast<double>(missing) > max_missing_fraction * static_cast<double>(t_count))
      raise(Err::TooManyMissing,
            trial.trial_id + ": " + coord_name() + " has " + std::to_string(missing) + "/" +
                std::to_string(t_count) + " missing samples");

    Index t = 0;
    while (t < t_count) {
      if (!std::isnan(col(t))) {
        ++t;
        continue;
      }
      Index run_start = t;
      while (t < t_count && std::isnan(col(t))) ++t;
      const Index run_end = t; // one past the gap
      const Index prev = run_start - 1;
      if (prev < 0 && run_end >= t_count) break; // unreachable: AllMissing above
      if (prev < 0) {
        col.head(run_end).setConstant(col(run_end)); // leading gap: nearest valid
      } else if (run_end >= t_count) {
        col.tail(t_count - run_start).setConstant(col(prev)); // trailing gap
      } else {
        const double lo = col(prev);
        const double hi = col(run_end);
        const double span = static_cast<double>(run_end - prev);
        for (Index i = run_start; i < run_end; ++i)
          col(i) = lo + (hi - lo) * static_cast<double>(i - prev) / span;
      }
    }
  }
  return trial;
}

} // namespace mocaprec
