#include "mocaprec/manifest.hpp"

#include "mocaprec/csv.hpp"
#include "mocaprec/error.hpp"

#include <algorithm>
#include <charconv>
#include <filesystem>
#include <set>
#include <sstream>

namespace mocaprec {

namespace fs = std::filesystem;

bool Manifest::all_labeled() const {
  return std::all_of(rows.begin(), rows.end(),
                     [](const ManifestRow& r) { return r.label != kUnlabeled; });
}

std::vector<std::string> Manifest::subjects() const {
  std::set<std::string> uniq;
  for (const auto& r : rows) uniq.insert(r.subject);
  return {uniq.begin(), uniq.end()};
}

Manifest load_manifest(const std::string& path) {
  const auto lines = csv::read_lines(path);
  if (lines.empty()) raise(Err::EmptyFile, path + " is empty");
  if (lines[0] != "path,subject,label")
    raise(Err::BadConfig, path + ": expected header 'path,subject,label', got '" + lines[0] + "'");

  const fs::path base = fs::path(path).parent_path();
  Manifest manifest;
  std::set<std::string> seen;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    if (lines[i].empty()) continue;
    const auto cells = csv::split(lines[i]);
    if (cells.size() != 3)
      raise(Err::RaggedRow, path + " line " + std::to_string(i + 1) + ": expected 3 cells, got " +
                                std::to_string(cells.size()));
    ManifestRow row;
    fs::path p(cells[0]);
    row.path = (p.is_absolute() ? p : base / p).lexically_normal().string();
    row.subject = cells[1];
    if (cells[2].empty()) {
      row.label = kUnlabeled;
    } else {
      int label = 0;
      auto res = std::from_chars(cells[2].data(), cells[2].data() + cells[2].size(), label);
      if (res.ec != std::errc{} || res.ptr != cells[2].data() + cells[2].size() ||
          !is_valid_label(label))
        raise(Err::BadLabel, path + " line " + std::to_string(i + 1) + ": label '" + cells[2] +
                                 "' outside 1..10");
      row.label = label;
    }
    if (!seen.insert(row.path).second)
      raise(Err::DuplicatePath, path + ": duplicate trial path " + row.path);
    manifest.rows.push_back(std::move(row));
  }
  if (manifest.rows.empty()) raise(Err::EmptyFile, path + " has a header but no rows");
  return manifest;
}

void save_manifest(const Manifest& manifest, const std::string& path) {
  std::ostringstream out;
  out << "path,subject,label\n";
  for (const auto& row : manifest.rows) {
    out << row.path << ',' << row.subject << ',';
    if (row.label != kUnlabeled) out << row.label;
    out << '\n';
  }
  csv::write_file_atomic(path, out.str());
}

} // namespace mocaprec
