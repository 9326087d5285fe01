#pragma once

#include "mocaprec/types.hpp"

#include <string>
#include <vector>

namespace mocaprec {

struct ManifestRow {
  std::string path;    // absolute after load (resolved against manifest dir)
  std::string subject;
  int label = kUnlabeled; // kUnlabeled for test rows
};

struct Manifest {
  std::vector<ManifestRow> rows;

  bool all_labeled() const;
  std::vector<std::string> subjects() const; // unique, sorted
};

// Header must be `path,subject,label`; empty label column = unlabeled.
Manifest load_manifest(const std::string& path);

// Rows are written with paths as given (generate_dataset keeps them relative).
void save_manifest(const Manifest& manifest, const std::string& path);

} // namespace mocaprec
