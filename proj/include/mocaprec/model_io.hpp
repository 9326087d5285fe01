#pragma once

#include "mocaprec/config.hpp"
#include "mocaprec/ensemble.hpp"

#include <string>

namespace mocaprec {

inline constexpr int kModelFormatVersion = 1;

struct LoadedModel {
  EnsembleModel model;
  PipelineConfig config;  // the pipeline settings the model was trained with
  StreamCatalog catalog;  // stored inline so the model file is self-contained
};

// Versioned, self-describing JSON (classes, feature names, flattened node
// arrays). Written atomically; deterministic bytes for a given model.
void save_model_json(const EnsembleModel& model, const PipelineConfig& config,
                     const std::string& path);

LoadedModel load_model_json(const std::string& path);

} // namespace mocaprec
