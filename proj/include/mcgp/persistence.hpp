#pragma once

// Model files: two `//` comment lines followed by a JSON document.
//
//   // mcgp <version> model
//   // <provenance>
//   {"format": "mcgp-model", "version": 1, "cells": [...], "training_digest": ...,
//    "latents": R, "layout": ..., "hyperparameters": [...], "fit_report": {...}}
//
// save -> load -> save reproduces identical bytes.

#include <filesystem>
#include <string>
#include <string_view>

#include "mcgp/model.hpp"

namespace mcgp {

inline constexpr int kModelFormatVersion = 1;

std::string save_model(const McgpModel& model);
/// Throws FormatError on malformed documents or a training digest mismatch.
McgpModel load_model(std::string_view text);

void save_model_file(const McgpModel& model, const std::filesystem::path& path);
McgpModel load_model_file(const std::filesystem::path& path);

/// Digest of the training observations as stored in the model file.
std::string training_digest(const TrainingSet& train);

}  // namespace mcgp
