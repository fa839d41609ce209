/*
 * (C) Copyright 2026 The adaptive-emos authors.
 *
 * This software is licensed under the terms of the Apache Licence Version 2.0
 * which can be obtained at http://www.apache.org/licenses/LICENSE-2.0.
 */

#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "aemos/core.hpp"

namespace aemos {

/// Settings shared by all commands; echoed into every output.
struct RunConfig {
  std::size_t window = 30;
  double min_frac = 2.0 / 3.0;
  std::size_t k_nn = 25;
  std::vector<double> knots_km{0.0, 1.0, 1.5};
  std::vector<double> levels{0.81, 0.905};
  bool propagate_z_variance = false;

  bool operator==(const RunConfig&) const = default;
};

/// Everything fitted for one forecast date.
struct ModelFile {
  Date date{};
  RunConfig config;
  EmosModel emos;
  std::vector<StationState> station_states;
  FieldModel field_y;
  FieldModel field_z;
};

std::string to_json(const ModelFile& model);
ModelFile model_from_json(const std::string& text);

void write_model(const std::filesystem::path& path, const ModelFile& model);
ModelFile read_model(const std::filesystem::path& path);

std::string config_json(const RunConfig& config);
/// 64-bit FNV-1a of the canonical config JSON, as 16 hex digits.
std::string config_hash(const RunConfig& config);
std::uint64_t fnv1a(std::string_view bytes);

}  // namespace aemos
