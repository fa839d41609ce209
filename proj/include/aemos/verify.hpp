/*
 * (C) Copyright 2026 The adaptive-emos authors.
 *
 * This software is licensed under the terms of the Apache Licence Version 2.0
 * which can be obtained at http://www.apache.org/licenses/LICENSE-2.0.
 */

#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "aemos/core.hpp"
#include "aemos/ingest.hpp"

namespace aemos::verify {

struct LevelScore {
  double nominal = 0.0;
  double width = 0.0;
  double coverage = 0.0;
};

/// One method's summary: MAE of the predictive median, mean CRPS and, per
/// interval level, mean width and empirical coverage.
struct ScoreRow {
  std::string method;
  std::size_t n = 0;
  double mae = 0.0;
  double crps = 0.0;
  std::vector<LevelScore> levels;
};

struct StationBias {
  std::string station_id;
  double mean_error = 0.0;
  std::size_t n = 0;
};

using PairKey = std::pair<std::string, Date>;

/// Scores forecasts that have an observation; the total variance is used.
/// Throws InputError when no forecast has a matching observation.
ScoreRow score_gaussian(const std::string& method, std::span<const GaussianForecast> forecasts,
                        const ingest::ObservationTable& obs, std::span<const double> levels);

/// Scores the raw ensemble on every (station, date) with all members and an
/// observation, optionally restricted to `keys`.  Levels come from the
/// ensemble ranges with the given rank drops, sorted by nominal coverage.
ScoreRow score_ensemble(const std::string& method, const ingest::EnsembleTable& ens,
                        const ingest::ObservationTable& obs, std::span<const int> rank_drops,
                        const std::set<PairKey>* keys = nullptr);

/// Mean of (mu - y) per site, sorted by id; sites without observations are omitted.
std::vector<StationBias> station_bias(std::span<const GaussianForecast> forecasts,
                                      const ingest::ObservationTable& obs);

/// Column suffix for a level: 0.81 -> "81", 0.905 -> "905".
std::string level_label(double level);

void write_scores(const std::filesystem::path& path, const std::string& header_comment,
                  std::span<const ScoreRow> rows, std::span<const double> levels);
void write_bias(const std::filesystem::path& path, const std::string& header_comment,
                std::span<const StationBias> rows, const std::map<std::string, Location>& where);

}  // namespace aemos::verify
