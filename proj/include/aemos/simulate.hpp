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
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "aemos/core.hpp"
#include "aemos/ingest.hpp"

namespace aemos::simulate {

/// Stateless generator: every draw is a hash of (seed, stream, counter), so
/// any value can be reproduced without replaying the ones before it.
class CounterRng {
 public:
  CounterRng(std::uint64_t seed, std::uint64_t stream);

  std::uint64_t bits(std::uint64_t counter) const;
  /// Uniform on the open interval (0, 1).
  double uniform(std::uint64_t counter) const;
  double normal(std::uint64_t counter) const;

 private:
  std::uint64_t key_;
};

std::uint64_t splitmix64(std::uint64_t x);

/// One draw of a Brownian surface pinned at the origin, with covariance
/// theta2 (|s| + |t| - |s - t|) + theta1 zeta_s on the diagonal.
std::vector<double> simulate_brownian(std::span<const Location> points, double theta2,
                                      std::span<const double> zeta, double theta1,
                                      std::uint64_t seed, std::uint64_t stream = 0);

struct FieldSpec {
  double theta1 = 0.1;
  double theta2 = 0.05;
  double zeta = 1.0;  // nugget indicator, equal at every location
};

struct SimConfig {
  std::uint64_t seed = 1;
  std::size_t stations = 200;
  std::size_t heldout_sites = 0;
  double box_km = 100.0;  // locations uniform on [0, box_km]^2
  double altitude_min_m = 0.0;
  double altitude_max_m = 1500.0;
  std::string start_date = "2026-01-01";
  std::size_t days = 60;

  FieldSpec y_field{0.1, 0.05, 1.0};
  /// Mean temperature trend in the spline basis (1, a, d1 - d2), a in km.
  std::vector<double> y_trend{10.0, -6.5, 2.0};
  FieldSpec z_field{0.02, 0.005, 1.0};
  double z_mean = 0.0;  // z = log xi^2

  std::vector<double> b{0.4, 0.3, 0.2, 0.1};
  double c1 = 1.0;
  double c2 = 0.5;
  std::size_t members_per_group = 5;
  double signal_sd = 3.0;      // day-to-day forecast signal shared by the groups
  double spread_scale = 1.0;   // typical spread of the group forecasts
  double member_sd = 0.5;      // spread of members around their group value
  double forecast_damping = 0.5;  // fraction of the trend present in the forecasts
  std::vector<double> group_bias{};  // optional per-group offsets

  std::size_t groups() const { return b.size(); }
};

/// Generating values at every location (training stations first, then
/// held-out sites).
struct SimTruth {
  SimConfig config;
  std::vector<std::string> ids;
  std::vector<Location> locations;
  std::vector<double> y_bar;
  std::vector<double> z;
  std::vector<double> xi2;
  std::vector<std::vector<double>> f_bar;  // [location][group]
};

struct SimDataset {
  std::vector<Station> stations;
  std::vector<GridSite> sites;
  std::vector<Date> days;
  std::vector<std::string> members;
  MemberGrouping grouping;
  ingest::ObservationTable obs;
  ingest::EnsembleTable ens;
  SimTruth truth;
};

SimDataset simulate_dataset(const SimConfig& config);

/// Training stations over all simulated days, as group means.
std::pair<StationPanel, SimTruth> simulate_panel(const SimConfig& config);

/// Writes stations.csv, grid.csv, observations.csv, ensemble.csv,
/// grouping.csv and truth.json into dir.
void write_dataset(const std::filesystem::path& dir, const SimDataset& data,
                   const std::string& header_comment);

SimConfig config_from_json(const std::string& text);
std::string config_to_json(const SimConfig& config);
std::string truth_to_json(const SimTruth& truth);

}  // namespace aemos::simulate
