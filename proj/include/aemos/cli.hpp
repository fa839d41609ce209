/*
 * (C) Copyright 2026 The adaptive-emos authors.
 *
 * This software is licensed under the terms of the Apache Licence Version 2.0
 * which can be obtained at http://www.apache.org/licenses/LICENSE-2.0.
 */

#pragma once

#include <optional>
#include <string>
#include <vector>

#include "aemos/core.hpp"
#include "aemos/emos.hpp"
#include "aemos/ingest.hpp"
#include "aemos/model_io.hpp"

namespace aemos::cli {

/// Adaptive EMOS, both kriging fields and the station states for the
/// training window that ends the day before `date`.
ModelFile fit_date(const std::vector<Station>& stations, const ingest::ObservationTable& obs,
                   const ingest::EnsembleTable& ens, const MemberGrouping& grouping, Date date,
                   const RunConfig& config, const emos::FitConfig& fit_config = {});

/// Forecast at a site together with the interpolated fields behind it.
struct SitePrediction {
  GaussianForecast forecast;
  double y_bar = 0.0;
  double y_bar_sd = 0.0;
  double xi = 0.0;
};

/// Window means of the group forecasts at a site, over the model's training
/// days with all members present.  nullopt when no such day exists.
std::optional<std::vector<double>> training_means(const ModelFile& model,
                                                  const ingest::EnsembleTable& ens,
                                                  const std::string& site_id);

/// Predictions at arbitrary sites; sites without today's forecasts or
/// training-window forecasts are skipped with a warning.
std::vector<SitePrediction> predict_sites(const ModelFile& model, const ingest::EnsembleTable& ens,
                                          const std::vector<GridSite>& sites, Date date);

/// In-sample predictions at the model's training stations.
std::vector<GaussianForecast> predict_stations(const ModelFile& model,
                                               const ingest::EnsembleTable& ens, Date date);

/// Plain NGR predictions at the given site ids.
std::vector<GaussianForecast> predict_baseline_sites(const ModelFile& model,
                                                     const ingest::EnsembleTable& ens,
                                                     const std::vector<std::string>& site_ids,
                                                     Date date);

/// Header comment written at the top of every output CSV.
std::string header_comment(const RunConfig& config);

void write_predictions(const std::string& path, const std::string& header,
                       const std::vector<GaussianForecast>& rows);
std::vector<GaussianForecast> read_predictions(const std::string& path);

/// Parses arguments and runs a subcommand; returns the process exit code
/// (0 success, 2 input error, 3 numeric error, 4 internal error).
int run(int argc, char** argv);

}  // namespace aemos::cli
