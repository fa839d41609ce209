/*
 * (C) Copyright 2026 The adaptive-emos authors.
 *
 * This software is licensed under the terms of the Apache Licence Version 2.0
 * which can be obtained at http://www.apache.org/licenses/LICENSE-2.0.
 */

#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "aemos/core.hpp"
#include "aemos/geostat.hpp"

namespace aemos::emos {

struct FitConfig {
  int max_iterations = 500;
  /// Stop once an iteration improves the mean CRPS by less than this (degC).
  double tolerance = 1e-8;
  double gradient_tolerance = 1e-7;
  /// Overrides of the default starting values; empty means defaults.
  std::vector<double> init_b;
  double init_c1 = 1.0;
  double init_c2 = 1.0;
  bool fit_baseline = true;
};

/// Window means per station: y_bar, f_bar per group and f_bar_star (the
/// window mean of the ensemble mean).
struct WindowStats {
  std::vector<double> y_bar;
  std::vector<std::vector<double>> f_bar;
  std::vector<double> f_bar_star;
  std::vector<std::size_t> n_days;
};

WindowStats window_statistics(const StationPanel& panel);

/// Least-squares slope of centered observations on the centered ensemble
/// mean, pooled over all stations and days.  Not sign-constrained.
double pooled_slope(const StationPanel& panel, const WindowStats& stats);

/// Mean squared residual of the pooled-slope regression, per station.
std::vector<double> local_uncertainty(const StationPanel& panel, const WindowStats& stats,
                                      double b_star);

/// Unbiased variance across the group forecasts; 0 for a single group.
double ensemble_variance(std::span<const double> groups);

/// One (station, day) pair of the CRPS objective.
struct TrainingPairs {
  Eigen::MatrixXd x;      // centered group forecasts (adaptive) or raw forecasts (baseline)
  Eigen::VectorXd y;      // observations
  Eigen::VectorXd y_bar;  // station means (adaptive only)
  Eigen::VectorXd xi2;
  Eigen::VectorXd s2;
  std::size_t skipped = 0;
};

/// Mean Gaussian CRPS of the adaptive model as a function of the square-root
/// parameters u: b_k = u_k^2, c1 = u_g^2, c2 = u_{g+1}^2 (absent when g = 1).
class AdaptiveObjective {
 public:
  AdaptiveObjective(const StationPanel& panel, const WindowStats& stats,
                    std::span<const double> xi2);

  std::size_t groups() const { return groups_; }
  std::size_t dimension() const { return groups_ + (groups_ > 1 ? 2 : 1); }
  std::size_t pairs() const { return static_cast<std::size_t>(data_.y.size()); }
  std::size_t skipped() const { return data_.skipped; }

  /// Mean CRPS; fills grad (same length as u) when non-empty.
  double evaluate(std::span<const double> u, std::span<double> grad = {}) const;

  std::vector<double> to_parameters(const std::vector<double>& b, double c1, double c2) const;
  void from_parameters(std::span<const double> u, std::vector<double>& b, double& c1,
                       double& c2) const;

 private:
  std::size_t groups_;
  TrainingPairs data_;
  mutable Eigen::VectorXd mu_, sigma_, crps_, dmu_, dsigma_;
};

/// Same for the plain NGR baseline with mu = a + sum b'_k f_k and
/// var = c + d S^2.  Forecasts are centered internally at their pooled means,
/// u = (a', sqrt b', sqrt c, sqrt d).
class BaselineObjective {
 public:
  explicit BaselineObjective(const StationPanel& panel);

  std::size_t groups() const { return groups_; }
  std::size_t dimension() const { return groups_ + (groups_ > 1 ? 3 : 2); }

  double evaluate(std::span<const double> u, std::span<double> grad = {}) const;

  std::vector<double> to_parameters(const BaselineNgr& params) const;
  BaselineNgr from_parameters(std::span<const double> u) const;
  double mean_observation() const { return data_.y.mean(); }

 private:
  std::size_t groups_;
  TrainingPairs data_;
  Eigen::VectorXd centre_;
  mutable Eigen::VectorXd mu_, sigma_, crps_, dmu_, dsigma_;
};

struct FitReport {
  double initial_crps = 0.0;
  double final_crps = 0.0;
  int iterations = 0;
  int start = 0;                    // index of the winning start
  std::vector<double> trace;        // mean CRPS after each accepted step of the winner
  std::size_t pairs = 0;
  std::size_t skipped_pairs = 0;
};

/// Minimum-CRPS estimate of (b, c1, c2).  Three fixed starts, best wins.
/// Throws DegenerateError when every predictive variance would vanish and
/// ConvergenceError (with the best iterate) when no start converges.
EmosModel fit_adaptive_emos(const StationPanel& panel, const WindowStats& stats,
                            std::span<const double> xi2, const MemberGrouping& grouping,
                            double b_star, const FitConfig& config = {},
                            FitReport* report = nullptr);

BaselineNgr fit_baseline_ngr(const StationPanel& panel, const FitConfig& config = {},
                             FitReport* report = nullptr);

/// Predictive distribution at a training station from today's group forecasts.
GaussianForecast predict_at_station(const EmosModel& model, const StationState& state,
                                    std::span<const double> today, Date date);

/// Predictive distribution at an arbitrary site: y_bar and xi^2 come from the
/// fitted fields; the kriging variance of y_bar is carried in interp_var.
/// With propagate_z_variance, xi^2 uses the lognormal mean exp(z + var_z / 2).
GaussianForecast predict_at_site(const EmosModel& model, const geostat::FittedField& field_y,
                                 const geostat::FittedField& field_z, const GridSite& site,
                                 std::span<const double> today, std::span<const double> train_means,
                                 Date date, bool propagate_z_variance = false);

/// Plain NGR predictive distribution from raw group forecasts.
GaussianForecast predict_baseline(const BaselineNgr& params, const std::string& site_id,
                                  std::span<const double> today, Date date);

}  // namespace aemos::emos
