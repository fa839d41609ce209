/*
 * (C) Copyright 2026 The adaptive-emos authors.
 *
 * This software is licensed under the terms of the Apache Licence Version 2.0
 * which can be obtained at http://www.apache.org/licenses/LICENSE-2.0.
 */

#pragma once

#include <Eigen/Dense>

#include <filesystem>
#include <functional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "aemos/core.hpp"
#include "aemos/geostat.hpp"

// Independent reference computations for the test suites.  None of them
// reuse the library code they are compared against.
namespace aemos::testing {

/// CRPS as the integral of (F(x) - 1{x >= y})^2, with F from GSL.
double crps_quadrature(double mu, double sigma, double y);

/// CRPS of an empirical distribution, integrated exactly between breakpoints.
double sample_crps_piecewise(std::vector<double> values, double y);

/// Standard normal quantile by bisection on erfc.
double quantile_bisection(double p);

struct PrimalPrediction {
  double value = 0.0;
  double variance = 0.0;
};

/// Kriging by minimizing the error variance over weights in the affine set
/// P' lambda = p(site), parametrized by a null-space basis.  A station that
/// coincides with the site shares its nugget with the site.
PrimalPrediction primal_kriging(std::span<const Location> sites, std::span<const double> values,
                                const geostat::DriftBasis& drift, double theta1, double theta2,
                                std::span<const double> zeta, const Location& site,
                                double zeta_site);

/// Leave-one-out errors by refitting without each station (theta1 = 0, theta2 = 1).
std::vector<double> loo_brute_force(std::span<const Location> sites, std::span<const double> values,
                                    const geostat::DriftBasis& drift);

std::vector<Location> random_sites(std::size_t n, std::mt19937_64& rng, double box_km = 50.0,
                                   double alt_min_m = 0.0, double alt_max_m = 1500.0);

/// Central finite difference of f along coordinate i.
double central_difference(const std::function<double(const std::vector<double>&)>& f,
                          std::vector<double> x, std::size_t i, double h);

/// Fresh empty directory under the system temp dir.
std::filesystem::path scratch_dir(const std::string& name);

void write_text(const std::filesystem::path& path, const std::string& text);
std::string read_text(const std::filesystem::path& path);

}  // namespace aemos::testing
