/*
 * (C) Copyright 2026 The adaptive-emos authors.
 *
 * This software is licensed under the terms of the Apache Licence Version 2.0
 * which can be obtained at http://www.apache.org/licenses/LICENSE-2.0.
 */

#pragma once

#include <span>
#include <vector>

namespace aemos::scoring {

/// Standard normal density, distribution function and quantile.  The
/// quantile is Acklam's rational approximation polished by one Halley step,
/// accurate to about 1e-15 in the central region.
double norm_pdf(double z);
double norm_cdf(double z);
double norm_quantile(double p);

/// Prediction interval with its nominal coverage.
struct Interval {
  double lower = 0.0;
  double upper = 0.0;
  double nominal = 0.0;

  double width() const { return upper - lower; }
  /// Closed interval: a value on the boundary counts as covered.
  bool covers(double y) const { return lower <= y && y <= upper; }
};

/// Closed-form CRPS of N(mu, sigma^2) at y.
double gaussian_crps(double mu, double sigma, double y);

struct CrpsGradient {
  double d_mu = 0.0;
  double d_sigma = 0.0;
};

CrpsGradient gaussian_crps_grad(double mu, double sigma, double y);

/// CRPS of the empirical distribution of an ensemble, evaluated in the
/// sorted O(m log m) form.
double sample_crps(std::span<const double> values, double y);

/// [mu - q sigma, mu + q sigma], q the standard normal (1 + level)/2 quantile.
Interval central_interval(double mu, double sigma, double level);

/// Ensemble range, or the range without the extreme members when
/// rank_drop = 1.  Nominal coverage (m - 1 - 2 rank_drop) / (m + 1).
Interval ensemble_interval(std::span<const double> values, int rank_drop);

/// Median; even sizes average the two central order statistics.
double median(std::span<const double> values);

}  // namespace aemos::scoring
