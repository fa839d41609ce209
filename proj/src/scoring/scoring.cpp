/*
 * (C) Copyright 2026 The adaptive-emos authors.
 *
 * This software is licensed under the terms of the Apache Licence Version 2.0
 * which can be obtained at http://www.apache.org/licenses/LICENSE-2.0.
 */

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "aemos/error.hpp"
#include "aemos/scoring.hpp"

namespace aemos::scoring {

namespace {

void require_positive_sigma(double sigma) {
  if (!(sigma > 0.0) || !std::isfinite(sigma)) {
    throw DomainError("sigma must be positive and finite, got " + std::to_string(sigma));
  }
}

}  // namespace

double gaussian_crps(double mu, double sigma, double y) {
  require_positive_sigma(sigma);
  const double z = (y - mu) / sigma;
  return sigma * (z * (2.0 * norm_cdf(z) - 1.0) + 2.0 * norm_pdf(z) - std::numbers::inv_sqrtpi);
}

CrpsGradient gaussian_crps_grad(double mu, double sigma, double y) {
  require_positive_sigma(sigma);
  const double z = (y - mu) / sigma;
  return {1.0 - 2.0 * norm_cdf(z), 2.0 * norm_pdf(z) - std::numbers::inv_sqrtpi};
}

double sample_crps(std::span<const double> values, double y) {
  if (values.empty()) throw DomainError("sample CRPS of an empty ensemble");
  std::vector<double> x(values.begin(), values.end());
  std::sort(x.begin(), x.end());
  const double m = static_cast<double>(x.size());
  // sum_{i<j} |x_i - x_j| = sum_i (2i - m + 1) x_(i), 0-based order statistics.
  double abs_err = 0.0;
  double spread = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    abs_err += std::abs(x[i] - y);
    spread += (2.0 * static_cast<double>(i) - m + 1.0) * x[i];
  }
  return abs_err / m - spread / (m * m);
}

Interval central_interval(double mu, double sigma, double level) {
  require_positive_sigma(sigma);
  if (!(level > 0.0 && level < 1.0)) throw DomainError("interval level must lie in (0, 1)");
  const double q = norm_quantile(0.5 * (1.0 + level));
  return {mu - q * sigma, mu + q * sigma, level};
}

Interval ensemble_interval(std::span<const double> values, int rank_drop) {
  if (rank_drop != 0 && rank_drop != 1) throw DomainError("rank_drop must be 0 or 1");
  const std::size_t m = values.size();
  if (m < static_cast<std::size_t>(2 * rank_drop + 2)) {
    throw DomainError("ensemble of size " + std::to_string(m) + " too small for rank_drop " +
                      std::to_string(rank_drop));
  }
  std::vector<double> x(values.begin(), values.end());
  std::sort(x.begin(), x.end());
  const double nominal =
      static_cast<double>(static_cast<int>(m) - 1 - 2 * rank_drop) / static_cast<double>(m + 1);
  return {x[rank_drop], x[m - 1 - rank_drop], nominal};
}

double median(std::span<const double> values) {
  if (values.empty()) throw DomainError("median of an empty sample");
  std::vector<double> x(values.begin(), values.end());
  std::sort(x.begin(), x.end());
  const std::size_t h = x.size() / 2;
  return x.size() % 2 == 1 ? x[h] : 0.5 * (x[h - 1] + x[h]);
}

}  // namespace aemos::scoring
