/*
 * (C) Copyright 2026 The adaptive-emos authors.
 *
 * This software is licensed under the terms of the Apache Licence Version 2.0
 * which can be obtained at http://www.apache.org/licenses/LICENSE-2.0.
 */

#include <cmath>
#include <numbers>

#include "aemos/simd/kernels.hpp"

namespace aemos::simd {

namespace {

void distances_scalar(double x0, double y0, const double* xs, const double* ys, std::size_t n,
                      double* out) {
  for (std::size_t i = 0; i < n; ++i) {
    const double dx = x0 - xs[i];
    const double dy = y0 - ys[i];
    out[i] = std::sqrt(dx * dx + dy * dy);
  }
}

void triweight_scalar(const double* dist, std::size_t n, double inv_bandwidth, double* out) {
  for (std::size_t i = 0; i < n; ++i) {
    const double h = dist[i] * inv_bandwidth;
    const double u = 1.0 - h * h;
    out[i] = h < 1.0 ? u * u * u : 0.0;
  }
}

void gaussian_crps_scalar(const double* mu, const double* sigma, const double* y, std::size_t n,
                          double* crps, double* dmu, double* dsigma) {
  constexpr double inv_sqrt_pi = std::numbers::inv_sqrtpi;
  constexpr double inv_sqrt_2pi = std::numbers::inv_sqrtpi / std::numbers::sqrt2;
  constexpr double inv_sqrt2 = 0.5 * std::numbers::sqrt2;
  for (std::size_t i = 0; i < n; ++i) {
    const double z = (y[i] - mu[i]) / sigma[i];
    const double cdf = 0.5 * std::erfc(-z * inv_sqrt2);
    const double pdf = inv_sqrt_2pi * std::exp(-0.5 * z * z);
    crps[i] = sigma[i] * (z * (2.0 * cdf - 1.0) + 2.0 * pdf - inv_sqrt_pi);
    if (dmu) dmu[i] = 1.0 - 2.0 * cdf;
    if (dsigma) dsigma[i] = 2.0 * pdf - inv_sqrt_pi;
  }
}

}  // namespace

const KernelTable& scalar_kernels() {
  static const KernelTable table{"scalar", distances_scalar, triweight_scalar,
                                 gaussian_crps_scalar};
  return table;
}

}  // namespace aemos::simd
