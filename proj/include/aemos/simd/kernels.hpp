/*
 * (C) Copyright 2026 The adaptive-emos authors.
 *
 * This software is licensed under the terms of the Apache Licence Version 2.0
 * which can be obtained at http://www.apache.org/licenses/LICENSE-2.0.
 */

#pragma once

#include <cstddef>
#include <span>
#include <string_view>

/// Data-parallel inner loops.  Every kernel has a scalar reference
/// implementation; vector variants are picked at runtime and must agree with
/// the reference to a few ulps (see tests/test_simd.cpp).
namespace aemos::simd {

struct KernelTable {
  std::string_view name;

  /// out[i] = ||(x0, y0) - (xs[i], ys[i])||
  void (*distances)(double x0, double y0, const double* xs, const double* ys, std::size_t n,
                    double* out);

  /// out[i] = (1 - h^2)^3 for h = dist[i] * inv_bandwidth < 1, else 0.
  void (*triweight)(const double* dist, std::size_t n, double inv_bandwidth, double* out);

  /// Gaussian CRPS and its partial derivatives for each (mu, sigma, y).
  /// dmu / dsigma may be null.  sigma must be positive.
  void (*gaussian_crps)(const double* mu, const double* sigma, const double* y, std::size_t n,
                        double* crps, double* dmu, double* dsigma);
};

const KernelTable& scalar_kernels();

/// nullptr when the AVX2 variant is not compiled in or the CPU lacks AVX2/FMA.
const KernelTable* avx2_kernels();

/// Kernels used by the library.  Honors ADAPTIVE_EMOS_SIMD=scalar.
const KernelTable& active_kernels();

inline void distances(double x0, double y0, std::span<const double> xs,
                      std::span<const double> ys, std::span<double> out) {
  active_kernels().distances(x0, y0, xs.data(), ys.data(), out.size(), out.data());
}

inline void triweight(std::span<const double> dist, double inv_bandwidth, std::span<double> out) {
  active_kernels().triweight(dist.data(), out.size(), inv_bandwidth, out.data());
}

inline void gaussian_crps(std::span<const double> mu, std::span<const double> sigma,
                          std::span<const double> y, std::span<double> crps,
                          std::span<double> dmu = {}, std::span<double> dsigma = {}) {
  active_kernels().gaussian_crps(mu.data(), sigma.data(), y.data(), crps.size(), crps.data(),
                                 dmu.empty() ? nullptr : dmu.data(),
                                 dsigma.empty() ? nullptr : dsigma.data());
}

}  // namespace aemos::simd
