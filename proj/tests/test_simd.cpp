/*
 * (C) Copyright 2026 The adaptive-emos authors.
 *
 * This software is licensed under the terms of the Apache Licence Version 2.0
 * which can be obtained at http://www.apache.org/licenses/LICENSE-2.0.
 */

#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <vector>

#include "aemos/scoring.hpp"
#include "aemos/simd/kernels.hpp"

namespace aemos {

namespace {

const simd::KernelTable* vector_table() { return simd::avx2_kernels(); }

}  // namespace

TEST(SimdKernels, ActiveTableHasName) { EXPECT_FALSE(simd::active_kernels().name.empty()); }

TEST(SimdKernels, DistancesBitIdentical) {
  const auto* v = vector_table();
  if (!v) GTEST_SKIP() << "no vector kernels on this machine";
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-500.0, 500.0);
  for (std::size_t n = 0; n < 37; ++n) {
    std::vector<double> xs(n), ys(n), a(n), b(n);
    for (std::size_t i = 0; i < n; ++i) {
      xs[i] = u(rng);
      ys[i] = u(rng);
    }
    const double x0 = u(rng), y0 = u(rng);
    simd::scalar_kernels().distances(x0, y0, xs.data(), ys.data(), n, a.data());
    v->distances(x0, y0, xs.data(), ys.data(), n, b.data());
    for (std::size_t i = 0; i < n; ++i) EXPECT_EQ(a[i], b[i]) << n << ":" << i;
  }
}

TEST(SimdKernels, TriweightBitIdentical) {
  const auto* v = vector_table();
  if (!v) GTEST_SKIP() << "no vector kernels on this machine";
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0.0, 2.0);
  for (std::size_t n = 0; n < 37; ++n) {
    std::vector<double> d(n), a(n), b(n);
    for (double& x : d) x = u(rng);
    if (n > 2) d[1] = 1.0;  // exactly on the support boundary
    simd::scalar_kernels().triweight(d.data(), n, 1.0, a.data());
    v->triweight(d.data(), n, 1.0, b.data());
    for (std::size_t i = 0; i < n; ++i) EXPECT_EQ(a[i], b[i]) << n << ":" << i;
  }
}

TEST(SimdKernels, GaussianCrpsAgreesWithScalar) {
  const auto* v = vector_table();
  if (!v) GTEST_SKIP() << "no vector kernels on this machine";
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> z_d(-40.0, 40.0), log_s(-8.0, 5.0);
  const std::size_t n = 4099;
  std::vector<double> mu(n), sigma(n), y(n);
  for (std::size_t i = 0; i < n; ++i) {
    mu[i] = z_d(rng);
    sigma[i] = std::exp(log_s(rng));
    const double z = i % 3 == 0 ? z_d(rng) : z_d(rng) / 8.0;
    y[i] = mu[i] + z * sigma[i];
  }
  y[0] = mu[0];
  std::vector<double> c1(n), c2(n), m1(n), m2(n), s1(n), s2(n);
  simd::scalar_kernels().gaussian_crps(mu.data(), sigma.data(), y.data(), n, c1.data(), m1.data(),
                                       s1.data());
  v->gaussian_crps(mu.data(), sigma.data(), y.data(), n, c2.data(), m2.data(), s2.data());
  for (std::size_t i = 0; i < n; ++i) {
    EXPECT_NEAR(c1[i], c2[i], 1e-14 * std::abs(c1[i]) + 1e-15 * sigma[i]) << i;
    EXPECT_NEAR(m1[i], m2[i], 1e-14) << i;
    EXPECT_NEAR(s1[i], s2[i], 1e-14) << i;
  }
}

TEST(SimdKernels, NullDerivativeOutputsAccepted) {
  const std::vector<double> mu{0.0, 1.0, 2.0, 3.0, 4.0};
  const std::vector<double> sigma(5, 1.0);
  const std::vector<double> y{0.5, 0.5, 0.5, 0.5, 0.5};
  std::vector<double> out(5);
  simd::gaussian_crps(mu, sigma, y, out);
  for (std::size_t i = 0; i < 5; ++i) {
    EXPECT_NEAR(out[i], scoring::gaussian_crps(mu[i], sigma[i], y[i]), 1e-14);
  }
}

TEST(SimdKernels, ScalarCrpsMatchesScoringModule) {
  const std::vector<double> mu{-2.0, 0.0, 7.5};
  const std::vector<double> sigma{0.3, 1.0, 12.0};
  const std::vector<double> y{1.0, 0.0, -30.0};
  std::vector<double> out(3), dmu(3), dsigma(3);
  simd::scalar_kernels().gaussian_crps(mu.data(), sigma.data(), y.data(), 3, out.data(),
                                       dmu.data(), dsigma.data());
  for (std::size_t i = 0; i < 3; ++i) {
    const auto g = scoring::gaussian_crps_grad(mu[i], sigma[i], y[i]);
    EXPECT_NEAR(out[i], scoring::gaussian_crps(mu[i], sigma[i], y[i]), 1e-15 * (1 + out[i]));
    EXPECT_NEAR(dmu[i], g.d_mu, 1e-15);
    EXPECT_NEAR(dsigma[i], g.d_sigma, 1e-15);
  }
}

}  // namespace aemos
