/*
 * (C) Copyright 2026 The adaptive-emos authors.
 *
 * This software is licensed under the terms of the Apache Licence Version 2.0
 * which can be obtained at http://www.apache.org/licenses/LICENSE-2.0.
 */

#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "aemos/error.hpp"
#include "aemos/geostat.hpp"
#include "aemos/log.hpp"
#include "aemos/simulate.hpp"
#include "oracles.hpp"

namespace aemos {

using geostat::DriftBasis;
using geostat::KrigingSystem;

namespace {

std::vector<double> random_values(std::size_t n, std::mt19937_64& rng) {
  std::normal_distribution<double> nd(0.0, 3.0);
  std::vector<double> v(n);
  for (double& x : v) x = nd(rng);
  return v;
}

std::vector<double> random_zeta(std::size_t n, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.2, 2.0);
  std::vector<double> z(n);
  for (double& x : z) x = u(rng);
  return z;
}

double rel_diff(double a, double b) { return std::abs(a - b) / std::max(1.0, std::abs(b)); }

}  // namespace

TEST(SplineBasis, HandValues) {
  // d1(a) = a^3 / 1.5 and d2(a) = (a - 1)^3 / 0.5 until the last knot.
  auto b = geostat::natural_spline_basis(0.0);
  EXPECT_EQ(b[0], 1.0);
  EXPECT_EQ(b[1], 0.0);
  EXPECT_EQ(b[2], 0.0);
  b = geostat::natural_spline_basis(1.2);
  EXPECT_NEAR(b[2], 1.728 / 1.5 - 0.008 / 0.5, 1e-14);
  b = geostat::natural_spline_basis(2.0);
  EXPECT_NEAR(b[2], 3.5, 1e-14);
  b = geostat::natural_spline_basis(-0.3);
  EXPECT_EQ(b[2], 0.0);
}

TEST(SplineBasis, LinearBeyondBoundaryKnot) {
  const double f2 = geostat::natural_spline_basis(2.0)[2];
  const double f25 = geostat::natural_spline_basis(2.5)[2];
  const double f3 = geostat::natural_spline_basis(3.0)[2];
  EXPECT_NEAR(f2 - 2.0 * f25 + f3, 0.0, 1e-12);
}

TEST(DriftBasis, ConstantAndSpline) {
  EXPECT_EQ(DriftBasis::constant().size(), 1u);
  const auto s = DriftBasis::altitude_spline();
  EXPECT_EQ(s.size(), 3u);
  const auto p = s.evaluate(Location{0, 0, 1200.0});
  EXPECT_NEAR(p(1), 1.2, 1e-15);
  EXPECT_THROW(DriftBasis::altitude_spline({0.0, 1.0, 0.5}), DomainError);
}

class KrigingOracle : public ::testing::TestWithParam<int> {};

TEST_P(KrigingOracle, DualMatchesPrimal) {
  std::mt19937_64 rng(100 + GetParam());
  const std::size_t n = 25;
  const auto sites = testing::random_sites(n, rng);
  const auto values = random_values(n, rng);
  const auto zeta = random_zeta(n, rng);
  std::uniform_real_distribution<double> u(0.1, 2.0);
  const double theta1 = u(rng), theta2 = u(rng);
  for (const auto& drift : {DriftBasis::constant(), DriftBasis::altitude_spline()}) {
    const KrigingSystem sys(sites, drift, theta1, theta2, zeta);
    const auto w = geostat::krige(sys, values);
    // P' alpha = 0.
    const Eigen::VectorXd orth = drift.matrix(sites).transpose() * w.alpha;
    EXPECT_LT(orth.cwiseAbs().maxCoeff(), 1e-10);
    for (int q = 0; q < 10; ++q) {
      const auto targets = testing::random_sites(1, rng);
      const double zeta_site = u(rng);
      const auto dual = geostat::predict(sys, w, targets[0], zeta_site);
      const auto primal = testing::primal_kriging(sites, values, drift, theta1, theta2, zeta,
                                                  targets[0], zeta_site);
      EXPECT_LT(rel_diff(dual.value, primal.value), 1e-8);
      EXPECT_LT(rel_diff(dual.variance, primal.variance), 1e-8);
      EXPECT_NEAR(geostat::predict_value(sys, w, targets[0]), dual.value, 1e-10);
    }
  }
}

INSTANTIATE_TEST_SUITE_P(Fixtures, KrigingOracle, ::testing::Range(0, 5));

TEST(Kriging, ZeroNuggetExactAtStations) {
  std::mt19937_64 rng(5);
  const std::size_t n = 30;
  const auto sites = testing::random_sites(n, rng);
  const auto values = random_values(n, rng);
  const std::vector<double> zeta(n, 0.0);
  const KrigingSystem sys(sites, DriftBasis::altitude_spline(), 0.0, 0.7, zeta);
  const auto w = geostat::krige(sys, values);
  for (std::size_t i = 0; i < n; ++i) {
    const auto p = geostat::predict(sys, w, sites[i], 0.0);
    EXPECT_NEAR(p.value, values[i], 1e-9);
    EXPECT_NEAR(p.variance, 0.0, 1e-9);
  }
}

TEST(Kriging, CoincidentSiteSharesNugget) {
  std::mt19937_64 rng(6);
  const std::size_t n = 20;
  const auto sites = testing::random_sites(n, rng);
  const auto values = random_values(n, rng);
  const auto zeta = random_zeta(n, rng);
  const KrigingSystem sys(sites, DriftBasis::constant(), 0.5, 1.0, zeta);
  const auto w = geostat::krige(sys, values);
  const auto p = geostat::predict(sys, w, sites[3], zeta[3]);
  EXPECT_NEAR(p.value, values[3], 1e-9);
  EXPECT_NEAR(p.variance, 0.0, 1e-9);
  const auto primal =
      testing::primal_kriging(sites, values, DriftBasis::constant(), 0.5, 1.0, zeta, sites[3], zeta[3]);
  EXPECT_NEAR(primal.value, values[3], 1e-9);
}

TEST(Kriging, DriftBasisInvariance) {
  std::mt19937_64 rng(7);
  const std::size_t n = 25;
  const auto sites = testing::random_sites(n, rng);
  const auto values = random_values(n, rng);
  const auto zeta = random_zeta(n, rng);
  const auto base = DriftBasis::altitude_spline();
  Eigen::MatrixXd t(3, 3);
  t << 2.0, 0.3, -1.0, 0.5, 1.5, 0.2, -0.4, 0.1, 0.8;
  const auto mixed = base.recombined(t);
  const KrigingSystem a(sites, base, 0.3, 0.9, zeta);
  const KrigingSystem b(sites, mixed, 0.3, 0.9, zeta);
  const auto wa = geostat::krige(a, values);
  const auto wb = geostat::krige(b, values);
  for (const auto& site : testing::random_sites(20, rng)) {
    const auto pa = geostat::predict(a, wa, site, 1.0);
    const auto pb = geostat::predict(b, wb, site, 1.0);
    EXPECT_LT(rel_diff(pa.value, pb.value), 1e-8);
    EXPECT_LT(rel_diff(pa.variance, pb.variance), 1e-8);
  }
}

TEST(Kriging, DegenerateInputs) {
  std::vector<Location> flat;
  for (int i = 0; i < 10; ++i) flat.push_back({double(i), double(i * i % 7), 300.0});
  const std::vector<double> zeta(10, 1.0);
  EXPECT_THROW(KrigingSystem(flat, DriftBasis::altitude_spline(), 0.1, 1.0, zeta),
               DriftDegeneracyError);
  auto dup = flat;
  dup[1] = dup[0];
  EXPECT_THROW(KrigingSystem(dup, DriftBasis::constant(), 0.1, 1.0, zeta), ValidationError);
  EXPECT_THROW(KrigingSystem(flat, DriftBasis::constant(), 0.1, 0.0, zeta), DomainError);
}

TEST(Loocv, MatchesBruteForce) {
  std::mt19937_64 rng(8);
  for (int rep = 0; rep < 5; ++rep) {
    const std::size_t n = 10 + 10 * static_cast<std::size_t>(rep);
    const auto sites = testing::random_sites(n, rng);
    const auto values = random_values(n, rng);
    for (const auto& drift : {DriftBasis::constant(), DriftBasis::altitude_spline()}) {
      const auto cv = geostat::loocv(sites, values, drift);
      const auto brute = testing::loo_brute_force(sites, values, drift);
      for (std::size_t i = 0; i < n; ++i) {
        EXPECT_LT(rel_diff(cv.errors[i], brute[i]), 1e-8) << rep << ":" << i;
        EXPECT_GE(cv.zeta_raw[i], 0.0);
      }
    }
  }
}

TEST(NuggetSurface, TriweightWeights) {
  const std::vector<Location> sites{{0, 0, 0}, {1, 0, 0}, {2, 0, 0}, {3, 0, 0}};
  const std::vector<double> zr{1.0, 2.0, 4.0, 8.0};
  // At a station with k_nn = 2 the bandwidth is the distance to the nearest
  // other station, so only the station itself has weight.
  const geostat::NuggetSurface s2(sites, zr, 2);
  EXPECT_DOUBLE_EQ(s2.bandwidth(sites[0]), 1.0);
  EXPECT_DOUBLE_EQ(s2(sites[0]), 1.0);
  // Between stations with k_nn = 3: bandwidth 1.6, weights (1 - h^2)^3.
  const geostat::NuggetSurface s3(sites, zr, 3);
  const Location q{0.4, 0, 0};
  EXPECT_DOUBLE_EQ(s3.bandwidth(q), 1.6);
  const double w0 = std::pow(1.0 - 0.25 * 0.25, 3), w1 = std::pow(1.0 - 0.375 * 0.375, 3);
  EXPECT_NEAR(s3(q), (w0 * 1.0 + w1 * 2.0) / (w0 + w1), 1e-14);
  // k_nn larger than the network: bandwidth is the largest distance.
  const geostat::NuggetSurface s9(sites, zr, 9);
  EXPECT_DOUBLE_EQ(s9.bandwidth(q), 2.6);
}

TEST(NuggetSurface, FallsBackToNearestStation) {
  const std::vector<Location> sites{{0, 0, 0}, {1, 0, 0}, {5, 0, 0}};
  const std::vector<double> zr{1.0, 2.0, 3.0};
  const geostat::NuggetSurface s(sites, zr, 1);
  // Bandwidth equals the nearest distance, so every weight vanishes.
  EXPECT_DOUBLE_EQ(s(Location{4.0, 0, 0}), 3.0);
  const auto w = s.weights(Location{4.0, 0, 0});
  EXPECT_EQ(w[2], 1.0);
}

TEST(Reml, FastAndDirectAgree) {
  std::mt19937_64 rng(9);
  const std::size_t n = 40;
  const auto sites = testing::random_sites(n, rng);
  const auto values = random_values(n, rng);
  const auto zeta = random_zeta(n, rng);
  const geostat::RemlObjective obj(sites, values, DriftBasis::altitude_spline(), zeta);
  EXPECT_EQ(obj.dof(), n - 3);
  for (double t1 : {0.0, 0.1, 1.0, 10.0}) {
    for (double t2 : {0.01, 0.5, 3.0}) {
      EXPECT_LT(rel_diff(obj.loglik(t1, t2), obj.loglik_direct(t1, t2)), 1e-9) << t1 << "," << t2;
    }
  }
}

TEST(Reml, IndependentOfContrastBasis) {
  std::mt19937_64 rng(10);
  const std::size_t n = 30;
  const auto sites = testing::random_sites(n, rng);
  const auto values = random_values(n, rng);
  const auto zeta = random_zeta(n, rng);
  const auto drift = DriftBasis::altitude_spline();
  const geostat::RemlObjective a(sites, values, drift, zeta);
  // A different orthonormal basis of null(P'): rotate the default one.
  Eigen::MatrixXd r = Eigen::MatrixXd::Random(n - 3, n - 3);
  const Eigen::MatrixXd q = Eigen::HouseholderQR<Eigen::MatrixXd>(r).householderQ();
  const Eigen::MatrixXd w = a.contrasts() * q;
  const geostat::RemlObjective b(sites, values, drift, zeta, w);
  EXPECT_LT(rel_diff(a.loglik(0.4, 1.3), b.loglik(0.4, 1.3)), 1e-9);
  EXPECT_LT(rel_diff(a.loglik(0.4, 1.3), b.loglik_direct(0.4, 1.3)), 1e-9);
}

TEST(Reml, ProfileSlopeIsStationary) {
  std::mt19937_64 rng(11);
  const std::size_t n = 40;
  const auto sites = testing::random_sites(n, rng);
  const auto values = random_values(n, rng);
  const auto zeta = random_zeta(n, rng);
  const geostat::RemlObjective obj(sites, values, DriftBasis::constant(), zeta);
  const double ratio = 0.3;
  const double t2 = obj.profile_theta2(ratio);
  const double best = obj.loglik(ratio * t2, t2);
  for (double f : {0.99, 1.01, 0.5, 2.0}) {
    EXPECT_GE(best, obj.loglik(ratio * t2 * f, t2 * f));
  }
}

TEST(Reml, FitBeatsNeighbouringPoints) {
  std::vector<Location> sites;
  std::mt19937_64 rng(12);
  sites = testing::random_sites(120, rng, 20.0);
  const std::vector<double> zeta(sites.size(), 1.0);
  const auto values = simulate::simulate_brownian(sites, 1.0, zeta, 0.5, 77);
  const auto drift = DriftBasis::constant();
  const auto fit = geostat::reml_fit(sites, values, drift, zeta);
  const geostat::RemlObjective obj(sites, values, drift, zeta);
  EXPECT_NEAR(fit.loglik, obj.loglik(fit.theta1, fit.theta2), 1e-9);
  for (double f1 : {0.9, 1.1}) {
    for (double f2 : {0.9, 1.1}) {
      EXPECT_GE(fit.loglik + 1e-7, obj.loglik(fit.theta1 * f1, fit.theta2 * f2));
    }
  }
  EXPECT_GT(fit.theta2, 0.0);
  EXPECT_GE(fit.theta1, 0.0);
}

TEST(Reml, ValuesInDriftSpanRejected) {
  std::mt19937_64 rng(13);
  const auto sites = testing::random_sites(20, rng);
  const std::vector<double> values(20, 4.2);
  const std::vector<double> zeta(20, 1.0);
  EXPECT_THROW(geostat::reml_fit(sites, values, DriftBasis::constant(), zeta), ModelError);
  const auto few = testing::random_sites(5, rng);
  EXPECT_THROW(geostat::reml_fit(few, std::vector<double>(5, 1.0), DriftBasis::constant(),
                                 std::vector<double>(5, 1.0)),
               DomainError);
}

TEST(FittedField, RebuildsModelAndInterpolatesStations) {
  std::mt19937_64 rng(14);
  const std::size_t n = 60;
  const auto sites = testing::random_sites(n, rng);
  std::vector<std::string> ids;
  for (std::size_t i = 0; i < n; ++i) ids.push_back("S" + std::to_string(i));
  const std::vector<double> zeta(n, 1.0);
  auto values = simulate::simulate_brownian(sites, 0.2, zeta, 0.1, 5);
  for (std::size_t i = 0; i < n; ++i) values[i] += 8.0 - 6.0 * sites[i].altitude_m / 1000.0;
  const auto model =
      geostat::fit_field(FieldKind::Y, ids, sites, values, DriftBasis::altitude_spline(), 25);
  EXPECT_EQ(model.zeta_raw.size(), n);
  EXPECT_EQ(model.beta.size(), 3u);
  const geostat::FittedField field(model);
  for (std::size_t i = 0; i < n; i += 7) {
    const auto p = field.predict(sites[i]);
    EXPECT_NEAR(p.value, values[i], 1e-8);
    EXPECT_NEAR(p.variance, 0.0, 1e-8);
  }
  const auto far = field.predict(Location{25.0, 25.0, 400.0});
  EXPECT_GT(far.variance, 0.0);
}

TEST(LogVariance, FloorWarns) {
  std::vector<std::string> seen;
  auto previous = set_warning_handler([&](const std::string& m) { seen.push_back(m); });
  const std::vector<double> xi2{2.0, 0.0};
  const std::vector<std::string> ids{"A", "B"};
  const auto z = geostat::log_variance_values(xi2, ids);
  set_warning_handler(previous);
  EXPECT_DOUBLE_EQ(z[0], std::log(2.0));
  EXPECT_DOUBLE_EQ(z[1], std::log(1e-6));
  ASSERT_EQ(seen.size(), 1u);
  EXPECT_NE(seen[0].find("B"), std::string::npos);
}

}  // namespace aemos
