/*
 * (C) Copyright 2026 The adaptive-emos authors.
 *
 * This software is licensed under the terms of the Apache Licence Version 2.0
 * which can be obtained at http://www.apache.org/licenses/LICENSE-2.0.
 */

#include "oracles.hpp"

#include <gsl/gsl_cdf.h>
#include <gsl/gsl_integration.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace aemos::testing {

namespace {

struct CrpsParams {
  double mu, sigma, y;
};

double below(double x, void* p) {
  const auto* c = static_cast<const CrpsParams*>(p);
  const double f = gsl_cdf_gaussian_P(x - c->mu, c->sigma);
  return f * f;
}

double above(double x, void* p) {
  const auto* c = static_cast<const CrpsParams*>(p);
  const double f = gsl_cdf_gaussian_Q(x - c->mu, c->sigma);
  return f * f;
}

}  // namespace

double crps_quadrature(double mu, double sigma, double y) {
  CrpsParams params{mu, sigma, y};
  gsl_integration_workspace* ws = gsl_integration_workspace_alloc(2000);
  double lo = 0.0, hi = 0.0, err = 0.0;
  gsl_function f_lo{&below, &params};
  gsl_function f_hi{&above, &params};
  gsl_integration_qagil(&f_lo, y, 1e-13, 1e-12, 2000, ws, &lo, &err);
  gsl_integration_qagiu(&f_hi, y, 1e-13, 1e-12, 2000, ws, &hi, &err);
  gsl_integration_workspace_free(ws);
  return lo + hi;
}

double sample_crps_piecewise(std::vector<double> values, double y) {
  const double m = static_cast<double>(values.size());
  std::vector<double> breaks = values;
  breaks.push_back(y);
  std::sort(breaks.begin(), breaks.end());
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < breaks.size(); ++i) {
    const double a = breaks[i], b = breaks[i + 1];
    if (b <= a) continue;
    const double mid = 0.5 * (a + b);
    const double ecdf =
        static_cast<double>(std::count_if(values.begin(), values.end(),
                                          [mid](double v) { return v <= mid; })) / m;
    const double step = mid >= y ? 1.0 : 0.0;
    total += (ecdf - step) * (ecdf - step) * (b - a);
  }
  return total;
}

double quantile_bisection(double p) {
  // Upper tail by symmetry: 1 - p is exact there and erfc keeps full
  // relative precision.
  if (p > 0.5) return -quantile_bisection(1.0 - p);
  double lo = -40.0, hi = 0.0;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    const double cdf = 0.5 * std::erfc(-mid / std::sqrt(2.0));
    (cdf < p ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

PrimalPrediction primal_kriging(std::span<const Location> sites, std::span<const double> values,
                                const geostat::DriftBasis& drift, double theta1, double theta2,
                                std::span<const double> zeta, const Location& site,
                                double zeta_site) {
  const auto n = static_cast<Eigen::Index>(sites.size());
  Eigen::MatrixXd a(n, n);
  Eigen::VectorXd c(n);
  Eigen::VectorXd z(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto& si = sites[static_cast<std::size_t>(i)];
    for (Eigen::Index j = 0; j < n; ++j) {
      const auto& sj = sites[static_cast<std::size_t>(j)];
      a(i, j) = i == j ? theta1 * zeta[static_cast<std::size_t>(i)]
                       : -theta2 * std::hypot(si.x_km - sj.x_km, si.y_km - sj.y_km);
    }
    const double d = std::hypot(si.x_km - site.x_km, si.y_km - site.y_km);
    c(i) = d == 0.0 ? theta1 * zeta[static_cast<std::size_t>(i)] : -theta2 * d;
    z(i) = values[static_cast<std::size_t>(i)];
  }
  const Eigen::MatrixXd p = drift.matrix(sites);
  const Eigen::VectorXd p0 = drift.evaluate(site);

  // Particular solution of P' lambda = p0 plus the null space of P'.
  const Eigen::VectorXd lambda0 = p.transpose().colPivHouseholderQr().solve(p0);
  const Eigen::MatrixXd null = Eigen::FullPivLU<Eigen::MatrixXd>(p.transpose()).kernel();
  const Eigen::MatrixXd h = null.transpose() * a * null;
  const Eigen::VectorXd rhs = null.transpose() * (c - a * lambda0);
  const Eigen::VectorXd gamma = h.fullPivLu().solve(rhs);
  const Eigen::VectorXd lambda = lambda0 + null * gamma;

  PrimalPrediction out;
  out.value = lambda.dot(z);
  out.variance = theta1 * zeta_site - 2.0 * lambda.dot(c) + lambda.dot(a * lambda);
  return out;
}

std::vector<double> loo_brute_force(std::span<const Location> sites, std::span<const double> values,
                                    const geostat::DriftBasis& drift) {
  std::vector<double> errors;
  for (std::size_t i = 0; i < sites.size(); ++i) {
    std::vector<Location> s;
    std::vector<double> v, zeta;
    for (std::size_t j = 0; j < sites.size(); ++j) {
      if (j == i) continue;
      s.push_back(sites[j]);
      v.push_back(values[j]);
      zeta.push_back(0.0);
    }
    const auto pred = primal_kriging(s, v, drift, 0.0, 1.0, zeta, sites[i], 0.0);
    errors.push_back(values[i] - pred.value);
  }
  return errors;
}

std::vector<Location> random_sites(std::size_t n, std::mt19937_64& rng, double box_km,
                                   double alt_min_m, double alt_max_m) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<Location> out;
  for (std::size_t i = 0; i < n; ++i) {
    const double x = box_km * u(rng);
    const double y = box_km * u(rng);
    out.push_back({x, y, alt_min_m + (alt_max_m - alt_min_m) * u(rng)});
  }
  return out;
}

double central_difference(const std::function<double(const std::vector<double>&)>& f,
                          std::vector<double> x, std::size_t i, double h) {
  const double x0 = x[i];
  x[i] = x0 + h;
  const double fp = f(x);
  x[i] = x0 - h;
  const double fm = f(x);
  return (fp - fm) / (2.0 * h);
}

std::filesystem::path scratch_dir(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / ("aemos-test-" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
}

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace aemos::testing
