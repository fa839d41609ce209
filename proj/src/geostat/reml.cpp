/*
 * (C) Copyright 2026 The adaptive-emos authors.
 *
 * This software is licensed under the terms of the Apache Licence Version 2.0
 * which can be obtained at http://www.apache.org/licenses/LICENSE-2.0.
 */

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <string>

#include "aemos/error.hpp"
#include "aemos/geostat.hpp"
#include "aemos/simd/kernels.hpp"
#include "nelder_mead.hpp"

namespace aemos::geostat {

namespace {

constexpr double kNuggetOffset = 1e-12;

Eigen::MatrixXd distance_matrix(std::span<const Location> sites) {
  const std::size_t n = sites.size();
  std::vector<double> xs(n), ys(n), row(n);
  for (std::size_t i = 0; i < n; ++i) {
    xs[i] = sites[i].x_km;
    ys[i] = sites[i].y_km;
  }
  Eigen::MatrixXd d(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < n; ++i) {
    simd::distances(xs[i], ys[i], xs, ys, row);
    for (std::size_t j = 0; j < n; ++j) {
      d(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i)) = row[j];
    }
  }
  return d;
}

double median_nearest_neighbor(const Eigen::MatrixXd& d) {
  std::vector<double> nn;
  for (Eigen::Index i = 0; i < d.cols(); ++i) {
    double best = std::numeric_limits<double>::infinity();
    for (Eigen::Index j = 0; j < d.rows(); ++j) {
      if (j != i) best = std::min(best, d(j, i));
    }
    nn.push_back(best);
  }
  std::nth_element(nn.begin(), nn.begin() + static_cast<std::ptrdiff_t>(nn.size() / 2), nn.end());
  return nn[nn.size() / 2];
}

}  // namespace

RemlObjective::RemlObjective(std::span<const Location> sites, std::span<const double> values,
                             const DriftBasis& drift, std::span<const double> zeta,
                             std::optional<Eigen::MatrixXd> contrasts) {
  const std::size_t n = sites.size();
  const std::size_t k = drift.size();
  if (values.size() != n || zeta.size() != n) throw DomainError("REML inputs differ in length");
  if (n < k + 1) throw DomainError("REML needs more stations than drift functions");
  const auto ni = static_cast<Eigen::Index>(n);
  const auto ki = static_cast<Eigen::Index>(k);

  const Eigen::MatrixXd p = drift.matrix(sites);
  if (contrasts) {
    if (contrasts->rows() != ni || contrasts->cols() != ni - ki) {
      throw DomainError("contrast basis must be n x (n - k)");
    }
    w_ = *contrasts;
  } else {
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(p);
    const Eigen::MatrixXd q = qr.householderQ();
    w_ = q.rightCols(ni - ki);
  }

  const Eigen::MatrixXd d = distance_matrix(sites);
  sigma_distance_ = -(w_.transpose() * d * w_);
  Eigen::VectorXd z(ni);
  for (Eigen::Index i = 0; i < ni; ++i) z(i) = zeta[static_cast<std::size_t>(i)];
  sigma_nugget_ = w_.transpose() * z.asDiagonal() * w_;
  Eigen::VectorXd y(ni);
  for (Eigen::Index i = 0; i < ni; ++i) y(i) = values[static_cast<std::size_t>(i)];
  wy_ = w_.transpose() * y;

  // -W'DW is positive definite for distinct sites; reduce the nugget part
  // against it once so each likelihood evaluation is O(n).
  const Eigen::LLT<Eigen::MatrixXd> chol(sigma_distance_);
  if (chol.info() != Eigen::Success) {
    throw ModelError("restricted covariance is not positive definite (duplicate sites?)");
  }
  const Eigen::MatrixXd l = chol.matrixL();
  logdet_base_ = 2.0 * l.diagonal().array().log().sum();
  const Eigen::MatrixXd linv_n = chol.matrixL().solve(sigma_nugget_);
  const Eigen::MatrixXd reduced = chol.matrixL().solve(linv_n.transpose());
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(0.5 * (reduced + reduced.transpose()));
  if (eig.info() != Eigen::Success) throw NumericError("eigendecomposition failed in REML setup");
  eig_ = eig.eigenvalues().cwiseMax(0.0);
  v_ = eig.eigenvectors().transpose() * chol.matrixL().solve(wy_);
}

double RemlObjective::loglik(double theta1, double theta2) const {
  const double dof = static_cast<double>(v_.size());
  double logdet = logdet_base_;
  double quad = 0.0;
  for (Eigen::Index i = 0; i < v_.size(); ++i) {
    const double s = theta2 + theta1 * eig_(i);
    logdet += std::log(s);
    quad += v_(i) * v_(i) / s;
  }
  return -0.5 * (dof * std::log(2.0 * std::numbers::pi) + logdet + quad);
}

double RemlObjective::loglik_direct(double theta1, double theta2) const {
  const Eigen::MatrixXd sigma = theta1 * sigma_nugget_ + theta2 * sigma_distance_;
  const Eigen::LLT<Eigen::MatrixXd> chol(sigma);
  if (chol.info() != Eigen::Success) throw ModelError("restricted covariance not positive definite");
  const Eigen::MatrixXd l = chol.matrixL();
  const double logdet = 2.0 * l.diagonal().array().log().sum();
  const Eigen::VectorXd r = chol.matrixL().solve(wy_);
  const double dof = static_cast<double>(wy_.size());
  return -0.5 * (dof * std::log(2.0 * std::numbers::pi) + logdet + r.squaredNorm());
}

double RemlObjective::profile_theta2(double ratio) const {
  double quad = 0.0;
  for (Eigen::Index i = 0; i < v_.size(); ++i) quad += v_(i) * v_(i) / (1.0 + ratio * eig_(i));
  return quad / static_cast<double>(v_.size());
}

RemlResult reml_fit(std::span<const Location> sites, std::span<const double> values,
                    const DriftBasis& drift, std::span<const double> zeta) {
  if (sites.size() < drift.size() + 5) throw DomainError("REML needs at least k + 5 stations");
  const RemlObjective objective(sites, values, drift, zeta);
  {
    const Eigen::MatrixXd p = drift.matrix(sites);
    const Eigen::Map<const Eigen::VectorXd> y(values.data(), static_cast<Eigen::Index>(values.size()));
    const Eigen::VectorXd residual = y - p * p.colPivHouseholderQr().solve(y);
    if (!(residual.norm() > 1e-10 * y.norm())) {
      throw ModelError("values lie in the drift span; covariance parameters are not identifiable");
    }
  }

  const double nn = median_nearest_neighbor(distance_matrix(sites));
  double zeta_mean = 0.0;
  for (double z : zeta) zeta_mean += z;
  zeta_mean /= static_cast<double>(zeta.size());
  const double ratio_scale = (zeta_mean > 0.0 ? nn / zeta_mean : nn);

  const std::function<double(const std::array<double, 2>&)> negloglik =
      [&](const std::array<double, 2>& p) {
        const double theta1 = std::max(std::exp(p[0]) - kNuggetOffset, 0.0);
        const double theta2 = std::exp(p[1]);
        const double ll = objective.loglik(theta1, theta2);
        return std::isfinite(ll) ? -ll : std::numeric_limits<double>::max();
      };

  RemlResult best;
  double best_f = std::numeric_limits<double>::infinity();
  bool any_converged = false;
  std::array<double, 2> best_x{};
  int evaluations = 0;
  for (const double mult : {0.01, 0.1, 1.0, 10.0}) {
    const double ratio = mult * ratio_scale;
    const double theta2 = objective.profile_theta2(ratio);
    const std::array<double, 2> start{std::log(ratio * theta2 + kNuggetOffset), std::log(theta2)};
    const auto res = detail::nelder_mead<2>(negloglik, start, 1.0, 1e-8, 4000);
    evaluations += res.evaluations;
    any_converged = any_converged || res.converged;
    if (res.f < best_f) {
      best_f = res.f;
      best_x = res.x;
    }
  }
  best.theta1 = std::max(std::exp(best_x[0]) - kNuggetOffset, 0.0);
  best.theta2 = std::exp(best_x[1]);
  best.loglik = -best_f;
  best.evaluations = evaluations;
  if (!any_converged) {
    throw ConvergenceError("REML did not converge", {best.theta1, best.theta2}, best.loglik);
  }
  return best;
}

}  // namespace aemos::geostat
