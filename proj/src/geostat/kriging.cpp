/*
 * (C) Copyright 2026 The adaptive-emos authors.
 *
 * This software is licensed under the terms of the Apache Licence Version 2.0
 * which can be obtained at http://www.apache.org/licenses/LICENSE-2.0.
 */

#include <lapacke.h>

#include <algorithm>
#include <cmath>
#include <string>
#include <type_traits>

#include "aemos/error.hpp"
#include "aemos/geostat.hpp"
#include "aemos/simd/kernels.hpp"

namespace aemos::geostat {

static_assert(std::is_same_v<lapack_int, int>, "LP64 LAPACK expected");

KrigingSystem::KrigingSystem(std::vector<Location> sites, DriftBasis drift, double theta1,
                             double theta2, std::vector<double> zeta)
    : sites_(std::move(sites)),
      drift_(std::move(drift)),
      theta1_(theta1),
      theta2_(theta2),
      zeta_(std::move(zeta)) {
  const std::size_t n = sites_.size();
  const std::size_t k = drift_.size();
  if (n <= k) {
    throw DomainError("kriging needs more stations (" + std::to_string(n) +
                      ") than drift functions (" + std::to_string(k) + ")");
  }
  if (!(theta2_ > 0.0) || !(theta1_ >= 0.0)) throw DomainError("need theta1 >= 0, theta2 > 0");
  if (zeta_.size() != n) throw DomainError("zeta must have one entry per station");
  for (double z : zeta_) {
    if (!(z >= 0.0) || !std::isfinite(z)) throw DomainError("zeta must be finite and >= 0");
  }

  xs_.resize(n);
  ys_.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    xs_[i] = sites_[i].x_km;
    ys_[i] = sites_[i].y_km;
  }

  const auto ni = static_cast<Eigen::Index>(n);
  const auto ki = static_cast<Eigen::Index>(k);
  const Eigen::MatrixXd p = drift_.matrix(sites_);
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(p);
  qr.setThreshold(1e-10);
  if (qr.rank() < ki) {
    throw DriftDegeneracyError("drift functions are linearly dependent on the station set");
  }

  bordered_ = Eigen::MatrixXd::Zero(ni + ki, ni + ki);
  std::vector<double> row(n);
  for (std::size_t i = 0; i < n; ++i) {
    simd::distances(xs_[i], ys_[i], xs_, ys_, row);
    for (std::size_t j = 0; j < n; ++j) {
      if (j != i && row[j] == 0.0) {
        throw ValidationError("duplicate station coordinates in kriging system");
      }
      bordered_(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i)) = -theta2_ * row[j];
    }
    bordered_(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)) = theta1_ * zeta_[i];
  }
  bordered_.topRightCorner(ni, ki) = p;
  bordered_.bottomLeftCorner(ki, ni) = p.transpose();

  factor_ = bordered_;
  const int dim = static_cast<int>(n + k);
  pivots_.resize(n + k);
  const double anorm = LAPACKE_dlansy(LAPACK_COL_MAJOR, '1', 'L', dim, factor_.data(), dim);
  const int info = LAPACKE_dsytrf(LAPACK_COL_MAJOR, 'L', dim, factor_.data(), dim, pivots_.data());
  if (info != 0) {
    throw NumericError("bordered kriging matrix is singular (dsytrf info " +
                       std::to_string(info) + ")");
  }
  double rcond = 0.0;
  LAPACKE_dsycon(LAPACK_COL_MAJOR, 'L', dim, factor_.data(), dim, pivots_.data(), anorm, &rcond);
  if (!(rcond > 1e-15)) {
    throw NumericError("bordered kriging matrix is numerically singular (rcond " +
                       std::to_string(rcond) + ")");
  }
}

Eigen::MatrixXd KrigingSystem::raw_solve(const Eigen::MatrixXd& rhs) const {
  Eigen::MatrixXd x = rhs;
  const int dim = static_cast<int>(factor_.rows());
  const int info = LAPACKE_dsytrs(LAPACK_COL_MAJOR, 'L', dim, static_cast<int>(x.cols()),
                                  factor_.data(), dim, pivots_.data(), x.data(), dim);
  if (info != 0) throw NumericError("dsytrs failed with info " + std::to_string(info));
  return x;
}

Eigen::MatrixXd KrigingSystem::solve(const Eigen::MatrixXd& rhs) const {
  if (rhs.rows() != bordered_.rows()) throw DomainError("right-hand side has wrong size");
  Eigen::MatrixXd x = raw_solve(rhs);
  const Eigen::MatrixXd residual = rhs - bordered_ * x;
  x += raw_solve(residual);
  return x;
}

Eigen::VectorXd KrigingSystem::solve(const Eigen::VectorXd& rhs) const {
  return solve(Eigen::MatrixXd(rhs)).col(0);
}

Eigen::VectorXd KrigingSystem::psi_diagonal() const {
  const auto ni = static_cast<Eigen::Index>(n());
  Eigen::MatrixXd rhs = Eigen::MatrixXd::Zero(bordered_.rows(), ni);
  rhs.topRows(ni).setIdentity();
  return solve(rhs).topRows(ni).diagonal();
}

Eigen::VectorXd KrigingSystem::covariances(const Location& site) const {
  std::vector<double> dist(n());
  simd::distances(site.x_km, site.y_km, xs_, ys_, dist);
  Eigen::VectorXd c(static_cast<Eigen::Index>(n()));
  for (std::size_t i = 0; i < n(); ++i) {
    c(static_cast<Eigen::Index>(i)) =
        -theta2_ * dist[i] + (dist[i] == 0.0 ? theta1_ * zeta_[i] : 0.0);
  }
  return c;
}

DualWeights krige(const KrigingSystem& system, std::span<const double> values) {
  const auto ni = static_cast<Eigen::Index>(system.n());
  if (values.size() != system.n()) throw DomainError("one value per station required");
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(ni + static_cast<Eigen::Index>(system.k()));
  for (Eigen::Index i = 0; i < ni; ++i) {
    if (!std::isfinite(values[static_cast<std::size_t>(i)])) {
      throw DomainError("kriging values must be finite");
    }
    rhs(i) = values[static_cast<std::size_t>(i)];
  }
  const Eigen::VectorXd sol = system.solve(rhs);
  return {sol.head(ni), sol.tail(static_cast<Eigen::Index>(system.k()))};
}

double predict_value(const KrigingSystem& system, const DualWeights& weights,
                     const Location& site) {
  return system.covariances(site).dot(weights.alpha) +
         system.drift().evaluate(site).dot(weights.beta);
}

KrigingPrediction predict(const KrigingSystem& system, const DualWeights& weights,
                          const Location& site, double zeta_site) {
  const auto ni = static_cast<Eigen::Index>(system.n());
  const auto ki = static_cast<Eigen::Index>(system.k());
  const Eigen::VectorXd c = system.covariances(site);
  const Eigen::VectorXd p = system.drift().evaluate(site);
  if (!p.allFinite()) throw DomainError("drift basis not finite at prediction site");

  Eigen::VectorXd rhs(ni + ki);
  rhs << c, p;
  const Eigen::VectorXd lambda_mu = system.solve(rhs);

  KrigingPrediction out;
  out.value = c.dot(weights.alpha) + p.dot(weights.beta);
  const double variance = system.theta1() * zeta_site - rhs.dot(lambda_mu);
  if (variance < 0.0) {
    const double scale = std::max(1.0, rhs.cwiseAbs().maxCoeff());
    if (variance < -1e-9 * scale) {
      throw NumericError("negative kriging variance " + std::to_string(variance));
    }
  }
  out.variance = std::max(variance, 0.0);
  return out;
}

}  // namespace aemos::geostat
