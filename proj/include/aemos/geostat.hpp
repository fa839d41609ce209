/*
 * (C) Copyright 2026 The adaptive-emos authors.
 *
 * This software is licensed under the terms of the Apache Licence Version 2.0
 * which can be obtained at http://www.apache.org/licenses/LICENSE-2.0.
 */

#pragma once

#include <Eigen/Dense>

#include <array>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "aemos/core.hpp"

/// Intrinsic kriging with generalized covariance
///
///   C(s, t) = theta1 * zeta(s) * 1{s = t} - theta2 * ||s - t||
///
/// i.e. a Brownian surface plus a site-specific nugget, with a drift space
/// that must contain the constants.
namespace aemos::geostat {

inline constexpr std::array<double, 3> kDefaultKnotsKm{0.0, 1.0, 1.5};

/// Natural cubic spline of altitude (km) in truncated-power form:
/// (1, a, d1(a) - d2(a)), d_k(a) = [(a - k_k)+^3 - (a - k_last)+^3] / (k_last - k_k).
/// Linear beyond the boundary knots.
std::array<double, 3> natural_spline_basis(double altitude_km,
                                           std::span<const double> knots_km = kDefaultKnotsKm);

class DriftBasis {
 public:
  explicit DriftBasis(DriftDescriptor descriptor = {});

  static DriftBasis constant();
  static DriftBasis altitude_spline(std::vector<double> knots_km = {0.0, 1.0, 1.5});

  std::size_t size() const { return descriptor_.kind == DriftKind::Constant ? 1 : 3; }
  const DriftDescriptor& descriptor() const { return descriptor_; }

  /// p_1..p_k at a site.
  void evaluate(const Location& site, std::span<double> out) const;
  Eigen::VectorXd evaluate(const Location& site) const;
  Eigen::MatrixXd matrix(std::span<const Location> sites) const;

  /// Same span, basis functions recombined as p~ = T' p (T invertible, k x k).
  DriftBasis recombined(const Eigen::MatrixXd& transform) const;

 private:
  DriftDescriptor descriptor_;
  std::optional<Eigen::MatrixXd> transform_;
};

/// Factorized bordered system [[A, P], [P', 0]] with
/// A_ij = -theta2 ||s_i - s_j|| (i != j), A_ii = theta1 * zeta_i.
class KrigingSystem {
 public:
  KrigingSystem(std::vector<Location> sites, DriftBasis drift, double theta1, double theta2,
                std::vector<double> zeta);

  std::size_t n() const { return sites_.size(); }
  std::size_t k() const { return drift_.size(); }
  double theta1() const { return theta1_; }
  double theta2() const { return theta2_; }
  const std::vector<Location>& sites() const { return sites_; }
  const std::vector<double>& zeta() const { return zeta_; }
  const DriftBasis& drift() const { return drift_; }

  const Eigen::MatrixXd& bordered() const { return bordered_; }

  /// Solves the bordered system with one step of iterative refinement.
  Eigen::VectorXd solve(const Eigen::VectorXd& rhs) const;
  Eigen::MatrixXd solve(const Eigen::MatrixXd& rhs) const;

  /// Diagonal of the leading n x n block (Psi) of the inverse.
  Eigen::VectorXd psi_diagonal() const;

  /// Generalized covariance between a site and station i, including the
  /// station nugget when the site coincides with it.
  Eigen::VectorXd covariances(const Location& site) const;

 private:
  Eigen::MatrixXd raw_solve(const Eigen::MatrixXd& rhs) const;

  std::vector<Location> sites_;
  std::vector<double> xs_, ys_;
  DriftBasis drift_;
  double theta1_;
  double theta2_;
  std::vector<double> zeta_;
  Eigen::MatrixXd bordered_;
  Eigen::MatrixXd factor_;
  std::vector<int> pivots_;
};

struct DualWeights {
  Eigen::VectorXd alpha;
  Eigen::VectorXd beta;
};

/// (alpha, beta) with [[A, P], [P', 0]] (alpha, beta) = (values, 0).
DualWeights krige(const KrigingSystem& system, std::span<const double> values);

struct KrigingPrediction {
  double value = 0.0;
  double variance = 0.0;
};

/// Kriging predictor and variance at a site.  zeta_site is the smoothed
/// nugget indicator at the site; it enters the variance through
/// C(site, site) = theta1 * zeta_site but never the predictor.
KrigingPrediction predict(const KrigingSystem& system, const DualWeights& weights,
                          const Location& site, double zeta_site);

/// Predictor only; O(n + k).
double predict_value(const KrigingSystem& system, const DualWeights& weights,
                     const Location& site);

struct LoocvResult {
  std::vector<double> errors;    // e_i = alpha_i / Psi_ii
  std::vector<double> zeta_raw;  // alpha_i^2 / Psi_ii
};

/// Closed-form leave-one-out diagnostics of the nugget-free system
/// (theta1 = 0, theta2 = 1).
LoocvResult loocv(std::span<const Location> sites, std::span<const double> values,
                  const DriftBasis& drift);

/// Triweight kernel smoother of the LOOCV indicators with a bandwidth equal
/// to the distance to the k_nn-th nearest station (the station itself counts
/// when the query coincides with it).
class NuggetSurface {
 public:
  NuggetSurface(std::vector<Location> sites, std::vector<double> zeta_raw, std::size_t k_nn);

  double operator()(const Location& site) const;
  std::vector<double> weights(const Location& site) const;
  double bandwidth(const Location& site) const;

  std::size_t k_nn() const { return k_nn_; }

 private:
  std::vector<Location> sites_;
  std::vector<double> xs_, ys_;
  std::vector<double> zeta_raw_;
  std::size_t k_nn_;
};

/// Restricted log-likelihood of the drift-free contrasts W' values with
/// Sigma(theta) = theta1 diag(zeta) - theta2 D.
class RemlObjective {
 public:
  /// W defaults to the orthonormal complement of the drift matrix from a
  /// Householder QR; any orthonormal basis of null(P') gives the same value.
  RemlObjective(std::span<const Location> sites, std::span<const double> values,
                const DriftBasis& drift, std::span<const double> zeta,
                std::optional<Eigen::MatrixXd> contrasts = std::nullopt);

  double loglik(double theta1, double theta2) const;

  /// Same quantity via a Cholesky factorization of W' Sigma W per call.
  double loglik_direct(double theta1, double theta2) const;

  std::size_t dof() const { return static_cast<std::size_t>(v_.size()); }

  /// theta2 maximizing the likelihood for a fixed ratio theta1 / theta2.
  double profile_theta2(double ratio) const;

  const Eigen::MatrixXd& contrasts() const { return w_; }

 private:
  Eigen::MatrixXd w_;
  Eigen::MatrixXd sigma_distance_;  // -W' D W
  Eigen::MatrixXd sigma_nugget_;    // W' diag(zeta) W
  Eigen::VectorXd wy_;
  double logdet_base_ = 0.0;
  Eigen::VectorXd eig_;  // generalized eigenvalues of (nugget, distance)
  Eigen::VectorXd v_;    // rotated contrasts
};

struct RemlResult {
  double theta1 = 0.0;
  double theta2 = 1.0;
  double loglik = 0.0;
  int evaluations = 0;
};

/// Maximizes the restricted likelihood over theta1 >= 0, theta2 > 0 by
/// Nelder-Mead in (log(theta1 + 1e-12), log theta2) from four deterministic
/// starts.
RemlResult reml_fit(std::span<const Location> sites, std::span<const double> values,
                    const DriftBasis& drift, std::span<const double> zeta);

/// Fitted interpolator for one field; rebuilt deterministically from its
/// FieldModel so a stored model reproduces predictions bit-for-bit.
class FittedField {
 public:
  explicit FittedField(FieldModel model);

  const FieldModel& model() const { return model_; }
  const KrigingSystem& system() const { return system_; }

  double nugget_at(const Location& site) const { return surface_(site); }
  KrigingPrediction predict(const Location& site) const;

 private:
  FieldModel model_;
  NuggetSurface surface_;
  KrigingSystem system_;
  DualWeights weights_;
};

/// LOOCV -> nugget smoothing -> REML -> kriging.
FieldModel fit_field(FieldKind kind, std::vector<std::string> ids, std::vector<Location> sites,
                     std::vector<double> values, const DriftBasis& drift, std::size_t k_nn);

/// z = log(max(xi2, floor)); warns for stations at the floor.
std::vector<double> log_variance_values(std::span<const double> xi2,
                                        std::span<const std::string> ids, double floor = 1e-6);

}  // namespace aemos::geostat
