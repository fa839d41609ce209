/*
 * (C) Copyright 2026 The adaptive-emos authors.
 *
 * This software is licensed under the terms of the Apache Licence Version 2.0
 * which can be obtained at http://www.apache.org/licenses/LICENSE-2.0.
 */

#include <cmath>

#include "aemos/error.hpp"
#include "aemos/geostat.hpp"

namespace aemos::geostat {

namespace {

double cube_plus(double v) { return v > 0.0 ? v * v * v : 0.0; }

}  // namespace

std::array<double, 3> natural_spline_basis(double altitude_km, std::span<const double> knots_km) {
  if (!std::isfinite(altitude_km)) throw DomainError("non-finite altitude");
  if (knots_km.size() != 3 || !(knots_km[0] < knots_km[1] && knots_km[1] < knots_km[2])) {
    throw DomainError("spline drift needs three increasing knots");
  }
  const double last = knots_km[2];
  auto d = [&](double knot) {
    return (cube_plus(altitude_km - knot) - cube_plus(altitude_km - last)) / (last - knot);
  };
  return {1.0, altitude_km, d(knots_km[0]) - d(knots_km[1])};
}

DriftBasis::DriftBasis(DriftDescriptor descriptor) : descriptor_(std::move(descriptor)) {
  if (descriptor_.kind == DriftKind::AltitudeSpline) {
    const auto& k = descriptor_.knots_km;
    if (k.size() != 3 || !(k[0] < k[1] && k[1] < k[2])) {
      throw DomainError("spline drift needs three increasing knots");
    }
  }
}

DriftBasis DriftBasis::constant() { return DriftBasis(DriftDescriptor{DriftKind::Constant, {}}); }

DriftBasis DriftBasis::altitude_spline(std::vector<double> knots_km) {
  return DriftBasis(DriftDescriptor{DriftKind::AltitudeSpline, std::move(knots_km)});
}

void DriftBasis::evaluate(const Location& site, std::span<double> out) const {
  if (descriptor_.kind == DriftKind::Constant) {
    out[0] = 1.0;
  } else {
    const auto b = natural_spline_basis(site.altitude_m / 1000.0, descriptor_.knots_km);
    out[0] = b[0];
    out[1] = b[1];
    out[2] = b[2];
  }
  if (transform_) {
    const Eigen::Map<Eigen::VectorXd> p(out.data(), static_cast<Eigen::Index>(size()));
    const Eigen::VectorXd mixed = transform_->transpose() * p;
    for (std::size_t j = 0; j < size(); ++j) out[j] = mixed(static_cast<Eigen::Index>(j));
  }
}

Eigen::VectorXd DriftBasis::evaluate(const Location& site) const {
  Eigen::VectorXd p(static_cast<Eigen::Index>(size()));
  evaluate(site, std::span<double>(p.data(), size()));
  return p;
}

Eigen::MatrixXd DriftBasis::matrix(std::span<const Location> sites) const {
  Eigen::MatrixXd p(static_cast<Eigen::Index>(sites.size()), static_cast<Eigen::Index>(size()));
  for (std::size_t i = 0; i < sites.size(); ++i) {
    p.row(static_cast<Eigen::Index>(i)) = evaluate(sites[i]).transpose();
  }
  return p;
}

DriftBasis DriftBasis::recombined(const Eigen::MatrixXd& transform) const {
  if (transform.rows() != static_cast<Eigen::Index>(size()) || transform.cols() != transform.rows()) {
    throw DomainError("drift recombination must be k x k");
  }
  DriftBasis out = *this;
  out.transform_ = transform_ ? Eigen::MatrixXd(*transform_ * transform) : transform;
  return out;
}

}  // namespace aemos::geostat
