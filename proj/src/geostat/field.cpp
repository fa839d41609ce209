/*
 * (C) Copyright 2026 The adaptive-emos authors.
 *
 * This software is licensed under the terms of the Apache Licence Version 2.0
 * which can be obtained at http://www.apache.org/licenses/LICENSE-2.0.
 */

#include <algorithm>
#include <cmath>

#include "aemos/error.hpp"
#include "aemos/geostat.hpp"
#include "aemos/log.hpp"

namespace aemos::geostat {

FittedField::FittedField(FieldModel model)
    : model_(std::move(model)),
      surface_(model_.locations, model_.zeta_raw, model_.k_nn),
      system_(model_.locations, DriftBasis(model_.drift), model_.theta1, model_.theta2,
              model_.zeta) {
  const auto n = static_cast<Eigen::Index>(model_.locations.size());
  const auto k = static_cast<Eigen::Index>(system_.k());
  if (static_cast<Eigen::Index>(model_.alpha.size()) != n ||
      static_cast<Eigen::Index>(model_.beta.size()) != k) {
    throw ValidationError("field model dual weights do not match its stations and drift");
  }
  weights_.alpha = Eigen::Map<const Eigen::VectorXd>(model_.alpha.data(), n);
  weights_.beta = Eigen::Map<const Eigen::VectorXd>(model_.beta.data(), k);
}

KrigingPrediction FittedField::predict(const Location& site) const {
  return geostat::predict(system_, weights_, site, surface_(site));
}

FieldModel fit_field(FieldKind kind, std::vector<std::string> ids, std::vector<Location> sites,
                     std::vector<double> values, const DriftBasis& drift, std::size_t k_nn) {
  if (ids.size() != sites.size() || values.size() != sites.size()) {
    throw DomainError("field inputs differ in length");
  }
  FieldModel model;
  model.kind = kind;
  model.drift = drift.descriptor();
  model.k_nn = k_nn;

  const LoocvResult cv = loocv(sites, values, drift);
  const NuggetSurface surface(sites, cv.zeta_raw, k_nn);
  std::vector<double> zeta(sites.size());
  for (std::size_t i = 0; i < sites.size(); ++i) zeta[i] = surface(sites[i]);

  const RemlResult reml = reml_fit(sites, values, drift, zeta);
  const KrigingSystem system(sites, drift, reml.theta1, reml.theta2, zeta);
  const DualWeights w = krige(system, values);

  model.theta1 = reml.theta1;
  model.theta2 = reml.theta2;
  model.reml_loglik = reml.loglik;
  model.station_ids = std::move(ids);
  model.locations = std::move(sites);
  model.values = std::move(values);
  model.zeta_raw = cv.zeta_raw;
  model.zeta = std::move(zeta);
  model.alpha.assign(w.alpha.data(), w.alpha.data() + w.alpha.size());
  model.beta.assign(w.beta.data(), w.beta.data() + w.beta.size());
  return model;
}

std::vector<double> log_variance_values(std::span<const double> xi2,
                                        std::span<const std::string> ids, double floor) {
  std::vector<double> z(xi2.size());
  for (std::size_t i = 0; i < xi2.size(); ++i) {
    if (xi2[i] < floor) {
      warn("xi^2 at station " + (i < ids.size() ? ids[i] : std::to_string(i)) +
           " is below the floor " + std::to_string(floor) + "; using the floor");
    }
    z[i] = std::log(std::max(xi2[i], floor));
  }
  return z;
}

}  // namespace aemos::geostat
