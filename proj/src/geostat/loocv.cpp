/*
 * (C) Copyright 2026 The adaptive-emos authors.
 *
 * This software is licensed under the terms of the Apache Licence Version 2.0
 * which can be obtained at http://www.apache.org/licenses/LICENSE-2.0.
 */

#include <string>

#include "aemos/error.hpp"
#include "aemos/geostat.hpp"

namespace aemos::geostat {

LoocvResult loocv(std::span<const Location> sites, std::span<const double> values,
                  const DriftBasis& drift) {
  const std::size_t n = sites.size();
  if (n <= drift.size() + 1) {
    throw DomainError("leave-one-out needs more than k + 1 stations");
  }
  // Only relative indicator sizes matter, so the reference surface has unit slope.
  const KrigingSystem system(std::vector<Location>(sites.begin(), sites.end()), drift, 0.0, 1.0,
                             std::vector<double>(n, 0.0));
  const DualWeights w = krige(system, values);
  const Eigen::VectorXd psi = system.psi_diagonal();

  LoocvResult out;
  out.errors.resize(n);
  out.zeta_raw.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto ii = static_cast<Eigen::Index>(i);
    if (!(psi(ii) > 0.0)) {
      throw NumericError("non-positive leave-one-out precision at station " + std::to_string(i));
    }
    out.errors[i] = w.alpha(ii) / psi(ii);
    out.zeta_raw[i] = w.alpha(ii) * w.alpha(ii) / psi(ii);
  }
  return out;
}

}  // namespace aemos::geostat
