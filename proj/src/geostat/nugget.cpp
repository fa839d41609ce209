/*
 * (C) Copyright 2026 The adaptive-emos authors.
 *
 * This software is licensed under the terms of the Apache Licence Version 2.0
 * which can be obtained at http://www.apache.org/licenses/LICENSE-2.0.
 */

#include <algorithm>
#include <numeric>

#include "aemos/error.hpp"
#include "aemos/geostat.hpp"
#include "aemos/simd/kernels.hpp"

namespace aemos::geostat {

NuggetSurface::NuggetSurface(std::vector<Location> sites, std::vector<double> zeta_raw,
                             std::size_t k_nn)
    : sites_(std::move(sites)), zeta_raw_(std::move(zeta_raw)), k_nn_(k_nn) {
  if (sites_.size() < 2) throw DomainError("nugget smoothing needs at least two stations");
  if (k_nn_ < 1) throw DomainError("k_nn must be at least 1");
  if (zeta_raw_.size() != sites_.size()) throw DomainError("one indicator per station required");
  for (const auto& s : sites_) {
    xs_.push_back(s.x_km);
    ys_.push_back(s.y_km);
  }
}

double NuggetSurface::bandwidth(const Location& site) const {
  std::vector<double> dist(sites_.size());
  simd::distances(site.x_km, site.y_km, xs_, ys_, dist);
  if (sites_.size() < k_nn_ + 1) return *std::max_element(dist.begin(), dist.end());
  // The k-th smallest distance does not depend on how ties are ordered.
  std::nth_element(dist.begin(), dist.begin() + static_cast<std::ptrdiff_t>(k_nn_ - 1), dist.end());
  return dist[k_nn_ - 1];
}

std::vector<double> NuggetSurface::weights(const Location& site) const {
  const std::size_t n = sites_.size();
  std::vector<double> dist(n);
  simd::distances(site.x_km, site.y_km, xs_, ys_, dist);

  double lambda;
  if (n < k_nn_ + 1) {
    lambda = *std::max_element(dist.begin(), dist.end());
  } else {
    std::vector<double> sorted = dist;
    std::nth_element(sorted.begin(), sorted.begin() + static_cast<std::ptrdiff_t>(k_nn_ - 1),
                     sorted.end());
    lambda = sorted[k_nn_ - 1];
  }

  std::vector<double> w(n, 0.0);
  double total = 0.0;
  if (lambda > 0.0) {
    simd::triweight(dist, 1.0 / lambda, w);
    total = std::accumulate(w.begin(), w.end(), 0.0);
  }
  if (!(total > 0.0)) {
    // Every station sits at or beyond the bandwidth: fall back to the nearest one
    // (lowest index among ties).
    std::fill(w.begin(), w.end(), 0.0);
    w[static_cast<std::size_t>(std::min_element(dist.begin(), dist.end()) - dist.begin())] = 1.0;
    return w;
  }
  for (double& x : w) x /= total;
  return w;
}

double NuggetSurface::operator()(const Location& site) const {
  const std::vector<double> w = weights(site);
  double z = 0.0;
  for (std::size_t i = 0; i < w.size(); ++i) z += w[i] * zeta_raw_[i];
  return z;
}

}  // namespace aemos::geostat
