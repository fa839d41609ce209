/*
 * (C) Copyright 2026 The adaptive-emos authors.
 *
 * This software is licensed under the terms of the Apache Licence Version 2.0
 * which can be obtained at http://www.apache.org/licenses/LICENSE-2.0.
 */

#pragma once

#include <algorithm>
#include <array>
#include <cstddef>
#include <functional>
#include <numeric>

namespace aemos::geostat::detail {

template <std::size_t N>
struct SimplexResult {
  std::array<double, N> x{};
  double f = 0.0;
  int evaluations = 0;
  bool converged = false;
};

/// Nelder-Mead with the standard coefficients (1, 2, 1/2, 1/2).  Stops when
/// the spread of objective values across the simplex drops below f_tol.
template <std::size_t N>
SimplexResult<N> nelder_mead(const std::function<double(const std::array<double, N>&)>& f,
                             const std::array<double, N>& start, double step, double f_tol,
                             int max_evaluations) {
  using Point = std::array<double, N>;
  std::array<Point, N + 1> pts;
  std::array<double, N + 1> vals;
  SimplexResult<N> out;
  auto eval = [&](const Point& p) {
    ++out.evaluations;
    return f(p);
  };

  pts[0] = start;
  vals[0] = eval(start);
  for (std::size_t i = 0; i < N; ++i) {
    pts[i + 1] = start;
    pts[i + 1][i] += step;
    vals[i + 1] = eval(pts[i + 1]);
  }

  std::array<std::size_t, N + 1> order;
  auto combine = [](const Point& a, const Point& b, double t) {
    Point r;
    for (std::size_t j = 0; j < N; ++j) r[j] = a[j] + t * (b[j] - a[j]);
    return r;
  };

  while (true) {
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return vals[a] < vals[b]; });
    const std::size_t best = order[0], worst = order[N], second = order[N - 1];
    if (vals[worst] - vals[best] < f_tol) {
      out.converged = true;
      break;
    }
    if (out.evaluations >= max_evaluations) break;

    Point centroid{};
    for (std::size_t i = 0; i < N; ++i) {
      for (std::size_t j = 0; j < N; ++j) centroid[j] += pts[order[i]][j] / double(N);
    }
    const Point reflected = combine(centroid, pts[worst], -1.0);
    const double fr = eval(reflected);
    if (fr < vals[best]) {
      const Point expanded = combine(centroid, pts[worst], -2.0);
      const double fe = eval(expanded);
      if (fe < fr) {
        pts[worst] = expanded;
        vals[worst] = fe;
      } else {
        pts[worst] = reflected;
        vals[worst] = fr;
      }
      continue;
    }
    if (fr < vals[second]) {
      pts[worst] = reflected;
      vals[worst] = fr;
      continue;
    }
    const bool outside = fr < vals[worst];
    const Point contracted = outside ? combine(centroid, reflected, 0.5)
                                     : combine(centroid, pts[worst], 0.5);
    const double fc = eval(contracted);
    if (fc < (outside ? fr : vals[worst])) {
      pts[worst] = contracted;
      vals[worst] = fc;
      continue;
    }
    for (std::size_t i = 1; i <= N; ++i) {
      pts[order[i]] = combine(pts[best], pts[order[i]], 0.5);
      vals[order[i]] = eval(pts[order[i]]);
    }
  }
  const std::size_t best = static_cast<std::size_t>(
      std::min_element(vals.begin(), vals.end()) - vals.begin());
  out.x = pts[best];
  out.f = vals[best];
  return out;
}

}  // namespace aemos::geostat::detail
