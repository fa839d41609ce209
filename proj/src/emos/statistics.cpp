/*
 * (C) Copyright 2026 The adaptive-emos authors.
 *
 * This software is licensed under the terms of the Apache Licence Version 2.0
 * which can be obtained at http://www.apache.org/licenses/LICENSE-2.0.
 */

#include <cmath>

#include "aemos/emos.hpp"
#include "aemos/error.hpp"

namespace aemos::emos {

namespace {

double ensemble_mean(const StationPanel& panel, std::size_t s, std::size_t d) {
  double sum = 0.0;
  for (std::size_t k = 0; k < panel.group_count(); ++k) sum += panel.fc(s, d, k);
  return sum / static_cast<double>(panel.group_count());
}

}  // namespace

WindowStats window_statistics(const StationPanel& panel) {
  panel.validate();
  const std::size_t g = panel.group_count();
  WindowStats st;
  st.y_bar.assign(panel.station_count(), 0.0);
  st.f_bar.assign(panel.station_count(), std::vector<double>(g, 0.0));
  st.f_bar_star.assign(panel.station_count(), 0.0);
  st.n_days.assign(panel.station_count(), 0);
  for (std::size_t s = 0; s < panel.station_count(); ++s) {
    std::size_t n = 0;
    for (std::size_t d = 0; d < panel.day_count(); ++d) {
      if (!panel.complete(s, d)) continue;
      ++n;
      st.y_bar[s] += panel.obs(s, d);
      for (std::size_t k = 0; k < g; ++k) st.f_bar[s][k] += panel.fc(s, d, k);
      st.f_bar_star[s] += ensemble_mean(panel, s, d);
    }
    if (n == 0) {
      throw ValidationError("station " + panel.stations()[s].id + " has no complete days");
    }
    const double inv = 1.0 / static_cast<double>(n);
    st.y_bar[s] *= inv;
    for (double& f : st.f_bar[s]) f *= inv;
    st.f_bar_star[s] *= inv;
    st.n_days[s] = n;
  }
  return st;
}

double pooled_slope(const StationPanel& panel, const WindowStats& stats) {
  double num = 0.0;
  double den = 0.0;
  for (std::size_t s = 0; s < panel.station_count(); ++s) {
    for (std::size_t d = 0; d < panel.day_count(); ++d) {
      if (!panel.complete(s, d)) continue;
      const double fc = ensemble_mean(panel, s, d) - stats.f_bar_star[s];
      num += (panel.obs(s, d) - stats.y_bar[s]) * fc;
      den += fc * fc;
    }
  }
  if (!(den > 0.0)) {
    throw DegenerateError("ensemble mean is constant at every station; pooled slope undefined");
  }
  return num / den;
}

std::vector<double> local_uncertainty(const StationPanel& panel, const WindowStats& stats,
                                      double b_star) {
  std::vector<double> xi2(panel.station_count(), 0.0);
  for (std::size_t s = 0; s < panel.station_count(); ++s) {
    double sum = 0.0;
    for (std::size_t d = 0; d < panel.day_count(); ++d) {
      if (!panel.complete(s, d)) continue;
      const double r = panel.obs(s, d) - stats.y_bar[s] -
                       b_star * (ensemble_mean(panel, s, d) - stats.f_bar_star[s]);
      sum += r * r;
    }
    xi2[s] = sum / static_cast<double>(stats.n_days[s]);
  }
  return xi2;
}

double ensemble_variance(std::span<const double> groups) {
  const std::size_t g = groups.size();
  if (g < 2) return 0.0;
  double mean = 0.0;
  for (double v : groups) mean += v;
  mean /= static_cast<double>(g);
  double ss = 0.0;
  for (double v : groups) ss += (v - mean) * (v - mean);
  return ss / static_cast<double>(g - 1);
}

}  // namespace aemos::emos
