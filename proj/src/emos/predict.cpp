/*
 * (C) Copyright 2026 The adaptive-emos authors.
 *
 * This software is licensed under the terms of the Apache Licence Version 2.0
 * which can be obtained at http://www.apache.org/licenses/LICENSE-2.0.
 */

#include <cmath>
#include <string>

#include "aemos/emos.hpp"
#include "aemos/error.hpp"

namespace aemos::emos {

namespace {

void check_today(std::span<const double> today, std::size_t groups, const std::string& site) {
  if (today.size() != groups) {
    throw InputError("site " + site + ": expected " + std::to_string(groups) +
                     " group forecasts, got " + std::to_string(today.size()));
  }
  for (double v : today) {
    if (!std::isfinite(v)) throw InputError("site " + site + ": missing group forecast");
  }
}

double centred_mean(const std::vector<double>& b, double y_bar, std::span<const double> today,
                    std::span<const double> means) {
  double mu = y_bar;
  for (std::size_t k = 0; k < b.size(); ++k) mu += b[k] * (today[k] - means[k]);
  return mu;
}

}  // namespace

GaussianForecast predict_at_station(const EmosModel& model, const StationState& state,
                                    std::span<const double> today, Date date) {
  const std::size_t g = model.b.size();
  check_today(today, g, state.id);
  if (state.f_bar.size() != g) throw InputError("station " + state.id + ": f_bar size mismatch");
  GaussianForecast out;
  out.site_id = state.id;
  out.date = date;
  out.mu = centred_mean(model.b, state.y_bar, today, state.f_bar);
  out.var = model.c1 * state.xi2 + model.c2 * ensemble_variance(today);
  out.interp_var = 0.0;
  return out;
}

GaussianForecast predict_at_site(const EmosModel& model, const geostat::FittedField& field_y,
                                 const geostat::FittedField& field_z, const GridSite& site,
                                 std::span<const double> today, std::span<const double> train_means,
                                 Date date, bool propagate_z_variance) {
  const std::size_t g = model.b.size();
  check_today(today, g, site.id);
  if (train_means.size() != g) throw InputError("site " + site.id + ": training means size mismatch");
  const geostat::KrigingPrediction y = field_y.predict(site.loc);
  const geostat::KrigingPrediction z = field_z.predict(site.loc);
  const double log_xi2 = propagate_z_variance ? z.value + 0.5 * z.variance : z.value;
  const double xi2 = std::exp(log_xi2);
  if (!std::isfinite(y.value) || !std::isfinite(xi2)) {
    throw InputError("site " + site.id + ": interpolation is not finite at this location");
  }
  GaussianForecast out;
  out.site_id = site.id;
  out.date = date;
  out.mu = centred_mean(model.b, y.value, today, train_means);
  out.var = model.c1 * xi2 + model.c2 * ensemble_variance(today);
  out.interp_var = y.variance;
  return out;
}

GaussianForecast predict_baseline(const BaselineNgr& params, const std::string& site_id,
                                  std::span<const double> today, Date date) {
  check_today(today, params.b.size(), site_id);
  GaussianForecast out;
  out.site_id = site_id;
  out.date = date;
  out.mu = params.a;
  for (std::size_t k = 0; k < params.b.size(); ++k) out.mu += params.b[k] * today[k];
  out.var = params.c + params.d * ensemble_variance(today);
  return out;
}

}  // namespace aemos::emos
