/*
 * (C) Copyright 2026 The adaptive-emos authors.
 *
 * This software is licensed under the terms of the Apache Licence Version 2.0
 * which can be obtained at http://www.apache.org/licenses/LICENSE-2.0.
 */

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "aemos/emos.hpp"
#include "aemos/error.hpp"
#include "aemos/log.hpp"
#include "aemos/simd/kernels.hpp"
#include "bfgs.hpp"

namespace aemos::emos {

namespace {

constexpr double kVarianceFloor = 1e-12;

std::size_t count_pairs(const StationPanel& panel) {
  std::size_t n = 0;
  for (std::size_t s = 0; s < panel.station_count(); ++s) n += panel.complete_days(s);
  return n;
}

// Shared tail of both objectives: sigma from the variance, CRPS and its
// partials through the active kernel table.
double mean_crps(const Eigen::VectorXd& mu, Eigen::VectorXd& sigma, const Eigen::VectorXd& y,
                 Eigen::VectorXd& crps, Eigen::VectorXd* dmu, Eigen::VectorXd* dsigma) {
  const auto n = static_cast<std::size_t>(y.size());
  simd::gaussian_crps(std::span<const double>(mu.data(), n),
                      std::span<const double>(sigma.data(), n),
                      std::span<const double>(y.data(), n), std::span<double>(crps.data(), n),
                      dmu ? std::span<double>(dmu->data(), n) : std::span<double>{},
                      dsigma ? std::span<double>(dsigma->data(), n) : std::span<double>{});
  return crps.mean();
}

void resize_work(std::size_t n, Eigen::VectorXd& a, Eigen::VectorXd& b, Eigen::VectorXd& c,
                 Eigen::VectorXd& d, Eigen::VectorXd& e) {
  const auto ni = static_cast<Eigen::Index>(n);
  a.resize(ni);
  b.resize(ni);
  c.resize(ni);
  d.resize(ni);
  e.resize(ni);
}

}  // namespace

AdaptiveObjective::AdaptiveObjective(const StationPanel& panel, const WindowStats& stats,
                                     std::span<const double> xi2)
    : groups_(panel.group_count()) {
  if (xi2.size() != panel.station_count()) throw DomainError("one xi^2 per station required");
  const std::size_t total = count_pairs(panel);
  const auto g = static_cast<Eigen::Index>(groups_);
  data_.x.resize(static_cast<Eigen::Index>(total), g);
  data_.y.resize(static_cast<Eigen::Index>(total));
  data_.y_bar.resize(static_cast<Eigen::Index>(total));
  data_.xi2.resize(static_cast<Eigen::Index>(total));
  data_.s2.resize(static_cast<Eigen::Index>(total));

  Eigen::Index row = 0;
  std::vector<double> fc(groups_);
  for (std::size_t s = 0; s < panel.station_count(); ++s) {
    if (!(xi2[s] >= 0.0)) throw DomainError("xi^2 must be non-negative");
    for (std::size_t d = 0; d < panel.day_count(); ++d) {
      if (!panel.complete(s, d)) continue;
      for (std::size_t k = 0; k < groups_; ++k) fc[k] = panel.fc(s, d, k);
      const double s2 = ensemble_variance(fc);
      if (xi2[s] == 0.0 && s2 == 0.0) {
        ++data_.skipped;
        continue;
      }
      for (std::size_t k = 0; k < groups_; ++k) {
        data_.x(row, static_cast<Eigen::Index>(k)) = fc[k] - stats.f_bar[s][k];
      }
      data_.y(row) = panel.obs(s, d);
      data_.y_bar(row) = stats.y_bar[s];
      data_.xi2(row) = xi2[s];
      data_.s2(row) = s2;
      ++row;
    }
  }
  if (row == 0) {
    throw DegenerateError("xi^2 and ensemble variance vanish everywhere; CRPS undefined");
  }
  if (data_.skipped > 0) {
    warn(std::to_string(data_.skipped) +
         " training pairs skipped: zero local uncertainty and zero ensemble spread");
  }
  data_.x.conservativeResize(row, g);
  data_.y.conservativeResize(row);
  data_.y_bar.conservativeResize(row);
  data_.xi2.conservativeResize(row);
  data_.s2.conservativeResize(row);
  resize_work(static_cast<std::size_t>(row), mu_, sigma_, crps_, dmu_, dsigma_);
}

double AdaptiveObjective::evaluate(std::span<const double> u, std::span<double> grad) const {
  const auto g = static_cast<Eigen::Index>(groups_);
  Eigen::VectorXd b(g);
  for (Eigen::Index k = 0; k < g; ++k) b(k) = u[static_cast<std::size_t>(k)] * u[static_cast<std::size_t>(k)];
  const double v1 = u[groups_];
  const double v2 = groups_ > 1 ? u[groups_ + 1] : 0.0;

  mu_.noalias() = data_.y_bar + data_.x * b;
  sigma_ = (v1 * v1 * data_.xi2 + v2 * v2 * data_.s2).cwiseMax(kVarianceFloor).cwiseSqrt();
  const bool want_grad = !grad.empty();
  const double value =
      mean_crps(mu_, sigma_, data_.y, crps_, want_grad ? &dmu_ : nullptr,
                want_grad ? &dsigma_ : nullptr);
  if (want_grad) {
    const double inv_n = 1.0 / static_cast<double>(data_.y.size());
    const Eigen::VectorXd gb = data_.x.transpose() * dmu_;
    for (Eigen::Index k = 0; k < g; ++k) {
      grad[static_cast<std::size_t>(k)] = 2.0 * u[static_cast<std::size_t>(k)] * gb(k) * inv_n;
    }
    const Eigen::VectorXd ds_over_sigma = dsigma_.cwiseQuotient(sigma_);
    grad[groups_] = v1 * ds_over_sigma.dot(data_.xi2) * inv_n;
    if (groups_ > 1) grad[groups_ + 1] = v2 * ds_over_sigma.dot(data_.s2) * inv_n;
  }
  return value;
}

std::vector<double> AdaptiveObjective::to_parameters(const std::vector<double>& b, double c1,
                                                     double c2) const {
  std::vector<double> u;
  for (double x : b) u.push_back(std::sqrt(std::max(x, 0.0)));
  u.push_back(std::sqrt(std::max(c1, 0.0)));
  if (groups_ > 1) u.push_back(std::sqrt(std::max(c2, 0.0)));
  return u;
}

void AdaptiveObjective::from_parameters(std::span<const double> u, std::vector<double>& b,
                                        double& c1, double& c2) const {
  b.resize(groups_);
  for (std::size_t k = 0; k < groups_; ++k) b[k] = u[k] * u[k];
  c1 = u[groups_] * u[groups_];
  c2 = groups_ > 1 ? u[groups_ + 1] * u[groups_ + 1] : 0.0;
}

BaselineObjective::BaselineObjective(const StationPanel& panel) : groups_(panel.group_count()) {
  panel.validate();
  const std::size_t total = count_pairs(panel);
  const auto g = static_cast<Eigen::Index>(groups_);
  data_.x.resize(static_cast<Eigen::Index>(total), g);
  data_.y.resize(static_cast<Eigen::Index>(total));
  data_.s2.resize(static_cast<Eigen::Index>(total));
  Eigen::Index row = 0;
  std::vector<double> fc(groups_);
  for (std::size_t s = 0; s < panel.station_count(); ++s) {
    for (std::size_t d = 0; d < panel.day_count(); ++d) {
      if (!panel.complete(s, d)) continue;
      for (std::size_t k = 0; k < groups_; ++k) {
        fc[k] = panel.fc(s, d, k);
        data_.x(row, static_cast<Eigen::Index>(k)) = fc[k];
      }
      data_.y(row) = panel.obs(s, d);
      data_.s2(row) = ensemble_variance(fc);
      ++row;
    }
  }
  centre_ = data_.x.colwise().mean().transpose();
  data_.x.rowwise() -= centre_.transpose();
  resize_work(total, mu_, sigma_, crps_, dmu_, dsigma_);
}

double BaselineObjective::evaluate(std::span<const double> u, std::span<double> grad) const {
  const auto g = static_cast<Eigen::Index>(groups_);
  const double a = u[0];
  Eigen::VectorXd b(g);
  for (Eigen::Index k = 0; k < g; ++k) {
    b(k) = u[static_cast<std::size_t>(k) + 1] * u[static_cast<std::size_t>(k) + 1];
  }
  const double vc = u[groups_ + 1];
  const double vd = groups_ > 1 ? u[groups_ + 2] : 0.0;

  mu_ = (data_.x * b).array() + a;
  sigma_ = (vd * vd * data_.s2).array() + vc * vc;
  sigma_ = sigma_.cwiseMax(kVarianceFloor).cwiseSqrt();
  const bool want_grad = !grad.empty();
  const double value = mean_crps(mu_, sigma_, data_.y, crps_, want_grad ? &dmu_ : nullptr,
                                 want_grad ? &dsigma_ : nullptr);
  if (want_grad) {
    const double inv_n = 1.0 / static_cast<double>(data_.y.size());
    grad[0] = dmu_.sum() * inv_n;
    const Eigen::VectorXd gb = data_.x.transpose() * dmu_;
    for (Eigen::Index k = 0; k < g; ++k) {
      grad[static_cast<std::size_t>(k) + 1] =
          2.0 * u[static_cast<std::size_t>(k) + 1] * gb(k) * inv_n;
    }
    const Eigen::VectorXd ds_over_sigma = dsigma_.cwiseQuotient(sigma_);
    grad[groups_ + 1] = vc * ds_over_sigma.sum() * inv_n;
    if (groups_ > 1) grad[groups_ + 2] = vd * ds_over_sigma.dot(data_.s2) * inv_n;
  }
  return value;
}

std::vector<double> BaselineObjective::to_parameters(const BaselineNgr& p) const {
  std::vector<double> u;
  double a_centred = p.a;
  for (std::size_t k = 0; k < groups_; ++k) a_centred += p.b[k] * centre_(static_cast<Eigen::Index>(k));
  u.push_back(a_centred);
  for (double x : p.b) u.push_back(std::sqrt(std::max(x, 0.0)));
  u.push_back(std::sqrt(std::max(p.c, 0.0)));
  if (groups_ > 1) u.push_back(std::sqrt(std::max(p.d, 0.0)));
  return u;
}

BaselineNgr BaselineObjective::from_parameters(std::span<const double> u) const {
  BaselineNgr p;
  p.b.resize(groups_);
  p.a = u[0];
  for (std::size_t k = 0; k < groups_; ++k) {
    p.b[k] = u[k + 1] * u[k + 1];
    p.a -= p.b[k] * centre_(static_cast<Eigen::Index>(k));
  }
  p.c = u[groups_ + 1] * u[groups_ + 1];
  p.d = groups_ > 1 ? u[groups_ + 2] * u[groups_ + 2] : 0.0;
  return p;
}

namespace {

struct MultiStart {
  detail::BfgsResult best;
  int index = -1;
  bool any_converged = false;
};

template <typename Objective>
MultiStart run_starts(const Objective& objective, const std::vector<std::vector<double>>& starts,
                      const FitConfig& config) {
  const detail::Objective f = [&objective](std::span<const double> u, std::span<double> g) {
    return objective.evaluate(u, g);
  };
  MultiStart out;
  for (std::size_t i = 0; i < starts.size(); ++i) {
    auto res = detail::minimize_bfgs(f, starts[i], config.max_iterations, config.tolerance,
                                     config.gradient_tolerance);
    out.any_converged = out.any_converged || res.converged;
    if (out.index < 0 || res.f < out.best.f) {
      out.best = std::move(res);
      out.index = static_cast<int>(i);
    }
  }
  return out;
}

void fill_report(FitReport* report, const MultiStart& ms, std::size_t pairs, std::size_t skipped) {
  if (!report) return;
  report->initial_crps = ms.best.initial_f;
  report->final_crps = ms.best.f;
  report->iterations = ms.best.iterations;
  report->start = ms.index;
  report->trace = ms.best.trace;
  report->pairs = pairs;
  report->skipped_pairs = skipped;
}

}  // namespace

EmosModel fit_adaptive_emos(const StationPanel& panel, const WindowStats& stats,
                            std::span<const double> xi2, const MemberGrouping& grouping,
                            double b_star, const FitConfig& config, FitReport* report) {
  if (grouping.group_count() != panel.group_count()) {
    throw ValidationError("grouping and panel disagree on the number of groups");
  }
  const AdaptiveObjective objective(panel, stats, xi2);
  const std::size_t g = panel.group_count();

  std::vector<double> b0 = config.init_b;
  if (b0.empty()) b0.assign(g, std::max(b_star, 0.1) / static_cast<double>(g));
  if (b0.size() != g) throw DomainError("init_b must have one entry per group");
  auto scaled = [&](double f) {
    std::vector<double> b = b0;
    for (double& x : b) x *= f;
    return b;
  };
  const std::vector<std::vector<double>> starts{
      objective.to_parameters(b0, config.init_c1, config.init_c2),
      objective.to_parameters(scaled(0.5), 0.5 * config.init_c1, 2.0 * config.init_c2),
      objective.to_parameters(scaled(1.5), 2.0 * config.init_c1, 0.5 * config.init_c2)};

  const MultiStart ms = run_starts(objective, starts, config);
  fill_report(report, ms, objective.pairs(), objective.skipped());
  if (!ms.any_converged) {
    throw ConvergenceError("minimum-CRPS fit did not converge in " +
                               std::to_string(config.max_iterations) + " iterations",
                           ms.best.x, ms.best.f);
  }

  EmosModel model;
  model.grouping = grouping;
  model.b_star = b_star;
  model.mean_crps = ms.best.f;
  objective.from_parameters(ms.best.x, model.b, model.c1, model.c2);
  if (config.fit_baseline) model.baseline = fit_baseline_ngr(panel, config);
  return model;
}

BaselineNgr fit_baseline_ngr(const StationPanel& panel, const FitConfig& config,
                             FitReport* report) {
  const BaselineObjective objective(panel);
  const std::size_t g = panel.group_count();
  const double ybar = objective.mean_observation();

  auto start = [&](double b_scale, double c, double d) {
    BaselineNgr p;
    p.b.assign(g, b_scale / static_cast<double>(g));
    p.c = c;
    p.d = d;
    // a chosen so the centred intercept equals the mean observation.
    std::vector<double> u = objective.to_parameters(p);
    u[0] = ybar;
    return u;
  };
  const std::vector<std::vector<double>> starts{start(1.0, config.init_c1, config.init_c2),
                                                start(0.5, 0.5 * config.init_c1, 2.0 * config.init_c2),
                                                start(1.5, 2.0 * config.init_c1, 0.5 * config.init_c2)};
  const MultiStart ms = run_starts(objective, starts, config);
  fill_report(report, ms, static_cast<std::size_t>(count_pairs(panel)), 0);
  if (!ms.any_converged) {
    throw ConvergenceError("baseline NGR fit did not converge", ms.best.x, ms.best.f);
  }
  BaselineNgr out = objective.from_parameters(ms.best.x);
  out.mean_crps = ms.best.f;
  return out;
}

}  // namespace aemos::emos
