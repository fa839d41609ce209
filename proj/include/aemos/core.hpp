/*
 * (C) Copyright 2026 The adaptive-emos authors.
 *
 * This software is licensed under the terms of the Apache Licence Version 2.0
 * which can be obtained at http://www.apache.org/licenses/LICENSE-2.0.
 */

#pragma once

#include <chrono>
#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace aemos {

/// Calendar day; the valid hour of a forecast is metadata and never part of the key.
using Date = std::chrono::sys_days;

/// Parses YYYY-MM-DD. Throws DomainError on anything else.
Date parse_date(std::string_view text);
std::string format_date(Date d);

/// Shortest decimal text that reads back to the same double.
std::string format_number(double v);

/// Planar position (km, pre-projected) plus altitude above sea level (m).
struct Location {
  double x_km = 0.0;
  double y_km = 0.0;
  double altitude_m = 0.0;
};

double distance_km(const Location& a, const Location& b);

struct Station {
  std::string id;
  Location loc;
};

/// Prediction site; may coincide with a station or lie below sea level.
struct GridSite {
  std::string id;
  Location loc;
};

/// Altitude sanity bounds shared by stations and grid sites.
inline constexpr double kMinAltitudeM = -500.0;
inline constexpr double kMaxAltitudeM = 9000.0;

/// Maps raw ensemble member ids onto exchangeable groups.
class MemberGrouping {
 public:
  MemberGrouping() = default;
  /// Pairs of (member id, group label). Group labels are kept in sorted order.
  explicit MemberGrouping(const std::vector<std::pair<std::string, std::string>>& assignment);

  /// One group per member, labelled by the member id.
  static MemberGrouping identity(const std::vector<std::string>& members);

  std::size_t group_count() const { return labels_.size(); }
  const std::vector<std::string>& labels() const { return labels_; }
  /// Index into labels(), or nullopt for an unknown member.
  std::optional<std::size_t> group_of(const std::string& member) const;
  const std::map<std::string, std::size_t>& members() const { return member_group_; }

  bool operator==(const MemberGrouping&) const = default;

 private:
  std::vector<std::string> labels_;
  std::map<std::string, std::size_t> member_group_;
};

/// Station x day x group arrays of one training window.  Cells are absent
/// unless the observation and every group forecast are present.
class StationPanel {
 public:
  StationPanel() = default;
  StationPanel(std::vector<Station> stations, std::vector<Date> days,
               std::vector<std::string> groups);

  std::size_t station_count() const { return stations_.size(); }
  std::size_t day_count() const { return days_.size(); }
  std::size_t group_count() const { return groups_.size(); }

  const std::vector<Station>& stations() const { return stations_; }
  const std::vector<Date>& days() const { return days_; }
  const std::vector<std::string>& groups() const { return groups_; }

  bool complete(std::size_t s, std::size_t d) const { return obs_[index(s, d)].has_value(); }
  double obs(std::size_t s, std::size_t d) const { return *obs_[index(s, d)]; }
  double fc(std::size_t s, std::size_t d, std::size_t k) const {
    return fc_[index(s, d) * groups_.size() + k];
  }
  std::size_t complete_days(std::size_t s) const;

  /// Stores one complete cell (observation plus all g group forecasts).
  void set(std::size_t s, std::size_t d, double obs, const std::vector<double>& fc);
  void clear(std::size_t s, std::size_t d);

  /// Throws ValidationError if days are not increasing or fewer than two.
  void validate() const;

 private:
  std::size_t index(std::size_t s, std::size_t d) const { return s * days_.size() + d; }

  std::vector<Station> stations_;
  std::vector<Date> days_;
  std::vector<std::string> groups_;
  std::vector<std::optional<double>> obs_;
  std::vector<double> fc_;
};

/// Per-station quantities fitted on one window.
struct StationState {
  std::string id;
  Location loc;
  double y_bar = 0.0;
  std::vector<double> f_bar;  // one entry per group
  double f_bar_star = 0.0;
  double xi2 = 0.0;
  double zeta_y_raw = 0.0;
  double zeta_z_raw = 0.0;
  std::size_t n_days_used = 0;
};

/// Plain non-homogeneous Gaussian regression: mu = a + sum b_k f_k, var = c + d S^2.
struct BaselineNgr {
  double a = 0.0;
  std::vector<double> b;
  double c = 0.0;
  double d = 0.0;
  double mean_crps = 0.0;
};

struct EmosModel {
  MemberGrouping grouping;
  std::vector<double> b;  // one weight per group, >= 0
  double b_star = 0.0;
  double c1 = 0.0;
  double c2 = 0.0;
  double mean_crps = 0.0;
  std::optional<BaselineNgr> baseline;
};

enum class FieldKind { Y, Z };
enum class DriftKind { Constant, AltitudeSpline };

/// Describes the drift space of a kriging system.
struct DriftDescriptor {
  DriftKind kind = DriftKind::Constant;
  std::vector<double> knots_km{0.0, 1.0, 1.5};

  bool operator==(const DriftDescriptor&) const = default;
};

/// Everything needed to rebuild a fitted intrinsic-kriging interpolator.
struct FieldModel {
  FieldKind kind = FieldKind::Y;
  double theta1 = 0.0;  // nugget scale
  double theta2 = 1.0;  // slope of the linear generalized covariance
  double reml_loglik = 0.0;
  DriftDescriptor drift;
  std::vector<std::string> station_ids;
  std::vector<Location> locations;
  std::vector<double> values;
  std::vector<double> zeta_raw;  // LOOCV indicators
  std::vector<double> zeta;      // smoothed nugget at the stations
  std::size_t k_nn = 25;
  std::vector<double> alpha;
  std::vector<double> beta;
};

/// Predictive Gaussian at one site and date.  The total predictive variance
/// is var + interp_var.
struct GaussianForecast {
  std::string site_id;
  Date date{};
  double mu = 0.0;
  double var = 0.0;
  double interp_var = 0.0;

  double total_var() const { return var + interp_var; }
};

}  // namespace aemos
