/*
 * (C) Copyright 2026 The adaptive-emos authors.
 *
 * This software is licensed under the terms of the Apache Licence Version 2.0
 * which can be obtained at http://www.apache.org/licenses/LICENSE-2.0.
 */

#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "aemos/core.hpp"

namespace aemos::ingest {

struct DatasetPaths {
  std::filesystem::path stations;
  std::filesystem::path observations;
  std::filesystem::path ensemble;
  std::optional<std::filesystem::path> grid;
  std::optional<std::filesystem::path> grouping;
};

/// station_id,x_km,y_km,altitude_m.  Rejects duplicate ids and duplicate coordinates.
std::vector<Station> load_stations(const std::filesystem::path& path);

/// site_id,x_km,y_km,altitude_m.  Rejects duplicate ids only.
std::vector<GridSite> load_grid(const std::filesystem::path& path);

/// Observations keyed by (station, date).  A stored nullopt is an explicit
/// missing value; an absent key is simply unknown.
class ObservationTable {
 public:
  void add(const std::string& station, Date date, std::optional<double> value);
  std::optional<double> get(const std::string& station, Date date) const;
  std::size_t size() const { return size_; }
  const std::unordered_map<std::string, std::map<Date, std::optional<double>>>& rows() const {
    return rows_;
  }

 private:
  std::unordered_map<std::string, std::map<Date, std::optional<double>>> rows_;
  std::size_t size_ = 0;
};

/// Raw member forecasts keyed by (station, date, member).
class EnsembleTable {
 public:
  void add(const std::string& station, Date date, const std::string& member,
           std::optional<double> value);

  /// Member ids in order of first appearance.
  const std::vector<std::string>& members() const { return members_; }

  /// Values for every known member (nullopt where missing), or nullopt if
  /// nothing was recorded for this station and date.
  std::optional<std::vector<std::optional<double>>> row(const std::string& station,
                                                        Date date) const;

  /// Raw values if every member is present.
  std::optional<std::vector<double>> complete_row(const std::string& station, Date date) const;

  /// Per-group means for the grouping, if every member is present.  Values
  /// are sorted inside each group before summing so member labels do not
  /// affect the result.
  std::optional<std::vector<double>> group_means(const std::string& station, Date date,
                                                 const MemberGrouping& grouping) const;

  const std::unordered_map<std::string, std::map<Date, std::vector<std::optional<double>>>>& rows()
      const {
    return rows_;
  }

 private:
  std::vector<std::string> members_;
  std::unordered_map<std::string, std::size_t> member_index_;
  std::unordered_map<std::string, std::map<Date, std::vector<std::optional<double>>>> rows_;
};

ObservationTable load_observations(const std::filesystem::path& path);
EnsembleTable load_ensemble(const std::filesystem::path& path);
MemberGrouping load_grouping(const std::filesystem::path& path);

/// Grouping to use for an ensemble: the file's if given (every member must be
/// mapped), otherwise one group per member.
MemberGrouping resolve_grouping(const EnsembleTable& ensemble,
                                const std::optional<MemberGrouping>& grouping);

struct WindowAssembly {
  StationPanel panel;
  std::vector<std::string> excluded;
};

/// Training days: the window_len calendar days ending the day before end_date.
std::vector<Date> window_days(Date end_date, int window_len);

/// Builds the training panel.  Stations come out sorted by id; a (station,
/// day) cell survives only with the observation and every member present;
/// stations with fewer than min_frac * window_len complete days are excluded.
WindowAssembly assemble_window(const std::vector<Station>& stations, const ObservationTable& obs,
                               const EnsembleTable& ens, const MemberGrouping& grouping,
                               Date end_date, int window_len, double min_frac);

/// Warning text when the highest station sits more than 500 m above the
/// second highest (it would dominate the altitude drift).
std::optional<std::string> leverage_warning(const std::vector<Station>& stations);

}  // namespace aemos::ingest
