/*
 * (C) Copyright 2026 The adaptive-emos authors.
 *
 * This software is licensed under the terms of the Apache Licence Version 2.0
 * which can be obtained at http://www.apache.org/licenses/LICENSE-2.0.
 */

#include "aemos/ingest.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>
#include <utility>

#include "aemos/error.hpp"
#include "csv.hpp"

namespace aemos::ingest {

using detail::CsvReader;

namespace {

Location read_location(const CsvReader& csv, const std::vector<std::string_view>& f) {
  Location loc{csv.number(f[1], "x_km"), csv.number(f[2], "y_km"),
               csv.number(f[3], "altitude_m")};
  if (loc.altitude_m < kMinAltitudeM || loc.altitude_m > kMaxAltitudeM) {
    csv.fail("altitude " + std::string(f[3]) + " m outside [-500, 9000]");
  }
  return loc;
}

Date read_date(const CsvReader& csv, std::string_view field) {
  try {
    return parse_date(field);
  } catch (const DomainError& e) {
    csv.fail(e.what());
  }
}

template <typename Site>
std::vector<Site> load_sites(const std::filesystem::path& path, const char* id_column) {
  CsvReader csv(path, {id_column, "x_km", "y_km", "altitude_m"});
  std::vector<Site> sites;
  std::set<std::string> ids;
  std::vector<std::string_view> f;
  while (csv.next(f)) {
    if (f[0].empty()) csv.fail("empty id");
    Site site{std::string(f[0]), read_location(csv, f)};
    if (!ids.insert(site.id).second) {
      throw ValidationError(csv.file() + ":" + std::to_string(csv.line()) + ": duplicate id '" +
                            site.id + "'");
    }
    sites.push_back(std::move(site));
  }
  return sites;
}

}  // namespace

std::vector<Station> load_stations(const std::filesystem::path& path) {
  auto stations = load_sites<Station>(path, "station_id");
  std::set<std::pair<double, double>> coords;
  for (const auto& s : stations) {
    if (!coords.emplace(s.loc.x_km, s.loc.y_km).second) {
      throw ValidationError(path.string() + ": station '" + s.id +
                            "' duplicates the coordinates of another station");
    }
  }
  return stations;
}

std::vector<GridSite> load_grid(const std::filesystem::path& path) {
  return load_sites<GridSite>(path, "site_id");
}

void ObservationTable::add(const std::string& station, Date date, std::optional<double> value) {
  if (!rows_[station].emplace(date, value).second) {
    throw ValidationError("duplicate observation for " + station + " on " + format_date(date));
  }
  ++size_;
}

std::optional<double> ObservationTable::get(const std::string& station, Date date) const {
  const auto it = rows_.find(station);
  if (it == rows_.end()) return std::nullopt;
  const auto jt = it->second.find(date);
  return jt == it->second.end() ? std::nullopt : jt->second;
}

void EnsembleTable::add(const std::string& station, Date date, const std::string& member,
                        std::optional<double> value) {
  auto [it, inserted] = member_index_.emplace(member, members_.size());
  if (inserted) members_.push_back(member);
  auto& row = rows_[station][date];
  if (row.size() <= it->second) row.resize(it->second + 1);
  // Only duplicates of present values are caught here; load_ensemble checks all rows.
  if (row[it->second].has_value()) {
    throw ValidationError("duplicate forecast for " + station + " on " + format_date(date) +
                          " member " + member);
  }
  row[it->second] = value;
}

std::optional<std::vector<std::optional<double>>> EnsembleTable::row(const std::string& station,
                                                                     Date date) const {
  const auto it = rows_.find(station);
  if (it == rows_.end()) return std::nullopt;
  const auto jt = it->second.find(date);
  if (jt == it->second.end()) return std::nullopt;
  auto out = jt->second;
  out.resize(members_.size());
  return out;
}

std::optional<std::vector<double>> EnsembleTable::complete_row(const std::string& station,
                                                               Date date) const {
  const auto r = row(station, date);
  if (!r) return std::nullopt;
  std::vector<double> out;
  out.reserve(r->size());
  for (const auto& v : *r) {
    if (!v) return std::nullopt;
    out.push_back(*v);
  }
  return out;
}

std::optional<std::vector<double>> EnsembleTable::group_means(
    const std::string& station, Date date, const MemberGrouping& grouping) const {
  const auto values = complete_row(station, date);
  if (!values) return std::nullopt;
  std::vector<std::vector<double>> per_group(grouping.group_count());
  for (std::size_t j = 0; j < members_.size(); ++j) {
    const auto g = grouping.group_of(members_[j]);
    if (!g) throw ValidationError("member '" + members_[j] + "' is not in the grouping");
    per_group[*g].push_back((*values)[j]);
  }
  std::vector<double> means(grouping.group_count());
  for (std::size_t k = 0; k < per_group.size(); ++k) {
    auto& v = per_group[k];
    if (v.empty()) return std::nullopt;
    std::sort(v.begin(), v.end());
    double sum = 0.0;
    for (double x : v) sum += x;
    means[k] = sum / static_cast<double>(v.size());
  }
  return means;
}

ObservationTable load_observations(const std::filesystem::path& path) {
  CsvReader csv(path, {"station_id", "date", "value_c"});
  ObservationTable table;
  std::vector<std::string_view> f;
  while (csv.next(f)) {
    const Date date = read_date(csv, f[1]);
    try {
      table.add(std::string(f[0]), date, csv.maybe_number(f[2], "value_c"));
    } catch (const ValidationError& e) {
      throw ValidationError(csv.file() + ":" + std::to_string(csv.line()) + ": " + e.what());
    }
  }
  return table;
}

EnsembleTable load_ensemble(const std::filesystem::path& path) {
  CsvReader csv(path, {"station_id", "date", "member_id", "value_c"});
  EnsembleTable table;
  std::vector<std::string_view> f;
  std::set<std::tuple<std::string, Date, std::string>> seen;
  while (csv.next(f)) {
    const Date date = read_date(csv, f[1]);
    if (f[2].empty()) csv.fail("empty member_id");
    std::string station(f[0]), member(f[2]);
    if (!seen.emplace(station, date, member).second) {
      throw ValidationError(csv.file() + ":" + std::to_string(csv.line()) +
                            ": duplicate forecast row");
    }
    table.add(station, date, member, csv.maybe_number(f[3], "value_c"));
  }
  return table;
}

MemberGrouping load_grouping(const std::filesystem::path& path) {
  CsvReader csv(path, {"member_id", "group"});
  std::vector<std::pair<std::string, std::string>> assignment;
  std::set<std::string> members;
  std::vector<std::string_view> f;
  while (csv.next(f)) {
    if (f[0].empty() || f[1].empty()) csv.fail("empty member or group");
    if (!members.insert(std::string(f[0])).second) {
      throw ValidationError(csv.file() + ":" + std::to_string(csv.line()) +
                            ": member listed twice");
    }
    assignment.emplace_back(std::string(f[0]), std::string(f[1]));
  }
  if (assignment.empty()) throw ValidationError(path.string() + ": grouping file is empty");
  return MemberGrouping(assignment);
}

MemberGrouping resolve_grouping(const EnsembleTable& ensemble,
                                const std::optional<MemberGrouping>& grouping) {
  if (!grouping) {
    auto members = ensemble.members();
    std::sort(members.begin(), members.end());
    return MemberGrouping::identity(members);
  }
  for (const auto& m : ensemble.members()) {
    if (!grouping->group_of(m)) throw ValidationError("member '" + m + "' is not in the grouping");
  }
  return *grouping;
}

std::vector<Date> window_days(Date end_date, int window_len) {
  if (window_len < 2) throw DomainError("window length must be at least 2");
  std::vector<Date> days;
  days.reserve(static_cast<std::size_t>(window_len));
  for (int i = window_len; i >= 1; --i) days.push_back(end_date - std::chrono::days{i});
  return days;
}

WindowAssembly assemble_window(const std::vector<Station>& stations, const ObservationTable& obs,
                               const EnsembleTable& ens, const MemberGrouping& grouping,
                               Date end_date, int window_len, double min_frac) {
  if (!(min_frac > 0.0 && min_frac <= 1.0)) throw DomainError("min_frac must lie in (0, 1]");
  const std::vector<Date> days = window_days(end_date, window_len);
  for (const auto& m : ens.members()) {
    if (!grouping.group_of(m)) throw ValidationError("member '" + m + "' is not in the grouping");
  }

  std::vector<Station> sorted = stations;
  std::sort(sorted.begin(), sorted.end(),
            [](const Station& a, const Station& b) { return a.id < b.id; });

  const double needed = min_frac * static_cast<double>(window_len);
  struct Cells {
    std::vector<std::optional<std::pair<double, std::vector<double>>>> by_day;
  };
  std::vector<Station> kept;
  std::vector<Cells> kept_cells;
  WindowAssembly out;
  for (const auto& st : sorted) {
    Cells cells;
    cells.by_day.resize(days.size());
    std::size_t complete = 0;
    for (std::size_t d = 0; d < days.size(); ++d) {
      const auto y = obs.get(st.id, days[d]);
      if (!y) continue;
      auto f = ens.group_means(st.id, days[d], grouping);
      if (!f) continue;
      cells.by_day[d].emplace(*y, std::move(*f));
      ++complete;
    }
    if (complete == 0 || static_cast<double>(complete) < needed) {
      out.excluded.push_back(st.id);
      continue;
    }
    kept.push_back(st);
    kept_cells.push_back(std::move(cells));
  }
  if (kept.size() < 2) {
    throw DatasetError("window ending " + format_date(end_date) + " has " +
                       std::to_string(kept.size()) + " usable stations, need at least 2");
  }

  out.panel = StationPanel(std::move(kept), days, grouping.labels());
  for (std::size_t s = 0; s < kept_cells.size(); ++s) {
    for (std::size_t d = 0; d < days.size(); ++d) {
      const auto& cell = kept_cells[s].by_day[d];
      if (cell) out.panel.set(s, d, cell->first, cell->second);
    }
  }
  return out;
}

std::optional<std::string> leverage_warning(const std::vector<Station>& stations) {
  if (stations.size() < 2) return std::nullopt;
  std::vector<const Station*> order;
  for (const auto& s : stations) order.push_back(&s);
  std::partial_sort(order.begin(), order.begin() + 2, order.end(),
                    [](const Station* a, const Station* b) {
                      return a->loc.altitude_m > b->loc.altitude_m;
                    });
  const double gap = order[0]->loc.altitude_m - order[1]->loc.altitude_m;
  if (gap <= 500.0) return std::nullopt;
  std::ostringstream msg;
  msg << "station " << order[0]->id << " lies " << gap
      << " m above the next highest station and will dominate the altitude drift";
  return msg.str();
}

}  // namespace aemos::ingest
