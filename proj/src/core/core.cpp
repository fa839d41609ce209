/*
 * (C) Copyright 2026 The adaptive-emos authors.
 *
 * This software is licensed under the terms of the Apache Licence Version 2.0
 * which can be obtained at http://www.apache.org/licenses/LICENSE-2.0.
 */

#include "aemos/core.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <set>

#include "aemos/error.hpp"

namespace aemos {

namespace {

bool parse_int(std::string_view s, int& out) {
  if (s.empty()) return false;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc{} && ptr == s.data() + s.size();
}

}  // namespace

Date parse_date(std::string_view text) {
  int y = 0, m = 0, d = 0;
  if (text.size() != 10 || text[4] != '-' || text[7] != '-' || !parse_int(text.substr(0, 4), y) ||
      !parse_int(text.substr(5, 2), m) || !parse_int(text.substr(8, 2), d)) {
    throw DomainError("invalid date '" + std::string(text) + "', expected YYYY-MM-DD");
  }
  const std::chrono::year_month_day ymd{std::chrono::year{y}, std::chrono::month{unsigned(m)},
                                        std::chrono::day{unsigned(d)}};
  if (!ymd.ok()) throw DomainError("invalid calendar date '" + std::string(text) + "'");
  return std::chrono::sys_days{ymd};
}

std::string format_date(Date d) {
  const std::chrono::year_month_day ymd{d};
  char buf[16];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", int(ymd.year()), unsigned(ymd.month()),
                unsigned(ymd.day()));
  return buf;
}

std::string format_number(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

double distance_km(const Location& a, const Location& b) {
  const double dx = a.x_km - b.x_km;
  const double dy = a.y_km - b.y_km;
  return std::sqrt(dx * dx + dy * dy);
}

MemberGrouping::MemberGrouping(
    const std::vector<std::pair<std::string, std::string>>& assignment) {
  std::set<std::string> labels;
  for (const auto& [member, group] : assignment) labels.insert(group);
  labels_.assign(labels.begin(), labels.end());
  for (const auto& [member, group] : assignment) {
    const auto it = std::lower_bound(labels_.begin(), labels_.end(), group);
    const auto [pos, inserted] =
        member_group_.emplace(member, static_cast<std::size_t>(it - labels_.begin()));
    if (!inserted && pos->second != static_cast<std::size_t>(it - labels_.begin())) {
      throw ValidationError("member '" + member + "' assigned to more than one group");
    }
  }
}

MemberGrouping MemberGrouping::identity(const std::vector<std::string>& members) {
  std::vector<std::pair<std::string, std::string>> assignment;
  assignment.reserve(members.size());
  for (const auto& m : members) assignment.emplace_back(m, m);
  return MemberGrouping(assignment);
}

std::optional<std::size_t> MemberGrouping::group_of(const std::string& member) const {
  const auto it = member_group_.find(member);
  if (it == member_group_.end()) return std::nullopt;
  return it->second;
}

StationPanel::StationPanel(std::vector<Station> stations, std::vector<Date> days,
                           std::vector<std::string> groups)
    : stations_(std::move(stations)),
      days_(std::move(days)),
      groups_(std::move(groups)),
      obs_(stations_.size() * days_.size()),
      fc_(stations_.size() * days_.size() * groups_.size(), 0.0) {}

std::size_t StationPanel::complete_days(std::size_t s) const {
  std::size_t n = 0;
  for (std::size_t d = 0; d < days_.size(); ++d) n += complete(s, d) ? 1 : 0;
  return n;
}

void StationPanel::set(std::size_t s, std::size_t d, double obs, const std::vector<double>& fc) {
  if (fc.size() != groups_.size()) throw ValidationError("forecast vector has wrong group count");
  obs_[index(s, d)] = obs;
  std::copy(fc.begin(), fc.end(), fc_.begin() + index(s, d) * groups_.size());
}

void StationPanel::clear(std::size_t s, std::size_t d) {
  obs_[index(s, d)].reset();
  std::fill_n(fc_.begin() + index(s, d) * groups_.size(), groups_.size(), 0.0);
}

void StationPanel::validate() const {
  if (days_.size() < 2) throw ValidationError("panel needs at least two days");
  for (std::size_t d = 1; d < days_.size(); ++d) {
    if (!(days_[d - 1] < days_[d])) throw ValidationError("panel days not strictly increasing");
  }
  if (groups_.empty()) throw ValidationError("panel has no member groups");
}

}  // namespace aemos
