/*
 * (C) Copyright 2026 The adaptive-emos authors.
 *
 * This software is licensed under the terms of the Apache Licence Version 2.0
 * which can be obtained at http://www.apache.org/licenses/LICENSE-2.0.
 */

#include "aemos/verify.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "aemos/error.hpp"
#include "aemos/scoring.hpp"

namespace aemos::verify {

namespace {

struct Accumulator {
  std::size_t n = 0;
  double abs_error = 0.0;
  double crps = 0.0;
  std::vector<double> width;
  std::vector<std::size_t> covered;
};

ScoreRow finish(const std::string& method, const Accumulator& acc,
                const std::vector<double>& nominal) {
  ScoreRow row;
  row.method = method;
  row.n = acc.n;
  const double n = static_cast<double>(acc.n);
  row.mae = acc.abs_error / n;
  row.crps = acc.crps / n;
  for (std::size_t l = 0; l < nominal.size(); ++l) {
    row.levels.push_back({nominal[l], acc.width[l] / n, static_cast<double>(acc.covered[l]) / n});
  }
  return row;
}

std::ofstream open_output(const std::filesystem::path& path, const std::string& header_comment) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write " + path.string());
  if (!header_comment.empty()) out << header_comment << '\n';
  return out;
}

}  // namespace

ScoreRow score_gaussian(const std::string& method, std::span<const GaussianForecast> forecasts,
                        const ingest::ObservationTable& obs, std::span<const double> levels) {
  // Sorting the matched pairs makes the floating-point sums order independent.
  std::vector<std::pair<PairKey, std::pair<const GaussianForecast*, double>>> pairs;
  for (const auto& f : forecasts) {
    if (const auto y = obs.get(f.site_id, f.date)) pairs.push_back({{f.site_id, f.date}, {&f, *y}});
  }
  if (pairs.empty()) throw InputError(method + ": no forecast matches an observation");
  std::sort(pairs.begin(), pairs.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });

  Accumulator acc;
  acc.width.assign(levels.size(), 0.0);
  acc.covered.assign(levels.size(), 0);
  for (const auto& [key, value] : pairs) {
    const auto& [f, y] = value;
    const double sigma = std::sqrt(f->total_var());
    ++acc.n;
    acc.abs_error += std::abs(f->mu - y);
    acc.crps += scoring::gaussian_crps(f->mu, sigma, y);
    for (std::size_t l = 0; l < levels.size(); ++l) {
      const auto iv = scoring::central_interval(f->mu, sigma, levels[l]);
      acc.width[l] += iv.width();
      acc.covered[l] += iv.covers(y) ? 1 : 0;
    }
  }
  return finish(method, acc, {levels.begin(), levels.end()});
}

ScoreRow score_ensemble(const std::string& method, const ingest::EnsembleTable& ens,
                        const ingest::ObservationTable& obs, std::span<const int> rank_drops,
                        const std::set<PairKey>* keys) {
  std::vector<PairKey> order;
  for (const auto& [station, by_date] : ens.rows()) {
    for (const auto& [date, values] : by_date) {
      if (keys && !keys->count({station, date})) continue;
      order.emplace_back(station, date);
    }
  }
  std::sort(order.begin(), order.end());

  const std::size_t m = ens.members().size();
  std::vector<int> drops(rank_drops.begin(), rank_drops.end());
  // Larger rank drops give narrower intervals, so descending drops sort the
  // levels by increasing nominal coverage.
  std::sort(drops.begin(), drops.end(), std::greater<>());
  for (int r : drops) {
    if (r < 0 || m < static_cast<std::size_t>(2 * r + 2)) {
      throw InputError(method + ": " + std::to_string(m) +
                       " members are too few for rank drop " + std::to_string(r));
    }
  }

  Accumulator acc;
  acc.width.assign(drops.size(), 0.0);
  acc.covered.assign(drops.size(), 0);
  std::vector<double> nominal(drops.size(), 0.0);
  for (const auto& [station, date] : order) {
    const auto y = obs.get(station, date);
    if (!y) continue;
    const auto values = ens.complete_row(station, date);
    if (!values) continue;
    ++acc.n;
    acc.abs_error += std::abs(scoring::median(*values) - *y);
    acc.crps += scoring::sample_crps(*values, *y);
    for (std::size_t l = 0; l < drops.size(); ++l) {
      const auto iv = scoring::ensemble_interval(*values, drops[l]);
      nominal[l] = iv.nominal;
      acc.width[l] += iv.width();
      acc.covered[l] += iv.covers(*y) ? 1 : 0;
    }
  }
  if (acc.n == 0) throw InputError(method + ": no complete ensemble matches an observation");
  return finish(method, acc, nominal);
}

std::vector<StationBias> station_bias(std::span<const GaussianForecast> forecasts,
                                      const ingest::ObservationTable& obs) {
  std::map<std::string, std::vector<std::pair<Date, double>>> errors;
  for (const auto& f : forecasts) {
    if (const auto y = obs.get(f.site_id, f.date)) errors[f.site_id].emplace_back(f.date, f.mu - *y);
  }
  std::vector<StationBias> out;
  for (auto& [id, list] : errors) {
    std::sort(list.begin(), list.end());
    double sum = 0.0;
    for (const auto& [date, e] : list) sum += e;
    out.push_back({id, sum / static_cast<double>(list.size()), list.size()});
  }
  return out;
}

std::string level_label(double level) {
  auto permille = static_cast<long>(std::lround(level * 1000.0));
  if (permille % 10 == 0) permille /= 10;
  return std::to_string(permille);
}

void write_scores(const std::filesystem::path& path, const std::string& header_comment,
                  std::span<const ScoreRow> rows, std::span<const double> levels) {
  auto out = open_output(path, header_comment);
  out << "method,n,mae_c,crps_c";
  for (double l : levels) out << ",width" << level_label(l) << "_c,cov" << level_label(l);
  out << '\n';
  for (const auto& r : rows) {
    if (r.levels.size() != levels.size()) {
      throw InputError(r.method + ": score row has the wrong number of levels");
    }
    out << r.method << ',' << r.n << ',' << format_number(r.mae) << ','
        << format_number(r.crps);
    for (const auto& l : r.levels) {
      out << ',' << format_number(l.width) << ',' << format_number(l.coverage);
    }
    out << '\n';
  }
}

void write_bias(const std::filesystem::path& path, const std::string& header_comment,
                std::span<const StationBias> rows, const std::map<std::string, Location>& where) {
  auto out = open_output(path, header_comment);
  out << "station_id,x_km,y_km,mean_error_c,n\n";
  for (const auto& r : rows) {
    const auto it = where.find(r.station_id);
    out << r.station_id << ',';
    if (it != where.end()) {
      out << format_number(it->second.x_km) << ',' << format_number(it->second.y_km);
    } else {
      out << ',';
    }
    out << ',' << format_number(r.mean_error) << ',' << r.n << '\n';
  }
}

}  // namespace aemos::verify
