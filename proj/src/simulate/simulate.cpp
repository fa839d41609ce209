/*
 * (C) Copyright 2026 The adaptive-emos authors.
 *
 * This software is licensed under the terms of the Apache Licence Version 2.0
 * which can be obtained at http://www.apache.org/licenses/LICENSE-2.0.
 */

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>

#include <json.hpp>

#include "aemos/emos.hpp"
#include "aemos/error.hpp"
#include "aemos/geostat.hpp"
#include "aemos/simulate.hpp"

namespace aemos::simulate {

namespace {

// Stream ids; each kind of draw has its own counter space.
enum Stream : std::uint64_t {
  kLocations = 1,
  kFieldY = 2,
  kFieldZ = 3,
  kSignal = 4,
  kSpread = 5,
  kGroupNoise = 6,
  kError = 7,
  kMembers = 8,
};

std::string numbered(char prefix, std::size_t i, int width) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%c%0*zu", prefix, width, i);
  return buf;
}

void check_config(const SimConfig& c) {
  auto nonneg = [](double v, const char* what) {
    if (!(v >= 0.0) || !std::isfinite(v)) {
      throw ValidationError(std::string("simulation config: ") + what + " must be >= 0");
    }
  };
  if (c.stations < 1) throw ValidationError("simulation config: need at least one station");
  if (c.days < 1) throw ValidationError("simulation config: need at least one day");
  if (c.b.empty()) throw ValidationError("simulation config: b must have one entry per group");
  if (c.members_per_group < 1) throw ValidationError("simulation config: members_per_group >= 1");
  if (c.y_trend.size() != 3) throw ValidationError("simulation config: y_trend needs 3 entries");
  if (!c.group_bias.empty() && c.group_bias.size() != c.b.size()) {
    throw ValidationError("simulation config: group_bias needs one entry per group");
  }
  if (!(c.altitude_min_m <= c.altitude_max_m) || c.altitude_min_m < kMinAltitudeM ||
      c.altitude_max_m > kMaxAltitudeM) {
    throw ValidationError("simulation config: invalid altitude range");
  }
  nonneg(c.box_km, "box_km");
  for (const auto* f : {&c.y_field, &c.z_field}) {
    nonneg(f->theta1, "theta1");
    nonneg(f->theta2, "theta2");
    nonneg(f->zeta, "zeta");
  }
  for (double v : c.b) nonneg(v, "b");
  nonneg(c.c1, "c1");
  nonneg(c.c2, "c2");
  nonneg(c.signal_sd, "signal_sd");
  nonneg(c.spread_scale, "spread_scale");
  nonneg(c.member_sd, "member_sd");
  nonneg(c.forecast_damping, "forecast_damping");
}

}  // namespace

std::vector<double> simulate_brownian(std::span<const Location> points, double theta2,
                                      std::span<const double> zeta, double theta1,
                                      std::uint64_t seed, std::uint64_t stream) {
  const auto n = static_cast<Eigen::Index>(points.size());
  if (zeta.size() != points.size()) throw DomainError("one nugget indicator per point required");
  if (!(theta1 >= 0.0) || !(theta2 >= 0.0)) throw DomainError("theta1, theta2 must be >= 0");
  if (n == 0) return {};

  Eigen::VectorXd norm(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    norm(i) = std::hypot(points[static_cast<std::size_t>(i)].x_km,
                         points[static_cast<std::size_t>(i)].y_km);
  }
  Eigen::MatrixXd cov(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    for (Eigen::Index i = j; i < n; ++i) {
      const double d = distance_km(points[static_cast<std::size_t>(i)],
                                   points[static_cast<std::size_t>(j)]);
      cov(i, j) = cov(j, i) = theta2 * (norm(i) + norm(j) - d);
    }
    cov(j, j) += theta1 * zeta[static_cast<std::size_t>(j)];
  }

  const double scale = std::max(cov.diagonal().maxCoeff(), 1.0);
  Eigen::LDLT<Eigen::MatrixXd> ldlt(cov);
  auto acceptable = [&] {
    return ldlt.info() == Eigen::Success && ldlt.vectorD().minCoeff() >= -1e-8 * scale;
  };
  if (!acceptable()) {
    cov.diagonal().array() += 1e-10 * scale;
    ldlt.compute(cov);
    if (!acceptable()) throw NumericError("Brownian covariance is not positive semidefinite");
  }

  const CounterRng rng(seed, stream);
  Eigen::VectorXd v(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    v(i) = std::sqrt(std::max(ldlt.vectorD()(i), 0.0)) * rng.normal(static_cast<std::uint64_t>(i));
  }
  const Eigen::VectorXd lv = ldlt.matrixL() * v;
  const Eigen::VectorXd x = ldlt.transpositionsP().transpose() * lv;
  return {x.data(), x.data() + n};
}

SimDataset simulate_dataset(const SimConfig& c) {
  check_config(c);
  SimDataset out;
  SimTruth& truth = out.truth;
  truth.config = c;
  const std::size_t g = c.groups();
  const std::size_t total = c.stations + c.heldout_sites;

  const CounterRng loc_rng(c.seed, kLocations);
  for (std::size_t i = 0; i < total; ++i) {
    const Location loc{c.box_km * loc_rng.uniform(3 * i), c.box_km * loc_rng.uniform(3 * i + 1),
                       c.altitude_min_m +
                           (c.altitude_max_m - c.altitude_min_m) * loc_rng.uniform(3 * i + 2)};
    const bool station = i < c.stations;
    const std::string id = station ? numbered('S', i + 1, 4) : numbered('H', i - c.stations + 1, 4);
    truth.ids.push_back(id);
    truth.locations.push_back(loc);
    if (station) {
      out.stations.push_back({id, loc});
    } else {
      out.sites.push_back({id, loc});
    }
  }

  const std::vector<double> zeta_y(total, c.y_field.zeta);
  const std::vector<double> zeta_z(total, c.z_field.zeta);
  const auto y_field = simulate_brownian(truth.locations, c.y_field.theta2, zeta_y,
                                         c.y_field.theta1, c.seed, kFieldY);
  const auto z_field = simulate_brownian(truth.locations, c.z_field.theta2, zeta_z,
                                         c.z_field.theta1, c.seed, kFieldZ);
  for (std::size_t i = 0; i < total; ++i) {
    const auto basis = geostat::natural_spline_basis(truth.locations[i].altitude_m / 1000.0);
    double trend = 0.0;
    for (std::size_t j = 0; j < 3; ++j) trend += c.y_trend[j] * basis[j];
    truth.y_bar.push_back(trend + y_field[i]);
    truth.z.push_back(c.z_mean + z_field[i]);
    truth.xi2.push_back(std::exp(truth.z.back()));
    std::vector<double> fb(g);
    for (std::size_t k = 0; k < g; ++k) {
      fb[k] = c.forecast_damping * trend + (c.group_bias.empty() ? 0.0 : c.group_bias[k]);
    }
    truth.f_bar.push_back(std::move(fb));
  }

  const Date start = parse_date(c.start_date);
  for (std::size_t t = 0; t < c.days; ++t) out.days.push_back(start + std::chrono::days(t));

  std::vector<std::pair<std::string, std::string>> assignment;
  for (std::size_t k = 0; k < g; ++k) {
    for (std::size_t j = 0; j < c.members_per_group; ++j) {
      const std::string member = numbered('M', k * c.members_per_group + j + 1, 2);
      out.members.push_back(member);
      assignment.emplace_back(member, "G" + std::to_string(k + 1));
    }
  }
  out.grouping = MemberGrouping(assignment);

  const CounterRng signal_rng(c.seed, kSignal);
  const CounterRng spread_rng(c.seed, kSpread);
  const CounterRng group_rng(c.seed, kGroupNoise);
  const CounterRng error_rng(c.seed, kError);
  const CounterRng member_rng(c.seed, kMembers);
  const std::size_t mpg = c.members_per_group;
  std::vector<double> f(g), delta(mpg);
  for (std::size_t i = 0; i < total; ++i) {
    for (std::size_t t = 0; t < c.days; ++t) {
      const std::uint64_t cell = i * c.days + t;
      const double signal = c.signal_sd * signal_rng.normal(cell);
      // Mean-one lognormal spread.
      const double spread = c.spread_scale * std::exp(0.25 * spread_rng.normal(cell) - 0.03125);
      double mu = truth.y_bar[i];
      for (std::size_t k = 0; k < g; ++k) {
        f[k] = truth.f_bar[i][k] + signal + spread * group_rng.normal(cell * g + k);
        mu += c.b[k] * (f[k] - truth.f_bar[i][k]);
      }
      const double var = c.c1 * truth.xi2[i] + c.c2 * emos::ensemble_variance(f);
      out.obs.add(truth.ids[i], out.days[t], mu + std::sqrt(var) * error_rng.normal(cell));

      for (std::size_t k = 0; k < g; ++k) {
        double mean = 0.0;
        for (std::size_t j = 0; j < mpg; ++j) {
          delta[j] = c.member_sd * member_rng.normal((cell * g + k) * mpg + j);
          mean += delta[j];
        }
        mean /= static_cast<double>(mpg);
        for (std::size_t j = 0; j < mpg; ++j) {
          out.ens.add(truth.ids[i], out.days[t], out.members[k * mpg + j], f[k] + delta[j] - mean);
        }
      }
    }
  }
  return out;
}

std::pair<StationPanel, SimTruth> simulate_panel(const SimConfig& config) {
  SimDataset data = simulate_dataset(config);
  StationPanel panel(data.stations, data.days, data.grouping.labels());
  for (std::size_t s = 0; s < data.stations.size(); ++s) {
    const auto& id = data.stations[s].id;
    for (std::size_t d = 0; d < data.days.size(); ++d) {
      const auto y = data.obs.get(id, data.days[d]);
      const auto fc = data.ens.group_means(id, data.days[d], data.grouping);
      if (y && fc) panel.set(s, d, *y, *fc);
    }
  }
  return {std::move(panel), std::move(data.truth)};
}

namespace {

std::ofstream open_csv(const std::filesystem::path& path, const std::string& header_comment,
                       const char* header) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write " + path.string());
  if (!header_comment.empty()) out << header_comment << '\n';
  out << header << '\n';
  return out;
}

template <typename Site>
void write_locations(const std::filesystem::path& path, const std::string& header_comment,
                     const char* header, const std::vector<Site>& sites) {
  auto out = open_csv(path, header_comment, header);
  for (const auto& s : sites) {
    out << s.id << ',' << format_number(s.loc.x_km) << ',' << format_number(s.loc.y_km) << ','
        << format_number(s.loc.altitude_m) << '\n';
  }
}

}  // namespace

void write_dataset(const std::filesystem::path& dir, const SimDataset& data,
                   const std::string& header_comment) {
  std::filesystem::create_directories(dir);
  write_locations(dir / "stations.csv", header_comment, "station_id,x_km,y_km,altitude_m",
                  data.stations);
  write_locations(dir / "grid.csv", header_comment, "site_id,x_km,y_km,altitude_m", data.sites);

  const auto& ids = data.truth.ids;
  {
    auto out = open_csv(dir / "observations.csv", header_comment, "station_id,date,value_c");
    for (const auto& id : ids) {
      for (const auto& day : data.days) {
        const auto y = data.obs.get(id, day);
        out << id << ',' << format_date(day) << ',' << (y ? format_number(*y) : "NA") << '\n';
      }
    }
  }
  {
    auto out = open_csv(dir / "ensemble.csv", header_comment, "station_id,date,member_id,value_c");
    for (const auto& id : ids) {
      for (const auto& day : data.days) {
        const auto row = data.ens.row(id, day);
        if (!row) continue;
        const std::string prefix = id + ',' + format_date(day) + ',';
        for (std::size_t m = 0; m < data.ens.members().size(); ++m) {
          const auto& v = (*row)[m];
          out << prefix << data.ens.members()[m] << ',' << (v ? format_number(*v) : "NA") << '\n';
        }
      }
    }
  }
  {
    auto out = open_csv(dir / "grouping.csv", header_comment, "member_id,group");
    for (const auto& [member, group] : data.grouping.members()) {
      out << member << ',' << data.grouping.labels()[group] << '\n';
    }
  }
  std::ofstream truth(dir / "truth.json", std::ios::binary);
  if (!truth) throw InputError("cannot write " + (dir / "truth.json").string());
  truth << truth_to_json(data.truth);
}

namespace {

using nlohmann::json;

json field_json(const FieldSpec& f) {
  return json{{"theta1", f.theta1}, {"theta2", f.theta2}, {"zeta", f.zeta}};
}

FieldSpec field_spec(const json& j, FieldSpec f) {
  f.theta1 = j.value("theta1", f.theta1);
  f.theta2 = j.value("theta2", f.theta2);
  f.zeta = j.value("zeta", f.zeta);
  return f;
}

json config_json(const SimConfig& c) {
  return json{{"seed", c.seed},
              {"stations", c.stations},
              {"heldout_sites", c.heldout_sites},
              {"box_km", c.box_km},
              {"altitude_min_m", c.altitude_min_m},
              {"altitude_max_m", c.altitude_max_m},
              {"start_date", c.start_date},
              {"days", c.days},
              {"y_field", field_json(c.y_field)},
              {"y_trend", c.y_trend},
              {"z_field", field_json(c.z_field)},
              {"z_mean", c.z_mean},
              {"b", c.b},
              {"c1", c.c1},
              {"c2", c.c2},
              {"members_per_group", c.members_per_group},
              {"signal_sd", c.signal_sd},
              {"spread_scale", c.spread_scale},
              {"member_sd", c.member_sd},
              {"forecast_damping", c.forecast_damping},
              {"group_bias", c.group_bias}};
}

}  // namespace

std::string config_to_json(const SimConfig& config) { return config_json(config).dump(1) + "\n"; }

SimConfig config_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw ParseError("simulation config", 0, e.what());
  }
  if (!j.is_object()) throw ValidationError("simulation config must be a JSON object");
  const auto known = config_json(SimConfig{});
  for (const auto& [key, value] : j.items()) {
    if (!known.contains(key)) throw ValidationError("simulation config: unknown key " + key);
  }
  try {
    SimConfig c;
    c.seed = j.value("seed", c.seed);
    c.stations = j.value("stations", c.stations);
    c.heldout_sites = j.value("heldout_sites", c.heldout_sites);
    c.box_km = j.value("box_km", c.box_km);
    c.altitude_min_m = j.value("altitude_min_m", c.altitude_min_m);
    c.altitude_max_m = j.value("altitude_max_m", c.altitude_max_m);
    c.start_date = j.value("start_date", c.start_date);
    c.days = j.value("days", c.days);
    if (j.contains("y_field")) c.y_field = field_spec(j.at("y_field"), c.y_field);
    c.y_trend = j.value("y_trend", c.y_trend);
    if (j.contains("z_field")) c.z_field = field_spec(j.at("z_field"), c.z_field);
    c.z_mean = j.value("z_mean", c.z_mean);
    c.b = j.value("b", c.b);
    c.c1 = j.value("c1", c.c1);
    c.c2 = j.value("c2", c.c2);
    c.members_per_group = j.value("members_per_group", c.members_per_group);
    c.signal_sd = j.value("signal_sd", c.signal_sd);
    c.spread_scale = j.value("spread_scale", c.spread_scale);
    c.member_sd = j.value("member_sd", c.member_sd);
    c.forecast_damping = j.value("forecast_damping", c.forecast_damping);
    c.group_bias = j.value("group_bias", c.group_bias);
    check_config(c);
    return c;
  } catch (const json::exception& e) {
    throw ValidationError(std::string("simulation config: ") + e.what());
  }
}

std::string truth_to_json(const SimTruth& truth) {
  json sites = json::array();
  for (std::size_t i = 0; i < truth.ids.size(); ++i) {
    sites.push_back({{"id", truth.ids[i]},
                     {"x_km", truth.locations[i].x_km},
                     {"y_km", truth.locations[i].y_km},
                     {"altitude_m", truth.locations[i].altitude_m},
                     {"y_bar", truth.y_bar[i]},
                     {"z", truth.z[i]},
                     {"xi2", truth.xi2[i]},
                     {"f_bar", truth.f_bar[i]}});
  }
  json j{{"config", config_json(truth.config)}, {"sites", sites}};
  return j.dump(1) + "\n";
}

}  // namespace aemos::simulate
