/*
 * (C) Copyright 2026 The adaptive-emos authors.
 *
 * This software is licensed under the terms of the Apache Licence Version 2.0
 * which can be obtained at http://www.apache.org/licenses/LICENSE-2.0.
 */

#include "aemos/model_io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "aemos/error.hpp"

namespace aemos {

using nlohmann::json;

namespace {

json to_j(const RunConfig& c) {
  return json{{"window", c.window},     {"min_frac", c.min_frac},
              {"k_nn", c.k_nn},         {"knots_km", c.knots_km},
              {"levels", c.levels},     {"propagate_z_variance", c.propagate_z_variance}};
}

RunConfig config_from(const json& j) {
  RunConfig c;
  c.window = j.at("window").get<std::size_t>();
  c.min_frac = j.at("min_frac").get<double>();
  c.k_nn = j.at("k_nn").get<std::size_t>();
  c.knots_km = j.at("knots_km").get<std::vector<double>>();
  c.levels = j.at("levels").get<std::vector<double>>();
  c.propagate_z_variance = j.at("propagate_z_variance").get<bool>();
  return c;
}

json to_j(const BaselineNgr& p) {
  return json{{"a", p.a}, {"b", p.b}, {"c", p.c}, {"d", p.d}, {"mean_crps", p.mean_crps}};
}

BaselineNgr baseline_from(const json& j) {
  BaselineNgr p;
  p.a = j.at("a").get<double>();
  p.b = j.at("b").get<std::vector<double>>();
  p.c = j.at("c").get<double>();
  p.d = j.at("d").get<double>();
  p.mean_crps = j.at("mean_crps").get<double>();
  return p;
}

json to_j(const EmosModel& m) {
  json grouping = json::object();
  for (const auto& [member, group] : m.grouping.members()) {
    grouping[member] = m.grouping.labels()[group];
  }
  json j{{"groups", m.grouping.labels()},
         {"grouping", grouping},
         {"b", m.b},
         {"b_star", m.b_star},
         {"c1", m.c1},
         {"c2", m.c2},
         {"mean_crps", m.mean_crps}};
  j["baseline"] = m.baseline ? to_j(*m.baseline) : json(nullptr);
  return j;
}

EmosModel emos_from(const json& j) {
  EmosModel m;
  std::vector<std::pair<std::string, std::string>> pairs;
  for (const auto& [member, group] : j.at("grouping").items()) {
    pairs.emplace_back(member, group.get<std::string>());
  }
  m.grouping = MemberGrouping(pairs);
  if (m.grouping.labels() != j.at("groups").get<std::vector<std::string>>()) {
    throw ValidationError("model file: group labels do not match the grouping");
  }
  m.b = j.at("b").get<std::vector<double>>();
  m.b_star = j.at("b_star").get<double>();
  m.c1 = j.at("c1").get<double>();
  m.c2 = j.at("c2").get<double>();
  m.mean_crps = j.at("mean_crps").get<double>();
  if (!j.at("baseline").is_null()) m.baseline = baseline_from(j.at("baseline"));
  return m;
}

json to_j(const StationState& s) {
  return json{{"id", s.id},
              {"x_km", s.loc.x_km},
              {"y_km", s.loc.y_km},
              {"altitude_m", s.loc.altitude_m},
              {"y_bar", s.y_bar},
              {"f_bar", s.f_bar},
              {"f_bar_star", s.f_bar_star},
              {"xi2", s.xi2},
              {"zeta_y_raw", s.zeta_y_raw},
              {"zeta_z_raw", s.zeta_z_raw},
              {"n_days_used", s.n_days_used}};
}

StationState state_from(const json& j) {
  StationState s;
  s.id = j.at("id").get<std::string>();
  s.loc = {j.at("x_km").get<double>(), j.at("y_km").get<double>(),
           j.at("altitude_m").get<double>()};
  s.y_bar = j.at("y_bar").get<double>();
  s.f_bar = j.at("f_bar").get<std::vector<double>>();
  s.f_bar_star = j.at("f_bar_star").get<double>();
  s.xi2 = j.at("xi2").get<double>();
  s.zeta_y_raw = j.at("zeta_y_raw").get<double>();
  s.zeta_z_raw = j.at("zeta_z_raw").get<double>();
  s.n_days_used = j.at("n_days_used").get<std::size_t>();
  return s;
}

json to_j(const FieldModel& f) {
  json locs = json::array();
  for (const auto& l : f.locations) locs.push_back({l.x_km, l.y_km, l.altitude_m});
  return json{{"kind", f.kind == FieldKind::Y ? "y" : "z"},
              {"theta1", f.theta1},
              {"theta2", f.theta2},
              {"reml_loglik", f.reml_loglik},
              {"drift",
               {{"kind", f.drift.kind == DriftKind::Constant ? "constant" : "altitude_spline"},
                {"knots_km", f.drift.knots_km}}},
              {"station_ids", f.station_ids},
              {"locations", locs},
              {"values", f.values},
              {"zeta_raw", f.zeta_raw},
              {"zeta", f.zeta},
              {"k_nn", f.k_nn},
              {"alpha", f.alpha},
              {"beta", f.beta}};
}

FieldModel field_from(const json& j) {
  FieldModel f;
  const auto kind = j.at("kind").get<std::string>();
  if (kind != "y" && kind != "z") throw ValidationError("model file: unknown field kind " + kind);
  f.kind = kind == "y" ? FieldKind::Y : FieldKind::Z;
  f.theta1 = j.at("theta1").get<double>();
  f.theta2 = j.at("theta2").get<double>();
  f.reml_loglik = j.at("reml_loglik").get<double>();
  const auto& d = j.at("drift");
  const auto dkind = d.at("kind").get<std::string>();
  if (dkind == "constant") {
    f.drift.kind = DriftKind::Constant;
  } else if (dkind == "altitude_spline") {
    f.drift.kind = DriftKind::AltitudeSpline;
  } else {
    throw ValidationError("model file: unknown drift kind " + dkind);
  }
  f.drift.knots_km = d.at("knots_km").get<std::vector<double>>();
  f.station_ids = j.at("station_ids").get<std::vector<std::string>>();
  for (const auto& l : j.at("locations")) {
    f.locations.push_back({l.at(0).get<double>(), l.at(1).get<double>(), l.at(2).get<double>()});
  }
  f.values = j.at("values").get<std::vector<double>>();
  f.zeta_raw = j.at("zeta_raw").get<std::vector<double>>();
  f.zeta = j.at("zeta").get<std::vector<double>>();
  f.k_nn = j.at("k_nn").get<std::size_t>();
  f.alpha = j.at("alpha").get<std::vector<double>>();
  f.beta = j.at("beta").get<std::vector<double>>();
  const std::size_t n = f.station_ids.size();
  if (f.locations.size() != n || f.values.size() != n || f.zeta_raw.size() != n ||
      f.zeta.size() != n || f.alpha.size() != n) {
    throw ValidationError("model file: field arrays disagree in length");
  }
  return f;
}

}  // namespace

std::string config_json(const RunConfig& config) { return to_j(config).dump(); }

std::uint64_t fnv1a(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string config_hash(const RunConfig& config) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx",
                static_cast<unsigned long long>(fnv1a(config_json(config))));
  return buf;
}

std::string to_json(const ModelFile& model) {
  json states = json::array();
  for (const auto& s : model.station_states) states.push_back(to_j(s));
  json j{{"date", format_date(model.date)},
         {"emos", to_j(model.emos)},
         {"station_states", states},
         {"field_y", to_j(model.field_y)},
         {"field_z", to_j(model.field_z)},
         {"config", to_j(model.config)}};
  return j.dump(1) + "\n";
}

ModelFile model_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw ParseError("model file", 0, e.what());
  }
  try {
    ModelFile m;
    m.date = parse_date(j.at("date").get<std::string>());
    m.config = config_from(j.at("config"));
    m.emos = emos_from(j.at("emos"));
    for (const auto& s : j.at("station_states")) m.station_states.push_back(state_from(s));
    m.field_y = field_from(j.at("field_y"));
    m.field_z = field_from(j.at("field_z"));
    return m;
  } catch (const json::exception& e) {
    throw ValidationError(std::string("model file: ") + e.what());
  }
}

void write_model(const std::filesystem::path& path, const ModelFile& model) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write " + path.string());
  out << to_json(model);
  if (!out) throw InputError("failed writing " + path.string());
}

ModelFile read_model(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open model file " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return model_from_json(ss.str());
}

}  // namespace aemos
