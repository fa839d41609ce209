/*
 * (C) Copyright 2026 The adaptive-emos authors.
 *
 * This software is licensed under the terms of the Apache Licence Version 2.0
 * which can be obtained at http://www.apache.org/licenses/LICENSE-2.0.
 */

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>

#include <CLI11.hpp>

#include "aemos/cli.hpp"
#include "aemos/error.hpp"
#include "aemos/geostat.hpp"
#include "aemos/log.hpp"
#include "aemos/simulate.hpp"
#include "aemos/verify.hpp"
#include "ingest/csv.hpp"

namespace aemos::cli {

namespace fs = std::filesystem;

ModelFile fit_date(const std::vector<Station>& stations, const ingest::ObservationTable& obs,
                   const ingest::EnsembleTable& ens, const MemberGrouping& grouping, Date date,
                   const RunConfig& config, const emos::FitConfig& fit_config) {
  const auto assembly = ingest::assemble_window(stations, obs, ens, grouping, date,
                                                static_cast<int>(config.window), config.min_frac);
  const StationPanel& panel = assembly.panel;
  if (!assembly.excluded.empty()) {
    std::string list;
    for (const auto& id : assembly.excluded) list += (list.empty() ? "" : " ") + id;
    warn(format_date(date) + ": excluded stations with too few complete days: " + list);
  }
  if (auto msg = ingest::leverage_warning(panel.stations())) warn(*msg);

  const auto stats = emos::window_statistics(panel);
  const double b_star = emos::pooled_slope(panel, stats);
  const auto xi2 = emos::local_uncertainty(panel, stats, b_star);

  ModelFile model;
  model.date = date;
  model.config = config;
  model.emos = emos::fit_adaptive_emos(panel, stats, xi2, grouping, b_star, fit_config);

  std::vector<std::string> ids;
  std::vector<Location> locs;
  for (const auto& st : panel.stations()) {
    ids.push_back(st.id);
    locs.push_back(st.loc);
  }
  const auto drift = geostat::DriftBasis::altitude_spline(config.knots_km);
  model.field_y = geostat::fit_field(FieldKind::Y, ids, locs, stats.y_bar, drift, config.k_nn);
  model.field_z = geostat::fit_field(FieldKind::Z, ids, locs,
                                     geostat::log_variance_values(xi2, ids), drift, config.k_nn);

  for (std::size_t s = 0; s < panel.station_count(); ++s) {
    StationState st;
    st.id = ids[s];
    st.loc = locs[s];
    st.y_bar = stats.y_bar[s];
    st.f_bar = stats.f_bar[s];
    st.f_bar_star = stats.f_bar_star[s];
    st.xi2 = xi2[s];
    st.zeta_y_raw = model.field_y.zeta_raw[s];
    st.zeta_z_raw = model.field_z.zeta_raw[s];
    st.n_days_used = stats.n_days[s];
    model.station_states.push_back(std::move(st));
  }
  return model;
}

std::optional<std::vector<double>> training_means(const ModelFile& model,
                                                  const ingest::EnsembleTable& ens,
                                                  const std::string& site_id) {
  const std::size_t g = model.emos.grouping.group_count();
  std::vector<double> sum(g, 0.0);
  std::size_t count = 0;
  for (const Date day : ingest::window_days(model.date, static_cast<int>(model.config.window))) {
    const auto f = ens.group_means(site_id, day, model.emos.grouping);
    if (!f) continue;
    for (std::size_t k = 0; k < g; ++k) sum[k] += (*f)[k];
    ++count;
  }
  if (count == 0) return std::nullopt;
  for (double& v : sum) v /= static_cast<double>(count);
  return sum;
}

namespace {

std::optional<std::vector<double>> todays_forecasts(const ingest::EnsembleTable& ens,
                                                    const MemberGrouping& grouping,
                                                    const std::string& id, Date date) {
  for (const auto& m : ens.members()) {
    if (!grouping.group_of(m)) {
      throw InputError("member '" + m + "' of today's ensemble has no group in the model");
    }
  }
  auto f = ens.group_means(id, date, grouping);
  if (!f) warn(id + ": no complete ensemble on " + format_date(date) + "; skipped");
  return f;
}

}  // namespace

std::vector<SitePrediction> predict_sites(const ModelFile& model, const ingest::EnsembleTable& ens,
                                          const std::vector<GridSite>& sites, Date date) {
  const geostat::FittedField field_y(model.field_y);
  const geostat::FittedField field_z(model.field_z);
  std::vector<SitePrediction> out;
  for (const auto& site : sites) {
    const auto today = todays_forecasts(ens, model.emos.grouping, site.id, date);
    if (!today) continue;
    const auto means = training_means(model, ens, site.id);
    if (!means) {
      warn(site.id + ": no forecasts in the training window; skipped");
      continue;
    }
    SitePrediction p;
    p.forecast = emos::predict_at_site(model.emos, field_y, field_z, site, *today, *means, date,
                                       model.config.propagate_z_variance);
    const auto y = field_y.predict(site.loc);
    p.y_bar = y.value;
    p.y_bar_sd = std::sqrt(y.variance);
    p.xi = std::sqrt(std::exp(field_z.predict(site.loc).value));
    out.push_back(std::move(p));
  }
  return out;
}

std::vector<GaussianForecast> predict_stations(const ModelFile& model,
                                               const ingest::EnsembleTable& ens, Date date) {
  std::vector<GaussianForecast> out;
  for (const auto& st : model.station_states) {
    const auto today = todays_forecasts(ens, model.emos.grouping, st.id, date);
    if (today) out.push_back(emos::predict_at_station(model.emos, st, *today, date));
  }
  return out;
}

std::vector<GaussianForecast> predict_baseline_sites(const ModelFile& model,
                                                     const ingest::EnsembleTable& ens,
                                                     const std::vector<std::string>& site_ids,
                                                     Date date) {
  if (!model.emos.baseline) throw ValidationError("model file has no baseline parameters");
  std::vector<GaussianForecast> out;
  for (const auto& id : site_ids) {
    const auto today = todays_forecasts(ens, model.emos.grouping, id, date);
    if (today) out.push_back(emos::predict_baseline(*model.emos.baseline, id, *today, date));
  }
  return out;
}

std::string header_comment(const RunConfig& config) {
  return std::string("# adaptive-emos v") + AEMOS_VERSION + " config-hash=" + config_hash(config);
}

void write_predictions(const std::string& path, const std::string& header,
                       const std::vector<GaussianForecast>& rows) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write " + path);
  out << header << "\nsite_id,date,mu_c,sd_c,interp_sd_c,total_sd_c\n";
  for (const auto& f : rows) {
    out << f.site_id << ',' << format_date(f.date) << ',' << format_number(f.mu) << ','
        << format_number(std::sqrt(f.var)) << ',' << format_number(std::sqrt(f.interp_var)) << ','
        << format_number(std::sqrt(f.total_var())) << '\n';
  }
  if (!out) throw InputError("failed writing " + path);
}

std::vector<GaussianForecast> read_predictions(const std::string& path) {
  ingest::detail::CsvReader reader(path,
                                   {"site_id", "date", "mu_c", "sd_c", "interp_sd_c", "total_sd_c"});
  std::vector<GaussianForecast> out;
  std::vector<std::string_view> f;
  while (reader.next(f)) {
    GaussianForecast g;
    g.site_id = std::string(f[0]);
    try {
      g.date = parse_date(f[1]);
    } catch (const DomainError& e) {
      reader.fail(e.what());
    }
    g.mu = reader.number(f[2], "mu_c");
    const double sd = reader.number(f[3], "sd_c");
    const double isd = reader.number(f[4], "interp_sd_c");
    if (sd <= 0.0 || isd < 0.0) reader.fail("standard deviations must be positive");
    g.var = sd * sd;
    g.interp_var = isd * isd;
    out.push_back(std::move(g));
  }
  return out;
}

namespace {

struct CommonOptions {
  std::string obs, ens, stations, grid, grouping, model, out;
  std::string date, date_range;
  int window = 30;
  double min_frac = 2.0 / 3.0;
  std::size_t knn = 25;
  std::vector<double> levels{0.81, 0.905};
  std::vector<double> knots{0.0, 1.0, 1.5};
  bool propagate_z = false;
};

RunConfig run_config(const CommonOptions& o) {
  if (o.window < 2) throw ValidationError("--window must be at least 2");
  if (!(o.min_frac > 0.0 && o.min_frac <= 1.0)) throw ValidationError("--min-frac must be in (0, 1]");
  if (o.knn < 1) throw ValidationError("--knn must be positive");
  for (double l : o.levels) {
    if (!(l > 0.0 && l < 1.0)) throw ValidationError("--levels must lie in (0, 1)");
  }
  if (o.knots.size() < 2 || !std::is_sorted(o.knots.begin(), o.knots.end()) ||
      std::adjacent_find(o.knots.begin(), o.knots.end()) != o.knots.end()) {
    throw ValidationError("--knots must hold at least two increasing values");
  }
  RunConfig c;
  c.window = static_cast<std::size_t>(o.window);
  c.min_frac = o.min_frac;
  c.k_nn = o.knn;
  c.knots_km = o.knots;
  c.levels = o.levels;
  c.propagate_z_variance = o.propagate_z;
  return c;
}

std::size_t thread_limit(std::size_t tasks) {
  std::size_t limit = std::max(1u, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("ADAPTIVE_EMOS_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end == env || *end != '\0' || v < 1) {
      throw ValidationError("ADAPTIVE_EMOS_THREADS must be a positive integer");
    }
    limit = static_cast<std::size_t>(v);
  }
  return std::max<std::size_t>(1, std::min(limit, tasks));
}

std::vector<Date> parse_range(const std::string& text) {
  const auto colon = text.find(':');
  if (colon == std::string::npos) throw ValidationError("--date-range expects FIRST:LAST");
  const Date first = parse_date(text.substr(0, colon));
  const Date last = parse_date(text.substr(colon + 1));
  if (last < first) throw ValidationError("--date-range: LAST precedes FIRST");
  std::vector<Date> out;
  for (Date d = first; d <= last; d += std::chrono::days(1)) out.push_back(d);
  return out;
}

void cmd_fit(const CommonOptions& o) {
  const RunConfig config = run_config(o);
  const auto stations = ingest::load_stations(o.stations);
  const auto obs = ingest::load_observations(o.obs);
  const auto ens = ingest::load_ensemble(o.ens);
  std::optional<MemberGrouping> file_grouping;
  if (!o.grouping.empty()) file_grouping = ingest::load_grouping(o.grouping);
  const MemberGrouping grouping = ingest::resolve_grouping(ens, file_grouping);

  if (o.date_range.empty()) {
    if (o.date.empty()) throw ValidationError("fit needs --date or --date-range");
    write_model(o.model, fit_date(stations, obs, ens, grouping, parse_date(o.date), config));
    return;
  }

  const auto dates = parse_range(o.date_range);
  fs::create_directories(o.model);
  std::vector<std::exception_ptr> errors(dates.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i; (i = next.fetch_add(1)) < dates.size();) {
      try {
        const auto model = fit_date(stations, obs, ens, grouping, dates[i], config);
        write_model(fs::path(o.model) / ("model-" + format_date(dates[i]) + ".json"), model);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  std::vector<std::thread> pool;
  const std::size_t n_threads = thread_limit(dates.size());
  for (std::size_t t = 0; t < n_threads; ++t) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

void cmd_predict(const CommonOptions& o, const std::string& fields_out,
                 const std::string& baseline_out) {
  const ModelFile model = read_model(o.model);
  const auto ens = ingest::load_ensemble(o.ens);
  const Date date = o.date.empty() ? model.date : parse_date(o.date);
  const std::string header = header_comment(model.config);

  std::vector<GaussianForecast> rows;
  std::vector<std::string> ids;
  if (!o.grid.empty()) {
    const auto sites = ingest::load_grid(o.grid);
    const auto preds = predict_sites(model, ens, sites, date);
    for (const auto& p : preds) rows.push_back(p.forecast);
    for (const auto& s : sites) ids.push_back(s.id);
    if (!fields_out.empty()) {
      std::ofstream out(fields_out, std::ios::binary);
      if (!out) throw InputError("cannot write " + fields_out);
      out << header << "\nsite_id,x_km,y_km,y_bar_c,y_bar_sd_c,xi_c\n";
      for (std::size_t i = 0, j = 0; i < preds.size(); ++i) {
        while (sites[j].id != preds[i].forecast.site_id) ++j;
        out << preds[i].forecast.site_id << ',' << format_number(sites[j].loc.x_km) << ','
            << format_number(sites[j].loc.y_km) << ',' << format_number(preds[i].y_bar) << ','
            << format_number(preds[i].y_bar_sd) << ',' << format_number(preds[i].xi) << '\n';
      }
    }
  } else {
    rows = predict_stations(model, ens, date);
    for (const auto& s : model.station_states) ids.push_back(s.id);
    if (!fields_out.empty()) throw ValidationError("--fields-out needs --grid");
  }
  write_predictions(o.out, header, rows);
  if (!baseline_out.empty()) {
    write_predictions(baseline_out, header, predict_baseline_sites(model, ens, ids, date));
  }
}

void cmd_verify(const CommonOptions& o, const std::vector<std::string>& preds,
                const std::string& bias_out) {
  RunConfig config = run_config(o);
  const auto obs = ingest::load_observations(o.obs);
  const std::string header = header_comment(config);

  std::vector<verify::ScoreRow> rows;
  std::set<verify::PairKey> first_keys;
  std::vector<GaussianForecast> first;
  for (std::size_t i = 0; i < preds.size(); ++i) {
    std::string name = fs::path(preds[i]).stem().string();
    std::string path = preds[i];
    if (const auto eq = preds[i].find('='); eq != std::string::npos) {
      name = preds[i].substr(0, eq);
      path = preds[i].substr(eq + 1);
    }
    const auto fc = read_predictions(path);
    rows.push_back(verify::score_gaussian(name, fc, obs, config.levels));
    if (i == 0) {
      first = fc;
      for (const auto& f : fc) {
        if (obs.get(f.site_id, f.date)) first_keys.insert({f.site_id, f.date});
      }
    }
  }
  if (!o.ens.empty()) {
    const auto ens = ingest::load_ensemble(o.ens);
    const std::vector<int> drops{1, 0};
    if (config.levels.size() != drops.size()) {
      throw ValidationError("ensemble scoring needs exactly two --levels");
    }
    rows.push_back(verify::score_ensemble("ensemble", ens, obs, drops,
                                          preds.empty() ? nullptr : &first_keys));
  }
  if (rows.empty()) throw ValidationError("verify needs --pred or --ens");
  verify::write_scores(o.out, header, rows, config.levels);

  if (!bias_out.empty()) {
    if (first.empty()) throw ValidationError("--bias-out needs --pred");
    std::map<std::string, Location> where;
    if (!o.stations.empty()) {
      for (const auto& s : ingest::load_stations(o.stations)) where[s.id] = s.loc;
    }
    if (!o.grid.empty()) {
      for (const auto& s : ingest::load_grid(o.grid)) where[s.id] = s.loc;
    }
    verify::write_bias(bias_out, header, verify::station_bias(first, obs), where);
  }
}

void cmd_simulate(const std::string& config_path, const std::string& out_dir,
                  std::optional<std::uint64_t> seed) {
  simulate::SimConfig config;
  if (!config_path.empty()) {
    std::ifstream in(config_path, std::ios::binary);
    if (!in) throw InputError("cannot open " + config_path);
    std::ostringstream ss;
    ss << in.rdbuf();
    config = simulate::config_from_json(ss.str());
  }
  if (seed) config.seed = *seed;
  const auto data = simulate::simulate_dataset(config);
  const std::string header = std::string("# adaptive-emos v") + AEMOS_VERSION +
                             " config-hash=" + [&] {
                               char buf[17];
                               std::snprintf(buf, sizeof buf, "%016llx",
                                             static_cast<unsigned long long>(
                                                 fnv1a(simulate::config_to_json(config))));
                               return std::string(buf);
                             }();
  simulate::write_dataset(out_dir, data, header);
}

const char* category_name(ErrorCategory c) {
  switch (c) {
    case ErrorCategory::Input:
      return "input";
    case ErrorCategory::Numeric:
      return "numeric";
    default:
      return "internal";
  }
}

int exit_code(ErrorCategory c) {
  switch (c) {
    case ErrorCategory::Input:
      return 2;
    case ErrorCategory::Numeric:
      return 3;
    default:
      return 4;
  }
}

}  // namespace

int run(int argc, char** argv) {
  CLI::App app{"Spatially adaptive EMOS post-processing of ensemble temperature forecasts"};
  app.set_version_flag("--version", std::string("adaptive-emos ") + AEMOS_VERSION);
  app.require_subcommand(1);

  CommonOptions o;
  auto add_config = [&o](CLI::App* cmd) {
    cmd->add_option("--window", o.window, "training window length in days")->capture_default_str();
    cmd->add_option("--min-frac", o.min_frac, "minimum fraction of complete days per station")
        ->capture_default_str();
    cmd->add_option("--knn", o.knn, "neighbours for the nugget bandwidth")->capture_default_str();
    cmd->add_option("--knots", o.knots, "altitude spline knots in km")->delimiter(',');
    cmd->add_option("--levels", o.levels, "central interval levels")->delimiter(',');
    cmd->add_flag("--propagate-z-variance", o.propagate_z,
                  "use the lognormal mean of the interpolated variance field");
  };

  auto* fit = app.add_subcommand("fit", "fit the model for one date or a date range");
  fit->add_option("--obs", o.obs, "observations CSV")->required();
  fit->add_option("--ens", o.ens, "ensemble CSV")->required();
  fit->add_option("--stations", o.stations, "stations CSV")->required();
  fit->add_option("--grouping", o.grouping, "member grouping CSV");
  auto* date_opt = fit->add_option("--date", o.date, "forecast date YYYY-MM-DD");
  fit->add_option("--date-range", o.date_range, "FIRST:LAST forecast dates")->excludes(date_opt);
  fit->add_option("--model", o.model, "model file, or directory with --date-range")->required();
  add_config(fit);

  std::string fields_out, baseline_out;
  auto* predict = app.add_subcommand("predict", "predictive distributions for one date");
  predict->add_option("--model", o.model, "model file")->required();
  predict->add_option("--ens", o.ens, "ensemble CSV")->required();
  predict->add_option("--grid", o.grid, "prediction sites CSV (default: training stations)");
  predict->add_option("--date", o.date, "forecast date (default: the model date)");
  predict->add_option("--out", o.out, "predictions CSV")->required();
  predict->add_option("--fields-out", fields_out, "interpolated fields CSV");
  predict->add_option("--baseline-out", baseline_out, "plain NGR predictions CSV");

  std::vector<std::string> preds;
  std::string bias_out;
  auto* ver = app.add_subcommand("verify", "score predictions against observations");
  ver->add_option("--pred", preds, "predictions CSV, optionally NAME=PATH (repeatable)");
  ver->add_option("--obs", o.obs, "observations CSV")->required();
  ver->add_option("--ens", o.ens, "raw ensemble CSV for an ensemble row");
  ver->add_option("--stations", o.stations, "stations CSV for bias coordinates");
  ver->add_option("--grid", o.grid, "sites CSV for bias coordinates");
  ver->add_option("--out", o.out, "scores CSV")->required();
  ver->add_option("--bias-out", bias_out, "per-site bias CSV of the first prediction file");
  ver->add_option("--levels", o.levels, "central interval levels")->delimiter(',');

  std::string sim_config;
  std::optional<std::uint64_t> seed;
  auto* sim = app.add_subcommand("simulate", "write a synthetic dataset");
  sim->add_option("--config", sim_config, "simulation config JSON");
  sim->add_option("--seed", seed, "override the config seed");
  sim->add_option("--out", o.out, "output directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*fit) cmd_fit(o);
    if (*predict) cmd_predict(o, fields_out, baseline_out);
    if (*ver) cmd_verify(o, preds, bias_out);
    if (*sim) cmd_simulate(sim_config, o.out, seed);
    return 0;
  } catch (const Error& e) {
    std::cerr << "error[" << category_name(e.category()) << "]: " << e.what() << '\n';
    return exit_code(e.category());
  } catch (const std::exception& e) {
    std::cerr << "error[internal]: " << e.what() << '\n';
    return 4;
  }
}

}  // namespace aemos::cli
