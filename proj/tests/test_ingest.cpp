/*
 * (C) Copyright 2026 The adaptive-emos authors.
 *
 * This software is licensed under the terms of the Apache Licence Version 2.0
 * which can be obtained at http://www.apache.org/licenses/LICENSE-2.0.
 */

#include <gtest/gtest.h>

#include <algorithm>
#include <sstream>

#include "aemos/error.hpp"
#include "aemos/ingest.hpp"
#include "oracles.hpp"

namespace aemos {

using testing::scratch_dir;
using testing::write_text;

namespace {

const Date kEnd = parse_date("2024-02-01");

// Writes a complete dataset for `stations` over the 30 days before kEnd.
// Observation = 10 + station index, member j of day t = t + j.
struct Fixture {
  std::filesystem::path dir;
  std::vector<Station> stations;
  ingest::ObservationTable obs;
  ingest::EnsembleTable ens;
};

Fixture complete_fixture(std::size_t n_stations, std::size_t n_members) {
  Fixture f;
  f.dir = scratch_dir("ingest-complete");
  for (std::size_t s = 0; s < n_stations; ++s) {
    f.stations.push_back({"S" + std::to_string(s), {double(s), 0.0, 100.0}});
  }
  for (const Date day : ingest::window_days(kEnd, 30)) {
    const double t = static_cast<double>((day - ingest::window_days(kEnd, 30).front()).count());
    for (std::size_t s = 0; s < n_stations; ++s) {
      f.obs.add(f.stations[s].id, day, 10.0 + double(s));
      for (std::size_t j = 0; j < n_members; ++j) {
        f.ens.add(f.stations[s].id, day, "m" + std::to_string(j), t + double(j));
      }
    }
  }
  return f;
}

}  // namespace

TEST(LoadStations, ParsesRow) {
  const auto dir = scratch_dir("stations-ok");
  write_text(dir / "s.csv", "station_id,x_km,y_km,altitude_m\nS1,0,0,10\n");
  const auto st = ingest::load_stations(dir / "s.csv");
  ASSERT_EQ(st.size(), 1u);
  EXPECT_EQ(st[0].id, "S1");
  EXPECT_EQ(st[0].loc.x_km, 0.0);
  EXPECT_EQ(st[0].loc.altitude_m, 10.0);
}

TEST(LoadStations, DuplicateIdRejected) {
  const auto dir = scratch_dir("stations-dup");
  write_text(dir / "s.csv", "station_id,x_km,y_km,altitude_m\nS1,0,0,10\nS1,1,1,10\n");
  EXPECT_THROW(ingest::load_stations(dir / "s.csv"), ValidationError);
}

TEST(LoadStations, DuplicateCoordinatesRejected) {
  const auto dir = scratch_dir("stations-dupxy");
  write_text(dir / "s.csv", "station_id,x_km,y_km,altitude_m\nS1,0,0,10\nS2,0,0,20\n");
  EXPECT_THROW(ingest::load_stations(dir / "s.csv"), ValidationError);
}

TEST(LoadStations, NonNumericFieldReportsLine) {
  const auto dir = scratch_dir("stations-bad");
  write_text(dir / "s.csv", "station_id,x_km,y_km,altitude_m\nS1,0,0,abc\n");
  try {
    ingest::load_stations(dir / "s.csv");
    FAIL() << "expected a parse error";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 2u);
  }
}

TEST(LoadStations, AltitudeBounds) {
  const auto dir = scratch_dir("stations-alt");
  write_text(dir / "s.csv", "station_id,x_km,y_km,altitude_m\nS1,0,0,9001\n");
  EXPECT_THROW(ingest::load_stations(dir / "s.csv"), InputError);
}

TEST(LoadStations, WrongHeaderAndMissingFile) {
  const auto dir = scratch_dir("stations-header");
  write_text(dir / "s.csv", "id,x,y,alt\nS1,0,0,10\n");
  EXPECT_THROW(ingest::load_stations(dir / "s.csv"), ParseError);
  EXPECT_THROW(ingest::load_stations(dir / "missing.csv"), InputError);
}

TEST(LoadGrid, SingleRowEmptyAndBelowSeaLevel) {
  const auto dir = scratch_dir("grid");
  write_text(dir / "one.csv", "# comment\nsite_id,x_km,y_km,altitude_m\nG1,1.5,2.5,-5\n");
  const auto one = ingest::load_grid(dir / "one.csv");
  ASSERT_EQ(one.size(), 1u);
  EXPECT_EQ(one[0].loc.altitude_m, -5.0);
  write_text(dir / "empty.csv", "site_id,x_km,y_km,altitude_m\n");
  EXPECT_TRUE(ingest::load_grid(dir / "empty.csv").empty());
  write_text(dir / "dupxy.csv", "site_id,x_km,y_km,altitude_m\nG1,0,0,1\nG2,0,0,1\n");
  EXPECT_EQ(ingest::load_grid(dir / "dupxy.csv").size(), 2u);
}

TEST(LoadObservations, MissingMarkersAndDuplicates) {
  const auto dir = scratch_dir("obs");
  write_text(dir / "o.csv",
             "station_id,date,value_c\nS1,2024-01-01,1.5\nS1,2024-01-02,NA\nS1,2024-01-03,\n");
  const auto obs = ingest::load_observations(dir / "o.csv");
  EXPECT_EQ(*obs.get("S1", parse_date("2024-01-01")), 1.5);
  EXPECT_FALSE(obs.get("S1", parse_date("2024-01-02")).has_value());
  EXPECT_FALSE(obs.get("S2", parse_date("2024-01-01")).has_value());
  write_text(dir / "dup.csv", "station_id,date,value_c\nS1,2024-01-01,1\nS1,2024-01-01,2\n");
  EXPECT_THROW(ingest::load_observations(dir / "dup.csv"), ValidationError);
  write_text(dir / "baddate.csv", "station_id,date,value_c\nS1,2024-13-01,1\n");
  EXPECT_THROW(ingest::load_observations(dir / "baddate.csv"), InputError);
}

TEST(LoadEnsemble, DuplicateRowsRejected) {
  const auto dir = scratch_dir("ens");
  write_text(dir / "e.csv",
             "station_id,date,member_id,value_c\nS1,2024-01-01,m1,1\nS1,2024-01-01,m1,NA\n");
  EXPECT_THROW(ingest::load_ensemble(dir / "e.csv"), ValidationError);
}

TEST(Grouping, FileMustCoverMembers) {
  const auto dir = scratch_dir("grouping");
  write_text(dir / "g.csv", "member_id,group\nm1,A\n");
  ingest::EnsembleTable ens;
  ens.add("S1", kEnd, "m1", 1.0);
  ens.add("S1", kEnd, "m2", 2.0);
  const auto g = ingest::load_grouping(dir / "g.csv");
  EXPECT_THROW(ingest::resolve_grouping(ens, g), ValidationError);
  const auto identity = ingest::resolve_grouping(ens, std::nullopt);
  EXPECT_EQ(identity.group_count(), 2u);
}

TEST(WindowDays, EndsDayBeforeForecast) {
  const auto days = ingest::window_days(kEnd, 30);
  ASSERT_EQ(days.size(), 30u);
  EXPECT_EQ(format_date(days.back()), "2024-01-31");
  EXPECT_EQ(format_date(days.front()), "2024-01-02");
  EXPECT_THROW(ingest::window_days(kEnd, 1), DomainError);
}

TEST(AssembleWindow, CompleteDataKeepsEverything) {
  auto f = complete_fixture(3, 2);
  const auto grouping = MemberGrouping::identity(f.ens.members());
  const auto w = ingest::assemble_window(f.stations, f.obs, f.ens, grouping, kEnd, 30, 2.0 / 3.0);
  EXPECT_EQ(w.panel.station_count(), 3u);
  EXPECT_EQ(w.panel.day_count(), 30u);
  EXPECT_TRUE(w.excluded.empty());
  for (std::size_t s = 0; s < 3; ++s) EXPECT_EQ(w.panel.complete_days(s), 30u);
}

TEST(AssembleWindow, SparseStationExcluded) {
  auto f = complete_fixture(3, 2);
  // Keep only 10 of 30 observations at S1.
  ingest::ObservationTable obs;
  for (const auto& [id, rows] : f.obs.rows()) {
    std::size_t i = 0;
    for (const auto& [day, v] : rows) {
      if (id != "S1" || i++ < 10) obs.add(id, day, v);
    }
  }
  const auto grouping = MemberGrouping::identity(f.ens.members());
  const auto w = ingest::assemble_window(f.stations, obs, f.ens, grouping, kEnd, 30, 2.0 / 3.0);
  EXPECT_EQ(w.panel.station_count(), 2u);
  ASSERT_EQ(w.excluded.size(), 1u);
  EXPECT_EQ(w.excluded[0], "S1");
}

TEST(AssembleWindow, MissingMemberDropsDay) {
  auto f = complete_fixture(2, 3);
  ingest::EnsembleTable ens;
  const Date hole = ingest::window_days(kEnd, 30)[4];
  for (const auto& [id, rows] : f.ens.rows()) {
    for (const auto& [day, values] : rows) {
      for (std::size_t j = 0; j < values.size(); ++j) {
        const bool drop = id == "S0" && day == hole && j == 1;
        ens.add(id, day, f.ens.members()[j], drop ? std::nullopt : values[j]);
      }
    }
  }
  const auto grouping = MemberGrouping::identity(f.ens.members());
  const auto w = ingest::assemble_window(f.stations, f.obs, ens, grouping, kEnd, 30, 0.5);
  EXPECT_EQ(w.panel.complete_days(0), 29u);
  EXPECT_FALSE(w.panel.complete(0, 4));
  EXPECT_EQ(w.panel.complete_days(1), 30u);
}

TEST(AssembleWindow, GroupMeansMatchHandAverages) {
  // 2 stations, 20 members in 4 groups of 5; member j on station s is
  // s + j * j / 10 so group k averages (s + sum_{j in k} j^2 / 10) / 5.
  std::vector<Station> stations{{"A", {0, 0, 0}}, {"B", {1, 0, 0}}};
  ingest::ObservationTable obs;
  ingest::EnsembleTable ens;
  std::vector<std::pair<std::string, std::string>> assignment;
  for (int j = 0; j < 20; ++j) assignment.emplace_back("m" + std::to_string(j), "G" + std::to_string(j / 5));
  for (const Date day : ingest::window_days(kEnd, 2)) {
    for (int s = 0; s < 2; ++s) {
      obs.add(stations[s].id, day, 0.0);
      for (int j = 0; j < 20; ++j) ens.add(stations[s].id, day, "m" + std::to_string(j), s + j * j / 10.0);
    }
  }
  const MemberGrouping grouping(assignment);
  const auto w = ingest::assemble_window(stations, obs, ens, grouping, kEnd, 2, 1.0);
  ASSERT_EQ(w.panel.group_count(), 4u);
  // Hand sums of j^2 for j = 0..4, 5..9, 10..14, 15..19: 30, 255, 730, 1455.
  const double sums[4] = {30.0, 255.0, 730.0, 1455.0};
  for (std::size_t s = 0; s < 2; ++s) {
    for (std::size_t k = 0; k < 4; ++k) {
      EXPECT_NEAR(w.panel.fc(s, 0, k), double(s) + sums[k] / 50.0, 1e-12);
    }
  }
}

TEST(AssembleWindow, FewerThanTwoStations) {
  auto f = complete_fixture(1, 2);
  const auto grouping = MemberGrouping::identity(f.ens.members());
  EXPECT_THROW(ingest::assemble_window(f.stations, f.obs, f.ens, grouping, kEnd, 30, 0.5),
               DatasetError);
}

TEST(AssembleWindow, IndependentOfRowOrder) {
  auto f = complete_fixture(4, 3);
  auto reversed = f.stations;
  std::reverse(reversed.begin(), reversed.end());
  const auto grouping = MemberGrouping::identity(f.ens.members());
  const auto a = ingest::assemble_window(f.stations, f.obs, f.ens, grouping, kEnd, 30, 0.5);
  const auto b = ingest::assemble_window(reversed, f.obs, f.ens, grouping, kEnd, 30, 0.5);
  ASSERT_EQ(a.panel.station_count(), b.panel.station_count());
  for (std::size_t s = 0; s < a.panel.station_count(); ++s) {
    EXPECT_EQ(a.panel.stations()[s].id, b.panel.stations()[s].id);
    for (std::size_t d = 0; d < 30; ++d) {
      EXPECT_EQ(a.panel.obs(s, d), b.panel.obs(s, d));
      for (std::size_t k = 0; k < 3; ++k) EXPECT_EQ(a.panel.fc(s, d, k), b.panel.fc(s, d, k));
    }
  }
}

TEST(GroupMeans, IndependentOfMemberLabels) {
  ingest::EnsembleTable a, b;
  const double vals[5] = {0.1, 1e8, -1e8, 0.3, 0.7};
  for (int j = 0; j < 5; ++j) {
    a.add("S", kEnd, "m" + std::to_string(j), vals[j]);
    b.add("S", kEnd, "m" + std::to_string(j), vals[4 - j]);
  }
  const auto ga = MemberGrouping({{"m0", "g"}, {"m1", "g"}, {"m2", "g"}, {"m3", "g"}, {"m4", "g"}});
  EXPECT_EQ((*a.group_means("S", kEnd, ga))[0], (*b.group_means("S", kEnd, ga))[0]);
}

TEST(LeverageWarning, FiresOnIsolatedSummit) {
  std::vector<Station> st{{"A", {0, 0, 100}}, {"B", {1, 0, 900}}, {"C", {2, 0, 2000}}};
  EXPECT_TRUE(ingest::leverage_warning(st).has_value());
  st[2].loc.altitude_m = 1300;
  EXPECT_FALSE(ingest::leverage_warning(st).has_value());
}

}  // namespace aemos
