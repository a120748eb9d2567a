// Copyright 2026 The cogroute Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


#include <gtest/gtest.h>

#include <algorithm>
#include <cinttypes>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "cogroute/errors.hpp"
#include "cogroute/random.hpp"
#include "cogroute/runner.hpp"
#include "oracles.hpp"

namespace cogroute {
namespace {

namespace fs = std::filesystem;

std::string out_dir(const std::string& name) {
  const fs::path p = fs::path(::testing::TempDir()) / ("cogroute_runner_" + name);
  fs::remove_all(p);
  return p.string();
}

std::string slurp(const fs::path& p) { return read_text_file(p.string()); }

std::vector<std::string> lines(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  for (std::string l; std::getline(in, l);) out.push_back(l);
  return out;
}

ExperimentSpec spec_for(Command c, const std::string& config, const std::string& dir) {
  ExperimentSpec s;
  s.command = c;
  s.config_path = oracle::config_path(config);
  s.out_dir = dir;
  return s;
}

int run_quiet(const ExperimentSpec& s, std::string* log = nullptr) {
  std::ostringstream os;
  const int rc = run(s, os);
  if (log) *log = os.str();
  return rc;
}

TEST(Commands, NamesRoundTrip) {
  for (Command c : {Command::kSolve, Command::kRoute, Command::kCompare, Command::kTraceFp, Command::kSweep})
    EXPECT_EQ(parse_command(command_name(c)), c);
  EXPECT_FALSE(parse_command("plot").has_value());
}

TEST(Run, SolveFig3WritesCleanAuditAndManifest) {
  const std::string dir = out_dir("solve");
  ASSERT_EQ(run_quiet(spec_for(Command::kSolve, "fig3.json", dir)), 0);
  const auto audit = lines(slurp(fs::path(dir) / "audit.csv"));
  ASSERT_EQ(audit.size(), 1u + 12u);
  for (std::size_t i = 1; i < audit.size(); ++i) {
    // state,level,players,iterations,converged,nash_gap
    std::vector<std::string> f;
    std::stringstream ss(audit[i]);
    for (std::string x; std::getline(ss, x, ',');) f.push_back(x);
    EXPECT_EQ(f.at(4), "1") << audit[i];
  }
  const auto manifest = lines(slurp(fs::path(dir) / "manifest.txt"));
  EXPECT_EQ(manifest.at(0), std::string("version ") + std::string(kVersion));
  EXPECT_EQ(manifest.at(1), "command solve");
  EXPECT_EQ(manifest.at(3), "seed 7");
  std::set<std::string> listed;
  for (const auto& l : manifest) {
    if (l.rfind("file ", 0) != 0) continue;
    char name[64];
    std::size_t size = 0;
    char hash[32];
    ASSERT_EQ(std::sscanf(l.c_str(), "file %63s %zu %31s", name, &size, hash), 3);
    const std::string content = slurp(fs::path(dir) / name);
    EXPECT_EQ(content.size(), size);
    char expect[24];
    std::snprintf(expect, sizeof expect, "%016" PRIx64, fnv1a64(content.data(), content.size()));
    EXPECT_STREQ(hash, expect) << name;
    listed.insert(name);
  }
  EXPECT_EQ(listed, (std::set<std::string>{"axis.csv", "strategies.csv", "values.csv", "audit.csv"}));
}

TEST(Run, OutputsAreByteIdenticalAcrossRunsAndThreads) {
  for (Command c : {Command::kSolve, Command::kRoute}) {
    const std::string a = out_dir("det_a"), b = out_dir("det_b");
    ExperimentSpec s = spec_for(c, "fig3.json", a);
    ASSERT_EQ(run_quiet(s), 0);
    s.out_dir = b;
    s.threads = 4;
    ASSERT_EQ(run_quiet(s), 0);
    for (const auto& entry : fs::directory_iterator(a))
      EXPECT_EQ(slurp(entry.path()), slurp(fs::path(b) / entry.path().filename()))
          << entry.path().filename();
  }
}

TEST(Run, SeedOverrideIsRecorded) {
  const std::string dir = out_dir("seed");
  ExperimentSpec s = spec_for(Command::kSolve, "fig3.json", dir);
  s.seed = 99;
  ASSERT_EQ(run_quiet(s), 0);
  EXPECT_EQ(lines(slurp(fs::path(dir) / "manifest.txt")).at(3), "seed 99");
}

TEST(Run, CompareWritesThreeAlgorithmsByTenBins) {
  const std::string dir = out_dir("compare");
  ExperimentSpec s = spec_for(Command::kCompare, "dense.json", dir);
  s.seeds = 3;
  ASSERT_EQ(run_quiet(s), 0);
  for (const char* f : {"interference.csv", "delay.csv"}) {
    const auto l = lines(slurp(fs::path(dir) / f));
    ASSERT_EQ(l.size(), 31u) << f;
    EXPECT_EQ(l[0], "algorithm,bin_center_km,normalized_mean,normalized_median,n");
  }
  EXPECT_EQ(lines(slurp(fs::path(dir) / "routes.csv")).at(0), "seed,algorithm,source,hop_index,x,y");
  const auto manifest = lines(slurp(fs::path(dir) / "manifest.txt"));
  EXPECT_NE(std::find(manifest.begin(), manifest.end(), "seeds 3"), manifest.end());
}

TEST(Run, TraceFpForNodeFour) {
  const std::string dir = out_dir("trace");
  ExperimentSpec s = spec_for(Command::kTraceFp, "fig3.json", dir);
  s.node = 4;
  s.level = 1;
  ASSERT_EQ(run_quiet(s), 0);
  const auto l = lines(slurp(fs::path(dir) / "fp_trace.csv"));
  ASSERT_GT(l.size(), 4u);
  EXPECT_EQ(l[0], "iteration,player,action,empirical_frequency");
  EXPECT_EQ(l[1].rfind("1,4,", 0), 0u) << l[1];
}

TEST(Run, SweepCoversGrid) {
  const std::string dir = out_dir("sweep");
  ExperimentSpec s = spec_for(Command::kSweep, "fig3.json", dir);
  s.sweep_omega = {0.3, 0.7};
  s.sweep_beta = {0.5, 0.9};
  ASSERT_EQ(run_quiet(s), 0);
  const auto l = lines(slurp(fs::path(dir) / "sweep.csv"));
  ASSERT_EQ(l.size(), 5u);
  for (std::size_t i = 1; i < l.size(); ++i) EXPECT_NE(l[i].find(",ok,"), std::string::npos) << l[i];
}

TEST(Run, ErrorsNameTheProblemAndReturnNonzero) {
  std::string log;
  ExperimentSpec s = spec_for(Command::kSolve, "does_not_exist.json", out_dir("err"));
  EXPECT_EQ(run_quiet(s, &log), 1);
  EXPECT_EQ(log.rfind("error: ", 0), 0u);
  s = spec_for(Command::kSolve, "fig3.json", out_dir("err2"));
  s.omega = 1.5;
  EXPECT_EQ(run_quiet(s, &log), 1);
  EXPECT_NE(log.find("omega"), std::string::npos) << log;
  s = spec_for(Command::kSweep, "fig3.json", out_dir("err3"));
  s.sweep_relays = {10};
  EXPECT_EQ(run_quiet(s, &log), 1);
}

Scenario fig3() { return load_scenario(read_text_file(oracle::config_path("fig3.json"))); }

TEST(UpdateMap, NoOpKeepsHash) {
  const Scenario sc = fig3();
  EXPECT_EQ(scenario_hash(update_map(sc, sc.pus)), scenario_hash(sc));
}

TEST(UpdateMap, InvalidPuRejected) {
  const Scenario sc = fig3();
  auto pus = sc.pus;
  pus[0].footprint_radius = -1;
  EXPECT_THROW(update_map(sc, pus), ValidationError);
}

TEST(UpdateMap, AxisMovesIffFootprintBoundaryMoves) {
  Pipeline p(fig3());
  const MedialAxis before = p.axis();
  auto same = p.scenario().pus;
  p.update_map(same);
  EXPECT_EQ(p.axis().points, before.points);
  auto moved = same;
  moved[1].footprint_radius += 0.1;
  p.update_map(moved);
  EXPECT_TRUE(p.stale());
  EXPECT_NE(p.axis().points, before.points);
  auto back = moved;
  back[1].footprint_radius -= 0.1;
  p.update_map(back);
  EXPECT_EQ(p.axis().points, before.points);
}

TEST(UpdateMap, ThirdPuKeepsPartitionAndDropsCoveredRelay) {
  Pipeline p(fig3());
  const auto before = p.corridor().members;
  auto pus = p.scenario().pus;
  PrimaryUser third = pus[0];
  third.id = 3;
  // Covers relay 11 only.
  third.center = {-0.05, 0.62};
  third.footprint_radius = 0.08;
  pus.push_back(third);
  p.update_map(pus);
  EXPECT_TRUE(p.stale());
  EXPECT_EQ(p.states().num_states(), 8u);
  const auto after = p.corridor().members;
  EXPECT_TRUE(std::binary_search(before.begin(), before.end(), 11));
  EXPECT_FALSE(std::binary_search(after.begin(), after.end(), 11));
  for (NodeId id : after) EXPECT_FALSE(third.covers(p.scenario().position(id)));
  try {
    const HierarchyAssignment& h = p.hierarchy();
    for (const auto& s : h.per_state) {
      std::set<NodeId> seen;
      std::size_t total = 0;
      for (const auto& level : s.levels)
        for (NodeId id : level) {
          EXPECT_TRUE(seen.insert(id).second);
          ++total;
        }
      EXPECT_EQ(total, s.admitted_count());
    }
  } catch (const UnreachableError&) {
    // A blocked map is a legitimate outcome; the partition check needs a hierarchy.
  }
}

TEST(Pipeline, CachesUntilMapChanges) {
  Pipeline p(fig3());
  EXPECT_TRUE(p.stale());
  const GameSolution* first = &p.solution();
  EXPECT_FALSE(p.stale());
  EXPECT_EQ(&p.solution(), first);
  p.update_map(p.scenario().pus);
  EXPECT_TRUE(p.stale());
}

}  // namespace
}  // namespace cogroute
