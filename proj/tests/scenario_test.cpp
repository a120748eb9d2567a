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

#include <cmath>
#include <string>

#include "cogroute/errors.hpp"
#include "cogroute/scenario.hpp"
#include "oracles.hpp"

namespace cogroute {
namespace {

const char* kMinimal = R"({
  "region": {"x_min": -1, "x_max": 1, "y_min": -1, "y_max": 1},
  "primary_users": [{"id": 1, "center": [0, 0], "footprint_radius": 0.3,
                     "transition": [[0.8, 0.2], [0.4, 0.6]]}],
  "nodes": {"sources": [{"id": 1, "pos": [0, -0.8]}],
            "cpc_stations": [{"id": 2, "pos": [0, 0.8]}]},
  "queueing": {"default": {"arrival_rate": 0.1, "mean_service": 0.2,
                           "second_moment_service": 0.08}},
  "seed": 5
})";

std::string replace(std::string doc, const std::string& from, const std::string& to) {
  const auto at = doc.find(from);
  EXPECT_NE(at, std::string::npos) << from;
  return doc.replace(at, from.size(), to);
}

TEST(LoadScenario, MinimalDocumentHasTwoStates) {
  const Scenario sc = load_scenario(kMinimal);
  EXPECT_EQ(build_state_model(sc.pus).num_states(), 2u);
  EXPECT_EQ(sc.seed, 5u);
  EXPECT_EQ(sc.queue(1).mean_service, 0.2);
}

TEST(LoadScenario, RowSumBelowOneIsRejected) {
  const std::string bad = replace(kMinimal, "[0.4, 0.6]", "[0.3, 0.6]");
  try {
    load_scenario(bad);
    FAIL() << "expected ValidationError";
  } catch (const ValidationError& e) {
    EXPECT_NE(std::string(e.what()).find("row-stochastic violated"), std::string::npos) << e.what();
  }
}

TEST(LoadScenario, MalformedTextIsParseError) {
  EXPECT_THROW(load_scenario("{\"region\": "), ParseError);
}

TEST(LoadScenario, InvariantViolationsAreNamed) {
  EXPECT_THROW(load_scenario(replace(kMinimal, "\"seed\": 5", "\"game\": {\"beta\": 1.0}")),
               ValidationError);
  EXPECT_THROW(load_scenario(replace(kMinimal, "\"seed\": 5", "\"game\": {\"omega\": 0}")),
               ValidationError);
  EXPECT_THROW(load_scenario(replace(kMinimal, "\"second_moment_service\": 0.08",
                                     "\"second_moment_service\": 0.03")),
               ValidationError);
  EXPECT_THROW(load_scenario(replace(kMinimal, "[0, 0.8]", "[0, 1.8]")), ValidationError);
  EXPECT_THROW(load_scenario(replace(kMinimal, "\"id\": 2", "\"id\": 1")), ValidationError);
  EXPECT_THROW(load_scenario(replace(kMinimal, "\"footprint_radius\": 0.3", "\"footprint_radius\": 0")),
               ValidationError);
}

TEST(LoadScenario, Fig3LayoutHasFourStates) {
  const Scenario sc = load_scenario(read_text_file(oracle::config_path("fig3.json")));
  EXPECT_EQ(sc.pus.size(), 2u);
  EXPECT_EQ(sc.nodes.cpc_stations.size(), 2u);
  EXPECT_EQ(sc.nodes.sources.size(), 4u);
  EXPECT_EQ(sc.nodes.relays.size(), 10u);
  EXPECT_DOUBLE_EQ(sc.region.x_max - sc.region.x_min, 2.0);
  EXPECT_DOUBLE_EQ(sc.region.y_max - sc.region.y_min, 2.0);
  EXPECT_EQ(build_state_model(sc.pus).num_states(), 4u);
}

TEST(LoadScenario, SaveRoundTripsExactly) {
  const Scenario sc = load_scenario(read_text_file(oracle::config_path("dense.json")));
  const std::string text = save_scenario(sc);
  const Scenario again = load_scenario(text);
  EXPECT_EQ(again, sc);
  EXPECT_EQ(save_scenario(again), text);
}

TEST(LoadScenario, DeterministicGivenSeed) {
  const std::string doc = read_text_file(oracle::config_path("dense.json"));
  const Scenario a = load_scenario(doc, {11, 3, 20});
  const Scenario b = load_scenario(doc, {11, 3, 20});
  EXPECT_EQ(a, b);
  EXPECT_EQ(scenario_hash(a), scenario_hash(b));
  EXPECT_NE(scenario_hash(a), scenario_hash(load_scenario(doc, {12, 3, 20})));
}

TEST(Deployment, EmptyAndDeterministic) {
  const Region r{-0.8, 0.8, -1.0, 1.0};
  EXPECT_TRUE(generate_deployment(r, 0, 1).empty());
  EXPECT_EQ(generate_deployment(r, 50, 9), generate_deployment(r, 50, 9));
  EXPECT_NE(generate_deployment(r, 50, 9), generate_deployment(r, 50, 10));
}

// Wilson-Hilferty upper tail of chi-square with k degrees of freedom.
double chi_square_upper_tail(double x, double k) {
  const double z = (std::cbrt(x / k) - (1.0 - 2.0 / (9.0 * k))) / std::sqrt(2.0 / (9.0 * k));
  return 0.5 * std::erfc(z / std::sqrt(2.0));
}

TEST(Deployment, UniformByChiSquare) {
  const Region r{-0.8, 0.8, -1.0, 1.0};
  constexpr int kSide = 10, kSeeds = 50, kN = 3000;
  int rejected = 0;
  std::vector<double> pooled(kSide * kSide, 0.0);
  for (int seed = 0; seed < kSeeds; ++seed) {
    const auto pts = generate_deployment(r, kN, 1000 + seed);
    ASSERT_EQ(pts.size(), static_cast<std::size_t>(kN));
    std::vector<double> count(kSide * kSide, 0.0);
    for (const auto& n : pts) {
      ASSERT_TRUE(r.contains(n.pos));
      const int i = std::min(kSide - 1, static_cast<int>((n.pos.x - r.x_min) / 1.6 * kSide));
      const int j = std::min(kSide - 1, static_cast<int>((n.pos.y - r.y_min) / 2.0 * kSide));
      count[i * kSide + j] += 1;
      pooled[i * kSide + j] += 1;
    }
    const double expect = static_cast<double>(kN) / (kSide * kSide);
    double chi = 0.0;
    for (double c : count) chi += (c - expect) * (c - expect) / expect;
    if (chi_square_upper_tail(chi, kSide * kSide - 1) < 0.01) ++rejected;
  }
  // 50 draws at the 1% level: more than 4 rejections has probability < 2e-3.
  EXPECT_LE(rejected, 4);
  const double expect = static_cast<double>(kN) * kSeeds / (kSide * kSide);
  double chi = 0.0;
  for (double c : pooled) chi += (c - expect) * (c - expect) / expect;
  EXPECT_GT(chi_square_upper_tail(chi, kSide * kSide - 1), 0.01);
}

PrimaryUser pu(std::vector<std::vector<double>> t) {
  PrimaryUser p;
  p.footprint_radius = 0.1;
  p.transition = Matrix::from_rows(t);
  return p;
}

TEST(StateModel, IdentityChainIsReducible) {
  const std::vector<PrimaryUser> pus{pu({{1, 0}, {0, 1}})};
  EXPECT_THROW(build_state_model(pus), ReducibleChainError);
}

TEST(StateModel, SymmetricChainIsUniform) {
  const std::vector<PrimaryUser> pus{pu({{0.5, 0.5}, {0.5, 0.5}})};
  const StateModel m = build_state_model(pus);
  EXPECT_NEAR(m.stationary[0], 0.5, 1e-12);
  EXPECT_NEAR(m.stationary[1], 0.5, 1e-12);
}

TEST(StateModel, TwoPuProductMatchesKroneckerAndPowerIteration) {
  const std::vector<std::vector<double>> a{{0.9, 0.1}, {0.2, 0.8}}, b{{0.7, 0.3}, {0.3, 0.7}};
  const std::vector<PrimaryUser> pus{pu(a), pu(b)};
  const StateModel m = build_state_model(pus);
  ASSERT_EQ(m.num_states(), 4u);
  for (std::size_t i = 0; i < 4; ++i)
    for (std::size_t j = 0; j < 4; ++j)
      EXPECT_DOUBLE_EQ(m.transition(i, j), a[i / 2][j / 2] * b[i % 2][j % 2]);
  const auto power = oracle::power_stationary(m.transition);
  const double expect[4] = {2.0 / 6, 2.0 / 6, 1.0 / 6, 1.0 / 6};
  for (std::size_t s = 0; s < 4; ++s) {
    EXPECT_NEAR(m.stationary[s], power[s], 1e-12);
    EXPECT_NEAR(m.stationary[s], expect[s], 1e-12);
  }
  EXPECT_NEAR(m.occupancy_probability(0), 1.0 / 3, 1e-12);
  EXPECT_NEAR(m.occupancy_probability(1), 0.5, 1e-12);
}

TEST(StateModel, RandomChainsSatisfyInvariants) {
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 30; ++trial) {
    std::vector<PrimaryUser> pus;
    std::vector<Matrix> per;
    const int k = 1 + trial % 3;
    for (int i = 0; i < k; ++i) {
      const std::size_t n = 2 + (trial + i) % 2;
      PrimaryUser p;
      p.footprint_radius = 0.1;
      p.channel_states = n == 2 ? std::vector<std::string>{"unoccupied", "occupied"}
                                : std::vector<std::string>{"unoccupied", "occupied", "sensing"};
      p.transition = oracle::random_stochastic(n, rng);
      per.push_back(p.transition);
      pus.push_back(p);
    }
    const StateModel m = build_state_model(pus);
    double total = 0.0;
    for (std::size_t s = 0; s < m.num_states(); ++s) {
      double row = 0.0;
      for (double v : m.transition.row(s)) row += v;
      EXPECT_NEAR(row, 1.0, 1e-12);
      EXPECT_GE(m.stationary[s], 0.0);
      total += m.stationary[s];
    }
    EXPECT_NEAR(total, 1.0, 1e-12);
    EXPECT_LT(max_abs_diff(vecmat(m.stationary, m.transition), m.stationary), 1e-10);
    // Marginalizing over every other PU recovers each PU's own chain.
    for (std::size_t pk = 0; pk < pus.size(); ++pk) {
      const std::size_t n = per[pk].rows();
      for (StateIndex s = 0; s < m.num_states(); ++s) {
        std::vector<double> marg(n, 0.0);
        for (StateIndex t = 0; t < m.num_states(); ++t) marg[m.decode(t)[pk]] += m.transition(s, t);
        for (std::size_t j = 0; j < n; ++j) EXPECT_NEAR(marg[j], per[pk](m.decode(s)[pk], j), 1e-14);
      }
    }
  }
}

}  // namespace
}  // namespace cogroute
