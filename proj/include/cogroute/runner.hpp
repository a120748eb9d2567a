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

#ifndef COGROUTE_RUNNER_HPP_
#define COGROUTE_RUNNER_HPP_

#include <cstdint>
#include <memory>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "cogroute/dynprog.hpp"
#include "cogroute/geometry.hpp"
#include "cogroute/scenario.hpp"

namespace cogroute {

inline constexpr std::string_view kVersion = "0.1.0";

enum class Command { kSolve, kRoute, kCompare, kTraceFp, kSweep };

std::optional<Command> parse_command(std::string_view name);
std::string_view command_name(Command c);

struct ExperimentSpec {
  std::string config_path;
  Command command = Command::kSolve;
  std::string out_dir = "out";
  std::optional<std::uint64_t> seed;  // overrides the document seed
  int seeds = 20;                     // compare
  std::optional<double> omega;
  std::optional<double> beta;
  int threads = 1;
  // trace-fp and route
  std::optional<NodeId> node;
  std::optional<int> level;
  std::optional<StateIndex> state;
  // sweep: an empty list keeps the configured value
  std::vector<double> sweep_omega;
  std::vector<double> sweep_beta;
  std::vector<int> sweep_relays;
};

// Runs one command and writes its CSV files plus manifest.txt into out_dir.
// Returns 0 on success and 1 after printing the first error to `log`.
int run(const ExperimentSpec& spec, std::ostream& log);

// New scenario with the PU set replaced; throws ValidationError.
Scenario update_map(const Scenario& scenario, std::vector<PrimaryUser> pus);

// The global procedure (state model, axis, corridor, levels) and the local
// one (backward induction), computed on demand and cached until the map
// changes.
class Pipeline {
 public:
  explicit Pipeline(Scenario scenario, int threads = 1);

  const Scenario& scenario() const { return scenario_; }
  // Replaces the PU set and marks every derived structure stale.
  void update_map(std::vector<PrimaryUser> pus);
  bool stale() const { return !solution_; }

  const StateModel& states();
  const MedialAxis& axis();
  const Corridor& corridor();
  const HierarchyAssignment& hierarchy();
  const RoutingModel& model();
  const GameSolution& solution();

 private:
  Scenario scenario_;
  int threads_;
  std::unique_ptr<StateModel> states_;
  std::unique_ptr<MedialAxis> axis_;
  std::unique_ptr<Corridor> corridor_;
  std::unique_ptr<HierarchyAssignment> hierarchy_;
  std::unique_ptr<RoutingModel> model_;
  std::unique_ptr<GameSolution> solution_;
};

}  // namespace cogroute

#endif  // COGROUTE_RUNNER_HPP_
