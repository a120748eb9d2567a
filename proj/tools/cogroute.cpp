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

// Command-line driver: cogroute <solve|route|compare|trace-fp|sweep> --config FILE [options]

#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "cogroute/runner.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Interference-aware routing game solver for multi-hop cognitive radio networks"};
  cogroute::ExperimentSpec spec;
  std::string command;
  std::uint64_t seed = 0;
  double omega = 0.0, beta = 0.0;
  cogroute::NodeId node = 0;
  int level = 0;
  std::size_t state = 0;

  app.add_option("command", command, "solve, route, compare, trace-fp or sweep")->required();
  app.add_option("--config", spec.config_path, "scenario JSON document")->required();
  auto* seed_opt = app.add_option("--seed", seed, "override the document seed");
  app.add_option("--out", spec.out_dir, "output directory")->capture_default_str();
  app.add_option("--seeds", spec.seeds, "deployments for compare")->capture_default_str();
  auto* omega_opt = app.add_option("--omega", omega, "relaxation factor");
  auto* beta_opt = app.add_option("--beta", beta, "discount factor");
  app.add_option("--threads", spec.threads, "worker threads")->capture_default_str();
  auto* node_opt = app.add_option("--node", node, "player to trace (trace-fp)");
  auto* level_opt = app.add_option("--level", level, "level of the traced game (trace-fp)");
  auto* state_opt = app.add_option("--state", state, "PU state index (trace-fp, route)");
  app.add_option("--sweep-omega", spec.sweep_omega, "omega values for sweep");
  app.add_option("--sweep-beta", spec.sweep_beta, "beta values for sweep");
  app.add_option("--sweep-relays", spec.sweep_relays, "random relay counts for sweep");
  CLI11_PARSE(app, argc, argv);

  auto cmd = cogroute::parse_command(command);
  if (!cmd) {
    std::cerr << "unknown command '" << command << "'\n";
    return 2;
  }
  spec.command = *cmd;
  if (*seed_opt) spec.seed = seed;
  if (*omega_opt) spec.omega = omega;
  if (*beta_opt) spec.beta = beta;
  if (*node_opt) spec.node = node;
  if (*level_opt) spec.level = level;
  if (*state_opt) spec.state = state;
  return cogroute::run(spec, std::cerr);
}
