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

#include "cogroute/runner.hpp"

#include <cinttypes>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <utility>

#include <json.hpp>

#include "cogroute/errors.hpp"
#include "cogroute/metrics.hpp"
#include "cogroute/random.hpp"
#include "cogroute/simd/kernels.hpp"

namespace cogroute {

namespace {

using json = nlohmann::json;
using Files = std::vector<std::pair<std::string, std::string>>;

std::string patch_document(const std::string& text, std::optional<double> omega,
                           std::optional<double> beta, std::optional<int> relays) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("config: ") + e.what());
  }
  if (omega) doc["game"]["omega"] = *omega;
  if (beta) doc["game"]["beta"] = *beta;
  if (relays) {
    if (!doc.contains("deployment") || !doc["deployment"].contains("random_relays"))
      throw ValidationError("n_relays sweep needs deployment.random_relays in the config");
    doc["deployment"]["random_relays"]["count"] = *relays;
  }
  return doc.dump();
}

std::string hex64(std::uint64_t h) {
  char buf[24];
  std::snprintf(buf, sizeof buf, "%016" PRIx64, h);
  return buf;
}

std::uint64_t content_hash(const std::string& s) { return fnv1a64(s.data(), s.size()); }

StateIndex sample_state(const StateModel& states, std::uint64_t seed) {
  Rng rng(derive_seed(seed, stream::kStateSample));
  const double u = rng.uniform();
  double acc = 0.0;
  for (StateIndex s = 0; s < states.num_states(); ++s) {
    acc += states.stationary[s];
    if (u < acc) return s;
  }
  return states.num_states() - 1;
}

void solve_files(Pipeline& p, Files& files, std::ostream& log) {
  std::ostringstream axis, strat, values, audit;
  write_axis_csv(axis, p.axis(), p.hierarchy());
  const GameSolution& sol = p.solution();
  write_strategies_csv(strat, sol);
  write_values_csv(values, sol);
  write_audit_csv(audit, sol);
  files.emplace_back("axis.csv", axis.str());
  files.emplace_back("strategies.csv", strat.str());
  files.emplace_back("values.csv", values.str());
  files.emplace_back("audit.csv", audit.str());
  log << "levels " << p.hierarchy().level_count << ", corridor " << p.corridor().members.size()
      << " nodes, " << sol.audit.size() << " stage games, " << sol.unresolved().size()
      << " unresolved\n";
}

void route_files(Pipeline& p, std::optional<StateIndex> state, Files& files, std::ostream& log) {
  const Scenario& sc = p.scenario();
  const StateIndex s = state ? *state : sample_state(p.states(), sc.seed);
  if (s >= p.states().num_states()) throw Error("state " + std::to_string(s) + " out of range");
  std::ostringstream out;
  out << "seed,algorithm,source,hop_index,node,x,y,hop_delay\n";
  char buf[200];
  const std::uint64_t route_seed = derive_seed(sc.seed, stream::kRoutes);
  for (const Node& src : sc.nodes.sources) {
    const RoutePath r = realize_route(p.model(), p.solution(), s, src.id,
                                      derive_seed(route_seed, static_cast<std::uint64_t>(src.id)));
    for (std::size_t h = 0; h < r.nodes.size(); ++h) {
      const Point q = sc.position(r.nodes[h]);
      std::snprintf(buf, sizeof buf, "%" PRIu64 ",game,%d,%zu,%d,%.6f,%.6f,%.9g\n", sc.seed,
                    src.id, h, r.nodes[h], q.x, q.y, h == 0 ? 0.0 : r.hop_delay[h - 1]);
      out << buf;
    }
  }
  files.emplace_back("routes.csv", out.str());
  log << "routes realized at state " << s << "\n";
}

void trace_files(Pipeline& p, const ExperimentSpec& spec, Files& files, std::ostream& log) {
  const RoutingModel& model = p.model();
  const GameSolution& sol = p.solution();
  int level = spec.level.value_or(0);
  if (level == 0) level = spec.node ? model.level_of(*spec.node) : 1;
  if (level < 1 || level > model.level_count)
    throw Error("level " + std::to_string(level) + " out of range 1.." +
                std::to_string(model.level_count));
  const StateIndex s = spec.state.value_or(0);
  if (s >= model.states.num_states()) throw Error("state " + std::to_string(s) + " out of range");
  const StageGame game = build_stage_game(model, s, level, sol.values, sol.upstream_rate[s]);
  const auto& players = game.congestion().players;
  std::optional<std::size_t> only;
  if (spec.node) {
    auto it = std::find(players.begin(), players.end(), *spec.node);
    if (it == players.end())
      throw Error("node " + std::to_string(*spec.node) + " is not a level-" +
                  std::to_string(level) + " player at state " + std::to_string(s));
    only = static_cast<std::size_t>(it - players.begin());
  }
  const FpResult fp = fictitious_play(game, model.fp, true);
  std::ostringstream out;
  out << "iteration,player,action,empirical_frequency\n";
  char buf[128];
  for (std::size_t k = 0; k < fp.trace.frequencies.size(); ++k)
    for (std::size_t i = 0; i < players.size(); ++i) {
      if (only && *only != i) continue;
      const auto& cands = game.congestion().candidates[i];
      for (std::size_t a = 0; a < cands.size(); ++a) {
        std::snprintf(buf, sizeof buf, "%zu,%d,%d,%.9g\n", k + 1, players[i], cands[a],
                      fp.trace.frequencies[k][i][a]);
        out << buf;
      }
    }
  files.emplace_back("fp_trace.csv", out.str());
  log << "fictitious play at level " << level << ", state " << s << ": "
      << fp.trace.iterations << " iterations, " << (fp.trace.converged ? "converged" : "not converged")
      << ", nash gap " << fp.trace.nash_gap << "\n";
}

void sweep_files(const std::string& text, const ExperimentSpec& spec, std::uint64_t seed,
                 Files& files, std::ostream& log) {
  std::vector<std::optional<double>> omegas, betas;
  std::vector<std::optional<int>> relays;
  for (double x : spec.sweep_omega) omegas.emplace_back(x);
  for (double x : spec.sweep_beta) betas.emplace_back(x);
  for (int x : spec.sweep_relays) relays.emplace_back(x);
  if (omegas.empty()) omegas.push_back(spec.omega);
  if (betas.empty()) betas.push_back(spec.beta);
  if (relays.empty()) relays.emplace_back();

  std::ostringstream out;
  out << "omega,beta,n_relays,status,corridor_size,level_count,unresolved_games,"
         "mean_source_value\n";
  char buf[256];
  for (const auto& o : omegas)
    for (const auto& b : betas)
      for (const auto& n : relays) {
        const std::string doc = patch_document(text, o, b, n);
        const Scenario sc = load_scenario(doc, DeploymentDraw{seed, 0, 1});
        std::string status = "ok";
        std::size_t corridor = 0, unresolved = 0;
        int levels = 0;
        double mean_value = 0.0;
        try {
          Pipeline p(sc, spec.threads);
          corridor = p.corridor().members.size();
          levels = p.hierarchy().level_count;
          const GameSolution& sol = p.solution();
          unresolved = sol.unresolved().size();
          for (const Node& src : sc.nodes.sources) {
            const auto& v = sol.values.v(src.id);
            double e = 0.0;
            for (StateIndex s = 0; s < v.size(); ++s) e += p.states().stationary[s] * v[s];
            mean_value += e / static_cast<double>(sc.nodes.sources.size());
          }
        } catch (const UnreachableError&) {
          status = "unreachable";
        } catch (const NoAxisError&) {
          status = "no_axis";
        }
        std::snprintf(buf, sizeof buf, "%.6g,%.6g,%zu,%s,%zu,%d,%zu,%.9g\n", sc.game.omega,
                      sc.game.beta, sc.nodes.relays.size(), status.c_str(), corridor, levels,
                      unresolved, mean_value);
        out << buf;
      }
  files.emplace_back("sweep.csv", out.str());
  log << "sweep: " << omegas.size() * betas.size() * relays.size() << " runs\n";
}

}  // namespace

std::optional<Command> parse_command(std::string_view name) {
  for (Command c : {Command::kSolve, Command::kRoute, Command::kCompare, Command::kTraceFp,
                    Command::kSweep})
    if (command_name(c) == name) return c;
  return std::nullopt;
}

std::string_view command_name(Command c) {
  switch (c) {
    case Command::kSolve: return "solve";
    case Command::kRoute: return "route";
    case Command::kCompare: return "compare";
    case Command::kTraceFp: return "trace-fp";
    case Command::kSweep: return "sweep";
  }
  return "?";
}

Scenario update_map(const Scenario& scenario, std::vector<PrimaryUser> pus) {
  Scenario out = scenario;
  out.pus = std::move(pus);
  validate(out);
  build_state_model(out.pus);  // surfaces a reducible chain now rather than at solve time
  return out;
}

Pipeline::Pipeline(Scenario scenario, int threads)
    : scenario_(std::move(scenario)), threads_(threads) {}

void Pipeline::update_map(std::vector<PrimaryUser> pus) {
  scenario_ = cogroute::update_map(scenario_, std::move(pus));
  states_.reset();
  axis_.reset();
  corridor_.reset();
  hierarchy_.reset();
  model_.reset();
  solution_.reset();
}

const StateModel& Pipeline::states() {
  if (!states_) states_ = std::make_unique<StateModel>(build_state_model(scenario_.pus));
  return *states_;
}

const MedialAxis& Pipeline::axis() {
  if (!axis_) axis_ = std::make_unique<MedialAxis>(compute_medial_axis(scenario_));
  return *axis_;
}

const Corridor& Pipeline::corridor() {
  if (!corridor_)
    corridor_ = std::make_unique<Corridor>(make_corridor(scenario_, axis(), scenario_.game.omega));
  return *corridor_;
}

const HierarchyAssignment& Pipeline::hierarchy() {
  if (!hierarchy_)
    hierarchy_ =
        std::make_unique<HierarchyAssignment>(assign_all_levels(scenario_, corridor(), states()));
  return *hierarchy_;
}

const RoutingModel& Pipeline::model() {
  if (!model_)
    model_ = std::make_unique<RoutingModel>(make_routing_model(scenario_, hierarchy(), states()));
  return *model_;
}

const GameSolution& Pipeline::solution() {
  if (!solution_) solution_ = std::make_unique<GameSolution>(backward_induction(model(), threads_));
  return *solution_;
}

int run(const ExperimentSpec& spec, std::ostream& log) {
  try {
    const std::string original = read_text_file(spec.config_path);
    const std::string text = patch_document(original, spec.omega, spec.beta, std::nullopt);
    const std::uint64_t seed = spec.seed ? *spec.seed : config_seed(text);
    Files files;

    if (spec.command == Command::kCompare) {
      const CompareReport rep = ensemble_compare(text, seed, spec.seeds, spec.threads);
      std::ostringstream inter, delay, routes;
      write_interference_csv(inter, rep);
      write_delay_csv(delay, rep);
      write_routes_csv(routes, rep);
      files.emplace_back("interference.csv", inter.str());
      files.emplace_back("delay.csv", delay.str());
      files.emplace_back("routes.csv", routes.str());
      log << "compare: " << spec.seeds << " draws, " << rep.samples.size() << " route samples, "
          << rep.redrawn << " redrawn\n";
    } else if (spec.command == Command::kSweep) {
      sweep_files(original, spec, seed, files, log);
    } else {
      Pipeline p(load_scenario(text, DeploymentDraw{seed, 0, 1}), spec.threads);
      if (spec.command == Command::kSolve) solve_files(p, files, log);
      if (spec.command == Command::kRoute) route_files(p, spec.state, files, log);
      if (spec.command == Command::kTraceFp) trace_files(p, spec, files, log);
    }

    std::filesystem::create_directories(spec.out_dir);
    std::ostringstream manifest;
    manifest << "version " << kVersion << "\n"
             << "command " << command_name(spec.command) << "\n"
             << "config_hash " << hex64(content_hash(canonical_config(text))) << "\n"
             << "seed " << seed << "\n"
             << "kernels " << simd::isa_name(simd::active_isa()) << "\n";
    if (spec.command == Command::kCompare) manifest << "seeds " << spec.seeds << "\n";
    for (const auto& [name, content] : files) {
      const std::filesystem::path path = std::filesystem::path(spec.out_dir) / name;
      std::ofstream f(path, std::ios::binary);
      f << content;
      if (!f) throw Error("cannot write " + path.string());
      manifest << "file " << name << " " << content.size() << " " << hex64(content_hash(content))
               << "\n";
    }
    std::ofstream m(std::filesystem::path(spec.out_dir) / "manifest.txt", std::ios::binary);
    m << manifest.str();
    if (!m) throw Error("cannot write manifest.txt");
    return 0;
  } catch (const std::exception& e) {
    log << "error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace cogroute
