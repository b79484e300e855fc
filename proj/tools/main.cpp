// Copyright 2026 The cqed Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <cstdlib>
#include <filesystem>
#include <iostream>

#include <CLI11.hpp>

#include "experiment/experiment.hpp"

namespace {

using namespace cqed;
using namespace cqed::cli;

enum ExitCode {
  kOk = 0,
  kConfigError = 2,
  kTruncationOverflow = 3,
  kSolverFailure = 4,
  kOtherFailure = 5,
  kUsage = 64,
};

constexpr const char* kOutRootVariable = "CQED_OUT_ROOT";

struct Options {
  std::string config;
  std::string out;
  std::optional<std::uint64_t> seed;
  int workers = 1;
  std::optional<bool> svg;
};

ExperimentConfig load(const Options& o) {
  auto c = load_config(o.config);
  if (o.seed || o.svg) {
    auto table = c.table;
    if (o.seed) table["run"]["seed"] = std::to_string(*o.seed);
    if (o.svg) table["output"]["svg"] = *o.svg ? "true" : "false";
    c = resolve_config(std::move(table), o.config);
  }
  return c;
}

std::string output_dir(const Options& o, const ExperimentConfig& c) {
  if (!o.out.empty()) return o.out;
  const std::filesystem::path dir(c.output_directory);
  if (dir.is_absolute()) return dir.string();
  const char* root = std::getenv(kOutRootVariable);
  return (std::filesystem::path(root && *root ? root : "results") / dir).string();
}

int failure_code(const std::string& message) {
  if (message.rfind("truncation overflow", 0) == 0) return kTruncationOverflow;
  if (message.rfind("solver failure", 0) == 0) return kSolverFailure;
  return kOtherFailure;
}

void print_derived(const ExperimentConfig& c) {
  const auto d = derive(c.system);
  std::cout << "config           " << c.source << "\n"
            << "lambda           " << format_number(d.lambda) << "\n"
            << "chi/2pi (MHz)    " << format_number(d.chi_mhz) << "\n"
            << "zeta/2pi (MHz)   " << format_number(d.zeta_mhz) << "\n"
            << "n_crit           " << format_number(d.n_crit) << "\n"
            << "n_kappa          " << format_number(d.n_kappa) << "\n"
            << "n_steady         " << format_number(d.n_steady) << "\n";
  for (const auto& w : d.warnings) std::cout << "warning: " << w << "\n";
}

int cmd_validate(const Options& o) {
  const auto c = load(o);
  print_derived(c);
  if (c.fock_levels > 0 || dispersive_regime(c.system.lambda()) != RegimeLevel::outside) {
    const int n = fock_levels_for(c, c.system, time_grid(c.duration, c.samples));
    std::cout << "fock_levels      " << n << "\n";
  }
  std::cout << "ok\n";
  return kOk;
}

int cmd_run(const Options& o, bool compare) {
  const auto c = load(o);
  const auto dir = output_dir(o, c);
  const auto out = run_evolution(c, compare);
  write_artifacts(dir, compare ? "compare" : "run", c, evolution_artifacts(c, out, compare));
  for (const auto& [model, d] : out.distances)
    std::cout << model << " vs " << c.reference << ": max trace distance " << format_number(d.max) << " at t = "
              << format_number(d.t_at_max) << " us\n";
  std::cout << "wrote " << dir << "\n";
  return kOk;
}

int cmd_sweep(const Options& o) {
  const auto c = load(o);
  const auto dir = output_dir(o, c);
  const auto r = run_parameter_sweep(c, o.workers);
  write_artifacts(dir, "sweep", c, sweep_artifacts(c, r));
  int code = kOk;
  for (const auto& row : r.rows) {
    if (!row.failure) continue;
    std::cerr << "point gamma_phi/2pi = " << format_number(row.values.at("gamma_phi_mhz"))
              << " MHz, amplitude/2pi = " << format_number(row.values.at("amplitude_mhz")) << " MHz failed: " << *row.failure
              << "\n";
    if (code == kOk) code = failure_code(*row.failure);
  }
  std::cout << "wrote " << dir << "\n";
  return code;
}

int cmd_trajectories(const Options& o) {
  const auto c = load(o);
  const auto dir = output_dir(o, c);
  if (c.homodyne.mode == "telegraph") {
    const auto t = run_telegraph(c);
    const auto a = telegraph_artifacts(c, t);
    write_artifacts(dir, "trajectories", c, a);
    std::cout << "jumps " << t.stats.jumps << ", mean excited dwell " << a.results["mean_excited_dwell_us"]
              << " us (1/gamma_down = " << a.results["inverse_gamma_down_us"] << "), mean ground dwell "
              << a.results["mean_ground_dwell_us"] << " us (1/gamma_up = " << a.results["inverse_gamma_up_us"]
              << ")\n";
  } else {
    const auto t = run_ensemble(c, o.workers);
    write_artifacts(dir, "trajectories", c, trajectory_artifacts(c, t));
    std::cout << t.set.bloch.size() << " trajectories, max deviation of the mean from the master equation "
              << format_number(t.max_deviation) << "\n";
  }
  std::cout << "wrote " << dir << "\n";
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Dispersive circuit QED simulator: full, dispersive and reduced models with homodyne trajectories"};
  app.require_subcommand(1);
  Options o;
  auto add_common = [&](CLI::App* sub, bool writes) {
    sub->add_option("--config", o.config, "experiment config file")->required()->check(CLI::ExistingFile);
    if (!writes) return;
    sub->add_option("--out", o.out,
                    std::string("output directory (default: $") + kOutRootVariable + "/<[output] directory>)");
    sub->add_option("--seed", o.seed, "override [run] seed");
    sub->add_option("--workers", o.workers, "parallel workers for sweeps and trajectories")
        ->check(CLI::PositiveNumber);
    sub->add_flag("--svg,!--no-svg", o.svg, "write SVG plots (overrides [output] svg)");
  };
  auto* run = app.add_subcommand("run", "evolve every configured model");
  auto* validate = app.add_subcommand("validate", "check a config and print derived quantities");
  auto* sweep = app.add_subcommand("sweep", "run the [sweep] section");
  auto* traj = app.add_subcommand("trajectories", "homodyne quantum trajectories from the [homodyne] section");
  auto* compare = app.add_subcommand("compare", "evolve the models and compare them with the reference");
  add_common(run, true);
  add_common(validate, false);
  add_common(sweep, true);
  add_common(traj, true);
  add_common(compare, true);
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }
  try {
    if (*run) return cmd_run(o, false);
    if (*compare) return cmd_run(o, true);
    if (*validate) return cmd_validate(o);
    if (*sweep) return cmd_sweep(o);
    if (*traj) return cmd_trajectories(o);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kConfigError;
  } catch (const InvalidInput& e) {
    std::cerr << "invalid input: " << e.what() << "\n";
    return kConfigError;
  } catch (const TruncationOverflow& e) {
    std::cerr << "truncation overflow: " << e.what() << "\n";
    return kTruncationOverflow;
  } catch (const SolverFailure& e) {
    std::cerr << "solver failure: " << e.what() << "\n";
    return kSolverFailure;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kOtherFailure;
  }
  return kUsage;
}
