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

#pragma once

#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "config.hpp"
#include "cqed/analysis.hpp"
#include "cqed/homodyne.hpp"
#include "output.hpp"

namespace cqed::cli {

struct Derived {
  double lambda = 0;
  double chi_mhz = 0;
  double zeta_mhz = 0;
  double n_crit = 0;
  double n_kappa = 0;
  double n_steady = 0;  // mean pointer photon number at the peak drive, nan outside the regime
  std::vector<std::string> warnings;
};

Derived derive(const SystemParams& p);
nlohmann::json to_json(const Derived& d);

// One model evolved on a time grid. Qubit in the dispersive frame, rotating at omega_a.
struct ModelRun {
  std::string model;
  QubitSeries series;
  std::vector<double> sz_bare;
  std::vector<double> photons;
  int fock_levels = 0;  // 0 for the reduced models
  // State checks over every sample: |tr rho - 1|, max |rho - rho^dag|, smallest eigenvalue.
  double trace_error = 0;
  double hermiticity_error = 0;
  double min_eigenvalue = 0;
};

std::vector<double> time_grid(double duration, int samples);
Eigen::Vector2cd qubit_ket(const std::string& name);
// Resonator truncation for a tier run: the configured value, or the level count
// covering the largest pointer photon number reached on the grid.
int fock_levels_for(const ExperimentConfig& c, const SystemParams& p, const std::vector<double>& times);
ModelRun run_model(const ExperimentConfig& c, const SystemParams& p, const std::string& model,
                   const std::vector<double>& times, int fock_levels);

// Files of one command, written by write_artifacts.
struct Artifacts {
  std::vector<CsvTable> tables;
  std::vector<std::pair<std::string, Plot>> plots;
  nlohmann::json results = nlohmann::json::object();
  int fock_levels_max = 0;
};

struct EvolutionOutcome {
  std::vector<ModelRun> runs;
  std::vector<std::pair<std::string, DistanceSeries>> distances;  // each model against the reference
};
EvolutionOutcome run_evolution(const ExperimentConfig& c, bool compare);
Artifacts evolution_artifacts(const ExperimentConfig& c, const EvolutionOutcome& o, bool compare);

// Rows carry gamma_phi_mhz, amplitude_mhz and per-kind outputs; see the README for the columns.
SweepResult run_parameter_sweep(const ExperimentConfig& c, int workers);
Artifacts sweep_artifacts(const ExperimentConfig& c, const SweepResult& r);

struct TrajectoryOutcome {
  std::string tier;
  TrajectorySet set;
  QubitSeries master_equation;  // unconditioned evolution of the same model
  double max_deviation = 0;     // ensemble mean against the master equation
  int fock_levels = 0;
  double phi = 0;
};
struct TelegraphOutcome {
  TelegraphStats stats;
  ReducedRates rates;
  double window = 0;
  double phi = 0;
  std::vector<double> trace_t;
  std::vector<double> trace_sz;
};
TrajectoryOutcome run_ensemble(const ExperimentConfig& c, int workers);
TelegraphOutcome run_telegraph(const ExperimentConfig& c);
Artifacts trajectory_artifacts(const ExperimentConfig& c, const TrajectoryOutcome& o);
Artifacts telegraph_artifacts(const ExperimentConfig& c, const TelegraphOutcome& o);

// Writes tables, plots (when enabled), manifest.json and resolved.cfg into dir.
void write_artifacts(const std::string& dir, const std::string& command, const ExperimentConfig& c,
                     const Artifacts& a);

}  // namespace cqed::cli
