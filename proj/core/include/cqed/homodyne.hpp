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

#include <cstdint>
#include <functional>
#include <random>
#include <span>
#include <vector>

#include "cqed/lindblad.hpp"
#include "cqed/reduced.hpp"

namespace cqed {

struct MeasurementRates {
  double gamma_m = 0;
  double theta_m = 0;
  double gamma_ci = 0;  // information about sigma_z
  double gamma_ba = 0;  // extra back-action
};

// Rates for LO phase phi and efficiency eta. Throws InvalidInput when phi - theta_beta
// lies outside [0, pi/2], where the expressions do not apply.
MeasurementRates measurement_rates(const ReducedModel& m, const PointerState& s, double phi, double eta);
// Same without the validity-window check (used inside trajectories, where
// the pointer separation may still be building up).
MeasurementRates measurement_rates_unchecked(const ReducedModel& m, const PointerState& s, double phi,
                                             double eta);
// LO phase with theta_m = 0, i.e. Gamma_ba = 0.
double optimal_lo_phase(const ReducedModel& m, const PointerState& s);
// J - Jbar: the part of the record carried by the mean cavity field.
double record_offset(const ReducedModel& m, const PointerState& s, double phi, double eta);
// Gamma_ci / gamma_eff at steady state.
double snr(const ReducedModel& m, const PointerState& steady, double phi, double eta);

struct HomodyneConfig {
  double phi = 0;
  double eta = 1;
  double dt = 0;  // 0 selects the default step
  int n_traj = 1;
  std::uint64_t seed = 1;
  int workers = 1;
};

// Counter-style substream: the generator for trajectory `index` depends only
// on (seed, index), never on scheduling.
std::mt19937_64 trajectory_rng(std::uint64_t seed, std::uint64_t index);

struct TrajectorySet {
  std::vector<double> times;
  // [trajectory][sample]
  std::vector<std::vector<Bloch>> bloch;
  std::vector<std::vector<double>> record;  // J averaged over the preceding sample interval
  std::vector<Bloch> ensemble_mean;
  double dt = 0;
};

// Default trajectory step: min(1/(100 kappa), 1/(100 gamma_eff), 1/(50 Gamma_m)).
double default_qte_step(const ReducedModel& m, const PointerState& steady, double phi, double eta);

// Reduced (qubit-only) trajectories, dispersive frame, qubit rotating at omega_a.
TrajectorySet run_reduced_trajectories(const ReducedModel& m, const Qubit2& rho0, const PointerState& ptr0,
                                       std::span<const double> times, const HomodyneConfig& cfg);

// Each step applies, in turn and each exactly: flips with the dephasing not due
// to the measurement, the sigma_z measurement as a Kraus update whose record is
// drawn from its two-Gaussian law, and the back-action phase kick. The observer
// sees the new state, the rates used and the record increment dJbar.
using ReducedStepObserver =
    std::function<void(double t, const Qubit2& rho, const MeasurementRates& r, double djbar)>;
void simulate_reduced_trajectory(const ReducedModel& m, Qubit2 rho, PointerState ptr, double t0, double duration,
                                 double dt, double phi, double eta, std::mt19937_64& rng,
                                 const ReducedStepObserver& obs);

// Trajectories of the dispersive-frame cavity-plus-qubit state.
TrajectorySet run_full_trajectories(const HilbertDims& dims, const SystemParams& p,
                                    const DenseOperator& rho0_dispersive, std::span<const double> times,
                                    const HomodyneConfig& cfg);

struct TelegraphStats {
  std::vector<double> up_dwell;    // time spent near +1 (excited)
  std::vector<double> down_dwell;  // time spent near -1
  std::vector<double> histogram;   // normalized counts of smoothed <sigma_z>
  std::vector<double> bin_centers;
  long jumps = 0;
};

// Schmitt trigger (+-threshold) on the centered moving average (window) of
// conditioned <sigma_z> from one long reduced trajectory.
TelegraphStats telegraph_statistics(const ReducedModel& m, const PointerState& steady, double duration,
                                    double phi, double eta, double dt, double window, double threshold,
                                    std::uint64_t seed, int bins = 40);

}  // namespace cqed
