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

#include <span>
#include <vector>

#include "cqed/integrator.hpp"
#include "cqed/system.hpp"

namespace cqed {

enum class ReducedVariant {
  nonlinear,  // all lambda^2, zeta and dressed-dephasing corrections
  linear,     // chi = g^2 / Delta, no corrections
};

ReducedVariant parse_reduced_variant(std::string_view s);

struct PointerState {
  cplx alpha_e = 0;
  cplx alpha_g = 0;

  double n_e() const { return std::norm(alpha_e); }
  double n_g() const { return std::norm(alpha_g); }
  cplx beta() const { return alpha_e - alpha_g; }
  cplx mu() const { return alpha_e + alpha_g; }
};

struct ReducedRates {
  double omega_a_d = 0;         // absolute, rad/us
  double omega_a_appendix = 0;  // appendix expression incl. d/dt Im[a_g a_e^*]
  double gamma_phi_eff = 0;
  double gamma_d = 0;  // measurement-induced dephasing
  double gamma_down = 0;
  double gamma_up = 0;
};

class ReducedModel {
 public:
  ReducedModel(SystemParams p, ReducedVariant v);

  const SystemParams& params() const { return p_; }
  ReducedVariant variant() const { return v_; }
  double chi() const { return chi_; }
  double zeta() const { return zeta_; }
  double lambda2() const { return l2_; }
  const RateSet& rates_set() const { return r_; }

  // Measurement drive in the frame rotating at the reference frequency.
  cplx drive(double t) const { return p_.drive_in_frame(t, w_); }

  PointerState pointer_rhs(double t, const PointerState& s) const;
  // Damped fixed-point iteration at the peak (constant) drive amplitude.
  PointerState pointer_steady_state() const;
  ReducedRates rates(double t, const PointerState& s) const;
  // Qubit frame rotating at omega_a, dispersive frame.
  Qubit2 qubit_rhs(const Qubit2& rho, const ReducedRates& r) const;

 private:
  PointerState pointer_rhs_with(cplx eps, const PointerState& s) const;

  SystemParams p_;
  ReducedVariant v_;
  RateSet r_;
  double w_ = 0;
  double l2_ = 0;
  double chi_ = 0;
  double zeta_ = 0;
};

struct ReducedSample {
  double t = 0;
  Qubit2 qubit;  // dispersive frame, qubit rotating at omega_a
  PointerState pointer;
  ReducedRates rates;
};

struct ReducedEvolution {
  ReducedVariant variant = ReducedVariant::nonlinear;
  std::vector<ReducedSample> samples;
  IntegratorStats stats;
};

ReducedEvolution evolve_reduced(const ReducedModel& m, const Qubit2& rho0, const PointerState& ptr0,
                                std::span<const double> times, const IntegratorOptions& opt = {});

// gamma_down(n_e) + gamma_up(n_g) at the steady pointer states.
double gamma_eff(const ReducedModel& m, const PointerState& steady);
// -(gamma_down - gamma_up) / (gamma_down + gamma_up)
double sz_steady(const ReducedRates& r);
// Dressing back to the bare basis with photon number n_mean.
double sz_steady_bare(double lambda, double sz, double n_mean);
// Temperature in units of hbar omega_r / k_B with occupation n_bar.
double effective_temperature(double n_bar);

}  // namespace cqed
