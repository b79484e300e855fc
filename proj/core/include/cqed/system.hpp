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

#include <optional>
#include <string>
#include <vector>

#include "cqed/dispersive.hpp"

namespace cqed {

struct Envelope {
  enum class Kind { constant, tanh_ramp, table };
  Kind kind = Kind::constant;
  double mu1 = 0;    // us
  double sigma = 1;  // us
  std::vector<double> times;
  std::vector<double> values;

  static Envelope constant() { return {}; }
  static Envelope tanh_ramp(double mu1, double sigma);
  static Envelope table(std::vector<double> t, std::vector<double> v);

  double operator()(double t) const;
  void validate() const;
};

// eps(t) (a^dag e^{-i w t} e^{i phase} + h.c.)
struct DriveSpec {
  double amplitude = 0;  // rad/us
  double frequency = 0;  // rad/us, lab frame
  double phase = 0;
  Envelope envelope;

  cplx at(double t) const;
  cplx peak() const;
};

// Replacements for the white-noise rates when the baths are coloured.
struct SpectralOverrides {
  std::optional<double> gamma_kappa;
  std::optional<double> kappa_gamma;
  std::optional<double> gamma_plus_delta;
  std::optional<double> gamma_minus_delta;
};

struct SystemParams {
  double omega_r = 0;
  double omega_a = 0;
  double g = 0;
  double kappa = 0;
  double gamma_1 = 0;
  double gamma_phi = 0;
  std::vector<DriveSpec> drives;
  SpectralOverrides overrides;

  JCParams jc() const { return {omega_r, omega_a, g}; }
  DispersiveParams dispersive() const { return DispersiveParams::from(g, omega_a - omega_r, kappa); }
  double lambda() const { return g / (omega_a - omega_r); }
  // Frame reference: the first drive frequency, or omega_r without drives.
  double reference_frequency() const { return drives.empty() ? omega_r : drives.front().frequency; }
  // Sum of all drives in the frame rotating at w_ref: coefficient of a^dag.
  cplx drive_in_frame(double t, double w_ref) const;

  // Throws InvalidInput naming the offending field.
  void validate() const;
};

struct RateSet {
  double kappa = 0;
  double gamma_kappa = 0;
  double gamma = 0;
  double kappa_gamma = 0;
  double gamma_phi = 0;
  double gamma_plus_delta = 0;
  double gamma_minus_delta = 0;
};

// White-noise rates: gamma_kappa = l^2 kappa, kappa_gamma = l^2 gamma_1,
// gamma_{+-Delta} = 2 l^2 gamma_phi, with overrides applied one for one.
RateSet dispersive_rates(const SystemParams& p);

}  // namespace cqed
