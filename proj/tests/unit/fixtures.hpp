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

#include <random>

#include "cqed/system.hpp"

namespace cqed::testing {

// fig2.cfg parameter set: g = 50 MHz, Delta = 2 GHz, kappa = 2.5 MHz,
// gamma_1 = 0.1 MHz, gamma_phi = 0.3 MHz, measurement drive on resonance.
inline SystemParams fig2_params(double eps_mhz = 10.0, bool ramp = false, double gamma_phi_mhz = 0.3) {
  SystemParams p;
  p.omega_r = mhz_to_rad_us(7000);
  p.omega_a = mhz_to_rad_us(9000);
  p.g = mhz_to_rad_us(50);
  p.kappa = mhz_to_rad_us(2.5);
  p.gamma_1 = mhz_to_rad_us(0.1);
  p.gamma_phi = mhz_to_rad_us(gamma_phi_mhz);
  const double tau = 10.0 / kTwoPi;
  p.drives.push_back({mhz_to_rad_us(eps_mhz), p.omega_r, 0.0,
                      ramp ? Envelope::tanh_ramp(tau, tau) : Envelope::constant()});
  return p;
}

// Small, strongly dispersive system cheap enough for lab-frame integration.
inline SystemParams small_params(double eps_mhz = 1.0) {
  SystemParams p;
  p.omega_r = mhz_to_rad_us(100);
  p.omega_a = mhz_to_rad_us(130);
  p.g = mhz_to_rad_us(1.5);
  p.kappa = mhz_to_rad_us(0.4);
  p.gamma_1 = mhz_to_rad_us(0.05);
  p.gamma_phi = mhz_to_rad_us(0.1);
  p.drives.push_back({mhz_to_rad_us(eps_mhz), p.omega_r, 0.0, Envelope::constant()});
  return p;
}

inline Matrix random_matrix(int n, std::mt19937_64& rng) {
  std::normal_distribution<double> d;
  Matrix m(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) m(i, j) = cplx(d(rng), d(rng));
  return m;
}

inline Matrix random_density(int n, std::mt19937_64& rng) {
  const Matrix a = random_matrix(n, rng);
  Matrix r = a * a.adjoint();
  return r / r.trace();
}

}  // namespace cqed::testing
