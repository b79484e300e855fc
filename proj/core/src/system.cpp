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

#include "cqed/system.hpp"

#include <algorithm>
#include <cmath>

namespace cqed {

Envelope Envelope::tanh_ramp(double mu1, double sigma) {
  Envelope e;
  e.kind = Kind::tanh_ramp;
  e.mu1 = mu1;
  e.sigma = sigma;
  return e;
}

Envelope Envelope::table(std::vector<double> t, std::vector<double> v) {
  Envelope e;
  e.kind = Kind::table;
  e.times = std::move(t);
  e.values = std::move(v);
  e.validate();
  return e;
}

double Envelope::operator()(double t) const {
  switch (kind) {
    case Kind::constant: return 1.0;
    case Kind::tanh_ramp: return 0.5 * (std::tanh((t - mu1) / sigma) + 1.0);
    case Kind::table: {
      if (t <= times.front()) return values.front();
      if (t >= times.back()) return values.back();
      const auto it = std::upper_bound(times.begin(), times.end(), t);
      const std::size_t i = static_cast<std::size_t>(it - times.begin());
      const double w = (t - times[i - 1]) / (times[i] - times[i - 1]);
      return (1 - w) * values[i - 1] + w * values[i];
    }
  }
  return 0;
}

void Envelope::validate() const {
  if (kind == Kind::tanh_ramp && !(sigma > 0)) throw InvalidInput("drive.sigma_us must be positive");
  if (kind == Kind::table) {
    if (times.size() < 2 || times.size() != values.size()) {
      throw InvalidInput("drive envelope table needs >= 2 matching (t, value) pairs");
    }
    if (!std::is_sorted(times.begin(), times.end())) {
      throw InvalidInput("drive envelope table times must be increasing");
    }
  }
}

cplx DriveSpec::at(double t) const { return amplitude * envelope(t) * std::exp(I1 * phase); }

cplx DriveSpec::peak() const { return amplitude * std::exp(I1 * phase); }

cplx SystemParams::drive_in_frame(double t, double w_ref) const {
  cplx s = 0;
  for (const auto& d : drives) s += d.at(t) * std::exp(-I1 * ((d.frequency - w_ref) * t));
  return s;
}

void SystemParams::validate() const {
  auto need = [](bool ok, const char* field, const char* what) {
    if (!ok) throw InvalidInput(std::string(field) + " " + what);
  };
  need(std::isfinite(omega_r) && omega_r > 0, "system.omega_r_MHz", "must be positive");
  need(std::isfinite(omega_a) && omega_a > 0, "system.omega_a_MHz", "must be positive");
  need(omega_a != omega_r, "system.omega_a_MHz", "must differ from omega_r");
  need(std::isfinite(g) && g >= 0, "system.g_MHz", "must be non-negative");
  need(std::isfinite(kappa) && kappa >= 0, "system.kappa_MHz", "must be non-negative");
  need(std::isfinite(gamma_1) && gamma_1 >= 0, "system.gamma1_MHz", "must be non-negative");
  need(std::isfinite(gamma_phi) && gamma_phi >= 0, "system.gamma_phi_MHz", "must be non-negative");
  need(std::abs(lambda()) < 1, "system.g_MHz", "must satisfy |g / (omega_a - omega_r)| < 1");
  for (const auto& d : drives) {
    need(std::isfinite(d.amplitude) && d.amplitude >= 0, "drive.epsilon_MHz", "must be non-negative");
    d.envelope.validate();
  }
  const auto& o = overrides;
  for (auto [v, name] : {std::pair{o.gamma_kappa, "rates.gamma_kappa_MHz"},
                         std::pair{o.kappa_gamma, "rates.kappa_gamma_MHz"},
                         std::pair{o.gamma_plus_delta, "rates.gamma_plus_delta_MHz"},
                         std::pair{o.gamma_minus_delta, "rates.gamma_minus_delta_MHz"}}) {
    if (v) need(std::isfinite(*v) && *v >= 0, name, "must be non-negative");
  }
}

RateSet dispersive_rates(const SystemParams& p) {
  p.validate();
  const double l2 = p.lambda() * p.lambda();
  RateSet r;
  r.kappa = p.kappa;
  r.gamma = p.gamma_1;
  r.gamma_phi = p.gamma_phi;
  r.gamma_kappa = p.overrides.gamma_kappa.value_or(l2 * p.kappa);
  r.kappa_gamma = p.overrides.kappa_gamma.value_or(l2 * p.gamma_1);
  r.gamma_plus_delta = p.overrides.gamma_plus_delta.value_or(2 * l2 * p.gamma_phi);
  r.gamma_minus_delta = p.overrides.gamma_minus_delta.value_or(2 * l2 * p.gamma_phi);
  return r;
}

}  // namespace cqed
