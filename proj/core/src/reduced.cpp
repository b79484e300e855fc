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

#include "cqed/reduced.hpp"

#include <cmath>
#include <string>

namespace cqed {

ReducedVariant parse_reduced_variant(std::string_view s) {
  if (s == "nonlinear" || s == "reduced_nonlinear") return ReducedVariant::nonlinear;
  if (s == "linear" || s == "reduced_linear") return ReducedVariant::linear;
  throw InvalidInput("unknown reduced-model variant '" + std::string(s) + "'");
}

ReducedModel::ReducedModel(SystemParams p, ReducedVariant v) : p_(std::move(p)), v_(v) {
  p_.validate();
  if (dispersive_regime(p_.lambda()) == RegimeLevel::outside) {
    throw InvalidInput("reduced model requires |g / Delta| <= 0.25");
  }
  w_ = p_.reference_frequency();
  const auto dp = p_.dispersive();
  if (v_ == ReducedVariant::nonlinear) {
    l2_ = dp.lambda * dp.lambda;
    chi_ = dp.chi;
    zeta_ = dp.zeta;
    r_ = dispersive_rates(p_);
  } else {
    chi_ = p_.g * p_.g / (p_.omega_a - p_.omega_r);
    r_.kappa = p_.kappa;
    r_.gamma = p_.gamma_1;
    r_.gamma_phi = p_.gamma_phi;
  }
}

PointerState ReducedModel::pointer_rhs_with(cplx eps, const PointerState& s) const {
  const double dprime = p_.omega_r - w_ + zeta_;
  const double ne = s.n_e(), ng = s.n_g();
  PointerState d;
  d.alpha_e = -I1 * eps * (1 + 0.5 * l2_) -
              I1 * (dprime + chi_ + 2 * zeta_ * (ne + 0.5)) * s.alpha_e -
              0.5 * (r_.kappa * (1 + l2_) + r_.kappa_gamma + r_.gamma_plus_delta - r_.gamma * l2_) *
                  s.alpha_e;
  d.alpha_g = -I1 * eps * (1 - 0.5 * l2_) -
              I1 * (dprime - chi_ - 2 * zeta_ * (ng + 0.5)) * s.alpha_g -
              0.5 * (r_.kappa * (1 - l2_) + r_.kappa_gamma + r_.gamma_minus_delta) * s.alpha_g;
  return d;
}

PointerState ReducedModel::pointer_rhs(double t, const PointerState& s) const {
  return pointer_rhs_with(drive(t), s);
}

PointerState ReducedModel::pointer_steady_state() const {
  cplx eps = 0;
  for (const auto& d : p_.drives) {
    if (d.frequency != w_ && d.amplitude != 0) {
      throw InvalidInput("pointer steady state needs all drives at the reference frequency");
    }
    eps += d.peak();
  }
  const double dprime = p_.omega_r - w_ + zeta_;
  const double damp_e = 0.5 * (r_.kappa * (1 + l2_) + r_.kappa_gamma + r_.gamma_plus_delta - r_.gamma * l2_);
  const double damp_g = 0.5 * (r_.kappa * (1 - l2_) + r_.kappa_gamma + r_.gamma_minus_delta);
  PointerState s;
  for (int it = 0; it < 100000; ++it) {
    PointerState nxt;
    nxt.alpha_e = -I1 * eps * (1 + 0.5 * l2_) /
                  (I1 * (dprime + chi_ + 2 * zeta_ * (s.n_e() + 0.5)) + damp_e);
    nxt.alpha_g = -I1 * eps * (1 - 0.5 * l2_) /
                  (I1 * (dprime - chi_ - 2 * zeta_ * (s.n_g() + 0.5)) + damp_g);
    const double change = std::abs(nxt.alpha_e - s.alpha_e) + std::abs(nxt.alpha_g - s.alpha_g);
    s.alpha_e = 0.5 * (s.alpha_e + nxt.alpha_e);
    s.alpha_g = 0.5 * (s.alpha_g + nxt.alpha_g);
    if (it == 0) s = nxt;
    if (change < 1e-13 * std::max(1.0, std::abs(s.alpha_e) + std::abs(s.alpha_g))) {
      const PointerState r = pointer_rhs_with(eps, s);
      const double res = std::abs(r.alpha_e) + std::abs(r.alpha_g);
      if (res > 1e-8 * std::max(1.0, std::abs(eps))) {
        throw SolverFailure("pointer steady state residual " + std::to_string(res));
      }
      return s;
    }
  }
  throw SolverFailure("pointer steady state did not converge (possible bistability)");
}

ReducedRates ReducedModel::rates(double t, const PointerState& s) const {
  const cplx eps = drive(t);
  const double ne = s.n_e(), ng = s.n_g();
  const cplx x = s.alpha_g * std::conj(s.alpha_e);
  const cplx beta = s.beta(), mu = s.mu();
  const double pull = chi_ + zeta_ * (1 + ne + ng);
  ReducedRates r;
  r.omega_a_d = p_.omega_a + chi_ + 2 * pull * x.real() - zeta_ * (ng * ng + ne * ne) +
                l2_ * (eps * std::conj(mu)).real() -
                0.5 * (r_.gamma_minus_delta + r_.gamma_plus_delta - l2_ * r_.gamma) * x.imag();
  r.gamma_d = 2 * pull * x.imag() + l2_ * (eps * std::conj(beta)).imag() +
              0.5 * ((r_.gamma_minus_delta * s.alpha_g - r_.gamma_plus_delta * s.alpha_e +
                      r_.gamma * l2_ * s.alpha_e) *
                     std::conj(beta))
                        .real();
  // 1 / (2 n_crit) = 2 lambda^2
  r.gamma_phi_eff = r_.gamma_phi * (1 - 2 * l2_ * (ne + ng + 1)) + r.gamma_d;
  r.gamma_down = r_.gamma * (1 - 2 * l2_ * (ne + 0.5)) + r_.gamma_kappa + r_.gamma_plus_delta * (ne + 1);
  r.gamma_up = r_.gamma_minus_delta * ng;
  const PointerState ds = pointer_rhs_with(eps, s);
  const cplx dx = ds.alpha_g * std::conj(s.alpha_e) + s.alpha_g * std::conj(ds.alpha_e);
  r.omega_a_appendix = p_.omega_a + chi_ + (eps * (std::conj(beta) + 0.5 * l2_ * std::conj(mu))).real() -
                       zeta_ * (ne * ne + ng * ng) + (r_.kappa + r_.kappa_gamma) * x.imag() + dx.imag();
  return r;
}

Qubit2 ReducedModel::qubit_rhs(const Qubit2& rho, const ReducedRates& r) const {
  // index 0 = g, 1 = e
  Qubit2 d;
  const cplx pee = -r.gamma_down * rho(1, 1) + r.gamma_up * rho(0, 0);
  d(1, 1) = pee;
  d(0, 0) = -pee;
  const double dw = r.omega_a_d - p_.omega_a;
  const double decay = r.gamma_phi_eff + 0.5 * (r.gamma_down + r.gamma_up);
  d(1, 0) = (-I1 * dw - decay) * rho(1, 0);
  d(0, 1) = (I1 * dw - decay) * rho(0, 1);
  return d;
}

namespace {
using RedState = Eigen::Matrix<cplx, 6, 1>;

PointerState ptr_of(const RedState& y) { return {y(0), y(1)}; }
Qubit2 qubit_of(const RedState& y) {
  Qubit2 q;
  q << y(2), y(3), y(4), y(5);
  return q;
}
}  // namespace

ReducedEvolution evolve_reduced(const ReducedModel& m, const Qubit2& rho0, const PointerState& ptr0,
                                std::span<const double> times, const IntegratorOptions& opt) {
  if (times.empty()) throw InvalidInput("empty output grid");
  RedState y;
  y << ptr0.alpha_e, ptr0.alpha_g, rho0(0, 0), rho0(0, 1), rho0(1, 0), rho0(1, 1);
  ReducedEvolution res;
  res.variant = m.variant();
  auto rhs = [&m](double t, const RedState& s, RedState& ds) {
    const PointerState p = ptr_of(s);
    const PointerState dp = m.pointer_rhs(t, p);
    const Qubit2 dq = m.qubit_rhs(qubit_of(s), m.rates(t, p));
    ds << dp.alpha_e, dp.alpha_g, dq(0, 0), dq(0, 1), dq(1, 0), dq(1, 1);
  };
  auto observe = [&](double t, const RedState& s) {
    ReducedSample smp;
    smp.t = t;
    smp.pointer = ptr_of(s);
    smp.qubit = qubit_of(s);
    smp.rates = m.rates(t, smp.pointer);
    res.samples.push_back(smp);
  };
  Dopri5<RedState> integ(rhs, opt);
  integ.integrate(times.front(), y, times, observe);
  res.stats = integ.stats();
  return res;
}

double gamma_eff(const ReducedModel& m, const PointerState& steady) {
  const ReducedRates r = m.rates(1e9, steady);
  return r.gamma_down + r.gamma_up;
}

double sz_steady(const ReducedRates& r) {
  return -(r.gamma_down - r.gamma_up) / (r.gamma_down + r.gamma_up);
}

double sz_steady_bare(double lambda, double sz, double n_mean) {
  return sz / std::sqrt(1 + 4 * lambda * lambda * (n_mean + 0.5 * (sz + 1)));
}

double effective_temperature(double n_bar) {
  if (n_bar <= 0) return 0;
  return 1.0 / std::log1p(1.0 / n_bar);
}

}  // namespace cqed
