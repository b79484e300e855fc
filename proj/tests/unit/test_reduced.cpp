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

#include <doctest.h>

#include <cmath>

#include "cqed/reduced.hpp"
#include "fixtures.hpp"

using namespace cqed;

namespace {

ReducedModel model(double eps_mhz, double gamma_phi_mhz = 0.3, ReducedVariant v = ReducedVariant::nonlinear) {
  return ReducedModel(testing::fig2_params(eps_mhz, false, gamma_phi_mhz), v);
}

double n_mean(const PointerState& s) { return 0.5 * (s.n_e() + s.n_g()); }

}  // namespace

TEST_CASE("variant names") {
  CHECK(parse_reduced_variant("reduced_linear") == ReducedVariant::linear);
  CHECK(parse_reduced_variant("nonlinear") == ReducedVariant::nonlinear);
  CHECK_THROWS_AS(parse_reduced_variant("quadratic"), InvalidInput);
}

TEST_CASE("pointer equations") {
  const auto m = model(0.0);
  const auto d = m.pointer_rhs(0.3, {});
  CHECK(std::abs(d.alpha_e) == 0);
  CHECK(std::abs(d.alpha_g) == 0);
  const auto s = m.pointer_steady_state();
  CHECK(std::abs(s.alpha_e) == 0);
  CHECK(std::abs(s.alpha_g) == 0);
}

TEST_CASE("linear pointer states are the standard Lorentzians") {
  const auto m = model(10.0, 0.3, ReducedVariant::linear);
  const double eps = mhz_to_rad_us(10), chi = mhz_to_rad_us(50) * 0.025, k = mhz_to_rad_us(2.5);
  const auto s = m.pointer_steady_state();
  CHECK(std::abs(s.alpha_e - (-I1 * eps / (I1 * chi + 0.5 * k))) < 1e-10 * std::abs(s.alpha_e));
  CHECK(std::abs(s.alpha_g - (-I1 * eps / (-I1 * chi + 0.5 * k))) < 1e-10 * std::abs(s.alpha_g));
}

TEST_CASE("nonlinear pointer steady state solves the pointer equations and is reached dynamically") {
  const auto m = model(10.0);
  const auto s = m.pointer_steady_state();
  const auto r = m.pointer_rhs(0.0, s);
  CHECK(std::abs(r.alpha_e) + std::abs(r.alpha_g) < 1e-10 * mhz_to_rad_us(10));
  // steady photon number at the fig2.cfg drive
  CHECK(n_mean(s) == doctest::Approx(34).epsilon(2.0 / 34));
  // independent oracle: integrate the pointer equations from vacuum
  std::vector<double> ts{0.0, 8.0};
  const auto ev = evolve_reduced(m, qubit_from_bloch({0, 0, -1}), {}, ts);
  const auto& last = ev.samples.back().pointer;
  CHECK(std::abs(last.alpha_e - s.alpha_e) < 1e-6 * std::abs(s.alpha_e));
  CHECK(std::abs(last.alpha_g - s.alpha_g) < 1e-6 * std::abs(s.alpha_g));
}

TEST_CASE("driving at the excited-state resonator frequency fills only the excited pointer") {
  SystemParams p = testing::fig2_params(2.0);
  p.drives[0].frequency = p.omega_r + p.dispersive().chi;
  const auto s = ReducedModel(p, ReducedVariant::nonlinear).pointer_steady_state();
  CHECK(s.n_e() > 4 * s.n_g());
}

TEST_CASE("rate formulas at the quoted examples") {
  const auto m = model(10.0);
  const auto r0 = m.rates(0.0, {});
  const double l2 = 0.025 * 0.025;
  const double want = mhz_to_rad_us(0.1) * (1 - l2) + l2 * mhz_to_rad_us(2.5) + 2 * l2 * mhz_to_rad_us(0.3);
  CHECK(r0.gamma_down == doctest::Approx(want).epsilon(1e-12));
  CHECK(rad_us_to_mhz(r0.gamma_down) == doctest::Approx(0.1019).epsilon(1e-3));
  CHECK(r0.gamma_up == 0);
  CHECK(r0.gamma_d == doctest::Approx(0).scale(1));

  const double a = std::sqrt(34.0);
  PointerState s{a, a};
  const auto r = m.rates(0.0, s);
  CHECK(rad_us_to_mhz(r.gamma_up) == doctest::Approx(0.01275).epsilon(1e-9));
  CHECK(sz_steady(r) == doctest::Approx(-0.0976 / 0.1231).epsilon(2e-3));
  CHECK(r.gamma_down >= 0);
}

TEST_CASE("linear variant is the lambda -> 0 reduction") {
  const auto lin = model(10.0, 0.3, ReducedVariant::linear);
  CHECK(lin.lambda2() == 0);
  CHECK(lin.zeta() == 0);
  const auto s = lin.pointer_steady_state();
  const auto r = lin.rates(0.0, s);
  CHECK(r.gamma_down == doctest::Approx(mhz_to_rad_us(0.1)).epsilon(1e-14));
  CHECK(r.gamma_up == 0);
  // Gamma_d of the linear model: 2 chi Im[alpha_g alpha_e^*]
  CHECK(r.gamma_d == doctest::Approx(2 * lin.chi() * std::imag(s.alpha_g * std::conj(s.alpha_e))).epsilon(1e-12));

  // the nonlinear model approaches the linear one as O(lambda^2)
  auto gap = [](double lam) {
    SystemParams p = testing::fig2_params(1.0);
    p.omega_a = p.omega_r + p.g / lam;
    const ReducedModel nl(p, ReducedVariant::nonlinear), ln(p, ReducedVariant::linear);
    const auto rn = nl.rates(0, nl.pointer_steady_state()), rl = ln.rates(0, ln.pointer_steady_state());
    return std::abs(rn.gamma_down - rl.gamma_down) + std::abs(rn.gamma_phi_eff - rl.gamma_phi_eff) +
           std::abs(rn.omega_a_d - rl.omega_a_d);
  };
  CHECK(gap(2e-2) / gap(1e-2) > 3.5);
  CHECK(gap(1e-3) < 1e-3 * mhz_to_rad_us(0.1));
}

TEST_CASE("reduced qubit generator") {
  const auto m = model(10.0);
  ReducedRates r;
  r.omega_a_d = m.params().omega_a + 0.7;
  r.gamma_phi_eff = 0.2;
  r.gamma_down = 0.5;
  r.gamma_up = 0.1;
  const Qubit2 rho = qubit_from_bloch({0.3, -0.2, 0.4});
  const Qubit2 d = m.qubit_rhs(rho, r);
  CHECK(std::abs(d.trace()) < 1e-15);
  // pure coherence decays at gamma_phi_eff + (gamma_down + gamma_up) / 2
  const Qubit2 coh = qubit_from_bloch({1, 0, 0});
  const Qubit2 dc = m.qubit_rhs(coh, r);
  CHECK(std::real(dc(1, 0) / coh(1, 0)) == doctest::Approx(-(0.2 + 0.3)));
  CHECK(std::imag(dc(1, 0) / coh(1, 0)) == doctest::Approx(-0.7));

  r.gamma_up = r.gamma_down;
  CHECK(std::abs(m.qubit_rhs(0.5 * Qubit2::Identity(), r)(1, 1)) < 1e-15);
  r.gamma_up = 0;
  const Qubit2 g = qubit_from_bloch({0, 0, -1});
  CHECK(m.qubit_rhs(g, r).norm() < 1e-15);
}

TEST_CASE("effective mixing rate and its photon-number dichotomy") {
  const double l2 = 0.025 * 0.025;
  CHECK(gamma_eff(model(0.0), {}) ==
        doctest::Approx(mhz_to_rad_us(0.1) * (1 - l2) + l2 * mhz_to_rad_us(2.5) + 2 * l2 * mhz_to_rad_us(0.3)));

  auto sweep = [](double gphi) {
    std::vector<double> g;
    for (double e = 0; e <= 20.0; e += 2.0) {
      const auto m = model(e, gphi);
      g.push_back(gamma_eff(m, m.pointer_steady_state()));
    }
    return g;
  };
  const auto g0 = sweep(0.0);
  for (std::size_t i = 1; i < g0.size(); ++i) CHECK(g0[i] < g0[i - 1]);
  const auto g5 = sweep(0.5);
  for (std::size_t i = 1; i < g5.size(); ++i) CHECK(g5[i] > g5[i - 1]);
  const auto gf = sweep(0.05);
  const auto [lo, hi] = std::minmax_element(gf.begin(), gf.end());
  CHECK((*hi - *lo) / *lo < 0.03);
}

TEST_CASE("steady-state polarization") {
  ReducedRates r;
  r.gamma_down = 1;
  r.gamma_up = 0;
  CHECK(sz_steady(r) == -1);
  CHECK(sz_steady_bare(0.0, -1, 10) == -1);
  CHECK(sz_steady_bare(0.025, -1, 34) == doctest::Approx(-1 / std::sqrt(1 + 4 * 0.025 * 0.025 * 34)));

  // the deviation from -1 is smaller when driving at the excited-state pull
  SystemParams on = testing::fig2_params(5.0);
  SystemParams pulled = on;
  pulled.drives[0].frequency = on.omega_r + on.dispersive().chi;
  const ReducedModel mo(on, ReducedVariant::nonlinear), mp(pulled, ReducedVariant::nonlinear);
  const double so = sz_steady(mo.rates(0, mo.pointer_steady_state()));
  const double spu = sz_steady(mp.rates(0, mp.pointer_steady_state()));
  CHECK(spu < so);
}

TEST_CASE("effective bath temperature") {
  CHECK(effective_temperature(0) == 0);
  CHECK(effective_temperature(1e-9) < 0.1);
  CHECK(effective_temperature(1 / (std::exp(1.0) - 1)) == doctest::Approx(1));
  CHECK(effective_temperature(34) == doctest::Approx(34.4975).epsilon(1e-4));
}

TEST_CASE("reduced evolution stays a valid state on the fig2.cfg run") {
  const ReducedModel m(testing::fig2_params(10.0, true), ReducedVariant::nonlinear);
  std::vector<double> ts;
  for (int i = 0; i <= 200; ++i) ts.push_back(0.03 * i);
  const auto ev = evolve_reduced(m, qubit_from_bloch({1, 0, 0}), {}, ts);
  for (const auto& s : ev.samples) {
    const Bloch b = bloch_vector(s.qubit);
    CHECK(b.x * b.x + b.y * b.y + b.z * b.z <= 1 + 1e-9);
    CHECK(std::abs(s.qubit.trace() - 1.0) < 1e-12);
  }
}
