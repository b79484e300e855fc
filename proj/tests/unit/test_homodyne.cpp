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
#include <numbers>

#include "cqed/homodyne.hpp"
#include "fixtures.hpp"

using namespace cqed;

namespace {

ReducedModel model(double eps_mhz, double gamma_phi_mhz = 0.3, ReducedVariant v = ReducedVariant::nonlinear) {
  return ReducedModel(testing::fig2_params(eps_mhz, false, gamma_phi_mhz), v);
}

std::vector<double> grid(double t1, int n) {
  std::vector<double> t(n + 1);
  for (int i = 0; i <= n; ++i) t[i] = t1 * i / n;
  return t;
}

}  // namespace

TEST_CASE("measurement rates decompose into information and back-action") {
  const auto m = model(10.0);
  std::mt19937_64 rng(4);
  std::normal_distribution<double> nd;
  for (int k = 0; k < 50; ++k) {
    const PointerState s{cplx(nd(rng), nd(rng)), cplx(nd(rng), nd(rng))};
    const double eta = 0.1 + 0.9 * (k % 10) / 9.0;
    const auto r = measurement_rates_unchecked(m, s, nd(rng), eta);
    CHECK(std::abs(r.gamma_ci + r.gamma_ba - eta * r.gamma_m) < 1e-12 * r.gamma_m);
  }
}

TEST_CASE("measurement rates follow the closed-form expansion in 1/n_crit") {
  const auto m = model(10.0);
  const auto s = m.pointer_steady_state();
  const double nc = m.params().dispersive().n_crit;
  const double b = std::abs(s.beta()), mu = std::abs(s.mu());
  const double tb = std::arg(s.beta()), tm = std::arg(s.mu());
  const double phi = optimal_lo_phase(m, s) + 0.3;
  const auto r = measurement_rates(m, s, phi, 1.0);
  const double gm = m.params().kappa * b * b *
                    (1 + mu * std::cos(tb - tm) / (4 * b * nc) + mu * mu / (64 * b * b * nc * nc));
  const double th = phi - tb + std::imag(std::log(1.0 + mu * std::exp(I1 * (tb - tm)) / (8 * b * nc)));
  CHECK(r.gamma_m == doctest::Approx(gm).epsilon(1e-12));
  CHECK(r.theta_m == doctest::Approx(th).epsilon(1e-12));
}

TEST_CASE("optimal local-oscillator phase removes back-action") {
  const auto m = model(10.0);
  const auto s = m.pointer_steady_state();
  const auto r = measurement_rates(m, s, optimal_lo_phase(m, s), 1.0);
  CHECK(r.gamma_ba < 1e-12 * r.gamma_m);
  CHECK(r.gamma_ci == doctest::Approx(r.gamma_m));
}

TEST_CASE("nonlinear measurement rate lies below the linear-model rate") {
  const auto nl = model(10.0), ln = model(10.0, 0.3, ReducedVariant::linear);
  const auto snl = nl.pointer_steady_state(), sln = ln.pointer_steady_state();
  const double gm_nl = measurement_rates(nl, snl, optimal_lo_phase(nl, snl), 1.0).gamma_m;
  const double gm_lin = ln.params().kappa * std::norm(sln.beta());
  CHECK(gm_nl < gm_lin);
}

TEST_CASE("linear model: Gamma_m = kappa |beta|^2 and theta_m = phi - arg beta") {
  const auto m = model(7.0, 0.3, ReducedVariant::linear);
  const auto s = m.pointer_steady_state();
  const double phi = std::arg(s.beta()) + 0.4;
  const auto r = measurement_rates(m, s, phi, 1.0);
  CHECK(r.gamma_m == doctest::Approx(m.params().kappa * std::norm(s.beta())).epsilon(1e-14));
  CHECK(r.theta_m == doctest::Approx(0.4).epsilon(1e-12));
}

TEST_CASE("measurement rate input checks") {
  const auto m = model(10.0);
  const auto s = m.pointer_steady_state();
  const double base = std::arg(s.beta());
  CHECK_THROWS_AS(measurement_rates(m, s, base - 0.3, 1.0), InvalidInput);
  CHECK_THROWS_AS(measurement_rates(m, s, base + 2.0, 1.0), InvalidInput);
  CHECK_THROWS_AS(measurement_rates(m, s, base + 0.1, 1.5), InvalidInput);
  CHECK(measurement_rates(m, {}, 1.0, 1.0).gamma_m == 0);
}

TEST_CASE("record offset") {
  const auto m = model(10.0);
  CHECK(record_offset(m, {}, 0.3, 1.0) == 0);
  const auto lin = model(10.0, 0.3, ReducedVariant::linear);
  const auto s = lin.pointer_steady_state();
  const double phi = 0.7;
  CHECK(record_offset(lin, s, phi, 0.5) ==
        doctest::Approx(std::sqrt(lin.params().kappa * 0.5) * std::abs(s.mu()) * std::cos(std::arg(s.mu()) - phi)));
  // the nonlinear offset adds (lambda^2 / 2) |beta| cos(theta_beta - phi)
  const auto sn = m.pointer_steady_state();
  const double want = std::sqrt(m.params().kappa) * (std::abs(sn.mu()) * std::cos(std::arg(sn.mu()) - phi) +
                                                      0.5 * m.lambda2() * std::abs(sn.beta()) *
                                                          std::cos(std::arg(sn.beta()) - phi));
  CHECK(record_offset(m, sn, phi, 1.0) == doctest::Approx(want).epsilon(1e-12));
  // J -> Jbar -> J round trip
  const double jbar = 0.1234;
  const double j = jbar + record_offset(m, sn, phi, 1.0);
  CHECK(std::abs((j - record_offset(m, sn, phi, 1.0)) - jbar) < 1e-12);
}

TEST_CASE("signal-to-noise ratio") {
  const auto m0 = model(0.0);
  CHECK(snr(m0, m0.pointer_steady_state(), 0.0, 1.0) == 0);
  const auto m = model(10.0);
  const auto s = m.pointer_steady_state();
  const double phi = optimal_lo_phase(m, s);
  CHECK(snr(m, s, phi, 1.0) == doctest::Approx(2 * snr(m, s, phi, 0.5)));

  // slope of SNR(n) at n ~ 100 below the slope at n ~ 10 for the nonlinear model;
  // the linear model is linear in n
  auto point = [](double eps, ReducedVariant v) {
    const auto mm = model(eps, 0.3, v);
    const auto ss = mm.pointer_steady_state();
    return std::pair{0.5 * (ss.n_e() + ss.n_g()), snr(mm, ss, optimal_lo_phase(mm, ss), 1.0)};
  };
  auto slope = [&](double n, ReducedVariant v) {
    const double e = 10.0 * std::sqrt(n / 34.0);
    const auto a = point(0.98 * e, v), b = point(1.02 * e, v);
    return (b.second - a.second) / (b.first - a.first);
  };
  CHECK(slope(100, ReducedVariant::nonlinear) < slope(10, ReducedVariant::nonlinear));
  CHECK(slope(100, ReducedVariant::linear) == doctest::Approx(slope(10, ReducedVariant::linear)).epsilon(1e-9));
}

TEST_CASE("trajectory streams are reproducible and independent of worker count") {
  auto a = trajectory_rng(42, 7), b = trajectory_rng(42, 7), c = trajectory_rng(42, 8);
  const auto x = a();
  CHECK(x == b());
  CHECK(x != c());

  const ReducedModel m(testing::fig2_params(10.0, true), ReducedVariant::nonlinear);
  HomodyneConfig cfg;
  cfg.n_traj = 12;
  cfg.seed = 99;
  cfg.dt = 2e-3;
  const auto ts = grid(0.5, 10);
  const Qubit2 rho0 = qubit_from_bloch({1, 0, 0});
  cfg.workers = 1;
  const auto r1 = run_reduced_trajectories(m, rho0, {}, ts, cfg);
  cfg.workers = 4;
  const auto r4 = run_reduced_trajectories(m, rho0, {}, ts, cfg);
  for (int i = 0; i < cfg.n_traj; ++i)
    for (std::size_t k = 0; k < ts.size(); ++k) {
      CHECK(r1.bloch[i][k].x == r4.bloch[i][k].x);
      CHECK(r1.bloch[i][k].z == r4.bloch[i][k].z);
      CHECK(r1.record[i][k] == r4.record[i][k]);
    }
}

TEST_CASE("reduced trajectories without detection follow the master equation") {
  const ReducedModel m(testing::fig2_params(10.0, true), ReducedVariant::nonlinear);
  HomodyneConfig cfg;
  cfg.eta = 0;
  cfg.n_traj = 2;
  cfg.dt = 1e-4;
  const auto ts = grid(1.0, 10);
  const Qubit2 rho0 = qubit_from_bloch({1, 0, 0});
  const auto tr = run_reduced_trajectories(m, rho0, {}, ts, cfg);
  const auto me = evolve_reduced(m, rho0, {}, ts);
  for (std::size_t k = 0; k < ts.size(); ++k) {
    CHECK(bloch_distance(tr.bloch[0][k], bloch_vector(me.samples[k].qubit)) < 5e-3);
  }
}

TEST_CASE("reduced ensemble mean converges to the master equation") {
  const ReducedModel m(testing::fig2_params(10.0, true), ReducedVariant::nonlinear);
  HomodyneConfig cfg;
  cfg.n_traj = 300;
  cfg.seed = 5;
  cfg.dt = 1e-3;
  const auto ts = grid(2.0, 20);
  const Qubit2 rho0 = qubit_from_bloch({1, 0, 0});
  const auto tr = run_reduced_trajectories(m, rho0, {}, ts, cfg);
  const auto me = evolve_reduced(m, rho0, {}, ts);
  double worst = 0;
  for (std::size_t k = 0; k < ts.size(); ++k) {
    worst = std::max(worst, bloch_distance(tr.ensemble_mean[k], bloch_vector(me.samples[k].qubit)));
  }
  CHECK(worst < 4 / std::sqrt(300.0));
  // record noise is white: mean near the deterministic offset, variance ~ 1 / sample interval
  double mean = 0, var = 0;
  const double dts = ts[1] - ts[0];
  long n = 0;
  for (const auto& rec : tr.record) {
    const double jbar = rec[1] - record_offset(m, me.samples[1].pointer, 0.0, 1.0);
    mean += jbar;
    var += jbar * jbar;
    ++n;
  }
  mean /= n;
  var = var / n - mean * mean;
  CHECK(var * dts == doctest::Approx(1.0).epsilon(0.25));
}

TEST_CASE("full trajectories without detection reduce to the dispersive master equation") {
  HilbertDims d(18);
  SystemParams p = testing::small_params(0.3);
  HomodyneConfig cfg;
  cfg.eta = 0;
  cfg.n_traj = 1;
  cfg.dt = 2e-4;
  const auto ts = grid(1.0, 5);
  const auto rho0 = product_state(d, Eigen::Vector2cd(1, 1) / std::sqrt(2.0));
  const auto tr = run_full_trajectories(d, p, rho0, ts, cfg);
  EvolveOptions o;
  o.dispersive.qubit_drive_line = false;
  // rho0 is taken in the dispersive basis by the trajectory runner
  const auto u = dispersive_unitary(d, p.lambda());
  const auto me = evolve(ModelTier::dispersive, d, p, u * rho0 * u.adjoint(), ts, o);
  for (std::size_t k = 0; k < ts.size(); ++k) {
    CHECK(bloch_distance(tr.bloch[0][k], bloch_vector(me.samples[k].qubit_dispersive)) < 2e-3);
  }
}

TEST_CASE("telegraph statistics in a strongly measured run") {
  const ReducedModel m(testing::fig2_params(20.0, false, 0.5), ReducedVariant::nonlinear);
  const auto s = m.pointer_steady_state();
  const double phi = optimal_lo_phase(m, s);
  const auto mr = measurement_rates(m, s, phi, 1.0);
  const auto st = telegraph_statistics(m, s, 60.0, phi, 1.0, 2e-4, 10 / mr.gamma_ci, 0.5, 3);
  double total = 0;
  for (double h : st.histogram) total += h;
  CHECK(total == doctest::Approx(1.0));
  CHECK(st.jumps > 3);
  // most of the weight sits near the poles
  double poles = 0;
  for (std::size_t b = 0; b < st.histogram.size(); ++b) {
    if (std::abs(st.bin_centers[b]) > 0.7) poles += st.histogram[b];
  }
  CHECK(poles > 0.8);
}

TEST_CASE("strong-measurement steps stay positive and keep the excited population a martingale") {
  // Gamma_ci dt ~ 1: one step from a mixed state must stay a state and leave the mean
  // of rho_ee unchanged up to the flips, whatever the step size.
  const ReducedModel m(testing::fig2_params(20.0, false, 0.5), ReducedVariant::nonlinear);
  const auto s = m.pointer_steady_state();
  const double phi = optimal_lo_phase(m, s);
  const auto r = m.rates(0, s);
  for (double dt : {2e-5, 2e-4, 1e-3}) {
    auto rng = trajectory_rng(9, 0);
    const int n = 40000;
    double sum = 0, lowest = 1, highest = 0;
    Qubit2 rho0 = Qubit2::Zero();
    rho0(0, 0) = 0.7;
    rho0(1, 1) = 0.3;
    for (int k = 0; k < n; ++k) {
      simulate_reduced_trajectory(m, rho0, s, 0.0, dt, dt, phi, 1.0, rng,
                                  [&](double, const Qubit2& rho, const MeasurementRates&, double) {
                                    sum += rho(1, 1).real();
                                    lowest = std::min(lowest, rho(1, 1).real());
                                    highest = std::max(highest, rho(1, 1).real());
                                  });
    }
    const double flip = r.gamma_down + r.gamma_up;
    const double want = r.gamma_up / flip + (0.3 - r.gamma_up / flip) * std::exp(-flip * dt);
    // binomial spread of the collapsed outcomes: sqrt(0.3 * 0.7 / n) ~ 2.3e-3
    CHECK(sum / n == doctest::Approx(want).epsilon(0.04));
    CHECK(lowest >= 0);
    CHECK(highest <= 1);
  }
}
