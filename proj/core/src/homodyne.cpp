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

#include "cqed/homodyne.hpp"

#include <atomic>
#include <cmath>
#include <mutex>
#include <numbers>
#include <thread>

namespace cqed {

namespace {

double wrap_angle(double a) {
  a = std::remainder(a, kTwoPi);
  return a;
}

cplx effective_separation(const ReducedModel& m, const PointerState& s) {
  return s.beta() + 0.5 * m.lambda2() * s.mu();
}

template <class Fn>
void parallel_for(int count, int workers, Fn&& fn) {
  workers = std::max(1, std::min(workers, count));
  if (workers == 1) {
    for (int i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<int> next{0};
  std::vector<std::jthread> pool;
  std::exception_ptr err;
  std::mutex err_mu;
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (int i = next++; i < count; i = next++) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard lk(err_mu);
          if (!err) err = std::current_exception();
        }
      }
    });
  }
  pool.clear();
  if (err) std::rethrow_exception(err);
}

void hermitize_normalize(Qubit2& q) {
  q = 0.5 * (q + q.adjoint()).eval();
  q /= q.trace().real();
}

Bloch mean_bloch(const std::vector<std::vector<Bloch>>& b, std::size_t k) {
  Bloch m;
  for (const auto& tr : b) {
    m.x += tr[k].x;
    m.y += tr[k].y;
    m.z += tr[k].z;
  }
  const double n = static_cast<double>(b.size());
  return {m.x / n, m.y / n, m.z / n};
}

}  // namespace

MeasurementRates measurement_rates_unchecked(const ReducedModel& m, const PointerState& s, double phi,
                                             double eta) {
  const cplx bt = effective_separation(m, s);
  MeasurementRates r;
  r.gamma_m = m.params().kappa * std::norm(bt);
  r.theta_m = std::abs(bt) == 0 ? phi : wrap_angle(phi - std::arg(bt));
  const double c = std::cos(r.theta_m), sn = std::sin(r.theta_m);
  r.gamma_ci = eta * r.gamma_m * c * c;
  r.gamma_ba = eta * r.gamma_m * sn * sn;
  return r;
}

MeasurementRates measurement_rates(const ReducedModel& m, const PointerState& s, double phi, double eta) {
  if (!(eta >= 0 && eta <= 1)) throw InvalidInput("homodyne.eta must lie in [0, 1]");
  if (std::abs(s.beta()) > 0) {
    const double rel = wrap_angle(phi - std::arg(s.beta()));
    if (rel < -1e-12 || rel > std::numbers::pi / 2 + 1e-12) {
      throw InvalidInput("homodyne.phi: phi - arg(beta) = " + std::to_string(rel) +
                         " lies outside [0, pi/2]");
    }
  }
  return measurement_rates_unchecked(m, s, phi, eta);
}

double optimal_lo_phase(const ReducedModel& m, const PointerState& s) {
  return wrap_angle(std::arg(effective_separation(m, s)));
}

double record_offset(const ReducedModel& m, const PointerState& s, double phi, double eta) {
  const cplx rot = std::exp(-I1 * phi);
  return std::sqrt(m.params().kappa * eta) *
         ((s.mu() * rot).real() + 0.5 * m.lambda2() * (s.beta() * rot).real());
}

double snr(const ReducedModel& m, const PointerState& steady, double phi, double eta) {
  const double ge = gamma_eff(m, steady);
  if (!(ge > 0)) throw InvalidInput("SNR needs a positive effective mixing rate");
  return measurement_rates(m, steady, phi, eta).gamma_ci / ge;
}

std::mt19937_64 trajectory_rng(std::uint64_t seed, std::uint64_t index) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32),
                    0x9e3779b9u};
  return std::mt19937_64(seq);
}

double default_qte_step(const ReducedModel& m, const PointerState& steady, double phi, double eta) {
  double dt = 1e-3;
  auto cap = [&dt](double rate, double factor) {
    if (rate > 0) dt = std::min(dt, 1.0 / (factor * rate));
  };
  cap(m.params().kappa, 100);
  cap(gamma_eff(m, steady), 100);
  cap(measurement_rates_unchecked(m, steady, phi, eta).gamma_m, 50);
  return dt;
}

void simulate_reduced_trajectory(const ReducedModel& m, Qubit2 rho, PointerState ptr, double t0,
                                 double duration, double dt, double phi, double eta, std::mt19937_64& rng,
                                 const ReducedStepObserver& obs) {
  std::normal_distribution<double> normal;
  std::uniform_real_distribution<double> uniform;
  const long steps = std::lround(duration / dt);
  const double sdt = std::sqrt(dt);
  auto padd = [](const PointerState& a, const PointerState& b, double h) {
    return PointerState{a.alpha_e + h * b.alpha_e, a.alpha_g + h * b.alpha_g};
  };
  for (long k = 0; k < steps; ++k) {
    const double t = t0 + k * dt;
    const ReducedRates r = m.rates(t, ptr);
    const MeasurementRates mr = measurement_rates_unchecked(m, ptr, phi, eta);
    // Operator splitting, each factor exact. Flips and the dephasing not
    // produced by the measurement back-action: closed-form two-level solution.
    const double flip = r.gamma_down + r.gamma_up;
    if (flip > 0) {
      const double pe_inf = r.gamma_up / flip;
      const double pe = pe_inf + (rho(1, 1).real() - pe_inf) * std::exp(-flip * dt);
      rho(1, 1) = pe;
      rho(0, 0) = 1 - pe;
    }
    const double decay = r.gamma_phi_eff + 0.5 * flip - 0.5 * (mr.gamma_ci + mr.gamma_ba);
    rho(1, 0) *= std::exp(cplx(-decay, -(r.omega_a_d - m.params().omega_a)) * dt);
    // Measurement of sigma_z = diag(-1, +1) with record dJ: Kraus exp(sqrt(Gamma_ci) dJ sigma_z / 2).
    // dJ is drawn from its exact two-Gaussian law, so the update is the Bayes
    // filter and stays a martingale even when Gamma_ci dt is not small.
    const double sz = (rho(1, 1) - rho(0, 0)).real();
    const double level = uniform(rng) < rho(1, 1).real() ? 1.0 : -1.0;
    const double dj = std::sqrt(mr.gamma_ci) * level * dt + sdt * normal(rng);
    const double dw = dj - std::sqrt(mr.gamma_ci) * sz * dt;
    const double a = std::sqrt(mr.gamma_ci) * dj;
    rho(1, 1) *= std::exp(a);
    rho(0, 0) *= std::exp(-a);
    // Back-action phase kick exp(-i sqrt(Gamma_ba) dW sigma_z / 2).
    rho(1, 0) *= std::exp(cplx(0, -std::sqrt(mr.gamma_ba) * dw));
    rho(0, 1) = std::conj(rho(1, 0));
    hermitize_normalize(rho);
    // Pointer states are deterministic: one RK4 step.
    const PointerState k1 = m.pointer_rhs(t, ptr);
    const PointerState k2 = m.pointer_rhs(t + dt / 2, padd(ptr, k1, dt / 2));
    const PointerState k3 = m.pointer_rhs(t + dt / 2, padd(ptr, k2, dt / 2));
    const PointerState k4 = m.pointer_rhs(t + dt, padd(ptr, k3, dt));
    ptr.alpha_e += dt / 6 * (k1.alpha_e + 2.0 * k2.alpha_e + 2.0 * k3.alpha_e + k4.alpha_e);
    ptr.alpha_g += dt / 6 * (k1.alpha_g + 2.0 * k2.alpha_g + 2.0 * k3.alpha_g + k4.alpha_g);
    obs(t + dt, rho, mr, dj);
  }
}

TrajectorySet run_reduced_trajectories(const ReducedModel& m, const Qubit2& rho0, const PointerState& ptr0,
                                       std::span<const double> times, const HomodyneConfig& cfg) {
  if (times.size() < 2) throw InvalidInput("trajectory output grid needs >= 2 points");
  if (cfg.n_traj < 1) throw InvalidInput("homodyne.trajectories must be >= 1");
  if (!(cfg.eta >= 0 && cfg.eta <= 1)) throw InvalidInput("homodyne.eta must lie in [0, 1]");
  TrajectorySet out;
  out.times.assign(times.begin(), times.end());
  out.dt = cfg.dt > 0 ? cfg.dt : default_qte_step(m, m.pointer_steady_state(), cfg.phi, cfg.eta);
  const double dt = out.dt;
  const std::size_t ns = times.size();
  out.bloch.assign(cfg.n_traj, std::vector<Bloch>(ns));
  out.record.assign(cfg.n_traj, std::vector<double>(ns, 0.0));
  parallel_for(cfg.n_traj, cfg.workers, [&](int idx) {
    auto rng = trajectory_rng(cfg.seed, static_cast<std::uint64_t>(idx));
    auto& bl = out.bloch[idx];
    auto& rec = out.record[idx];
    bl[0] = bloch_vector(rho0);
    std::size_t next = 1;
    double acc = 0, acc_t = 0;
    simulate_reduced_trajectory(
        m, rho0, ptr0, times.front(), times.back() - times.front(), dt, cfg.phi, cfg.eta, rng,
        [&](double t, const Qubit2& rho, const MeasurementRates&, double djbar) {
          acc += djbar;
          acc_t += dt;
          while (next < ns && t >= times[next] - 0.5 * dt) {
            bl[next] = bloch_vector(rho);
            rec[next] = acc_t > 0 ? acc / acc_t : 0.0;
            acc = acc_t = 0;
            ++next;
          }
        });
    for (; next < ns; ++next) bl[next] = bl[next - 1];
  });
  // The full record adds the mean-field part, a deterministic function of time.
  {
    std::vector<double> offs(ns, 0.0);
    std::vector<double> grid(times.begin(), times.end());
    const auto ev = evolve_reduced(m, rho0, ptr0, grid);
    for (std::size_t k = 0; k < ns; ++k) offs[k] = record_offset(m, ev.samples[k].pointer, cfg.phi, cfg.eta);
    for (auto& rec : out.record) {
      for (std::size_t k = 1; k < ns; ++k) rec[k] += offs[k];
    }
  }
  out.ensemble_mean.resize(ns);
  for (std::size_t k = 0; k < ns; ++k) out.ensemble_mean[k] = mean_bloch(out.bloch, k);
  return out;
}

TrajectorySet run_full_trajectories(const HilbertDims& d, const SystemParams& p,
                                    const DenseOperator& rho0, std::span<const double> times,
                                    const HomodyneConfig& cfg) {
  if (times.size() < 2) throw InvalidInput("trajectory output grid needs >= 2 points");
  if (cfg.n_traj < 1) throw InvalidInput("homodyne.trajectories must be >= 1");
  if (!(cfg.eta >= 0 && cfg.eta <= 1)) throw InvalidInput("homodyne.eta must lie in [0, 1]");
  DispersiveOptions dopt;
  dopt.qubit_drive_line = false;
  const LindbladGenerator gen = rhs_dispersive(d, p, dopt);
  const double l2 = p.lambda() * p.lambda();
  const SparseOp a = elementary_sparse(d, OperatorName::a);
  const SparseOp ad = elementary_sparse(d, OperatorName::a_dag);
  SparseOp dress(d.total(), d.total());
  dress.setIdentity();
  dress += 0.5 * l2 * elementary_sparse(d, OperatorName::sigma_z);
  const cplx e = std::exp(-I1 * cfg.phi);
  const BandedOp c(SparseOp(0.5 * (e * a + std::conj(e) * ad) * dress));
  const BandedOp q(SparseOp(0.5 * (-I1 * e * a + I1 * std::conj(e) * ad) * dress));
  const double sk = std::sqrt(p.kappa * cfg.eta);

  TrajectorySet out;
  out.times.assign(times.begin(), times.end());
  if (cfg.dt > 0) {
    out.dt = cfg.dt;
  } else {
    const ReducedModel rm(p, ReducedVariant::nonlinear);
    out.dt = default_qte_step(rm, rm.pointer_steady_state(), cfg.phi, cfg.eta);
  }
  const double dt = out.dt;
  const std::size_t ns = times.size();
  out.bloch.assign(cfg.n_traj, std::vector<Bloch>(ns));
  out.record.assign(cfg.n_traj, std::vector<double>(ns, 0.0));
  parallel_for(cfg.n_traj, cfg.workers, [&](int idx) {
    auto rng = trajectory_rng(cfg.seed, static_cast<std::uint64_t>(idx));
    std::normal_distribution<double> normal;
    Matrix rho = rho0.matrix();
    Matrix lr, cr, qr;
    auto& bl = out.bloch[idx];
    auto& rec = out.record[idx];
    bl[0] = bloch_vector(partial_trace_resonator(DenseOperator(d, rho)));
    std::size_t next = 1;
    double acc = 0, acc_t = 0;
    const long steps = std::lround((times.back() - times.front()) / dt);
    for (long k = 0; k < steps; ++k) {
      const double t = times.front() + k * dt;
      const double dw = std::sqrt(dt) * normal(rng);
      gen.apply_hermitian(t, rho, lr);
      cr.setZero(d.total(), d.total());
      c.left_apply(rho, cr);
      qr.setZero(d.total(), d.total());
      q.left_apply(rho, qr);
      const double cexp = cr.trace().real();
      rho += dt * lr + (sk * dw) * (cr + cr.adjoint() - 2 * cexp * rho) + (I1 * sk * dw) * (qr - qr.adjoint());
      rho = 0.5 * (rho + rho.adjoint()).eval();
      rho /= rho.trace().real();
      acc += 2 * sk * cexp * dt + dw;
      acc_t += dt;
      const double tn = t + dt;
      while (next < ns && tn >= times[next] - 0.5 * dt) {
        bl[next] = bloch_vector(partial_trace_resonator(DenseOperator(d, rho)));
        rec[next] = acc / acc_t;
        acc = acc_t = 0;
        ++next;
      }
    }
    for (; next < ns; ++next) bl[next] = bl[next - 1];
  });
  out.ensemble_mean.resize(ns);
  for (std::size_t k = 0; k < ns; ++k) out.ensemble_mean[k] = mean_bloch(out.bloch, k);
  return out;
}

TelegraphStats telegraph_statistics(const ReducedModel& m, const PointerState& steady, double duration,
                                    double phi, double eta, double dt, double window, double threshold,
                                    std::uint64_t seed, int bins) {
  TelegraphStats st;
  const int w = std::max(1, static_cast<int>(std::lround(window / dt)) | 1);
  std::vector<double> ring(w, 0.0);
  double sum = 0;
  long filled = 0;
  int state = 0;  // +1 up, -1 down, 0 not yet known
  double last_switch = -1;
  st.histogram.assign(bins, 0.0);
  for (int b = 0; b < bins; ++b) st.bin_centers.push_back(-1.0 + (b + 0.5) * 2.0 / bins);
  long counted = 0;
  auto rng = trajectory_rng(seed, 0);
  Qubit2 rho = Qubit2::Zero();
  rho(0, 0) = 1.0;
  simulate_reduced_trajectory(
      m, rho, steady, 0.0, duration, dt, phi, eta, rng,
      [&](double t, const Qubit2& r, const MeasurementRates&, double) {
        const double sz = (r(1, 1) - r(0, 0)).real();
        sum += sz - ring[filled % w];
        ring[filled % w] = sz;
        ++filled;
        if (filled < w) return;
        const double avg = sum / w;
        const double tc = t - 0.5 * (w - 1) * dt;  // centre of the window
        const int b = std::clamp(static_cast<int>((avg + 1.0) / 2.0 * bins), 0, bins - 1);
        st.histogram[b] += 1;
        ++counted;
        int ns = state;
        if (avg > threshold) ns = 1;
        if (avg < -threshold) ns = -1;
        if (ns != state) {
          if (state != 0 && last_switch >= 0) {
            (state == 1 ? st.up_dwell : st.down_dwell).push_back(tc - last_switch);
          }
          if (state != 0) {
            ++st.jumps;
            last_switch = tc;
          }
          state = ns;
        }
      });
  for (auto& h : st.histogram) h /= std::max<long>(1, counted);
  return st;
}

}  // namespace cqed
