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

#include <algorithm>
#include <cmath>
#include <functional>
#include <span>
#include <string>

#include "cqed/common.hpp"

namespace cqed {

struct IntegratorOptions {
  double rtol = 1e-8;
  double atol = 1e-10;
  double h_init = 0;      // 0 selects an automatic first step
  double h_max = 0;       // 0 means unbounded
  double h_min = 1e-14;
  long max_steps = 50'000'000;
};

struct IntegratorStats {
  long accepted = 0;
  long rejected = 0;
  long rhs_calls = 0;
};

// Embedded Dormand-Prince 5(4) with FSAL and the standard fourth-order dense
// output. State is any Eigen dense type.
template <class State>
class Dopri5 {
 public:
  using Rhs = std::function<void(double, const State&, State&)>;
  using Observer = std::function<void(double, const State&)>;
  // Called after every accepted step; may adjust the state (e.g. re-Hermitize)
  // and throw to abort.
  using PostStep = std::function<void(double, State&)>;

  Dopri5(Rhs rhs, IntegratorOptions opt) : rhs_(std::move(rhs)), opt_(opt) {}

  const IntegratorStats& stats() const { return stats_; }

  void integrate(double t0, State& y, std::span<const double> out_times, const Observer& observe,
                 const PostStep& post = nullptr) {
    if (out_times.empty()) return;
    const double t_end = out_times.back();
    std::size_t next = 0;
    while (next < out_times.size() && out_times[next] <= t0) {
      observe(out_times[next], y);
      ++next;
    }
    double t = t0;
    eval(t, y, k1_);
    double h = opt_.h_init > 0 ? opt_.h_init : initial_step(t, y);
    while (t < t_end) {
      if (stats_.accepted + stats_.rejected >= opt_.max_steps) {
        throw SolverFailure("step budget exhausted at t = " + std::to_string(t));
      }
      if (opt_.h_max > 0) h = std::min(h, opt_.h_max);
      bool last = false;
      if (t + h >= t_end) {
        h = t_end - t;
        last = true;
      }
      step(t, y, h);
      const double err = error_norm(y);
      if (!std::isfinite(err)) {
        throw SolverFailure("non-finite state encountered at t = " + std::to_string(t));
      }
      if (err <= 1.0) {
        ++stats_.accepted;
        prepare_dense(y, h);
        const double t_new = last ? t_end : t + h;
        y = y1_;
        k1_ = k7_;
        if (post) post(t_new, y);
        while (next < out_times.size() && out_times[next] <= t_new) {
          const double theta = (out_times[next] - t) / h;
          observe(out_times[next], dense(theta));
          ++next;
        }
        t = t_new;
        const double fac = err == 0 ? 5.0 : std::clamp(0.9 * std::pow(err, -0.2), 0.2, 5.0);
        h *= fac;
      } else {
        ++stats_.rejected;
        h *= std::max(0.2, 0.9 * std::pow(err, -0.2));
        if (h < opt_.h_min) {
          throw SolverFailure("step size underflow at t = " + std::to_string(t));
        }
      }
    }
  }

 private:
  void eval(double t, const State& y, State& dy) {
    ++stats_.rhs_calls;
    rhs_(t, y, dy);
  }

  double initial_step(double t, const State& y) {
    const double d0 = scaled_norm(y, y);
    const double d1 = scaled_norm(k1_, y);
    double h0 = (d0 < 1e-5 || d1 < 1e-5) ? 1e-6 : 0.01 * d0 / d1;
    State y1 = y + h0 * k1_;
    State f1;
    eval(t + h0, y1, f1);
    const double d2 = scaled_norm(f1 - k1_, y) / h0;
    const double m = std::max(d1, d2);
    const double h1 = m <= 1e-15 ? std::max(1e-6, h0 * 1e-3) : std::pow(0.01 / m, 0.2);
    return std::min(100 * h0, h1);
  }

  double scaled_norm(const State& v, const State& ref) const {
    const auto sc = opt_.atol + opt_.rtol * ref.array().abs();
    return std::sqrt((v.array().abs() / sc).square().mean());
  }

  void step(double t, const State& y, double h) {
    static constexpr double a21 = 1.0 / 5;
    static constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
    static constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
    static constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                            a54 = -212.0 / 729;
    static constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                            a64 = 49.0 / 176, a65 = -5103.0 / 18656;
    static constexpr double a71 = 35.0 / 384, a73 = 500.0 / 1113, a74 = 125.0 / 192,
                            a75 = -2187.0 / 6784, a76 = 11.0 / 84;
    static constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                            e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;
    tmp_ = y + (h * a21) * k1_;
    eval(t + h / 5, tmp_, k2_);
    tmp_ = y + h * (a31 * k1_ + a32 * k2_);
    eval(t + 3 * h / 10, tmp_, k3_);
    tmp_ = y + h * (a41 * k1_ + a42 * k2_ + a43 * k3_);
    eval(t + 4 * h / 5, tmp_, k4_);
    tmp_ = y + h * (a51 * k1_ + a52 * k2_ + a53 * k3_ + a54 * k4_);
    eval(t + 8 * h / 9, tmp_, k5_);
    tmp_ = y + h * (a61 * k1_ + a62 * k2_ + a63 * k3_ + a64 * k4_ + a65 * k5_);
    eval(t + h, tmp_, k6_);
    y1_ = y + h * (a71 * k1_ + a73 * k3_ + a74 * k4_ + a75 * k5_ + a76 * k6_);
    eval(t + h, y1_, k7_);
    err_ = h * (e1 * k1_ + e3 * k3_ + e4 * k4_ + e5 * k5_ + e6 * k6_ + e7 * k7_);
    y0_ = y;
  }

  double error_norm(const State& y) const {
    const auto sc = opt_.atol + opt_.rtol * y.array().abs().max(y1_.array().abs());
    return std::sqrt((err_.array().abs() / sc).square().mean());
  }

  void prepare_dense(const State& y, double h) {
    static constexpr double d1 = -12715105075.0 / 11282082432.0,
                            d3 = 87487479700.0 / 32700410799.0,
                            d4 = -10690763975.0 / 1880347072.0,
                            d5 = 701980252875.0 / 199316789632.0,
                            d6 = -1453857185.0 / 822651844.0, d7 = 69997945.0 / 29380423.0;
    r1_ = y;
    r2_ = y1_ - y;
    r3_ = h * k1_ - r2_;
    r4_ = r2_ - h * k7_ - r3_;
    r5_ = h * (d1 * k1_ + d3 * k3_ + d4 * k4_ + d5 * k5_ + d6 * k6_ + d7 * k7_);
  }

  const State& dense(double th) {
    const double th1 = 1 - th;
    dense_ = r1_ + th * (r2_ + th1 * (r3_ + th * (r4_ + th1 * r5_)));
    return dense_;
  }

  Rhs rhs_;
  IntegratorOptions opt_;
  IntegratorStats stats_;
  State k1_, k2_, k3_, k4_, k5_, k6_, k7_, tmp_, y0_, y1_, err_;
  State r1_, r2_, r3_, r4_, r5_, dense_;
};

}  // namespace cqed
