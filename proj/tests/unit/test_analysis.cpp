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
#include <random>

#include "cqed/analysis.hpp"
#include "fixtures.hpp"

using namespace cqed;

namespace {

QubitSeries random_series(std::mt19937_64& rng, int n) {
  std::uniform_real_distribution<double> u(-0.57, 0.57);
  QubitSeries s;
  for (int i = 0; i < n; ++i) {
    s.times.push_back(0.1 * i);
    s.bloch.push_back({u(rng), u(rng), u(rng)});
  }
  return s;
}

}  // namespace

TEST_CASE("trace distance series") {
  std::mt19937_64 rng(1);
  const auto a = random_series(rng, 30), b = random_series(rng, 30), c = random_series(rng, 30);
  const auto same = trace_distance_series(a, a);
  CHECK(same.max == 0);
  const auto ab = trace_distance_series(a, b), ba = trace_distance_series(b, a);
  const auto bc = trace_distance_series(b, c), ac = trace_distance_series(a, c);
  for (std::size_t i = 0; i < ab.distance.size(); ++i) {
    CHECK(ab.distance[i] == doctest::Approx(ba.distance[i]).epsilon(1e-14));
    CHECK(ac.distance[i] <= ab.distance[i] + bc.distance[i] + 1e-12);
  }

  // grids differ: resample onto the coarser one inside the common window
  QubitSeries fine{{}, {}}, coarse{{}, {}};
  for (int i = 0; i <= 100; ++i) {
    fine.times.push_back(0.01 * i);
    fine.bloch.push_back({0, 0, 0.01 * i});
  }
  for (int i = 0; i <= 8; ++i) {
    coarse.times.push_back(0.1 + 0.1 * i);
    coarse.bloch.push_back({0, 0, 0});
  }
  const auto d = trace_distance_series(fine, coarse);
  REQUIRE(d.times.size() == coarse.times.size());
  for (std::size_t i = 0; i < d.times.size(); ++i) CHECK(d.distance[i] == doctest::Approx(d.times[i]));
  CHECK(d.max == doctest::Approx(0.9));
  CHECK(d.t_at_max == doctest::Approx(0.9));

  QubitSeries late{{5.0, 6.0}, {{}, {}}};
  CHECK_THROWS_AS(trace_distance_series(fine, late), InvalidInput);
}

TEST_CASE("time average") {
  std::vector<double> t, c, s, mix;
  const double period = 0.05;
  for (int i = 0; i <= 4000; ++i) {
    t.push_back(i * 1e-3);
    c.push_back(0.3);
    s.push_back(std::sin(2 * std::numbers::pi * t.back() / period));
    mix.push_back(-0.6 + 0.2 * std::sin(2 * std::numbers::pi * t.back() / 0.005));
  }
  const auto ac = time_average(t, c, period);
  for (double v : ac) CHECK(v == doctest::Approx(0.3).epsilon(1e-14));
  const auto as = time_average(t, s, period);
  double worst = 0;
  for (std::size_t i = 100; i + 100 < t.size(); ++i) worst = std::max(worst, std::abs(as[i]));
  CHECK(worst < 0.01);
  const auto am = time_average(t, mix, 0.1);
  for (std::size_t i = 100; i + 100 < t.size(); ++i) CHECK(std::abs(am[i] + 0.6) < 0.006);
  // endpoints use a shrunken symmetric window
  CHECK(as.front() == s.front());
  CHECK(as.back() == doctest::Approx(s.back()));
}

TEST_CASE("exponential fit is exact on noiseless data") {
  std::vector<double> t, y;
  for (int i = 0; i <= 400; ++i) {
    t.push_back(0.1 * i);
    y.push_back(2 * std::exp(-0.1 * t.back()) - 1);
  }
  const auto f = fit_exponential_decay(t, y);
  CHECK(f.converged);
  CHECK(f.decaying);
  CHECK(f.rate == doctest::Approx(0.1).epsilon(1e-6));
  CHECK(std::abs(f.offset + 1) < 1e-8);
  CHECK(f.amplitude == doctest::Approx(2).epsilon(1e-6));
  CHECK(f.residual_rms < 1e-10);

  // fit window start
  const auto g = fit_exponential_decay(t, y, 5.0);
  CHECK(g.rate == doctest::Approx(0.1).epsilon(1e-6));
  CHECK(g.amplitude == doctest::Approx(2 * std::exp(-0.5)).epsilon(1e-6));
}

TEST_CASE("exponential fit tolerates noise and flags growth") {
  std::mt19937_64 rng(8);
  std::normal_distribution<double> nd(0, 1e-3);
  std::vector<double> t, y, up;
  for (int i = 0; i <= 300; ++i) {
    t.push_back(0.05 * i);
    y.push_back(1.5 * std::exp(-0.8 * t.back()) - 0.7 + nd(rng));
    up.push_back(0.01 * std::exp(0.2 * t.back()));
  }
  const auto f = fit_exponential_decay(t, y);
  CHECK(f.rate == doctest::Approx(0.8).epsilon(0.01));
  CHECK(std::sqrt(f.covariance(1, 1)) < 0.01);
  CHECK(f.residual_rms == doctest::Approx(1e-3).epsilon(0.2));
  const auto g = fit_exponential_decay(t, up);
  CHECK_FALSE(g.decaying);
  CHECK_THROWS_AS(fit_exponential_decay({0, 1}, {1, 0}), InvalidInput);
}

TEST_CASE("sweeps keep axis order, record failures and are worker-count independent") {
  const auto empty = run_sweep("eps", "full", {}, 4, [](double) { return std::map<std::string, double>{}; });
  CHECK(empty.rows.empty());
  const auto axis = linspace(0, 20, 21);
  CHECK(axis[1] == doctest::Approx(1.0));
  auto fn = [](double x) {
    if (x == 7) throw SolverFailure("boom");
    std::mt19937_64 r(static_cast<std::uint64_t>(x * 1000));
    return std::map<std::string, double>{{"y", std::sin(x)}, {"r", std::normal_distribution<double>()(r)}};
  };
  const auto a = run_sweep("eps", "full", axis, 1, fn), b = run_sweep("eps", "full", axis, 5, fn);
  REQUIRE(a.rows.size() == 21);
  for (std::size_t i = 0; i < axis.size(); ++i) {
    CHECK(a.rows[i].axis == axis[i]);
    CHECK(a.rows[i].values == b.rows[i].values);
    CHECK(a.rows[i].failure.has_value() == (axis[i] == 7));
  }
}
