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
#include <string>

#include "experiment/experiment.hpp"

using namespace cqed;
using namespace cqed::cli;

namespace {

const char* kMinimal = R"([system]
omega_r_mhz = 7000
omega_a_mhz = 9000
g_mhz = 50
kappa_mhz = 2.5
gamma_1_mhz = 0.1

[drive]
amplitude_mhz = 2
)";

std::string with(const std::string& extra) { return std::string(kMinimal) + extra; }

std::string error_of(const std::string& text) {
  try {
    parse_config(text, "test.cfg");
  } catch (const ConfigError& e) {
    return e.what();
  }
  return "";
}

}  // namespace

TEST_CASE("minimal config resolves with documented defaults") {
  const auto c = parse_config(kMinimal);
  CHECK(c.system.gamma_phi == 0);
  CHECK(c.system.omega_r == doctest::Approx(mhz_to_rad_us(7000)));
  CHECK(c.system.drives.size() == 1);
  CHECK(c.duration == 2);
  CHECK(c.samples == 201);
  CHECK(c.seed == 1);
  CHECK(c.homodyne.eta == 1);
}

TEST_CASE("config errors name the offending field") {
  CHECK(error_of(with("[run]\nduraton_us = 3\n")).find("[run] unknown key 'duraton_us'") != std::string::npos);
  CHECK(error_of(with("[bogus]\nx = 1\n")).find("bogus") != std::string::npos);
  std::string no_kappa = kMinimal;
  no_kappa.erase(no_kappa.find("kappa_mhz"), std::string("kappa_mhz = 2.5\n").size());
  CHECK(error_of(no_kappa).find("kappa_mhz") != std::string::npos);
  std::string negative = kMinimal;
  negative.replace(negative.find("kappa_mhz = 2.5"), 15, "kappa_mhz = -1");
  const auto e = error_of(negative);
  CHECK(e.find("test.cfg") == 0);
  CHECK(e.find("kappa_mhz") != std::string::npos);
  CHECK(!error_of(with("[initial]\nqubit = sideways\n")).empty());
  CHECK(!error_of(with("[run]\nsamples = 1.5\n")).empty());
  CHECK(!error_of(with("[homodyne]\neta = 1.5\n")).empty());
}

TEST_CASE("regime warnings") {
  auto c = parse_config(kMinimal);
  CHECK(derive(c.system).warnings.empty());
  std::string strong = kMinimal;
  strong.replace(strong.find("omega_a_mhz = 9000"), 18, "omega_a_mhz = 7166.6666667");
  c = parse_config(strong);
  const auto d = derive(c.system);
  CHECK(d.lambda == doctest::Approx(0.3).epsilon(1e-6));
  REQUIRE(!d.warnings.empty());
  CHECK(d.warnings.front().find("outside dispersive regime") != std::string::npos);
}

TEST_CASE("derived quantities") {
  const auto d = derive(parse_config(kMinimal).system);
  CHECK(d.lambda == doctest::Approx(0.025));
  CHECK(d.chi_mhz == doctest::Approx(1.25).epsilon(1e-3));
  CHECK(d.n_crit == doctest::Approx(400));
  CHECK(d.n_steady > 0);
}

TEST_CASE("resolved config round-trips") {
  const auto c = parse_config(with("[run]\nseed = 42\n"));
  const auto again = parse_config(to_ini(c.table));
  CHECK(to_ini(again.table) == to_ini(c.table));
  CHECK(again.seed == 42);
}

TEST_CASE("named qubit states sit on the expected Bloch axes") {
  auto bloch = [](const std::string& name) {
    const auto k = qubit_ket(name);
    const cplx coh = k(0) * std::conj(k(1));
    return Bloch{2 * coh.real(), 2 * coh.imag(), std::norm(k(1)) - std::norm(k(0))};
  };
  CHECK(bloch("g").z == doctest::Approx(-1));
  CHECK(bloch("e").z == doctest::Approx(1));
  CHECK(bloch("plus").x == doctest::Approx(1));
  CHECK(bloch("minus").x == doctest::Approx(-1));
  CHECK(bloch("plus_y").y == doctest::Approx(1));
  CHECK(bloch("minus_y").y == doctest::Approx(-1));
}

TEST_CASE("csv tables carry a versioned header and fixed number format") {
  CsvTable t("demo", {"a", "b"});
  t.row() << 1.0 << 0.1;
  const auto s = t.str();
  CHECK(s.rfind("# cqed demo v1\na,b\n", 0) == 0);
  CHECK(format_number(0.1) == "0.1");
  CHECK(format_number(-0.0) == "0");
}

TEST_CASE("seeded ensembles and sweeps do not depend on the worker count") {
  auto c = parse_config(with("[homodyne]\ntrajectories = 6\n[run]\nduration_us = 0.5\nsamples = 11\n"));
  auto csv = [](const Artifacts& a) {
    std::string s;
    for (const auto& t : a.tables) s += t.str();
    return s;
  };
  CHECK(csv(trajectory_artifacts(c, run_ensemble(c, 1))) == csv(trajectory_artifacts(c, run_ensemble(c, 4))));
  auto s = parse_config(with("[sweep]\nkind = snr\namplitudes_mhz = 1, 2, 3\n"));
  CHECK(csv(sweep_artifacts(s, run_parameter_sweep(s, 1))) == csv(sweep_artifacts(s, run_parameter_sweep(s, 3))));
}
