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

#include <benchmark/benchmark.h>

#include "cqed/lindblad.hpp"

namespace {

cqed::SystemParams fig2_params() {
  using cqed::mhz_to_rad_us;
  cqed::SystemParams p;
  p.omega_r = mhz_to_rad_us(7000);
  p.omega_a = mhz_to_rad_us(9000);
  p.g = mhz_to_rad_us(50);
  p.kappa = mhz_to_rad_us(2.5);
  p.gamma_1 = mhz_to_rad_us(0.1);
  p.gamma_phi = mhz_to_rad_us(0.3);
  p.drives.push_back({mhz_to_rad_us(10), p.omega_r, 0, cqed::Envelope::constant()});
  return p;
}

template <cqed::ModelTier Tier>
void BM_Rhs(benchmark::State& state) {
  const cqed::HilbertDims d(static_cast<int>(state.range(0)));
  const auto p = fig2_params();
  const auto gen = Tier == cqed::ModelTier::full         ? cqed::rhs_full(d, p)
                   : Tier == cqed::ModelTier::dispersive ? cqed::rhs_dispersive(d, p)
                                                         : cqed::rhs_full_secular(d, p);
  const auto rho = cqed::product_state(d, Eigen::Vector2cd(1, 1), cqed::cplx(2, 1));
  cqed::Matrix out;
  for (auto _ : state) {
    gen.apply_hermitian(0.1, rho.matrix(), out);
    benchmark::DoNotOptimize(out.data());
  }
}

BENCHMARK(BM_Rhs<cqed::ModelTier::full>)->Arg(30)->Arg(60)->Arg(120);
BENCHMARK(BM_Rhs<cqed::ModelTier::full_secular>)->Arg(30)->Arg(60)->Arg(120);
BENCHMARK(BM_Rhs<cqed::ModelTier::dispersive>)->Arg(30)->Arg(60)->Arg(120);

}  // namespace

BENCHMARK_MAIN();
