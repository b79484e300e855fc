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

#include <string_view>

#include "cqed/operators.hpp"

namespace cqed {

// Bare Jaynes-Cummings parameters in rad/us.
struct JCParams {
  double omega_r = 0;
  double omega_a = 0;
  double g = 0;

  double delta() const { return omega_a - omega_r; }
  double lambda() const { return g / delta(); }
};

struct DispersiveParams {
  double lambda = 0;
  double chi = 0;     // g^2 (1 - lambda^2) / Delta
  double zeta = 0;    // -g^4 / Delta^3
  double n_crit = 0;  // Delta^2 / 4 g^2
  double n_kappa = 0; // kappa / |zeta|

  static DispersiveParams from(double g, double delta, double kappa);
};

enum class RegimeLevel { ok, weak, outside };

// ok below 0.1, weak up to 0.25, outside beyond.
RegimeLevel dispersive_regime(double lambda);

// Lambda(n) = -atan(2 lambda sqrt n) / (2 sqrt n), Lambda(0) = -lambda.
double dispersive_angle(double n_q, double lambda);

// Exact D = exp(-Lambda(N_q) I_-) on the truncated space. The unpaired top
// level |e, N-1> is left untouched.
DenseOperator dispersive_unitary(const HilbertDims& dims, double lambda);
SparseOp dispersive_unitary_sparse(const HilbertDims& dims, double lambda);

// Diagonal of D^dag H_s D, closed form, indexed like the basis. The top
// level |e, N-1> has no partner inside the truncation and keeps its bare energy.
Eigen::VectorXd dispersive_energies(const HilbertDims& dims, const JCParams& p);
DenseOperator exact_dispersive_hamiltonian(const HilbertDims& dims, const JCParams& p);

// H_s = omega_r a^dag a + omega_a sigma_z / 2 + g I_+
DenseOperator jc_hamiltonian(const HilbertDims& dims, const JCParams& p);

DenseOperator transform_operator(const DenseOperator& d, const DenseOperator& op);

enum class SeriesOperator {
  sigma_z_d,       // closed form, exact
  n_d,             // closed form, exact
  sigma_z_d3,      // closed form expanded to third order in lambda
  n_d3,            // closed form expanded to third order in lambda
  a_d,             // third order
  sigma_minus_d,   // second order
  h_s_d3,          // third-order dispersive Hamiltonian
  h_s_d2,          // second-order (linear dispersive) Hamiltonian
};

SeriesOperator parse_series_operator(std::string_view name);

DenseOperator series_operator(SeriesOperator which, const HilbertDims& dims, const JCParams& p);

// Coefficient X of the transformed drive H = X e^{-i w t} + h.c. for a bare
// drive eps a^dag e^{-i w t} + h.c.
DenseOperator dispersive_drive_operator(const HilbertDims& dims, double lambda, cplx eps);

struct LambStark {
  double lamb = 0;
  double stark = 0;
  double lamb_approx = 0;   // chi
  double stark_approx = 0;  // 2 chi n + 2 zeta n^2
};

LambStark lamb_stark_shifts(const JCParams& p, double n);

// Projector onto Fock levels n < N - margin for both qubit states.
Matrix interior_projector(const HilbertDims& dims, int margin);

}  // namespace cqed
