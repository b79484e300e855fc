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

#include <functional>
#include <span>
#include <string_view>
#include <vector>

#include "cqed/integrator.hpp"
#include "cqed/system.hpp"

namespace cqed {

// Operator stored as shifted diagonals: entry (i, i + offset) = values[d](i).
// Every operator built here has only a handful of such diagonals.
class BandedOp {
 public:
  BandedOp() = default;
  explicit BandedOp(const SparseOp& s);

  int dim() const { return dim_; }
  const std::vector<int>& offsets() const { return offsets_; }
  const std::vector<Eigen::VectorXcd>& values() const { return values_; }
  Eigen::VectorXcd& diagonal_at(int offset);

  // out += scale * A x
  void left_apply(const Matrix& x, Matrix& out, cplx scale = 1.0) const;
  // out += scale * x A^dag
  void right_apply_adjoint(const Matrix& x, Matrix& out, cplx scale = 1.0) const;

 private:
  int dim_ = 0;
  std::vector<int> offsets_;
  std::vector<Eigen::VectorXcd> values_;
};

// rho' = -i[H(t), rho] + sum_j D[L_j] rho with
// H(t) = H0 + sum_k (c_k(t) X_k + h.c.).
class LindbladGenerator {
 public:
  explicit LindbladGenerator(HilbertDims dims);

  void set_hamiltonian(SparseOp h0);
  void add_drive(SparseOp x, std::function<cplx(double)> coeff);
  // rate * D[l]
  void add_collapse(const SparseOp& l, double rate);
  // Integrate in the interaction picture of the diagonal Hamiltonian diag(E):
  // every operator element (i, j) picks up exp(i (E_i - E_j) t). H0 must then
  // be left empty.
  void set_interaction_energies(Eigen::VectorXd e);

  const HilbertDims& dims() const { return dims_; }
  std::size_t collapse_count() const { return collapse_.size(); }

  // Valid for any rho.
  void apply(double t, const Matrix& rho, Matrix& out) const;
  // Assumes rho is Hermitian; roughly half the work of apply().
  void apply_hermitian(double t, const Matrix& rho, Matrix& out) const;

  DenseOperator apply(double t, const DenseOperator& rho) const;

 private:
  void effective_product(double t, const Matrix& rho, Matrix& out) const;

  void rebuild();
  const BandedOp& heff_at(double t) const;

  HilbertDims dims_;
  SparseOp h0_;
  std::vector<SparseOp> drive_x_;
  std::vector<std::function<cplx(double)>> drive_coeff_;
  std::vector<SparseOp> collapse_sparse_;  // pre-scaled by sqrt(rate)
  std::vector<BandedOp> collapse_;
  // H0 - (i/2) sum L^dag L and the drive operators on a common set of offsets.
  BandedOp heff0_;
  std::vector<BandedOp> drive_b_, drive_bd_;
  mutable BandedOp heff_t_;
  mutable Matrix m1_;
  Eigen::VectorXd energies_;
  mutable std::vector<BandedOp> collapse_t_;
  mutable Eigen::VectorXcd phase_;
  void phase_into(const BandedOp& src, BandedOp& dst) const;
  const std::vector<BandedOp>& collapse_at(double t) const;
};

enum class ModelTier { full, full_secular, dispersive };

ModelTier parse_model_tier(std::string_view s);
std::string_view to_string(ModelTier t);

// Full Jaynes-Cummings master equation; resonator and qubit both in the frame
// rotating at the reference (first drive) frequency. Bare basis.
LindbladGenerator rhs_full(const HilbertDims& dims, const SystemParams& p);

// The same master equation conjugated exactly into the Jaynes-Cummings
// eigenbasis and taken to the interaction picture of its diagonal part; used
// by evolve() for the full tier. The energies are those of the returned pair.
struct InteractionModel {
  LindbladGenerator generator;
  Eigen::VectorXd energies;
};
InteractionModel rhs_full_interaction(const HilbertDims& dims, const SystemParams& p);

struct DispersiveOptions {
  // Keep the small qubit-drive term of the transformed drive.
  bool qubit_drive_line = true;
};

// Dispersive-frame master equation with the third-order Hamiltonian and the
// lambda^2 dressed dissipators. Resonator at the reference frequency, qubit at omega_a.
LindbladGenerator rhs_dispersive(const HilbertDims& dims, const SystemParams& p,
                                 DispersiveOptions opt = {});

// Full master equation conjugated exactly into the Jaynes-Cummings eigenbasis,
// dropping only components that oscillate at the qubit-resonator detuning.
// Resonator at the reference frequency, dressed qubit at omega_a.
LindbladGenerator rhs_full_secular(const HilbertDims& dims, const SystemParams& p);

struct EvolveOptions {
  IntegratorOptions integrator;
  double overflow_threshold = 1e-6;  // top-two Fock population
  // Full-state eigenvalue check at every sample for dimensions up to this size.
  int positivity_dim_limit = 160;
  DispersiveOptions dispersive;
};

struct EvolutionSample {
  double t = 0;
  Qubit2 qubit_bare;        // qubit frame rotating at omega_a
  Qubit2 qubit_dispersive;  // idem, after the exact dispersive transformation
  double photons = 0;       // bare <a^dag a>
  cplx field = 0;           // bare <a> in the reference frame
  double top_population = 0;
};

struct EvolutionResult {
  ModelTier tier = ModelTier::full;
  int fock_levels = 0;
  std::vector<EvolutionSample> samples;
  IntegratorStats stats;
  double max_trace_error = 0;
  double max_hermiticity_error = 0;
  double min_eigenvalue = 0;  // over all checked samples
  Matrix final_state;         // model basis and frame
};

// rho0 is given in the bare basis in the reference frame at t = times.front().
EvolutionResult evolve(ModelTier tier, const HilbertDims& dims, const SystemParams& p,
                       const DenseOperator& rho0, std::span<const double> times,
                       const EvolveOptions& opt = {});

// Truncation for a peak mean photon number n: n + 10 sqrt(n + 1). Qubit flips
// under drive broaden the photon distribution well beyond a coherent state.
int suggested_fock_levels(double n_mean);

}  // namespace cqed
