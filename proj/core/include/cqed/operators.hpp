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

#include "cqed/common.hpp"

namespace cqed {

enum class QubitLevel { g = 0, e = 1 };

// Qubit outer, Fock inner: index = q * N + n with g = 0, e = 1.
class HilbertDims {
 public:
  explicit HilbertDims(int fock_levels);

  int fock_levels() const { return n_; }
  int total() const { return 2 * n_; }
  int index(QubitLevel q, int n) const { return static_cast<int>(q) * n_ + n; }
  bool operator==(const HilbertDims&) const = default;

 private:
  int n_;
};

enum class OperatorName {
  a,
  a_dag,
  n_photon,
  sigma_minus,
  sigma_plus,
  sigma_z,
  sigma_x,
  sigma_y,
  i_plus,
  i_minus,
  n_q,
  proj_e,
  proj_g,
  identity,
};

OperatorName parse_operator_name(std::string_view name);
std::string_view to_string(OperatorName name);

class DenseOperator {
 public:
  DenseOperator(HilbertDims dims, Matrix m);

  static DenseOperator zero(HilbertDims dims);
  static DenseOperator identity(HilbertDims dims);

  const HilbertDims& dims() const { return dims_; }
  const Matrix& matrix() const { return m_; }
  Matrix& matrix() { return m_; }

  DenseOperator adjoint() const { return {dims_, m_.adjoint()}; }
  cplx trace() const { return m_.trace(); }

  DenseOperator& operator+=(const DenseOperator& o);
  DenseOperator& operator-=(const DenseOperator& o);
  DenseOperator& operator*=(cplx s);

  friend DenseOperator operator+(DenseOperator a, const DenseOperator& b) { return a += b; }
  friend DenseOperator operator-(DenseOperator a, const DenseOperator& b) { return a -= b; }
  friend DenseOperator operator*(DenseOperator a, cplx s) { return a *= s; }
  friend DenseOperator operator*(cplx s, DenseOperator a) { return a *= s; }
  friend DenseOperator operator*(const DenseOperator& a, const DenseOperator& b);

 private:
  HilbertDims dims_;
  Matrix m_;
};

SparseOp elementary_sparse(const HilbertDims& dims, OperatorName name);
DenseOperator build_elementary(const HilbertDims& dims, OperatorName name);

// Tr(O rho); O need not be Hermitian.
cplx expectation(const DenseOperator& op, const DenseOperator& rho);

// (2 L rho L^dag - L^dag L rho - rho L^dag L) / 2
DenseOperator dissipator(const DenseOperator& l, const DenseOperator& rho);

Qubit2 partial_trace_resonator(const DenseOperator& rho);
Eigen::VectorXd photon_distribution(const DenseOperator& rho);

// exp(alpha a^dag - alpha* a) restricted to the truncated space. Rejects
// |alpha|^2 > N/4 since the truncated result is then unreliable.
DenseOperator displacement(const HilbertDims& dims, cplx alpha);

// Density matrix of a product state |q> <q| (x) |alpha><alpha|.
DenseOperator product_state(const HilbertDims& dims, const Eigen::Vector2cd& qubit_ket,
                            cplx alpha = 0.0);

struct Bloch {
  double x = 0, y = 0, z = 0;
};

Bloch bloch_vector(const Qubit2& rho);
Qubit2 qubit_from_bloch(const Bloch& b);

// Trace distance expressed through Bloch vectors, sqrt(sum (d<sigma_i>)^2).
double trace_distance_bloch(const Qubit2& a, const Qubit2& b);
double bloch_distance(const Bloch& a, const Bloch& b);

}  // namespace cqed
