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

#include "cqed/operators.hpp"

#include <array>
#include <cmath>
#include <utility>
#include <vector>

#include <unsupported/Eigen/MatrixFunctions>

namespace cqed {

namespace {

constexpr std::array<std::pair<std::string_view, OperatorName>, 14> kNames{{
    {"a", OperatorName::a},
    {"a_dag", OperatorName::a_dag},
    {"n_photon", OperatorName::n_photon},
    {"sigma_minus", OperatorName::sigma_minus},
    {"sigma_plus", OperatorName::sigma_plus},
    {"sigma_z", OperatorName::sigma_z},
    {"sigma_x", OperatorName::sigma_x},
    {"sigma_y", OperatorName::sigma_y},
    {"i_plus", OperatorName::i_plus},
    {"i_minus", OperatorName::i_minus},
    {"n_q", OperatorName::n_q},
    {"proj_e", OperatorName::proj_e},
    {"proj_g", OperatorName::proj_g},
    {"identity", OperatorName::identity},
}};

void check_same(const HilbertDims& a, const HilbertDims& b) {
  if (!(a == b)) {
    throw DimensionMismatch("operator dimensions differ: " + std::to_string(a.fock_levels()) +
                            " vs " + std::to_string(b.fock_levels()) + " Fock levels");
  }
}

}  // namespace

HilbertDims::HilbertDims(int fock_levels) : n_(fock_levels) {
  if (fock_levels < 2) throw InvalidInput("fock_levels must be >= 2");
}

OperatorName parse_operator_name(std::string_view name) {
  for (const auto& [k, v] : kNames) {
    if (k == name) return v;
  }
  throw InvalidInput("unknown operator name '" + std::string(name) + "'");
}

std::string_view to_string(OperatorName name) {
  for (const auto& [k, v] : kNames) {
    if (v == name) return k;
  }
  return "?";
}

DenseOperator::DenseOperator(HilbertDims dims, Matrix m) : dims_(dims), m_(std::move(m)) {
  if (m_.rows() != dims_.total() || m_.cols() != dims_.total()) {
    throw DimensionMismatch("matrix shape does not match Hilbert dimensions");
  }
}

DenseOperator DenseOperator::zero(HilbertDims dims) {
  return {dims, Matrix::Zero(dims.total(), dims.total())};
}

DenseOperator DenseOperator::identity(HilbertDims dims) {
  return {dims, Matrix::Identity(dims.total(), dims.total())};
}

DenseOperator& DenseOperator::operator+=(const DenseOperator& o) {
  check_same(dims_, o.dims_);
  m_ += o.m_;
  return *this;
}

DenseOperator& DenseOperator::operator-=(const DenseOperator& o) {
  check_same(dims_, o.dims_);
  m_ -= o.m_;
  return *this;
}

DenseOperator& DenseOperator::operator*=(cplx s) {
  m_ *= s;
  return *this;
}

DenseOperator operator*(const DenseOperator& a, const DenseOperator& b) {
  check_same(a.dims(), b.dims());
  return {a.dims(), a.matrix() * b.matrix()};
}

SparseOp elementary_sparse(const HilbertDims& dims, OperatorName name) {
  const int n = dims.fock_levels();
  const auto e = QubitLevel::e;
  const auto g = QubitLevel::g;
  std::vector<Eigen::Triplet<cplx>> t;
  auto add = [&](QubitLevel qr, int nr, QubitLevel qc, int nc, cplx v) {
    if (nr < 0 || nr >= n || nc < 0 || nc >= n) return;
    t.emplace_back(dims.index(qr, nr), dims.index(qc, nc), v);
  };
  for (int k = 0; k < n; ++k) {
    const double sk = std::sqrt(static_cast<double>(k));
    const double sk1 = std::sqrt(static_cast<double>(k + 1));
    for (auto q : {g, e}) {
      switch (name) {
        case OperatorName::a: add(q, k - 1, q, k, sk); break;
        case OperatorName::a_dag: add(q, k + 1, q, k, sk1); break;
        case OperatorName::n_photon: add(q, k, q, k, double(k)); break;
        case OperatorName::identity: add(q, k, q, k, 1.0); break;
        case OperatorName::n_q: add(q, k, q, k, double(k) + (q == e ? 1.0 : 0.0)); break;
        default: break;
      }
    }
    switch (name) {
      case OperatorName::sigma_minus: add(g, k, e, k, 1.0); break;
      case OperatorName::sigma_plus: add(e, k, g, k, 1.0); break;
      case OperatorName::sigma_x:
        add(g, k, e, k, 1.0);
        add(e, k, g, k, 1.0);
        break;
      case OperatorName::sigma_y:
        add(e, k, g, k, -I1);
        add(g, k, e, k, I1);
        break;
      case OperatorName::sigma_z:
        add(e, k, e, k, 1.0);
        add(g, k, g, k, -1.0);
        break;
      case OperatorName::proj_e: add(e, k, e, k, 1.0); break;
      case OperatorName::proj_g: add(g, k, g, k, 1.0); break;
      // a^dag sigma_- +/- a sigma_+ : |e,k> <-> |g,k+1> with amplitude sqrt(k+1)
      case OperatorName::i_plus:
        add(g, k + 1, e, k, sk1);
        add(e, k, g, k + 1, sk1);
        break;
      case OperatorName::i_minus:
        add(g, k + 1, e, k, sk1);
        add(e, k, g, k + 1, -sk1);
        break;
      default: break;
    }
  }
  SparseOp s(dims.total(), dims.total());
  s.setFromTriplets(t.begin(), t.end());
  return s;
}

DenseOperator build_elementary(const HilbertDims& dims, OperatorName name) {
  return {dims, Matrix(elementary_sparse(dims, name))};
}

cplx expectation(const DenseOperator& op, const DenseOperator& rho) {
  check_same(op.dims(), rho.dims());
  return (op.matrix().cwiseProduct(rho.matrix().transpose())).sum();
}

DenseOperator dissipator(const DenseOperator& l, const DenseOperator& rho) {
  check_same(l.dims(), rho.dims());
  const Matrix& L = l.matrix();
  const Matrix& r = rho.matrix();
  const Matrix ldl = L.adjoint() * L;
  Matrix out = L * r * L.adjoint() - 0.5 * (ldl * r + r * ldl);
  return {l.dims(), std::move(out)};
}

Qubit2 partial_trace_resonator(const DenseOperator& rho) {
  const int n = rho.dims().fock_levels();
  const Matrix& r = rho.matrix();
  Qubit2 q;
  for (int a = 0; a < 2; ++a) {
    for (int b = 0; b < 2; ++b) q(a, b) = r.block(a * n, b * n, n, n).trace();
  }
  return q;
}

Eigen::VectorXd photon_distribution(const DenseOperator& rho) {
  const int n = rho.dims().fock_levels();
  const Matrix& r = rho.matrix();
  Eigen::VectorXd p(n);
  for (int k = 0; k < n; ++k) p(k) = r(k, k).real() + r(n + k, n + k).real();
  return p;
}

DenseOperator displacement(const HilbertDims& dims, cplx alpha) {
  const int n = dims.fock_levels();
  const double n2 = std::norm(alpha);
  if (n2 > n / 4.0) {
    throw TruncationOverflow("displacement |alpha|^2 = " + std::to_string(n2) +
                             " exceeds N/4 = " + std::to_string(n / 4.0));
  }
  // Exponentiate on a padded space so the kept block is free of edge effects.
  const int big = n + 40 + static_cast<int>(std::ceil(4 * n2));
  Matrix gen = Matrix::Zero(big, big);
  for (int k = 0; k + 1 < big; ++k) {
    const double s = std::sqrt(static_cast<double>(k + 1));
    gen(k + 1, k) += alpha * s;
    gen(k, k + 1) -= std::conj(alpha) * s;
  }
  const Matrix d = gen.exp();
  Matrix full = Matrix::Zero(dims.total(), dims.total());
  full.topLeftCorner(n, n) = d.topLeftCorner(n, n);
  full.bottomRightCorner(n, n) = d.topLeftCorner(n, n);
  return {dims, std::move(full)};
}

DenseOperator product_state(const HilbertDims& dims, const Eigen::Vector2cd& qubit_ket,
                            cplx alpha) {
  const int n = dims.fock_levels();
  Vector fock = Vector::Zero(n);
  // Coherent amplitudes by recursion, normalised over the kept levels.
  fock(0) = 1.0;
  for (int k = 1; k < n; ++k) fock(k) = fock(k - 1) * alpha / std::sqrt(double(k));
  fock.normalize();
  Vector psi(dims.total());
  psi.head(n) = qubit_ket(0) * fock;
  psi.tail(n) = qubit_ket(1) * fock;
  psi /= qubit_ket.norm();
  return {dims, psi * psi.adjoint()};
}

Bloch bloch_vector(const Qubit2& rho) {
  // rho indices: 0 = g, 1 = e; sigma_+ = |e><g|.
  const cplx ge = rho(0, 1);
  return {2.0 * ge.real(), 2.0 * ge.imag(), (rho(1, 1) - rho(0, 0)).real()};
}

Qubit2 qubit_from_bloch(const Bloch& b) {
  Qubit2 q;
  q(1, 1) = 0.5 * (1 + b.z);
  q(0, 0) = 0.5 * (1 - b.z);
  q(0, 1) = 0.5 * cplx(b.x, b.y);
  q(1, 0) = std::conj(q(0, 1));
  return q;
}

double bloch_distance(const Bloch& a, const Bloch& b) {
  return std::sqrt((a.x - b.x) * (a.x - b.x) + (a.y - b.y) * (a.y - b.y) +
                   (a.z - b.z) * (a.z - b.z));
}

double trace_distance_bloch(const Qubit2& a, const Qubit2& b) {
  return bloch_distance(bloch_vector(a), bloch_vector(b));
}

}  // namespace cqed
