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

#include "cqed/operators.hpp"
#include "fixtures.hpp"

using namespace cqed;

namespace {

DenseOperator basis_state(const HilbertDims& d, QubitLevel q, int n) {
  Matrix m = Matrix::Zero(d.total(), d.total());
  m(d.index(q, n), d.index(q, n)) = 1;
  return {d, m};
}

Matrix el(const HilbertDims& d, OperatorName n) { return build_elementary(d, n).matrix(); }

}  // namespace

TEST_CASE("dims reject a single Fock level") {
  CHECK_THROWS_AS(HilbertDims(1), InvalidInput);
  CHECK(HilbertDims(7).total() == 14);
}

TEST_CASE("operator names round-trip and unknown names are rejected") {
  for (auto n : {OperatorName::a, OperatorName::i_minus, OperatorName::n_q, OperatorName::proj_g}) {
    CHECK(parse_operator_name(to_string(n)) == n);
  }
  CHECK_THROWS_AS(parse_operator_name("b_dag"), InvalidInput);
}

TEST_CASE("expectation values of elementary operators") {
  HilbertDims d(8);
  CHECK(expectation(build_elementary(d, OperatorName::sigma_z), basis_state(d, QubitLevel::g, 0)).real() ==
        doctest::Approx(-1));
  CHECK(expectation(build_elementary(d, OperatorName::n_q), basis_state(d, QubitLevel::e, 3)).real() ==
        doctest::Approx(4));
}

TEST_CASE("canonical commutators hold on the interior subspace") {
  HilbertDims d(10);
  const Matrix a = el(d, OperatorName::a), ad = el(d, OperatorName::a_dag);
  const Matrix sm = el(d, OperatorName::sigma_minus), sp = el(d, OperatorName::sigma_plus);
  const Matrix c1 = a * ad - ad * a - Matrix::Identity(d.total(), d.total());
  const Matrix c2 = sm * sp - sp * sm + el(d, OperatorName::sigma_z);
  for (int q = 0; q < 2; ++q) {
    for (int n = 0; n <= d.fock_levels() - 2; ++n) {
      const int i = q * d.fock_levels() + n;
      CHECK(c1.row(i).norm() < 1e-12);
      CHECK(c2.row(i).norm() < 1e-12);
    }
  }
  // sigma_y = -i sigma_+ + i sigma_-, N_q = n + Pi_e, I_pm = a^dag s- pm a s+
  CHECK((el(d, OperatorName::sigma_y) - (-I1 * sp + I1 * sm)).norm() < 1e-14);
  CHECK((el(d, OperatorName::n_q) - el(d, OperatorName::n_photon) - el(d, OperatorName::proj_e)).norm() < 1e-14);
  CHECK((el(d, OperatorName::i_plus) - (ad * sm + a * sp)).norm() < 1e-14);
  CHECK((el(d, OperatorName::i_minus) - (ad * sm - a * sp)).norm() < 1e-14);
}

TEST_CASE("I_minus commutator with H0 gives Delta I_plus away from the edge") {
  HilbertDims d(12);
  const double wr = 3.0, wa = 5.5;
  const Matrix h0 = wr * el(d, OperatorName::n_photon) + 0.5 * wa * el(d, OperatorName::sigma_z);
  const Matrix im = el(d, OperatorName::i_minus), ip = el(d, OperatorName::i_plus);
  const Matrix c = im * h0 - h0 * im - (wa - wr) * ip;
  for (int q = 0; q < 2; ++q)
    for (int n = 0; n < d.fock_levels() - 1; ++n) CHECK(c.col(q * d.fock_levels() + n).norm() < 1e-12);
}

TEST_CASE("dissipator algebra") {
  HilbertDims d(5);
  const auto a = build_elementary(d, OperatorName::a);
  CHECK(dissipator(a, basis_state(d, QubitLevel::g, 0)).matrix().norm() < 1e-15);
  const Matrix expect = basis_state(d, QubitLevel::g, 0).matrix() - basis_state(d, QubitLevel::g, 1).matrix();
  CHECK((dissipator(a, basis_state(d, QubitLevel::g, 1)).matrix() - expect).norm() < 1e-14);
  CHECK_THROWS_AS(dissipator(a, basis_state(HilbertDims(6), QubitLevel::g, 0)), DimensionMismatch);
}

TEST_CASE("dissipator is trace-annihilating and Hermiticity-preserving on random inputs") {
  std::mt19937_64 rng(7);
  HilbertDims d(4);
  for (int k = 0; k < 100; ++k) {
    const DenseOperator l(d, testing::random_matrix(d.total(), rng));
    const DenseOperator rho(d, testing::random_density(d.total(), rng));
    const Matrix out = dissipator(l, rho).matrix();
    const double scale = l.matrix().squaredNorm();
    CHECK(std::abs(out.trace()) < 1e-12 * scale);
    CHECK((out - out.adjoint()).norm() < 1e-12 * scale);
  }
}

TEST_CASE("partial trace over the resonator") {
  HilbertDims d(8);
  const Qubit2 e = partial_trace_resonator(basis_state(d, QubitLevel::e, 5));
  CHECK(std::abs(e(1, 1) - 1.0) < 1e-15);
  CHECK(std::abs(e(0, 0)) < 1e-15);

  Eigen::VectorXcd psi = Eigen::VectorXcd::Zero(d.total());
  psi(d.index(QubitLevel::e, 0)) = std::sqrt(0.5);
  psi(d.index(QubitLevel::g, 1)) = std::sqrt(0.5);
  const Qubit2 mixed = partial_trace_resonator({d, psi * psi.adjoint()});
  CHECK((mixed - 0.5 * Qubit2::Identity()).norm() < 1e-15);

  std::mt19937_64 rng(3);
  for (int k = 0; k < 20; ++k) {
    const Qubit2 q = partial_trace_resonator({d, testing::random_density(d.total(), rng)});
    CHECK(std::abs(q.trace() - 1.0) < 1e-12);
  }

  // Embedding a qubit state and tracing out recovers it.
  const Qubit2 rq = qubit_from_bloch({0.3, -0.4, 0.5});
  Matrix vac = Matrix::Zero(d.fock_levels(), d.fock_levels());
  vac(0, 0) = 1;
  Matrix full(d.total(), d.total());
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      full.block(i * d.fock_levels(), j * d.fock_levels(), d.fock_levels(), d.fock_levels()) = rq(i, j) * vac;
  CHECK((partial_trace_resonator({d, full}) - rq).norm() < 1e-15);
}

TEST_CASE("displacement operator") {
  HilbertDims d(40);
  CHECK((displacement(d, 0.0).matrix() - Matrix::Identity(d.total(), d.total())).norm() < 1e-14);

  const auto vac = product_state(d, Eigen::Vector2cd(1, 0));
  const auto dd = displacement(d, 2.0);
  const auto coh = dd * vac * dd.adjoint();
  CHECK(std::abs(expectation(build_elementary(d, OperatorName::a), coh) - 2.0) < 1e-9);
  CHECK(std::abs(expectation(build_elementary(d, OperatorName::n_photon), coh).real() - 4.0) < 1e-6);

  const Matrix prod = (displacement(d, cplx(1.2, -0.4)) * displacement(d, cplx(-1.2, 0.4))).matrix();
  // A Fock state |n> spreads over ~|alpha| sqrt(n) levels, so the product is
  // only the identity well inside the truncation.
  const int interior = d.fock_levels() / 4;
  for (int q = 0; q < 2; ++q)
    for (int n = 0; n < interior; ++n) {
      Eigen::VectorXcd e = Eigen::VectorXcd::Zero(d.total());
      e(q * d.fock_levels() + n) = 1;
      CHECK((prod * e - e).norm() < 1e-9);
    }

  // D(a) D(b) = exp(i Im(a b*)) D(a + b)
  const cplx al(0.7, 0.2), be(-0.3, 0.9);
  const Matrix lhs = (displacement(d, al) * displacement(d, be)).matrix();
  const Matrix rhs = std::exp(I1 * std::imag(al * std::conj(be))) * displacement(d, al + be).matrix();
  for (int n = 0; n < 10; ++n) CHECK((lhs.col(n) - rhs.col(n)).norm() < 1e-8);

  CHECK_THROWS_AS(displacement(HilbertDims(10), 2.0), TruncationOverflow);
}

TEST_CASE("Bloch vectors and trace distance") {
  const Qubit2 e = qubit_from_bloch({0, 0, 1}), g = qubit_from_bloch({0, 0, -1});
  CHECK(trace_distance_bloch(e, e) == doctest::Approx(0));
  CHECK(trace_distance_bloch(e, g) == doctest::Approx(2));
  CHECK(trace_distance_bloch(e, 0.5 * Qubit2::Identity()) == doctest::Approx(1));
  // rho_ge = (x + i y) / 2 with index 0 = g
  const Qubit2 r = qubit_from_bloch({0.2, 0.6, -0.1});
  CHECK(std::abs(r(0, 1) - cplx(0.1, 0.3)) < 1e-15);
  const Bloch b = bloch_vector(r);
  CHECK(b.x == doctest::Approx(0.2));
  CHECK(b.y == doctest::Approx(0.6));
  CHECK(b.z == doctest::Approx(-0.1));
  // consistent with <sigma_y> on the full space
  HilbertDims d(3);
  const auto rho = product_state(d, Eigen::Vector2cd(1, I1) / std::sqrt(2.0));
  CHECK(expectation(build_elementary(d, OperatorName::sigma_y), rho).real() ==
        doctest::Approx(bloch_vector(partial_trace_resonator(rho)).y));
}
