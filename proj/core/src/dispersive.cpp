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

#include "cqed/dispersive.hpp"

#include <array>
#include <cmath>
#include <utility>
#include <vector>

namespace cqed {

namespace {

Matrix diag_of_nq(const HilbertDims& dims, auto&& f) {
  const int n = dims.fock_levels();
  Eigen::VectorXcd d(dims.total());
  for (int k = 0; k < n; ++k) {
    d(dims.index(QubitLevel::g, k)) = f(double(k));
    d(dims.index(QubitLevel::e, k)) = f(double(k + 1));
  }
  return d.asDiagonal();
}

Matrix el(const HilbertDims& dims, OperatorName name) {
  return Matrix(elementary_sparse(dims, name));
}

}  // namespace

DispersiveParams DispersiveParams::from(double g, double delta, double kappa) {
  if (delta == 0) throw InvalidInput("qubit-resonator detuning must be nonzero");
  DispersiveParams p;
  p.lambda = g / delta;
  if (!(std::abs(p.lambda) < 1)) throw InvalidInput("|g / Delta| must be below 1");
  p.chi = g * g * (1 - p.lambda * p.lambda) / delta;
  p.zeta = -std::pow(g, 4) / std::pow(delta, 3);
  p.n_crit = g == 0 ? INFINITY : delta * delta / (4 * g * g);
  p.n_kappa = p.zeta == 0 ? INFINITY : kappa / std::abs(p.zeta);
  return p;
}

RegimeLevel dispersive_regime(double lambda) {
  const double l = std::abs(lambda);
  if (l <= 0.1) return RegimeLevel::ok;
  if (l <= 0.25) return RegimeLevel::weak;
  return RegimeLevel::outside;
}

double dispersive_angle(double n_q, double lambda) {
  if (n_q <= 0) return -lambda;
  const double s = std::sqrt(n_q);
  return -std::atan(2 * lambda * s) / (2 * s);
}

SparseOp dispersive_unitary_sparse(const HilbertDims& dims, double lambda) {
  const int n = dims.fock_levels();
  std::vector<Eigen::Triplet<cplx>> t;
  t.emplace_back(dims.index(QubitLevel::g, 0), dims.index(QubitLevel::g, 0), 1.0);
  t.emplace_back(dims.index(QubitLevel::e, n - 1), dims.index(QubitLevel::e, n - 1), 1.0);
  for (int k = 0; k + 1 < n; ++k) {
    // Block {|e,k>, |g,k+1>}: rotation by theta = -Lambda(N_q) sqrt(N_q).
    const double nq = k + 1;
    const double theta = -dispersive_angle(nq, lambda) * std::sqrt(nq);
    const double c = std::cos(theta), s = std::sin(theta);
    const int ie = dims.index(QubitLevel::e, k), ig = dims.index(QubitLevel::g, k + 1);
    t.emplace_back(ie, ie, c);
    t.emplace_back(ig, ie, s);
    t.emplace_back(ie, ig, -s);
    t.emplace_back(ig, ig, c);
  }
  SparseOp d(dims.total(), dims.total());
  d.setFromTriplets(t.begin(), t.end());
  return d;
}

DenseOperator dispersive_unitary(const HilbertDims& dims, double lambda) {
  return {dims, Matrix(dispersive_unitary_sparse(dims, lambda))};
}

Eigen::VectorXd dispersive_energies(const HilbertDims& dims, const JCParams& p) {
  const int n = dims.fock_levels();
  const double l2 = p.lambda() * p.lambda();
  const double half_delta = 0.5 * p.delta();
  Eigen::VectorXd e(dims.total());
  for (int k = 0; k < n; ++k) {
    e(dims.index(QubitLevel::g, k)) =
        p.omega_r * k - 0.5 * p.omega_a + half_delta * (1 - std::sqrt(1 + 4 * l2 * k));
    e(dims.index(QubitLevel::e, k)) =
        p.omega_r * k + 0.5 * p.omega_a - half_delta * (1 - std::sqrt(1 + 4 * l2 * (k + 1)));
  }
  e(dims.index(QubitLevel::e, n - 1)) = p.omega_r * (n - 1) + 0.5 * p.omega_a;
  return e;
}

DenseOperator exact_dispersive_hamiltonian(const HilbertDims& dims, const JCParams& p) {
  return {dims, Matrix(dispersive_energies(dims, p).cast<cplx>().asDiagonal())};
}

DenseOperator jc_hamiltonian(const HilbertDims& dims, const JCParams& p) {
  Matrix h = p.omega_r * el(dims, OperatorName::n_photon) +
             0.5 * p.omega_a * el(dims, OperatorName::sigma_z) +
             p.g * el(dims, OperatorName::i_plus);
  return {dims, std::move(h)};
}

DenseOperator transform_operator(const DenseOperator& d, const DenseOperator& op) {
  return d.adjoint() * op * d;
}

SeriesOperator parse_series_operator(std::string_view name) {
  static constexpr std::array<std::pair<std::string_view, SeriesOperator>, 8> names{{
      {"sigma_z_D", SeriesOperator::sigma_z_d},
      {"n_D", SeriesOperator::n_d},
      {"sigma_z_D3", SeriesOperator::sigma_z_d3},
      {"n_D3", SeriesOperator::n_d3},
      {"a_D", SeriesOperator::a_d},
      {"sigma_minus_D", SeriesOperator::sigma_minus_d},
      {"H_s_D3", SeriesOperator::h_s_d3},
      {"H_s_D2", SeriesOperator::h_s_d2},
  }};
  for (const auto& [k, v] : names) {
    if (k == name) return v;
  }
  throw InvalidInput("unknown series operator '" + std::string(name) + "'");
}

DenseOperator series_operator(SeriesOperator which, const HilbertDims& dims, const JCParams& p) {
  const double l = p.lambda();
  const double l2 = l * l;
  const Matrix id = Matrix::Identity(dims.total(), dims.total());
  const Matrix a = el(dims, OperatorName::a);
  const Matrix ad = el(dims, OperatorName::a_dag);
  const Matrix nph = el(dims, OperatorName::n_photon);
  const Matrix sz = el(dims, OperatorName::sigma_z);
  const Matrix sm = el(dims, OperatorName::sigma_minus);
  const Matrix sp = el(dims, OperatorName::sigma_plus);
  const Matrix ip = el(dims, OperatorName::i_plus);
  const Matrix root_inv = diag_of_nq(dims, [&](double n) { return 1.0 / std::sqrt(1 + 4 * l2 * n); });
  const Matrix root_inv3 = diag_of_nq(dims, [&](double n) { return 1.0 - 2 * l2 * n; });
  const auto dp = DispersiveParams::from(p.g, p.delta(), 0.0);

  Matrix out;
  switch (which) {
    case SeriesOperator::sigma_z_d: out = root_inv * (sz - 2 * l * ip); break;
    case SeriesOperator::sigma_z_d3: out = root_inv3 * (sz - 2 * l * ip); break;
    case SeriesOperator::n_d: out = nph + 0.5 * sz + root_inv * (l * ip - 0.5 * sz); break;
    case SeriesOperator::n_d3: out = nph + 0.5 * sz + root_inv3 * (l * ip - 0.5 * sz); break;
    case SeriesOperator::a_d:
      out = a * (id + 0.5 * l2 * sz) + l * (id - 3 * l2 * (nph + 0.5 * id)) * sm +
            l * l2 * a * a * sp;
      break;
    case SeriesOperator::sigma_minus_d:
      out = sm * (id - l2 * (nph + 0.5 * id)) + l * a * sz - l2 * a * a * sp;
      break;
    case SeriesOperator::h_s_d3:
      out = (p.omega_r + dp.zeta) * nph +
            0.5 * (p.omega_a * id + 2 * dp.chi * (nph + 0.5 * id)) * sz + dp.zeta * nph * nph * sz;
      break;
    case SeriesOperator::h_s_d2:
      out = p.omega_r * nph + 0.5 * (p.omega_a * id + 2 * p.g * l * (nph + 0.5 * id)) * sz;
      break;
  }
  return {dims, std::move(out)};
}

DenseOperator dispersive_drive_operator(const HilbertDims& dims, double lambda, cplx eps) {
  const double l2 = lambda * lambda;
  const Matrix id = Matrix::Identity(dims.total(), dims.total());
  const Matrix nph = el(dims, OperatorName::n_photon);
  Matrix x = eps * el(dims, OperatorName::a_dag) * (id + 0.5 * l2 * el(dims, OperatorName::sigma_z)) +
             eps * lambda * (id - 3 * l2 * (nph + 0.5 * id)) * el(dims, OperatorName::sigma_plus);
  return {dims, std::move(x)};
}

LambStark lamb_stark_shifts(const JCParams& p, double n) {
  const double l2 = p.lambda() * p.lambda();
  const double hd = 0.5 * p.delta();
  const auto dp = DispersiveParams::from(p.g, p.delta(), 0.0);
  LambStark s;
  s.lamb = -hd * (1 - std::sqrt(1 + 4 * l2));
  s.stark = hd * (std::sqrt(1 + 4 * l2 * (n + 1)) + std::sqrt(1 + 4 * l2 * n) - 1 -
                  std::sqrt(1 + 4 * l2));
  s.lamb_approx = dp.chi;
  s.stark_approx = 2 * dp.chi * n + 2 * dp.zeta * n * n;
  return s;
}

Matrix interior_projector(const HilbertDims& dims, int margin) {
  const int n = dims.fock_levels();
  Eigen::VectorXcd d = Eigen::VectorXcd::Zero(dims.total());
  for (int k = 0; k < n - margin; ++k) {
    d(dims.index(QubitLevel::g, k)) = 1.0;
    d(dims.index(QubitLevel::e, k)) = 1.0;
  }
  return d.asDiagonal();
}

}  // namespace cqed
