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

#include "cqed/lindblad.hpp"

#include <cmath>
#include <string>
#include <utility>

namespace cqed {

namespace {

SparseOp sp(const HilbertDims& d, OperatorName n) { return elementary_sparse(d, n); }

SparseOp diag_sparse(const Eigen::VectorXcd& v) {
  SparseOp s(v.size(), v.size());
  s.reserve(Eigen::VectorXi::Constant(v.size(), 1));
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (v(i) != cplx(0)) s.insert(i, i) = v(i);
  }
  s.makeCompressed();
  return s;
}

// Diagonal function of photon number and qubit level.
SparseOp diag_fn(const HilbertDims& d, auto&& f) {
  Eigen::VectorXcd v(d.total());
  for (int k = 0; k < d.fock_levels(); ++k) {
    v(d.index(QubitLevel::g, k)) = f(double(k), -1.0);
    v(d.index(QubitLevel::e, k)) = f(double(k), 1.0);
  }
  return diag_sparse(v);
}

struct FlipParts {
  SparseOp same, down, up;
};

// Splits an operator by how it changes the (dressed) qubit label.
FlipParts split_by_qubit_flip(const HilbertDims& d, const SparseOp& op) {
  const int n = d.fock_levels();
  std::vector<Eigen::Triplet<cplx>> same, down, up;
  for (int c = 0; c < op.outerSize(); ++c) {
    for (SparseOp::InnerIterator it(op, c); it; ++it) {
      if (std::abs(it.value()) < 1e-300) continue;
      const bool re = it.row() >= n, ce = it.col() >= n;
      auto& dst = re == ce ? same : (ce ? down : up);
      dst.emplace_back(it.row(), it.col(), it.value());
    }
  }
  FlipParts p{SparseOp(d.total(), d.total()), SparseOp(d.total(), d.total()),
              SparseOp(d.total(), d.total())};
  p.same.setFromTriplets(same.begin(), same.end());
  p.down.setFromTriplets(down.begin(), down.end());
  p.up.setFromTriplets(up.begin(), up.end());
  return p;
}

}  // namespace

BandedOp::BandedOp(const SparseOp& s) : dim_(static_cast<int>(s.rows())) {
  if (s.rows() != s.cols()) throw DimensionMismatch("banded operator must be square");
  for (int c = 0; c < s.outerSize(); ++c) {
    for (SparseOp::InnerIterator it(s, c); it; ++it) {
      if (it.value() == cplx(0)) continue;
      diagonal_at(static_cast<int>(it.col() - it.row()))(it.row()) += it.value();
    }
  }
}

Eigen::VectorXcd& BandedOp::diagonal_at(int offset) {
  for (std::size_t d = 0; d < offsets_.size(); ++d) {
    if (offsets_[d] == offset) return values_[d];
  }
  offsets_.push_back(offset);
  values_.push_back(Eigen::VectorXcd::Zero(dim_));
  return values_.back();
}

void BandedOp::left_apply(const Matrix& x, Matrix& out, cplx scale) const {
  const int n = dim_;
  for (std::size_t d = 0; d < offsets_.size(); ++d) {
    const int o = offsets_[d];
    const int i0 = std::max(0, -o), i1 = std::min(n, n - o);
    if (i1 <= i0) continue;
    const auto v = (scale * values_[d].segment(i0, i1 - i0)).eval();
    for (int c = 0; c < n; ++c) {
      out.col(c).segment(i0, i1 - i0).array() += v.array() * x.col(c).segment(i0 + o, i1 - i0).array();
    }
  }
}

void BandedOp::right_apply_adjoint(const Matrix& x, Matrix& out, cplx scale) const {
  const int n = dim_;
  for (std::size_t d = 0; d < offsets_.size(); ++d) {
    const int o = offsets_[d];
    const int c0 = std::max(0, -o), c1 = std::min(n, n - o);
    for (int c = c0; c < c1; ++c) {
      const cplx w = scale * std::conj(values_[d](c));
      if (w == cplx(0)) continue;
      out.col(c) += w * x.col(c + o);
    }
  }
}

LindbladGenerator::LindbladGenerator(HilbertDims dims) : dims_(dims), h0_(dims.total(), dims.total()) {
  rebuild();
}

void LindbladGenerator::set_hamiltonian(SparseOp h0) {
  if (h0.rows() != dims_.total() || h0.cols() != dims_.total()) {
    throw DimensionMismatch("Hamiltonian shape does not match Hilbert dimensions");
  }
  h0_ = std::move(h0);
  rebuild();
}

void LindbladGenerator::add_drive(SparseOp x, std::function<cplx(double)> coeff) {
  drive_x_.push_back(std::move(x));
  drive_coeff_.push_back(std::move(coeff));
  rebuild();
}

void LindbladGenerator::add_collapse(const SparseOp& l, double rate) {
  if (rate < 0) throw InvalidInput("collapse rate must be non-negative");
  if (rate == 0 || l.nonZeros() == 0) return;
  SparseOp s = std::sqrt(rate) * l;
  s.prune(cplx(0), 0.0);
  if (s.nonZeros() == 0) return;
  collapse_sparse_.push_back(s);
  collapse_.emplace_back(s);
  rebuild();
}

void LindbladGenerator::rebuild() {
  SparseOp heff = h0_;
  for (const auto& l : collapse_sparse_) heff -= cplx(0, 0.5) * SparseOp(l.adjoint() * l);
  heff0_ = BandedOp(heff);
  drive_b_.clear();
  drive_bd_.clear();
  for (const auto& x : drive_x_) {
    drive_b_.emplace_back(x);
    drive_bd_.emplace_back(SparseOp(x.adjoint()));
  }
  // Give the static part every offset the drives use so heff_at() only rescales.
  for (const auto* group : {&drive_b_, &drive_bd_}) {
    for (const auto& b : *group) {
      for (int o : b.offsets()) heff0_.diagonal_at(o);
    }
  }
  heff_t_ = heff0_;
}

void LindbladGenerator::set_interaction_energies(Eigen::VectorXd e) {
  if (e.size() != dims_.total()) throw DimensionMismatch("interaction energies have wrong length");
  if (h0_.nonZeros() != 0) throw InvalidInput("interaction picture requires an empty H0");
  energies_ = std::move(e);
}

void LindbladGenerator::phase_into(const BandedOp& src, BandedOp& dst) const {
  const int n = dims_.total();
  dst = src;
  for (std::size_t d = 0; d < src.offsets().size(); ++d) {
    const int o = src.offsets()[d];
    if (o == 0) continue;
    auto& v = dst.diagonal_at(o);
    const int i0 = std::max(0, -o), i1 = std::min(n, n - o);
    for (int i = i0; i < i1; ++i) v(i) *= phase_(i) * std::conj(phase_(i + o));
  }
}

const std::vector<BandedOp>& LindbladGenerator::collapse_at(double t) const {
  if (energies_.size() == 0) return collapse_;
  collapse_t_.resize(collapse_.size());
  for (std::size_t k = 0; k < collapse_.size(); ++k) phase_into(collapse_[k], collapse_t_[k]);
  (void)t;
  return collapse_t_;
}

const BandedOp& LindbladGenerator::heff_at(double t) const {
  if (energies_.size() != 0) {
    phase_ = (I1 * t * energies_.cast<cplx>()).array().exp();
  }
  if (drive_x_.empty() && energies_.size() == 0) return heff0_;
  heff_t_ = heff0_;
  for (std::size_t k = 0; k < drive_x_.size(); ++k) {
    const cplx c = drive_coeff_[k](t);
    for (std::size_t d = 0; d < drive_b_[k].offsets().size(); ++d) {
      heff_t_.diagonal_at(drive_b_[k].offsets()[d]) += c * drive_b_[k].values()[d];
    }
    for (std::size_t d = 0; d < drive_bd_[k].offsets().size(); ++d) {
      heff_t_.diagonal_at(drive_bd_[k].offsets()[d]) += std::conj(c) * drive_bd_[k].values()[d];
    }
  }
  if (energies_.size() != 0) {
    BandedOp tmp;
    phase_into(heff_t_, tmp);
    heff_t_ = std::move(tmp);
  }
  return heff_t_;
}

void LindbladGenerator::apply(double t, const Matrix& rho, Matrix& out) const {
  const int n = dims_.total();
  const BandedOp& h = heff_at(t);
  out.setZero(n, n);
  h.left_apply(rho, out, -I1);
  h.right_apply_adjoint(rho, out, I1);
  for (const auto& l : collapse_at(t)) {
    m1_.setZero(n, n);
    l.left_apply(rho, m1_);
    l.right_apply_adjoint(m1_, out);
  }
}

void LindbladGenerator::apply_hermitian(double t, const Matrix& rho, Matrix& out) const {
  const int n = dims_.total();
  m1_.setZero(n, n);
  heff_at(t).left_apply(rho, m1_, -I1);
  out = m1_ + m1_.adjoint();
  for (const auto& l : collapse_at(t)) {
    m1_.setZero(n, n);
    l.left_apply(rho, m1_);
    l.right_apply_adjoint(m1_, out);
  }
}

DenseOperator LindbladGenerator::apply(double t, const DenseOperator& rho) const {
  if (!(rho.dims() == dims_)) throw DimensionMismatch("state dimensions differ from generator");
  Matrix out;
  apply(t, rho.matrix(), out);
  return {dims_, std::move(out)};
}

ModelTier parse_model_tier(std::string_view s) {
  if (s == "full") return ModelTier::full;
  if (s == "full_secular") return ModelTier::full_secular;
  if (s == "dispersive") return ModelTier::dispersive;
  throw InvalidInput("unknown master-equation model '" + std::string(s) + "'");
}

std::string_view to_string(ModelTier t) {
  switch (t) {
    case ModelTier::full: return "full";
    case ModelTier::full_secular: return "full_secular";
    case ModelTier::dispersive: return "dispersive";
  }
  return "?";
}

LindbladGenerator rhs_full(const HilbertDims& d, const SystemParams& p) {
  p.validate();
  const double w = p.reference_frequency();
  LindbladGenerator gen(d);
  gen.add_collapse(sp(d, OperatorName::a), p.kappa);
  gen.add_collapse(sp(d, OperatorName::sigma_minus), p.gamma_1);
  gen.add_collapse(sp(d, OperatorName::sigma_z), 0.5 * p.gamma_phi);
  SparseOp h = (p.omega_r - w) * sp(d, OperatorName::n_photon) +
               (0.5 * (p.omega_a - w)) * sp(d, OperatorName::sigma_z) +
               p.g * sp(d, OperatorName::i_plus);
  gen.set_hamiltonian(std::move(h));
  if (!p.drives.empty()) {
    gen.add_drive(sp(d, OperatorName::a_dag), [p, w](double t) { return p.drive_in_frame(t, w); });
  }
  return gen;
}

LindbladGenerator rhs_dispersive(const HilbertDims& d, const SystemParams& p, DispersiveOptions opt) {
  p.validate();
  if (dispersive_regime(p.lambda()) == RegimeLevel::outside) {
    throw InvalidInput("dispersive model requires |g / Delta| <= 0.25");
  }
  const double w = p.reference_frequency();
  const auto dp = p.dispersive();
  const double l = dp.lambda, l2 = l * l;
  const RateSet r = dispersive_rates(p);
  const SparseOp a = sp(d, OperatorName::a);
  const SparseOp sm = sp(d, OperatorName::sigma_minus);
  const SparseOp spl = sp(d, OperatorName::sigma_plus);
  const SparseOp sz = sp(d, OperatorName::sigma_z);
  const SparseOp dress_a = diag_fn(d, [&](double, double s) { return 1 + 0.5 * l2 * s; });
  const SparseOp n_half = diag_fn(d, [&](double n, double) { return n + 0.5; });
  SparseOp id(d.total(), d.total());
  id.setIdentity();

  LindbladGenerator gen(d);
  gen.add_collapse(a * dress_a, r.kappa);
  gen.add_collapse(sm, r.gamma_kappa);
  gen.add_collapse(sm * (id - l2 * n_half), r.gamma);
  gen.add_collapse(a * sz, r.kappa_gamma);
  gen.add_collapse(sz * (id - 2 * l2 * n_half), 0.5 * r.gamma_phi);
  gen.add_collapse(sp(d, OperatorName::a_dag) * sm, r.gamma_plus_delta);
  gen.add_collapse(a * spl, r.gamma_minus_delta);

  gen.set_hamiltonian(diag_fn(d, [&](double n, double s) {
    return (p.omega_r + dp.zeta - w) * n + 0.5 * s * 2 * dp.chi * (n + 0.5) + dp.zeta * n * n * s;
  }));
  if (!p.drives.empty()) {
    gen.add_drive(SparseOp(sp(d, OperatorName::a_dag) * dress_a),
                  [p, w](double t) { return p.drive_in_frame(t, w); });
    if (opt.qubit_drive_line) {
      const double wa = p.omega_a;
      gen.add_drive(SparseOp(l * (id - 3 * l2 * n_half) * spl),
                    [p, wa](double t) { return p.drive_in_frame(t, wa); });
    }
  }
  return gen;
}

LindbladGenerator rhs_full_secular(const HilbertDims& d, const SystemParams& p) {
  p.validate();
  const double w = p.reference_frequency();
  const SparseOp dsp = dispersive_unitary_sparse(d, p.lambda());
  const SparseOp dd = dsp.adjoint();
  auto conj = [&](OperatorName n) {
    SparseOp m = dd * sp(d, n) * dsp;
    m.prune(cplx(1.0), 1e-15);
    return m;
  };
  const FlipParts a = split_by_qubit_flip(d, conj(OperatorName::a));
  const FlipParts sm = split_by_qubit_flip(d, conj(OperatorName::sigma_minus));
  const FlipParts sz = split_by_qubit_flip(d, conj(OperatorName::sigma_z));

  LindbladGenerator gen(d);
  for (const FlipParts* part : {&a, &sm, &sz}) {
    const double rate = part == &a ? p.kappa : part == &sm ? p.gamma_1 : 0.5 * p.gamma_phi;
    gen.add_collapse(part->same, rate);
    gen.add_collapse(part->down, rate);
    gen.add_collapse(part->up, rate);
  }
  const Eigen::VectorXd e = dispersive_energies(d, p.jc());
  Eigen::VectorXcd h(d.total());
  for (int k = 0; k < d.fock_levels(); ++k) {
    const int ig = d.index(QubitLevel::g, k), ie = d.index(QubitLevel::e, k);
    h(ig) = e(ig) - w * k + 0.5 * p.omega_a;
    h(ie) = e(ie) - w * k - 0.5 * p.omega_a;
  }
  gen.set_hamiltonian(diag_sparse(h));
  if (!p.drives.empty()) {
    gen.add_drive(SparseOp(a.same.adjoint()), [p, w](double t) { return p.drive_in_frame(t, w); });
  }
  return gen;
}

InteractionModel rhs_full_interaction(const HilbertDims& d, const SystemParams& p) {
  p.validate();
  const double w = p.reference_frequency();
  const SparseOp dsp = dispersive_unitary_sparse(d, p.lambda());
  const SparseOp dd = dsp.adjoint();
  auto conj = [&](OperatorName n) {
    SparseOp m = dd * sp(d, n) * dsp;
    m.prune(cplx(1.0), 1e-15);
    return m;
  };
  LindbladGenerator gen(d);
  gen.add_collapse(conj(OperatorName::a), p.kappa);
  gen.add_collapse(conj(OperatorName::sigma_minus), p.gamma_1);
  gen.add_collapse(conj(OperatorName::sigma_z), 0.5 * p.gamma_phi);
  Eigen::VectorXd e = dispersive_energies(d, p.jc());
  for (int k = 0; k < d.fock_levels(); ++k) {
    e(d.index(QubitLevel::g, k)) -= w * (k - 0.5);
    e(d.index(QubitLevel::e, k)) -= w * (k + 0.5);
  }
  if (!p.drives.empty()) {
    gen.add_drive(conj(OperatorName::a_dag), [p, w](double t) { return p.drive_in_frame(t, w); });
  }
  gen.set_interaction_energies(e);
  return {std::move(gen), std::move(e)};
}

int suggested_fock_levels(double n_mean) {
  return static_cast<int>(std::ceil(n_mean + 10 * std::sqrt(n_mean + 1)));
}

namespace {

double top_population(const HilbertDims& d, const Matrix& rho) {
  const int n = d.fock_levels();
  double s = 0;
  for (int k = n - 2; k < n; ++k) {
    s += rho(k, k).real() + rho(n + k, n + k).real();
  }
  return s;
}

// Multiplies the e-g coherence blocks by exp(i phi): a qubit frame rotation.
void rotate_qubit_blocks(const HilbertDims& d, Matrix& rho, double phi) {
  const int n = d.fock_levels();
  const cplx f = std::exp(I1 * phi);
  rho.block(n, 0, n, n) *= f;
  rho.block(0, n, n, n) *= std::conj(f);
}

void rotate_qubit(Qubit2& q, double phi) {
  q(1, 0) *= std::exp(I1 * phi);
  q(0, 1) *= std::exp(-I1 * phi);
}

}  // namespace

EvolutionResult evolve(ModelTier tier, const HilbertDims& d, const SystemParams& p,
                       const DenseOperator& rho0, std::span<const double> times,
                       const EvolveOptions& opt) {
  if (!(rho0.dims() == d)) throw DimensionMismatch("initial state dimensions differ");
  if (times.empty()) throw InvalidInput("empty output grid");
  Eigen::VectorXd energies;
  LindbladGenerator gen = [&] {
    if (tier == ModelTier::dispersive) return rhs_dispersive(d, p, opt.dispersive);
    if (tier == ModelTier::full_secular) return rhs_full_secular(d, p);
    auto m = rhs_full_interaction(d, p);
    energies = std::move(m.energies);
    return std::move(m.generator);
  }();
  // Elementwise exp(i s (E_i - E_j) t) for the interaction picture.
  auto to_interaction = [&](Matrix& y, double t, double s) {
    const Eigen::VectorXcd ph = (I1 * (s * t) * energies.cast<cplx>()).array().exp();
    y = ph.asDiagonal() * y * ph.conjugate().asDiagonal();
  };
  const double w = p.reference_frequency();
  const double wa = p.omega_a;
  const double t0 = times.front();
  const SparseOp dsp = dispersive_unitary_sparse(d, p.lambda());
  const SparseOp dd = dsp.adjoint();
  const SparseOp n_op = elementary_sparse(d, OperatorName::n_photon);
  const SparseOp a_op = elementary_sparse(d, OperatorName::a);

  Matrix rho = dd * (rho0.matrix() * dsp);
  if (tier == ModelTier::full) {
    to_interaction(rho, t0, 1.0);
  } else {
    rotate_qubit_blocks(d, rho, (wa - w) * t0);
  }

  EvolutionResult res;
  res.tier = tier;
  res.fock_levels = d.fock_levels();
  res.min_eigenvalue = INFINITY;

  auto observe = [&](double t, const Matrix& y) {
    EvolutionSample s;
    s.t = t;
    s.top_population = top_population(d, y);
    Matrix bare, disp;
    if (tier == ModelTier::full) {
      disp = y;
      to_interaction(disp, t, -1.0);
    } else {
      disp = y;
      rotate_qubit_blocks(d, disp, (w - wa) * t);
    }
    bare = dsp * (disp * dd);
    const DenseOperator bop(d, bare), dop(d, disp);
    s.qubit_bare = partial_trace_resonator(bop);
    s.qubit_dispersive = partial_trace_resonator(dop);
    rotate_qubit(s.qubit_bare, (wa - w) * t);
    rotate_qubit(s.qubit_dispersive, (wa - w) * t);
    s.photons = (n_op * bare).trace().real();
    s.field = (a_op * bare).trace();
    res.max_trace_error = std::max(res.max_trace_error, std::abs(y.trace() - 1.0));
    res.max_hermiticity_error =
        std::max(res.max_hermiticity_error, (y - y.adjoint()).cwiseAbs().maxCoeff());
    double mineig;
    if (d.total() <= opt.positivity_dim_limit) {
      Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (y + y.adjoint()), Eigen::EigenvaluesOnly);
      mineig = es.eigenvalues().minCoeff();
    } else {
      Eigen::SelfAdjointEigenSolver<Qubit2> es(s.qubit_bare, Eigen::EigenvaluesOnly);
      mineig = es.eigenvalues().minCoeff();
    }
    res.min_eigenvalue = std::min(res.min_eigenvalue, mineig);
    res.samples.push_back(std::move(s));
  };
  auto post = [&](double t, Matrix& y) {
    y = 0.5 * (y + y.adjoint()).eval();
    const double top = top_population(d, y);
    if (top > opt.overflow_threshold) {
      throw TruncationOverflow("top-two Fock population " + std::to_string(top) + " at t = " +
                               std::to_string(t) + " us exceeds threshold with N = " +
                               std::to_string(d.fock_levels()));
    }
  };
  Dopri5<Matrix> integ([&gen](double t, const Matrix& y, Matrix& dy) { gen.apply_hermitian(t, y, dy); },
                       opt.integrator);
  integ.integrate(t0, rho, times, observe, post);
  res.stats = integ.stats();
  res.final_state = std::move(rho);
  return res;
}

}  // namespace cqed
