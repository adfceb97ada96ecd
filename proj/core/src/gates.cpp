// Copyright 2026 The polariq Authors
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

#include "polariq/gates.hpp"

#include <bit>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <utility>

namespace polariq {
namespace {

// Connected components of the nonzero pattern of a square matrix.
std::vector<std::vector<int>> components(const CMatrix& m) {
  const int n = static_cast<int>(m.rows());
  std::vector<int> parent(static_cast<std::size_t>(n));
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](int x) {
    while (parent[static_cast<std::size_t>(x)] != x) {
      parent[static_cast<std::size_t>(x)] = parent[static_cast<std::size_t>(parent[static_cast<std::size_t>(x)])];
      x = parent[static_cast<std::size_t>(x)];
    }
    return x;
  };
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (i != j && m(i, j) != Complex(0.0, 0.0)) {
        const int a = find(i);
        const int b = find(j);
        if (a != b) parent[static_cast<std::size_t>(std::max(a, b))] = std::min(a, b);
      }
    }
  }
  std::vector<std::vector<int>> groups;
  std::vector<int> slot(static_cast<std::size_t>(n), -1);
  for (int i = 0; i < n; ++i) {
    const int r = find(i);
    if (slot[static_cast<std::size_t>(r)] < 0) {
      slot[static_cast<std::size_t>(r)] = static_cast<int>(groups.size());
      groups.emplace_back();
    }
    groups[static_cast<std::size_t>(slot[static_cast<std::size_t>(r)])].push_back(i);
  }
  return groups;
}

CMatrix restrict_to(const CMatrix& m, const std::vector<int>& idx) {
  const auto k = static_cast<Eigen::Index>(idx.size());
  CMatrix out(k, k);
  for (Eigen::Index a = 0; a < k; ++a) {
    for (Eigen::Index b = 0; b < k; ++b) out(a, b) = m(idx[static_cast<std::size_t>(a)], idx[static_cast<std::size_t>(b)]);
  }
  return out;
}

struct TwoModeOps {
  CMatrix a0, a1, a0d, a1d, n0, n1;
};

TwoModeOps two_mode_ops(FockCutoff cutoff) {
  const auto lad = ladder_matrices(cutoff);
  const CMatrix id = CMatrix::Identity(cutoff.local_dim(), cutoff.local_dim());
  TwoModeOps ops;
  ops.a0 = kron(lad.annihilation, id);
  ops.a1 = kron(id, lad.annihilation);
  ops.a0d = ops.a0.adjoint();
  ops.a1d = ops.a1.adjoint();
  ops.n0 = kron(lad.number, id);
  ops.n1 = kron(id, lad.number);
  return ops;
}

std::uint64_t bits(double x) { return std::bit_cast<std::uint64_t>(x); }

}  // namespace

CMatrix kron(const CMatrix& a, const CMatrix& b) {
  CMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

CMatrix expm_minus_i_hermitian(const CMatrix& h) {
  if (h.rows() != h.cols()) throw std::invalid_argument("generator must be square");
  CMatrix out = CMatrix::Zero(h.rows(), h.cols());
  for (const auto& idx : components(h)) {
    const CMatrix sub = restrict_to(h, idx);
    Eigen::SelfAdjointEigenSolver<CMatrix> solver(sub);
    if (solver.info() != Eigen::Success) throw std::runtime_error("Hermitian eigendecomposition failed");
    const RVector& w = solver.eigenvalues();
    CVector phases(w.size());
    for (Eigen::Index k = 0; k < w.size(); ++k) phases[k] = std::polar(1.0, -w[k]);
    const CMatrix& v = solver.eigenvectors();
    const CMatrix block = v * phases.asDiagonal() * v.adjoint();
    for (std::size_t a = 0; a < idx.size(); ++a) {
      for (std::size_t b = 0; b < idx.size(); ++b) {
        out(idx[a], idx[b]) = block(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b));
      }
    }
  }
  return out;
}

GateMatrix::GateMatrix(int arity, FockCutoff cutoff, CMatrix matrix, std::string label)
    : arity_(arity), cutoff_(cutoff), matrix_(std::move(matrix)), label_(std::move(label)) {
  if (arity != 1 && arity != 2) throw std::invalid_argument("gate arity must be 1 or 2");
  const Eigen::Index dim = arity == 1 ? cutoff.local_dim() : cutoff.local_dim() * cutoff.local_dim();
  if (matrix_.rows() != dim || matrix_.cols() != dim) {
    throw std::invalid_argument("gate matrix size does not match (N+1)^arity");
  }
  diag_ = matrix_.diagonal();
  diagonal_ = true;
  for (Eigen::Index i = 0; i < dim && diagonal_; ++i) {
    for (Eigen::Index j = 0; j < dim; ++j) {
      if (i != j && matrix_(i, j) != Complex(0.0, 0.0)) {
        diagonal_ = false;
        break;
      }
    }
  }
  if (!diagonal_) {
    for (auto& idx : components(matrix_)) {
      CMatrix block = restrict_to(matrix_, idx);
      blocks_.push_back(SectorBlock{std::move(idx), std::move(block)});
    }
  }
}

double GateMatrix::unitarity_defect() const {
  const CMatrix residual = matrix_.adjoint() * matrix_ - CMatrix::Identity(matrix_.rows(), matrix_.cols());
  return residual.cwiseAbs().maxCoeff();
}

GateMatrix GateMatrix::adjoint() const { return GateMatrix(arity_, cutoff_, matrix_.adjoint(), label_ + "^dagger"); }

GateMatrix build_dielectric_bs(double theta, FockCutoff cutoff) {
  const auto ops = two_mode_ops(cutoff);
  // exp(G) with G = theta (a0^dag a1 - a0 a1^dag) equals exp(-i H) for H = i G.
  const CMatrix h = Complex(0.0, theta) * (ops.a0d * ops.a1 - ops.a0 * ops.a1d);
  const CMatrix rotation = expm_minus_i_hermitian(h);
  CVector coating(ops.n1.rows());
  for (Eigen::Index i = 0; i < coating.size(); ++i) coating[i] = std::polar(1.0, kPi * ops.n1(i, i).real());
  return GateMatrix(2, cutoff, rotation * coating.asDiagonal(), "dielectric_bs");
}

GateMatrix build_symmetric_bs(double theta, FockCutoff cutoff) {
  const auto ops = two_mode_ops(cutoff);
  const CMatrix h = -theta * (ops.a0d * ops.a1 + ops.a1d * ops.a0);
  return GateMatrix(2, cutoff, expm_minus_i_hermitian(h), "symmetric_bs");
}

GateMatrix build_kerr(double u_dt, double delta_dt, FockCutoff cutoff) {
  const int d = cutoff.local_dim();
  CMatrix m = CMatrix::Zero(d, d);
  for (int n = 0; n < d; ++n) {
    const double phase = -delta_dt * n + 0.5 * u_dt * n * (n - 1);
    m(n, n) = std::polar(1.0, -phase);
  }
  return GateMatrix(1, cutoff, std::move(m), "kerr");
}

GateMatrix build_mzi_arm(double u_dt, double phi_lo, FockCutoff cutoff) {
  const int d = cutoff.local_dim();
  CMatrix m = CMatrix::Zero(d * d, d * d);
  for (int n0 = 0; n0 < d; ++n0) {
    for (int n1 = 0; n1 < d; ++n1) {
      const double phase = 0.5 * u_dt * n0 * (n0 - 1) + phi_lo * n1;
      m(n0 * d + n1, n0 * d + n1) = std::polar(1.0, -phase);
    }
  }
  return GateMatrix(2, cutoff, std::move(m), "mzi_arm");
}

GateMatrix build_nonlinear_coupler(double j_dt, double u_dt, double delta_dt, FockCutoff cutoff) {
  const auto ops = two_mode_ops(cutoff);
  const CMatrix h = -delta_dt * (ops.n0 + ops.n1) - j_dt * (ops.a1d * ops.a0 + ops.a0d * ops.a1) +
                    (0.5 * u_dt) * (ops.a0d * ops.a0d * ops.a0 * ops.a0 + ops.a1d * ops.a1d * ops.a1 * ops.a1);
  return GateMatrix(2, cutoff, expm_minus_i_hermitian(h), "nonlinear_coupler");
}

GateMatrix build_phase(double phi, FockCutoff cutoff) {
  const int d = cutoff.local_dim();
  CMatrix m = CMatrix::Zero(d, d);
  for (int n = 0; n < d; ++n) m(n, n) = std::polar(1.0, -phi * n);
  return GateMatrix(1, cutoff, std::move(m), "phase");
}

GateMatrix build_gate(GateKind kind, const GateParams& p, FockCutoff cutoff) {
  switch (kind) {
    case GateKind::DielectricBS:
      return build_dielectric_bs(p.theta, cutoff);
    case GateKind::SymmetricBS:
      return build_symmetric_bs(p.theta, cutoff);
    case GateKind::Kerr:
      return build_kerr(p.u_dt, p.delta_dt, cutoff);
    case GateKind::MziArm:
      return build_mzi_arm(p.u_dt, p.phi, cutoff);
    case GateKind::NonlinearCoupler:
      return build_nonlinear_coupler(p.j_dt, p.u_dt, p.delta_dt, cutoff);
    case GateKind::Phase:
      return build_phase(p.phi, cutoff);
  }
  throw std::invalid_argument("unknown gate kind");
}

std::shared_ptr<const GateMatrix> GateCache::get(GateKind kind, const GateParams& p, FockCutoff cutoff) {
  const Key key{static_cast<int>(kind), cutoff.max_photons(), bits(p.theta), bits(p.phi),
                bits(p.j_dt),          bits(p.u_dt),          bits(p.delta_dt)};
  {
    std::lock_guard lock(mutex_);
    if (auto it = gates_.find(key); it != gates_.end()) return it->second;
  }
  // Built outside the lock; a racing duplicate build is harmless.
  auto gate = std::make_shared<const GateMatrix>(build_gate(kind, p, cutoff));
  std::lock_guard lock(mutex_);
  return gates_.emplace(key, std::move(gate)).first->second;
}

std::size_t GateCache::size() const {
  std::lock_guard lock(mutex_);
  return gates_.size();
}

void GateCache::clear() {
  std::lock_guard lock(mutex_);
  gates_.clear();
}

GateCache& shared_gate_cache() {
  static GateCache cache;
  return cache;
}

}  // namespace polariq
