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

#include "polariq/fock.hpp"

#include <cmath>
#include <stdexcept>
#include <string>
#include <utility>

namespace polariq {

FockCutoff::FockCutoff(int max_photons) : max_photons_(max_photons) {
  if (max_photons < 1) {
    throw std::invalid_argument("Fock cutoff must be at least 1, got " + std::to_string(max_photons));
  }
}

FockIndexer::FockIndexer(int num_modes, FockCutoff cutoff) : num_modes_(num_modes), cutoff_(cutoff) {
  if (num_modes < 1) {
    throw std::invalid_argument("number of modes must be at least 1");
  }
  const auto d = static_cast<std::size_t>(cutoff.local_dim());
  strides_.assign(static_cast<std::size_t>(num_modes), 1);
  for (int l = num_modes - 2; l >= 0; --l) {
    strides_[static_cast<std::size_t>(l)] = strides_[static_cast<std::size_t>(l) + 1] * d;
  }
  dimension_ = strides_[0] * d;
}

std::size_t FockIndexer::index(std::span<const int> occupations) const {
  if (occupations.size() != static_cast<std::size_t>(num_modes_)) {
    throw std::invalid_argument("occupation tuple has wrong length");
  }
  std::size_t idx = 0;
  for (std::size_t l = 0; l < occupations.size(); ++l) {
    const int n = occupations[l];
    if (n < 0 || n > cutoff_.max_photons()) {
      throw std::out_of_range("occupation " + std::to_string(n) + " outside 0.." +
                              std::to_string(cutoff_.max_photons()));
    }
    idx += static_cast<std::size_t>(n) * strides_[l];
  }
  return idx;
}

std::vector<int> FockIndexer::occupations(std::size_t index) const {
  if (index >= dimension_) throw std::out_of_range("flat index outside Fock space");
  std::vector<int> occ(static_cast<std::size_t>(num_modes_));
  for (std::size_t l = 0; l < occ.size(); ++l) {
    occ[l] = static_cast<int>(index / strides_[l]);
    index %= strides_[l];
  }
  return occ;
}

int FockIndexer::occupation(std::size_t index, int mode) const {
  const auto d = static_cast<std::size_t>(cutoff_.local_dim());
  return static_cast<int>((index / stride(mode)) % d);
}

SingleModeCoherent coherent_state(Complex alpha, FockCutoff cutoff) {
  if (!std::isfinite(alpha.real()) || !std::isfinite(alpha.imag())) {
    throw std::invalid_argument("coherent amplitude must be finite");
  }
  const int d = cutoff.local_dim();
  SingleModeCoherent out;
  out.amplitudes.resize(d);
  const double prefactor = std::exp(-0.5 * std::norm(alpha));
  Complex term = prefactor;  // e^{-|a|^2/2} a^n / sqrt(n!)
  long double kept = 0.0L;
  for (int n = 0; n < d; ++n) {
    if (n > 0) term *= alpha / std::sqrt(static_cast<double>(n));
    out.amplitudes[n] = term;
    kept += static_cast<long double>(std::norm(term));
  }
  out.leakage = static_cast<double>(std::max(0.0L, 1.0L - kept));
  out.amplitudes /= std::sqrt(static_cast<double>(kept));
  return out;
}

bool exceeds_truncation_guard(const CoherentInput& input, FockCutoff cutoff) {
  for (const auto& a : input.alphas) {
    if (std::norm(a) > 0.5 * cutoff.max_photons()) return true;
  }
  return false;
}

MultiModeState::MultiModeState(int num_modes, FockCutoff cutoff)
    : indexer_(num_modes, cutoff), amplitudes_(CVector::Zero(static_cast<Eigen::Index>(indexer_.dimension()))) {
  amplitudes_[0] = 1.0;
}

MultiModeState::MultiModeState(int num_modes, FockCutoff cutoff, CVector amplitudes, double leakage)
    : indexer_(num_modes, cutoff), amplitudes_(std::move(amplitudes)), norm_leakage_(leakage) {
  if (static_cast<std::size_t>(amplitudes_.size()) != indexer_.dimension()) {
    throw std::invalid_argument("amplitude vector length does not match (N+1)^L");
  }
  if (leakage < 0.0) throw std::invalid_argument("norm leakage must be non-negative");
}

Complex MultiModeState::amplitude(std::span<const int> occupations) const {
  return amplitudes_[static_cast<Eigen::Index>(indexer_.index(occupations))];
}

double MultiModeState::norm_squared() const { return amplitudes_.squaredNorm(); }

double MultiModeState::normalize() {
  const double n2 = norm_squared();
  if (!(n2 > 0.0)) throw std::domain_error("cannot normalize a zero state");
  amplitudes_ /= std::sqrt(n2);
  return n2;
}

MultiModeState product_state(const CoherentInput& input, FockCutoff cutoff) {
  const int L = static_cast<int>(input.alphas.size());
  if (L < 1) throw std::invalid_argument("product state needs at least one mode");
  CVector amps = CVector::Ones(1);
  double kept = 1.0;
  for (const auto& alpha : input.alphas) {
    const auto mode = coherent_state(alpha, cutoff);
    kept *= 1.0 - mode.leakage;
    CVector next(amps.size() * mode.amplitudes.size());
    for (Eigen::Index i = 0; i < amps.size(); ++i) {
      next.segment(i * mode.amplitudes.size(), mode.amplitudes.size()) = amps[i] * mode.amplitudes;
    }
    amps = std::move(next);
  }
  return MultiModeState(L, cutoff, std::move(amps), 1.0 - kept);
}

MultiModeState fock_state(std::span<const int> occupations, FockCutoff cutoff) {
  MultiModeState state(static_cast<int>(occupations.size()), cutoff);
  state.amplitudes().setZero();
  state.amplitudes()[static_cast<Eigen::Index>(state.indexer().index(occupations))] = 1.0;
  return state;
}

DensityMatrix DensityMatrix::from_pure(const MultiModeState& state) {
  return DensityMatrix{state.num_modes(), state.cutoff(), state.amplitudes() * state.amplitudes().adjoint()};
}

LadderOperators ladder_matrices(FockCutoff cutoff) {
  const int d = cutoff.local_dim();
  LadderOperators ops;
  ops.annihilation = CMatrix::Zero(d, d);
  ops.number = CMatrix::Zero(d, d);
  for (int n = 1; n < d; ++n) ops.annihilation(n - 1, n) = std::sqrt(static_cast<double>(n));
  for (int n = 0; n < d; ++n) ops.number(n, n) = static_cast<double>(n);
  ops.creation = ops.annihilation.adjoint();
  return ops;
}

}  // namespace polariq
