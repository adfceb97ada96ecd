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

#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "polariq/types.hpp"

namespace polariq {

class FockCutoff {
 public:
  explicit FockCutoff(int max_photons);

  int max_photons() const { return max_photons_; }
  int local_dim() const { return max_photons_ + 1; }

  friend bool operator==(FockCutoff a, FockCutoff b) = default;

 private:
  int max_photons_;
};

// Row-major map between occupation tuples (n_0, ..., n_{L-1}) and flat
// amplitude indices. Mode 0 varies slowest.
class FockIndexer {
 public:
  FockIndexer(int num_modes, FockCutoff cutoff);

  int num_modes() const { return num_modes_; }
  FockCutoff cutoff() const { return cutoff_; }
  std::size_t dimension() const { return dimension_; }
  std::size_t stride(int mode) const { return strides_[static_cast<std::size_t>(mode)]; }

  std::size_t index(std::span<const int> occupations) const;
  std::vector<int> occupations(std::size_t index) const;
  int occupation(std::size_t index, int mode) const;

 private:
  int num_modes_;
  FockCutoff cutoff_;
  std::size_t dimension_;
  std::vector<std::size_t> strides_;
};

struct SingleModeCoherent {
  CVector amplitudes;
  double leakage = 0.0;
};

SingleModeCoherent coherent_state(Complex alpha, FockCutoff cutoff);

struct CoherentInput {
  std::vector<Complex> alphas;
};

// True when some |alpha_l|^2 exceeds N/2, where truncation starts to distort
// the coherent statistics noticeably.
bool exceeds_truncation_guard(const CoherentInput& input, FockCutoff cutoff);

class MultiModeState {
 public:
  MultiModeState(int num_modes, FockCutoff cutoff);  // global vacuum
  MultiModeState(int num_modes, FockCutoff cutoff, CVector amplitudes, double leakage = 0.0);

  int num_modes() const { return indexer_.num_modes(); }
  FockCutoff cutoff() const { return indexer_.cutoff(); }
  const FockIndexer& indexer() const { return indexer_; }
  std::size_t dimension() const { return indexer_.dimension(); }

  CVector& amplitudes() { return amplitudes_; }
  const CVector& amplitudes() const { return amplitudes_; }

  Complex amplitude(std::span<const int> occupations) const;

  double norm_leakage() const { return norm_leakage_; }
  void set_norm_leakage(double leakage) { norm_leakage_ = leakage; }

  double norm_squared() const;
  // Rescales to unit norm and returns the squared norm before rescaling.
  double normalize();

 private:
  FockIndexer indexer_;
  CVector amplitudes_;
  double norm_leakage_ = 0.0;
};

MultiModeState product_state(const CoherentInput& input, FockCutoff cutoff);
MultiModeState fock_state(std::span<const int> occupations, FockCutoff cutoff);

struct DensityMatrix {
  int num_modes = 0;
  FockCutoff cutoff{1};
  CMatrix rho;

  static DensityMatrix from_pure(const MultiModeState& state);
};

struct LadderOperators {
  CMatrix annihilation;
  CMatrix creation;
  CMatrix number;
};

LadderOperators ladder_matrices(FockCutoff cutoff);

}  // namespace polariq
