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

#include <vector>

#include "polariq/fock.hpp"
#include "polariq/types.hpp"

namespace polariq {

// Amplitude-damping channel L_l = sqrt(kappa^l / l!) (1-kappa)^{n/2} a^l,
// l = 0..l_max. Every L_l maps |n> to a multiple of |n-l>; that multiple is
// kept in coefficient(l, n) for fast in-place application.
class KrausSet {
 public:
  KrausSet(double kappa, int l_max, FockCutoff cutoff);

  double kappa() const { return kappa_; }
  int l_max() const { return l_max_; }
  FockCutoff cutoff() const { return cutoff_; }
  const std::vector<CMatrix>& operators() const { return operators_; }
  double completeness_deficiency() const { return deficiency_; }
  double coefficient(int l, int n) const {
    return coefficients_[static_cast<std::size_t>(l) * static_cast<std::size_t>(cutoff_.local_dim()) +
                         static_cast<std::size_t>(n)];
  }
  // Probability mass sum_l coefficient(l, n)^2 that |n> keeps in the set.
  double retained(int n) const { return retained_[static_cast<std::size_t>(n)]; }
  bool is_identity() const { return kappa_ == 0.0; }

 private:
  double kappa_;
  int l_max_;
  FockCutoff cutoff_;
  std::vector<CMatrix> operators_;
  std::vector<double> coefficients_;
  std::vector<double> retained_;
  double deficiency_ = 0.0;
};

inline KrausSet kraus_amplitude_damping(double kappa, int l_max, FockCutoff cutoff) {
  return KrausSet(kappa, l_max, cutoff);
}

double db_to_eta(double db);
double db_to_kappa(double db);

// kappa = gamma * dt; throws ContractViolation when the product exceeds one.
double kappa_from_rate(double gamma_per_ps, double dt_ps);

// Applies the full channel sum_l L_l rho L_l^dagger on one mode of a density
// matrix over num_modes modes.
CMatrix apply_channel(const CMatrix& rho, int mode, int num_modes, const KrausSet& set);

}  // namespace polariq
