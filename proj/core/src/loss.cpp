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

#include "polariq/loss.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "polariq/gates.hpp"

namespace polariq {

KrausSet::KrausSet(double kappa, int l_max, FockCutoff cutoff) : kappa_(kappa), l_max_(l_max), cutoff_(cutoff) {
  if (!(kappa >= 0.0 && kappa <= 1.0)) {
    throw std::invalid_argument("loss probability kappa must lie in [0, 1], got " + std::to_string(kappa));
  }
  if (l_max < 1) throw std::invalid_argument("l_max must be at least 1");
  const int d = cutoff.local_dim();
  // More branches than photons would only add zero operators.
  l_max_ = std::min(l_max, cutoff.max_photons());
  if (kappa == 0.0) l_max_ = 0;

  coefficients_.assign(static_cast<std::size_t>(l_max_ + 1) * static_cast<std::size_t>(d), 0.0);
  retained_.assign(static_cast<std::size_t>(d), 0.0);
  for (int l = 0; l <= l_max_; ++l) {
    CMatrix op = CMatrix::Zero(d, d);
    for (int n = l; n < d; ++n) {
      // sqrt(C(n,l) kappa^l (1-kappa)^(n-l)) via lgamma keeps large n finite.
      const double log_binom = std::lgamma(n + 1.0) - std::lgamma(l + 1.0) - std::lgamma(n - l + 1.0);
      double c = std::exp(0.5 * log_binom);
      c *= std::pow(kappa, 0.5 * l) * std::pow(1.0 - kappa, 0.5 * (n - l));
      coefficients_[static_cast<std::size_t>(l) * static_cast<std::size_t>(d) + static_cast<std::size_t>(n)] = c;
      retained_[static_cast<std::size_t>(n)] += c * c;
      op(n - l, n) = c;
    }
    operators_.push_back(std::move(op));
  }
  CMatrix sum = CMatrix::Zero(d, d);
  for (const auto& op : operators_) sum += op.adjoint() * op;
  deficiency_ = (CMatrix::Identity(d, d) - sum).cwiseAbs().maxCoeff();
}

double db_to_eta(double db) {
  if (!(db >= 0.0)) throw std::invalid_argument("loss in dB must be non-negative");
  return std::pow(10.0, -db / 10.0);
}

double db_to_kappa(double db) { return 1.0 - db_to_eta(db); }

double kappa_from_rate(double gamma_per_ps, double dt_ps) {
  if (!(gamma_per_ps >= 0.0)) throw std::invalid_argument("loss rate must be non-negative");
  if (!(dt_ps > 0.0)) throw std::invalid_argument("layer time must be positive");
  const double kappa = gamma_per_ps * dt_ps;
  if (kappa > 1.0) {
    throw ContractViolation("loss probability gamma*dt = " + std::to_string(kappa) +
                            " exceeds 1; layer time too long for a single Markovian step");
  }
  return kappa;
}

CMatrix apply_channel(const CMatrix& rho, int mode, int num_modes, const KrausSet& set) {
  const int d = set.cutoff().local_dim();
  if (mode < 0 || mode >= num_modes) throw std::out_of_range("mode outside state");
  Eigen::Index left = 1;
  Eigen::Index right = 1;
  for (int l = 0; l < mode; ++l) left *= d;
  for (int l = mode + 1; l < num_modes; ++l) right *= d;
  if (rho.rows() != left * d * right) throw std::invalid_argument("density matrix dimension mismatch");
  // L_l sends |n> to coefficient(l, n) |n - l> on the target mode, so each
  // entry of rho moves diagonally by l * right in both indices.
  CMatrix out = CMatrix::Zero(rho.rows(), rho.cols());
  const Eigen::Index dim = rho.rows();
  for (Eigen::Index j = 0; j < dim; ++j) {
    const int nj = static_cast<int>((j / right) % d);
    for (Eigen::Index i = 0; i < dim; ++i) {
      const int ni = static_cast<int>((i / right) % d);
      const Complex x = rho(i, j);
      if (x == Complex(0.0, 0.0)) continue;
      const int top = std::min({set.l_max(), ni, nj});
      for (int l = 0; l <= top; ++l) {
        const double w = set.coefficient(l, ni) * set.coefficient(l, nj);
        out(i - l * right, j - l * right) += w * x;
      }
    }
  }
  return out;
}

}  // namespace polariq
