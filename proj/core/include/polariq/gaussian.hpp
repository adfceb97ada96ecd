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

#include <array>
#include <span>
#include <variant>

#include "polariq/types.hpp"

namespace polariq {

// Linearized fluctuations chi = a - alpha of one Kerr mode.
struct CumulantState {
  double delta_n = 0.0;   // <chi^dag chi>
  Complex delta_c{0.0};   // <chi chi>
  Complex alpha{0.0};     // classical field
  double phi = 0.0;       // phase between the classical field and the fluctuations
};

// d/dt [dn, dc, dc*] = U alpha^2 (L d + b) for real alpha.
struct BogoliubovMatrix {
  Eigen::Matrix3cd generator;
  Eigen::Vector3cd drive;
};

BogoliubovMatrix bogoliubov_matrix();
std::array<Complex, 3> bogoliubov_spectrum(const BogoliubovMatrix& m);

struct ClosedForm {};
struct Rk4 {
  double dt = 1e-3;
};
using CumulantMethod = std::variant<ClosedForm, Rk4>;

// Starts from a coherent state (no fluctuations). The returned phi is
// -arg(alpha), the value that refers the fluctuations to the field's frame.
CumulantState evolve_cumulants(double u, Complex alpha, double t, const CumulantMethod& method);

double g2_gaussian(const CumulantState& state);

// g2 without expanding in the fluctuations: <:n^2:> / n^2 from Gaussian
// moments, keeping the quadratic terms the linearized form drops.
double g2_gaussian_wick(const CumulantState& state);

double g2_alpha_invariance_check(double u, double t, double phi, std::span<const double> alphas);

}  // namespace polariq
