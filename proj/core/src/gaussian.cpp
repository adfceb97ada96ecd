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

#include "polariq/gaussian.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <Eigen/Eigenvalues>

namespace polariq {
namespace {

constexpr Complex kI{0.0, 1.0};

using Vec3 = Eigen::Vector3cd;

// Right-hand side for general complex alpha; d = [dn, dc, dc*] with the third
// component integrated independently.
Vec3 rhs(const Vec3& d, double u, Complex alpha) {
  const Complex a2 = alpha * alpha;
  const double n = std::norm(alpha);
  Vec3 out;
  out[0] = -kI * u * (a2 * d[2] - std::conj(a2) * d[1]);
  out[1] = -kI * (4.0 * u * n * d[1] + u * a2 * (2.0 * d[0] + 1.0));
  out[2] = kI * (4.0 * u * n * d[2] + u * std::conj(a2) * (2.0 * d[0] + 1.0));
  return out;
}

}  // namespace

BogoliubovMatrix bogoliubov_matrix() {
  BogoliubovMatrix m;
  m.generator << 0.0, kI, -kI,  //
      -2.0 * kI, -4.0 * kI, 0.0,  //
      2.0 * kI, 0.0, 4.0 * kI;
  m.drive << 0.0, -kI, kI;
  return m;
}

std::array<Complex, 3> bogoliubov_spectrum(const BogoliubovMatrix& m) {
  Eigen::ComplexEigenSolver<Eigen::Matrix3cd> solver(m.generator);
  std::array<Complex, 3> ev{solver.eigenvalues()[0], solver.eigenvalues()[1], solver.eigenvalues()[2]};
  std::sort(ev.begin(), ev.end(), [](Complex a, Complex b) { return a.imag() < b.imag(); });
  return ev;
}

CumulantState evolve_cumulants(double u, Complex alpha, double t, const CumulantMethod& method) {
  if (!(t >= 0.0)) throw std::invalid_argument("evolution time must be non-negative");
  CumulantState out;
  out.alpha = alpha;
  out.phi = -std::arg(alpha);
  if (std::holds_alternative<ClosedForm>(method)) {
    out.delta_c = -kI * u * alpha * alpha * t;
    const double s = u * std::norm(alpha) * t;
    out.delta_n = s * s;
    return out;
  }
  const double step = std::get<Rk4>(method).dt;
  if (!(step > 0.0)) throw std::invalid_argument("integration step must be positive");
  Vec3 d = Vec3::Zero();
  const auto steps = static_cast<long>(std::ceil(t / step - 1e-12));
  const double h = steps > 0 ? t / static_cast<double>(steps) : 0.0;
  for (long s = 0; s < steps; ++s) {
    const Vec3 k1 = rhs(d, u, alpha);
    const Vec3 k2 = rhs(d + 0.5 * h * k1, u, alpha);
    const Vec3 k3 = rhs(d + 0.5 * h * k2, u, alpha);
    const Vec3 k4 = rhs(d + h * k3, u, alpha);
    d += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  }
  out.delta_n = d[0].real();
  out.delta_c = d[1];
  return out;
}

double g2_gaussian(const CumulantState& s) {
  const double n = std::norm(s.alpha);
  if (!(n > 0.0)) throw std::domain_error("g2 of the Gaussian expansion needs a nonzero classical field");
  return 1.0 + (2.0 / n) * (s.delta_n + s.delta_c * std::polar(1.0, 2.0 * s.phi)).real();
}

double g2_gaussian_wick(const CumulantState& s) {
  const double n = std::norm(s.alpha);
  if (!(n > 0.0)) throw std::domain_error("g2 of the Gaussian expansion needs a nonzero classical field");
  const Complex c = s.delta_c * std::polar(1.0, 2.0 * s.phi) * n;  // alpha*^2 dc in the field frame
  const double mean = n + s.delta_n;
  const double pair = n * n + 4.0 * n * s.delta_n + 2.0 * c.real() + 2.0 * s.delta_n * s.delta_n + std::norm(s.delta_c);
  return pair / (mean * mean);
}

double g2_alpha_invariance_check(double u, double t, double phi, std::span<const double> alphas) {
  if (alphas.empty()) return 0.0;
  double lo = 0.0;
  double hi = 0.0;
  bool first = true;
  for (double a : alphas) {
    auto s = evolve_cumulants(u, Complex(a, 0.0), t, Rk4{t > 0.0 ? t / 1000.0 : 1.0});
    s.phi = phi;
    const double g = g2_gaussian(s);
    lo = first ? g : std::min(lo, g);
    hi = first ? g : std::max(hi, g);
    first = false;
  }
  return hi - lo;
}

}  // namespace polariq
