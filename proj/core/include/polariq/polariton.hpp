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

#include <istream>
#include <string>
#include <variant>
#include <vector>

#include "polariq/types.hpp"

namespace polariq {

// Reduced Planck constant in meV ps.
inline constexpr double kHbarMeVps = 0.6582119569;

// Lower polariton from a linear bare photon E_c(k) = E_0 + s_ph k coupled to a
// flat exciton line at E_x with Rabi splitting hbar*Omega. Energies in meV,
// wavenumbers in 1/um.
struct CoupledOscillator {
  double exciton_energy_mev = 0.0;
  double photon_slope_mev_um = 0.0;
  double photon_offset_mev = 0.0;
  double rabi_mev = 6.0;

  double photon_energy(double k) const { return photon_offset_mev + photon_slope_mev_um * k; }
};

// Sampled lower-polariton branch, interpolated with a monotone cubic
// (Fritsch-Carlson) Hermite spline. The exciton line and Rabi splitting are
// needed for Hopfield fractions.
class TabulatedDispersion {
 public:
  TabulatedDispersion(std::vector<double> k, std::vector<double> energy_mev, double exciton_energy_mev,
                      double rabi_mev);

  double energy(double k) const;
  double slope(double k) const;  // dE/dk in meV um

  const std::vector<double>& k() const { return k_; }
  const std::vector<double>& energy_samples() const { return e_; }
  double exciton_energy_mev() const { return exciton_; }
  double rabi_mev() const { return rabi_; }

 private:
  std::size_t segment(double k) const;

  std::vector<double> k_;
  std::vector<double> e_;
  std::vector<double> m_;
  double exciton_;
  double rabi_;
};

using DispersionModel = std::variant<CoupledOscillator, TabulatedDispersion>;

double lp_energy(double k, const DispersionModel& model);
double exciton_fraction(double k, const DispersionModel& model);
double photon_fraction(double k, const DispersionModel& model);
double group_velocity(double k, const DispersionModel& model, double hbar_mev_ps = kHbarMeVps);

// Bare-photon velocity: s_ph / hbar for the oscillator model, the velocity at
// the smallest sampled k for a table.
double photonic_velocity(const DispersionModel& model, double hbar_mev_ps = kHbarMeVps);

struct DispersionAnchors {
  double rabi_mev = 6.0;
  double exciton_energy_mev = 0.0;
  double k_anchor = 0.23;
  double exciton_fraction = 0.3;
  double group_velocity = 40.0;  // um/ps
  double hbar_mev_ps = kHbarMeVps;
};

struct Calibration {
  CoupledOscillator model;
  double residual_fraction = 0.0;
  double residual_velocity = 0.0;
};

Calibration calibrate_dispersion(const DispersionAnchors& anchors);

struct PolaritonParams {
  DispersionModel dispersion = CoupledOscillator{};
  double g_exc = 0.0;         // ueV um^2
  double sigma_t_ps = 1.0;
  double a_perp_um = 0.0;     // transverse overlap length, 1 / int F^2 dy
  double hbar_mev_ps = kHbarMeVps;
};

// U in 1/ps for given exciton fraction and group velocity.
double nonlinear_rate_at(double exciton_fraction, double group_velocity, const PolaritonParams& params);
double nonlinear_rate(double k, const PolaritonParams& params);

// Transverse length that makes U dt = u_dt_target for the supplied reference
// operating point.
struct ReferencePoint {
  double g_exc = 50.0;
  double exciton_fraction = 0.3;
  double group_velocity = 40.0;
  double sigma_t_ps = 1.0;
  double dx_um = 1000.0;
  double u_dt = 0.005;
  double hbar_mev_ps = kHbarMeVps;
};
double calibrate_a_perp(const ReferencePoint& ref = {});

enum class CouplingDesign { PhotonicCalibrated, Fixed };

struct GateBudget {
  double dt_ps = 0.0;
  double j_dt = 0.0;
  double u_dt = 0.0;
  double sigma_z_um = 0.0;
  double group_velocity = 0.0;
  double exciton_fraction = 0.0;
};

GateBudget gate_budget(double k, double dx_um, CouplingDesign design, const PolaritonParams& params,
                       double j_design = kPi / 6.0);

// Slow-light form: the velocity is an input, the exciton fraction is held
// fixed, and the coupling is the fixed design value.
GateBudget gate_budget_at_velocity(double exciton_fraction, double group_velocity, double dx_um,
                                   const PolaritonParams& params, double j_design = kPi / 6.0);

// Reads "k_invmicron,E_meV" rows. Rejects non-finite values and k that is not
// strictly increasing.
TabulatedDispersion read_dispersion_csv(std::istream& in, double exciton_energy_mev, double rabi_mev);
TabulatedDispersion read_dispersion_csv(const std::string& path, double exciton_energy_mev, double rabi_mev);

}  // namespace polariq
