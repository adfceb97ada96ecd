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

#include <cmath>
#include <sstream>

#include <gtest/gtest.h>

#include "polariq/polariton.hpp"

namespace polariq {
namespace {

CoupledOscillator calibrated() { return calibrate_dispersion(DispersionAnchors{}).model; }

TEST(CoupledOscillator, ZeroDetuningAnticrossing) {
  CoupledOscillator m;
  m.exciton_energy_mev = 1500.0;
  m.photon_slope_mev_um = 20.0;
  m.photon_offset_mev = 1500.0 - 20.0 * 0.4;  // resonance at k = 0.4
  m.rabi_mev = 6.0;
  EXPECT_NEAR(lp_energy(0.4, m), 1500.0 - 3.0, 1e-12);
  EXPECT_NEAR(exciton_fraction(0.4, m), 0.5, 1e-15);
}

TEST(CoupledOscillator, PhotonicLimit) {
  const auto m = calibrated();
  const double k = -400.0;  // far red-detuned photon
  EXPECT_NEAR(lp_energy(k, m), m.photon_energy(k), 1e-3);
  EXPECT_LT(exciton_fraction(k, m), 1e-6);
  EXPECT_NEAR(group_velocity(k, m), photonic_velocity(m), 1e-4);
}

TEST(CoupledOscillator, HopfieldFractionsSumToOne) {
  const auto m = calibrated();
  for (double k = 0.0; k <= 0.6; k += 0.05) EXPECT_NEAR(exciton_fraction(k, m) + photon_fraction(k, m), 1.0, 1e-15);
}

TEST(CoupledOscillator, GroupVelocityIsEnergySlope) {
  const auto m = calibrated();
  for (double k : {0.05, 0.15, 0.23, 0.35}) {
    const double h = 1e-5;
    const double numeric = (lp_energy(k + h, m) - lp_energy(k - h, m)) / (2.0 * h) / kHbarMeVps;
    EXPECT_NEAR(group_velocity(k, m), numeric, 1e-6 * numeric) << k;
  }
}

TEST(CoupledOscillator, VelocityDecreasesTowardExciton) {
  const auto m = calibrated();
  double prev = group_velocity(0.0, m);
  for (double k = 0.01; k <= 0.6; k += 0.01) {
    const double v = group_velocity(k, m);
    EXPECT_LT(v, prev) << k;
    prev = v;
  }
}

TEST(Calibration, ReproducesAnchors) {
  const auto cal = calibrate_dispersion(DispersionAnchors{});
  EXPECT_NEAR(exciton_fraction(0.23, cal.model), 0.30, 0.01);
  EXPECT_NEAR(group_velocity(0.23, cal.model), 40.0, 2.0);
  EXPECT_LT(std::abs(cal.residual_fraction), 1e-12);
  EXPECT_LT(std::abs(cal.residual_velocity), 1e-10);
}

TEST(Calibration, RoundTripThroughSyntheticAnchors) {
  CoupledOscillator truth;
  truth.exciton_energy_mev = 1480.0;
  truth.rabi_mev = 4.5;
  truth.photon_slope_mev_um = 37.0;
  truth.photon_offset_mev = 1472.0;
  DispersionAnchors a;
  a.rabi_mev = truth.rabi_mev;
  a.exciton_energy_mev = truth.exciton_energy_mev;
  a.k_anchor = 0.19;
  a.exciton_fraction = exciton_fraction(a.k_anchor, truth);
  a.group_velocity = group_velocity(a.k_anchor, truth);
  const auto back = calibrate_dispersion(a).model;
  EXPECT_NEAR(back.photon_slope_mev_um, truth.photon_slope_mev_um, 1e-6);
  EXPECT_NEAR(back.photon_offset_mev, truth.photon_offset_mev, 1e-6);
}

TEST(Calibration, RabiSensitivity) {
  DispersionAnchors a;
  const auto base = calibrate_dispersion(a).model;
  a.rabi_mev *= 2.0;
  const auto wide = calibrate_dispersion(a).model;
  EXPECT_TRUE(std::isfinite(wide.photon_slope_mev_um));
  EXPECT_NE(wide.photon_offset_mev, base.photon_offset_mev);
  a.exciton_fraction = 1.0;
  EXPECT_THROW(calibrate_dispersion(a), std::invalid_argument);
}

TEST(NonlinearRate, ZeroInteraction) {
  PolaritonParams p;
  p.dispersion = calibrated();
  p.a_perp_um = 1.0;
  p.g_exc = 0.0;
  EXPECT_EQ(nonlinear_rate(0.23, p), 0.0);
}

TEST(NonlinearRate, ReferenceTransverseLength) {
  // Inversion of U dt = u^4 (g/hbar) dt / (2 sqrt(pi) sigma_z a_perp).
  const double u4 = 0.3 * 0.3;
  const double g_over_hbar = 50.0 / (1000.0 * kHbarMeVps);
  const double dt = 1000.0 / 40.0;
  const double sigma_z = 40.0 * 1.0;
  const double expected = u4 * g_over_hbar * dt / (2.0 * std::sqrt(kPi) * sigma_z * 0.005);
  EXPECT_NEAR(calibrate_a_perp(), expected, 1e-15);
  EXPECT_NEAR(calibrate_a_perp(), 0.2411, 1e-4);
}

TEST(NonlinearRate, LinearInInteraction) {
  PolaritonParams p;
  p.a_perp_um = calibrate_a_perp();
  const double dt = 1000.0 / 40.0;
  p.g_exc = 50.0;
  EXPECT_NEAR(nonlinear_rate_at(0.3, 40.0, p) * dt, 0.005, 1e-15);
  p.g_exc = 10.0;
  EXPECT_NEAR(nonlinear_rate_at(0.3, 40.0, p) * dt, 0.001, 1e-15);
}

TEST(GateBudget, SlowLightScaling) {
  PolaritonParams p;
  p.g_exc = 700.0;
  p.a_perp_um = calibrate_a_perp();
  EXPECT_DOUBLE_EQ(gate_budget_at_velocity(0.3, 25.0, 200.0, p).dt_ps, 8.0);
  const double slow = gate_budget_at_velocity(0.3, 10.0, 200.0, p).u_dt;
  const double fast = gate_budget_at_velocity(0.3, 20.0, 200.0, p).u_dt;
  EXPECT_NEAR(slow / fast, 4.0, 1e-12);
  const double ref = slow * 100.0;
  for (double v = 10.0; v <= 25.0; v += 0.75) {
    const auto b = gate_budget_at_velocity(0.3, v, 200.0, p);
    EXPECT_NEAR(b.u_dt * v * v / ref, 1.0, 1e-12) << v;
    EXPECT_EQ(b.j_dt, kPi / 6.0);
  }
}

TEST(GateBudget, PhotonicCalibratedCoupling) {
  PolaritonParams p;
  p.dispersion = calibrated();
  p.g_exc = 50.0;
  p.a_perp_um = calibrate_a_perp();
  const auto b = gate_budget(0.23, 200.0, CouplingDesign::PhotonicCalibrated, p);
  EXPECT_NEAR(b.j_dt, kPi / 6.0 * photonic_velocity(p.dispersion) / b.group_velocity, 1e-15);
  EXPECT_GT(b.j_dt, kPi / 6.0);
  EXPECT_NEAR(b.dt_ps, 200.0 / b.group_velocity, 1e-15);
  const auto f = gate_budget(0.23, 200.0, CouplingDesign::Fixed, p);
  EXPECT_EQ(f.j_dt, kPi / 6.0);
}

TabulatedDispersion tabulate(const CoupledOscillator& m, double k0, double k1, int n) {
  std::vector<double> k(static_cast<std::size_t>(n));
  std::vector<double> e(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    k[static_cast<std::size_t>(i)] = k0 + (k1 - k0) * i / (n - 1);
    e[static_cast<std::size_t>(i)] = lp_energy(k[static_cast<std::size_t>(i)], m);
  }
  return TabulatedDispersion(k, e, m.exciton_energy_mev, m.rabi_mev);
}

TEST(TabulatedDispersion, InterpolatesNodesAndModel) {
  const auto m = calibrated();
  const auto t = tabulate(m, 0.0, 0.5, 81);
  for (std::size_t i = 0; i < t.k().size(); ++i) EXPECT_EQ(t.energy(t.k()[i]), t.energy_samples()[i]);
  const DispersionModel tm = t;
  for (double k = 0.01; k < 0.49; k += 0.013) {
    EXPECT_NEAR(lp_energy(k, tm), lp_energy(k, m), 1e-4);
    EXPECT_NEAR(exciton_fraction(k, tm), exciton_fraction(k, m), 1e-4);
    EXPECT_NEAR(group_velocity(k, tm), group_velocity(k, m), 0.05 * group_velocity(k, m));
  }
  EXPECT_THROW((void)t.energy(0.6), std::out_of_range);
  EXPECT_THROW((void)t.energy(-0.1), std::out_of_range);
}

TEST(TabulatedDispersion, MonotoneDataGivesMonotoneCurve) {
  // Steps with flat stretches, where an unconstrained cubic would overshoot.
  const std::vector<double> k{0.0, 0.1, 0.2, 0.3, 0.4, 0.5};
  const std::vector<double> e{-10.0, -9.9, -5.0, -4.95, -4.9, -1.0};
  const TabulatedDispersion t(k, e, 0.0, 6.0);
  double prev = t.energy(0.0);
  for (double x = 0.001; x <= 0.5; x += 0.001) {
    const double v = t.energy(x);
    EXPECT_GE(v, prev - 1e-12) << x;
    EXPECT_GE(t.slope(x), -1e-12) << x;
    prev = v;
  }
}

TEST(DispersionCsv, ParsesAndRejects) {
  std::istringstream good("k_invmicron,E_meV\n0.0,-5.0\n0.1,-4.0\n0.2,-3.5\n");
  const auto t = read_dispersion_csv(good, 0.0, 6.0);
  EXPECT_EQ(t.k().size(), 3u);
  EXPECT_EQ(t.energy(0.1), -4.0);

  const std::vector<std::string> bad{
      "",
      "k,E\n0,1\n",
      "k_invmicron,E_meV\n0.0,-5.0\n0.0,-4.0\n",
      "k_invmicron,E_meV\n0.0,-5.0\n0.1,abc\n",
      "k_invmicron,E_meV\n0.0,-5.0\n0.1,nan\n",
      "k_invmicron,E_meV\n0.0,-5.0\n0.1,1.0\n",
      "k_invmicron,E_meV\n0.0,-5.0,3\n0.1,-4.0\n",
      "k_invmicron,E_meV\n0.0,-5.0\n",
  };
  for (const auto& text : bad) {
    std::istringstream in(text);
    EXPECT_THROW(read_dispersion_csv(in, 0.0, 6.0), ConfigError) << text;
  }
  EXPECT_THROW(read_dispersion_csv(std::string("/nonexistent/table.csv"), 0.0, 6.0), ConfigError);
}

}  // namespace
}  // namespace polariq
