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

#include "polariq/polariton.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace polariq {
namespace {

template <class... Fs>
struct Overloaded : Fs... {
  using Fs::operator()...;
};
template <class... Fs>
Overloaded(Fs...) -> Overloaded<Fs...>;

double parse_number(std::string_view text, std::size_t line) {
  while (!text.empty() && (text.front() == ' ' || text.front() == '\t')) text.remove_prefix(1);
  while (!text.empty() && (text.back() == ' ' || text.back() == '\t' || text.back() == '\r')) text.remove_suffix(1);
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size() || !std::isfinite(value)) {
    throw ConfigError("dispersion table line " + std::to_string(line) + ": bad number '" + std::string(text) + "'");
  }
  return value;
}

}  // namespace

TabulatedDispersion::TabulatedDispersion(std::vector<double> k, std::vector<double> energy_mev,
                                         double exciton_energy_mev, double rabi_mev)
    : k_(std::move(k)), e_(std::move(energy_mev)), exciton_(exciton_energy_mev), rabi_(rabi_mev) {
  if (k_.size() != e_.size() || k_.size() < 2) {
    throw std::invalid_argument("dispersion table needs at least two (k, E) samples");
  }
  if (!(rabi_ > 0.0)) throw std::invalid_argument("Rabi splitting must be positive");
  for (std::size_t i = 0; i < k_.size(); ++i) {
    if (!std::isfinite(k_[i]) || !std::isfinite(e_[i])) throw std::invalid_argument("dispersion table has non-finite entries");
    if (i > 0 && !(k_[i] > k_[i - 1])) throw std::invalid_argument("dispersion table k must be strictly increasing");
    if (!(e_[i] < exciton_)) throw std::invalid_argument("lower polariton must lie below the exciton line");
  }
  const std::size_t n = k_.size();
  std::vector<double> delta(n - 1);
  for (std::size_t i = 0; i + 1 < n; ++i) delta[i] = (e_[i + 1] - e_[i]) / (k_[i + 1] - k_[i]);
  m_.assign(n, 0.0);
  m_[0] = delta[0];
  m_[n - 1] = delta[n - 2];
  for (std::size_t i = 1; i + 1 < n; ++i) {
    if (delta[i - 1] * delta[i] <= 0.0) continue;
    // Weighted harmonic mean (Fritsch-Butland form of the Fritsch-Carlson limiter).
    const double h0 = k_[i] - k_[i - 1];
    const double h1 = k_[i + 1] - k_[i];
    const double w0 = 2.0 * h1 + h0;
    const double w1 = h1 + 2.0 * h0;
    m_[i] = (w0 + w1) / (w0 / delta[i - 1] + w1 / delta[i]);
  }
}

std::size_t TabulatedDispersion::segment(double k) const {
  if (!(k >= k_.front() && k <= k_.back())) {
    throw std::out_of_range("k = " + std::to_string(k) + " outside tabulated dispersion range");
  }
  const auto it = std::upper_bound(k_.begin(), k_.end(), k);
  const auto i = static_cast<std::size_t>(std::distance(k_.begin(), it));
  return std::min(i == 0 ? 0 : i - 1, k_.size() - 2);
}

double TabulatedDispersion::energy(double k) const {
  const std::size_t i = segment(k);
  const double h = k_[i + 1] - k_[i];
  const double t = (k - k_[i]) / h;
  const double t2 = t * t;
  const double t3 = t2 * t;
  return (2 * t3 - 3 * t2 + 1) * e_[i] + (t3 - 2 * t2 + t) * h * m_[i] + (-2 * t3 + 3 * t2) * e_[i + 1] +
         (t3 - t2) * h * m_[i + 1];
}

double TabulatedDispersion::slope(double k) const {
  const std::size_t i = segment(k);
  const double h = k_[i + 1] - k_[i];
  const double t = (k - k_[i]) / h;
  const double t2 = t * t;
  return ((6 * t2 - 6 * t) * e_[i] + (-6 * t2 + 6 * t) * e_[i + 1]) / h + (3 * t2 - 4 * t + 1) * m_[i] +
         (3 * t2 - 2 * t) * m_[i + 1];
}

double lp_energy(double k, const DispersionModel& model) {
  return std::visit(Overloaded{[k](const CoupledOscillator& m) {
                                 const double ec = m.photon_energy(k);
                                 const double det = ec - m.exciton_energy_mev;
                                 return 0.5 * (ec + m.exciton_energy_mev) - 0.5 * std::hypot(det, m.rabi_mev);
                               },
                               [k](const TabulatedDispersion& t) { return t.energy(k); }},
                    model);
}

double exciton_fraction(double k, const DispersionModel& model) {
  return std::visit(Overloaded{[k](const CoupledOscillator& m) {
                                 const double det = m.photon_energy(k) - m.exciton_energy_mev;
                                 return 0.5 * (1.0 + det / std::hypot(det, m.rabi_mev));
                               },
                               [k](const TabulatedDispersion& t) {
                                 const double half = 0.5 * t.rabi_mev();
                                 const double gap = t.exciton_energy_mev() - t.energy(k);
                                 return half * half / (half * half + gap * gap);
                               }},
                    model);
}

double photon_fraction(double k, const DispersionModel& model) { return 1.0 - exciton_fraction(k, model); }

double group_velocity(double k, const DispersionModel& model, double hbar_mev_ps) {
  return std::visit(Overloaded{[&](const CoupledOscillator& m) {
                                 return m.photon_slope_mev_um * (1.0 - exciton_fraction(k, model)) / hbar_mev_ps;
                               },
                               [&](const TabulatedDispersion& t) { return t.slope(k) / hbar_mev_ps; }},
                    model);
}

double photonic_velocity(const DispersionModel& model, double hbar_mev_ps) {
  return std::visit(Overloaded{[&](const CoupledOscillator& m) { return m.photon_slope_mev_um / hbar_mev_ps; },
                               [&](const TabulatedDispersion& t) { return t.slope(t.k().front()) / hbar_mev_ps; }},
                    model);
}

Calibration calibrate_dispersion(const DispersionAnchors& a) {
  if (!(a.rabi_mev > 0.0)) throw std::invalid_argument("Rabi splitting must be positive");
  if (!(a.exciton_fraction > 0.0 && a.exciton_fraction < 1.0)) {
    throw std::invalid_argument("anchor exciton fraction must lie strictly between 0 and 1");
  }
  if (!(a.group_velocity > 0.0)) throw std::invalid_argument("anchor group velocity must be positive");
  // u^2 = (1 + x)/2 with x = det / sqrt(det^2 + Omega^2), and v_g = s_ph (1 - u^2) / hbar.
  const double x = 2.0 * a.exciton_fraction - 1.0;
  const double det = x * a.rabi_mev / std::sqrt(1.0 - x * x);
  CoupledOscillator m;
  m.rabi_mev = a.rabi_mev;
  m.exciton_energy_mev = a.exciton_energy_mev;
  m.photon_slope_mev_um = a.group_velocity * a.hbar_mev_ps / (1.0 - a.exciton_fraction);
  m.photon_offset_mev = a.exciton_energy_mev + det - m.photon_slope_mev_um * a.k_anchor;
  Calibration out{m};
  const DispersionModel model = m;
  out.residual_fraction = exciton_fraction(a.k_anchor, model) - a.exciton_fraction;
  out.residual_velocity = group_velocity(a.k_anchor, model, a.hbar_mev_ps) - a.group_velocity;
  return out;
}

double nonlinear_rate_at(double u2, double vg, const PolaritonParams& p) {
  if (!(vg > 0.0)) throw std::domain_error("group velocity must be positive for a nonlinear rate");
  if (!(p.sigma_t_ps > 0.0) || !(p.a_perp_um > 0.0)) {
    throw std::invalid_argument("pulse duration and transverse length must be positive");
  }
  const double sigma_z = vg * p.sigma_t_ps;
  const double overlap = 1.0 / (2.0 * std::sqrt(kPi) * sigma_z * p.a_perp_um);  // int n^2, 1/um^2
  const double g_over_hbar = p.g_exc / (1000.0 * p.hbar_mev_ps);                 // um^2 / ps
  return u2 * u2 * g_over_hbar * overlap;
}

double nonlinear_rate(double k, const PolaritonParams& p) {
  return nonlinear_rate_at(exciton_fraction(k, p.dispersion), group_velocity(k, p.dispersion, p.hbar_mev_ps), p);
}

double calibrate_a_perp(const ReferencePoint& r) {
  PolaritonParams unit;
  unit.g_exc = r.g_exc;
  unit.sigma_t_ps = r.sigma_t_ps;
  unit.a_perp_um = 1.0;
  unit.hbar_mev_ps = r.hbar_mev_ps;
  const double dt = r.dx_um / r.group_velocity;
  return nonlinear_rate_at(r.exciton_fraction, r.group_velocity, unit) * dt / r.u_dt;
}

GateBudget gate_budget(double k, double dx_um, CouplingDesign design, const PolaritonParams& p, double j_design) {
  if (!(dx_um > 0.0)) throw std::invalid_argument("layer length must be positive");
  GateBudget b;
  b.group_velocity = group_velocity(k, p.dispersion, p.hbar_mev_ps);
  b.exciton_fraction = exciton_fraction(k, p.dispersion);
  if (!(b.group_velocity > 0.0)) throw std::domain_error("group velocity must be positive");
  b.dt_ps = dx_um / b.group_velocity;
  b.sigma_z_um = b.group_velocity * p.sigma_t_ps;
  b.u_dt = nonlinear_rate_at(b.exciton_fraction, b.group_velocity, p) * b.dt_ps;
  b.j_dt = design == CouplingDesign::Fixed ? j_design
                                           : j_design * photonic_velocity(p.dispersion, p.hbar_mev_ps) / b.group_velocity;
  return b;
}

GateBudget gate_budget_at_velocity(double u2, double vg, double dx_um, const PolaritonParams& p, double j_design) {
  if (!(dx_um > 0.0)) throw std::invalid_argument("layer length must be positive");
  GateBudget b;
  b.group_velocity = vg;
  b.exciton_fraction = u2;
  b.dt_ps = dx_um / vg;
  b.sigma_z_um = vg * p.sigma_t_ps;
  b.u_dt = nonlinear_rate_at(u2, vg, p) * b.dt_ps;
  b.j_dt = j_design;
  return b;
}

TabulatedDispersion read_dispersion_csv(std::istream& in, double exciton_energy_mev, double rabi_mev) {
  std::string line;
  if (!std::getline(in, line)) throw ConfigError("dispersion table is empty");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != "k_invmicron,E_meV") throw ConfigError("dispersion table header must be 'k_invmicron,E_meV'");
  std::vector<double> k;
  std::vector<double> e;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line == "\r") continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos || line.find(',', comma + 1) != std::string::npos) {
      throw ConfigError("dispersion table line " + std::to_string(lineno) + ": expected two columns");
    }
    const std::string_view view(line);
    k.push_back(parse_number(view.substr(0, comma), lineno));
    e.push_back(parse_number(view.substr(comma + 1), lineno));
    if (k.size() > 1 && !(k.back() > k[k.size() - 2])) {
      throw ConfigError("dispersion table line " + std::to_string(lineno) + ": k not strictly increasing");
    }
  }
  try {
    return TabulatedDispersion(std::move(k), std::move(e), exciton_energy_mev, rabi_mev);
  } catch (const std::invalid_argument& err) {
    throw ConfigError(std::string("dispersion table: ") + err.what());
  }
}

TabulatedDispersion read_dispersion_csv(const std::string& path, double exciton_energy_mev, double rabi_mev) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open dispersion table " + path);
  return read_dispersion_csv(in, exciton_energy_mev, rabi_mev);
}

}  // namespace polariq
