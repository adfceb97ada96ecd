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

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "polariq/circuit.hpp"
#include "polariq/engine.hpp"
#include "polariq/observables.hpp"
#include "polariq/polariton.hpp"

namespace polariq {

enum class ScenarioKind {
  MziFreeSpace,
  MziThetaPhiMap,
  MziLossy,
  MziIntegrated,
  QpicKscan,
  QpicSlowlight,
  QpicPhaseSweep,
};

std::string to_string(ScenarioKind kind);
ScenarioKind parse_scenario_kind(const std::string& name);

struct SweepAxis {
  std::string variable;
  double min = 0.0;
  double max = 0.0;
  int points = 1;
  std::vector<double> values_override;  // used instead of the grid when non-empty

  std::vector<double> values() const;
};

enum class EngineChoice { Auto, Pure, Density, BranchEnum, Sampling };

std::string to_string(EngineChoice choice);

struct EngineSpec {
  int cutoff = 10;
  EngineChoice mode = EngineChoice::Auto;
  std::size_t trajectories = 10000;
  double branch_threshold = 1e-9;
  std::uint64_t seed = 2026;
  unsigned threads = 0;
  DeficiencyPolicy deficiency = DeficiencyPolicy::FoldIntoNoLoss;
  bool jackknife = false;
  double intensity_floor = kDefaultIntensityFloor;
};

struct CircuitSpec {
  // Free-space and integrated MZI.
  double theta_in = kPi / 4.0;
  double theta_out = 0.2 * kPi;
  double alpha_in = 1.0;
  double phi_lo = 0.0;  // used when phi_lo is not the swept variable
  // Integrated MZI: the second input is alpha_in * exp(i (phi_lo + lo_offset)).
  double lo_offset = -kPi / 2.0;
  int integrated_layers = 1;
  // qPIC.
  int modes = 6;
  int depth = 5;
  double dx_um = 200.0;
  std::vector<double> phi_rel{0.6 * kPi};
  Pairing pairing = Pairing::Brickwork;
  std::vector<PairList> custom_pairs;
  CouplingDesign coupling = CouplingDesign::PhotonicCalibrated;
  double j_design = kPi / 6.0;
  std::optional<double> j_dt;  // overrides the derived or design coupling
};

struct PhysicsSpec {
  std::vector<double> u_dt;   // direct gate nonlinearities; take precedence over g_exc
  std::vector<double> g_exc;  // ueV um^2
  DispersionAnchors anchors;
  std::string dispersion_csv;
  double sigma_t_ps = 1.0;
  double a_perp_um = 0.0;  // 0 selects the reference calibration
  double exciton_fraction = 0.3;
  // Reference exposure used to turn g_exc into u_dt for the MZI scenarios.
  double mzi_length_um = 1000.0;
  double mzi_group_velocity = 40.0;
};

struct LossSpec {
  std::vector<double> db;      // MZI coupling loss, total per run
  std::vector<double> gamma;   // qPIC loss rate in 1/ps, one table per value
  int l_max = 0;               // 0 picks the scenario default
};

struct OutputSpec {
  std::string dir = "out";
  bool emit_plot_script = false;
};

struct ConvergenceSpec {
  bool enabled = false;
  double tolerance = 1e-3;
};

struct ScenarioConfig {
  ScenarioKind kind = ScenarioKind::MziFreeSpace;
  SweepAxis sweep;
  std::optional<SweepAxis> sweep2;
  CircuitSpec circuit;
  PhysicsSpec physics;
  LossSpec loss;
  EngineSpec engine;
  OutputSpec output;
  ConvergenceSpec convergence;
};

// Parameter sets of each experiment family.
ScenarioConfig default_config(ScenarioKind kind);

// Throws ConfigError on inconsistent settings.
void validate(const ScenarioConfig& config);

struct ResultRow {
  std::vector<double> coords;
  std::vector<double> extras;
  ObservableReport report;
  std::string engine;
  std::string status = "ok";
  double wall_seconds = 0.0;
};

struct ResultTable {
  std::string name;
  nlohmann::json series;
  std::vector<std::string> coord_names;
  std::vector<std::string> extra_names;
  int num_modes = 0;
  std::vector<ResultRow> rows;
  nlohmann::json layout;  // description of the first point's circuit
};

struct ScenarioResult {
  ScenarioKind kind = ScenarioKind::MziFreeSpace;
  std::vector<ResultTable> tables;
  std::vector<std::string> warnings;
  double wall_seconds = 0.0;
  bool contract_violation = false;
};

ScenarioResult run_mzi_free_space(const ScenarioConfig& config);
ScenarioResult run_mzi_lossy(const ScenarioConfig& config);
ScenarioResult run_mzi_theta_phi_map(const ScenarioConfig& config);
ScenarioResult run_mzi_integrated(const ScenarioConfig& config);
ScenarioResult run_qpic_kscan(const ScenarioConfig& config);
ScenarioResult run_qpic_slowlight(const ScenarioConfig& config);
ScenarioResult run_qpic_phase_sweep(const ScenarioConfig& config);
ScenarioResult run_scenario(const ScenarioConfig& config);

struct ConvergenceReport {
  int cutoff_high = 0;
  int cutoff_low = 0;
  double max_delta_n = 0.0;
  double max_delta_g2 = 0.0;
  double tolerance = 1e-3;
  bool passed = true;
};

// Reruns the scenario at cutoffs N and N-2 and compares every table entry
// present in both runs.
ConvergenceReport convergence_check(const ScenarioConfig& config, double tolerance = 1e-3);
ConvergenceReport compare_results(const ScenarioResult& high, const ScenarioResult& low, double tolerance);

// Polariton parameters shared by the qPIC scenarios for one g_exc value.
PolaritonParams polariton_params(const ScenarioConfig& config, double g_exc);

// u_dt series of the MZI scenarios: physics.u_dt, or g_exc converted at the
// reference exposure.
std::vector<double> mzi_u_dt_series(const ScenarioConfig& config);

// Free-space MZI circuit with optional coupling loss (total dB, split evenly
// before and after the Kerr arm).
CircuitLayout mzi_free_space_layout(double theta_in, double theta_out, double u_dt, double phi_lo, double loss_db,
                                    int l_max, FockCutoff cutoff);

// Evaluates one circuit with the configured engine. The engine label is
// written to `engine_used`.
ObservableReport evaluate_point(const CircuitLayout& layout, const MultiModeState& input, const EngineSpec& engine,
                                std::uint64_t point_seed, std::string& engine_used);

std::uint64_t point_seed(std::uint64_t master, std::uint64_t table, std::uint64_t point);

}  // namespace polariq
