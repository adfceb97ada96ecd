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

#include "polariq/scenario.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <memory>

#include "polariq/gates.hpp"
#include "polariq/loss.hpp"

namespace polariq {
namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::string label_number(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", x);
  return buf;
}

std::string label_phase(double phi) { return label_number(std::round(phi / kPi * 1e6) / 1e6) + "pi"; }

ObservableReport empty_report(int num_modes, int cutoff) {
  ObservableReport r;
  r.num_modes = num_modes;
  r.cutoff = cutoff;
  r.intensities = RVector::Constant(num_modes, kNaN);
  r.g2 = RMatrix::Constant(num_modes, num_modes, kNaN);
  r.se_n = RVector::Constant(num_modes, kNaN);
  r.se_g2 = RMatrix::Constant(num_modes, num_modes, kNaN);
  r.count = 0;
  return r;
}

EngineChoice resolve(EngineChoice choice, bool lossy, int num_modes) {
  if (choice != EngineChoice::Auto) return choice;
  if (!lossy) return EngineChoice::Pure;
  return num_modes <= 2 ? EngineChoice::BranchEnum : EngineChoice::Sampling;
}

using PointJob = std::function<ResultRow()>;

// Runs jobs in sweep order. Sampled points parallelize internally over
// trajectories, so only deterministic points are spread across workers.
std::vector<ResultRow> run_points(const std::vector<PointJob>& jobs, bool sampled, unsigned threads) {
  std::vector<ResultRow> rows(jobs.size());
  auto timed = [&](std::size_t i) {
    const auto start = std::chrono::steady_clock::now();
    rows[i] = jobs[i]();
    rows[i].wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  };
  parallel_for(jobs.size(), sampled ? 1u : threads, timed);
  return rows;
}

EngineSpec single_threaded(EngineSpec spec, bool sampled) {
  if (!sampled) spec.threads = 1;
  return spec;
}

int mzi_l_max(const ScenarioConfig& c) { return c.loss.l_max > 0 ? c.loss.l_max : c.engine.cutoff; }
int qpic_l_max(const ScenarioConfig& c) { return c.loss.l_max > 0 ? c.loss.l_max : 2; }

void check_axis(const SweepAxis& axis, std::initializer_list<const char*> allowed, const char* scenario) {
  for (const char* name : allowed) {
    if (axis.variable == name) return;
  }
  std::string list;
  for (const char* name : allowed) list += std::string(list.empty() ? "" : ", ") + name;
  throw ConfigError(std::string("scenario ") + scenario + " sweeps " + list + ", not '" + axis.variable + "'");
}

MultiModeState mzi_input(double alpha, FockCutoff cutoff) {
  return product_state(CoherentInput{{Complex(alpha, 0.0), Complex(0.0, 0.0)}}, cutoff);
}

void note_truncation(ScenarioResult& result, const CoherentInput& input, FockCutoff cutoff) {
  if (exceeds_truncation_guard(input, cutoff)) {
    result.warnings.push_back("input |alpha|^2 exceeds N/2 = " + label_number(0.5 * cutoff.max_photons()) +
                              "; truncation may distort statistics");
  }
}

}  // namespace

std::string to_string(ScenarioKind kind) {
  switch (kind) {
    case ScenarioKind::MziFreeSpace:
      return "mzi_free_space";
    case ScenarioKind::MziThetaPhiMap:
      return "mzi_theta_phi_map";
    case ScenarioKind::MziLossy:
      return "mzi_lossy";
    case ScenarioKind::MziIntegrated:
      return "mzi_integrated";
    case ScenarioKind::QpicKscan:
      return "qpic_kscan";
    case ScenarioKind::QpicSlowlight:
      return "qpic_slowlight";
    case ScenarioKind::QpicPhaseSweep:
      return "qpic_phase_sweep";
  }
  return "unknown";
}

ScenarioKind parse_scenario_kind(const std::string& name) {
  for (auto kind : {ScenarioKind::MziFreeSpace, ScenarioKind::MziThetaPhiMap, ScenarioKind::MziLossy,
                    ScenarioKind::MziIntegrated, ScenarioKind::QpicKscan, ScenarioKind::QpicSlowlight,
                    ScenarioKind::QpicPhaseSweep}) {
    if (to_string(kind) == name) return kind;
  }
  throw ConfigError("unknown scenario '" + name + "'");
}

std::string to_string(EngineChoice choice) {
  switch (choice) {
    case EngineChoice::Auto:
      return "auto";
    case EngineChoice::Pure:
      return "pure";
    case EngineChoice::Density:
      return "density";
    case EngineChoice::BranchEnum:
      return "branch_enum";
    case EngineChoice::Sampling:
      return "sampling";
  }
  return "unknown";
}

std::vector<double> SweepAxis::values() const {
  if (!values_override.empty()) return values_override;
  std::vector<double> out(static_cast<std::size_t>(std::max(points, 0)));
  for (int i = 0; i < points; ++i) {
    out[static_cast<std::size_t>(i)] = points == 1 ? min : min + (max - min) * i / (points - 1);
  }
  return out;
}

ScenarioConfig default_config(ScenarioKind kind) {
  ScenarioConfig c;
  c.kind = kind;
  const SweepAxis lo_axis{"phi_lo", 0.0, 2.0 * kPi, 401, {}};
  switch (kind) {
    case ScenarioKind::MziFreeSpace:
      c.sweep = lo_axis;
      c.physics.u_dt = {0.001, 0.005, 0.06};
      break;
    case ScenarioKind::MziLossy:
      c.sweep = lo_axis;
      c.physics.u_dt = {0.02};
      c.loss.db = {0.0, 0.97, 1.93, 2.90};
      break;
    case ScenarioKind::MziThetaPhiMap:
      c.sweep = SweepAxis{"theta_out", 0.0, kPi, 51, {}};
      c.sweep2 = SweepAxis{"phi_lo", 0.0, 2.0 * kPi, 101, {}};
      c.physics.u_dt = {0.02};
      break;
    case ScenarioKind::MziIntegrated:
      c.sweep = lo_axis;
      c.physics.g_exc = {10.0, 50.0, 700.0};
      c.circuit.j_dt = kPi / 4.0;
      break;
    case ScenarioKind::QpicKscan:
      c.sweep = SweepAxis{"k", 0.05, 0.35, 40, {}};
      c.physics.g_exc = {10.0, 50.0, 700.0};
      break;
    case ScenarioKind::QpicSlowlight:
      c.sweep = SweepAxis{"v_g", 10.0, 25.0, 16, {}};
      c.physics.g_exc = {700.0};
      c.circuit.phi_rel = {0.2 * kPi};
      c.circuit.coupling = CouplingDesign::Fixed;
      c.loss.gamma = {0.0, 0.02};
      break;
    case ScenarioKind::QpicPhaseSweep:
      c.sweep = SweepAxis{"k", 0.05, 0.35, 40, {}};
      c.physics.g_exc = {10.0, 50.0, 700.0};
      c.circuit.phi_rel = {0.0, 0.2 * kPi, 0.4 * kPi, 0.6 * kPi, 0.8 * kPi, kPi};
      break;
  }
  return c;
}

void validate(const ScenarioConfig& c) {
  auto check_grid = [](const SweepAxis& a) {
    if (a.values_override.empty()) {
      if (a.points < 1) throw ConfigError("sweep '" + a.variable + "' needs at least one point");
      if (!(a.min <= a.max)) throw ConfigError("sweep '" + a.variable + "' bounds are not ordered");
    }
  };
  check_grid(c.sweep);
  if (c.sweep2) check_grid(*c.sweep2);
  if (c.sweep2 && c.kind != ScenarioKind::MziThetaPhiMap) {
    throw ConfigError("only mzi_theta_phi_map takes a second sweep axis");
  }
  if (c.engine.cutoff < 1) throw ConfigError("cutoff must be at least 1");
  if (c.engine.trajectories == 0) throw ConfigError("trajectory count must be positive");
  if (!(c.engine.branch_threshold > 0.0 && c.engine.branch_threshold < 1.0)) {
    throw ConfigError("branch threshold must lie in (0, 1)");
  }
  if (!(c.engine.intensity_floor >= 0.0)) throw ConfigError("intensity floor must be non-negative");
  if (c.loss.l_max < 0) throw ConfigError("loss l_max must be non-negative");
  for (double db : c.loss.db) {
    if (!(db >= 0.0)) throw ConfigError("coupling loss in dB must be non-negative");
  }
  for (double g : c.loss.gamma) {
    if (!(g >= 0.0)) throw ConfigError("loss rate gamma must be non-negative");
  }
  for (double g : c.physics.g_exc) {
    if (!(g >= 0.0)) throw ConfigError("interaction constant must be non-negative");
  }
  if (!(c.physics.sigma_t_ps > 0.0)) throw ConfigError("pulse duration must be positive");
  if (!(c.physics.a_perp_um >= 0.0)) throw ConfigError("a_perp must be non-negative (0 = reference calibration)");

  switch (c.kind) {
    case ScenarioKind::MziFreeSpace:
    case ScenarioKind::MziLossy:
    case ScenarioKind::MziIntegrated:
      check_axis(c.sweep, {"phi_lo"}, to_string(c.kind).c_str());
      break;
    case ScenarioKind::MziThetaPhiMap:
      check_axis(c.sweep, {"theta_out"}, "mzi_theta_phi_map");
      if (!c.sweep2) throw ConfigError("mzi_theta_phi_map needs a second sweep axis over phi_lo");
      check_axis(*c.sweep2, {"phi_lo"}, "mzi_theta_phi_map");
      break;
    case ScenarioKind::QpicKscan:
      check_axis(c.sweep, {"k"}, "qpic_kscan");
      break;
    case ScenarioKind::QpicSlowlight:
      check_axis(c.sweep, {"v_g"}, "qpic_slowlight");
      break;
    case ScenarioKind::QpicPhaseSweep:
      check_axis(c.sweep, {"k", "v_g"}, "qpic_phase_sweep");
      break;
  }
  const bool mzi = c.kind == ScenarioKind::MziFreeSpace || c.kind == ScenarioKind::MziLossy ||
                   c.kind == ScenarioKind::MziThetaPhiMap || c.kind == ScenarioKind::MziIntegrated;
  if (mzi) {
    if (c.physics.u_dt.empty() && c.physics.g_exc.empty()) throw ConfigError("physics needs u_dt or g_exc values");
    if (c.kind == ScenarioKind::MziIntegrated && c.circuit.integrated_layers < 1) {
      throw ConfigError("integrated MZI needs at least one coupler layer");
    }
  } else {
    if (c.physics.g_exc.empty() && c.physics.u_dt.empty()) throw ConfigError("physics needs g_exc values");
    if (c.circuit.modes < 2) throw ConfigError("qPIC needs at least two modes");
    if (c.circuit.depth < 1) throw ConfigError("qPIC depth must be at least 1");
    if (!(c.circuit.dx_um > 0.0)) throw ConfigError("layer length dx must be positive");
    if (c.circuit.phi_rel.empty()) throw ConfigError("phi_rel needs at least one value");
    for (const auto& layer : c.circuit.custom_pairs) {
      for (const auto& [a, b] : layer) {
        if (a < 0 || b < 0 || a >= c.circuit.modes || b >= c.circuit.modes || a == b) {
          throw ConfigError("custom pairing references an invalid mode pair");
        }
      }
    }
  }
}

std::uint64_t point_seed(std::uint64_t master, std::uint64_t table, std::uint64_t point) {
  auto mix = [](std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  };
  return mix(mix(mix(master) ^ table) ^ point);
}

PolaritonParams polariton_params(const ScenarioConfig& c, double g_exc) {
  PolaritonParams p;
  if (!c.physics.dispersion_csv.empty()) {
    p.dispersion = read_dispersion_csv(c.physics.dispersion_csv, c.physics.anchors.exciton_energy_mev,
                                       c.physics.anchors.rabi_mev);
  } else {
    p.dispersion = calibrate_dispersion(c.physics.anchors).model;
  }
  p.g_exc = g_exc;
  p.sigma_t_ps = c.physics.sigma_t_ps;
  p.hbar_mev_ps = c.physics.anchors.hbar_mev_ps;
  p.a_perp_um = c.physics.a_perp_um > 0.0 ? c.physics.a_perp_um : calibrate_a_perp();
  return p;
}

std::vector<double> mzi_u_dt_series(const ScenarioConfig& c) {
  if (!c.physics.u_dt.empty()) return c.physics.u_dt;
  std::vector<double> out;
  for (double g : c.physics.g_exc) {
    const auto p = polariton_params(c, g);
    const double v = c.physics.mzi_group_velocity;
    out.push_back(nonlinear_rate_at(c.physics.exciton_fraction, v, p) * c.physics.mzi_length_um / v);
  }
  return out;
}

CircuitLayout mzi_free_space_layout(double theta_in, double theta_out, double u_dt, double phi_lo, double loss_db,
                                    int l_max, FockCutoff cutoff) {
  auto& cache = shared_gate_cache();
  CircuitLayout layout(2, cutoff);
  std::shared_ptr<const KrausSet> half;
  if (loss_db > 0.0) half = std::make_shared<const KrausSet>(db_to_kappa(0.5 * loss_db), l_max, cutoff);
  auto arm_loss = [&]() -> std::optional<LayerLoss> {
    if (!half) return std::nullopt;
    return LayerLoss{{half, nullptr}};
  };
  GateParams in;
  in.theta = theta_in;
  GateParams arm;
  arm.u_dt = u_dt;
  arm.phi = phi_lo;
  GateParams out;
  out.theta = theta_out;
  layout.add_layer(Layer{std::nullopt, {PlacedGate{{0, 1}, cache.get(GateKind::DielectricBS, in, cutoff)}}});
  layout.add_layer(Layer{arm_loss(), {PlacedGate{{0, 1}, cache.get(GateKind::MziArm, arm, cutoff)}}});
  layout.add_layer(Layer{arm_loss(), {PlacedGate{{0, 1}, cache.get(GateKind::DielectricBS, out, cutoff)}}});
  return layout;
}

ObservableReport evaluate_point(const CircuitLayout& layout, const MultiModeState& input, const EngineSpec& engine,
                                std::uint64_t seed, std::string& engine_used) {
  const int L = layout.num_modes();
  const int N = layout.cutoff().max_photons();
  const EngineChoice choice = resolve(engine.mode, layout.has_loss(), L);
  engine_used = to_string(choice);
  EnsembleResult ens;
  switch (choice) {
    case EngineChoice::Pure:
      if (layout.has_loss()) throw ConfigError("the pure-state engine cannot evolve a lossy circuit");
      ens = EnsembleResult::exact(raw_moments(run_unitary(layout, input)), N);
      break;
    case EngineChoice::Density:
      if (L > 2) throw ConfigError("the density engine supports at most two modes");
      ens = EnsembleResult::exact(raw_moments(exact_density_evolution(layout, input)), N);
      break;
    case EngineChoice::BranchEnum:
      ens = run_ensemble(layout, input, BranchEnumMode{engine.branch_threshold},
                         EngineOptions{engine.deficiency, engine.threads});
      break;
    case EngineChoice::Sampling:
      ens = run_ensemble(layout, input, SamplingMode{engine.trajectories, seed},
                         EngineOptions{engine.deficiency, engine.threads});
      break;
    case EngineChoice::Auto:
      break;
  }
  return report(ens, ReportOptions{engine.intensity_floor, engine.jackknife});
}

ScenarioResult run_mzi_free_space(const ScenarioConfig& c) {
  validate(c);
  ScenarioResult result;
  result.kind = c.kind;
  const FockCutoff cutoff(c.engine.cutoff);
  note_truncation(result, CoherentInput{{Complex(c.circuit.alpha_in, 0.0)}}, cutoff);
  const auto input = mzi_input(c.circuit.alpha_in, cutoff);
  const auto series = mzi_u_dt_series(c);
  const auto phis = c.sweep.values();
  const bool sampled = resolve(c.engine.mode, false, 2) == EngineChoice::Sampling;
  const EngineSpec engine = single_threaded(c.engine, sampled);
  for (std::size_t s = 0; s < series.size(); ++s) {
    const double u_dt = series[s];
    ResultTable table;
    table.name = "udt_" + label_number(u_dt);
    table.series = {{"u_dt", u_dt}};
    if (c.physics.u_dt.empty() && s < c.physics.g_exc.size()) table.series["g_exc"] = c.physics.g_exc[s];
    table.coord_names = {"phi_lo"};
    table.num_modes = 2;
    table.layout = mzi_free_space_layout(c.circuit.theta_in, c.circuit.theta_out, u_dt, phis.front(), 0.0, 1, cutoff)
                       .describe();
    std::vector<PointJob> jobs;
    for (std::size_t i = 0; i < phis.size(); ++i) {
      jobs.push_back([&, u_dt, i, s] {
        ResultRow row;
        row.coords = {phis[i]};
        const auto layout =
            mzi_free_space_layout(c.circuit.theta_in, c.circuit.theta_out, u_dt, phis[i], 0.0, 1, cutoff);
        row.report = evaluate_point(layout, input, engine, point_seed(c.engine.seed, s, i), row.engine);
        return row;
      });
    }
    table.rows = run_points(jobs, sampled, c.engine.threads);
    result.tables.push_back(std::move(table));
  }
  return result;
}

ScenarioResult run_mzi_lossy(const ScenarioConfig& c) {
  validate(c);
  ScenarioResult result;
  result.kind = c.kind;
  const FockCutoff cutoff(c.engine.cutoff);
  note_truncation(result, CoherentInput{{Complex(c.circuit.alpha_in, 0.0)}}, cutoff);
  const auto input = mzi_input(c.circuit.alpha_in, cutoff);
  const auto series = mzi_u_dt_series(c);
  const auto phis = c.sweep.values();
  const std::vector<double> dbs = c.loss.db.empty() ? std::vector<double>{0.0} : c.loss.db;
  const int l_max = mzi_l_max(c);
  std::uint64_t table_index = 0;
  for (double u_dt : series) {
    for (double db : dbs) {
      const bool sampled = resolve(c.engine.mode, db > 0.0, 2) == EngineChoice::Sampling;
      const EngineSpec engine = single_threaded(c.engine, sampled);
      ResultTable table;
      table.name = (series.size() > 1 ? "udt_" + label_number(u_dt) + "_" : std::string()) + "loss_" +
                   label_number(db) + "dB";
      table.series = {{"u_dt", u_dt}, {"loss_db", db}, {"l_max", l_max}};
      table.coord_names = {"phi_lo"};
      table.extra_names = {"kappa_per_coupling"};
      table.num_modes = 2;
      table.layout =
          mzi_free_space_layout(c.circuit.theta_in, c.circuit.theta_out, u_dt, phis.front(), db, l_max, cutoff)
              .describe();
      const double kappa = db > 0.0 ? db_to_kappa(0.5 * db) : 0.0;
      std::vector<PointJob> jobs;
      for (std::size_t i = 0; i < phis.size(); ++i) {
        jobs.push_back([&, u_dt, db, kappa, i, table_index] {
          ResultRow row;
          row.coords = {phis[i]};
          row.extras = {kappa};
          const auto layout =
              mzi_free_space_layout(c.circuit.theta_in, c.circuit.theta_out, u_dt, phis[i], db, l_max, cutoff);
          row.report = evaluate_point(layout, input, engine, point_seed(c.engine.seed, table_index, i), row.engine);
          return row;
        });
      }
      table.rows = run_points(jobs, sampled, c.engine.threads);
      result.tables.push_back(std::move(table));
      ++table_index;
    }
  }
  return result;
}

ScenarioResult run_mzi_theta_phi_map(const ScenarioConfig& c) {
  validate(c);
  ScenarioResult result;
  result.kind = c.kind;
  const FockCutoff cutoff(c.engine.cutoff);
  note_truncation(result, CoherentInput{{Complex(c.circuit.alpha_in, 0.0)}}, cutoff);
  const auto input = mzi_input(c.circuit.alpha_in, cutoff);
  const auto series = mzi_u_dt_series(c);
  const auto thetas = c.sweep.values();
  const auto phis = c.sweep2->values();
  const bool sampled = resolve(c.engine.mode, false, 2) == EngineChoice::Sampling;
  const EngineSpec engine = single_threaded(c.engine, sampled);
  for (std::size_t s = 0; s < series.size(); ++s) {
    const double u_dt = series[s];
    ResultTable table;
    table.name = "udt_" + label_number(u_dt);
    table.series = {{"u_dt", u_dt}};
    table.coord_names = {"theta_out", "phi_lo"};
    table.num_modes = 2;
    table.layout =
        mzi_free_space_layout(c.circuit.theta_in, thetas.front(), u_dt, phis.front(), 0.0, 1, cutoff).describe();
    std::vector<PointJob> jobs;
    for (std::size_t a = 0; a < thetas.size(); ++a) {
      for (std::size_t b = 0; b < phis.size(); ++b) {
        const std::size_t i = a * phis.size() + b;
        jobs.push_back([&, u_dt, a, b, i, s] {
          ResultRow row;
          row.coords = {thetas[a], phis[b]};
          const auto layout = mzi_free_space_layout(c.circuit.theta_in, thetas[a], u_dt, phis[b], 0.0, 1, cutoff);
          row.report = evaluate_point(layout, input, engine, point_seed(c.engine.seed, s, i), row.engine);
          return row;
        });
      }
    }
    table.rows = run_points(jobs, sampled, c.engine.threads);
    result.tables.push_back(std::move(table));
  }
  return result;
}

ScenarioResult run_mzi_integrated(const ScenarioConfig& c) {
  validate(c);
  ScenarioResult result;
  result.kind = c.kind;
  const FockCutoff cutoff(c.engine.cutoff);
  note_truncation(result, CoherentInput{{Complex(c.circuit.alpha_in, 0.0), Complex(c.circuit.alpha_in, 0.0)}}, cutoff);
  const auto series = mzi_u_dt_series(c);
  const auto phis = c.sweep.values();
  const double j_dt = c.circuit.j_dt.value_or(kPi / 4.0);
  const bool sampled = resolve(c.engine.mode, false, 2) == EngineChoice::Sampling;
  const EngineSpec engine = single_threaded(c.engine, sampled);
  for (std::size_t s = 0; s < series.size(); ++s) {
    const double u_dt = series[s];
    GateParams gp;
    gp.j_dt = j_dt;
    gp.u_dt = u_dt;
    const auto coupler = shared_gate_cache().get(GateKind::NonlinearCoupler, gp, cutoff);
    const std::vector<PairList> pairs(static_cast<std::size_t>(c.circuit.integrated_layers), PairList{{0, 1}});
    const auto layout = coupler_mesh(2, cutoff, pairs, coupler, nullptr);
    ResultTable table;
    table.name = s < c.physics.g_exc.size() && c.physics.u_dt.empty() ? "g_" + label_number(c.physics.g_exc[s])
                                                                       : "udt_" + label_number(u_dt);
    table.series = {{"u_dt", u_dt}, {"j_dt", j_dt}, {"lo_offset", c.circuit.lo_offset}};
    if (c.physics.u_dt.empty() && s < c.physics.g_exc.size()) table.series["g_exc"] = c.physics.g_exc[s];
    table.coord_names = {"phi_lo"};
    table.num_modes = 2;
    table.layout = layout.describe();
    std::vector<PointJob> jobs;
    for (std::size_t i = 0; i < phis.size(); ++i) {
      jobs.push_back([&, i, s] {
        ResultRow row;
        row.coords = {phis[i]};
        const Complex a1 = c.circuit.alpha_in * std::polar(1.0, phis[i] + c.circuit.lo_offset);
        const auto input = product_state(CoherentInput{{Complex(c.circuit.alpha_in, 0.0), a1}}, cutoff);
        row.report = evaluate_point(layout, input, engine, point_seed(c.engine.seed, s, i), row.engine);
        return row;
      });
    }
    table.rows = run_points(jobs, sampled, c.engine.threads);
    result.tables.push_back(std::move(table));
  }
  return result;
}

namespace {

// Shared driver of the multi-waveguide scenarios: one table per
// (phi_rel, g_exc, gamma) combination, swept over k or v_g.
ScenarioResult run_qpic(const ScenarioConfig& c) {
  validate(c);
  ScenarioResult result;
  result.kind = c.kind;
  const FockCutoff cutoff(c.engine.cutoff);
  const int L = c.circuit.modes;
  const bool slow = c.sweep.variable == "v_g";
  const auto xs = c.sweep.values();
  const std::vector<double> gammas = c.loss.gamma.empty() ? std::vector<double>{0.0} : c.loss.gamma;
  const std::vector<double> gs = c.physics.g_exc.empty() ? std::vector<double>{0.0} : c.physics.g_exc;
  const auto pairs = coupler_pairs(c.circuit.pairing, L, c.circuit.depth, c.circuit.custom_pairs);
  const int l_max = qpic_l_max(c);
  GateCache cache;

  std::uint64_t table_index = 0;
  for (double phi_rel : c.circuit.phi_rel) {
    CoherentInput in;
    in.alphas.assign(static_cast<std::size_t>(L), Complex(0.0, 0.0));
    in.alphas.front() = c.circuit.alpha_in;
    in.alphas.back() = c.circuit.alpha_in * std::polar(1.0, phi_rel);
    note_truncation(result, in, cutoff);
    const auto input = product_state(in, cutoff);
    for (std::size_t gi = 0; gi < gs.size(); ++gi) {
      const auto params = polariton_params(c, gs[gi]);
      for (double gamma : gammas) {
        const bool lossy = gamma > 0.0;
        const bool sampled = resolve(c.engine.mode, lossy, L) == EngineChoice::Sampling;
        const EngineSpec engine = single_threaded(c.engine, sampled);
        ResultTable table;
        table.name = "phi" + label_phase(phi_rel) + "_g" + label_number(gs[gi]) +
                     (gammas.size() > 1 || lossy ? "_gamma" + label_number(gamma) : std::string());
        table.series = {{"phi_rel", phi_rel}, {"g_exc", gs[gi]}, {"gamma_per_ps", gamma},
                        {"l_max", l_max},     {"a_perp_um", params.a_perp_um}};
        table.coord_names = {c.sweep.variable};
        table.extra_names = slow ? std::vector<std::string>{"exciton_fraction", "dt_ps", "t_circuit_ps", "j_dt",
                                                            "u_dt", "kappa"}
                                 : std::vector<std::string>{"v_g", "exciton_fraction", "dt_ps", "j_dt", "u_dt",
                                                            "kappa"};
        table.num_modes = L;
        std::vector<PointJob> jobs;
        for (std::size_t i = 0; i < xs.size(); ++i) {
          jobs.push_back([&, i, gamma, table_index] {
            ResultRow row;
            row.coords = {xs[i]};
            GateBudget b = slow ? gate_budget_at_velocity(c.physics.exciton_fraction, xs[i], c.circuit.dx_um, params,
                                                          c.circuit.j_design)
                                : gate_budget(xs[i], c.circuit.dx_um, c.circuit.coupling, params, c.circuit.j_design);
            if (c.circuit.j_dt) b.j_dt = *c.circuit.j_dt;
            if (!c.physics.u_dt.empty()) b.u_dt = c.physics.u_dt.front();
            double kappa = 0.0;
            if (gamma > 0.0) {
              kappa = gamma * b.dt_ps;
              if (kappa > 1.0) {
                row.extras = slow ? std::vector<double>{b.exciton_fraction, b.dt_ps, c.circuit.depth * b.dt_ps,
                                                        b.j_dt, b.u_dt, kappa}
                                  : std::vector<double>{b.group_velocity, b.exciton_fraction, b.dt_ps, b.j_dt,
                                                        b.u_dt, kappa};
                row.report = empty_report(L, cutoff.max_photons());
                row.engine = to_string(resolve(c.engine.mode, true, L));
                row.status = "kappa_exceeds_one";
                return row;
              }
              kappa = kappa_from_rate(gamma, b.dt_ps);
            }
            row.extras = slow ? std::vector<double>{b.exciton_fraction, b.dt_ps, c.circuit.depth * b.dt_ps, b.j_dt,
                                                    b.u_dt, kappa}
                              : std::vector<double>{b.group_velocity, b.exciton_fraction, b.dt_ps, b.j_dt, b.u_dt,
                                                    kappa};
            GateParams gp;
            gp.j_dt = b.j_dt;
            gp.u_dt = b.u_dt;
            const auto coupler = cache.get(GateKind::NonlinearCoupler, gp, cutoff);
            std::shared_ptr<const KrausSet> loss;
            if (kappa > 0.0) loss = std::make_shared<const KrausSet>(kappa, l_max, cutoff);
            auto layout = coupler_mesh(L, cutoff, pairs, coupler, loss);
            layout.dx_um = c.circuit.dx_um;
            layout.dt_ps = b.dt_ps;
            row.report = evaluate_point(layout, input, engine, point_seed(c.engine.seed, table_index, i), row.engine);
            return row;
          });
        }
        {
          GateParams gp;
          const auto coupler = cache.get(GateKind::NonlinearCoupler, gp, cutoff);
          auto layout = coupler_mesh(L, cutoff, pairs, coupler, nullptr);
          layout.dx_um = c.circuit.dx_um;
          table.layout = layout.describe();
          table.layout["coupler"] = "nonlinear_coupler(j_dt, u_dt) per row";
          table.layout["pairing"] = c.circuit.pairing == Pairing::Brickwork  ? "brickwork"
                                    : c.circuit.pairing == Pairing::EvenOnly ? "even-only"
                                                                             : "custom";
        }
        table.rows = run_points(jobs, sampled, c.engine.threads);
        for (const auto& row : table.rows) {
          if (row.status != "ok") {
            result.contract_violation = true;
            result.warnings.push_back("table " + table.name + ": " + c.sweep.variable + " = " +
                                      label_number(row.coords[0]) + " flagged " + row.status);
          }
        }
        result.tables.push_back(std::move(table));
        ++table_index;
      }
    }
  }
  return result;
}

}  // namespace

ScenarioResult run_qpic_kscan(const ScenarioConfig& c) { return run_qpic(c); }
ScenarioResult run_qpic_slowlight(const ScenarioConfig& c) { return run_qpic(c); }
ScenarioResult run_qpic_phase_sweep(const ScenarioConfig& c) { return run_qpic(c); }

ScenarioResult run_scenario(const ScenarioConfig& c) {
  const auto start = std::chrono::steady_clock::now();
  ScenarioResult result;
  switch (c.kind) {
    case ScenarioKind::MziFreeSpace:
      result = run_mzi_free_space(c);
      break;
    case ScenarioKind::MziThetaPhiMap:
      result = run_mzi_theta_phi_map(c);
      break;
    case ScenarioKind::MziLossy:
      result = run_mzi_lossy(c);
      break;
    case ScenarioKind::MziIntegrated:
      result = run_mzi_integrated(c);
      break;
    case ScenarioKind::QpicKscan:
      result = run_qpic_kscan(c);
      break;
    case ScenarioKind::QpicSlowlight:
      result = run_qpic_slowlight(c);
      break;
    case ScenarioKind::QpicPhaseSweep:
      result = run_qpic_phase_sweep(c);
      break;
  }
  result.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return result;
}

ConvergenceReport compare_results(const ScenarioResult& high, const ScenarioResult& low, double tolerance) {
  ConvergenceReport rep;
  rep.tolerance = tolerance;
  if (high.tables.size() != low.tables.size()) throw std::invalid_argument("results have different table counts");
  for (std::size_t t = 0; t < high.tables.size(); ++t) {
    const auto& a = high.tables[t];
    const auto& b = low.tables[t];
    if (a.rows.size() != b.rows.size()) throw std::invalid_argument("results have different row counts");
    if (!a.rows.empty()) rep.cutoff_high = a.rows.front().report.cutoff;
    if (!b.rows.empty()) rep.cutoff_low = b.rows.front().report.cutoff;
    for (std::size_t r = 0; r < a.rows.size(); ++r) {
      const auto& ra = a.rows[r].report;
      const auto& rb = b.rows[r].report;
      if (a.rows[r].status != "ok" || b.rows[r].status != "ok") continue;
      for (int l = 0; l < ra.num_modes; ++l) {
        rep.max_delta_n = std::max(rep.max_delta_n, std::abs(ra.intensities[l] - rb.intensities[l]));
        for (int m = l; m < ra.num_modes; ++m) {
          const double ga = ra.g2(l, m);
          const double gb = rb.g2(l, m);
          if (std::isnan(ga) || std::isnan(gb)) continue;
          rep.max_delta_g2 = std::max(rep.max_delta_g2, std::abs(ga - gb));
        }
      }
    }
  }
  rep.passed = rep.max_delta_n < tolerance && rep.max_delta_g2 < tolerance;
  return rep;
}

ConvergenceReport convergence_check(const ScenarioConfig& config, double tolerance) {
  if (config.engine.cutoff - 2 < 1) throw ConfigError("convergence check needs a cutoff of at least 3");
  ScenarioConfig low = config;
  low.engine.cutoff = config.engine.cutoff - 2;
  const auto a = run_scenario(config);
  const auto b = run_scenario(low);
  auto rep = compare_results(a, b, tolerance);
  rep.cutoff_high = config.engine.cutoff;
  rep.cutoff_low = low.engine.cutoff;
  return rep;
}

}  // namespace polariq
