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

#include <benchmark/benchmark.h>

#include "polariq/engine.hpp"
#include "polariq/gates.hpp"
#include "polariq/scenario.hpp"

namespace {

using namespace polariq;

void BM_BuildCoupler(benchmark::State& state) {
  const FockCutoff n(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(build_nonlinear_coupler(kPi / 6.0, 0.02, 0.0, n));
}
BENCHMARK(BM_BuildCoupler)->Arg(4)->Arg(6)->Arg(10);

// One coupler on modes (2, 3) of a six-mode state.
void BM_ApplyCoupler(benchmark::State& state) {
  const FockCutoff n(static_cast<int>(state.range(0)));
  const auto gate = build_nonlinear_coupler(kPi / 6.0, 0.02, 0.0, n);
  std::vector<Complex> alphas(6, Complex(0.4, 0.1));
  auto psi = product_state(CoherentInput{alphas}, n);
  const int modes[2] = {2, 3};
  for (auto _ : state) {
    apply_gate(psi, modes, gate);
    benchmark::ClobberMemory();
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(psi.dimension()));
}
BENCHMARK(BM_ApplyCoupler)->Arg(3)->Arg(4)->Arg(6);

void BM_ApplyKerrDiagonal(benchmark::State& state) {
  const FockCutoff n(6);
  const auto gate = build_kerr(0.02, 0.0, n);
  std::vector<Complex> alphas(6, Complex(0.4, 0.1));
  auto psi = product_state(CoherentInput{alphas}, n);
  const int modes[1] = {0};
  for (auto _ : state) {
    apply_gate(psi, modes, gate);
    benchmark::ClobberMemory();
  }
}
BENCHMARK(BM_ApplyKerrDiagonal);

void BM_LossyMziTrajectory(benchmark::State& state) {
  const int cutoff = 10;
  const auto layout = mzi_free_space_layout(kPi / 4.0, 0.2 * kPi, 0.02, 1.0, 1.93, cutoff, FockCutoff(cutoff));
  const auto input = product_state(CoherentInput{{Complex(1.0, 0.0), Complex(0.0, 0.0)}}, FockCutoff(cutoff));
  std::uint64_t i = 0;
  for (auto _ : state) {
    auto rng = trajectory_rng(7, i++);
    benchmark::DoNotOptimize(run_trajectory(layout, input, rng));
  }
}
BENCHMARK(BM_LossyMziTrajectory);

void BM_QpicTrajectory(benchmark::State& state) {
  auto c = default_config(ScenarioKind::QpicSlowlight);
  c.engine.cutoff = static_cast<int>(state.range(0));
  const FockCutoff n(c.engine.cutoff);
  const auto params = polariton_params(c, 700.0);
  const auto b = gate_budget_at_velocity(0.3, 12.0, c.circuit.dx_um, params, c.circuit.j_design);
  auto coupler = std::make_shared<const GateMatrix>(build_nonlinear_coupler(b.j_dt, b.u_dt, 0.0, n));
  auto loss = std::make_shared<const KrausSet>(0.02 * b.dt_ps, 2, n);
  const auto layout = coupler_mesh(6, n, coupler_pairs(Pairing::Brickwork, 6, 5), coupler, loss);
  std::vector<Complex> alphas(6, Complex(0.0, 0.0));
  alphas.front() = 1.0;
  alphas.back() = std::polar(1.0, 0.2 * kPi);
  const auto input = product_state(CoherentInput{alphas}, n);
  std::uint64_t i = 0;
  for (auto _ : state) {
    auto rng = trajectory_rng(7, i++);
    benchmark::DoNotOptimize(run_trajectory(layout, input, rng));
  }
}
BENCHMARK(BM_QpicTrajectory)->Arg(3)->Arg(4)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
