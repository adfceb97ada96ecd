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
#include <functional>
#include <random>
#include <span>
#include <variant>
#include <vector>

#include "polariq/circuit.hpp"
#include "polariq/fock.hpp"
#include "polariq/gates.hpp"
#include "polariq/loss.hpp"
#include "polariq/observables.hpp"

namespace polariq {

using Rng = std::mt19937_64;

// Applies `gate` to the listed modes in place. For two-mode gates modes[0]
// is the gate's slow (first) local factor.
void apply_gate(MultiModeState& state, std::span<const int> modes, const GateMatrix& gate);

// How the weight missing from a truncated Kraus set is treated.
enum class DeficiencyPolicy {
  FoldIntoNoLoss,  // added to the l = 0 branch probability
  Discard,         // dropped; branch probabilities are renormalized
};

// P(n) for one mode of a normalized state.
std::vector<double> mode_marginal(const MultiModeState& state, int mode);

// Born weights ||L_l psi||^2 for l = 0..l_max.
std::vector<double> loss_branch_weights(const MultiModeState& state, int mode, const KrausSet& set);

// psi -> L_l psi on one mode, without renormalization.
void apply_kraus_branch(MultiModeState& state, int mode, const KrausSet& set, int l);

// Uniform double in [0, 1) built from the top 53 bits of one draw.
double uniform01(Rng& rng);

// Draws a loss branch, applies it and renormalizes. Returns the branch index
// and its probability.
struct LossDraw {
  int branch = 0;
  double probability = 1.0;
};
LossDraw sample_loss(MultiModeState& state, int mode, const KrausSet& set, Rng& rng,
                     DeficiencyPolicy policy = DeficiencyPolicy::FoldIntoNoLoss);

struct TrajectoryRecord {
  // Branch per (layer, mode), row-major; -1 where the mode had no channel.
  std::vector<int> branches;
  double weight = 1.0;
  MultiModeState state;
};

TrajectoryRecord run_trajectory(const CircuitLayout& layout, const MultiModeState& input, Rng& rng,
                                DeficiencyPolicy policy = DeficiencyPolicy::FoldIntoNoLoss);

// Lossless evolution; throws std::invalid_argument if the layout has loss.
MultiModeState run_unitary(const CircuitLayout& layout, MultiModeState state);

struct SamplingMode {
  std::size_t trajectories = 10000;
  std::uint64_t seed = 0;
};

struct BranchEnumMode {
  double threshold = 1e-9;
};

using EnsembleMode = std::variant<SamplingMode, BranchEnumMode>;

struct EngineOptions {
  DeficiencyPolicy policy = DeficiencyPolicy::FoldIntoNoLoss;
  unsigned threads = 0;  // 0 picks the hardware concurrency
};

Rng trajectory_rng(std::uint64_t seed, std::uint64_t index);

EnsembleResult run_ensemble(const CircuitLayout& layout, const MultiModeState& input, const EnsembleMode& mode,
                            const EngineOptions& options = {});

// Full density-matrix evolution with complete Kraus sums (l_max = N) in place
// of each layer's channels. Limited to one or two modes.
DensityMatrix exact_density_evolution(const CircuitLayout& layout, const MultiModeState& input);

// Runs body(i) for i in [0, count) on up to `threads` workers.
void parallel_for(std::size_t count, unsigned threads, const std::function<void(std::size_t)>& body);

}  // namespace polariq
