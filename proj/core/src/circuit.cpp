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

#include "polariq/circuit.hpp"

#include <stdexcept>
#include <string>

namespace polariq {

CircuitLayout::CircuitLayout(int num_modes, FockCutoff cutoff) : num_modes_(num_modes), cutoff_(cutoff) {
  if (num_modes < 1) throw std::invalid_argument("layout needs at least one mode");
}

void CircuitLayout::add_layer(Layer layer) {
  std::vector<bool> used(static_cast<std::size_t>(num_modes_), false);
  for (const auto& g : layer.gates) {
    if (!g.gate) throw std::invalid_argument("placed gate has no matrix");
    if (static_cast<int>(g.modes.size()) != g.gate->arity()) {
      throw std::invalid_argument("gate " + g.gate->label() + " placed on wrong number of modes");
    }
    if (!(g.gate->cutoff() == cutoff_)) throw std::invalid_argument("gate cutoff differs from layout cutoff");
    for (int m : g.modes) {
      if (m < 0 || m >= num_modes_) throw std::out_of_range("gate mode index " + std::to_string(m) + " out of range");
      if (used[static_cast<std::size_t>(m)]) {
        throw std::invalid_argument("gates overlap on mode " + std::to_string(m) + " within one layer");
      }
      used[static_cast<std::size_t>(m)] = true;
    }
  }
  if (layer.loss) {
    if (static_cast<int>(layer.loss->per_mode.size()) != num_modes_) {
      throw std::invalid_argument("layer loss must list one channel slot per mode");
    }
    for (const auto& k : layer.loss->per_mode) {
      if (k && !(k->cutoff() == cutoff_)) throw std::invalid_argument("loss channel cutoff differs from layout");
    }
  }
  layers_.push_back(std::move(layer));
}

bool CircuitLayout::has_loss() const {
  for (const auto& layer : layers_) {
    if (!layer.loss) continue;
    for (const auto& k : layer.loss->per_mode) {
      if (k && !k->is_identity()) return true;
    }
  }
  return false;
}

nlohmann::json CircuitLayout::describe() const {
  nlohmann::json out;
  out["num_modes"] = num_modes_;
  out["cutoff"] = cutoff_.max_photons();
  out["dx_um"] = dx_um;
  out["dt_ps"] = dt_ps;
  auto& layers = out["layers"] = nlohmann::json::array();
  for (const auto& layer : layers_) {
    nlohmann::json entry;
    if (layer.loss) {
      auto& loss = entry["loss"] = nlohmann::json::array();
      for (const auto& k : layer.loss->per_mode) {
        if (k) {
          loss.push_back({{"kappa", k->kappa()}, {"l_max", k->l_max()}});
        } else {
          loss.push_back(nullptr);
        }
      }
    }
    auto& gates = entry["gates"] = nlohmann::json::array();
    for (const auto& g : layer.gates) gates.push_back({{"label", g.gate->label()}, {"modes", g.modes}});
    layers.push_back(std::move(entry));
  }
  return out;
}

std::vector<PairList> coupler_pairs(Pairing pairing, int num_modes, int depth, const std::vector<PairList>& custom) {
  if (depth < 1) throw std::invalid_argument("circuit depth must be at least 1");
  if (pairing == Pairing::Custom) {
    if (static_cast<int>(custom.size()) != depth) {
      throw std::invalid_argument("custom pairing must list exactly one pair set per layer");
    }
    return custom;
  }
  PairList even;
  PairList odd;
  for (int m = 0; m + 1 < num_modes; m += 2) even.emplace_back(m, m + 1);
  for (int m = 1; m + 1 < num_modes; m += 2) odd.emplace_back(m, m + 1);
  std::vector<PairList> out;
  for (int layer = 0; layer < depth; ++layer) {
    out.push_back(pairing == Pairing::Brickwork && layer % 2 == 1 ? odd : even);
  }
  return out;
}

CircuitLayout coupler_mesh(int num_modes, FockCutoff cutoff, const std::vector<PairList>& pairs,
                           std::shared_ptr<const GateMatrix> coupler, std::shared_ptr<const KrausSet> loss) {
  CircuitLayout layout(num_modes, cutoff);
  for (const auto& layer_pairs : pairs) {
    Layer layer;
    if (loss) layer.loss = LayerLoss{std::vector<std::shared_ptr<const KrausSet>>(static_cast<std::size_t>(num_modes), loss)};
    for (const auto& [a, b] : layer_pairs) layer.gates.push_back(PlacedGate{{a, b}, coupler});
    layout.add_layer(std::move(layer));
  }
  return layout;
}

}  // namespace polariq
