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

#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "polariq/fock.hpp"
#include "polariq/gates.hpp"
#include "polariq/loss.hpp"

namespace polariq {

struct PlacedGate {
  std::vector<int> modes;
  std::shared_ptr<const GateMatrix> gate;
};

// Per-mode loss channels applied at the start of a layer. A null entry means
// the mode is lossless in that layer.
struct LayerLoss {
  std::vector<std::shared_ptr<const KrausSet>> per_mode;
};

struct Layer {
  std::optional<LayerLoss> loss;
  std::vector<PlacedGate> gates;
};

class CircuitLayout {
 public:
  CircuitLayout(int num_modes, FockCutoff cutoff);

  // Validates mode ranges, arities, cutoffs and non-overlap before appending.
  void add_layer(Layer layer);

  int num_modes() const { return num_modes_; }
  FockCutoff cutoff() const { return cutoff_; }
  const std::vector<Layer>& layers() const { return layers_; }
  bool has_loss() const;

  double dx_um = 0.0;
  double dt_ps = 0.0;

  nlohmann::json describe() const;

 private:
  int num_modes_;
  FockCutoff cutoff_;
  std::vector<Layer> layers_;
};

enum class Pairing { Brickwork, EvenOnly, Custom };

using PairList = std::vector<std::pair<int, int>>;

// Mode pairs coupled in each of `depth` layers. Brickwork alternates
// (0,1),(2,3),... with (1,2),(3,4),...; even-only repeats the first pattern.
std::vector<PairList> coupler_pairs(Pairing pairing, int num_modes, int depth,
                                    const std::vector<PairList>& custom = {});

// `depth` layers of the same coupler on the given pairs, each preceded by an
// identical loss channel on every mode when `loss` is set.
CircuitLayout coupler_mesh(int num_modes, FockCutoff cutoff, const std::vector<PairList>& pairs,
                           std::shared_ptr<const GateMatrix> coupler, std::shared_ptr<const KrausSet> loss);

}  // namespace polariq
