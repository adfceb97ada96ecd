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
#include <utility>
#include <vector>

#include "polariq/fock.hpp"
#include "polariq/types.hpp"

namespace polariq {

inline constexpr double kDefaultIntensityFloor = 1e-12;

// n[l] = <n_l> and nn(l, m) = <a_l^dag a_m^dag a_m a_l>, which is <n_l(n_l-1)>
// on the diagonal and <n_l n_m> off it.
struct RawMoments {
  RVector n;
  RMatrix nn;

  int num_modes() const { return static_cast<int>(n.size()); }

  // [n_0 .. n_{L-1}, nn_00, nn_01, .., nn_0{L-1}, nn_11, .., nn_{L-1,L-1}]
  static Eigen::Index flat_size(int num_modes) { return num_modes + num_modes * (num_modes + 1) / 2; }
  static Eigen::Index flat_pair_index(int num_modes, int l, int m);
  RVector flatten() const;
  static RawMoments unflatten(const RVector& flat, int num_modes);
};

// Moments of the normalized state (the squared norm is divided out).
RawMoments raw_moments(const MultiModeState& state);
RawMoments raw_moments(const DensityMatrix& rho);

double intensity(const MultiModeState& state, int l);
double intensity(const DensityMatrix& rho, int l);

std::optional<double> g2_entry(const MultiModeState& state, int l, int m,
                               double floor = kDefaultIntensityFloor);
std::optional<double> g2_entry(const DensityMatrix& rho, int l, int m, double floor = kDefaultIntensityFloor);

enum class EnsembleKind { Exact, Sampling, BranchEnumeration };

std::string to_string(EnsembleKind kind);

struct EnsembleResult {
  EnsembleKind kind = EnsembleKind::Exact;
  int num_modes = 0;
  int cutoff = 0;
  std::size_t count = 1;     // trajectories or kept branches
  RVector mean;              // flat raw moments
  RMatrix samples;           // sampling only: one row of flat moments per trajectory
  double kept_weight = 1.0;  // branch enumeration: sum of kept branch weights
  double pruned_weight = 0.0;
  double threshold = 0.0;
  std::optional<std::uint64_t> seed;

  static EnsembleResult exact(const RawMoments& moments, int cutoff);
};

struct ReportOptions {
  double intensity_floor = kDefaultIntensityFloor;
  bool jackknife = false;
};

struct ObservableReport {
  int num_modes = 0;
  RVector intensities;
  RMatrix g2;     // NaN where the intensity product is below the floor
  RVector se_n;   // NaN unless sampled
  RMatrix se_g2;  // NaN unless sampled
  std::vector<std::pair<int, int>> suppressed;

  EnsembleKind kind = EnsembleKind::Exact;
  int cutoff = 0;
  std::size_t count = 1;
  double pruned_weight = 0.0;
  double intensity_floor = kDefaultIntensityFloor;
  std::optional<std::uint64_t> seed;

  std::optional<double> g2_at(int l, int m) const;
};

ObservableReport report(const EnsembleResult& ensemble, const ReportOptions& options = {});

}  // namespace polariq
