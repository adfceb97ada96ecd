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
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <tuple>
#include <vector>

#include "polariq/fock.hpp"
#include "polariq/types.hpp"

namespace polariq {

struct GateParams {
  double theta = 0.0;
  double phi = 0.0;
  double j_dt = 0.0;
  double u_dt = 0.0;
  double delta_dt = 0.0;
};

enum class GateKind { DielectricBS, SymmetricBS, Kerr, MziArm, NonlinearCoupler, Phase };

// A set of local basis indices closed under the gate, with the gate's
// restriction to them. Number-conserving two-mode gates split into one block
// per total-photon sector.
struct SectorBlock {
  std::vector<int> local_indices;
  CMatrixRM block;
};

class GateMatrix {
 public:
  GateMatrix(int arity, FockCutoff cutoff, CMatrix matrix, std::string label);

  int arity() const { return arity_; }
  FockCutoff cutoff() const { return cutoff_; }
  const CMatrix& matrix() const { return matrix_; }
  const std::string& label() const { return label_; }

  bool is_diagonal() const { return diagonal_; }
  const CVector& diagonal_entries() const { return diag_; }
  const std::vector<SectorBlock>& blocks() const { return blocks_; }

  double unitarity_defect() const;
  GateMatrix adjoint() const;

 private:
  int arity_;
  FockCutoff cutoff_;
  CMatrix matrix_;
  std::string label_;
  bool diagonal_ = false;
  CVector diag_;
  std::vector<SectorBlock> blocks_;
};

// exp(-i H) for Hermitian H. Each connected block of H's sparsity pattern is
// diagonalized on its own, so the result keeps H's block structure exactly.
CMatrix expm_minus_i_hermitian(const CMatrix& h);

CMatrix kron(const CMatrix& a, const CMatrix& b);

GateMatrix build_dielectric_bs(double theta, FockCutoff cutoff);
GateMatrix build_symmetric_bs(double theta, FockCutoff cutoff);
GateMatrix build_kerr(double u_dt, double delta_dt, FockCutoff cutoff);
GateMatrix build_mzi_arm(double u_dt, double phi_lo, FockCutoff cutoff);
GateMatrix build_nonlinear_coupler(double j_dt, double u_dt, double delta_dt, FockCutoff cutoff);
GateMatrix build_phase(double phi, FockCutoff cutoff);

GateMatrix build_gate(GateKind kind, const GateParams& params, FockCutoff cutoff);

// Thread-safe memo of built gates keyed by the exact bit patterns of the
// parameters.
class GateCache {
 public:
  std::shared_ptr<const GateMatrix> get(GateKind kind, const GateParams& params, FockCutoff cutoff);
  std::size_t size() const;
  void clear();

 private:
  using Key = std::tuple<int, int, std::uint64_t, std::uint64_t, std::uint64_t, std::uint64_t, std::uint64_t>;
  mutable std::mutex mutex_;
  std::map<Key, std::shared_ptr<const GateMatrix>> gates_;
};

GateCache& shared_gate_cache();

}  // namespace polariq
