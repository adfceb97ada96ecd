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

#include "polariq/engine.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <exception>
#include <mutex>
#include <stdexcept>
#include <thread>

namespace polariq {
namespace {

// Plain complex product; std::complex operator* goes through the
// Annex G NaN-recovery path, which is slow in inner loops.
inline Complex cmul(Complex a, Complex b) {
  return {a.real() * b.real() - a.imag() * b.imag(), a.real() * b.imag() + a.imag() * b.real()};
}

constexpr int kMaxBlock = 256;

void apply_single(CVector& psi, const FockIndexer& idx, int mode, const GateMatrix& gate) {
  const std::size_t d = static_cast<std::size_t>(idx.cutoff().local_dim());
  const std::size_t s = idx.stride(mode);
  const std::size_t outer = idx.dimension() / (s * d);
  Complex* a = psi.data();
  if (gate.is_diagonal()) {
    const CVector& diag = gate.diagonal_entries();
    for (std::size_t o = 0; o < outer; ++o) {
      for (std::size_t k = 0; k < d; ++k) {
        const Complex f = diag[static_cast<Eigen::Index>(k)];
        Complex* row = a + o * s * d + k * s;
        for (std::size_t i = 0; i < s; ++i) row[i] = cmul(f, row[i]);
      }
    }
    return;
  }
  std::array<Complex, kMaxBlock> x{};
  for (std::size_t o = 0; o < outer; ++o) {
    for (std::size_t i = 0; i < s; ++i) {
      const std::size_t base = o * s * d + i;
      for (const auto& blk : gate.blocks()) {
        const std::size_t k = blk.local_indices.size();
        for (std::size_t j = 0; j < k; ++j) x[j] = a[base + static_cast<std::size_t>(blk.local_indices[j]) * s];
        const Complex* m = blk.block.data();
        for (std::size_t r = 0; r < k; ++r) {
          double re = 0.0;
          double im = 0.0;
          for (std::size_t j = 0; j < k; ++j) {
            const Complex u = m[r * k + j];
            re += u.real() * x[j].real() - u.imag() * x[j].imag();
            im += u.real() * x[j].imag() + u.imag() * x[j].real();
          }
          a[base + static_cast<std::size_t>(blk.local_indices[r]) * s] = {re, im};
        }
      }
    }
  }
}

void apply_pair(CVector& psi, const FockIndexer& idx, int m0, int m1, const GateMatrix& gate) {
  const std::size_t d = static_cast<std::size_t>(idx.cutoff().local_dim());
  const std::size_t s0 = idx.stride(m0);
  const std::size_t s1 = idx.stride(m1);
  const std::size_t sp = std::max(s0, s1);  // slower of the two modes
  const std::size_t sq = std::min(s0, s1);
  const std::size_t outer = idx.dimension() / (sp * d);
  const std::size_t mid = sp / (sq * d);
  const std::size_t inner = sq;

  std::vector<std::size_t> offset(d * d);
  for (std::size_t p = 0; p < d; ++p) {
    for (std::size_t q = 0; q < d; ++q) offset[p * d + q] = p * s0 + q * s1;
  }
  Complex* a = psi.data();

  if (gate.is_diagonal()) {
    const Complex* diag = gate.diagonal_entries().data();
    for (std::size_t o = 0; o < outer; ++o) {
      for (std::size_t md = 0; md < mid; ++md) {
        const std::size_t base0 = o * sp * d + md * sq * d;
        for (std::size_t loc = 0; loc < d * d; ++loc) {
          Complex* row = a + base0 + offset[loc];
          const Complex f = diag[loc];
          for (std::size_t i = 0; i < inner; ++i) row[i] = cmul(f, row[i]);
        }
      }
    }
    return;
  }

  struct PackedBlock {
    std::vector<std::size_t> off;
    const Complex* m;
  };
  std::vector<PackedBlock> blocks;
  blocks.reserve(gate.blocks().size());
  for (const auto& blk : gate.blocks()) {
    PackedBlock pb{{}, blk.block.data()};
    for (int loc : blk.local_indices) pb.off.push_back(offset[static_cast<std::size_t>(loc)]);
    blocks.push_back(std::move(pb));
  }
  std::array<Complex, kMaxBlock> x{};
  for (std::size_t o = 0; o < outer; ++o) {
    for (std::size_t md = 0; md < mid; ++md) {
      const std::size_t base0 = o * sp * d + md * sq * d;
      for (std::size_t i = 0; i < inner; ++i) {
        Complex* base = a + base0 + i;
        for (const auto& blk : blocks) {
          const std::size_t k = blk.off.size();
          if (k == 1) {
            base[blk.off[0]] = cmul(blk.m[0], base[blk.off[0]]);
            continue;
          }
          for (std::size_t j = 0; j < k; ++j) x[j] = base[blk.off[j]];
          for (std::size_t r = 0; r < k; ++r) {
            const Complex* row = blk.m + r * k;
            double re = 0.0;
            double im = 0.0;
            for (std::size_t j = 0; j < k; ++j) {
              re += row[j].real() * x[j].real() - row[j].imag() * x[j].imag();
              im += row[j].real() * x[j].imag() + row[j].imag() * x[j].real();
            }
            base[blk.off[r]] = {re, im};
          }
        }
      }
    }
  }
}

double fold_or_discard(std::vector<double>& w, DeficiencyPolicy policy) {
  double total = 0.0;
  for (double v : w) total += v;
  if (policy == DeficiencyPolicy::FoldIntoNoLoss) {
    w[0] += std::max(0.0, 1.0 - total);
    total = std::max(total, 1.0);
  }
  return total;
}

CMatrix embed(const GateMatrix& gate, std::span<const int> modes, int num_modes) {
  const int d = gate.cutoff().local_dim();
  const CMatrix id = CMatrix::Identity(d, d);
  if (gate.arity() == 1) {
    if (num_modes == 1) return gate.matrix();
    return modes[0] == 0 ? kron(gate.matrix(), id) : kron(id, gate.matrix());
  }
  if (modes[0] == 0) return gate.matrix();
  // Conjugate by the mode swap |p,q> <-> |q,p>.
  const int dim = d * d;
  Eigen::PermutationMatrix<Eigen::Dynamic> swap(dim);
  for (int p = 0; p < d; ++p) {
    for (int q = 0; q < d; ++q) swap.indices()[p * d + q] = q * d + p;
  }
  return swap * gate.matrix() * swap.transpose();
}

void check_input(const CircuitLayout& layout, const MultiModeState& input) {
  if (layout.num_modes() != input.num_modes() || !(layout.cutoff() == input.cutoff())) {
    throw std::invalid_argument("layout and input state dimensions differ");
  }
}

void apply_layer_gates(MultiModeState& state, const Layer& layer) {
  for (const auto& g : layer.gates) apply_gate(state, g.modes, *g.gate);
}

}  // namespace

void apply_gate(MultiModeState& state, std::span<const int> modes, const GateMatrix& gate) {
  if (static_cast<int>(modes.size()) != gate.arity()) throw std::invalid_argument("gate arity and mode count differ");
  if (!(gate.cutoff() == state.cutoff())) throw std::invalid_argument("gate and state cutoffs differ");
  for (int m : modes) {
    if (m < 0 || m >= state.num_modes()) throw std::out_of_range("gate mode index out of range");
  }
  if (gate.arity() == 1) {
    apply_single(state.amplitudes(), state.indexer(), modes[0], gate);
    return;
  }
  if (modes[0] == modes[1]) throw std::invalid_argument("two-mode gate needs two distinct modes");
  apply_pair(state.amplitudes(), state.indexer(), modes[0], modes[1], gate);
}

std::vector<double> mode_marginal(const MultiModeState& state, int mode) {
  const auto& idx = state.indexer();
  if (mode < 0 || mode >= state.num_modes()) throw std::out_of_range("mode index out of range");
  const std::size_t d = static_cast<std::size_t>(idx.cutoff().local_dim());
  const std::size_t s = idx.stride(mode);
  const std::size_t outer = idx.dimension() / (s * d);
  const Complex* a = state.amplitudes().data();
  std::vector<double> p(d, 0.0);
  for (std::size_t o = 0; o < outer; ++o) {
    for (std::size_t k = 0; k < d; ++k) {
      const Complex* row = a + o * s * d + k * s;
      double acc = 0.0;
      for (std::size_t i = 0; i < s; ++i) acc += row[i].real() * row[i].real() + row[i].imag() * row[i].imag();
      p[k] += acc;
    }
  }
  return p;
}

std::vector<double> loss_branch_weights(const MultiModeState& state, int mode, const KrausSet& set) {
  if (!(set.cutoff() == state.cutoff())) throw std::invalid_argument("Kraus set and state cutoffs differ");
  const auto p = mode_marginal(state, mode);
  std::vector<double> w(static_cast<std::size_t>(set.l_max() + 1), 0.0);
  for (int l = 0; l <= set.l_max(); ++l) {
    for (std::size_t n = static_cast<std::size_t>(l); n < p.size(); ++n) {
      const double c = set.coefficient(l, static_cast<int>(n));
      w[static_cast<std::size_t>(l)] += c * c * p[n];
    }
  }
  return w;
}

void apply_kraus_branch(MultiModeState& state, int mode, const KrausSet& set, int l) {
  if (l < 0 || l > set.l_max()) throw std::out_of_range("Kraus branch index out of range");
  if (!(set.cutoff() == state.cutoff())) throw std::invalid_argument("Kraus set and state cutoffs differ");
  const auto& idx = state.indexer();
  const std::size_t d = static_cast<std::size_t>(idx.cutoff().local_dim());
  const std::size_t s = idx.stride(mode);
  const std::size_t outer = idx.dimension() / (s * d);
  const auto shift = static_cast<std::size_t>(l);
  Complex* a = state.amplitudes().data();
  for (std::size_t o = 0; o < outer; ++o) {
    Complex* block = a + o * s * d;
    // Ascending n: row n-l is overwritten only after it has been read.
    for (std::size_t n = shift; n < d; ++n) {
      const double c = set.coefficient(l, static_cast<int>(n));
      Complex* src = block + n * s;
      Complex* dst = block + (n - shift) * s;
      for (std::size_t i = 0; i < s; ++i) dst[i] = c * src[i];
    }
    for (std::size_t n = d - shift; n < d; ++n) std::fill_n(block + n * s, s, Complex(0.0, 0.0));
  }
}

double uniform01(Rng& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

LossDraw sample_loss(MultiModeState& state, int mode, const KrausSet& set, Rng& rng, DeficiencyPolicy policy) {
  if (set.is_identity()) return {};
  auto w = loss_branch_weights(state, mode, set);
  const double total = fold_or_discard(w, policy);
  if (!(total > 1e-300)) throw ContractViolation("all loss branch probabilities vanish");
  const double u = uniform01(rng) * total;
  double cum = 0.0;
  int chosen = -1;
  for (std::size_t l = 0; l < w.size(); ++l) {
    cum += w[l];
    if (u < cum) {
      chosen = static_cast<int>(l);
      break;
    }
  }
  if (chosen < 0) {
    // u landed in the rounding gap at the top; take the last nonzero branch.
    for (std::size_t l = w.size(); l-- > 0;) {
      if (w[l] > 0.0) {
        chosen = static_cast<int>(l);
        break;
      }
    }
  }
  apply_kraus_branch(state, mode, set, chosen);
  state.normalize();
  return {chosen, w[static_cast<std::size_t>(chosen)] / total};
}

TrajectoryRecord run_trajectory(const CircuitLayout& layout, const MultiModeState& input, Rng& rng,
                                DeficiencyPolicy policy) {
  check_input(layout, input);
  const auto L = static_cast<std::size_t>(layout.num_modes());
  TrajectoryRecord rec{std::vector<int>(layout.layers().size() * L, -1), 1.0, input};
  for (std::size_t li = 0; li < layout.layers().size(); ++li) {
    const Layer& layer = layout.layers()[li];
    if (layer.loss) {
      for (std::size_t m = 0; m < L; ++m) {
        const auto& set = layer.loss->per_mode[m];
        if (!set) continue;
        const auto draw = sample_loss(rec.state, static_cast<int>(m), *set, rng, policy);
        rec.branches[li * L + m] = draw.branch;
        rec.weight *= draw.probability;
      }
    }
    apply_layer_gates(rec.state, layer);
  }
  return rec;
}

MultiModeState run_unitary(const CircuitLayout& layout, MultiModeState state) {
  check_input(layout, state);
  if (layout.has_loss()) throw std::invalid_argument("run_unitary called on a lossy layout");
  for (const auto& layer : layout.layers()) apply_layer_gates(state, layer);
  return state;
}

Rng trajectory_rng(std::uint64_t seed, std::uint64_t index) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32)};
  return Rng(seq);
}

void parallel_for(std::size_t count, unsigned threads, const std::function<void(std::size_t)>& body) {
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, count));
  if (threads <= 1) {
    for (std::size_t i = 0; i < count; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::vector<std::thread> pool;
  for (unsigned t = 0; t < threads; ++t) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < count; i = next++) {
        try {
          body(i);
        } catch (...) {
          std::lock_guard lock(failure_mutex);
          if (!failure) failure = std::current_exception();
          next = count;
        }
      }
    });
  }
  for (auto& th : pool) th.join();
  if (failure) std::rethrow_exception(failure);
}

namespace {

struct BranchWalker {
  const CircuitLayout& layout;
  double threshold;
  DeficiencyPolicy policy;
  RVector acc;
  double kept = 0.0;
  double pruned = 0.0;
  std::size_t count = 0;

  // Site s enumerates (layer, mode) pairs; gates of a layer run once all its
  // loss sites have been resolved.
  void walk(MultiModeState& state, std::size_t layer, int mode, double weight) {
    const auto L = layout.num_modes();
    while (layer < layout.layers().size()) {
      const Layer& lay = layout.layers()[layer];
      if (lay.loss) {
        for (; mode < L; ++mode) {
          const auto& set = lay.loss->per_mode[static_cast<std::size_t>(mode)];
          if (!set || set->is_identity()) continue;
          auto w = loss_branch_weights(state, mode, *set);
          fold_or_discard(w, policy);
          for (int l = 0; l <= set->l_max(); ++l) {
            const double p = w[static_cast<std::size_t>(l)];
            if (p <= 0.0) continue;
            const double child = weight * p;
            if (child < threshold) {
              pruned += child;
              continue;
            }
            MultiModeState next = state;
            apply_kraus_branch(next, mode, *set, l);
            next.normalize();
            walk(next, layer, mode + 1, child);
          }
          return;
        }
      }
      apply_layer_gates(state, lay);
      ++layer;
      mode = 0;
    }
    acc += weight * raw_moments(state).flatten();
    kept += weight;
    ++count;
  }
};

}  // namespace

EnsembleResult run_ensemble(const CircuitLayout& layout, const MultiModeState& input, const EnsembleMode& mode,
                            const EngineOptions& options) {
  check_input(layout, input);
  const int L = layout.num_modes();
  const Eigen::Index K = RawMoments::flat_size(L);
  EnsembleResult out;
  out.num_modes = L;
  out.cutoff = layout.cutoff().max_photons();

  if (const auto* sampling = std::get_if<SamplingMode>(&mode)) {
    if (sampling->trajectories == 0) throw std::invalid_argument("trajectory count must be positive");
    out.kind = EnsembleKind::Sampling;
    out.seed = sampling->seed;
    out.count = sampling->trajectories;
    out.samples.resize(static_cast<Eigen::Index>(sampling->trajectories), K);
    parallel_for(sampling->trajectories, options.threads, [&](std::size_t i) {
      Rng rng = trajectory_rng(sampling->seed, i);
      const auto rec = run_trajectory(layout, input, rng, options.policy);
      out.samples.row(static_cast<Eigen::Index>(i)) = raw_moments(rec.state).flatten().transpose();
    });
    // Column sums in row order keep the mean independent of scheduling.
    out.mean = RVector::Zero(K);
    for (Eigen::Index i = 0; i < out.samples.rows(); ++i) out.mean += out.samples.row(i).transpose();
    out.mean /= static_cast<double>(out.samples.rows());
    return out;
  }

  const auto& branch = std::get<BranchEnumMode>(mode);
  if (!(branch.threshold > 0.0 && branch.threshold < 1.0)) {
    throw std::invalid_argument("branch threshold must lie in (0, 1)");
  }
  out.kind = EnsembleKind::BranchEnumeration;
  out.threshold = branch.threshold;
  BranchWalker walker{layout, branch.threshold, options.policy, RVector::Zero(K)};
  MultiModeState state = input;
  walker.walk(state, 0, 0, 1.0);
  if (!(walker.kept > 0.0)) throw ContractViolation("every loss branch was pruned");
  out.mean = walker.acc / walker.kept;
  out.kept_weight = walker.kept;
  out.pruned_weight = walker.pruned;
  out.count = walker.count;
  return out;
}

DensityMatrix exact_density_evolution(const CircuitLayout& layout, const MultiModeState& input) {
  check_input(layout, input);
  const int L = layout.num_modes();
  if (L > 2) throw std::invalid_argument("exact density evolution supports at most two modes");
  DensityMatrix rho = DensityMatrix::from_pure(input);
  for (const auto& layer : layout.layers()) {
    if (layer.loss) {
      for (int m = 0; m < L; ++m) {
        const auto& set = layer.loss->per_mode[static_cast<std::size_t>(m)];
        if (!set || set->is_identity()) continue;
        const KrausSet full(set->kappa(), layout.cutoff().max_photons(), layout.cutoff());
        rho.rho = apply_channel(rho.rho, m, L, full);
      }
    }
    for (const auto& g : layer.gates) {
      const CMatrix u = embed(*g.gate, g.modes, L);
      rho.rho = u * rho.rho * u.adjoint();
    }
  }
  return rho;
}

}  // namespace polariq
