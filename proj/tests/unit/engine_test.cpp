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

#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "polariq/circuit.hpp"
#include "polariq/engine.hpp"
#include "polariq/gates.hpp"
#include "polariq/loss.hpp"
#include "polariq/observables.hpp"
#include "polariq/scenario.hpp"

namespace polariq {
namespace {

MultiModeState random_state(int modes, FockCutoff cut, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  MultiModeState s(modes, cut);
  for (auto& x : s.amplitudes()) x = Complex(g(rng), g(rng));
  s.normalize();
  return s;
}

CircuitLayout lossy_mzi(double phi_lo, FockCutoff cut, double db = 1.93) {
  return mzi_free_space_layout(kPi / 4.0, 0.2 * kPi, 0.02, phi_lo, db, cut.max_photons(), cut);
}

MultiModeState mzi_input(FockCutoff cut) { return product_state(CoherentInput{{1.0, 0.0}}, cut); }

TEST(ApplyGate, PairsMatchDenseEmbedding) {
  const int n_max = 2;
  const int d = n_max + 1;
  const FockCutoff cut(n_max);
  const auto g = build_nonlinear_coupler(0.7, 0.3, 0.1, cut);
  const std::vector<std::pair<int, int>> pairs{{0, 1}, {1, 2}, {0, 2}, {2, 0}, {2, 1}, {1, 0}};
  for (const auto& [p, q] : pairs) {
    auto s = random_state(3, cut, 11);
    const oracle::Vec ref = oracle::embed_pair(g.matrix(), p, q, 3, d) * s.amplitudes();
    const std::vector<int> modes{p, q};
    apply_gate(s, modes, g);
    EXPECT_LT((s.amplitudes() - ref).cwiseAbs().maxCoeff(), 1e-13) << p << "," << q;
  }
}

TEST(ApplyGate, DiagonalPairMatchesDenseEmbedding) {
  const FockCutoff cut(3);
  const auto g = build_mzi_arm(0.05, 0.4, cut);
  auto s = random_state(3, cut, 5);
  const oracle::Vec ref = oracle::embed_pair(g.matrix(), 2, 0, 3, 4) * s.amplitudes();
  const std::vector<int> modes{2, 0};
  apply_gate(s, modes, g);
  EXPECT_LT((s.amplitudes() - ref).cwiseAbs().maxCoeff(), 1e-14);
}

TEST(ApplyGate, SingleModeMatchesDenseEmbedding) {
  const FockCutoff cut(3);
  const auto g = build_kerr(0.2, 0.1, cut);
  for (int mode = 0; mode < 3; ++mode) {
    auto s = random_state(3, cut, 3);
    const oracle::Vec ref = oracle::embed(g.matrix(), mode, 3) * s.amplitudes();
    const std::vector<int> modes{mode};
    apply_gate(s, modes, g);
    EXPECT_LT((s.amplitudes() - ref).cwiseAbs().maxCoeff(), 1e-14);
  }
}

TEST(ApplyGate, RoundTripThroughInverse) {
  const FockCutoff cut(4);
  const auto g = build_dielectric_bs(kPi / 4.0, cut);
  auto s = random_state(2, cut, 17);
  const CVector before = s.amplitudes();
  const std::vector<int> modes{0, 1};
  apply_gate(s, modes, g);
  apply_gate(s, modes, g.adjoint());
  EXPECT_LT((s.amplitudes() - before).cwiseAbs().maxCoeff(), 1e-10);
  apply_gate(s, modes, build_symmetric_bs(0.0, cut));
  EXPECT_LT((s.amplitudes() - before).cwiseAbs().maxCoeff(), 1e-10);
}

TEST(RunUnitary, LinearMziFollowsClassicalTransfer) {
  const FockCutoff cut(14);
  const auto layout = mzi_free_space_layout(kPi / 4.0, kPi / 4.0, 0.0, 0.0, 0.0, 1, cut);
  const auto out = run_unitary(layout, mzi_input(cut));
  const auto m = raw_moments(out);
  // Dielectric splitter transfer (b0, b1) = (a0 c - a1 s, -a0 s - a1 c).
  auto bs = [](Complex a0, Complex a1, double t) {
    return std::pair<Complex, Complex>{a0 * std::cos(t) - a1 * std::sin(t), -a0 * std::sin(t) - a1 * std::cos(t)};
  };
  const auto [m0, m1] = bs(1.0, 0.0, kPi / 4.0);
  const auto [o0, o1] = bs(m0, m1, kPi / 4.0);
  EXPECT_NEAR(m.n[0], std::norm(o0), 1e-10);
  EXPECT_NEAR(m.n[1], std::norm(o1), 1e-10);
}

TEST(RunUnitary, RejectsLossyLayout) {
  const FockCutoff cut(3);
  EXPECT_THROW(run_unitary(lossy_mzi(0.1, cut), mzi_input(cut)), std::invalid_argument);
}

TEST(SampleLoss, ZeroLossAndVacuum) {
  const FockCutoff cut(3);
  Rng rng = trajectory_rng(1, 0);
  const KrausSet none(0.0, 2, cut);
  const KrausSet some(0.6, 3, cut);
  for (int i = 0; i < 200; ++i) {
    auto s = random_state(1, cut, static_cast<std::uint64_t>(i));
    const CVector before = s.amplitudes();
    EXPECT_EQ(sample_loss(s, 0, none, rng).branch, 0);
    EXPECT_EQ(s.amplitudes(), before);
    MultiModeState vac(1, cut);
    EXPECT_EQ(sample_loss(vac, 0, some, rng).branch, 0);
  }
}

TEST(SampleLoss, SinglePhotonBranchFrequency) {
  const FockCutoff cut(2);
  const KrausSet set(0.2, 2, cut);
  Rng rng = trajectory_rng(2026, 0);
  const int draws = 10000;
  int lost = 0;
  for (int i = 0; i < draws; ++i) {
    const std::vector<int> one{1};
    auto s = fock_state(one, cut);
    lost += sample_loss(s, 0, set, rng).branch == 1;
  }
  const double sigma = std::sqrt(0.2 * 0.8 / draws);
  EXPECT_NEAR(static_cast<double>(lost) / draws, 0.2, 3.0 * sigma);
}

TEST(RunTrajectory, FullDampingEmptiesTheMode) {
  const FockCutoff cut(3);
  CircuitLayout layout(1, cut);
  layout.add_layer(Layer{LayerLoss{{std::make_shared<const KrausSet>(1.0, 3, cut)}}, {}});
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    Rng rng = trajectory_rng(seed, 0);
    const std::vector<int> one{1};
    const auto rec = run_trajectory(layout, fock_state(one, cut), rng);
    EXPECT_NEAR(std::abs(rec.state.amplitudes()[0]), 1.0, 1e-15);
    EXPECT_EQ(rec.branches[0], 1);
  }
}

TEST(Ensemble, LosslessLayoutIgnoresSeed) {
  const FockCutoff cut(4);
  const auto layout = mzi_free_space_layout(kPi / 4.0, 0.2 * kPi, 0.06, 1.0, 0.0, 1, cut);
  const auto a = run_ensemble(layout, mzi_input(cut), SamplingMode{50, 1});
  const auto b = run_ensemble(layout, mzi_input(cut), SamplingMode{50, 99});
  EXPECT_EQ(a.mean, b.mean);
  const auto c = run_ensemble(layout, mzi_input(cut), BranchEnumMode{1e-9});
  EXPECT_EQ(c.count, 1u);
  EXPECT_EQ(c.kept_weight, 1.0);
  EXPECT_LT((a.mean - c.mean).cwiseAbs().maxCoeff(), 1e-14);
}

TEST(Ensemble, SamplingIsBitIdenticalAcrossRunsAndThreads) {
  const FockCutoff cut(5);
  const auto layout = lossy_mzi(0.3, cut);
  const auto a = run_ensemble(layout, mzi_input(cut), SamplingMode{400, 7}, EngineOptions{{}, 1});
  const auto b = run_ensemble(layout, mzi_input(cut), SamplingMode{400, 7}, EngineOptions{{}, 1});
  const auto c = run_ensemble(layout, mzi_input(cut), SamplingMode{400, 7}, EngineOptions{{}, 3});
  EXPECT_EQ(a.mean, b.mean);
  EXPECT_EQ(a.samples, b.samples);
  EXPECT_EQ(a.mean, c.mean);
  const auto d = run_ensemble(layout, mzi_input(cut), SamplingMode{400, 8}, EngineOptions{{}, 1});
  EXPECT_NE(a.mean, d.mean);
}

TEST(ExactDensity, UnitaryLayoutGivesPureProjector) {
  const FockCutoff cut(5);
  const auto layout = mzi_free_space_layout(kPi / 4.0, 0.2 * kPi, 0.06, 2.0, 0.0, 1, cut);
  const auto psi = run_unitary(layout, mzi_input(cut));
  const auto rho = exact_density_evolution(layout, mzi_input(cut));
  const double fidelity = (psi.amplitudes().adjoint() * rho.rho * psi.amplitudes())(0, 0).real();
  EXPECT_GT(fidelity, 1.0 - 1e-12);
}

TEST(ExactDensity, SinglePhotonDampingSpectrum) {
  const FockCutoff cut(2);
  CircuitLayout layout(1, cut);
  layout.add_layer(Layer{LayerLoss{{std::make_shared<const KrausSet>(0.2, 1, cut)}}, {}});
  const std::vector<int> one{1};
  const auto rho = exact_density_evolution(layout, fock_state(one, cut));
  Eigen::SelfAdjointEigenSolver<CMatrix> es(rho.rho);
  const auto ev = es.eigenvalues();
  EXPECT_NEAR(ev[ev.size() - 1], 0.8, 1e-14);
  EXPECT_NEAR(ev[ev.size() - 2], 0.2, 1e-14);
}

TEST(ExactDensity, LossyMziMatchesOracle) {
  const int n_max = 5;
  const FockCutoff cut(n_max);
  const double phi = 0.9;
  const double kappa = db_to_kappa(1.93 / 2.0);
  // Oracle: dense propagation with gate matrices embedded by kron and the
  // damping channel built from its definition.
  const auto input = mzi_input(cut);
  oracle::Mat rho = input.amplitudes() * input.amplitudes().adjoint();
  auto conj = [&](const CMatrix& u) { rho = (u * rho * u.adjoint()).eval(); };
  conj(build_dielectric_bs(kPi / 4.0, cut).matrix());
  rho = oracle::apply_damping(rho, kappa, 0, 2, n_max);
  conj(build_mzi_arm(0.02, phi, cut).matrix());
  rho = oracle::apply_damping(rho, kappa, 0, 2, n_max);
  conj(build_dielectric_bs(0.2 * kPi, cut).matrix());

  const auto mine = exact_density_evolution(lossy_mzi(phi, cut), input);
  EXPECT_LT((mine.rho - rho).cwiseAbs().maxCoeff(), 1e-13);
  EXPECT_NEAR(mine.rho.trace().real(), 1.0, 1e-12);
}

TEST(Ensemble, BranchEnumerationMatchesExactDensity) {
  const FockCutoff cut(6);
  for (double phi : {0.0, 1.2, 3.5}) {
    const auto layout = lossy_mzi(phi, cut);
    const auto exact = raw_moments(exact_density_evolution(layout, mzi_input(cut))).flatten();
    const auto br = run_ensemble(layout, mzi_input(cut), BranchEnumMode{1e-9});
    EXPECT_LT((br.mean - exact).cwiseAbs().maxCoeff(), 1e-6) << phi;
    EXPECT_GE(br.kept_weight, 1.0 - br.pruned_weight - 1e-12);
  }
}

TEST(Ensemble, SamplingMeanWithinThreeSigmaOfExact) {
  const FockCutoff cut(6);
  const auto layout = lossy_mzi(1.2, cut);
  const auto exact = raw_moments(exact_density_evolution(layout, mzi_input(cut)));
  const auto ens = run_ensemble(layout, mzi_input(cut), SamplingMode{10000, 2026});
  const Eigen::Index n = ens.samples.rows();
  for (int l = 0; l < 2; ++l) {
    const auto col = ens.samples.col(l);
    const double mean = col.mean();
    const double var = (col.array() - mean).square().sum() / static_cast<double>(n - 1);
    EXPECT_NEAR(mean, exact.n[l], 3.0 * std::sqrt(var / static_cast<double>(n))) << l;
  }
}

TEST(ParallelFor, VisitsEveryIndexOnceAndPropagatesErrors) {
  std::vector<int> hits(1000, 0);
  parallel_for(hits.size(), 4, [&](std::size_t i) { ++hits[i]; });
  for (int h : hits) EXPECT_EQ(h, 1);
  EXPECT_THROW(parallel_for(10, 2,
                            [](std::size_t i) {
                              if (i == 5) throw std::runtime_error("boom");
                            }),
               std::runtime_error);
}

}  // namespace
}  // namespace polariq
