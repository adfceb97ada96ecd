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
#include "polariq/engine.hpp"
#include "polariq/fock.hpp"
#include "polariq/gates.hpp"

namespace polariq {
namespace {

struct TwoModeOracle {
  explicit TwoModeOracle(int n_max) : d(n_max + 1) {
    const auto a = oracle::annihilation(n_max);
    const auto id = oracle::identity(d);
    a0 = Eigen::kroneckerProduct(a, id);
    a1 = Eigen::kroneckerProduct(id, a);
    n0 = a0.adjoint() * a0;
    n1 = a1.adjoint() * a1;
  }
  int d;
  oracle::Mat a0, a1, n0, n1;
};

double max_abs_diff(const CMatrix& a, const CMatrix& b) { return (a - b).cwiseAbs().maxCoeff(); }

TEST(DielectricBS, MatchesBruteForceExponential) {
  const int n_max = 3;
  const TwoModeOracle o(n_max);
  for (double theta : {0.0, kPi / 4.0, 0.2 * kPi, 1.3}) {
    const oracle::Mat g = theta * (o.a0.adjoint() * o.a1 - o.a0 * o.a1.adjoint());
    oracle::Mat coating = oracle::Mat::Zero(o.d * o.d, o.d * o.d);
    for (int i = 0; i < o.d * o.d; ++i) coating(i, i) = std::polar(1.0, kPi * o.n1(i, i).real());
    const oracle::Mat ref = g.exp() * coating;
    EXPECT_LT(max_abs_diff(build_dielectric_bs(theta, FockCutoff(n_max)).matrix(), ref), 1e-12) << theta;
  }
}

TEST(DielectricBS, ZeroAngleIsCoatingPhase) {
  const auto g = build_dielectric_bs(0.0, FockCutoff(4));
  ASSERT_TRUE(g.is_diagonal());
  for (int n0 = 0; n0 <= 4; ++n0) {
    for (int n1 = 0; n1 <= 4; ++n1) {
      EXPECT_NEAR(std::abs(g.matrix()(n0 * 5 + n1, n0 * 5 + n1) - std::polar(1.0, kPi * n1)), 0.0, 1e-15);
    }
  }
}

TEST(DielectricBS, BalancedSplitOfOnePhoton) {
  const auto g = build_dielectric_bs(kPi / 4.0, FockCutoff(3));
  const int d = 4;
  const CVector out = g.matrix().col(1 * d + 0);
  EXPECT_NEAR(std::norm(out[1 * d + 0]), 0.5, 1e-14);
  EXPECT_NEAR(std::norm(out[0 * d + 1]), 0.5, 1e-14);
  EXPECT_NEAR(out.squaredNorm(), 1.0, 1e-14);
}

TEST(DielectricBS, ClassicalTransferMatrix) {
  const double theta = 0.2 * kPi;
  const Complex a0(0.6, 0.1);
  const Complex a1(-0.2, 0.4);
  const double c = std::cos(theta);
  const double s = std::sin(theta);
  const Complex b0 = a0 * c - a1 * s;
  const Complex b1 = -a0 * s - a1 * c;
  const FockCutoff cut(18);
  auto in = product_state(CoherentInput{{a0, a1}}, cut);
  const std::vector<int> modes{0, 1};
  apply_gate(in, modes, build_dielectric_bs(theta, cut));
  const auto ref = product_state(CoherentInput{{b0, b1}}, cut);
  EXPECT_GT(std::abs(ref.amplitudes().dot(in.amplitudes())), 1.0 - 1e-12);
}

TEST(SymmetricBS, MatchesBruteForceExponential) {
  const TwoModeOracle o(3);
  const double theta = 0.37;
  const oracle::Mat h = -theta * (o.a0.adjoint() * o.a1 + o.a1.adjoint() * o.a0);
  EXPECT_LT(max_abs_diff(build_symmetric_bs(theta, FockCutoff(3)).matrix(), oracle::expm_minus_i(h)), 1e-12);
}

TEST(SymmetricBS, OnePhotonTransferProbability) {
  for (double theta : {0.1, kPi / 6.0, 0.9}) {
    const auto g = build_symmetric_bs(theta, FockCutoff(2));
    const int d = 3;
    const Complex amp = g.matrix()(0 * d + 1, 1 * d + 0);
    EXPECT_NEAR(std::norm(amp), std::pow(std::sin(theta), 2), 1e-14);
  }
  const auto id = build_symmetric_bs(0.0, FockCutoff(3));
  EXPECT_LT(max_abs_diff(id.matrix(), CMatrix::Identity(16, 16)), 1e-15);
}

TEST(Kerr, DiagonalPhases) {
  const auto g = build_kerr(0.06, 0.0, FockCutoff(5));
  ASSERT_TRUE(g.is_diagonal());
  EXPECT_NEAR(std::abs(g.matrix()(0, 0) - 1.0), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(g.matrix()(1, 1) - 1.0), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(g.matrix()(2, 2) - std::polar(1.0, -0.06)), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(g.matrix()(3, 3) - std::polar(1.0, -0.18)), 0.0, 1e-15);
}

TEST(MziArm, Phases) {
  const FockCutoff cut(3);
  const int d = 4;
  EXPECT_LT(max_abs_diff(build_mzi_arm(0.0, 0.0, cut).matrix(), CMatrix::Identity(16, 16)), 1e-15);
  const auto g = build_mzi_arm(0.0, 0.7, cut);
  for (int n1 = 0; n1 < d; ++n1) {
    EXPECT_NEAR(std::abs(g.matrix()(n1, n1) - std::polar(1.0, -0.7 * n1)), 0.0, 1e-15);
  }
  const auto h = build_mzi_arm(0.005, kPi, cut);
  EXPECT_NEAR(std::abs(h.matrix()(2 * d + 1, 2 * d + 1) - std::polar(1.0, -(0.005 - kPi))), 0.0, 1e-14);
}

TEST(NonlinearCoupler, MatchesBruteForceExponential) {
  const int n_max = 4;
  const TwoModeOracle o(n_max);
  const double j = kPi / 6.0;
  const double u = 0.31;
  const double delta = 0.05;
  const oracle::Mat h = -delta * (o.n0 + o.n1) - j * (o.a1.adjoint() * o.a0 + o.a0.adjoint() * o.a1) +
                        0.5 * u * (o.a0.adjoint() * o.a0.adjoint() * o.a0 * o.a0 +
                                   o.a1.adjoint() * o.a1.adjoint() * o.a1 * o.a1);
  ASSERT_LT((h - h.adjoint()).cwiseAbs().maxCoeff(), 1e-15);
  EXPECT_LT(max_abs_diff(build_nonlinear_coupler(j, u, delta, FockCutoff(n_max)).matrix(), oracle::expm_minus_i(h)),
            1e-12);
}

TEST(NonlinearCoupler, LimitingCases) {
  const FockCutoff cut(4);
  EXPECT_LT(max_abs_diff(build_nonlinear_coupler(0.4, 0.0, 0.0, cut).matrix(), build_symmetric_bs(0.4, cut).matrix()),
            1e-13);
  const CMatrix kerr = build_kerr(0.2, 0.0, cut).matrix();
  const CMatrix product = oracle::Mat(Eigen::kroneckerProduct(kerr, kerr));
  EXPECT_LT(max_abs_diff(build_nonlinear_coupler(0.0, 0.2, 0.0, cut).matrix(), product), 1e-13);
}

TEST(Phase, Identities) {
  const FockCutoff cut(5);
  EXPECT_LT(max_abs_diff(build_phase(0.0, cut).matrix(), CMatrix::Identity(6, 6)), 1e-15);
  EXPECT_LT(max_abs_diff(build_phase(2.0 * kPi, cut).matrix(), CMatrix::Identity(6, 6)), 1e-12);
  EXPECT_NEAR(std::abs(build_phase(kPi, cut).matrix()(1, 1) + 1.0), 0.0, 1e-15);
}

// Property: every builder returns a unitary that conserves total photon number
// for randomly drawn parameters.
TEST(GateProperties, UnitaryAndNumberConserving) {
  std::mt19937_64 rng(20260);
  std::uniform_real_distribution<double> angle(-kPi, kPi);
  std::uniform_real_distribution<double> small(0.0, 0.5);
  const int n_max = 10;
  const FockCutoff cut(n_max);
  const TwoModeOracle o(n_max);
  const oracle::Mat total = o.n0 + o.n1;
  for (int trial = 0; trial < 8; ++trial) {
    const std::vector<GateMatrix> two_mode{
        build_dielectric_bs(angle(rng), cut), build_symmetric_bs(angle(rng), cut),
        build_mzi_arm(small(rng), angle(rng), cut), build_nonlinear_coupler(angle(rng), small(rng), small(rng), cut)};
    for (const auto& g : two_mode) {
      EXPECT_LT(g.unitarity_defect(), 1e-10) << g.label();
      const CMatrix comm = g.matrix() * total - total * g.matrix();
      EXPECT_LT(comm.cwiseAbs().maxCoeff(), 1e-12) << g.label();
    }
    for (const auto& g : {build_kerr(small(rng), small(rng), cut), build_phase(angle(rng), cut)}) {
      EXPECT_LT(g.unitarity_defect(), 1e-10) << g.label();
      EXPECT_TRUE(g.is_diagonal());
    }
  }
}

TEST(GateMatrix, SectorBlocksCoverTheSpace) {
  const int n_max = 5;
  const auto g = build_nonlinear_coupler(0.5, 0.1, 0.0, FockCutoff(n_max));
  ASSERT_FALSE(g.is_diagonal());
  std::vector<int> seen(36, 0);
  for (const auto& b : g.blocks()) {
    const int sector = b.local_indices.front() / 6 + b.local_indices.front() % 6;
    for (int i : b.local_indices) {
      ++seen[static_cast<std::size_t>(i)];
      EXPECT_EQ(i / 6 + i % 6, sector);
    }
  }
  for (int c : seen) EXPECT_EQ(c, 1);
}

TEST(GateMatrix, AdjointInverts) {
  const auto g = build_dielectric_bs(0.3, FockCutoff(4));
  const CMatrix prod = g.adjoint().matrix() * g.matrix();
  EXPECT_LT(max_abs_diff(prod, CMatrix::Identity(25, 25)), 1e-12);
}

TEST(GateCache, ReusesIdenticalParameters) {
  GateCache cache;
  GateParams p;
  p.theta = 0.25;
  const auto a = cache.get(GateKind::DielectricBS, p, FockCutoff(3));
  const auto b = cache.get(GateKind::DielectricBS, p, FockCutoff(3));
  p.theta = std::nextafter(0.25, 1.0);
  const auto c = cache.get(GateKind::DielectricBS, p, FockCutoff(3));
  EXPECT_EQ(a.get(), b.get());
  EXPECT_NE(a.get(), c.get());
  EXPECT_EQ(cache.size(), 2u);
}

}  // namespace
}  // namespace polariq
