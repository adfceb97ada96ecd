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

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "polariq/fock.hpp"
#include "polariq/loss.hpp"

namespace polariq {
namespace {

TEST(KrausSet, ZeroLossIsIdentity) {
  const KrausSet set(0.0, 2, FockCutoff(5));
  EXPECT_TRUE(set.is_identity());
  ASSERT_EQ(set.operators().size(), 1u);
  EXPECT_LT((set.operators()[0] - CMatrix::Identity(6, 6)).cwiseAbs().maxCoeff(), 1e-15);
  EXPECT_EQ(set.completeness_deficiency(), 0.0);
}

TEST(KrausSet, MatchesDirectConstruction) {
  const int n_max = 8;
  for (double kappa : {0.05, 0.2, 0.7, 1.0}) {
    const KrausSet set(kappa, n_max, FockCutoff(n_max));
    const auto ref = oracle::damping_kraus(kappa, n_max);
    ASSERT_EQ(set.operators().size(), ref.size());
    for (std::size_t l = 0; l < ref.size(); ++l) {
      EXPECT_LT((set.operators()[l] - ref[l]).cwiseAbs().maxCoeff(), 1e-14) << kappa << " l=" << l;
    }
  }
}

TEST(KrausSet, FullSetIsComplete) {
  for (int n_max : {1, 4, 10, 20}) {
    for (double kappa : {0.01, 0.16, 0.5, 0.99}) {
      const KrausSet set(kappa, n_max, FockCutoff(n_max));
      EXPECT_LT(set.completeness_deficiency(), 1e-10) << n_max << " " << kappa;
      for (int n = 0; n <= n_max; ++n) EXPECT_NEAR(set.retained(n), 1.0, 1e-12);
    }
  }
}

TEST(KrausSet, TruncatedDeficiencyIsBinomialTail) {
  const double kappa = 0.3;
  const int n_max = 6;
  const KrausSet set(kappa, 2, FockCutoff(n_max));
  EXPECT_EQ(set.l_max(), 2);
  for (int n = 0; n <= n_max; ++n) {
    double tail = 0.0;
    for (int l = 3; l <= n; ++l) {
      tail += std::exp(std::lgamma(n + 1.0) - std::lgamma(l + 1.0) - std::lgamma(n - l + 1.0)) *
              std::pow(kappa, l) * std::pow(1.0 - kappa, n - l);
    }
    EXPECT_NEAR(1.0 - set.retained(n), tail, 1e-14) << n;
  }
  EXPECT_GT(set.completeness_deficiency(), 0.0);
}

TEST(KrausSet, LmaxClampedToCutoff) {
  const KrausSet set(0.4, 50, FockCutoff(3));
  EXPECT_EQ(set.l_max(), 3);
  EXPECT_THROW(KrausSet(1.5, 2, FockCutoff(3)), std::invalid_argument);
  EXPECT_THROW(KrausSet(-0.1, 2, FockCutoff(3)), std::invalid_argument);
}

TEST(Channel, SinglePhotonDamping) {
  const KrausSet set(0.2, 1, FockCutoff(3));
  CMatrix rho = CMatrix::Zero(4, 4);
  rho(1, 1) = 1.0;
  const CMatrix out = apply_channel(rho, 0, 1, set);
  EXPECT_NEAR(out(1, 1).real(), 0.8, 1e-15);
  EXPECT_NEAR(out(0, 0).real(), 0.2, 1e-15);
  EXPECT_NEAR(out.cwiseAbs().sum(), 1.0, 1e-15);
}

TEST(Channel, CoherentStateStaysCoherent) {
  const int n_max = 10;
  const double kappa = 0.35;
  const Complex alpha(0.9, -0.4);
  const auto in = coherent_state(alpha, FockCutoff(n_max));
  const CMatrix rho = in.amplitudes * in.amplitudes.adjoint();
  const CMatrix out = apply_channel(rho, 0, 1, KrausSet(kappa, n_max, FockCutoff(n_max)));
  const auto target = coherent_state(alpha * std::sqrt(1.0 - kappa), FockCutoff(n_max));
  const double fidelity = (target.amplitudes.adjoint() * out * target.amplitudes)(0, 0).real();
  EXPECT_GT(fidelity, 1.0 - 1e-8);
}

TEST(Channel, EmbeddedMatchesOracleOnTwoModes) {
  const int n_max = 3;
  const double kappa = 0.25;
  auto s = product_state(CoherentInput{{Complex(0.7, 0.2), Complex(-0.3, 0.5)}}, FockCutoff(n_max));
  const CMatrix rho = s.amplitudes() * s.amplitudes().adjoint();
  for (int mode : {0, 1}) {
    const CMatrix mine = apply_channel(rho, mode, 2, KrausSet(kappa, n_max, FockCutoff(n_max)));
    const oracle::Mat ref = oracle::apply_damping(rho, kappa, mode, 2, n_max);
    EXPECT_LT((mine - ref).cwiseAbs().maxCoeff(), 1e-14);
  }
}

TEST(Decibels, Conversions) {
  EXPECT_EQ(db_to_eta(0.0), 1.0);
  EXPECT_EQ(db_to_kappa(0.0), 0.0);
  EXPECT_NEAR(db_to_eta(0.97), std::pow(10.0, -0.097), 1e-15);
  EXPECT_NEAR(db_to_eta(0.97), 0.800, 5e-4);
  EXPECT_NEAR(db_to_eta(2.90), std::pow(10.0, -0.290), 1e-15);
  EXPECT_NEAR(db_to_eta(2.90), 0.513, 5e-4);
  EXPECT_THROW(db_to_eta(-1.0), std::invalid_argument);
}

TEST(LossRate, KappaFromRate) {
  EXPECT_EQ(kappa_from_rate(0.0, 8.0), 0.0);
  EXPECT_NEAR(kappa_from_rate(0.02, 200.0 / 25.0), 0.16, 1e-15);
  EXPECT_THROW(kappa_from_rate(0.02, 60.0), ContractViolation);
}

}  // namespace
}  // namespace polariq
