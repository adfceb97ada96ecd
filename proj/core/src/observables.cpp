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

#include "polariq/observables.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace polariq {
namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// Sums over Fock populations in blocks of d consecutive entries, which share
// every occupation except the last mode's.
template <class Population>
RawMoments moments_from_populations(const FockIndexer& indexer, Population pop) {
  const int L = indexer.num_modes();
  const int d = indexer.cutoff().local_dim();
  const int last = L - 1;
  const std::size_t blocks = indexer.dimension() / static_cast<std::size_t>(d);
  RawMoments out{RVector::Zero(L), RMatrix::Zero(L, L)};
  std::vector<int> occ(static_cast<std::size_t>(L), 0);
  double total = 0.0;
  for (std::size_t b = 0; b < blocks; ++b) {
    double s0 = 0.0;
    double s1 = 0.0;
    double s2 = 0.0;
    const std::size_t base = b * static_cast<std::size_t>(d);
    for (int k = 0; k < d; ++k) {
      const double p = pop(base + static_cast<std::size_t>(k));
      s0 += p;
      s1 += p * k;
      s2 += p * k * (k - 1);
    }
    total += s0;
    if (s0 != 0.0) {
      for (int l = 0; l < last; ++l) {
        const int ol = occ[static_cast<std::size_t>(l)];
        if (ol == 0) continue;
        out.n[l] += s0 * ol;
        out.nn(l, l) += s0 * ol * (ol - 1);
        for (int m = l + 1; m < last; ++m) out.nn(l, m) += s0 * ol * occ[static_cast<std::size_t>(m)];
        out.nn(l, last) += s1 * ol;
      }
      out.n[last] += s1;
      out.nn(last, last) += s2;
    }
    for (int l = last - 1; l >= 0; --l) {
      if (++occ[static_cast<std::size_t>(l)] < d) break;
      occ[static_cast<std::size_t>(l)] = 0;
    }
  }
  if (!(total > 0.0)) throw std::domain_error("moments of a zero state are undefined");
  out.n /= total;
  out.nn /= total;
  for (int l = 0; l < L; ++l) {
    for (int m = l + 1; m < L; ++m) out.nn(m, l) = out.nn(l, m);
  }
  return out;
}

std::optional<double> ratio(const RawMoments& mom, int l, int m, double floor) {
  const double denom = mom.n[l] * mom.n[m];
  if (!(denom > floor)) return std::nullopt;
  return mom.nn(l, m) / denom;
}

void check_mode(int l, int num_modes) {
  if (l < 0 || l >= num_modes) throw std::out_of_range("mode index out of range");
}

}  // namespace

Eigen::Index RawMoments::flat_pair_index(int num_modes, int l, int m) {
  if (l > m) std::swap(l, m);
  // Rows 0..l-1 of the upper triangle hold sum_{r<l} (L - r) entries.
  return num_modes + l * num_modes - l * (l - 1) / 2 + (m - l);
}

RVector RawMoments::flatten() const {
  const int L = num_modes();
  RVector flat(flat_size(L));
  flat.head(L) = n;
  for (int l = 0; l < L; ++l) {
    for (int m = l; m < L; ++m) flat[flat_pair_index(L, l, m)] = nn(l, m);
  }
  return flat;
}

RawMoments RawMoments::unflatten(const RVector& flat, int num_modes) {
  if (flat.size() != flat_size(num_modes)) throw std::invalid_argument("flat moment vector has wrong size");
  RawMoments out{flat.head(num_modes), RMatrix::Zero(num_modes, num_modes)};
  for (int l = 0; l < num_modes; ++l) {
    for (int m = l; m < num_modes; ++m) {
      out.nn(l, m) = out.nn(m, l) = flat[flat_pair_index(num_modes, l, m)];
    }
  }
  return out;
}

RawMoments raw_moments(const MultiModeState& state) {
  const Complex* a = state.amplitudes().data();
  return moments_from_populations(state.indexer(), [a](std::size_t i) { return std::norm(a[i]); });
}

RawMoments raw_moments(const DensityMatrix& rho) {
  const FockIndexer indexer(rho.num_modes, rho.cutoff);
  if (static_cast<std::size_t>(rho.rho.rows()) != indexer.dimension()) {
    throw std::invalid_argument("density matrix dimension mismatch");
  }
  return moments_from_populations(indexer, [&rho](std::size_t i) {
    return rho.rho(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)).real();
  });
}

double intensity(const MultiModeState& state, int l) {
  check_mode(l, state.num_modes());
  return raw_moments(state).n[l];
}

double intensity(const DensityMatrix& rho, int l) {
  check_mode(l, rho.num_modes);
  return raw_moments(rho).n[l];
}

std::optional<double> g2_entry(const MultiModeState& state, int l, int m, double floor) {
  check_mode(l, state.num_modes());
  check_mode(m, state.num_modes());
  return ratio(raw_moments(state), l, m, floor);
}

std::optional<double> g2_entry(const DensityMatrix& rho, int l, int m, double floor) {
  check_mode(l, rho.num_modes);
  check_mode(m, rho.num_modes);
  return ratio(raw_moments(rho), l, m, floor);
}

std::string to_string(EnsembleKind kind) {
  switch (kind) {
    case EnsembleKind::Exact:
      return "exact";
    case EnsembleKind::Sampling:
      return "sampling";
    case EnsembleKind::BranchEnumeration:
      return "branch_enum";
  }
  return "unknown";
}

EnsembleResult EnsembleResult::exact(const RawMoments& moments, int cutoff) {
  EnsembleResult out;
  out.kind = EnsembleKind::Exact;
  out.num_modes = moments.num_modes();
  out.cutoff = cutoff;
  out.mean = moments.flatten();
  return out;
}

std::optional<double> ObservableReport::g2_at(int l, int m) const {
  const double v = g2(l, m);
  if (std::isnan(v)) return std::nullopt;
  return v;
}

ObservableReport report(const EnsembleResult& ens, const ReportOptions& options) {
  const int L = ens.num_modes;
  const RawMoments mom = RawMoments::unflatten(ens.mean, L);
  ObservableReport rep;
  rep.num_modes = L;
  rep.kind = ens.kind;
  rep.cutoff = ens.cutoff;
  rep.count = ens.count;
  rep.pruned_weight = ens.pruned_weight;
  rep.intensity_floor = options.intensity_floor;
  rep.seed = ens.seed;
  rep.intensities = mom.n.cwiseMax(0.0);
  rep.g2 = RMatrix::Constant(L, L, kNaN);
  rep.se_n = RVector::Constant(L, kNaN);
  rep.se_g2 = RMatrix::Constant(L, L, kNaN);
  for (int l = 0; l < L; ++l) {
    for (int m = l; m < L; ++m) {
      if (auto g = ratio(mom, l, m, options.intensity_floor)) {
        rep.g2(l, m) = rep.g2(m, l) = std::max(0.0, *g);
      } else {
        rep.suppressed.emplace_back(l, m);
      }
    }
  }
  if (ens.kind != EnsembleKind::Sampling || ens.samples.rows() < 2) return rep;

  const RMatrix& x = ens.samples;
  const auto T = static_cast<double>(x.rows());
  const RMatrix centered = x.rowwise() - x.colwise().mean();
  for (int l = 0; l < L; ++l) rep.se_n[l] = std::sqrt(centered.col(l).squaredNorm() / (T - 1.0) / T);

  for (int l = 0; l < L; ++l) {
    for (int m = l; m < L; ++m) {
      if (std::isnan(rep.g2(l, m))) continue;
      const Eigen::Index p = RawMoments::flat_pair_index(L, l, m);
      double se = 0.0;
      if (options.jackknife) {
        const RVector sums = x.colwise().sum();
        double acc = 0.0;
        for (Eigen::Index i = 0; i < x.rows(); ++i) {
          const double xp = (sums[p] - x(i, p)) / (T - 1.0);
          const double yl = (sums[l] - x(i, l)) / (T - 1.0);
          const double ym = (sums[m] - x(i, m)) / (T - 1.0);
          const double dg = xp / (yl * ym) - rep.g2(l, m);
          acc += dg * dg;
        }
        se = std::sqrt((T - 1.0) / T * acc);
      } else {
        // Delta method on X / (Y Z) with the sampled covariance of the means.
        const double X = mom.nn(l, m);
        const double Y = mom.n[l];
        const double Z = mom.n[m];
        RVector grad;
        std::vector<Eigen::Index> cols;
        if (l == m) {
          grad.resize(2);
          grad << 1.0 / (Y * Y), -2.0 * X / (Y * Y * Y);
          cols = {p, l};
        } else {
          grad.resize(3);
          grad << 1.0 / (Y * Z), -X / (Y * Y * Z), -X / (Y * Z * Z);
          cols = {p, l, m};
        }
        RVector proj = RVector::Zero(x.rows());
        for (std::size_t c = 0; c < cols.size(); ++c) proj += grad[static_cast<Eigen::Index>(c)] * centered.col(cols[c]);
        se = std::sqrt(proj.squaredNorm() / (T - 1.0) / T);
      }
      rep.se_g2(l, m) = rep.se_g2(m, l) = se;
    }
  }
  return rep;
}

}  // namespace polariq
