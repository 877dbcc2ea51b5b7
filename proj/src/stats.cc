// Copyright 2026 The Fairlab Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "fairlab/stats.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace fairlab {
namespace {

void check_values(TableKind kind, const std::vector<double>& v) {
  if (kind == TableKind::kDistribution) {
    double sum = 0.0;
    for (double x : v) {
      if (!(x > 0.0)) throw InvariantViolation("distribution table has a non-positive entry");
      sum += x;
    }
    if (std::abs(sum - 1.0) > kNormalizationTol) {
      throw InvariantViolation("distribution table does not sum to 1");
    }
  } else if (kind == TableKind::kBelief) {
    for (double x : v) {
      if (!(x > 0.0 && x < 1.0)) throw InvariantViolation("belief outside (0,1)");
    }
  } else {
    for (double x : v) {
      if (!(x >= 0.0 && x <= 1.0)) throw InvariantViolation("policy value outside [0,1]");
    }
  }
}

}  // namespace

void check_table(const FeatureTable& t) {
  if (static_cast<int>(t.values.size()) != 2 * t.num_cells) {
    throw InvariantViolation("feature table has the wrong size");
  }
  check_values(t.kind, t.values);
}

void check_table(const ColorBlindTable& t) { check_values(t.kind, t.values); }

CalibratedModel::CalibratedModel(const GameSpec& game)
    : game_(&game), n_(game.features.num_cells()) {
  pq_.resize(2 * n_);
  pu_.resize(2 * n_);
  cq_.resize(n_);
  cu_.resize(n_);
  const std::vector<int> rest = game.features.complement(game.law.class_axes);
  for (int x = 0; x < n_; ++x) {
    const int yc = game.features.project(x, game.law.class_axes);
    const int rc = game.features.project(x, rest);
    cq_[x] = game.law.p_class[0][yc];
    cu_[x] = game.law.p_class[1][yc];
    for (Group i : kGroups) {
      const double pr = game.law.p_proxy[idx(i)][yc][rc];
      pq_[idx(i) * n_ + x] = cq_[x] * pr;
      pu_[idx(i) * n_ + x] = cu_[x] * pr;
    }
  }
}

FeatureTable CalibratedModel::mu(const CostThresholdPair& cbar) const {
  auto mu = FeatureTable::filled(TableKind::kDistribution, n_, 0.0);
  for (Group i : kGroups) {
    const double g = cost_cdf(game_->costs, cbar[i]);
    const double lam = game_->lambda(i);
    for (int x = 0; x < n_; ++x) {
      mu(i, x) = lam * (g * pq_[idx(i) * n_ + x] + (1.0 - g) * pu_[idx(i) * n_ + x]);
    }
  }
  return mu;
}

FeatureTable CalibratedModel::f(const CostThresholdPair& cbar) const {
  auto f = FeatureTable::filled(TableKind::kBelief, n_, 0.0);
  for (Group i : kGroups) {
    const double g = cost_cdf(game_->costs, cbar[i]);
    for (int x = 0; x < n_; ++x) {
      const double q = g * cq_[x];
      f(i, x) = q / (q + (1.0 - g) * cu_[x]);
    }
  }
  return f;
}

LikelihoodStructure likelihood_structure(const GameSpec& game) {
  const auto& law = game.law;
  const int ny = game.features.num_cells(law.class_axes);
  if (static_cast<int>(law.p_class[0].size()) != ny ||
      static_cast<int>(law.p_class[1].size()) != ny) {
    throw std::invalid_argument("likelihood_structure: malformed class law");
  }
  std::vector<double> raw(ny);
  for (int c = 0; c < ny; ++c) {
    if (!(law.p_class[0][c] > 0.0) || !(law.p_class[1][c] > 0.0)) {
      throw std::invalid_argument("likelihood_structure: full-support violated");
    }
    raw[c] = law.p_class[0][c] / law.p_class[1][c];
  }
  std::vector<int> order(ny);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return raw[a] < raw[b]; });

  LikelihoodStructure ls;
  ls.class_partition.assign(ny, -1);
  double anchor = 0.0;
  for (int c : order) {
    if (ls.values.empty() || raw[c] - anchor > kLikelihoodTol * anchor) {
      anchor = raw[c];
      ls.values.push_back(raw[c]);
      ls.mass_q.push_back(0.0);
      ls.mass_u.push_back(0.0);
    }
    const int m = ls.n() - 1;
    ls.class_partition[c] = m;
    ls.mass_q[m] += law.p_class[0][c];
    ls.mass_u[m] += law.p_class[1][c];
  }
  // Merged values are represented by the ratio of their class masses.
  for (int m = 0; m < ls.n(); ++m) ls.values[m] = ls.mass_q[m] / ls.mass_u[m];
  for (double l : ls.values) {
    if (std::abs(l - 1.0) <= kLikelihoodTol) {
      throw std::invalid_argument("likelihood ratio one: 1 is a likelihood value");
    }
  }
  const int n = game.features.num_cells();
  ls.cell_class.resize(n);
  for (int x = 0; x < n; ++x) ls.cell_class[x] = ls.class_partition[game.class_cell(x)];
  return ls;
}

std::vector<double> conditional_policy(const GameSpec& game, const LikelihoodStructure& ls,
                                       const FeatureTable& d, Group i) {
  const int n = game.features.num_cells();
  std::vector<double> nq(ls.n(), 0.0), dq(ls.n(), 0.0), nu(ls.n(), 0.0), du(ls.n(), 0.0);
  for (int x = 0; x < n; ++x) {
    const int m = ls.cell_class[x];
    const double pq = game.p(i, ClassLabel::kQualified, x);
    const double pu = game.p(i, ClassLabel::kUnqualified, x);
    nq[m] += pq * d(i, x);
    dq[m] += pq;
    nu[m] += pu * d(i, x);
    du[m] += pu;
  }
  std::vector<double> out(ls.n());
  for (int m = 0; m < ls.n(); ++m) {
    out[m] = nq[m] / dq[m];
    if (std::abs(out[m] - nu[m] / du[m]) > 1e-9) {
      throw InvariantViolation("conditional policy depends on the class weighting at l_" +
                               std::to_string(m + 1));
    }
  }
  return out;
}

std::vector<double> conditional_policy(const GameSpec& game, const FeatureTable& d, Group i) {
  return conditional_policy(game, likelihood_structure(game), d, i);
}

double acceptance_rate(Group i, const FeatureTable& d, const FeatureTable& mu) {
  double num = 0.0, den = 0.0;
  for (int x = 0; x < mu.num_cells; ++x) {
    num += d(i, x) * mu(i, x);
    den += mu(i, x);
  }
  return num / den;
}

double true_positive_rate(Group i, const FeatureTable& d, const FeatureTable& mu,
                          const FeatureTable& f) {
  double num = 0.0, den = 0.0;
  for (int x = 0; x < mu.num_cells; ++x) {
    const double w = mu(i, x) * f(i, x);
    num += d(i, x) * w;
    den += w;
  }
  return num / den;
}

double false_positive_rate(Group i, const FeatureTable& d, const FeatureTable& mu,
                           const FeatureTable& f) {
  double num = 0.0, den = 0.0;
  for (int x = 0; x < mu.num_cells; ++x) {
    const double w = mu(i, x) * (1.0 - f(i, x));
    num += d(i, x) * w;
    den += w;
  }
  return num / den;
}

GroupRates group_rates(Group i, const FeatureTable& d, const FeatureTable& mu,
                       const FeatureTable& f) {
  return {acceptance_rate(i, d, mu), true_positive_rate(i, d, mu, f),
          false_positive_rate(i, d, mu, f)};
}

}  // namespace fairlab
