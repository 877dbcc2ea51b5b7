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

#ifndef FAIRLAB_STATS_H_
#define FAIRLAB_STATS_H_

#include <utility>
#include <vector>

#include "fairlab/model.h"

namespace fairlab {

enum class TableKind { kDistribution, kBelief, kPolicy };

// Real-valued map over I x X, stored group-major: values[idx(i) * n + x].
template <typename T>
struct BasicFeatureTable {
  TableKind kind = TableKind::kPolicy;
  int num_cells = 0;
  std::vector<T> values;

  static BasicFeatureTable filled(TableKind kind, int num_cells, const T& v) {
    return {kind, num_cells, std::vector<T>(2 * num_cells, v)};
  }
  T& operator()(Group i, int x) { return values[idx(i) * num_cells + x]; }
  const T& operator()(Group i, int x) const { return values[idx(i) * num_cells + x]; }
  int size() const { return 2 * num_cells; }
};

// Real-valued map over X.
template <typename T>
struct BasicColorBlindTable {
  TableKind kind = TableKind::kPolicy;
  std::vector<T> values;
};

using FeatureTable = BasicFeatureTable<double>;
using ColorBlindTable = BasicColorBlindTable<double>;
using ExactFeatureTable = BasicFeatureTable<Rational>;

// Throws InvariantViolation if the values break the rules of the table's kind
// (distributions positive and normalized, beliefs in (0,1), policies in [0,1]).
void check_table(const FeatureTable& t);
void check_table(const ColorBlindTable& t);

template <typename T>
BasicFeatureTable<T> mu_re(const BasicGameSpec<T>& game,
                           const BasicThresholdPair<T>& cbar) {
  const int n = game.features.num_cells();
  auto mu = BasicFeatureTable<T>::filled(TableKind::kDistribution, n, T(0));
  for (Group i : kGroups) {
    const T g = cost_cdf(game.costs, cbar[i]);
    for (int x = 0; x < n; ++x) {
      mu(i, x) = game.lambda(i) * (g * game.p(i, ClassLabel::kQualified, x) +
                                   (T(1) - g) * game.p(i, ClassLabel::kUnqualified, x));
    }
  }
  return mu;
}

// Calibrated beliefs, evaluated from p(x_Y | y) so that they are exactly
// constant across proxy coordinates.
template <typename T>
BasicFeatureTable<T> f_re(const BasicGameSpec<T>& game,
                          const BasicThresholdPair<T>& cbar) {
  const int n = game.features.num_cells();
  auto f = BasicFeatureTable<T>::filled(TableKind::kBelief, n, T(0));
  for (Group i : kGroups) {
    const T g = cost_cdf(game.costs, cbar[i]);
    for (int x = 0; x < n; ++x) {
      const T q = g * game.p_class(ClassLabel::kQualified, x);
      f(i, x) = q / (q + (T(1) - g) * game.p_class(ClassLabel::kUnqualified, x));
    }
  }
  return f;
}

// (mu_cb, f_cb). Throws std::invalid_argument on mismatched shapes or a zero
// aggregate mass.
template <typename T>
std::pair<BasicColorBlindTable<T>, BasicColorBlindTable<T>> colorblind_aggregate(
    const BasicFeatureTable<T>& mu, const BasicFeatureTable<T>& f) {
  if (mu.num_cells != f.num_cells || mu.size() != static_cast<int>(mu.values.size()) ||
      f.size() != static_cast<int>(f.values.size())) {
    throw std::invalid_argument("colorblind_aggregate: table shapes differ");
  }
  BasicColorBlindTable<T> mu_cb{TableKind::kDistribution, {}};
  BasicColorBlindTable<T> f_cb{TableKind::kBelief, {}};
  for (int x = 0; x < mu.num_cells; ++x) {
    const T m = mu(Group::kW, x) + mu(Group::kB, x);
    if (m == T(0)) throw std::invalid_argument("colorblind_aggregate: zero mass at a cell");
    mu_cb.values.push_back(m);
    f_cb.values.push_back((mu(Group::kW, x) * f(Group::kW, x) +
                           mu(Group::kB, x) * f(Group::kB, x)) / m);
  }
  return {std::move(mu_cb), std::move(f_cb)};
}

// Per-cell law lookups for repeated evaluation of the calibrated tables.
class CalibratedModel {
 public:
  explicit CalibratedModel(const GameSpec& game);

  const GameSpec& game() const { return *game_; }
  int num_cells() const { return n_; }
  // p(x | i, y).
  double p(Group i, ClassLabel y, int x) const {
    return y == ClassLabel::kQualified ? pq_[idx(i) * n_ + x] : pu_[idx(i) * n_ + x];
  }
  // p(x_Y | y).
  double p_class(ClassLabel y, int x) const {
    return y == ClassLabel::kQualified ? cq_[x] : cu_[x];
  }
  FeatureTable mu(const CostThresholdPair& cbar) const;
  FeatureTable f(const CostThresholdPair& cbar) const;

 private:
  const GameSpec* game_;
  int n_;
  std::vector<double> pq_, pu_, cq_, cu_;
};

struct LikelihoodStructure {
  // l_1 < ... < l_n; l_0 = 0 is implicit.
  std::vector<double> values;
  // Likelihood index (0-based into `values`) of each x_Y cell and of each x.
  std::vector<int> class_partition;
  std::vector<int> cell_class;
  std::vector<double> mass_q;
  std::vector<double> mass_u;

  int n() const { return static_cast<int>(values.size()); }
  // l_m for m = 0..n.
  double value(int m) const { return m == 0 ? 0.0 : values[m - 1]; }
};

// Throws std::invalid_argument if the law is malformed or a likelihood value
// lies within kLikelihoodTol of 1.
LikelihoodStructure likelihood_structure(const GameSpec& game);

// d(i | l_m) for m = 1..n (0-based). Throws InvariantViolation if the q- and
// u-weighted forms disagree beyond 1e-9.
std::vector<double> conditional_policy(const GameSpec& game,
                                       const LikelihoodStructure& ls,
                                       const FeatureTable& d, Group i);
std::vector<double> conditional_policy(const GameSpec& game, const FeatureTable& d,
                                       Group i);

double acceptance_rate(Group i, const FeatureTable& d, const FeatureTable& mu);
double true_positive_rate(Group i, const FeatureTable& d, const FeatureTable& mu,
                          const FeatureTable& f);
double false_positive_rate(Group i, const FeatureTable& d, const FeatureTable& mu,
                           const FeatureTable& f);

struct GroupRates {
  double acceptance = 0.0;
  double true_positive = 0.0;
  double false_positive = 0.0;
};
GroupRates group_rates(Group i, const FeatureTable& d, const FeatureTable& mu,
                       const FeatureTable& f);

}  // namespace fairlab

#endif  // FAIRLAB_STATS_H_
