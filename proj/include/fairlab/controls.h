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

// Fairness controls: feasible policy sets k(X, mu, f) and the firm's optimal
// policy within them. Policies are FeatureTables with values in [0,1]; an LP
// variable j corresponds to values[j] of such a table.

#ifndef FAIRLAB_CONTROLS_H_
#define FAIRLAB_CONTROLS_H_

#include <array>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "fairlab/lp.h"
#include "fairlab/model.h"
#include "fairlab/stats.h"

namespace fairlab {

enum class ControlKind {
  kUn,
  kColorBlind,
  kAffirmativeAction,
  kEqualOpportunity,
  kEqualOdds,
  kMistakenIdentity,
  kNoProxies,
};

struct ControlSpec {
  ControlKind kind = ControlKind::kUn;
  Group reference = Group::kW;  // mistaken identity only
  double tol = 1e-9;            // membership tolerance
  double proxy_tau = 0.0;       // no-proxies sensitivity tolerance

  static ControlSpec of(ControlKind kind, Group reference = Group::kW) {
    ControlSpec k;
    k.kind = kind;
    k.reference = reference;
    return k;
  }
  // un, cb, aa, eo, odds, mi:w, mi:b, noproxy.
  std::string name() const;
  // Rate-equalizing controls whose feasible sets move continuously with (mu, f).
  bool continuous() const;
};

// Throws std::invalid_argument on an unknown name.
ControlSpec parse_control(std::string_view text);

// Per-cell U_F weights mu (f v_q - (1 - f) v_u).
FeatureTable firm_coefficients(const FeatureTable& mu, const FeatureTable& f, double v_q,
                               double v_u);
double firm_utility(const FeatureTable& d, const FeatureTable& mu, const FeatureTable& f,
                    double v_q, double v_u);

struct FeatureExclusion {
  std::vector<int> kept;      // axes some belief varies over
  std::vector<int> excluded;  // the rest
};

// Axis j is kept iff some f(i, .) changes when only coordinate j changes by
// more than tau.
FeatureExclusion excluded_features(const FeatureTable& f, const FeatureSpace& X,
                                   double tau = 0.0);

struct FeasibilityResult {
  bool feasible = true;
  double residual = 0.0;
  std::string detail;
};

FeasibilityResult feasible(const ControlSpec& k, const FeatureSpace& X, const FeatureTable& mu,
                           const FeatureTable& f, const FeatureTable& d);

// k(X, mu, f) as a union of polytopes inside [0,1]^{|I x X|}; only mistaken
// identity needs more than one.
std::vector<LinearProgram> control_polytopes(const ControlSpec& k, const FeatureSpace& X,
                                             const FeatureTable& mu, const FeatureTable& f);

// The optimizer face {d in k : U_F(d) >= value - slack} as polytopes (pieces
// that miss the level are dropped). Objectives are zero.
std::vector<LinearProgram> optimizer_face(const ControlSpec& k, const FeatureSpace& X,
                                          const FeatureTable& mu, const FeatureTable& f,
                                          double v_q, double v_u, double value, double slack);

// Maximizes `secondary` over the optimizer face {U_F = value} of one polytope
// by perturbing the firm objective, so the answer is a vertex of the polytope
// rather than a point of a slackened face. Empty when the polytope never
// reaches `value`.
std::optional<FeatureTable> face_extreme(const LinearProgram& polytope, const FeatureTable& coef,
                                         const std::vector<double>& secondary, double value);

struct BestResponseResult {
  FeatureTable policy;
  double objective = 0.0;
  bool indifferent = false;
  std::vector<std::pair<Group, int>> indifferent_cells;
  std::vector<FeatureTable> face_vertices;
  bool face_truncated = false;
  std::array<GroupRates, 2> rates{};
  std::optional<double> shared_rate;
  std::optional<double> multiplier;
  std::array<std::optional<double>, 2> thresholds;  // belief cut-off per group
  std::string method;
};

BestResponseResult firm_best_response(const ControlSpec& k, const FeatureSpace& X,
                                      const FeatureTable& mu, const FeatureTable& f, double v_q,
                                      double v_u);

inline constexpr int kOracleMaxCells = 64;

// Independent solver. Throws std::invalid_argument when |I x X| > 64.
BestResponseResult lp_oracle(const ControlSpec& k, const FeatureSpace& X, const FeatureTable& mu,
                             const FeatureTable& f, double v_q, double v_u);

struct FairnessResult {
  bool fair = false;
  std::optional<double> mixture;
};

FairnessResult is_fair(const GameSpec& game, const FeatureTable& d, double tol = 1e-9);

}  // namespace fairlab

#endif  // FAIRLAB_CONTROLS_H_
