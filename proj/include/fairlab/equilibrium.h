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

// Applicant best responses, controlled equilibria and their certificates, and
// the two checks that make up an ideal control.

#ifndef FAIRLAB_EQUILIBRIUM_H_
#define FAIRLAB_EQUILIBRIUM_H_

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "fairlab/controls.h"
#include "fairlab/curves.h"
#include "fairlab/model.h"
#include "fairlab/stats.h"

namespace fairlab {

// c(i) = omega * sum_x d(i,x) (p(x|i,q) - p(x|i,u)).
CostThresholdPair applicant_best_response(const GameSpec& game, const FeatureTable& d);

// omega * sum_x (mu_RE(i,x) / lambda_i) d(i,x) - integral of c g(c) up to cbar_i.
double applicant_utility(const GameSpec& game, Group i, double cbar_i, const FeatureTable& d);

inline constexpr double kCertificateTol = 1e-7;

struct EquilibriumCertificate {
  double best_response_residual = 0.0;  // |cbar - applicant best response|_inf
  double utility_gap = 0.0;             // optimum minus U_F(d), floored at 0
  double feasibility_residual = 0.0;
  double firm_residual = 0.0;           // utility gap plus feasibility
  double distance = 0.0;                // l2 distance of (mu, f) to the calibrated pair
  double eps = 0.0;
  bool accepted = false;
};

EquilibriumCertificate verify_controlled_equilibrium(const GameSpec& game, const ControlSpec& k,
                                                     const CostThresholdPair& cbar,
                                                     const FeatureTable& d,
                                                     double tol = kCertificateTol);

EquilibriumCertificate verify_epsilon_equilibrium(const GameSpec& game, const ControlSpec& k,
                                                  const CostThresholdPair& cbar,
                                                  const FeatureTable& d, const FeatureTable& mu,
                                                  const FeatureTable& f, double eps,
                                                  double tol = kCertificateTol);

struct ControlledEquilibriumRecord {
  ControlSpec control;
  CostThresholdPair cbar{0.0, 0.0};
  FeatureTable policy;
  FeatureTable mu;
  FeatureTable f;
  std::array<std::optional<double>, 2> mixtures;
  std::array<std::optional<int>, 2> intersection;
  bool non_discriminatory = false;
  bool uncontrolled_equilibrium = false;
  std::array<GroupRates, 2> rates{};
  std::string key;
  EquilibriumCertificate certificate;
  std::string source;  // intersection, lattice or simplicial
};

struct ControlledSearchOptions {
  int grid = 200;           // safety-net resolution per axis
  bool safety_net = true;
  double tol = kCertificateTol;
  double dedup = 1e-6;      // records closer than this in cbar are merged
  int max_depth = 44;       // simplex refinement levels
  int node_budget = 4000;   // refinement nodes per coarse simplex
};

struct ControlledSearchResult {
  std::vector<ControlledEquilibriumRecord> records;  // sorted by key
  // Refinements that converged to a point no candidate policy certified.
  std::vector<std::string> unresolved;
  double c_max = 0.0;
  bool degenerate = false;
  long evaluations = 0;
};

// All cbar with cbar = applicant best response to some optimizer of k at the
// calibrated (mu, f) given cbar. Throws std::invalid_argument on invalid games;
// degenerate ones return an empty, flagged result.
ControlledSearchResult controlled_equilibria(const GameSpec& game, const ControlSpec& k,
                                             const ControlledSearchOptions& options = {});

// Equivalence key: "EqK" per group when the group's policy is the mixture of
// an intersection at that group's threshold, "c=<value>" otherwise.
std::string controlled_key(const GameSpec& game, const CostThresholdPair& cbar,
                           const FeatureTable& d);

enum class Verdict { kPass, kFail, kIndeterminate };
std::string verdict_name(Verdict v);

struct RateInterval {
  double lo = 0.0;
  double hi = 0.0;
};

struct GainsVerdict {
  std::string key;
  Verdict verdict = Verdict::kIndeterminate;
  RateInterval before;                 // under the equilibrium policy
  RateInterval face_hull;              // extremes over the whole optimizer face
  std::vector<RateInterval> samples;   // face vertices found, then their midpoint
  bool weakly_nested = false;
};

GainsVerdict gains_check(const GameSpec& game, const ControlSpec& k, const EquilibriumRecord& eq);

struct IdealCheckReport {
  ControlSpec control;
  std::vector<GainsVerdict> property1;
  Verdict property1_verdict = Verdict::kPass;
  std::vector<std::string> controlled_keys;
  std::vector<std::string> nondiscriminatory_keys;
  std::vector<std::string> extra;    // controlled but not non-discriminatory
  std::vector<std::string> missing;  // non-discriminatory but not controlled
  bool property2 = false;
  // Every non-discriminatory class contains a controlled equilibrium.
  bool property2_relaxed = false;
  ControlledSearchResult search;
};

IdealCheckReport ideal_check(const GameSpec& game, const ControlSpec& k,
                             const ControlledSearchOptions& options = {});

}  // namespace fairlab

#endif  // FAIRLAB_EQUILIBRIUM_H_
