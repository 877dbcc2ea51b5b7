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

// The worker best-response curve WW, the employer indifference correspondence
// EE, their intersections and the uncontrolled equilibria built from them.

#ifndef FAIRLAB_CURVES_H_
#define FAIRLAB_CURVES_H_

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "fairlab/model.h"
#include "fairlab/stats.h"

namespace fairlab {

struct WWCurve {
  // Breakpoints l_0 = 0, l_1, ..., l_n and WW there.
  std::vector<double> l;
  std::vector<double> ww;
};

WWCurve ww_curve(const GameSpec& game, const LikelihoodStructure& ls);
WWCurve ww_curve(const GameSpec& game);
// Throws std::out_of_range outside [0, l_n].
double ww_eval(const WWCurve& curve, double l);
bool ww_single_peaked(const WWCurve& curve);

struct EECorrespondence {
  std::vector<double> l;           // l_1..l_n
  std::vector<double> thresholds;  // EE_bar(l_1) > ... > EE_bar(l_n)
};

struct Interval {
  double lo;
  double hi;
  bool contains(double c, double tol = 0.0) const { return c >= lo - tol && c <= hi + tol; }
};

EECorrespondence ee_correspondence(const GameSpec& game, const LikelihoodStructure& ls);
EECorrespondence ee_correspondence(const GameSpec& game);
// Half-lines use +-infinity. Throws std::out_of_range outside [0, l_n].
Interval ee_set(const EECorrespondence& corr, double l);

// Plot segments of the EE graph; unbounded ends are clipped to [c_lo, c_hi].
struct Segment {
  double l0, c0, l1, c1;
};
std::vector<Segment> ee_segments(const EECorrespondence& corr, double c_lo, double c_hi);

enum class IntersectionKind { kOrigin, kSegment, kBreakpoint, kEnd };

struct Intersection {
  double l;
  double c;
  IntersectionKind kind;
  int m;  // breakpoint index, or the right end of the open segment
  // WW touches an end of an EE interval; the crossing is not transversal.
  bool degenerate = false;
};

std::vector<Intersection> intersections(const GameSpec& game);
std::vector<Intersection> intersections(const WWCurve& ww, const EECorrespondence& ee);
std::string intersection_label(int index);  // "Eq1", ...

struct LikelihoodMixture {
  double l = 0.0;
  int ceil_index = 1;  // m with l_m = ceil(l)
  double ceil = 0.0;
  double sub_ceil = 0.0;
  double weight = 1.0;
};

// Throws std::out_of_range outside [0, l_n].
LikelihoodMixture make_mixture(const LikelihoodStructure& ls, double l);
// d(i | l_m) for m = 1..n.
std::vector<double> mixture_levels(const LikelihoodStructure& ls, double l);
// Inverse of mixture_levels; nullopt when the levels are not of threshold form.
std::optional<double> mixture_of_levels(const LikelihoodStructure& ls,
                                        const std::vector<double>& levels,
                                        double tol = 1e-9);

// Canonical representative: constant within each likelihood class.
FeatureTable policy_for_mixture(const GameSpec& game, const LikelihoodStructure& ls,
                                double l_w, double l_b);
FeatureTable fair_policy(const GameSpec& game, const LikelihoodStructure& ls, double l);

// Shared mixture when both within-group policies follow the same pattern.
std::optional<double> fair_mixture(const GameSpec& game, const LikelihoodStructure& ls,
                                   const FeatureTable& d, double tol = 1e-9);

struct EquilibriumRecord {
  CostThresholdPair cbar{0.0, 0.0};
  FeatureTable policy;
  std::array<double, 2> mixtures{0.0, 0.0};
  std::array<int, 2> intersection{0, 0};
  bool non_discriminatory = false;
  std::array<GroupRates, 2> rates{};
  std::string key;
};

std::string equivalence_key(const std::string& w_part, const std::string& b_part);

// Throws std::invalid_argument unless the game is valid and non-degenerate.
std::vector<EquilibriumRecord> enumerate_equilibria(const GameSpec& game);

struct EquilibriumClassification {
  bool equal_thresholds;
  bool fair;
  bool equal_acceptance;
  bool non_discriminatory;
};

// Throws InvariantViolation if the three conditions disagree.
EquilibriumClassification classify_equilibrium(const GameSpec& game, const EquilibriumRecord& record);

}  // namespace fairlab

#endif  // FAIRLAB_CURVES_H_
