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

// Example-game constructors: the (gamma, delta) family over {L,H-,H+} x {W,B},
// the game rebuilt from color-blind data, and the witness pair showing that no
// control of (X, mu_cb, f_cb) alone separates both games.

#ifndef FAIRLAB_GAMEGEN_H_
#define FAIRLAB_GAMEGEN_H_

#include <string>
#include <vector>

#include "fairlab/equilibrium.h"
#include "fairlab/model.h"
#include "fairlab/rational.h"
#include "fairlab/stats.h"

namespace fairlab {

struct FamilyParams {
  Rational gamma;
  Rational delta;
  // Permits gamma = 0 and delta = 0; the resulting law is degenerate.
  bool limit = false;

  static FamilyParams of(double gamma, double delta, bool limit = false) {
    return {rational_from_double(gamma), rational_from_double(delta), limit};
  }
};

// Throws std::invalid_argument outside gamma in (0, 1/6), delta in (0, 1).
ExactGameSpec cl_family_exact(const FamilyParams& params);
GameSpec cl_family(const FamilyParams& params);
GameSpec cl_family(double gamma, double delta);

// The policy accepting (H-,W) and (H+,W) for both groups, and the threshold
// pair it induces: ((1 - delta)/3, delta/3).
FeatureTable family_policy();
ColorBlindTable family_colorblind_policy();
ExactThresholdPair family_threshold_exact(const FamilyParams& params);
CostThresholdPair family_threshold(const FamilyParams& params);

// Sign pattern that makes the family policy the color-blind optimum at the
// family threshold: f_cb > 1/2 exactly on (H-,W) and (H+,W).
struct FamilySignCheck {
  bool ok = false;
  std::vector<double> f_cb;
  std::string detail;
};
FamilySignCheck family_sign_conditions(const FamilyParams& params);

struct ReverseGameInput {
  FeatureSpace features;
  ColorBlindTable d_cb;
  ColorBlindTable mu_cb;
  ColorBlindTable f_cb;
  double threshold = 0.5;
};

struct ReverseGameCertificate {
  double roundtrip_residual = 0.0;  // |aggregate stats - (mu_cb, f_cb)|_inf
  EquilibriumCertificate equilibrium;
  bool non_discriminatory = false;
  bool ok = false;
};

struct ReverseGameResult {
  GameSpec game;
  CostThresholdPair cbar{0.0, 0.0};
  FeatureTable policy;  // d_cb applied to both groups
  double qualified_share = 0.0;
  ReverseGameCertificate certificate;
};

// Throws std::invalid_argument when the input breaks its invariants, when d_cb
// is not a threshold function of f_cb, or when some f_cb equals the qualified
// share (likelihood ratio one).
ReverseGameResult reverse_game(const ReverseGameInput& input);

struct ImpossibilityWitness {
  GameSpec game_a;
  GameSpec game_b;
  FeatureSpace features;
  ColorBlindTable d_cb;
  ColorBlindTable mu_cb;
  ColorBlindTable f_cb;
  CostThresholdPair cbar_a{0.0, 0.0};
  CostThresholdPair cbar_b{0.0, 0.0};
  EquilibriumCertificate certificate_a;  // color-blind controlled, in game A
  EquilibriumCertificate certificate_b;  // uncontrolled, in game B
  bool a_discriminatory = false;
  bool b_non_discriminatory = false;
  double shared_residual = 0.0;
  double roundtrip_residual = 0.0;
  std::vector<std::string> trace;
  bool ok = false;
};

// Throws std::invalid_argument when the sign conditions fail.
ImpossibilityWitness impossibility_witness(double gamma, double delta);

}  // namespace fairlab

#endif  // FAIRLAB_GAMEGEN_H_
