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

// Shared test infrastructure: seeded random games, a grid-scan equilibrium
// oracle that shares no code with the curve construction, and golden tables.

#ifndef FAIRLAB_TESTKIT_H_
#define FAIRLAB_TESTKIT_H_

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "fairlab/model.h"
#include "fairlab/rational.h"

namespace fairlab::testkit {

struct RandomGameConfig {
  int max_axes = 3;
  int max_labels = 3;
  int min_labels = 2;
  double min_probability = 0.05;  // before normalization, per entry weight floor
  // Likelihood values stay this far (relative) from one and from each other.
  double likelihood_margin = 1e-2;
  // Intersections stay this far apart, relative to c_max, in c and in l.
  double separation = 2e-2;
  int max_attempts = 2000;
  // Forces a single cell over the class axes (always rejected).
  bool single_class_cell = false;
};

class GenerationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Deterministic in (config, seed); every result passes validate_game.
GameSpec random_game(const RandomGameConfig& config, uint64_t seed);
inline GameSpec random_game(uint64_t seed) { return random_game(RandomGameConfig{}, seed); }

struct OracleCluster {
  double c_w = 0.0;
  double c_b = 0.0;
};

struct OracleResult {
  std::vector<OracleCluster> clusters;
  double step = 0.0;  // grid spacing
  double bound = 0.0;
};

// Scans phi_i(c) = incentive_i(best response at c) - c for each group on a
// grid over [-c_max, c_max] (padded slightly). The firm's unconstrained best
// response at cbar(i) uses only group i's beliefs, so the equilibria are the
// products of the per-group sign changes. Throws std::invalid_argument for
// grid < 100.
OracleResult oracle_equilibria(const GameSpec& game, int grid);

struct GoldenCell {
  Group group;
  std::string cell;
  Rational mu;
  Rational f;
};

// The six (mu, f) cells of the gamma = delta = 0 family at cbar = (1/3, 0).
std::vector<GoldenCell> family_limit_tables();

inline constexpr int kFamilyIntersections = 5;

}  // namespace fairlab::testkit

#endif  // FAIRLAB_TESTKIT_H_
