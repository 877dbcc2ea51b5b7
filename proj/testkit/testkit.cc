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

#include "testkit.h"

#include <algorithm>
#include <cmath>
#include <random>

#include "fairlab/curves.h"
#include "fairlab/stats.h"

namespace fairlab::testkit {
namespace {

std::vector<double> random_simplex(std::mt19937_64& rng, int n, double floor) {
  std::uniform_real_distribution<double> u(floor, 1.0);
  std::vector<double> v(n);
  double s = 0.0;
  for (double& x : v) s += (x = u(rng));
  for (double& x : v) x /= s;
  return v;
}

// Rejects games whose equilibria sit close to a tie: near-equal likelihoods,
// intersections that nearly touch, or intersections crowding each other.
bool generic(const GameSpec& game, const RandomGameConfig& config) {
  const ValidationReport report = validate_game(game);
  if (!report.ok()) return false;
  const LikelihoodStructure ls = likelihood_structure(game);
  if (ls.n() < 2) return false;
  for (int m = 0; m < ls.n(); ++m) {
    if (std::abs(ls.values[m] - 1.0) < config.likelihood_margin) return false;
    if (m > 0 && ls.values[m] < ls.values[m - 1] * (1.0 + config.likelihood_margin)) {
      return false;
    }
  }
  const WWCurve ww = ww_curve(game, ls);
  const EECorrespondence ee = ee_correspondence(game, ls);
  double c_max = 0.0;
  for (double v : ww.ww) c_max = std::max(c_max, v);
  if (c_max < 0.02) return false;
  const double margin = config.separation * c_max;
  // WW at a breakpoint must not sit on an end of the EE interval there.
  for (int m = 1; m <= ls.n(); ++m) {
    const double e = ee.thresholds[m - 1];
    if (std::abs(ww.ww[m] - e) < margin) return false;
    if (std::abs(ww.ww[m - 1] - e) < margin) return false;
  }
  const auto points = intersections(ww, ee);
  for (size_t a = 0; a < points.size(); ++a) {
    if (points[a].degenerate) return false;
    for (size_t b = a + 1; b < points.size(); ++b) {
      if (std::abs(points[a].c - points[b].c) < margin) return false;
    }
  }
  return !points.empty();
}

}  // namespace

GameSpec random_game(const RandomGameConfig& config, uint64_t seed) {
  std::mt19937_64 rng(seed * 0x9E3779B97F4A7C15ULL + 0x2545F4914F6CDD1DULL);
  if (config.single_class_cell) {
    // One class cell makes every likelihood ratio one.
    throw GenerationError("random_game: a single class cell violates the likelihood condition");
  }
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  auto uniform = [&](double lo, double hi) { return lo + (hi - lo) * unit(rng); };
  auto integer = [&](int lo, int hi) {
    return lo + static_cast<int>(std::floor(unit(rng) * (hi - lo + 1)));
  };
  for (int attempt = 0; attempt < config.max_attempts; ++attempt) {
    const int num_axes = integer(1, config.max_axes);
    std::vector<Axis> axes;
    for (int a = 0; a < num_axes; ++a) {
      Axis ax{"a" + std::to_string(a), {}};
      const int labels = integer(config.min_labels, config.max_labels);
      for (int k = 0; k < labels; ++k) ax.labels.push_back("v" + std::to_string(k));
      axes.push_back(std::move(ax));
    }
    GameSpec game;
    game.features = FeatureSpace(std::move(axes));
    std::vector<int> class_axes;
    for (int a = 0; a < num_axes; ++a) {
      if (unit(rng) < 0.6) class_axes.push_back(a);
    }
    if (class_axes.empty()) class_axes.push_back(integer(0, num_axes - 1));
    game.law.class_axes = class_axes;
    const int ny = game.features.num_cells(class_axes);
    const int nr = game.features.num_cells(game.features.complement(class_axes));
    game.law.p_class[0] = random_simplex(rng, ny, config.min_probability);
    game.law.p_class[1] = random_simplex(rng, ny, config.min_probability);
    for (Group i : kGroups) {
      game.law.p_proxy[idx(i)].clear();
      for (int y = 0; y < ny; ++y) {
        game.law.p_proxy[idx(i)].push_back(random_simplex(rng, nr, config.min_probability));
      }
    }
    game.lambda_w = uniform(0.3, 0.7);
    game.v_q = uniform(0.5, 2.0);
    game.v_u = uniform(0.5, 2.0);
    game.omega = uniform(0.5, 2.0);
    if (unit(rng) < 0.5) {
      game.costs = LogisticCost<double>{uniform(-0.1, 0.3), uniform(0.05, 0.3)};
    } else {
      const double c0 = uniform(-0.2, 0.1);
      const double g0 = uniform(0.05, 0.3);
      const double c1 = c0 + uniform(0.2, 0.8);
      const double g1 = uniform(std::min(0.9, g0 + 0.3), 0.95);
      const double slope = (g1 - g0) / (c1 - c0);
      game.costs = PiecewiseLinearCost<double>{{{c0, g0}, {c1, g1}}, slope / g0,
                                               slope / (1.0 - g1)};
    }
    if (generic(game, config)) return game;
  }
  throw GenerationError("random_game: rejection budget exhausted for seed " +
                        std::to_string(seed));
}

OracleResult oracle_equilibria(const GameSpec& game, int grid) {
  if (grid < 100) throw std::invalid_argument("oracle_equilibria: grid must be at least 100");
  const int n = game.features.num_cells();
  // Largest incentive any policy can create; the same for both groups.
  double c_max = 0.0;
  std::array<std::vector<double>, 2> diff;
  std::vector<double> pq(n), pu(n);
  for (Group i : kGroups) {
    diff[idx(i)].resize(n);
    for (int x = 0; x < n; ++x) {
      diff[idx(i)][x] = game.p(i, ClassLabel::kQualified, x) - game.p(i, ClassLabel::kUnqualified, x);
    }
  }
  for (int x = 0; x < n; ++x) {
    pq[x] = game.p_class(ClassLabel::kQualified, x);
    pu[x] = game.p_class(ClassLabel::kUnqualified, x);
    c_max += std::max(0.0, diff[0][x]);
  }
  c_max *= game.omega;
  OracleResult out;
  out.bound = c_max * (1.0 + 1e-3) + 1e-6;
  out.step = 2.0 * out.bound / grid;

  auto phi = [&](Group i, double c) {
    const double g = cost_cdf(game.costs, c);
    double inc = 0.0;
    for (int x = 0; x < n; ++x) {
      const double f = g * pq[x] / (g * pq[x] + (1.0 - g) * pu[x]);
      if (f * game.v_q - (1.0 - f) * game.v_u >= 0.0) inc += diff[idx(i)][x];
    }
    return game.omega * inc - c;
  };

  std::array<std::vector<double>, 2> roots;
  for (Group i : kGroups) {
    int last_sign = 0;
    double last_c = 0.0;
    bool in_zero = false;
    double zero_start = 0.0;
    for (int k = 0; k <= grid; ++k) {
      const double c = -out.bound + k * out.step;
      const double v = phi(i, c);
      const int s = v > 0.0 ? 1 : (v < 0.0 ? -1 : 0);
      if (s == 0) {
        if (!in_zero) zero_start = c;
        in_zero = true;
      } else {
        if (in_zero) {
          roots[idx(i)].push_back(0.5 * (zero_start + last_c));
          in_zero = false;
        } else if (last_sign != 0 && s != last_sign) {
          roots[idx(i)].push_back(0.5 * (c + last_c));
        }
        last_sign = s;
      }
      last_c = c;
    }
    if (in_zero) roots[idx(i)].push_back(0.5 * (zero_start + last_c));
  }
  for (double cw : roots[0]) {
    for (double cb : roots[1]) out.clusters.push_back({cw, cb});
  }
  return out;
}

std::vector<GoldenCell> family_limit_tables() {
  return {
      {Group::kW, "(H+,W)", Rational(1, 8), Rational(2, 3)},
      {Group::kW, "(H-,W)", Rational(1, 8), Rational(2, 3)},
      {Group::kW, "(L,W)", Rational(1, 4), Rational(1, 3)},
      {Group::kB, "(H+,B)", Rational(7, 72), Rational(2, 7)},
      {Group::kB, "(H-,B)", Rational(7, 72), Rational(2, 7)},
      {Group::kB, "(L,B)", Rational(22, 72), Rational(1, 11)},
  };
}

}  // namespace fairlab::testkit
