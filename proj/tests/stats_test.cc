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
#include <random>

#include <gtest/gtest.h>

#include "fairlab/gamegen.h"
#include "testkit.h"

namespace fairlab {
namespace {

int cell_index(const FeatureSpace& X, const std::string& name) {
  for (int x = 0; x < X.num_cells(); ++x) {
    if (X.cell_name(x) == name) return x;
  }
  return -1;
}

TEST(LimitTablesTest, ExactRationalPath) {
  const FamilyParams p{Rational(0), Rational(0), true};
  const ExactGameSpec g = cl_family_exact(p);
  const ExactThresholdPair cbar{Rational(1, 3), Rational(0)};
  const auto mu = mu_re(g, cbar);
  const auto f = f_re(g, cbar);
  for (const auto& cell : testkit::family_limit_tables()) {
    const int x = cell_index(g.features, cell.cell);
    ASSERT_GE(x, 0) << cell.cell;
    EXPECT_EQ(mu(cell.group, x), cell.mu) << cell.cell;
    EXPECT_EQ(f(cell.group, x), cell.f) << cell.cell;
  }
}

TEST(LimitTablesTest, FloatPath) {
  const FamilyParams p{Rational(0), Rational(0), true};
  const GameSpec g = to_double(cl_family_exact(p));
  const CostThresholdPair cbar{1.0 / 3.0, 0.0};
  const auto mu = mu_re(g, cbar);
  const auto f = f_re(g, cbar);
  for (const auto& cell : testkit::family_limit_tables()) {
    const int x = cell_index(g.features, cell.cell);
    EXPECT_NEAR(mu(cell.group, x), to_double(cell.mu), 1e-12) << cell.cell;
    EXPECT_NEAR(f(cell.group, x), to_double(cell.f), 1e-12) << cell.cell;
  }
}

CostThresholdPair random_cbar(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-0.3, 0.6);
  return {u(rng), u(rng)};
}

TEST(CalibratedTablesTest, MassesAndBayes) {
  std::mt19937_64 rng(11);
  for (uint64_t seed = 1; seed <= 40; ++seed) {
    const GameSpec g = testkit::random_game(seed);
    const CostThresholdPair cbar = random_cbar(rng);
    const FeatureTable mu = mu_re(g, cbar);
    const FeatureTable f = f_re(g, cbar);
    const int n = g.features.num_cells();
    for (Group i : kGroups) {
      const double G = cost_cdf(g.costs, cbar[i]);
      double mass = 0.0, qualified = 0.0;
      for (int x = 0; x < n; ++x) {
        mass += mu(i, x);
        qualified += mu(i, x) * f(i, x);
        // Bayes on the full conditional law; the proxy factor cancels.
        const double pq = G * g.p(i, ClassLabel::kQualified, x);
        const double pu = (1.0 - G) * g.p(i, ClassLabel::kUnqualified, x);
        EXPECT_NEAR(f(i, x), pq / (pq + pu), 1e-12);
      }
      EXPECT_NEAR(mass, g.lambda(i), 1e-12);
      EXPECT_NEAR(qualified, g.lambda(i) * G, 1e-12);
    }
    check_table(mu);
    check_table(f);
  }
}

TEST(CalibratedTablesTest, BeliefsIgnoreProxies) {
  const GameSpec g = testkit::random_game(5);
  const FeatureTable f = f_re(g, {0.1, 0.2});
  for (Group i : kGroups) {
    for (int x = 0; x < g.features.num_cells(); ++x) {
      for (int z = 0; z < g.features.num_cells(); ++z) {
        if (g.class_cell(x) == g.class_cell(z)) {
          EXPECT_EQ(f(i, x), f(i, z));
        }
      }
    }
  }
}

TEST(CalibratedTablesTest, ModelMatchesTemplates) {
  const GameSpec g = testkit::random_game(9);
  const CalibratedModel m(g);
  const CostThresholdPair cbar{0.05, -0.1};
  const FeatureTable a = m.mu(cbar), b = mu_re(g, cbar);
  const FeatureTable fa = m.f(cbar), fb = f_re(g, cbar);
  for (int k = 0; k < a.size(); ++k) {
    EXPECT_NEAR(a.values[k], b.values[k], 1e-15);
    EXPECT_NEAR(fa.values[k], fb.values[k], 1e-15);
  }
}

TEST(ColorBlindAggregateTest, ConservesMass) {
  const GameSpec g = cl_family(0.01, 0.01);
  const CostThresholdPair cbar = family_threshold(FamilyParams::of(0.01, 0.01));
  const FeatureTable mu = mu_re(g, cbar), f = f_re(g, cbar);
  const auto [mu_cb, f_cb] = colorblind_aggregate(mu, f);
  double mass = 0.0, qualified = 0.0, expected = 0.0;
  for (size_t x = 0; x < mu_cb.values.size(); ++x) {
    mass += mu_cb.values[x];
    qualified += mu_cb.values[x] * f_cb.values[x];
  }
  for (Group i : kGroups) expected += g.lambda(i) * cost_cdf(g.costs, cbar[i]);
  EXPECT_NEAR(mass, 1.0, 1e-12);
  EXPECT_NEAR(qualified, expected, 1e-12);
  FeatureTable short_f = f;
  short_f.num_cells = 3;
  EXPECT_THROW(colorblind_aggregate(mu, short_f), std::invalid_argument);
}

TEST(CheckTableTest, RejectsOutOfRange) {
  auto d = FeatureTable::filled(TableKind::kPolicy, 2, 0.5);
  check_table(d);
  d.values[1] = 1.5;
  EXPECT_THROW(check_table(d), InvariantViolation);
  auto f = FeatureTable::filled(TableKind::kBelief, 2, 0.5);
  f.values[0] = 1.0;
  EXPECT_THROW(check_table(f), InvariantViolation);
  auto mu = FeatureTable::filled(TableKind::kDistribution, 2, 0.25);
  check_table(mu);
  mu.values[0] = 0.3;
  EXPECT_THROW(check_table(mu), InvariantViolation);
}

TEST(LikelihoodStructureTest, SortedDistinctRatios) {
  for (uint64_t seed = 1; seed <= 50; ++seed) {
    const GameSpec g = testkit::random_game(seed);
    const LikelihoodStructure ls = likelihood_structure(g);
    std::vector<double> raw;
    for (size_t c = 0; c < g.law.p_class[0].size(); ++c) {
      raw.push_back(g.law.p_class[0][c] / g.law.p_class[1][c]);
    }
    std::sort(raw.begin(), raw.end());
    raw.erase(std::unique(raw.begin(), raw.end(),
                          [](double a, double b) { return std::abs(a - b) <= 1e-9 * a; }),
              raw.end());
    ASSERT_EQ(ls.n(), static_cast<int>(raw.size()));
    for (int m = 0; m < ls.n(); ++m) EXPECT_NEAR(ls.values[m], raw[m], 1e-12);
    double sq = 0.0, su = 0.0;
    for (int m = 0; m < ls.n(); ++m) {
      sq += ls.mass_q[m];
      su += ls.mass_u[m];
    }
    EXPECT_NEAR(sq, 1.0, 1e-12);
    EXPECT_NEAR(su, 1.0, 1e-12);
  }
}

TEST(LikelihoodStructureTest, FamilyLikelihoods) {
  const LikelihoodStructure ls = likelihood_structure(cl_family(0.01, 0.01));
  ASSERT_EQ(ls.n(), 3);
  EXPECT_EQ(ls.value(0), 0.0);
  EXPECT_NEAR(ls.value(1), 0.5, 1e-15);
  EXPECT_NEAR(ls.value(2), 2.0 / 1.06, 1e-14);
  EXPECT_NEAR(ls.value(3), 2.0 / 0.94, 1e-14);
}

TEST(ConditionalPolicyTest, ClassConstantPolicy) {
  const GameSpec g = testkit::random_game(3);
  const LikelihoodStructure ls = likelihood_structure(g);
  auto d = FeatureTable::filled(TableKind::kPolicy, g.features.num_cells(), 0.0);
  for (Group i : kGroups) {
    for (int x = 0; x < g.features.num_cells(); ++x) {
      d(i, x) = 0.1 + 0.8 * ls.cell_class[x] / std::max(1, ls.n() - 1);
    }
  }
  for (Group i : kGroups) {
    const auto c = conditional_policy(g, ls, d, i);
    for (int m = 0; m < ls.n(); ++m) {
      EXPECT_NEAR(c[m], 0.1 + 0.8 * m / std::max(1, ls.n() - 1), 1e-12);
    }
  }
}

TEST(RatesTest, AcceptanceSplitsIntoTruePositiveAndFalsePositive) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (uint64_t seed = 1; seed <= 30; ++seed) {
    const GameSpec g = testkit::random_game(seed);
    const CostThresholdPair cbar = random_cbar(rng);
    const FeatureTable mu = mu_re(g, cbar), f = f_re(g, cbar);
    auto d = FeatureTable::filled(TableKind::kPolicy, g.features.num_cells(), 0.0);
    for (double& v : d.values) v = u(rng);
    for (Group i : kGroups) {
      const double G = cost_cdf(g.costs, cbar[i]);
      const GroupRates r = group_rates(i, d, mu, f);
      EXPECT_NEAR(r.acceptance, G * r.true_positive + (1 - G) * r.false_positive, 1e-12);
    }
  }
}

}  // namespace
}  // namespace fairlab
