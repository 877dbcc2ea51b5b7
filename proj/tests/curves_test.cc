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

#include "fairlab/curves.h"

#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "fairlab/equilibrium.h"
#include "fairlab/gamegen.h"
#include "testkit.h"

namespace fairlab {
namespace {

// Incentive of accepting exactly the class cells with likelihood above l.
double ww_brute(const GameSpec& g, double l) {
  double s = 0.0;
  for (size_t c = 0; c < g.law.p_class[0].size(); ++c) {
    const double q = g.law.p_class[0][c], u = g.law.p_class[1][c];
    if (q / u > l * (1.0 + 1e-9)) s += q - u;
  }
  return g.omega * s;
}

TEST(WWCurveTest, BreakpointsMatchBruteForce) {
  for (uint64_t seed = 1; seed <= 50; ++seed) {
    const GameSpec g = testkit::random_game(seed);
    const WWCurve ww = ww_curve(g);
    for (size_t m = 0; m < ww.l.size(); ++m) {
      EXPECT_NEAR(ww.ww[m], ww_brute(g, ww.l[m]), 1e-12) << "seed " << seed << " m " << m;
    }
    EXPECT_TRUE(ww_single_peaked(ww)) << "seed " << seed;
    EXPECT_NEAR(ww.ww.front(), 0.0, 1e-12);
    EXPECT_EQ(ww.ww.back(), 0.0);
  }
}

TEST(WWCurveTest, LinearBetweenBreakpoints) {
  const GameSpec g = cl_family(0.01, 0.01);
  const WWCurve ww = ww_curve(g);
  for (size_t m = 1; m < ww.l.size(); ++m) {
    const double mid = 0.5 * (ww.l[m - 1] + ww.l[m]);
    EXPECT_NEAR(ww_eval(ww, mid), 0.5 * (ww.ww[m - 1] + ww.ww[m]), 1e-14);
  }
  EXPECT_THROW(ww_eval(ww, -1.0), std::out_of_range);
  EXPECT_THROW(ww_eval(ww, ww.l.back() * 2), std::out_of_range);
}

TEST(EECorrespondenceTest, ThresholdMakesTheFirmIndifferent) {
  for (uint64_t seed = 1; seed <= 50; ++seed) {
    const GameSpec g = testkit::random_game(seed);
    const EECorrespondence ee = ee_correspondence(g);
    for (size_t m = 0; m < ee.l.size(); ++m) {
      const double G = cost_cdf(g.costs, ee.thresholds[m]);
      const double f = G * ee.l[m] / (G * ee.l[m] + 1.0 - G);
      EXPECT_NEAR(f * g.v_q - (1.0 - f) * g.v_u, 0.0, 1e-10);
      if (m > 0) {
        EXPECT_LT(ee.thresholds[m], ee.thresholds[m - 1]);
      }
    }
  }
}

TEST(EECorrespondenceTest, SetsAreIntervalsBetweenThresholds) {
  const GameSpec g = cl_family(0.01, 0.01);
  const EECorrespondence ee = ee_correspondence(g);
  const Interval at0 = ee_set(ee, 0.0);
  EXPECT_EQ(at0.lo, ee.thresholds[0]);
  EXPECT_TRUE(std::isinf(at0.hi));
  const Interval at1 = ee_set(ee, ee.l[0]);
  EXPECT_EQ(at1.lo, ee.thresholds[1]);
  EXPECT_EQ(at1.hi, ee.thresholds[0]);
  const Interval inside = ee_set(ee, 0.5 * (ee.l[0] + ee.l[1]));
  EXPECT_EQ(inside.lo, inside.hi);
  const Interval last = ee_set(ee, ee.l.back());
  EXPECT_TRUE(std::isinf(last.lo));
}

TEST(IntersectionsTest, FamilyHasFive) {
  const auto points = intersections(cl_family(0.01, 0.01));
  ASSERT_EQ(points.size(), 5u);
  EXPECT_NEAR(points[0].l, 0.5, 1e-9);
  EXPECT_NEAR(points[0].c, 1.0 / 3.0, 1e-9);
  for (const auto& p : points) EXPECT_FALSE(p.degenerate);
  EXPECT_EQ(intersection_label(0), "Eq1");
}

TEST(IntersectionsTest, LieOnBothCurves) {
  for (uint64_t seed = 1; seed <= 50; ++seed) {
    const GameSpec g = testkit::random_game(seed);
    const LikelihoodStructure ls = likelihood_structure(g);
    const WWCurve ww = ww_curve(g, ls);
    const EECorrespondence ee = ee_correspondence(g, ls);
    for (const auto& p : intersections(ww, ee)) {
      EXPECT_NEAR(ww_eval(ww, p.l), p.c, 1e-9) << "seed " << seed;
      EXPECT_TRUE(ee_set(ee, p.l).contains(p.c, 1e-9)) << "seed " << seed;
    }
  }
}

TEST(MixtureTest, LevelsRoundTrip) {
  std::mt19937_64 rng(1);
  for (uint64_t seed = 1; seed <= 30; ++seed) {
    const GameSpec g = testkit::random_game(seed);
    const LikelihoodStructure ls = likelihood_structure(g);
    std::uniform_real_distribution<double> u(0.0, ls.values.back());
    for (int t = 0; t < 20; ++t) {
      const double l = u(rng);
      const auto levels = mixture_levels(ls, l);
      const auto back = mixture_of_levels(ls, levels);
      ASSERT_TRUE(back.has_value());
      EXPECT_NEAR(*back, l, 1e-12 * std::max(1.0, l));
      for (size_t m = 1; m < levels.size(); ++m) EXPECT_GE(levels[m], levels[m - 1]);
    }
  }
}

TEST(MixtureTest, NonThresholdLevelsHaveNoMixture) {
  const LikelihoodStructure ls = likelihood_structure(cl_family(0.01, 0.01));
  EXPECT_FALSE(mixture_of_levels(ls, {0.5, 0.0, 1.0}).has_value());
  EXPECT_EQ(*mixture_of_levels(ls, {1.0, 1.0, 1.0}), 0.0);
}

TEST(FairPolicyTest, ConditionalPolicyEqualsLevels) {
  const GameSpec g = testkit::random_game(12);
  const LikelihoodStructure ls = likelihood_structure(g);
  const double l = 0.37 * ls.values.back();
  const FeatureTable d = fair_policy(g, ls, l);
  const auto expected = mixture_levels(ls, l);
  for (Group i : kGroups) {
    const auto got = conditional_policy(g, ls, d, i);
    for (int m = 0; m < ls.n(); ++m) EXPECT_NEAR(got[m], expected[m], 1e-12);
  }
  ASSERT_TRUE(fair_mixture(g, ls, d).has_value());
  EXPECT_NEAR(*fair_mixture(g, ls, d), l, 1e-9);
}

TEST(EnumerateTest, FamilyHasTwentyFiveWithFiveNonDiscriminatory) {
  const GameSpec g = cl_family(0.01, 0.01);
  const auto records = enumerate_equilibria(g);
  ASSERT_EQ(records.size(), 25u);
  int nd = 0;
  for (const auto& r : records) {
    const bool diagonal = r.intersection[0] == r.intersection[1];
    EXPECT_EQ(r.non_discriminatory, diagonal) << r.key;
    nd += r.non_discriminatory;
  }
  EXPECT_EQ(nd, 5);
  EXPECT_EQ(records[6].key, "w:Eq2|b:Eq2");
}

TEST(EnumerateTest, EveryRecordIsAnEquilibrium) {
  const ControlSpec un = ControlSpec::of(ControlKind::kUn);
  for (uint64_t seed = 1; seed <= 20; ++seed) {
    const GameSpec g = testkit::random_game(seed);
    for (const auto& r : enumerate_equilibria(g)) {
      const auto cert = verify_controlled_equilibrium(g, un, r.cbar, r.policy, 1e-7);
      EXPECT_TRUE(cert.accepted) << "seed " << seed << " " << r.key
                                 << " br=" << cert.best_response_residual
                                 << " firm=" << cert.firm_residual;
    }
  }
}

TEST(EnumerateTest, RejectsDegenerateGames) {
  const GameSpec g = to_double(cl_family_exact({Rational(0), Rational(0), true}));
  EXPECT_THROW(enumerate_equilibria(g), std::invalid_argument);
}

TEST(ClassifyTest, ConditionsAgreeOnRandomGames) {
  for (uint64_t seed = 1; seed <= 30; ++seed) {
    const GameSpec g = testkit::random_game(seed);
    for (const auto& r : enumerate_equilibria(g)) {
      const EquilibriumClassification c = classify_equilibrium(g, r);
      EXPECT_EQ(c.equal_thresholds, c.fair);
      EXPECT_EQ(c.fair, c.equal_acceptance);
      EXPECT_EQ(c.non_discriminatory, r.intersection[0] == r.intersection[1]);
    }
  }
}

// The grid oracle recovers each curve-enumerated equilibrium within two grid
// cells, one to one.
void expect_oracle_match(const GameSpec& g, int grid, const std::string& label) {
  const auto records = enumerate_equilibria(g);
  const testkit::OracleResult oracle = testkit::oracle_equilibria(g, grid);
  ASSERT_EQ(oracle.clusters.size(), records.size()) << label;
  std::vector<bool> used(oracle.clusters.size(), false);
  for (const auto& r : records) {
    int hit = -1;
    for (size_t k = 0; k < oracle.clusters.size(); ++k) {
      if (used[k]) continue;
      if (std::abs(oracle.clusters[k].c_w - r.cbar.w) <= 2 * oracle.step &&
          std::abs(oracle.clusters[k].c_b - r.cbar.b) <= 2 * oracle.step) {
        hit = static_cast<int>(k);
        break;
      }
    }
    ASSERT_GE(hit, 0) << label << " " << r.key;
    used[hit] = true;
  }
}

TEST(OracleCrossCheckTest, Family) { expect_oracle_match(cl_family(0.01, 0.01), 400, "family"); }

TEST(OracleCrossCheckTest, RandomGames) {
  for (uint64_t seed = 1; seed <= 20; ++seed) {
    expect_oracle_match(testkit::random_game(seed), 400, "seed " + std::to_string(seed));
  }
}

}  // namespace
}  // namespace fairlab
