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

#include "fairlab/model.h"

#include <algorithm>
#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "fairlab/gamegen.h"
#include "testkit.h"

namespace fairlab {
namespace {

FeatureSpace family_space() {
  return FeatureSpace({{"score", {"L", "H-", "H+"}}, {"proxy", {"W", "B"}}});
}

TEST(FeatureSpaceTest, RowMajorWithLastAxisFastest) {
  const FeatureSpace X = family_space();
  EXPECT_EQ(X.num_cells(), 6);
  const int coords[] = {2, 1};
  EXPECT_EQ(X.cell(coords), 5);
  EXPECT_EQ(X.cell_name(4), "(H+,W)");
  EXPECT_EQ(X.coord(3, 0), 1);
  EXPECT_EQ(X.coord(3, 1), 1);
}

TEST(FeatureSpaceTest, CoordsRoundTrip) {
  const FeatureSpace X({{"a", {"0", "1", "2"}}, {"b", {"0", "1"}}, {"c", {"0", "1", "2"}}});
  for (int x = 0; x < X.num_cells(); ++x) {
    const auto c = X.coords(x);
    EXPECT_EQ(X.cell(c), x);
  }
}

TEST(FeatureSpaceTest, ProjectionsAndComplement) {
  const FeatureSpace X = family_space();
  const int score[] = {0};
  EXPECT_EQ(X.num_cells(score), 3);
  EXPECT_EQ(X.complement(score), std::vector<int>{1});
  for (int x = 0; x < 6; ++x) EXPECT_EQ(X.project(x, score), x / 2);
}

TEST(FeatureSpaceTest, RejectsMalformedAxes) {
  EXPECT_THROW(FeatureSpace(std::vector<Axis>{}), std::invalid_argument);
  EXPECT_THROW(FeatureSpace(std::vector<Axis>{{"a", {}}}), std::invalid_argument);
  EXPECT_THROW(FeatureSpace({{"a", {"x"}}, {"a", {"y"}}}), std::invalid_argument);
  EXPECT_THROW(FeatureSpace({{"a", {"x", "x"}}}), std::invalid_argument);
  EXPECT_THROW(family_space().axis_index("nope"), std::invalid_argument);
}

TEST(GroupTest, Labels) {
  EXPECT_EQ(group_label(Group::kW), "w");
  EXPECT_EQ(parse_group("b"), Group::kB);
  EXPECT_THROW(parse_group("x"), std::invalid_argument);
  EXPECT_EQ(other(Group::kW), Group::kB);
}

std::vector<CostDistribution> sample_costs() {
  return {
      LogisticCost<double>{0.1, 0.2},
      LogisticCost<double>{-0.3, 0.05},
      PiecewiseLinearCost<double>{{{0.0, 1.0 / 6}, {2.0 / 3, 5.0 / 6}}, 6.0, 6.0},
      PiecewiseLinearCost<double>{{{-0.2, 0.1}, {0.1, 0.3}, {0.5, 0.9}}, 2.0, 7.0},
  };
}

TEST(CostTest, QuantileInvertsCdf) {
  for (const auto& g : sample_costs()) {
    for (double p = 0.01; p < 1.0; p += 0.01) {
      EXPECT_NEAR(cost_cdf(g, cost_quantile(g, p)), p, 1e-12);
    }
  }
}

TEST(CostTest, CdfIsIncreasingAndPdfIsItsSlope) {
  for (const auto& g : sample_costs()) {
    double prev = 0.0;
    for (double c = -1.0; c <= 1.0; c += 0.0137) {
      const double v = cost_cdf(g, c);
      EXPECT_GT(v, prev);
      EXPECT_LT(v, 1.0);
      prev = v;
      const double h = 1e-6;
      const double slope = (cost_cdf(g, c + h) - cost_cdf(g, c - h)) / (2 * h);
      EXPECT_NEAR(cost_pdf(g, c), slope, 1e-5);
    }
  }
}

TEST(CostTest, QuantileRejectsEndpoints) {
  const CostDistribution g = LogisticCost<double>{0.0, 1.0};
  EXPECT_THROW(cost_quantile(g, 0.0), std::invalid_argument);
  EXPECT_THROW(cost_quantile(g, 1.0), std::invalid_argument);
}

// Integral of t g(t) over (-inf, c] by composite Simpson on a long window,
// split at the density's jumps.
double mean_below_quadrature(const CostDistribution& g, double c) {
  std::vector<double> cuts = {c - 60.0};
  if (const auto* pw = std::get_if<PiecewiseLinearCost<double>>(&g)) {
    for (const auto& knot : pw->knots) {
      if (knot.first < c) cuts.push_back(knot.first);
    }
  }
  cuts.push_back(c);
  double s = 0.0;
  for (size_t piece = 0; piece + 1 < cuts.size(); ++piece) {
    const double lo = cuts[piece], hi = cuts[piece + 1];
    const int n = 200000;
    const double h = (hi - lo) / n;
    double part = 0.0;
    for (int k = 0; k <= n; ++k) {
      // Evaluate just inside the piece so jumps do not leak across cuts.
      const double t = std::clamp(lo + k * h, lo + 1e-13, hi - 1e-13);
      const double w = (k == 0 || k == n) ? 1.0 : (k % 2 ? 4.0 : 2.0);
      part += w * t * cost_pdf(g, t);
    }
    s += part * h / 3.0;
  }
  return s;
}

TEST(CostTest, MeanBelowMatchesQuadrature) {
  for (const auto& g : sample_costs()) {
    for (double c : {-0.5, -0.1, 0.0, 0.2, 0.45, 0.9}) {
      EXPECT_NEAR(mean_below(g, c), mean_below_quadrature(g, c), 1e-7);
    }
  }
}

TEST(CostTest, ExactCdfOnLinearPieces) {
  const BasicCostDistribution<Rational> g =
      PiecewiseLinearCost<Rational>{{{Rational(0), Rational(1, 6)}, {Rational(2, 3), Rational(5, 6)}},
                                    Rational(6), Rational(6)};
  EXPECT_EQ(cost_cdf(g, Rational(1, 3)), Rational(1, 2));
  EXPECT_EQ(cost_cdf(g, Rational(0)), Rational(1, 6));
}

TEST(ValidateTest, FamilyIsValid) {
  const ValidationReport r = validate_game(cl_family(0.01, 0.01));
  EXPECT_TRUE(r.ok()) << r.errors().size();
  EXPECT_FALSE(r.degenerate);
}

TEST(ValidateTest, LimitIsDegenerate) {
  const GameSpec g = to_double(cl_family_exact({Rational(0), Rational(0), true}));
  const ValidationReport r = validate_game(g);
  EXPECT_FALSE(r.ok());
  EXPECT_TRUE(r.degenerate);
  EXPECT_TRUE(r.has("full-support violated"));
  EXPECT_THROW(require_valid(g), std::invalid_argument);
}

TEST(ValidateTest, DetectsBrokenLaws) {
  GameSpec g = cl_family(0.01, 0.01);
  g.law.p_class[0][0] += 0.1;
  EXPECT_TRUE(validate_game(g).has("probability law"));

  g = cl_family(0.01, 0.01);
  g.law.p_class[0] = {0.5, 0.25, 0.25};
  g.law.p_class[1] = {0.5, 0.3, 0.2};
  EXPECT_TRUE(validate_game(g).has("likelihood ratio one"));

  g = cl_family(0.01, 0.01);
  g.lambda_w = 1.0;
  EXPECT_TRUE(validate_game(g).has("parameters"));

  g = cl_family(0.01, 0.01);
  g.costs = LogisticCost<double>{0.0, -1.0};
  EXPECT_TRUE(validate_game(g).has("cost distribution"));
  EXPECT_FALSE(validate_game(g).degenerate);

  g = cl_family(0.01, 0.01);
  g.law.p_proxy[1].pop_back();
  EXPECT_TRUE(validate_game(g).has("probability law"));
}

TEST(ValidateTest, RandomGamesAreValid) {
  for (uint64_t seed = 1; seed <= 100; ++seed) {
    EXPECT_TRUE(validate_game(testkit::random_game(seed)).ok()) << "seed " << seed;
  }
}

TEST(ConversionTest, DoubleRoundTripThroughRationals) {
  const GameSpec g = cl_family(0.01, 0.02);
  const GameSpec back = to_double(to_exact(g));
  EXPECT_EQ(back.lambda_w, g.lambda_w);
  EXPECT_EQ(back.law.p_class, g.law.p_class);
  EXPECT_EQ(back.law.p_proxy, g.law.p_proxy);
  // Decimal inputs convert to their shortest decimal rational.
  EXPECT_EQ(to_exact(g).law.p_proxy[0][0][1], Rational(1, 50));
}

TEST(LawTest, ConditionalDistributionsNormalize) {
  for (uint64_t seed = 1; seed <= 30; ++seed) {
    const GameSpec g = testkit::random_game(seed);
    for (Group i : kGroups) {
      for (ClassLabel y : {ClassLabel::kQualified, ClassLabel::kUnqualified}) {
        double s = 0.0;
        for (int x = 0; x < g.features.num_cells(); ++x) s += g.p(i, y, x);
        EXPECT_NEAR(s, 1.0, 1e-12);
      }
    }
  }
}

}  // namespace
}  // namespace fairlab
