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

#include "fairlab/equilibrium.h"

#include <algorithm>
#include <cmath>
#include <random>
#include <set>

#include <gtest/gtest.h>

#include "fairlab/curves.h"
#include "fairlab/gamegen.h"
#include "testkit.h"

namespace fairlab {
namespace {

FeatureTable random_policy(std::mt19937_64& rng, int n) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  auto d = FeatureTable::filled(TableKind::kPolicy, n, 0.0);
  for (double& v : d.values) v = u(rng);
  return d;
}

TEST(ApplicantTest, BestResponseIsTheIncentive) {
  std::mt19937_64 rng(2);
  for (uint64_t seed = 1; seed <= 30; ++seed) {
    const GameSpec g = testkit::random_game(seed);
    const FeatureTable d = random_policy(rng, g.features.num_cells());
    const CostThresholdPair c = applicant_best_response(g, d);
    for (Group i : kGroups) {
      double inc = 0.0;
      for (int x = 0; x < g.features.num_cells(); ++x) {
        inc += d(i, x) * (g.p(i, ClassLabel::kQualified, x) - g.p(i, ClassLabel::kUnqualified, x));
      }
      EXPECT_NEAR(c[i], g.omega * inc, 1e-12);
    }
  }
}

TEST(ApplicantTest, BestResponseMaximizesUtility) {
  std::mt19937_64 rng(3);
  for (uint64_t seed = 1; seed <= 20; ++seed) {
    const GameSpec g = testkit::random_game(seed);
    const FeatureTable d = random_policy(rng, g.features.num_cells());
    const CostThresholdPair c = applicant_best_response(g, d);
    for (Group i : kGroups) {
      const double best = applicant_utility(g, i, c[i], d);
      for (double h : {-0.2, -0.05, -1e-3, 1e-3, 0.05, 0.2}) {
        EXPECT_LE(applicant_utility(g, i, c[i] + h, d), best + 1e-12) << "seed " << seed;
      }
    }
  }
}

TEST(ApplicantTest, RejectsBadPolicies) {
  const GameSpec g = cl_family(0.01, 0.01);
  auto d = FeatureTable::filled(TableKind::kPolicy, 6, 2.0);
  EXPECT_THROW(applicant_best_response(g, d), InvariantViolation);
  d = FeatureTable::filled(TableKind::kPolicy, 4, 0.5);
  EXPECT_THROW(applicant_best_response(g, d), std::invalid_argument);
}

TEST(VerifyTest, ShiftedThresholdIsRejected) {
  const GameSpec g = cl_family(0.01, 0.01);
  const auto r = enumerate_equilibria(g)[0];
  const ControlSpec un = ControlSpec::of(ControlKind::kUn);
  EXPECT_TRUE(verify_controlled_equilibrium(g, un, r.cbar, r.policy, 1e-7).accepted);
  const CostThresholdPair moved{r.cbar.w + 1e-3, r.cbar.b};
  const auto cert = verify_controlled_equilibrium(g, un, moved, r.policy, 1e-7);
  EXPECT_FALSE(cert.accepted);
  EXPECT_NEAR(cert.best_response_residual, 1e-3, 1e-12);
}

std::set<std::string> keys(const std::vector<EquilibriumRecord>& records) {
  std::set<std::string> out;
  for (const auto& r : records) out.insert(r.key);
  return out;
}

std::set<std::string> keys(const ControlledSearchResult& result) {
  std::set<std::string> out;
  for (const auto& r : result.records) out.insert(r.key);
  return out;
}

TEST(ControlledSearchTest, UncontrolledRecoversTheCurveEquilibria) {
  const ControlSpec un = ControlSpec::of(ControlKind::kUn);
  const GameSpec fam = cl_family(0.01, 0.01);
  const auto fam_result = controlled_equilibria(fam, un);
  EXPECT_EQ(keys(fam_result), keys(enumerate_equilibria(fam)));
  EXPECT_TRUE(fam_result.unresolved.empty());
  for (uint64_t seed = 1; seed <= 10; ++seed) {
    const GameSpec g = testkit::random_game(seed);
    EXPECT_EQ(keys(controlled_equilibria(g, un)), keys(enumerate_equilibria(g)))
        << "seed " << seed;
  }
}

TEST(ControlledSearchTest, RecordsAreCertifiedAndDistinct) {
  const GameSpec g = cl_family(0.01, 0.01);
  for (const char* name : {"eo", "aa", "cb", "odds", "mi:w", "noproxy"}) {
    const ControlSpec k = parse_control(name);
    const auto result = controlled_equilibria(g, k);
    for (size_t a = 0; a < result.records.size(); ++a) {
      const auto& r = result.records[a];
      EXPECT_TRUE(r.certificate.accepted) << name << " " << r.key;
      const auto again = verify_controlled_equilibrium(g, k, r.cbar, r.policy, 1e-7);
      EXPECT_TRUE(again.accepted) << name << " " << r.key;
      for (size_t b = a + 1; b < result.records.size(); ++b) {
        const auto& s = result.records[b];
        EXPECT_GT(std::max(std::abs(r.cbar.w - s.cbar.w), std::abs(r.cbar.b - s.cbar.b)), 1e-6);
      }
    }
    EXPECT_TRUE(std::is_sorted(result.records.begin(), result.records.end(),
                               [](const auto& x, const auto& y) { return x.key < y.key; }));
  }
}

TEST(ControlledSearchTest, Deterministic) {
  const GameSpec g = testkit::random_game(7);
  const ControlSpec eo = ControlSpec::of(ControlKind::kEqualOpportunity);
  const auto a = controlled_equilibria(g, eo);
  const auto b = controlled_equilibria(g, eo);
  ASSERT_EQ(a.records.size(), b.records.size());
  for (size_t j = 0; j < a.records.size(); ++j) {
    EXPECT_EQ(a.records[j].key, b.records[j].key);
    EXPECT_EQ(a.records[j].cbar.w, b.records[j].cbar.w);
  }
  EXPECT_EQ(a.evaluations, b.evaluations);
}

TEST(ControlledSearchTest, DegenerateAndInvalidGames) {
  const GameSpec limit = to_double(cl_family_exact({Rational(0), Rational(0), true}));
  const auto r = controlled_equilibria(limit, ControlSpec::of(ControlKind::kUn));
  EXPECT_TRUE(r.degenerate);
  EXPECT_TRUE(r.records.empty());
  GameSpec bad = cl_family(0.01, 0.01);
  bad.v_q = -1.0;
  EXPECT_THROW(controlled_equilibria(bad, ControlSpec::of(ControlKind::kUn)),
               std::invalid_argument);
}

TEST(IdealCheckTest, EqualOpportunityOnFamily) {
  const IdealCheckReport r =
      ideal_check(cl_family(0.01, 0.01), ControlSpec::of(ControlKind::kEqualOpportunity));
  EXPECT_EQ(r.property1_verdict, Verdict::kPass);
  EXPECT_TRUE(r.property2);
  EXPECT_EQ(r.controlled_keys, r.nondiscriminatory_keys);
  EXPECT_EQ(r.nondiscriminatory_keys.size(), 5u);
  for (const auto& v : r.property1) EXPECT_EQ(v.verdict, Verdict::kPass) << v.key;
}

TEST(IdealCheckTest, EqualOpportunityOnRandomGames) {
  for (uint64_t seed = 1; seed <= 10; ++seed) {
    const IdealCheckReport r =
        ideal_check(testkit::random_game(seed), ControlSpec::of(ControlKind::kEqualOpportunity));
    EXPECT_EQ(r.property1_verdict, Verdict::kPass) << "seed " << seed;
    EXPECT_TRUE(r.property2) << "seed " << seed;
  }
}

TEST(IdealCheckTest, ColorBlindAdmitsTheFamilyDiscriminatoryEquilibrium) {
  const FamilyParams p = FamilyParams::of(0.01, 0.01);
  const GameSpec g = cl_family(p);
  const ControlSpec cb = ControlSpec::of(ControlKind::kColorBlind);
  const CostThresholdPair star = family_threshold(p);
  const FeatureTable d = family_policy();
  EXPECT_TRUE(verify_controlled_equilibrium(g, cb, star, d, 1e-7).accepted);
  const IdealCheckReport r = ideal_check(g, cb);
  EXPECT_FALSE(r.property2);
  EXPECT_TRUE(r.property2_relaxed);
  const std::string key = controlled_key(g, star, d);
  EXPECT_NE(std::find(r.extra.begin(), r.extra.end(), key), r.extra.end()) << key;
  EXPECT_TRUE(r.missing.empty());
}

TEST(IdealCheckTest, AffirmativeActionGains) {
  const IdealCheckReport r =
      ideal_check(cl_family(0.01, 0.01), ControlSpec::of(ControlKind::kAffirmativeAction));
  EXPECT_EQ(r.property1_verdict, Verdict::kPass);
  EXPECT_TRUE(r.missing.empty());
}

TEST(IdealCheckTest, UncontrolledHasNoGains) {
  const IdealCheckReport r =
      ideal_check(cl_family(0.01, 0.01), ControlSpec::of(ControlKind::kUn));
  EXPECT_EQ(r.property1_verdict, Verdict::kFail);
  EXPECT_EQ(r.extra.size(), 20u);
}

TEST(GainsCheckTest, IntervalsAreNested) {
  const GameSpec g = cl_family(0.01, 0.01);
  const ControlSpec eo = ControlSpec::of(ControlKind::kEqualOpportunity);
  for (const auto& eq : enumerate_equilibria(g)) {
    if (eq.non_discriminatory) continue;
    const GainsVerdict v = gains_check(g, eo, eq);
    EXPECT_EQ(v.verdict, Verdict::kPass) << eq.key;
    EXPECT_TRUE(v.weakly_nested);
    EXPECT_LE(v.face_hull.lo, v.face_hull.hi);
    for (const auto& s : v.samples) {
      EXPECT_GE(s.lo, v.face_hull.lo - 1e-12);
      EXPECT_LE(s.hi, v.face_hull.hi + 1e-12);
    }
  }
}

TEST(ControlledKeyTest, Formats) {
  const GameSpec g = cl_family(0.01, 0.01);
  const auto eq = enumerate_equilibria(g)[1];
  EXPECT_EQ(controlled_key(g, eq.cbar, eq.policy), eq.key);
  const CostThresholdPair star = family_threshold(FamilyParams::of(0.01, 0.01));
  EXPECT_EQ(controlled_key(g, star, family_policy()), "w:c=0.330000|b:c=0.003333");
  EXPECT_EQ(verdict_name(Verdict::kIndeterminate), "indeterminate");
}

}  // namespace
}  // namespace fairlab
