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

#include "fairlab/fragility.h"

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

struct Tables {
  FeatureTable mu, f;
  double v_q, v_u;
};

Tables family_tables() {
  const FamilyParams p = FamilyParams::of(0.01, 0.01);
  const GameSpec g = cl_family(p);
  const CostThresholdPair c = family_threshold(p);
  return {mu_re(g, c), f_re(g, c), g.v_q, g.v_u};
}

TEST(InjectivePerturbationTest, FamilyCertificates) {
  const Tables t = family_tables();
  for (double eps : {1e-2, 1e-4, 1e-6}) {
    const FeatureTable p = injective_perturbation(t.mu, t.f, eps, t.v_q, t.v_u);
    const PerturbationCertificate c = certify_perturbation(t.mu, t.f, p, eps, t.v_q, t.v_u);
    EXPECT_TRUE(c.ok()) << "eps " << eps;
    EXPECT_TRUE(c.injective);
    EXPECT_LE(c.l2_distance, eps);
  }
}

TEST(InjectivePerturbationTest, PreservesBeliefOrderOnRandomGames) {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(-0.2, 0.5);
  for (uint64_t seed = 1; seed <= 30; ++seed) {
    const GameSpec g = testkit::random_game(seed);
    const CostThresholdPair c{u(rng), u(rng)};
    const FeatureTable mu = mu_re(g, c), f = f_re(g, c);
    FeatureTable p;
    try {
      p = injective_perturbation(mu, f, 1e-6, g.v_q, g.v_u);
    } catch (const PerturbationError& e) {
      EXPECT_GT(e.max_eps(), 0.0);
      EXPECT_LT(e.max_eps(), 1e-6);
      continue;
    }
    const PerturbationCertificate cert = certify_perturbation(mu, f, p, 1e-6, g.v_q, g.v_u);
    EXPECT_TRUE(cert.ok()) << "seed " << seed;
    for (int a = 0; a < f.size(); ++a) {
      for (int b = 0; b < f.size(); ++b) {
        if (f.values[a] < f.values[b]) {
          EXPECT_LT(p.values[a], p.values[b]);
        }
      }
    }
  }
}

TEST(InjectivePerturbationTest, TooLargeRadiusReportsTheBound) {
  const Tables t = family_tables();
  double bound = 0.0;
  try {
    injective_perturbation(t.mu, t.f, 10.0, t.v_q, t.v_u);
    FAIL() << "expected PerturbationError";
  } catch (const PerturbationError& e) {
    bound = e.max_eps();
  }
  ASSERT_GT(bound, 0.0);
  ASSERT_LT(bound, 10.0);
  const FeatureTable p = injective_perturbation(t.mu, t.f, 0.5 * bound, t.v_q, t.v_u);
  EXPECT_TRUE(certify_perturbation(t.mu, t.f, p, 0.5 * bound, t.v_q, t.v_u).ok());
}

TEST(InjectivePerturbationTest, CertificateCatchesCollisions) {
  const Tables t = family_tables();
  FeatureTable p = t.f;
  const PerturbationCertificate c = certify_perturbation(t.mu, t.f, p, 1e-3, t.v_q, t.v_u);
  EXPECT_FALSE(c.injective);
  EXPECT_FALSE(c.ok());
}

TEST(NoProxiesProbeTest, EpsilonEquilibriumButNotExact) {
  for (double eps : {1e-2, 1e-4, 1e-6}) {
    const FragilityProbeResult r = no_proxies_fragility_probe(0.01, 0.01, eps);
    EXPECT_TRUE(r.accepted()) << "eps " << eps;
    EXPECT_TRUE(r.epsilon_certificate.accepted);
    EXPECT_FALSE(r.exact_certificate.accepted);
    EXPECT_LE(r.epsilon_certificate.distance, eps);
    // The perturbed beliefs vary along the proxy axis; the calibrated ones do not.
    EXPECT_EQ(r.kept_axes_perturbed, (std::vector<int>{0, 1}));
    EXPECT_EQ(r.kept_axes_exact, std::vector<int>{0});
  }
}

TEST(NoProxiesProbeTest, RejectsParametersOutsideTheFamily) {
  EXPECT_THROW(no_proxies_fragility_probe(0.5, 0.01, 1e-4), std::invalid_argument);
}

CostThresholdPair first_last(const GameSpec& g) {
  const auto p = intersections(g);
  return {p.front().c, p.back().c};
}

TEST(ContinuityTest, EqualOpportunityShrinksWithRadius) {
  const GameSpec g = cl_family(0.01, 0.01);
  const ControlSpec eo = ControlSpec::of(ControlKind::kEqualOpportunity);
  double prev = std::numeric_limits<double>::infinity();
  for (double eps : {1e-2, 1e-4, 1e-6}) {
    const ContinuityReport r = continuity_probe(g, eo, first_last(g), 100, eps);
    EXPECT_TRUE(std::isfinite(r.max_distance));
    EXPECT_LE(r.max_distance, prev);
    EXPECT_LE(r.mean_distance, r.max_distance);
    EXPECT_EQ(r.samples, 100);
    EXPECT_EQ(r.per_sample.size(), 100u);
    for (const auto& s : r.per_sample) EXPECT_LE(s.perturbation_norm, eps * (1 + 1e-9));
    prev = r.max_distance;
  }
  EXPECT_LT(prev, 1e-2);
}

TEST(ContinuityTest, NoProxiesDoesNotShrink) {
  const GameSpec g = cl_family(0.01, 0.01);
  const ContinuityReport r = continuity_probe(g, ControlSpec::of(ControlKind::kNoProxies),
                                              first_last(g), 100, 1e-4);
  EXPECT_GT(r.max_distance, 0.1);
}

TEST(ContinuityTest, SeededAndReproducible) {
  const GameSpec g = cl_family(0.01, 0.01);
  const ControlSpec eo = ControlSpec::of(ControlKind::kEqualOpportunity);
  const auto a = continuity_probe(g, eo, first_last(g), 20, 1e-3, 3);
  const auto b = continuity_probe(g, eo, first_last(g), 20, 1e-3, 3);
  const auto c = continuity_probe(g, eo, first_last(g), 20, 1e-3, 4);
  ASSERT_EQ(a.per_sample.size(), b.per_sample.size());
  for (size_t k = 0; k < a.per_sample.size(); ++k) {
    EXPECT_EQ(a.per_sample[k].distance, b.per_sample[k].distance);
  }
  bool differs = false;
  for (size_t k = 0; k < a.per_sample.size(); ++k) {
    differs = differs || a.per_sample[k].perturbation_norm != c.per_sample[k].perturbation_norm;
  }
  EXPECT_TRUE(differs);
}

TEST(ContinuityTest, MistakenIdentityChangesOneClass) {
  const GameSpec g = cl_family(0.01, 0.01);
  const ContinuityReport r = continuity_probe(
      g, ControlSpec::of(ControlKind::kMistakenIdentity, Group::kW), first_last(g), 30, 1e-6);
  for (const auto& s : r.per_sample) EXPECT_TRUE(s.single_likelihood_class);
}

}  // namespace
}  // namespace fairlab
