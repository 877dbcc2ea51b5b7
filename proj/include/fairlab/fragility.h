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

// Belief perturbations inside an eps-ball: the injective perturbation that
// breaks the no-proxies control, and sampled continuity probes for the
// rate-equalizing controls.

#ifndef FAIRLAB_FRAGILITY_H_
#define FAIRLAB_FRAGILITY_H_

#include <stdexcept>
#include <string>
#include <vector>

#include "fairlab/controls.h"
#include "fairlab/equilibrium.h"
#include "fairlab/model.h"
#include "fairlab/stats.h"

namespace fairlab {

// Raised when eps is too large to keep every sign; carries the largest
// admissible eps.
class PerturbationError : public std::invalid_argument {
 public:
  PerturbationError(const std::string& what, double max_eps)
      : std::invalid_argument(what), max_eps_(max_eps) {}
  double max_eps() const { return max_eps_; }

 private:
  double max_eps_;
};

struct PerturbationCertificate {
  double eps = 0.0;
  FeatureTable mu;
  FeatureTable base_f;
  FeatureTable perturbed_f;
  double l2_distance = 0.0;
  bool injective = false;
  bool in_range = false;
  bool colorblind_policy_unchanged = false;
  FeatureTable colorblind_policy;  // optimum under the perturbed belief
  std::string control = "cb";
  // True when every stored inequality holds.
  bool ok() const {
    return l2_distance <= eps && injective && in_range && colorblind_policy_unchanged;
  }
};

// Offsets cell r (rank by f, ties by index) by r * eps / (2 |I x X|^{3/2}),
// upward above v_u / (v_q + v_u) and downward below it.
FeatureTable injective_perturbation(const FeatureTable& mu, const FeatureTable& f, double eps,
                                    double v_q = 1.0, double v_u = 1.0);

// Recomputes every field of the certificate from the inputs.
PerturbationCertificate certify_perturbation(const FeatureTable& mu, const FeatureTable& f,
                                             const FeatureTable& perturbed, double eps,
                                             double v_q, double v_u);

struct FragilityProbeResult {
  double gamma = 0.0;
  double delta = 0.0;
  CostThresholdPair cbar{0.0, 0.0};
  FeatureTable policy;
  PerturbationCertificate perturbation;
  EquilibriumCertificate epsilon_certificate;  // perturbed beliefs, no proxies
  EquilibriumCertificate exact_certificate;    // calibrated beliefs, no proxies
  std::vector<int> kept_axes_perturbed;
  std::vector<int> kept_axes_exact;
  bool accepted() const {
    return perturbation.ok() && epsilon_certificate.accepted && !exact_certificate.accepted;
  }
};

// Throws std::invalid_argument when the family's sign conditions fail.
FragilityProbeResult no_proxies_fragility_probe(double gamma, double delta, double eps);

struct ContinuitySample {
  double distance = 0.0;         // from the perturbed optimizer to the exact face
  double perturbation_norm = 0.0;
  // Mistaken identity only: the two optimizers differ on at most one
  // likelihood class per group.
  bool single_likelihood_class = true;
};

struct ContinuityReport {
  ControlSpec control;
  double eps = 0.0;
  int samples = 0;
  std::vector<ContinuitySample> per_sample;
  double max_distance = 0.0;
  double mean_distance = 0.0;
};

// Samples (mu, f) in the eps-ball around the calibrated pair at cbar with a
// Halton sequence (seeded by offset), takes the firm optimum under k there,
// and measures its distance to the exact optimizer face.
ContinuityReport continuity_probe(const GameSpec& game, const ControlSpec& k,
                                  const CostThresholdPair& cbar, int n_samples, double eps,
                                  unsigned seed = 0);

}  // namespace fairlab

#endif  // FAIRLAB_FRAGILITY_H_
