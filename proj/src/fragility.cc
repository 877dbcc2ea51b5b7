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
#include <limits>
#include <numeric>
#include <set>
#include <string>

#include <boost/math/special_functions/erf.hpp>

#include "fairlab/gamegen.h"
#include "fairlab/lp.h"

namespace fairlab {
namespace {

// A one-axis space with n cells; enough for the controls that ignore axes.
FeatureSpace flat_space(int n) {
  Axis a{"x", {}};
  for (int x = 0; x < n; ++x) a.labels.push_back(std::to_string(x));
  return FeatureSpace({a});
}

// Per-unit-eps offsets of each table entry.
std::vector<double> offset_directions(const FeatureTable& mu, const FeatureTable& f, double v_q,
                                      double v_u) {
  const int total = f.size();
  const int n = f.num_cells;
  const double unit = 1.0 / (2.0 * std::pow(static_cast<double>(total), 1.5));
  const double thr = v_u / (v_q + v_u);
  std::vector<int> order(total);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return f.values[a] < f.values[b]; });
  std::vector<double> dir(total);
  for (int r = 1; r <= total; ++r) {
    const int v = order[r - 1];
    const double fv = f.values[v];
    bool up = fv > thr;
    if (fv == thr) {
      const int x = v % n;
      double coef = 0.0;
      for (Group i : kGroups) coef += mu(i, x) * ((v_q + v_u) * f(i, x) - v_u);
      up = coef >= 0.0;
    }
    dir[v] = up ? r * unit : -(total + 1 - r) * unit;
  }
  return dir;
}

double max_admissible_eps(const FeatureTable& mu, const FeatureTable& f,
                          const std::vector<double>& dir, double v_q, double v_u) {
  double best = std::numeric_limits<double>::infinity();
  for (int v = 0; v < f.size(); ++v) {
    if (dir[v] > 0) best = std::min(best, (1.0 - f.values[v]) / dir[v]);
    if (dir[v] < 0) best = std::min(best, f.values[v] / -dir[v]);
  }
  for (int x = 0; x < f.num_cells; ++x) {
    double coef = 0.0, slope = 0.0;
    for (Group i : kGroups) {
      coef += mu(i, x) * ((v_q + v_u) * f(i, x) - v_u);
      slope += mu(i, x) * (v_q + v_u) * dir[idx(i) * f.num_cells + x];
    }
    if (coef != 0.0 && coef * slope < 0.0) best = std::min(best, std::abs(coef / slope));
  }
  return best;
}

FeatureTable apply(const FeatureTable& f, const std::vector<double>& dir, double eps) {
  FeatureTable out = f;
  for (int v = 0; v < f.size(); ++v) out.values[v] += eps * dir[v];
  return out;
}

// Halton sequence over the first `dim` primes.
class Halton {
 public:
  explicit Halton(int dim) {
    for (int p = 2; static_cast<int>(primes_.size()) < dim; ++p) {
      bool prime = true;
      for (int q : primes_) {
        if (q * q > p) break;
        if (p % q == 0) prime = false;
      }
      if (prime) primes_.push_back(p);
    }
  }
  double operator()(long index, int coord) const {
    const int base = primes_[coord];
    double r = 0.0, scale = 1.0 / base;
    for (long k = index; k > 0; k /= base, scale /= base) r += (k % base) * scale;
    return r;
  }

 private:
  std::vector<int> primes_;
};

}  // namespace

PerturbationCertificate certify_perturbation(const FeatureTable& mu, const FeatureTable& f,
                                             const FeatureTable& perturbed, double eps,
                                             double v_q, double v_u) {
  PerturbationCertificate c;
  c.eps = eps;
  c.mu = mu;
  c.base_f = f;
  c.perturbed_f = perturbed;
  double s = 0.0;
  for (int v = 0; v < f.size(); ++v) {
    const double t = perturbed.values[v] - f.values[v];
    s += t * t;
  }
  c.l2_distance = std::sqrt(s);
  c.in_range = std::all_of(perturbed.values.begin(), perturbed.values.end(),
                           [](double x) { return x > 0.0 && x < 1.0; });
  std::set<double> distinct(perturbed.values.begin(), perturbed.values.end());
  c.injective = static_cast<int>(distinct.size()) == perturbed.size();
  const FeatureSpace X = flat_space(f.num_cells);
  const ControlSpec cb = ControlSpec::of(ControlKind::kColorBlind);
  const FeatureTable before = firm_best_response(cb, X, mu, f, v_q, v_u).policy;
  c.colorblind_policy = firm_best_response(cb, X, mu, perturbed, v_q, v_u).policy;
  c.colorblind_policy_unchanged = before.values == c.colorblind_policy.values;
  return c;
}

FeatureTable injective_perturbation(const FeatureTable& mu, const FeatureTable& f, double eps,
                                    double v_q, double v_u) {
  check_table(mu);
  check_table(f);
  const std::vector<double> dir = offset_directions(mu, f, v_q, v_u);
  const double max_eps = max_admissible_eps(mu, f, dir, v_q, v_u);
  if (!(eps > 0.0)) {
    throw PerturbationError("injective_perturbation: eps must be positive", max_eps);
  }
  if (eps >= max_eps) {
    throw PerturbationError("injective_perturbation: eps = " + std::to_string(eps) +
                                " flips a sign; the largest admissible eps is " +
                                std::to_string(max_eps),
                            max_eps);
  }
  FeatureTable out = apply(f, dir, eps);
  const PerturbationCertificate c = certify_perturbation(mu, f, out, eps, v_q, v_u);
  if (!c.injective) {
    throw PerturbationError(
        "injective_perturbation: eps is below the resolution that separates the cells", max_eps);
  }
  if (!c.in_range || !c.colorblind_policy_unchanged || c.l2_distance > eps) {
    throw PerturbationError("injective_perturbation: perturbed beliefs fail their checks",
                            max_eps);
  }
  return out;
}

FragilityProbeResult no_proxies_fragility_probe(double gamma, double delta, double eps) {
  const FamilyParams params = FamilyParams::of(gamma, delta);
  const FamilySignCheck signs = family_sign_conditions(params);
  if (!signs.ok) {
    throw std::invalid_argument("no_proxies_fragility_probe: sign conditions fail: " +
                                signs.detail);
  }
  const GameSpec game = cl_family(params);
  FragilityProbeResult out;
  out.gamma = gamma;
  out.delta = delta;
  out.cbar = family_threshold(params);
  out.policy = family_policy();
  const CalibratedModel model(game);
  const FeatureTable mu = model.mu(out.cbar);
  const FeatureTable f = model.f(out.cbar);
  const FeatureTable fp = injective_perturbation(mu, f, eps, game.v_q, game.v_u);
  out.perturbation = certify_perturbation(mu, f, fp, eps, game.v_q, game.v_u);
  const ControlSpec np = ControlSpec::of(ControlKind::kNoProxies);
  out.epsilon_certificate = verify_epsilon_equilibrium(game, np, out.cbar, out.policy, mu, fp, eps);
  out.exact_certificate = verify_controlled_equilibrium(game, np, out.cbar, out.policy);
  out.kept_axes_perturbed = excluded_features(fp, game.features).kept;
  out.kept_axes_exact = excluded_features(f, game.features).kept;
  return out;
}

ContinuityReport continuity_probe(const GameSpec& game, const ControlSpec& k,
                                  const CostThresholdPair& cbar, int n_samples, double eps,
                                  unsigned seed) {
  require_valid(game);
  if (n_samples < 0) throw std::invalid_argument("continuity_probe: negative sample count");
  if (!(eps >= 0.0)) throw std::invalid_argument("continuity_probe: eps must be non-negative");
  const CalibratedModel model(game);
  const LikelihoodStructure ls = likelihood_structure(game);
  const FeatureSpace& X = game.features;
  const FeatureTable mu0 = model.mu(cbar);
  const FeatureTable f0 = model.f(cbar);
  const int total = mu0.size();
  const int dim = 2 * total;

  const BestResponseResult exact = firm_best_response(k, X, mu0, f0, game.v_q, game.v_u);
  const double slack = 1e-10 * std::max(1.0, std::abs(exact.objective));
  const auto face = optimizer_face(k, X, mu0, f0, game.v_q, game.v_u, exact.objective, slack);

  auto distance_to_face = [&](const FeatureTable& d) {
    double best = std::numeric_limits<double>::infinity();
    for (const auto& lp : face) {
      const std::vector<double> p = project_onto_polytope(lp, d.values);
      double s = 0.0;
      for (int j = 0; j < total; ++j) s += (p[j] - d.values[j]) * (p[j] - d.values[j]);
      best = std::min(best, std::sqrt(s));
    }
    return best;
  };

  ContinuityReport out;
  out.control = k;
  out.eps = eps;
  out.samples = n_samples;
  const Halton halton(dim + 1);
  const long start = 1 + static_cast<long>(seed) * 100003L;
  for (int s = 0; s < n_samples; ++s) {
    const long index = start + s;
    std::vector<double> z(dim);
    double norm = 0.0;
    for (int j = 0; j < dim; ++j) {
      const double u = std::clamp(halton(index, j), 1e-12, 1.0 - 1e-12);
      z[j] = std::sqrt(2.0) * boost::math::erf_inv(2.0 * u - 1.0);
      norm += z[j] * z[j];
    }
    norm = std::sqrt(norm);
    const double radius = eps * std::pow(halton(index, dim), 1.0 / dim);
    FeatureTable mu = mu0, f = f0;
    if (norm > 0.0) {
      double shift = 0.0;
      for (int j = 0; j < total; ++j) shift += z[j];
      shift /= total;
      for (int j = 0; j < total; ++j) {
        mu.values[j] = std::max(1e-12, mu0.values[j] + radius * (z[j] - shift) / norm);
        f.values[j] = std::clamp(f0.values[j] + radius * z[total + j] / norm, 1e-9, 1.0 - 1e-9);
      }
    }
    ContinuitySample sample;
    double moved = 0.0;
    for (int j = 0; j < total; ++j) {
      moved += std::pow(mu.values[j] - mu0.values[j], 2) + std::pow(f.values[j] - f0.values[j], 2);
    }
    sample.perturbation_norm = std::sqrt(moved);
    const FeatureTable d = firm_best_response(k, X, mu, f, game.v_q, game.v_u).policy;
    sample.distance = face.empty() ? std::numeric_limits<double>::infinity() : distance_to_face(d);
    if (k.kind == ControlKind::kMistakenIdentity) {
      for (Group i : kGroups) {
        std::set<int> classes;
        for (int x = 0; x < mu.num_cells; ++x) {
          if (std::abs(d(i, x) - exact.policy(i, x)) > 1e-9) classes.insert(ls.cell_class[x]);
        }
        sample.single_likelihood_class = sample.single_likelihood_class && classes.size() <= 1;
      }
    }
    out.max_distance = std::max(out.max_distance, sample.distance);
    out.mean_distance += sample.distance / std::max(1, n_samples);
    out.per_sample.push_back(sample);
  }
  return out;
}

}  // namespace fairlab
