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

#include "fairlab/gamegen.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "fairlab/controls.h"
#include "fairlab/curves.h"

namespace fairlab {
namespace {

// Cells are (score, proxy) with the proxy varying fastest.
constexpr int kScores = 3;  // L, H-, H+
constexpr int kProxies = 2;  // W, B

int family_cell(int score, int proxy) { return score * kProxies + proxy; }

FeatureSpace family_space() {
  return FeatureSpace({{"score", {"L", "H-", "H+"}}, {"proxy", {"W", "B"}}});
}

void check_colorblind(const ColorBlindTable& t, int n, const char* what) {
  if (static_cast<int>(t.values.size()) != n) {
    throw std::invalid_argument(std::string("reverse_game: ") + what + " has the wrong size");
  }
  for (double v : t.values) {
    if (!std::isfinite(v)) {
      throw std::invalid_argument(std::string("reverse_game: ") + what + " is not finite");
    }
  }
}

}  // namespace

ExactGameSpec cl_family_exact(const FamilyParams& params) {
  const Rational& g = params.gamma;
  const Rational& d = params.delta;
  const Rational sixth(1, 6);
  const bool gamma_ok = params.limit ? (g >= 0 && g < sixth) : (g > 0 && g < sixth);
  const bool delta_ok = params.limit ? (d >= 0 && d < 1) : (d > 0 && d < 1);
  if (!gamma_ok) {
    throw std::invalid_argument("cl_family: gamma = " + to_string(g) + " outside (0, 1/6)");
  }
  if (!delta_ok) {
    throw std::invalid_argument("cl_family: delta = " + to_string(d) + " outside (0, 1)");
  }
  ExactGameSpec game;
  game.features = family_space();
  game.lambda_w = Rational(1, 2);
  game.law.class_axes = {0};
  const Rational third(1, 3);
  game.law.p_class[0] = {third, third, third};
  game.law.p_class[1] = {Rational(2, 3), sixth + g, sixth - g};
  for (int y = 0; y < kScores; ++y) {
    game.law.p_proxy[idx(Group::kW)].push_back({1 - d, d});
    game.law.p_proxy[idx(Group::kB)].push_back({d, 1 - d});
  }
  // G(0) = 1/6 with unit density on [0, 2/3] and matching exponential tails.
  game.costs = PiecewiseLinearCost<Rational>{
      {{Rational(0), sixth}, {Rational(2, 3), Rational(5, 6)}}, Rational(6), Rational(6)};
  game.v_q = 1;
  game.v_u = 1;
  game.omega = 1;
  return game;
}

GameSpec cl_family(const FamilyParams& params) { return to_double(cl_family_exact(params)); }

GameSpec cl_family(double gamma, double delta) {
  return cl_family(FamilyParams::of(gamma, delta));
}

FeatureTable family_policy() {
  const int n = kScores * kProxies;
  FeatureTable d = FeatureTable::filled(TableKind::kPolicy, n, 0.0);
  for (Group i : kGroups) {
    d(i, family_cell(1, 0)) = 1.0;
    d(i, family_cell(2, 0)) = 1.0;
  }
  return d;
}

ColorBlindTable family_colorblind_policy() {
  ColorBlindTable d{TableKind::kPolicy, std::vector<double>(kScores * kProxies, 0.0)};
  d.values[family_cell(1, 0)] = 1.0;
  d.values[family_cell(2, 0)] = 1.0;
  return d;
}

ExactThresholdPair family_threshold_exact(const FamilyParams& params) {
  return {(1 - params.delta) / 3, params.delta / 3};
}

CostThresholdPair family_threshold(const FamilyParams& params) {
  const ExactThresholdPair c = family_threshold_exact(params);
  return {to_double(c.w), to_double(c.b)};
}

FamilySignCheck family_sign_conditions(const FamilyParams& params) {
  const GameSpec game = cl_family(params);
  const CostThresholdPair c = family_threshold(params);
  const CalibratedModel model(game);
  const auto [mu_cb, f_cb] = colorblind_aggregate(model.mu(c), model.f(c));
  FamilySignCheck out;
  out.f_cb = f_cb.values;
  out.ok = true;
  const ColorBlindTable d = family_colorblind_policy();
  for (int x = 0; x < static_cast<int>(f_cb.values.size()); ++x) {
    const bool above = f_cb.values[x] > 0.5;
    if (above != (d.values[x] == 1.0)) {
      out.ok = false;
      out.detail += "f_cb" + game.features.cell_name(x) + " = " +
                    std::to_string(f_cb.values[x]) + " is on the wrong side of 1/2; ";
    }
  }
  return out;
}

ReverseGameResult reverse_game(const ReverseGameInput& input) {
  const FeatureSpace& X = input.features;
  const int n = X.num_cells();
  if (n == 0) throw std::invalid_argument("reverse_game: empty feature space");
  check_colorblind(input.d_cb, n, "d_cb");
  check_colorblind(input.mu_cb, n, "mu_cb");
  check_colorblind(input.f_cb, n, "f_cb");
  const double fbar = input.threshold;
  if (!(fbar > 0.0 && fbar < 1.0)) {
    throw std::invalid_argument("reverse_game: threshold must lie in (0, 1)");
  }
  double mass = 0.0;
  for (int x = 0; x < n; ++x) {
    if (!(input.mu_cb.values[x] > 0.0)) {
      throw std::invalid_argument("reverse_game: mu_cb lacks full support at " + X.cell_name(x));
    }
    const double fx = input.f_cb.values[x];
    if (!(fx > 0.0 && fx < 1.0)) {
      throw std::invalid_argument("reverse_game: f_cb outside (0, 1) at " + X.cell_name(x));
    }
    const double dx = input.d_cb.values[x];
    if (dx < 0.0 || dx > 1.0) {
      throw std::invalid_argument("reverse_game: d_cb outside [0, 1] at " + X.cell_name(x));
    }
    if ((fx > fbar && dx != 1.0) || (fx < fbar && dx != 0.0)) {
      throw std::invalid_argument("reverse_game: d_cb is not a threshold function of f_cb at " +
                                  X.cell_name(x));
    }
    mass += input.mu_cb.values[x];
  }
  if (std::abs(mass - 1.0) > kNormalizationTol) {
    throw std::invalid_argument("reverse_game: mu_cb does not sum to one");
  }

  double share = 0.0;
  for (int x = 0; x < n; ++x) share += input.mu_cb.values[x] * input.f_cb.values[x];
  std::vector<double> q(n), u(n);
  double cbar = 0.0;
  for (int x = 0; x < n; ++x) {
    const double m = input.mu_cb.values[x], fx = input.f_cb.values[x];
    q[x] = m * fx / share;
    u[x] = m * (1.0 - fx) / (1.0 - share);
    if (std::abs(q[x] / u[x] - 1.0) <= kLikelihoodTol) {
      throw std::invalid_argument("reverse_game: f_cb" + X.cell_name(x) +
                                  " equals the qualified share, so the likelihood ratio is one");
    }
    cbar += input.d_cb.values[x] * (q[x] - u[x]);
  }

  ReverseGameResult out;
  out.qualified_share = share;
  out.cbar = {cbar, cbar};
  GameSpec& game = out.game;
  game.features = X;
  game.lambda_w = 0.5;
  std::vector<int> all(X.num_axes());
  std::iota(all.begin(), all.end(), 0);
  game.law.class_axes = all;
  game.law.p_class[0] = q;
  game.law.p_class[1] = u;
  for (Group i : kGroups) game.law.p_proxy[idx(i)].assign(n, std::vector<double>{1.0});
  // Unit density around cbar, exponential tails with a continuous density.
  game.costs = PiecewiseLinearCost<double>{
      {{cbar - share / 2, share / 2}, {cbar + (1.0 - share) / 2, (1.0 + share) / 2}},
      2.0 / share, 2.0 / (1.0 - share)};
  game.v_q = 1.0 - fbar;
  game.v_u = fbar;
  game.omega = 1.0;
  require_valid(game);

  out.policy = FeatureTable::filled(TableKind::kPolicy, n, 0.0);
  for (Group i : kGroups) {
    for (int x = 0; x < n; ++x) out.policy(i, x) = input.d_cb.values[x];
  }

  const CalibratedModel model(game);
  const auto [mu_cb, f_cb] = colorblind_aggregate(model.mu(out.cbar), model.f(out.cbar));
  double res = 0.0;
  for (int x = 0; x < n; ++x) {
    res = std::max({res, std::abs(mu_cb.values[x] - input.mu_cb.values[x]),
                    std::abs(f_cb.values[x] - input.f_cb.values[x])});
  }
  ReverseGameCertificate& cert = out.certificate;
  cert.roundtrip_residual = res;
  cert.equilibrium = verify_controlled_equilibrium(game, ControlSpec::of(ControlKind::kUn),
                                                   out.cbar, out.policy);
  EquilibriumRecord rec;
  rec.cbar = out.cbar;
  rec.policy = out.policy;
  rec.key = "reverse";
  cert.non_discriminatory = classify_equilibrium(game, rec).non_discriminatory;
  cert.ok = res <= 1e-9 && cert.equilibrium.accepted && cert.non_discriminatory;
  return out;
}

ImpossibilityWitness impossibility_witness(double gamma, double delta) {
  const FamilyParams params = FamilyParams::of(gamma, delta);
  const FamilySignCheck signs = family_sign_conditions(params);
  if (!signs.ok) {
    throw std::invalid_argument("impossibility_witness: sign conditions fail: " + signs.detail);
  }
  ImpossibilityWitness w;
  w.game_a = cl_family(params);
  w.features = w.game_a.features;
  w.cbar_a = family_threshold(params);
  const FeatureTable d = family_policy();
  w.d_cb = family_colorblind_policy();
  const CalibratedModel model_a(w.game_a);
  std::tie(w.mu_cb, w.f_cb) = colorblind_aggregate(model_a.mu(w.cbar_a), model_a.f(w.cbar_a));
  w.certificate_a = verify_controlled_equilibrium(
      w.game_a, ControlSpec::of(ControlKind::kColorBlind), w.cbar_a, d);
  w.a_discriminatory = std::abs(w.cbar_a.w - w.cbar_a.b) > 1e-9;
  w.trace.push_back("game A: (cbar*, d*) is a color-blind controlled equilibrium with cbar(w) = " +
                    std::to_string(w.cbar_a.w) + " != cbar(b) = " +
                    std::to_string(w.cbar_a.b) + ", so it is discriminatory");

  const ReverseGameResult rev = reverse_game({w.features, w.d_cb, w.mu_cb, w.f_cb, 0.5});
  w.game_b = rev.game;
  w.cbar_b = rev.cbar;
  w.certificate_b = rev.certificate.equilibrium;
  w.b_non_discriminatory = rev.certificate.non_discriminatory;
  w.roundtrip_residual = rev.certificate.roundtrip_residual;
  w.trace.push_back("game B: (cbar, d_cb) is a non-discriminatory equilibrium at cbar = " +
                    std::to_string(w.cbar_b.w));

  const CalibratedModel model_b(w.game_b);
  const auto [mu_b, f_b] = colorblind_aggregate(model_b.mu(w.cbar_b), model_b.f(w.cbar_b));
  double res = 0.0;
  for (size_t x = 0; x < mu_b.values.size(); ++x) {
    res = std::max({res, std::abs(mu_b.values[x] - w.mu_cb.values[x]),
                    std::abs(f_b.values[x] - w.f_cb.values[x])});
  }
  w.shared_residual = res;
  w.trace.push_back(
      "both games present the same (X, mu_cb, f_cb) and d_cb; an ideal control must exclude "
      "d_cb in game A and admit it in game B, yet it sees identical inputs: contradiction");
  w.ok = w.certificate_a.accepted && w.a_discriminatory && rev.certificate.ok &&
         w.b_non_discriminatory && w.shared_residual <= 1e-9 && w.roundtrip_residual <= 1e-9;
  return w;
}

}  // namespace fairlab
