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

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace fairlab {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kPointTol = 1e-9;

bool near(double a, double b, double tol) {
  return std::abs(a - b) <= tol * std::max(1.0, std::max(std::abs(a), std::abs(b)));
}

void check_range(const std::vector<double>& l, double x) {
  const double top = l.back();
  if (!(x >= -kPointTol * top && x <= top * (1.0 + kPointTol))) {
    throw std::out_of_range("likelihood mixture outside [0, l_n]");
  }
}

}  // namespace

WWCurve ww_curve(const GameSpec& game, const LikelihoodStructure& ls) {
  WWCurve curve;
  const int n = ls.n();
  curve.l.resize(n + 1);
  curve.ww.assign(n + 1, 0.0);
  for (int m = 0; m <= n; ++m) curve.l[m] = ls.value(m);
  double acc = 0.0;
  for (int m = n - 1; m >= 1; --m) {
    acc += ls.mass_q[m] - ls.mass_u[m];
    curve.ww[m] = game.omega * acc;
  }
  return curve;
}

WWCurve ww_curve(const GameSpec& game) { return ww_curve(game, likelihood_structure(game)); }

double ww_eval(const WWCurve& curve, double l) {
  check_range(curve.l, l);
  const auto& x = curve.l;
  if (l <= 0.0) return curve.ww.front();
  if (l >= x.back()) return curve.ww.back();
  const size_t j = std::upper_bound(x.begin(), x.end(), l) - x.begin();
  const double t = (l - x[j - 1]) / (x[j] - x[j - 1]);
  return curve.ww[j - 1] + t * (curve.ww[j] - curve.ww[j - 1]);
}

bool ww_single_peaked(const WWCurve& curve) {
  for (size_t m = 1; m < curve.l.size(); ++m) {
    const double step = curve.ww[m] - curve.ww[m - 1];
    if (curve.l[m] < 1.0 ? !(step > 0.0) : !(step < 0.0)) return false;
  }
  return true;
}

EECorrespondence ee_correspondence(const GameSpec& game, const LikelihoodStructure& ls) {
  EECorrespondence corr;
  corr.l = ls.values;
  for (double l : ls.values) {
    corr.thresholds.push_back(cost_quantile(game.costs, 1.0 / (game.v_q / game.v_u * l + 1.0)));
  }
  return corr;
}

EECorrespondence ee_correspondence(const GameSpec& game) {
  return ee_correspondence(game, likelihood_structure(game));
}

Interval ee_set(const EECorrespondence& corr, double l) {
  check_range(corr.l, l);
  const auto& x = corr.l;
  const auto& e = corr.thresholds;
  const int n = static_cast<int>(x.size());
  if (l <= 1e-12 * x.back()) return {e.front(), kInf};
  for (int m = 0; m < n; ++m) {
    if (near(l, x[m], 1e-12)) {
      if (m == n - 1) return {-kInf, e[m]};
      return {e[m + 1], e[m]};
    }
    if (l < x[m]) return {e[m], e[m]};
  }
  return {-kInf, e.back()};
}

std::vector<Segment> ee_segments(const EECorrespondence& corr, double c_lo, double c_hi) {
  std::vector<Segment> out;
  const auto& x = corr.l;
  const auto& e = corr.thresholds;
  const int n = static_cast<int>(x.size());
  out.push_back({0.0, std::max(e[0], c_lo), 0.0, c_hi});
  double prev = 0.0;
  for (int m = 0; m < n; ++m) {
    out.push_back({prev, e[m], x[m], e[m]});
    const double lo = m + 1 < n ? e[m + 1] : c_lo;
    out.push_back({x[m], std::max(lo, c_lo), x[m], std::min(e[m], c_hi)});
    prev = x[m];
  }
  return out;
}

std::vector<Intersection> intersections(const WWCurve& ww, const EECorrespondence& ee) {
  std::vector<Intersection> out;
  const auto& l = ww.l;  // l_0..l_n
  const auto& w = ww.ww;
  const auto& e = ee.thresholds;  // e[m-1] = EE_bar(l_m)
  const int n = static_cast<int>(e.size());
  auto push = [&](double li, double c, IntersectionKind kind, int m, bool degenerate) {
    for (const auto& p : out) {
      if (near(p.l, li, kPointTol) && near(p.c, c, kPointTol)) return;
    }
    out.push_back({li, c, kind, m, degenerate});
  };
  // Interval endpoints within this tolerance count as touching.
  const double touch = 1e-12;
  if (e[0] <= touch) push(0.0, 0.0, IntersectionKind::kOrigin, 0, std::abs(e[0]) <= touch);
  for (int m = 1; m <= n; ++m) {
    // Open segment (l_{m-1}, l_m): WW equals EE_bar(l_m).
    const double target = e[m - 1];
    const double a = w[m - 1], b = w[m];
    const double lo = std::min(a, b), hi = std::max(a, b);
    if (target > lo + touch && target < hi - touch) {
      const double t = (target - a) / (b - a);
      push(l[m - 1] + t * (l[m] - l[m - 1]), target, IntersectionKind::kSegment, m, false);
    }
    // Breakpoint l_m.
    if (m < n) {
      const double c = w[m];
      if (c >= e[m] - touch && c <= e[m - 1] + touch) {
        const bool deg = std::abs(c - e[m]) <= touch || std::abs(c - e[m - 1]) <= touch;
        push(l[m], c, IntersectionKind::kBreakpoint, m, deg);
      }
    } else if (e[n - 1] >= -touch) {
      push(l[n], 0.0, IntersectionKind::kEnd, n, std::abs(e[n - 1]) <= touch);
    }
  }
  std::sort(out.begin(), out.end(),
            [](const Intersection& p, const Intersection& q) { return p.l < q.l; });
  return out;
}

std::vector<Intersection> intersections(const GameSpec& game) {
  const LikelihoodStructure ls = likelihood_structure(game);
  return intersections(ww_curve(game, ls), ee_correspondence(game, ls));
}

std::string intersection_label(int index) { return "Eq" + std::to_string(index + 1); }

LikelihoodMixture make_mixture(const LikelihoodStructure& ls, double l) {
  check_range(ls.values, l);
  l = std::clamp(l, 0.0, ls.values.back());
  LikelihoodMixture mix;
  mix.l = l;
  int k = 1;
  while (k < ls.n() && ls.value(k) < l && !near(ls.value(k), l, 1e-12)) ++k;
  mix.ceil_index = k;
  mix.ceil = ls.value(k);
  mix.sub_ceil = ls.value(k - 1);
  mix.weight = near(mix.ceil, l, 1e-12)
                   ? 0.0
                   : std::clamp((mix.ceil - l) / (mix.ceil - mix.sub_ceil), 0.0, 1.0);
  return mix;
}

std::vector<double> mixture_levels(const LikelihoodStructure& ls, double l) {
  const LikelihoodMixture mix = make_mixture(ls, l);
  std::vector<double> levels(ls.n(), 0.0);
  for (int m = 1; m <= ls.n(); ++m) {
    if (m > mix.ceil_index) levels[m - 1] = 1.0;
    if (m == mix.ceil_index) levels[m - 1] = mix.weight;
  }
  return levels;
}

std::optional<double> mixture_of_levels(const LikelihoodStructure& ls,
                                        const std::vector<double>& levels, double tol) {
  int k = 0;
  for (int m = 1; m <= ls.n(); ++m) {
    if (levels[m - 1] < 1.0 - tol) k = m;
  }
  if (k == 0) return 0.0;
  for (int m = 1; m < k; ++m) {
    if (levels[m - 1] > tol) return std::nullopt;
  }
  const double level = std::max(0.0, levels[k - 1]);
  if (level <= tol) return ls.value(k);
  return ls.value(k) - level * (ls.value(k) - ls.value(k - 1));
}

FeatureTable policy_for_mixture(const GameSpec& game, const LikelihoodStructure& ls,
                                double l_w, double l_b) {
  const int n = game.features.num_cells();
  auto d = FeatureTable::filled(TableKind::kPolicy, n, 0.0);
  const std::array<std::vector<double>, 2> levels = {mixture_levels(ls, l_w),
                                                     mixture_levels(ls, l_b)};
  for (Group i : kGroups) {
    for (int x = 0; x < n; ++x) d(i, x) = levels[idx(i)][ls.cell_class[x]];
  }
  return d;
}

FeatureTable fair_policy(const GameSpec& game, const LikelihoodStructure& ls, double l) {
  return policy_for_mixture(game, ls, l, l);
}

std::optional<double> fair_mixture(const GameSpec& game, const LikelihoodStructure& ls,
                                   const FeatureTable& d, double tol) {
  const auto lw = conditional_policy(game, ls, d, Group::kW);
  const auto lb = conditional_policy(game, ls, d, Group::kB);
  for (int m = 0; m < ls.n(); ++m) {
    if (std::abs(lw[m] - lb[m]) > tol) return std::nullopt;
  }
  return mixture_of_levels(ls, lw, tol);
}

std::string equivalence_key(const std::string& w_part, const std::string& b_part) {
  return "w:" + w_part + "|b:" + b_part;
}

std::vector<EquilibriumRecord> enumerate_equilibria(const GameSpec& game) {
  require_valid(game);
  const LikelihoodStructure ls = likelihood_structure(game);
  const WWCurve ww = ww_curve(game, ls);
  const EECorrespondence ee = ee_correspondence(game, ls);
  const auto points = intersections(ww, ee);
  const CalibratedModel model(game);
  std::vector<EquilibriumRecord> out;
  for (int a = 0; a < static_cast<int>(points.size()); ++a) {
    for (int b = 0; b < static_cast<int>(points.size()); ++b) {
      EquilibriumRecord r;
      r.cbar = {points[a].c, points[b].c};
      r.mixtures = {points[a].l, points[b].l};
      r.intersection = {a, b};
      r.policy = policy_for_mixture(game, ls, points[a].l, points[b].l);
      const FeatureTable mu = model.mu(r.cbar);
      const FeatureTable f = model.f(r.cbar);
      for (Group i : kGroups) r.rates[idx(i)] = group_rates(i, r.policy, mu, f);
      r.key = equivalence_key(intersection_label(a), intersection_label(b));
      r.non_discriminatory = classify_equilibrium(game, r).non_discriminatory;
      out.push_back(std::move(r));
    }
  }
  return out;
}

EquilibriumClassification classify_equilibrium(const GameSpec& game, const EquilibriumRecord& record) {
  const LikelihoodStructure ls = likelihood_structure(game);
  const CalibratedModel model(game);
  const FeatureTable mu = model.mu(record.cbar);
  EquilibriumClassification out;
  out.equal_thresholds = std::abs(record.cbar.w - record.cbar.b) <= 1e-9;
  out.fair = fair_mixture(game, ls, record.policy).has_value();
  out.equal_acceptance = std::abs(acceptance_rate(Group::kW, record.policy, mu) -
                                  acceptance_rate(Group::kB, record.policy, mu)) <= 1e-9;
  if (out.equal_thresholds != out.fair || out.fair != out.equal_acceptance) {
    throw InvariantViolation("equilibrium classification conditions disagree for " +
                             record.key);
  }
  out.non_discriminatory = out.fair;
  return out;
}

}  // namespace fairlab
