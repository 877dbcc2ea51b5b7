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
#include <cstdio>
#include <functional>
#include <limits>
#include <set>
#include <stdexcept>
#include <utility>

namespace fairlab {
namespace {

CostThresholdPair incentive(const CalibratedModel& model, double omega, const FeatureTable& d) {
  CostThresholdPair c{0.0, 0.0};
  for (Group i : kGroups) {
    double s = 0.0;
    for (int x = 0; x < model.num_cells(); ++x) {
      s += d(i, x) * (model.p(i, ClassLabel::kQualified, x) -
                      model.p(i, ClassLabel::kUnqualified, x));
    }
    c[i] = omega * s;
  }
  return c;
}

double sup_gap(const CostThresholdPair& a, const CostThresholdPair& b) {
  return std::max(std::abs(a.w - b.w), std::abs(a.b - b.b));
}

double l2_distance(const FeatureTable& a, const FeatureTable& b) {
  double s = 0.0;
  for (size_t j = 0; j < a.values.size(); ++j) {
    const double t = a.values[j] - b.values[j];
    s += t * t;
  }
  return std::sqrt(s);
}

// The two firm-side residuals of a candidate policy at given (mu, f).
void firm_side(const GameSpec& game, const ControlSpec& k, const FeatureTable& mu,
               const FeatureTable& f, const FeatureTable& d, EquilibriumCertificate& cert) {
  const BestResponseResult br = firm_best_response(k, game.features, mu, f, game.v_q, game.v_u);
  const double value = firm_utility(d, mu, f, game.v_q, game.v_u);
  cert.utility_gap = std::max(0.0, br.objective - value);
  cert.feasibility_residual = feasible(k, game.features, mu, f, d).residual;
  cert.firm_residual = cert.utility_gap + cert.feasibility_residual;
}

std::string format_threshold(double c) {
  char buf[48];
  std::snprintf(buf, sizeof(buf), "c=%.6f", c);
  return buf;
}

}  // namespace

CostThresholdPair applicant_best_response(const GameSpec& game, const FeatureTable& d) {
  check_table(d);
  if (d.num_cells != game.features.num_cells()) {
    throw std::invalid_argument("applicant_best_response: policy shape does not match X");
  }
  return incentive(CalibratedModel(game), game.omega, d);
}

double applicant_utility(const GameSpec& game, Group i, double cbar_i, const FeatureTable& d) {
  const CalibratedModel model(game);
  const FeatureTable mu = model.mu({cbar_i, cbar_i});
  double gain = 0.0;
  for (int x = 0; x < model.num_cells(); ++x) gain += mu(i, x) / game.lambda(i) * d(i, x);
  return game.omega * gain - mean_below(game.costs, cbar_i);
}

EquilibriumCertificate verify_controlled_equilibrium(const GameSpec& game, const ControlSpec& k,
                                                     const CostThresholdPair& cbar,
                                                     const FeatureTable& d, double tol) {
  const CalibratedModel model(game);
  EquilibriumCertificate cert;
  cert.best_response_residual = sup_gap(cbar, incentive(model, game.omega, d));
  firm_side(game, k, model.mu(cbar), model.f(cbar), d, cert);
  cert.accepted = cert.best_response_residual <= tol && cert.firm_residual <= tol;
  return cert;
}

EquilibriumCertificate verify_epsilon_equilibrium(const GameSpec& game, const ControlSpec& k,
                                                  const CostThresholdPair& cbar,
                                                  const FeatureTable& d, const FeatureTable& mu,
                                                  const FeatureTable& f, double eps,
                                                  double tol) {
  const CalibratedModel model(game);
  EquilibriumCertificate cert;
  cert.eps = eps;
  const FeatureTable mu_re_t = model.mu(cbar);
  const FeatureTable f_re_t = model.f(cbar);
  const double dm = l2_distance(mu, mu_re_t);
  const double df = l2_distance(f, f_re_t);
  cert.distance = std::sqrt(dm * dm + df * df);
  cert.best_response_residual = sup_gap(cbar, incentive(model, game.omega, d));
  firm_side(game, k, mu, f, d, cert);
  cert.accepted = cert.distance <= eps * (1.0 + 1e-12) && cert.best_response_residual <= tol &&
                  cert.firm_residual <= tol;
  return cert;
}

std::string verdict_name(Verdict v) {
  switch (v) {
    case Verdict::kPass: return "pass";
    case Verdict::kFail: return "fail";
    case Verdict::kIndeterminate: return "indeterminate";
  }
  return "?";
}

// ---------------------------------------------------------------------------
// Controlled equilibrium search.

namespace {

struct Evaluation {
  double c[2];
  double r[2];  // incentive(d) - c
  FeatureTable d;
};

class Searcher {
 public:
  Searcher(const GameSpec& game, const ControlSpec& k, const ControlledSearchOptions& options)
      : game_(game), k_(k), options_(options), model_(game), ls_(likelihood_structure(game)) {
    ww_ = ww_curve(game, ls_);
    ee_ = ee_correspondence(game, ls_);
    points_ = intersections(ww_, ee_);
    for (double v : ww_.ww) c_max_ = std::max(c_max_, v);
  }

  ControlledSearchResult run() {
    // Candidates with an exactly known threshold pair come first so that the
    // refined search only fills gaps.
    for (const auto& a : points_) {
      for (const auto& b : points_) try_exact({a.c, b.c}, "intersection");
    }
    for (double a : ww_.ww) {
      for (double b : ww_.ww) try_exact({a, b}, "lattice");
    }
    if (options_.safety_net) simplicial();

    ControlledSearchResult out;
    out.c_max = c_max_;
    out.evaluations = evaluations_;
    out.unresolved = unresolved_;
    for (auto& rec : found_) {
      finish(rec);
      out.records.push_back(std::move(rec));
    }
    std::stable_sort(out.records.begin(), out.records.end(),
                     [](const auto& x, const auto& y) { return x.key < y.key; });
    return out;
  }

 private:
  Evaluation evaluate(double cw, double cb) {
    ++evaluations_;
    Evaluation e;
    e.c[0] = cw;
    e.c[1] = cb;
    const CostThresholdPair cbar{cw, cb};
    const BestResponseResult br =
        firm_best_response(k_, game_.features, model_.mu(cbar), model_.f(cbar), game_.v_q,
                           game_.v_u);
    e.d = br.policy;
    const CostThresholdPair inc = incentive(model_, game_.omega, e.d);
    e.r[0] = inc.w - cw;
    e.r[1] = inc.b - cb;
    return e;
  }

  bool known(const CostThresholdPair& c) const {
    for (const auto& rec : found_) {
      if (sup_gap(rec.cbar, c) <= options_.dedup) return true;
    }
    return false;
  }

  bool accept(const CostThresholdPair& c, const FeatureTable& d, const std::string& source) {
    if (known(c)) return true;
    const EquilibriumCertificate cert = verify_controlled_equilibrium(game_, k_, c, d,
                                                                      options_.tol);
    if (!cert.accepted) return false;
    ControlledEquilibriumRecord rec;
    rec.control = k_;
    rec.cbar = c;
    rec.policy = d;
    rec.certificate = cert;
    rec.source = source;
    found_.push_back(std::move(rec));
    return true;
  }

  // Looks for an optimizer of k at cbar whose applicant best response is cbar.
  bool try_exact(const CostThresholdPair& c, const std::string& source) {
    if (known(c)) return true;
    const FeatureTable mu = model_.mu(c);
    const FeatureTable f = model_.f(c);
    const BestResponseResult br = firm_best_response(k_, game_.features, mu, f, game_.v_q,
                                                     game_.v_u);
    ++evaluations_;
    if (accept(c, br.policy, source)) return true;
    const double slack = 1e-10 * std::max(1.0, std::abs(br.objective));
    const int n = model_.num_cells();
    const FeatureTable coef = firm_coefficients(mu, f, game_.v_q, game_.v_u);
    for (LinearProgram lp :
         optimizer_face(k_, game_.features, mu, f, game_.v_q, game_.v_u, br.objective, slack)) {
      for (Group i : kGroups) {
        LpRow row;
        row.a.assign(2 * n, 0.0);
        for (int x = 0; x < n; ++x) {
          row.a[idx(i) * n + x] = game_.omega * (model_.p(i, ClassLabel::kQualified, x) -
                                                 model_.p(i, ClassLabel::kUnqualified, x));
        }
        row.sense = RowSense::kEq;
        row.rhs = c[i];
        lp.rows.push_back(std::move(row));
      }
      lp.objective = coef.values;
      const LpSolution sol = solve_lp(lp);
      if (!sol.optimal()) continue;
      FeatureTable d = FeatureTable::filled(TableKind::kPolicy, n, 0.0);
      for (int j = 0; j < 2 * n; ++j) d.values[j] = std::clamp(sol.x[j], 0.0, 1.0);
      if (accept(c, d, source)) return true;
    }
    return false;
  }

  // Barycentric weights of the origin in conv{r0, r1, r2}, if it lies there.
  static bool zero_weights(const Evaluation* v[3], double lam[3]) {
    const double ax = v[1]->r[0] - v[0]->r[0], ay = v[1]->r[1] - v[0]->r[1];
    const double bx = v[2]->r[0] - v[0]->r[0], by = v[2]->r[1] - v[0]->r[1];
    const double area = ax * by - ay * bx;
    const double scale = std::max({std::abs(ax), std::abs(ay), std::abs(bx), std::abs(by),
                                   1e-300});
    constexpr double kSlack = -1e-9;
    if (std::abs(area) > 1e-14 * scale * scale) {
      const double px = -v[0]->r[0], py = -v[0]->r[1];
      lam[1] = (px * by - py * bx) / area;
      lam[2] = (ax * py - ay * px) / area;
      lam[0] = 1.0 - lam[1] - lam[2];
      return lam[0] >= kSlack && lam[1] >= kSlack && lam[2] >= kSlack;
    }
    // Collinear images: the origin has to sit on one of the edges.
    for (int a = 0; a < 3; ++a) {
      const int b = (a + 1) % 3;
      const double ux = v[a]->r[0], uy = v[a]->r[1];
      const double wx = v[b]->r[0], wy = v[b]->r[1];
      const double dx = wx - ux, dy = wy - uy;
      const double len2 = dx * dx + dy * dy;
      double t = 0.0;
      if (len2 > 0.0) t = std::clamp(-(ux * dx + uy * dy) / len2, 0.0, 1.0);
      const double ex = ux + t * dx, ey = uy + t * dy;
      if (std::hypot(ex, ey) <= 1e-12 * std::max(1.0, scale)) {
        lam[0] = lam[1] = lam[2] = 0.0;
        lam[a] = 1.0 - t;
        lam[b] = t;
        return true;
      }
    }
    return false;
  }

  void simplicial() {
    const int g = std::max(2, options_.grid);
    const double bound = c_max_ * (1.0 + 1e-3) + 1e-6;
    const double h = 2.0 * bound / g;
    std::vector<Evaluation> grid;
    grid.reserve(static_cast<size_t>(g + 1) * (g + 1));
    for (int a = 0; a <= g; ++a) {
      for (int b = 0; b <= g; ++b) grid.push_back(evaluate(-bound + a * h, -bound + b * h));
    }
    auto at = [&](int a, int b) -> const Evaluation& { return grid[a * (g + 1) + b]; };
    for (int a = 0; a < g; ++a) {
      for (int b = 0; b < g; ++b) {
        for (int tri = 0; tri < 2; ++tri) {
          const Evaluation* v[3] = {&at(a, b), tri == 0 ? &at(a + 1, b) : &at(a, b + 1),
                                    &at(a + 1, b + 1)};
          double lam[3];
          if (!zero_weights(v, lam)) continue;
          bool covered = false;
          for (const auto& rec : found_) {
            if (rec.cbar.w >= v[0]->c[0] - h && rec.cbar.w <= v[0]->c[0] + 2 * h &&
                rec.cbar.b >= v[0]->c[1] - h && rec.cbar.b <= v[0]->c[1] + 2 * h) {
              covered = true;
            }
          }
          if (covered) continue;
          int budget = options_.node_budget;
          Evaluation e0 = *v[0], e1 = *v[1], e2 = *v[2];
          if (!refine(e0, e1, e2, 0, budget)) {
            char buf[128];
            std::snprintf(buf, sizeof(buf), "unresolved simplex near (%.9f, %.9f)",
                          v[0]->c[0] + 0.5 * h, v[0]->c[1] + 0.5 * h);
            unresolved_.push_back(buf);
          }
        }
      }
    }
  }

  bool polish(const Evaluation* v[3], const double lam[3]) {
    for (int j = 0; j < 3; ++j) {
      const CostThresholdPair c{v[j]->c[0] + v[j]->r[0], v[j]->c[1] + v[j]->r[1]};
      if (accept(c, v[j]->d, "simplicial")) return true;
    }
    CostThresholdPair c{0.0, 0.0};
    for (int j = 0; j < 3; ++j) {
      c.w += lam[j] * v[j]->c[0];
      c.b += lam[j] * v[j]->c[1];
    }
    if (try_exact(c, "simplicial")) return true;
    FeatureTable d = FeatureTable::filled(TableKind::kPolicy, model_.num_cells(), 0.0);
    for (int j = 0; j < 3; ++j) {
      for (size_t t = 0; t < d.values.size(); ++t) d.values[t] += lam[j] * v[j]->d.values[t];
    }
    return accept(c, d, "simplicial");
  }

  bool refine(const Evaluation& e0, const Evaluation& e1, const Evaluation& e2, int depth,
              int& budget) {
    const Evaluation* v[3] = {&e0, &e1, &e2};
    double lam[3];
    if (!zero_weights(v, lam)) return false;
    double diam = 0.0;
    for (int a = 0; a < 3; ++a) {
      for (int b = a + 1; b < 3; ++b) {
        diam = std::max(diam, std::max(std::abs(v[a]->c[0] - v[b]->c[0]),
                                       std::abs(v[a]->c[1] - v[b]->c[1])));
      }
    }
    if (polish(v, lam)) return true;
    if (depth >= options_.max_depth || diam < 1e-12 || budget <= 0) return false;
    budget -= 3;
    const Evaluation m01 = evaluate(0.5 * (e0.c[0] + e1.c[0]), 0.5 * (e0.c[1] + e1.c[1]));
    const Evaluation m12 = evaluate(0.5 * (e1.c[0] + e2.c[0]), 0.5 * (e1.c[1] + e2.c[1]));
    const Evaluation m02 = evaluate(0.5 * (e0.c[0] + e2.c[0]), 0.5 * (e0.c[1] + e2.c[1]));
    return refine(e0, m01, m02, depth + 1, budget) || refine(m01, e1, m12, depth + 1, budget) ||
           refine(m02, m12, e2, depth + 1, budget) || refine(m01, m12, m02, depth + 1, budget);
  }

  void finish(ControlledEquilibriumRecord& rec) const {
    rec.mu = model_.mu(rec.cbar);
    rec.f = model_.f(rec.cbar);
    for (Group i : kGroups) {
      rec.rates[idx(i)] = group_rates(i, rec.policy, rec.mu, rec.f);
      const auto levels = conditional_policy(game_, ls_, rec.policy, i);
      rec.mixtures[idx(i)] = mixture_of_levels(ls_, levels, 1e-7);
      rec.intersection[idx(i)] = match_intersection(rec.mixtures[idx(i)], rec.cbar[i]);
    }
    auto part = [&](Group i) {
      const auto& m = rec.intersection[idx(i)];
      return m ? intersection_label(*m) : format_threshold(rec.cbar[i]);
    };
    rec.key = equivalence_key(part(Group::kW), part(Group::kB));
    const bool equal_c = std::abs(rec.cbar.w - rec.cbar.b) <= 1e-7;
    const bool fair = fair_mixture(game_, ls_, rec.policy, 1e-7).has_value();
    const bool equal_ar = std::abs(rec.rates[0].acceptance - rec.rates[1].acceptance) <= 1e-7;
    rec.non_discriminatory = equal_c && fair && equal_ar;
    rec.uncontrolled_equilibrium =
        verify_controlled_equilibrium(game_, ControlSpec::of(ControlKind::kUn), rec.cbar,
                                      rec.policy, options_.tol)
            .accepted;
  }

  std::optional<int> match_intersection(const std::optional<double>& l, double c) const {
    if (!l) return std::nullopt;
    for (int m = 0; m < static_cast<int>(points_.size()); ++m) {
      if (std::abs(points_[m].l - *l) <= 1e-6 * std::max(1.0, points_[m].l) &&
          std::abs(points_[m].c - c) <= 1e-6) {
        return m;
      }
    }
    return std::nullopt;
  }

  const GameSpec& game_;
  ControlSpec k_;
  ControlledSearchOptions options_;
  CalibratedModel model_;
  LikelihoodStructure ls_;
  WWCurve ww_;
  EECorrespondence ee_;
  std::vector<Intersection> points_;
  double c_max_ = 0.0;
  long evaluations_ = 0;
  std::vector<ControlledEquilibriumRecord> found_;
  std::vector<std::string> unresolved_;
};

}  // namespace

ControlledSearchResult controlled_equilibria(const GameSpec& game, const ControlSpec& k,
                                             const ControlledSearchOptions& options) {
  const ValidationReport report = validate_game(game);
  if (report.degenerate) {
    ControlledSearchResult out;
    out.degenerate = true;
    return out;
  }
  require_valid(game);
  return Searcher(game, k, options).run();
}

std::string controlled_key(const GameSpec& game, const CostThresholdPair& cbar,
                           const FeatureTable& d) {
  const LikelihoodStructure ls = likelihood_structure(game);
  const auto points = intersections(game);
  auto part = [&](Group i) {
    const auto l = mixture_of_levels(ls, conditional_policy(game, ls, d, i), 1e-7);
    if (l) {
      for (int m = 0; m < static_cast<int>(points.size()); ++m) {
        if (std::abs(points[m].l - *l) <= 1e-6 * std::max(1.0, points[m].l) &&
            std::abs(points[m].c - cbar[i]) <= 1e-6) {
          return intersection_label(m);
        }
      }
    }
    return format_threshold(cbar[i]);
  };
  return equivalence_key(part(Group::kW), part(Group::kB));
}

// ---------------------------------------------------------------------------
// Ideal-control checks.

namespace {

RateInterval interval_of(const FeatureTable& d, const FeatureTable& mu) {
  const double a = acceptance_rate(Group::kW, d, mu);
  const double b = acceptance_rate(Group::kB, d, mu);
  return {std::min(a, b), std::max(a, b)};
}

}  // namespace

GainsVerdict gains_check(const GameSpec& game, const ControlSpec& k, const EquilibriumRecord& eq) {
  constexpr double kTol = 1e-9;
  const CalibratedModel model(game);
  const FeatureTable mu = model.mu(eq.cbar);
  const FeatureTable f = model.f(eq.cbar);
  const int n = model.num_cells();
  GainsVerdict out;
  out.key = eq.key;
  out.before = interval_of(eq.policy, mu);

  const BestResponseResult br = firm_best_response(k, game.features, mu, f, game.v_q, game.v_u);
  const FeatureTable coef = firm_coefficients(mu, f, game.v_q, game.v_u);
  std::vector<FeatureTable> samples = br.face_vertices;
  if (samples.empty()) samples.push_back(br.policy);
  // Extremes of each group's acceptance rate over the face, as exact vertices.
  for (const LinearProgram& lp : control_polytopes(k, game.features, mu, f)) {
    for (Group i : kGroups) {
      for (double sign : {-1.0, 1.0}) {
        std::vector<double> ar(2 * n, 0.0);
        for (int x = 0; x < n; ++x) ar[idx(i) * n + x] = sign * mu(i, x);
        if (auto d = face_extreme(lp, coef, ar, br.objective)) samples.push_back(std::move(*d));
      }
    }
  }
  double hull_lo = std::numeric_limits<double>::infinity();
  double hull_hi = -hull_lo;
  for (const auto& d : samples) {
    const RateInterval r = interval_of(d, mu);
    hull_lo = std::min(hull_lo, r.lo);
    hull_hi = std::max(hull_hi, r.hi);
  }
  out.face_hull = {hull_lo, hull_hi};
  FeatureTable mid = FeatureTable::filled(TableKind::kPolicy, n, 0.0);
  for (const auto& d : samples) {
    for (int j = 0; j < 2 * n; ++j) mid.values[j] += d.values[j] / samples.size();
  }
  samples.push_back(std::move(mid));

  out.weakly_nested = hull_lo >= out.before.lo - kTol && hull_hi <= out.before.hi + kTol;
  bool all_strict = true;
  bool some_equal = false;
  for (const auto& d : samples) {
    const RateInterval r = interval_of(d, mu);
    out.samples.push_back(r);
    const bool strict = r.lo > out.before.lo + kTol || r.hi < out.before.hi - kTol;
    const bool equal =
        std::abs(r.lo - out.before.lo) <= kTol && std::abs(r.hi - out.before.hi) <= kTol;
    all_strict = all_strict && strict;
    some_equal = some_equal || equal;
  }
  if (!out.weakly_nested || some_equal) {
    out.verdict = Verdict::kFail;
  } else if (all_strict) {
    out.verdict = Verdict::kPass;
  } else {
    out.verdict = Verdict::kIndeterminate;
  }
  return out;
}

IdealCheckReport ideal_check(const GameSpec& game, const ControlSpec& k,
                             const ControlledSearchOptions& options) {
  require_valid(game);
  IdealCheckReport out;
  out.control = k;
  const auto equilibria = enumerate_equilibria(game);
  bool any_fail = false, any_open = false;
  std::set<std::string> nd;
  for (const auto& eq : equilibria) {
    if (eq.non_discriminatory) {
      nd.insert(eq.key);
      continue;
    }
    GainsVerdict v = gains_check(game, k, eq);
    any_fail = any_fail || v.verdict == Verdict::kFail;
    any_open = any_open || v.verdict == Verdict::kIndeterminate;
    out.property1.push_back(std::move(v));
  }
  out.property1_verdict =
      any_fail ? Verdict::kFail : (any_open ? Verdict::kIndeterminate : Verdict::kPass);

  out.search = controlled_equilibria(game, k, options);
  std::set<std::string> controlled;
  for (const auto& rec : out.search.records) controlled.insert(rec.key);
  out.controlled_keys.assign(controlled.begin(), controlled.end());
  out.nondiscriminatory_keys.assign(nd.begin(), nd.end());
  std::set_difference(controlled.begin(), controlled.end(), nd.begin(), nd.end(),
                      std::back_inserter(out.extra));
  std::set_difference(nd.begin(), nd.end(), controlled.begin(), controlled.end(),
                      std::back_inserter(out.missing));
  out.property2 = out.extra.empty() && out.missing.empty() && out.search.unresolved.empty();
  out.property2_relaxed = out.missing.empty();
  return out;
}

}  // namespace fairlab
