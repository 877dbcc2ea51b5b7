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

#include "fairlab/controls.h"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <stdexcept>

#include "fairlab/curves.h"

namespace fairlab {
namespace {

constexpr double kIndifferenceTol = 1e-13;
constexpr int kMaxFaceBlocks = 10;

using Block = std::vector<int>;  // LP variable indices

int var(const FeatureTable& t, Group i, int x) { return idx(i) * t.num_cells + x; }

double block_spread(const FeatureTable& d, const std::vector<Block>& blocks) {
  double r = 0.0;
  for (const Block& b : blocks) {
    for (int v : b) r = std::max(r, std::abs(d.values[v] - d.values[b.front()]));
  }
  return r;
}

std::vector<Block> cell_blocks(int n) {
  std::vector<Block> out;
  for (int v = 0; v < 2 * n; ++v) out.push_back({v});
  return out;
}

std::vector<Block> colorblind_blocks(int n) {
  std::vector<Block> out;
  for (int x = 0; x < n; ++x) out.push_back({x, n + x});
  return out;
}

std::vector<Block> no_proxy_blocks(const FeatureSpace& X, const FeatureTable& f, double tau) {
  const FeatureExclusion ex = excluded_features(f, X, tau);
  const int n = X.num_cells();
  std::map<int, Block> by_key;
  for (int x = 0; x < n; ++x) {
    Block& b = by_key[X.project(x, ex.kept)];
    b.push_back(x);
    b.push_back(n + x);
  }
  std::vector<Block> out;
  for (auto& [key, b] : by_key) {
    std::sort(b.begin(), b.end());
    out.push_back(std::move(b));
  }
  return out;
}

// Distinct values of f(i*, .) in increasing order with their cells.
std::vector<std::pair<double, std::vector<int>>> level_sets(const FeatureTable& f, Group ref) {
  std::map<double, std::vector<int>> m;
  for (int x = 0; x < f.num_cells; ++x) m[f(ref, x)].push_back(x);
  return {m.begin(), m.end()};
}

void add_equal(LinearProgram& lp, int a, int b) {
  LpRow row;
  row.a.assign(lp.num_vars(), 0.0);
  row.a[a] = 1.0;
  row.a[b] = -1.0;
  lp.rows.push_back(std::move(row));
}

// sum_x w_i(x) d(i,x) / sum_x w_i(x) equal across groups.
LpRow rate_row(const FeatureTable& weight) {
  const int n = weight.num_cells;
  LpRow row;
  row.a.assign(2 * n, 0.0);
  for (Group i : kGroups) {
    double total = 0.0;
    for (int x = 0; x < n; ++x) total += weight(i, x);
    const double s = i == Group::kW ? 1.0 : -1.0;
    for (int x = 0; x < n; ++x) row.a[var(weight, i, x)] = s * weight(i, x) / total;
  }
  return row;
}

FeatureTable tp_weights(const FeatureTable& mu, const FeatureTable& f) {
  FeatureTable w = mu;
  for (int v = 0; v < w.size(); ++v) w.values[v] = mu.values[v] * f.values[v];
  return w;
}

FeatureTable fp_weights(const FeatureTable& mu, const FeatureTable& f) {
  FeatureTable w = mu;
  for (int v = 0; v < w.size(); ++v) w.values[v] = mu.values[v] * (1.0 - f.values[v]);
  return w;
}

FeatureTable policy_from(const std::vector<double>& x, int n) {
  FeatureTable d = FeatureTable::filled(TableKind::kPolicy, n, 0.0);
  for (int v = 0; v < 2 * n; ++v) d.values[v] = std::clamp(x[v], 0.0, 1.0);
  return d;
}

void finish(BestResponseResult& r, const FeatureTable& mu, const FeatureTable& f, double v_q,
            double v_u) {
  r.objective = firm_utility(r.policy, mu, f, v_q, v_u);
  for (Group i : kGroups) r.rates[idx(i)] = group_rates(i, r.policy, mu, f);
  if (r.face_vertices.empty()) r.face_vertices.push_back(r.policy);
  // Cut-off in f when the policy is 1 above and 0 below some value.
  for (Group i : kGroups) {
    double top0 = -1.0, low1 = 2.0;
    bool threshold = true;
    for (int x = 0; x < mu.num_cells; ++x) {
      const double d = r.policy(i, x);
      if (d < 1.0) top0 = std::max(top0, f(i, x));
      if (d > 0.0) low1 = std::min(low1, f(i, x));
    }
    for (int x = 0; x < mu.num_cells && threshold; ++x) {
      const double d = r.policy(i, x);
      if (d > 0.0 && d < 1.0 && (f(i, x) != top0 || f(i, x) != low1)) threshold = false;
    }
    if (threshold && top0 <= low1) {
      r.thresholds[idx(i)] = top0 < 0.0 ? low1 : top0;
    }
  }
}

// Sign rule over blocks of variables forced to share one value.
BestResponseResult sign_rule(const std::vector<Block>& blocks, const FeatureTable& mu,
                             const FeatureTable& f, double v_q, double v_u) {
  const int n = mu.num_cells;
  const FeatureTable coef = firm_coefficients(mu, f, v_q, v_u);
  BestResponseResult r;
  r.method = "sign-rule";
  r.policy = FeatureTable::filled(TableKind::kPolicy, n, 0.0);
  std::vector<int> tied;
  for (int b = 0; b < static_cast<int>(blocks.size()); ++b) {
    double s = 0.0;
    for (int v : blocks[b]) s += coef.values[v];
    const double level = s >= -kIndifferenceTol ? 1.0 : 0.0;
    for (int v : blocks[b]) r.policy.values[v] = level;
    if (std::abs(s) <= kIndifferenceTol) {
      tied.push_back(b);
      for (int v : blocks[b]) {
        r.indifferent_cells.push_back({v < n ? Group::kW : Group::kB, v % n});
      }
    }
  }
  r.indifferent = !tied.empty();
  r.face_truncated = static_cast<int>(tied.size()) > kMaxFaceBlocks;
  const int k = std::min<int>(static_cast<int>(tied.size()), kMaxFaceBlocks);
  for (int mask = 0; mask < (1 << k); ++mask) {
    FeatureTable d = r.policy;
    for (int t = 0; t < k; ++t) {
      if (!(mask >> t & 1)) {
        for (int v : blocks[tied[t]]) d.values[v] = 0.0;
      }
    }
    r.face_vertices.push_back(std::move(d));
  }
  finish(r, mu, f, v_q, v_u);
  return r;
}

// Per-group fractional knapsack for sum_x w(x) d(x) = t with w normalized.
struct Knapsack {
  struct Item {
    std::vector<int> vars;
    double weight;
    double value;
    double ratio;
  };
  std::vector<Item> items;       // decreasing ratio
  std::vector<double> cum_w{0};  // breakpoints
  std::vector<double> cum_v{0};

  Knapsack(Group i, const FeatureTable& weight, const FeatureTable& coef) {
    const int n = weight.num_cells;
    double total = 0.0;
    for (int x = 0; x < n; ++x) total += weight(i, x);
    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    auto ratio = [&](int x) { return coef(i, x) / (weight(i, x) / total); };
    std::stable_sort(order.begin(), order.end(),
                     [&](int a, int b) { return ratio(a) > ratio(b); });
    for (int x : order) {
      const double w = weight(i, x) / total;
      const double r = ratio(x);
      if (!items.empty() &&
          std::abs(items.back().ratio - r) <= 1e-12 * std::max(1.0, std::abs(r))) {
        Item& it = items.back();
        it.vars.push_back(var(weight, i, x));
        it.weight += w;
        it.value += coef(i, x);
        it.ratio = it.value / it.weight;
      } else {
        items.push_back({{var(weight, i, x)}, w, coef(i, x), r});
      }
    }
    for (const Item& it : items) {
      cum_w.push_back(cum_w.back() + it.weight);
      cum_v.push_back(cum_v.back() + it.value);
    }
    cum_w.back() = 1.0;
  }

  double value(double t) const {
    for (size_t k = 1; k < cum_w.size(); ++k) {
      if (t <= cum_w[k]) {
        const double a = (t - cum_w[k - 1]) / (cum_w[k] - cum_w[k - 1]);
        return cum_v[k - 1] + a * (cum_v[k] - cum_v[k - 1]);
      }
    }
    return cum_v.back();
  }

  // Fills `d` at rate t; returns the ratio of the item being filled.
  double fill(double t, FeatureTable& d, bool& split_tie) const {
    double marginal = items.empty() ? 0.0 : items.front().ratio;
    for (size_t k = 0; k < items.size(); ++k) {
      const double level = std::clamp((t - cum_w[k]) / (cum_w[k + 1] - cum_w[k]), 0.0, 1.0);
      for (int v : items[k].vars) d.values[v] = level;
      if (level > 0.0) marginal = items[k].ratio;
      if (level > 0.0 && level < 1.0 && items[k].vars.size() > 1) split_tie = true;
    }
    return marginal;
  }
};

BestResponseResult parametric(const FeatureTable& weight, const FeatureTable& mu,
                              const FeatureTable& f, double v_q, double v_u) {
  const int n = mu.num_cells;
  const FeatureTable coef = firm_coefficients(mu, f, v_q, v_u);
  const Knapsack kw(Group::kW, weight, coef);
  const Knapsack kb(Group::kB, weight, coef);
  std::vector<double> ts(kw.cum_w);
  ts.insert(ts.end(), kb.cum_w.begin(), kb.cum_w.end());
  std::sort(ts.begin(), ts.end());
  ts.erase(std::unique(ts.begin(), ts.end()), ts.end());
  std::vector<double> vals;
  double best = -std::numeric_limits<double>::infinity();
  for (double t : ts) {
    vals.push_back(kw.value(t) + kb.value(t));
    best = std::max(best, vals.back());
  }
  const double slack = 1e-12 * std::max(1.0, std::abs(best));
  double t_lo = 2.0, t_hi = -1.0;
  for (size_t k = 0; k < ts.size(); ++k) {
    if (vals[k] >= best - slack) {
      t_lo = std::min(t_lo, ts[k]);
      t_hi = std::max(t_hi, ts[k]);
    }
  }
  BestResponseResult r;
  r.method = "parametric-threshold";
  r.policy = FeatureTable::filled(TableKind::kPolicy, n, 0.0);
  bool split = false;
  kw.fill(t_hi, r.policy, split);
  const double marginal = kb.fill(t_hi, r.policy, split);
  r.shared_rate = t_hi;
  r.multiplier = marginal;
  r.face_vertices.push_back(r.policy);
  if (t_lo < t_hi) {
    FeatureTable low = FeatureTable::filled(TableKind::kPolicy, n, 0.0);
    kw.fill(t_lo, low, split);
    kb.fill(t_lo, low, split);
    r.face_vertices.push_back(std::move(low));
  }
  r.indifferent = t_lo < t_hi || split;
  if (r.indifferent) {
    for (int v = 0; v < 2 * n; ++v) {
      bool differs = false;
      for (const auto& fv : r.face_vertices) differs |= fv.values[v] != r.policy.values[v];
      const double d = r.policy.values[v];
      if (differs || (split && d > 0.0 && d < 1.0)) {
        r.indifferent_cells.push_back({v < n ? Group::kW : Group::kB, v % n});
      }
    }
  }
  finish(r, mu, f, v_q, v_u);
  return r;
}

LinearProgram with_objective(LinearProgram lp, const FeatureTable& coef) {
  lp.objective = coef.values;
  return lp;
}

BestResponseResult equal_odds_lp(const FeatureSpace& X, const FeatureTable& mu,
                                 const FeatureTable& f, double v_q, double v_u) {
  const int n = mu.num_cells;
  const FeatureTable coef = firm_coefficients(mu, f, v_q, v_u);
  const ControlSpec k = ControlSpec::of(ControlKind::kEqualOdds);
  const LinearProgram base = control_polytopes(k, X, mu, f).front();
  const LpSolution opt = solve_lp(with_objective(base, coef));
  if (!opt.optimal()) throw InvariantViolation("equal odds LP did not reach an optimum");
  BestResponseResult r;
  r.method = "simplex";
  // Largest total acceptance among optimizers, then the AR extremes of the face.
  const auto canon = face_extreme(base, coef, mu.values, opt.value);
  r.policy = canon ? *canon : policy_from(opt.x, n);
  r.face_vertices.push_back(r.policy);
  for (Group i : kGroups) {
    for (double sign : {-1.0, 1.0}) {
      std::vector<double> ar(2 * n, 0.0);
      for (int x = 0; x < n; ++x) ar[var(mu, i, x)] = sign * mu(i, x);
      if (auto v = face_extreme(base, coef, ar, opt.value)) r.face_vertices.push_back(*v);
    }
  }
  for (size_t a = 1; a < r.face_vertices.size(); ++a) {
    for (int v = 0; v < 2 * n; ++v) {
      if (std::abs(r.face_vertices[a].values[v] - r.policy.values[v]) > 1e-9) {
        r.indifferent = true;
      }
    }
  }
  finish(r, mu, f, v_q, v_u);
  return r;
}

BestResponseResult mistaken_identity(Group ref, const FeatureTable& mu, const FeatureTable& f,
                                     double v_q, double v_u) {
  const int n = mu.num_cells;
  const FeatureTable coef = firm_coefficients(mu, f, v_q, v_u);
  const auto levels = level_sets(f, ref);
  const int L = static_cast<int>(levels.size());
  std::vector<double> s(L, 0.0);
  std::vector<double> mass(L, 0.0);
  for (int j = 0; j < L; ++j) {
    for (int x : levels[j].second) {
      s[j] += coef(Group::kW, x) + coef(Group::kB, x);
      mass[j] += mu(Group::kW, x) + mu(Group::kB, x);
    }
  }
  // Candidate (j, level): levels above j accepted, level j at `level`.
  struct Candidate {
    int j;
    double level;
    double value;
    double accepted;
  };
  std::vector<Candidate> cands;
  double above = 0.0, above_mass = 0.0;
  for (int j = L - 1; j >= 0; --j) {
    for (double level : {0.0, 1.0}) {
      cands.push_back({j, level, above + level * s[j], above_mass + level * mass[j]});
    }
    above += s[j];
    above_mass += mass[j];
  }
  double best = -std::numeric_limits<double>::infinity();
  for (const auto& c : cands) best = std::max(best, c.value);
  const double slack = 1e-12 * std::max(1.0, std::abs(best));
  BestResponseResult r;
  r.method = "threshold-scan";
  const Candidate* pick = nullptr;
  for (const auto& c : cands) {
    if (c.value >= best - slack && (!pick || c.accepted > pick->accepted)) pick = &c;
  }
  auto build = [&](const Candidate& c) {
    FeatureTable d = FeatureTable::filled(TableKind::kPolicy, n, 0.0);
    for (int j = c.j; j < L; ++j) {
      const double v = j == c.j ? c.level : 1.0;
      for (int x : levels[j].second) {
        d(Group::kW, x) = v;
        d(Group::kB, x) = v;
      }
    }
    return d;
  };
  r.policy = build(*pick);
  r.face_vertices.push_back(r.policy);
  for (const auto& c : cands) {
    if (c.value < best - slack) continue;
    FeatureTable d = build(c);
    bool fresh = true;
    for (const auto& fv : r.face_vertices) fresh &= fv.values != d.values;
    if (fresh) r.face_vertices.push_back(std::move(d));
  }
  r.indifferent = r.face_vertices.size() > 1;
  if (r.indifferent) {
    for (int v = 0; v < 2 * n; ++v) {
      for (const auto& fv : r.face_vertices) {
        if (fv.values[v] != r.policy.values[v]) {
          r.indifferent_cells.push_back({v < n ? Group::kW : Group::kB, v % n});
          break;
        }
      }
    }
  }
  finish(r, mu, f, v_q, v_u);
  r.thresholds = {levels[pick->j].first, levels[pick->j].first};
  return r;
}

// Upper (descending f) or lower (ascending f) ROC policy of group i at false
// positive rate s.
FeatureTable roc_policy(Group i, const FeatureTable& mu, const FeatureTable& f, double s,
                        bool upper, double& tp) {
  const int n = mu.num_cells;
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    return upper ? f(i, a) > f(i, b) : f(i, a) < f(i, b);
  });
  double q_total = 0.0, u_total = 0.0;
  for (int x = 0; x < n; ++x) {
    q_total += mu(i, x) * f(i, x);
    u_total += mu(i, x) * (1.0 - f(i, x));
  }
  FeatureTable d = FeatureTable::filled(TableKind::kPolicy, n, 0.0);
  double remaining = s;
  tp = 0.0;
  for (int x : order) {
    const double u = mu(i, x) * (1.0 - f(i, x)) / u_total;
    const double take = std::clamp(remaining / u, 0.0, 1.0);
    d(i, x) = take;
    tp += take * mu(i, x) * f(i, x) / q_total;
    remaining -= take * u;
    if (remaining <= 0.0) break;
  }
  return d;
}

// Upper ROC curve of group i as breakpoints (fp, tp).
std::vector<std::pair<double, double>> upper_roc(Group i, const FeatureTable& mu,
                                                 const FeatureTable& f) {
  const int n = mu.num_cells;
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return f(i, a) > f(i, b); });
  double q_total = 0.0, u_total = 0.0;
  for (int x = 0; x < n; ++x) {
    q_total += mu(i, x) * f(i, x);
    u_total += mu(i, x) * (1.0 - f(i, x));
  }
  std::vector<std::pair<double, double>> pts{{0.0, 0.0}};
  for (int x : order) {
    pts.push_back({pts.back().first + mu(i, x) * (1.0 - f(i, x)) / u_total,
                   pts.back().second + mu(i, x) * f(i, x) / q_total});
  }
  pts.back() = {1.0, 1.0};
  return pts;
}

double eval_curve(const std::vector<std::pair<double, double>>& pts, double s) {
  for (size_t k = 1; k < pts.size(); ++k) {
    if (s <= pts[k].first) {
      const double w = pts[k].first - pts[k - 1].first;
      if (w <= 0.0) return pts[k].second;
      return pts[k - 1].second + (s - pts[k - 1].first) / w * (pts[k].second - pts[k - 1].second);
    }
  }
  return pts.back().second;
}

BestResponseResult equal_odds_roc(const FeatureTable& mu, const FeatureTable& f, double v_q,
                                  double v_u) {
  const int n = mu.num_cells;
  const auto rw = upper_roc(Group::kW, mu, f);
  const auto rb = upper_roc(Group::kB, mu, f);
  double q_all = 0.0, u_all = 0.0;
  for (int v = 0; v < 2 * n; ++v) {
    q_all += mu.values[v] * f.values[v];
    u_all += mu.values[v] * (1.0 - f.values[v]);
  }
  std::vector<double> ss;
  for (const auto& p : rw) ss.push_back(p.first);
  for (const auto& p : rb) ss.push_back(p.first);
  std::sort(ss.begin(), ss.end());
  ss.erase(std::unique(ss.begin(), ss.end()), ss.end());
  std::vector<double> cands(ss);
  for (size_t k = 1; k < ss.size(); ++k) {
    const double a = ss[k - 1], b = ss[k];
    const double da = eval_curve(rw, a) - eval_curve(rb, a);
    const double db = eval_curve(rw, b) - eval_curve(rb, b);
    if ((da < 0.0 && db > 0.0) || (da > 0.0 && db < 0.0)) {
      cands.push_back(a + (b - a) * da / (da - db));
    }
  }
  double best_s = 0.0, best_t = 0.0;
  double best = -std::numeric_limits<double>::infinity();
  for (double s : cands) {
    const double t = std::min(eval_curve(rw, s), eval_curve(rb, s));
    const double h = v_q * q_all * t - v_u * u_all * s;
    if (h > best) {
      best = h;
      best_s = s;
      best_t = t;
    }
  }
  BestResponseResult r;
  r.method = "roc-geometry";
  r.policy = FeatureTable::filled(TableKind::kPolicy, n, 0.0);
  for (Group i : kGroups) {
    double tp_up = 0.0, tp_low = 0.0;
    const FeatureTable up = roc_policy(i, mu, f, best_s, true, tp_up);
    const FeatureTable low = roc_policy(i, mu, f, best_s, false, tp_low);
    const double alpha =
        tp_up - tp_low > 1e-15 ? std::clamp((best_t - tp_low) / (tp_up - tp_low), 0.0, 1.0) : 1.0;
    for (int x = 0; x < n; ++x) {
      r.policy(i, x) = alpha * up(i, x) + (1.0 - alpha) * low(i, x);
    }
  }
  r.shared_rate = best_t;
  finish(r, mu, f, v_q, v_u);
  return r;
}

}  // namespace

std::string ControlSpec::name() const {
  switch (kind) {
    case ControlKind::kUn: return "un";
    case ControlKind::kColorBlind: return "cb";
    case ControlKind::kAffirmativeAction: return "aa";
    case ControlKind::kEqualOpportunity: return "eo";
    case ControlKind::kEqualOdds: return "odds";
    case ControlKind::kMistakenIdentity: return "mi:" + std::string(group_label(reference));
    case ControlKind::kNoProxies: return "noproxy";
  }
  return "?";
}

bool ControlSpec::continuous() const {
  return kind == ControlKind::kAffirmativeAction || kind == ControlKind::kEqualOpportunity ||
         kind == ControlKind::kEqualOdds;
}

ControlSpec parse_control(std::string_view text) {
  if (text == "un") return ControlSpec::of(ControlKind::kUn);
  if (text == "cb") return ControlSpec::of(ControlKind::kColorBlind);
  if (text == "aa") return ControlSpec::of(ControlKind::kAffirmativeAction);
  if (text == "eo") return ControlSpec::of(ControlKind::kEqualOpportunity);
  if (text == "odds") return ControlSpec::of(ControlKind::kEqualOdds);
  if (text == "noproxy") return ControlSpec::of(ControlKind::kNoProxies);
  if (text == "mi:w") return ControlSpec::of(ControlKind::kMistakenIdentity, Group::kW);
  if (text == "mi:b") return ControlSpec::of(ControlKind::kMistakenIdentity, Group::kB);
  throw std::invalid_argument("unknown control '" + std::string(text) +
                              "' (expected un, cb, aa, eo, odds, mi:w, mi:b or noproxy)");
}

FeatureTable firm_coefficients(const FeatureTable& mu, const FeatureTable& f, double v_q,
                               double v_u) {
  FeatureTable c = mu;
  c.kind = TableKind::kPolicy;
  for (int v = 0; v < mu.size(); ++v) {
    c.values[v] = mu.values[v] * (f.values[v] * v_q - (1.0 - f.values[v]) * v_u);
  }
  return c;
}

double firm_utility(const FeatureTable& d, const FeatureTable& mu, const FeatureTable& f,
                    double v_q, double v_u) {
  double u = 0.0;
  for (int v = 0; v < mu.size(); ++v) {
    u += d.values[v] * mu.values[v] * (f.values[v] * v_q - (1.0 - f.values[v]) * v_u);
  }
  return u;
}

FeatureExclusion excluded_features(const FeatureTable& f, const FeatureSpace& X, double tau) {
  FeatureExclusion out;
  const int n = X.num_cells();
  for (int j = 0; j < X.num_axes(); ++j) {
    bool sensitive = false;
    const int size = static_cast<int>(X.axes()[j].labels.size());
    for (int x = 0; x < n && !sensitive; ++x) {
      std::vector<int> c = X.coords(x);
      const int own = c[j];
      for (int lab = own + 1; lab < size && !sensitive; ++lab) {
        c[j] = lab;
        const int y = X.cell(c);
        for (Group i : kGroups) {
          if (std::abs(f(i, x) - f(i, y)) > tau) sensitive = true;
        }
      }
    }
    (sensitive ? out.kept : out.excluded).push_back(j);
  }
  return out;
}

FeasibilityResult feasible(const ControlSpec& k, const FeatureSpace& X, const FeatureTable& mu,
                           const FeatureTable& f, const FeatureTable& d) {
  const int n = mu.num_cells;
  FeasibilityResult r;
  switch (k.kind) {
    case ControlKind::kUn:
      break;
    case ControlKind::kColorBlind:
      r.residual = block_spread(d, colorblind_blocks(n));
      r.detail = "max |d(w,x) - d(b,x)|";
      break;
    case ControlKind::kAffirmativeAction:
      r.residual = std::abs(acceptance_rate(Group::kW, d, mu) - acceptance_rate(Group::kB, d, mu));
      r.detail = "acceptance-rate gap";
      break;
    case ControlKind::kEqualOpportunity:
      r.residual = std::abs(true_positive_rate(Group::kW, d, mu, f) -
                            true_positive_rate(Group::kB, d, mu, f));
      r.detail = "true-positive-rate gap";
      break;
    case ControlKind::kEqualOdds:
      r.residual = std::max(std::abs(true_positive_rate(Group::kW, d, mu, f) -
                                     true_positive_rate(Group::kB, d, mu, f)),
                            std::abs(false_positive_rate(Group::kW, d, mu, f) -
                                     false_positive_rate(Group::kB, d, mu, f)));
      r.detail = "max of true- and false-positive-rate gaps";
      break;
    case ControlKind::kNoProxies:
      r.residual = block_spread(d, no_proxy_blocks(X, f, k.proxy_tau));
      r.detail = "variation of d over cells sharing the kept features";
      break;
    case ControlKind::kMistakenIdentity: {
      const auto levels = level_sets(f, k.reference);
      std::vector<Block> blocks;
      for (const auto& [v, cells] : levels) {
        Block b;
        for (int x : cells) {
          b.push_back(x);
          b.push_back(n + x);
        }
        blocks.push_back(std::move(b));
      }
      const double spread = block_spread(d, blocks);
      // Best cut position: levels above j* at 1, below at 0.
      const int L = static_cast<int>(blocks.size());
      double best = std::numeric_limits<double>::infinity();
      for (int cut = 0; cut < L; ++cut) {
        double worst = 0.0;
        for (int j = 0; j < L; ++j) {
          for (int v : blocks[j]) {
            if (j > cut) worst = std::max(worst, 1.0 - d.values[v]);
            if (j < cut) worst = std::max(worst, d.values[v]);
          }
        }
        best = std::min(best, worst);
      }
      r.residual = std::max(spread, best);
      r.detail = "color-blind threshold form in the reference group's beliefs";
      break;
    }
  }
  r.feasible = r.residual <= k.tol;
  return r;
}

std::vector<LinearProgram> control_polytopes(const ControlSpec& k, const FeatureSpace& X,
                                             const FeatureTable& mu, const FeatureTable& f) {
  const int n = mu.num_cells;
  LinearProgram base = LinearProgram::unit_box(2 * n);
  auto tie_blocks = [&](const std::vector<Block>& blocks) {
    for (const Block& b : blocks) {
      for (size_t t = 1; t < b.size(); ++t) add_equal(base, b.front(), b[t]);
    }
  };
  switch (k.kind) {
    case ControlKind::kUn:
      break;
    case ControlKind::kColorBlind:
      tie_blocks(colorblind_blocks(n));
      break;
    case ControlKind::kAffirmativeAction:
      base.rows.push_back(rate_row(mu));
      break;
    case ControlKind::kEqualOpportunity:
      base.rows.push_back(rate_row(tp_weights(mu, f)));
      break;
    case ControlKind::kEqualOdds:
      base.rows.push_back(rate_row(tp_weights(mu, f)));
      base.rows.push_back(rate_row(fp_weights(mu, f)));
      break;
    case ControlKind::kNoProxies:
      tie_blocks(no_proxy_blocks(X, f, k.proxy_tau));
      break;
    case ControlKind::kMistakenIdentity: {
      tie_blocks(colorblind_blocks(n));
      const auto levels = level_sets(f, k.reference);
      std::vector<LinearProgram> out;
      for (size_t j = 0; j < levels.size(); ++j) {
        LinearProgram lp = base;
        for (size_t m = 0; m < levels.size(); ++m) {
          for (int x : levels[m].second) {
            for (Group i : kGroups) {
              const int v = var(mu, i, x);
              if (m > j) lp.lower[v] = 1.0;
              if (m < j) lp.upper[v] = 0.0;
            }
          }
        }
        const auto& cells = levels[j].second;
        for (size_t t = 1; t < cells.size(); ++t) add_equal(lp, cells.front(), cells[t]);
        out.push_back(std::move(lp));
      }
      return out;
    }
  }
  return {base};
}

std::vector<LinearProgram> optimizer_face(const ControlSpec& k, const FeatureSpace& X,
                                          const FeatureTable& mu, const FeatureTable& f,
                                          double v_q, double v_u, double value, double slack) {
  const FeatureTable coef = firm_coefficients(mu, f, v_q, v_u);
  std::vector<LinearProgram> out;
  for (LinearProgram lp : control_polytopes(k, X, mu, f)) {
    if (k.kind == ControlKind::kMistakenIdentity) {
      const LpSolution s = solve_lp(with_objective(lp, coef));
      if (!s.optimal() || s.value < value - slack) continue;
    }
    lp.rows.push_back({coef.values, RowSense::kGe, value - slack});
    out.push_back(std::move(lp));
  }
  return out;
}

std::optional<FeatureTable> face_extreme(const LinearProgram& polytope, const FeatureTable& coef,
                                         const std::vector<double>& secondary, double value) {
  double sc = 0.0, ss = 0.0, total = 0.0;
  for (double c : coef.values) {
    sc = std::max(sc, std::abs(c));
    total += std::abs(c);
  }
  for (double c : secondary) ss = std::max(ss, std::abs(c));
  const double tol = 1e-11 * std::max(1.0, total);
  const double ratio = ss > 0.0 ? std::max(sc, 1e-300) / ss : 0.0;
  for (double eta : {1e-5, 1e-7, 1e-9, 0.0}) {
    LinearProgram lp = polytope;
    lp.objective = coef.values;
    for (size_t j = 0; j < lp.objective.size(); ++j) lp.objective[j] += eta * ratio * secondary[j];
    const LpSolution s = solve_lp(lp);
    if (!s.optimal()) return std::nullopt;
    double u = 0.0;
    for (size_t j = 0; j < s.x.size(); ++j) u += coef.values[j] * s.x[j];
    if (u >= value - tol) {
      FeatureTable d = FeatureTable::filled(TableKind::kPolicy, coef.num_cells, 0.0);
      for (size_t j = 0; j < s.x.size(); ++j) d.values[j] = std::clamp(s.x[j], 0.0, 1.0);
      return d;
    }
  }
  return std::nullopt;
}

BestResponseResult firm_best_response(const ControlSpec& k, const FeatureSpace& X,
                                      const FeatureTable& mu, const FeatureTable& f, double v_q,
                                      double v_u) {
  const int n = mu.num_cells;
  switch (k.kind) {
    case ControlKind::kUn:
      return sign_rule(cell_blocks(n), mu, f, v_q, v_u);
    case ControlKind::kColorBlind:
      return sign_rule(colorblind_blocks(n), mu, f, v_q, v_u);
    case ControlKind::kNoProxies:
      return sign_rule(no_proxy_blocks(X, f, k.proxy_tau), mu, f, v_q, v_u);
    case ControlKind::kAffirmativeAction:
      return parametric(mu, mu, f, v_q, v_u);
    case ControlKind::kEqualOpportunity:
      return parametric(tp_weights(mu, f), mu, f, v_q, v_u);
    case ControlKind::kEqualOdds:
      return equal_odds_lp(X, mu, f, v_q, v_u);
    case ControlKind::kMistakenIdentity:
      return mistaken_identity(k.reference, mu, f, v_q, v_u);
  }
  throw std::logic_error("unhandled control");
}

BestResponseResult lp_oracle(const ControlSpec& k, const FeatureSpace& X, const FeatureTable& mu,
                             const FeatureTable& f, double v_q, double v_u) {
  const int n = mu.num_cells;
  if (2 * n > kOracleMaxCells) {
    throw std::invalid_argument("lp_oracle: |I x X| exceeds " + std::to_string(kOracleMaxCells));
  }
  if (k.kind == ControlKind::kEqualOdds) return equal_odds_roc(mu, f, v_q, v_u);
  const FeatureTable coef = firm_coefficients(mu, f, v_q, v_u);
  BestResponseResult r;
  r.method = "simplex";
  double best = -std::numeric_limits<double>::infinity();
  for (const LinearProgram& lp : control_polytopes(k, X, mu, f)) {
    const LpSolution s = solve_lp(with_objective(lp, coef));
    if (s.optimal() && s.value > best) {
      best = s.value;
      r.policy = policy_from(s.x, n);
    }
  }
  if (r.policy.values.empty()) throw InvariantViolation("lp_oracle: no feasible policy");
  finish(r, mu, f, v_q, v_u);
  return r;
}

FairnessResult is_fair(const GameSpec& game, const FeatureTable& d, double tol) {
  const auto mix = fair_mixture(game, likelihood_structure(game), d, tol);
  return {mix.has_value(), mix};
}

}  // namespace fairlab
