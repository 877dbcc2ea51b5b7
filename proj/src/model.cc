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
#include <set>
#include <sstream>

namespace fairlab {

std::string_view group_label(Group g) { return g == Group::kW ? "w" : "b"; }

Group parse_group(std::string_view label) {
  if (label == "w") return Group::kW;
  if (label == "b") return Group::kB;
  throw std::invalid_argument("unknown group '" + std::string(label) +
                              "' (expected w or b)");
}

FeatureSpace::FeatureSpace(std::vector<Axis> axes) : axes_(std::move(axes)) {
  if (axes_.empty()) throw std::invalid_argument("feature space needs at least one axis");
  std::set<std::string> names;
  for (const Axis& a : axes_) {
    if (a.labels.empty()) {
      throw std::invalid_argument("axis '" + a.name + "' has no labels");
    }
    if (!names.insert(a.name).second) {
      throw std::invalid_argument("duplicate axis name '" + a.name + "'");
    }
    std::set<std::string> labels(a.labels.begin(), a.labels.end());
    if (labels.size() != a.labels.size()) {
      throw std::invalid_argument("duplicate label on axis '" + a.name + "'");
    }
  }
  strides_.assign(axes_.size(), 1);
  for (int j = num_axes() - 2; j >= 0; --j) {
    strides_[j] = strides_[j + 1] * static_cast<int>(axes_[j + 1].labels.size());
  }
  num_cells_ = strides_[0] * static_cast<int>(axes_[0].labels.size());
}

int FeatureSpace::axis_index(std::string_view name) const {
  for (int j = 0; j < num_axes(); ++j) {
    if (axes_[j].name == name) return j;
  }
  throw std::invalid_argument("unknown axis '" + std::string(name) + "'");
}

std::vector<int> FeatureSpace::coords(int cell) const {
  std::vector<int> out(axes_.size());
  for (int j = 0; j < num_axes(); ++j) out[j] = coord(cell, j);
  return out;
}

int FeatureSpace::cell(std::span<const int> coords) const {
  int c = 0;
  for (int j = 0; j < num_axes(); ++j) c += coords[j] * strides_[j];
  return c;
}

int FeatureSpace::project(int cell, std::span<const int> axes) const {
  int c = 0;
  for (int a : axes) {
    c = c * static_cast<int>(axes_[a].labels.size()) + coord(cell, a);
  }
  return c;
}

int FeatureSpace::num_cells(std::span<const int> axes) const {
  int n = 1;
  for (int a : axes) n *= static_cast<int>(axes_[a].labels.size());
  return n;
}

std::vector<int> FeatureSpace::complement(std::span<const int> axes) const {
  std::vector<int> out;
  for (int j = 0; j < num_axes(); ++j) {
    if (std::find(axes.begin(), axes.end(), j) == axes.end()) out.push_back(j);
  }
  return out;
}

std::string FeatureSpace::cell_name(int cell) const {
  std::string s = "(";
  for (int j = 0; j < num_axes(); ++j) {
    if (j) s += ",";
    s += axes_[j].labels[coord(cell, j)];
  }
  return s + ")";
}

namespace {

template <typename From, typename To, typename F>
BasicGameSpec<To> convert(const BasicGameSpec<From>& s, F&& conv) {
  BasicGameSpec<To> out;
  out.features = s.features;
  out.lambda_w = conv(s.lambda_w);
  out.law.class_axes = s.law.class_axes;
  for (int y = 0; y < 2; ++y) {
    for (const auto& v : s.law.p_class[y]) out.law.p_class[y].push_back(conv(v));
  }
  for (int i = 0; i < 2; ++i) {
    for (const auto& row : s.law.p_proxy[i]) {
      std::vector<To> r;
      for (const auto& v : row) r.push_back(conv(v));
      out.law.p_proxy[i].push_back(std::move(r));
    }
  }
  if (const auto* pw = std::get_if<PiecewiseLinearCost<From>>(&s.costs)) {
    PiecewiseLinearCost<To> c;
    for (const auto& [x, g] : pw->knots) c.knots.emplace_back(conv(x), conv(g));
    c.left_rate = conv(pw->left_rate);
    c.right_rate = conv(pw->right_rate);
    out.costs = c;
  } else {
    const auto& lg = std::get<LogisticCost<From>>(s.costs);
    out.costs = LogisticCost<To>{conv(lg.location), conv(lg.scale)};
  }
  out.v_q = conv(s.v_q);
  out.v_u = conv(s.v_u);
  out.omega = conv(s.omega);
  return out;
}

}  // namespace

GameSpec to_double(const ExactGameSpec& spec) {
  return convert<Rational, double>(spec, [](const Rational& r) { return fairlab::to_double(r); });
}

ExactGameSpec to_exact(const GameSpec& spec) {
  return convert<double, Rational>(spec, [](double x) { return rational_from_double(x); });
}

// ---------------------------------------------------------------------------

double cost_pdf(const CostDistribution& costs, double c) {
  if (const auto* pw = std::get_if<PiecewiseLinearCost<double>>(&costs)) {
    const auto& k = pw->knots;
    if (c < k.front().first) {
      return k.front().second * pw->left_rate *
             std::exp(pw->left_rate * (c - k.front().first));
    }
    if (c > k.back().first) {
      return (1.0 - k.back().second) * pw->right_rate *
             std::exp(-pw->right_rate * (c - k.back().first));
    }
    for (size_t j = 1; j < k.size(); ++j) {
      if (c <= k[j].first) {
        return (k[j].second - k[j - 1].second) / (k[j].first - k[j - 1].first);
      }
    }
    return k.front().second * pw->left_rate;
  }
  const auto& lg = std::get<LogisticCost<double>>(costs);
  const double z = -std::abs((c - lg.location) / lg.scale);
  const double e = std::exp(z);
  return e / (lg.scale * (1.0 + e) * (1.0 + e));
}

double cost_quantile(const CostDistribution& costs, double p) {
  if (!(p > 0.0 && p < 1.0)) {
    throw std::invalid_argument("cost_quantile: probability must lie in (0,1)");
  }
  if (const auto* pw = std::get_if<PiecewiseLinearCost<double>>(&costs)) {
    const auto& k = pw->knots;
    if (p < k.front().second) {
      return k.front().first + std::log(p / k.front().second) / pw->left_rate;
    }
    if (p > k.back().second) {
      return k.back().first -
             std::log((1.0 - p) / (1.0 - k.back().second)) / pw->right_rate;
    }
    for (size_t j = 1; j < k.size(); ++j) {
      if (p <= k[j].second) {
        const double s = (k[j].second - k[j - 1].second) / (k[j].first - k[j - 1].first);
        return k[j - 1].first + (p - k[j - 1].second) / s;
      }
    }
    return k.back().first;
  }
  const auto& lg = std::get<LogisticCost<double>>(costs);
  return lg.location + lg.scale * std::log(p / (1.0 - p));
}

double mean_below(const CostDistribution& costs, double c) {
  if (const auto* pw = std::get_if<PiecewiseLinearCost<double>>(&costs)) {
    const auto& k = pw->knots;
    const double rl = pw->left_rate;
    const double rr = pw->right_rate;
    // Left tail, up to min(c, c_0).
    const double cl = std::min(c, k.front().first);
    double total = k.front().second * std::exp(rl * (cl - k.front().first)) * (cl - 1.0 / rl);
    if (c <= k.front().first) return total;
    for (size_t j = 1; j < k.size(); ++j) {
      const double a = k[j - 1].first;
      const double b = std::min(c, k[j].first);
      const double s = (k[j].second - k[j - 1].second) / (k[j].first - a);
      total += 0.5 * s * (b * b - a * a);
      if (c <= k[j].first) return total;
    }
    const double ck = k.back().first;
    total += (1.0 - k.back().second) *
             ((ck + 1.0 / rr) - std::exp(-rr * (c - ck)) * (c + 1.0 / rr));
    return total;
  }
  // For the logistic law, t g(t) integrates to c G(c) - s * softplus(z).
  const auto& lg = std::get<LogisticCost<double>>(costs);
  const double z = (c - lg.location) / lg.scale;
  const double softplus = z > 0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z));
  const double g = 1.0 / (1.0 + std::exp(-z));
  if (z > 30) {
    // c G(c) - s softplus(z) = loc + (c - loc)(G - 1) - s log1p(e^{-z}).
    return lg.location + (c - lg.location) * (g - 1.0) - lg.scale * std::log1p(std::exp(-z));
  }
  return c * g - lg.scale * softplus;
}

// ---------------------------------------------------------------------------

bool ValidationReport::ok() const {
  return std::none_of(issues.begin(), issues.end(),
                      [](const ValidationIssue& i) { return i.severity == Severity::kError; });
}

bool ValidationReport::has(std::string_view code) const {
  return std::any_of(issues.begin(), issues.end(),
                     [&](const ValidationIssue& i) { return i.code == code; });
}

std::vector<std::string> ValidationReport::errors() const {
  std::vector<std::string> out;
  for (const auto& i : issues) {
    if (i.severity == Severity::kError) out.push_back(i.code + ": " + i.message);
  }
  return out;
}

namespace {

class Checker {
 public:
  explicit Checker(ValidationReport& r) : r_(r) {}
  void error(std::string code, std::string msg) {
    r_.issues.push_back({Severity::kError, std::move(code), std::move(msg)});
  }
  void warning(std::string code, std::string msg) {
    r_.issues.push_back({Severity::kWarning, std::move(code), std::move(msg)});
  }

 private:
  ValidationReport& r_;
};

void check_costs(const CostDistribution& costs, Checker& chk) {
  if (const auto* pw = std::get_if<PiecewiseLinearCost<double>>(&costs)) {
    if (pw->knots.empty()) {
      chk.error("cost distribution", "piecewise cost needs at least one knot");
      return;
    }
    for (size_t j = 0; j < pw->knots.size(); ++j) {
      const auto& [c, g] = pw->knots[j];
      if (!std::isfinite(c) || !(g > 0.0 && g < 1.0)) {
        chk.error("cost distribution", "knot CDF values must lie in (0,1)");
        return;
      }
      if (j > 0 && !(c > pw->knots[j - 1].first && g > pw->knots[j - 1].second)) {
        chk.error("cost distribution", "knots must be strictly increasing in c and G");
        return;
      }
    }
    if (!(pw->left_rate > 0.0) || !(pw->right_rate > 0.0)) {
      chk.error("cost distribution", "tail rates must be positive");
      return;
    }
  } else {
    const auto& lg = std::get<LogisticCost<double>>(costs);
    if (!std::isfinite(lg.location) || !(lg.scale > 0.0)) {
      chk.error("cost distribution", "logistic scale must be positive");
      return;
    }
  }
  // Round-trip probe.
  for (int k = 1; k < 20; ++k) {
    const double p = k / 20.0;
    const double c = cost_quantile(costs, p);
    if (std::abs(cost_cdf(costs, c) - p) > 1e-9) {
      chk.error("cost distribution", "quantile is not the inverse of the CDF");
      return;
    }
  }
}

}  // namespace

ValidationReport validate_game(const GameSpec& spec) {
  ValidationReport report;
  Checker chk(report);
  bool zero_prob = false;
  bool other_error = false;
  auto err = [&](std::string code, std::string msg) {
    other_error = true;
    chk.error(std::move(code), std::move(msg));
  };

  const FeatureSpace& X = spec.features;
  const auto& law = spec.law;
  if (X.num_cells() == 0) {
    err("feature space", "empty feature space");
    return report;
  }
  bool shape_ok = !law.class_axes.empty() &&
                  std::is_sorted(law.class_axes.begin(), law.class_axes.end()) &&
                  std::adjacent_find(law.class_axes.begin(), law.class_axes.end()) ==
                      law.class_axes.end();
  for (int a : law.class_axes) shape_ok = shape_ok && a >= 0 && a < X.num_axes();
  if (!shape_ok) {
    err("probability law", "class-relevant axes must be a nonempty sorted set of axis indices");
    return report;
  }
  const int ny = X.num_cells(law.class_axes);
  const auto rest = X.complement(law.class_axes);
  const int nr = X.num_cells(rest);
  for (int y = 0; y < 2; ++y) {
    if (static_cast<int>(law.p_class[y].size()) != ny) {
      err("probability law", "p_class table has the wrong size");
      return report;
    }
  }
  for (int i = 0; i < 2; ++i) {
    if (static_cast<int>(law.p_proxy[i].size()) != ny) {
      err("probability law", "p_proxy table has the wrong number of rows");
      return report;
    }
    for (const auto& row : law.p_proxy[i]) {
      if (static_cast<int>(row.size()) != nr) {
        err("probability law", "p_proxy row has the wrong size");
        return report;
      }
    }
  }

  auto check_dist = [&](const std::vector<double>& v, const std::string& what) {
    double sum = 0.0;
    for (double p : v) {
      if (!std::isfinite(p) || p < 0.0) {
        err("probability law", what + " has a negative or non-finite entry");
      } else if (p == 0.0) {
        zero_prob = true;
      }
      sum += p;
    }
    if (std::abs(sum - 1.0) > kNormalizationTol) {
      std::ostringstream os;
      os << what << " sums to " << sum << ", not 1";
      err("probability law", os.str());
    }
  };
  check_dist(law.p_class[0], "p(x_Y|q)");
  check_dist(law.p_class[1], "p(x_Y|u)");
  for (int i = 0; i < 2; ++i) {
    for (int yc = 0; yc < ny; ++yc) {
      check_dist(law.p_proxy[i][yc], "p(x_-Y|" + std::string(group_label(kGroups[i])) +
                                         ",x_Y=" + std::to_string(yc) + ")");
    }
  }
  if (zero_prob) {
    chk.error("full-support violated", "some probability in the law is exactly zero");
  }

  // No likelihood value may equal one.
  for (int yc = 0; yc < ny; ++yc) {
    const double pq = law.p_class[0][yc];
    const double pu = law.p_class[1][yc];
    if (pq > 0.0 && pu > 0.0 && std::abs(pq / pu - 1.0) <= kLikelihoodTol) {
      err("likelihood ratio one", "likelihood value 1 at class cell " + std::to_string(yc));
      break;
    }
  }

  if (!(spec.lambda_w > 0.0 && spec.lambda_w < 1.0)) {
    err("parameters", "lambda_w must lie in (0,1)");
  }
  if (!(spec.v_q > 0.0) || !(spec.v_u > 0.0) || !(spec.omega > 0.0)) {
    err("parameters", "v_q, v_u and omega must be positive");
  }
  const size_t before = report.issues.size();
  check_costs(spec.costs, chk);
  if (report.issues.size() != before) other_error = true;

  if (zero_prob && !other_error) {
    report.degenerate = true;
    chk.warning("degenerate", "limit game: usable for table computations only");
  }
  return report;
}

void require_valid(const GameSpec& spec) {
  const ValidationReport r = validate_game(spec);
  if (!r.ok()) {
    std::string msg = "invalid game:";
    for (const auto& e : r.errors()) msg += " [" + e + "]";
    throw std::invalid_argument(msg);
  }
}

}  // namespace fairlab
