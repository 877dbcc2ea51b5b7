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

#include "fairlab/io.h"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#define TOML_EXCEPTIONS 1
#include "toml.hpp"

namespace fairlab {
namespace {

// ---------------------------------------------------------------------------
// TOML reading.

Rational number_at(const toml::node& node, const std::string& where) {
  if (auto s = node.value_exact<std::string>()) {
    try {
      return parse_rational(*s);
    } catch (const std::exception& e) {
      throw ParseError(where + ": " + e.what());
    }
  }
  if (auto i = node.value_exact<int64_t>()) return Rational(*i);
  if (auto d = node.value_exact<double>()) {
    if (!std::isfinite(*d)) throw ParseError(where + ": number is not finite");
    return rational_from_double(*d);
  }
  throw ParseError(where + ": expected a number or a rational string");
}

Rational number_in(const toml::table& t, const std::string& key, const std::string& where) {
  const toml::node* n = t.get(key);
  if (!n) throw ParseError(where + "." + key + ": missing");
  return number_at(*n, where + "." + key);
}

const toml::table& table_in(const toml::table& t, const std::string& key,
                            const std::string& where) {
  const toml::node* n = t.get(key);
  if (!n || !n->is_table()) throw ParseError(where + key + ": missing table");
  return *n->as_table();
}

const toml::array& array_in(const toml::table& t, const std::string& key,
                            const std::string& where) {
  const toml::node* n = t.get(key);
  if (!n || !n->is_array()) throw ParseError(where + "." + key + ": missing array");
  return *n->as_array();
}

std::vector<Rational> numbers(const toml::array& a, const std::string& where) {
  std::vector<Rational> out;
  for (size_t k = 0; k < a.size(); ++k) {
    out.push_back(number_at(*a.get(k), where + "[" + std::to_string(k) + "]"));
  }
  return out;
}

std::vector<std::vector<Rational>> matrix(const toml::array& a, const std::string& where) {
  std::vector<std::vector<Rational>> out;
  for (size_t k = 0; k < a.size(); ++k) {
    const toml::array* row = a.get(k)->as_array();
    const std::string w = where + "[" + std::to_string(k) + "]";
    if (!row) throw ParseError(w + ": expected an array");
    out.push_back(numbers(*row, w));
  }
  return out;
}

std::string quoted(const Rational& r) { return "\"" + to_string(r) + "\""; }

// ---------------------------------------------------------------------------
// JSON helpers.

Json groups_json(const std::array<GroupRates, 2>& rates) {
  Json j = Json::object();
  for (Group i : kGroups) {
    const auto& r = rates[idx(i)];
    j[std::string(group_label(i))] = {{"acceptance", r.acceptance},
                                      {"true_positive", r.true_positive},
                                      {"false_positive", r.false_positive}};
  }
  return j;
}

Json pair_json(const CostThresholdPair& c) { return {{"w", c.w}, {"b", c.b}}; }

std::string kind_name(IntersectionKind k) {
  switch (k) {
    case IntersectionKind::kOrigin: return "origin";
    case IntersectionKind::kSegment: return "segment";
    case IntersectionKind::kBreakpoint: return "breakpoint";
    case IntersectionKind::kEnd: return "end";
  }
  return "?";
}

Json interval_json(const RateInterval& r) { return Json::array({r.lo, r.hi}); }

std::string csv_row(std::initializer_list<std::string> cells) {
  std::string s;
  bool first = true;
  for (const auto& c : cells) {
    if (!first) s += ",";
    s += c;
    first = false;
  }
  return s + "\n";
}

}  // namespace

std::string format_number(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, res.ptr);
}

ExactGameSpec parse_game_toml_exact(std::string_view text) {
  toml::table root;
  try {
    root = toml::parse(text);
  } catch (const toml::parse_error& e) {
    std::ostringstream os;
    os << "line " << e.source().begin.line << ", column " << e.source().begin.column << ": "
       << e.description();
    throw ParseError(os.str());
  }
  ExactGameSpec game;
  const toml::table& features = table_in(root, "features", "");
  std::vector<Axis> axes;
  const toml::array& axis_list = array_in(features, "axes", "features");
  for (size_t k = 0; k < axis_list.size(); ++k) {
    const std::string where = "features.axes[" + std::to_string(k) + "]";
    const toml::table* t = axis_list.get(k)->as_table();
    if (!t) throw ParseError(where + ": expected a table");
    Axis a;
    auto name = t->get("name") ? t->get("name")->value<std::string>() : std::nullopt;
    if (!name) throw ParseError(where + ".name: missing");
    a.name = *name;
    for (const auto& label : array_in(*t, "labels", where)) {
      auto s = label.value<std::string>();
      if (!s) throw ParseError(where + ".labels: labels must be strings");
      a.labels.push_back(*s);
    }
    axes.push_back(std::move(a));
  }
  try {
    game.features = FeatureSpace(std::move(axes));
  } catch (const std::exception& e) {
    throw ParseError(std::string("features: ") + e.what());
  }

  const toml::table& law = table_in(root, "law", "");
  for (const auto& node : array_in(law, "class_axes", "law")) {
    if (auto s = node.value_exact<std::string>()) {
      try {
        game.law.class_axes.push_back(game.features.axis_index(*s));
      } catch (const std::invalid_argument&) {
        throw ParseError("law.class_axes: unknown axis '" + *s + "'");
      }
    } else if (auto i = node.value_exact<int64_t>()) {
      if (*i < 0 || *i >= game.features.num_axes()) {
        throw ParseError("law.class_axes: axis index out of range");
      }
      game.law.class_axes.push_back(static_cast<int>(*i));
    } else {
      throw ParseError("law.class_axes: expected axis names or indices");
    }
  }
  std::sort(game.law.class_axes.begin(), game.law.class_axes.end());
  game.law.p_class[0] = numbers(array_in(law, "q", "law"), "law.q");
  game.law.p_class[1] = numbers(array_in(law, "u", "law"), "law.u");
  const toml::table& proxy = table_in(law, "proxy", "law.");
  game.law.p_proxy[idx(Group::kW)] = matrix(array_in(proxy, "w", "law.proxy"), "law.proxy.w");
  game.law.p_proxy[idx(Group::kB)] = matrix(array_in(proxy, "b", "law.proxy"), "law.proxy.b");

  const toml::table& g = table_in(root, "game", "");
  game.lambda_w = number_in(g, "lambda_w", "game");
  game.v_q = number_in(g, "v_q", "game");
  game.v_u = number_in(g, "v_u", "game");
  game.omega = number_in(g, "omega", "game");

  const toml::table& costs = table_in(root, "costs", "");
  const auto kind = costs.get("kind") ? costs.get("kind")->value<std::string>() : std::nullopt;
  if (!kind) throw ParseError("costs.kind: missing");
  if (*kind == "piecewise") {
    PiecewiseLinearCost<Rational> pw;
    for (const auto& row : matrix(array_in(costs, "knots", "costs"), "costs.knots")) {
      if (row.size() != 2) throw ParseError("costs.knots: each knot is [c, G(c)]");
      pw.knots.emplace_back(row[0], row[1]);
    }
    pw.left_rate = number_in(costs, "left_rate", "costs");
    pw.right_rate = number_in(costs, "right_rate", "costs");
    game.costs = pw;
  } else if (*kind == "logistic") {
    game.costs = LogisticCost<Rational>{number_in(costs, "location", "costs"),
                                        number_in(costs, "scale", "costs")};
  } else {
    throw ParseError("costs.kind: expected 'piecewise' or 'logistic', got '" + *kind + "'");
  }
  return game;
}

GameSpec parse_game_toml(std::string_view text) { return to_double(parse_game_toml_exact(text)); }

GameSpec load_game(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError(path + ": cannot open");
  std::stringstream ss;
  ss << in.rdbuf();
  try {
    return parse_game_toml(ss.str());
  } catch (const ParseError& e) {
    throw ParseError(path + ": " + e.what());
  }
}

std::string game_to_toml(const ExactGameSpec& game) {
  std::ostringstream os;
  os << "[features]\naxes = [\n";
  for (const auto& a : game.features.axes()) {
    os << "  { name = \"" << a.name << "\", labels = [";
    for (size_t k = 0; k < a.labels.size(); ++k) {
      os << (k ? ", " : "") << "\"" << a.labels[k] << "\"";
    }
    os << "] },\n";
  }
  os << "]\n\n[law]\nclass_axes = [";
  for (size_t k = 0; k < game.law.class_axes.size(); ++k) {
    os << (k ? ", " : "") << "\"" << game.features.axes()[game.law.class_axes[k]].name << "\"";
  }
  os << "]\n";
  const char* names[2] = {"q", "u"};
  for (int y = 0; y < 2; ++y) {
    os << names[y] << " = [";
    for (size_t k = 0; k < game.law.p_class[y].size(); ++k) {
      os << (k ? ", " : "") << quoted(game.law.p_class[y][k]);
    }
    os << "]\n";
  }
  os << "\n[law.proxy]\n";
  for (Group i : kGroups) {
    os << group_label(i) << " = [";
    const auto& rows = game.law.p_proxy[idx(i)];
    for (size_t r = 0; r < rows.size(); ++r) {
      os << (r ? ", " : "") << "[";
      for (size_t k = 0; k < rows[r].size(); ++k) os << (k ? ", " : "") << quoted(rows[r][k]);
      os << "]";
    }
    os << "]\n";
  }
  os << "\n[game]\nlambda_w = " << quoted(game.lambda_w) << "\nv_q = " << quoted(game.v_q)
     << "\nv_u = " << quoted(game.v_u) << "\nomega = " << quoted(game.omega) << "\n\n[costs]\n";
  if (const auto* pw = std::get_if<PiecewiseLinearCost<Rational>>(&game.costs)) {
    os << "kind = \"piecewise\"\nknots = [";
    for (size_t k = 0; k < pw->knots.size(); ++k) {
      os << (k ? ", " : "") << "[" << quoted(pw->knots[k].first) << ", "
         << quoted(pw->knots[k].second) << "]";
    }
    os << "]\nleft_rate = " << quoted(pw->left_rate) << "\nright_rate = "
       << quoted(pw->right_rate) << "\n";
  } else {
    const auto& lg = std::get<LogisticCost<Rational>>(game.costs);
    os << "kind = \"logistic\"\nlocation = " << quoted(lg.location)
       << "\nscale = " << quoted(lg.scale) << "\n";
  }
  return os.str();
}

std::string game_to_toml(const GameSpec& game) { return game_to_toml(to_exact(game)); }

Json to_json(const GameSpec& game) {
  Json axes = Json::array();
  for (const auto& a : game.features.axes()) axes.push_back({{"name", a.name}, {"labels", a.labels}});
  Json costs;
  if (const auto* pw = std::get_if<PiecewiseLinearCost<double>>(&game.costs)) {
    Json knots = Json::array();
    for (const auto& [c, g] : pw->knots) knots.push_back(Json::array({c, g}));
    costs = {{"kind", "piecewise"}, {"knots", knots}, {"left_rate", pw->left_rate},
             {"right_rate", pw->right_rate}};
  } else {
    const auto& lg = std::get<LogisticCost<double>>(game.costs);
    costs = {{"kind", "logistic"}, {"location", lg.location}, {"scale", lg.scale}};
  }
  return {{"axes", axes},
          {"class_axes", game.law.class_axes},
          {"q", game.law.p_class[0]},
          {"u", game.law.p_class[1]},
          {"proxy", {{"w", game.law.p_proxy[0]}, {"b", game.law.p_proxy[1]}}},
          {"lambda_w", game.lambda_w},
          {"v_q", game.v_q},
          {"v_u", game.v_u},
          {"omega", game.omega},
          {"costs", costs}};
}

Json to_json(const ValidationReport& report) {
  Json issues = Json::array();
  for (const auto& is : report.issues) {
    issues.push_back({{"severity", is.severity == Severity::kError ? "error" : "warning"},
                      {"code", is.code},
                      {"message", is.message}});
  }
  return {{"ok", report.ok()}, {"degenerate", report.degenerate}, {"issues", issues}};
}

Json to_json(const FeatureTable& table, const FeatureSpace& X) {
  Json j = Json::object();
  for (Group i : kGroups) {
    Json g = Json::object();
    for (int x = 0; x < table.num_cells; ++x) {
      g[X.num_cells() == table.num_cells ? X.cell_name(x) : std::to_string(x)] = table(i, x);
    }
    j[std::string(group_label(i))] = g;
  }
  return j;
}

Json to_json(const ColorBlindTable& table, const FeatureSpace& X) {
  Json j = Json::object();
  for (size_t x = 0; x < table.values.size(); ++x) {
    j[static_cast<int>(x) < X.num_cells() ? X.cell_name(static_cast<int>(x)) : std::to_string(x)] =
        table.values[x];
  }
  return j;
}

Json to_json(const WWCurve& ww, const EECorrespondence& ee) {
  return {{"ww", {{"l", ww.l}, {"ww", ww.ww}}},
          {"ee", {{"l", ee.l}, {"thresholds", ee.thresholds}}}};
}

Json to_json(const std::vector<Intersection>& points) {
  Json j = Json::array();
  for (size_t k = 0; k < points.size(); ++k) {
    const auto& p = points[k];
    j.push_back({{"label", intersection_label(static_cast<int>(k))},
                 {"l", p.l},
                 {"c", p.c},
                 {"kind", kind_name(p.kind)},
                 {"m", p.m},
                 {"degenerate", p.degenerate}});
  }
  return j;
}

Json to_json(const EquilibriumRecord& r, const FeatureSpace& X) {
  return {{"key", r.key},
          {"cbar", pair_json(r.cbar)},
          {"mixtures", {{"w", r.mixtures[0]}, {"b", r.mixtures[1]}}},
          {"non_discriminatory", r.non_discriminatory},
          {"rates", groups_json(r.rates)},
          {"policy", to_json(r.policy, X)}};
}

Json to_json(const EquilibriumCertificate& c) {
  return {{"accepted", c.accepted},
          {"best_response_residual", c.best_response_residual},
          {"utility_gap", c.utility_gap},
          {"feasibility_residual", c.feasibility_residual},
          {"firm_residual", c.firm_residual},
          {"distance", c.distance},
          {"eps", c.eps}};
}

Json to_json(const ControlledEquilibriumRecord& r, const FeatureSpace& X) {
  auto opt = [](const auto& v) { return v ? Json(*v) : Json(nullptr); };
  return {{"key", r.key},
          {"control", r.control.name()},
          {"cbar", pair_json(r.cbar)},
          {"mixtures", {{"w", opt(r.mixtures[0])}, {"b", opt(r.mixtures[1])}}},
          {"non_discriminatory", r.non_discriminatory},
          {"uncontrolled_equilibrium", r.uncontrolled_equilibrium},
          {"rates", groups_json(r.rates)},
          {"source", r.source},
          {"certificate", to_json(r.certificate)},
          {"policy", to_json(r.policy, X)}};
}

Json to_json(const ControlledSearchResult& r, const FeatureSpace& X) {
  Json recs = Json::array();
  for (const auto& rec : r.records) recs.push_back(to_json(rec, X));
  return {{"c_max", r.c_max},
          {"degenerate", r.degenerate},
          {"evaluations", r.evaluations},
          {"unresolved", r.unresolved},
          {"records", recs}};
}

Json to_json(const GainsVerdict& v) {
  Json samples = Json::array();
  for (const auto& s : v.samples) samples.push_back(interval_json(s));
  return {{"key", v.key},
          {"verdict", verdict_name(v.verdict)},
          {"before", interval_json(v.before)},
          {"face_hull", interval_json(v.face_hull)},
          {"weakly_nested", v.weakly_nested},
          {"samples", samples}};
}

Json to_json(const IdealCheckReport& r, const FeatureSpace& X) {
  Json p1 = Json::array();
  for (const auto& v : r.property1) p1.push_back(to_json(v));
  return {{"control", r.control.name()},
          {"property1", verdict_name(r.property1_verdict)},
          {"property2", r.property2},
          {"property2_relaxed", r.property2_relaxed},
          {"controlled_keys", r.controlled_keys},
          {"nondiscriminatory_keys", r.nondiscriminatory_keys},
          {"extra", r.extra},
          {"missing", r.missing},
          {"gains", p1},
          {"search", to_json(r.search, X)}};
}

Json to_json(const PerturbationCertificate& c, const FeatureSpace& X) {
  return {{"eps", c.eps},
          {"l2_distance", c.l2_distance},
          {"injective", c.injective},
          {"in_range", c.in_range},
          {"colorblind_policy_unchanged", c.colorblind_policy_unchanged},
          {"control", c.control},
          {"ok", c.ok()},
          {"base_f", to_json(c.base_f, X)},
          {"perturbed_f", to_json(c.perturbed_f, X)},
          {"colorblind_policy", to_json(c.colorblind_policy, X)}};
}

Json to_json(const FragilityProbeResult& r, const FeatureSpace& X) {
  return {{"gamma", r.gamma},
          {"delta", r.delta},
          {"accepted", r.accepted()},
          {"cbar", pair_json(r.cbar)},
          {"kept_axes_perturbed", r.kept_axes_perturbed},
          {"kept_axes_exact", r.kept_axes_exact},
          {"epsilon_certificate", to_json(r.epsilon_certificate)},
          {"exact_certificate", to_json(r.exact_certificate)},
          {"perturbation", to_json(r.perturbation, X)}};
}

Json to_json(const ContinuityReport& r) {
  return {{"control", r.control.name()},
          {"eps", r.eps},
          {"samples", r.samples},
          {"max_distance", r.max_distance},
          {"mean_distance", r.mean_distance}};
}

Json to_json(const ImpossibilityWitness& w) {
  return {{"ok", w.ok},
          {"cbar_a", pair_json(w.cbar_a)},
          {"cbar_b", pair_json(w.cbar_b)},
          {"a_discriminatory", w.a_discriminatory},
          {"b_non_discriminatory", w.b_non_discriminatory},
          {"shared_residual", w.shared_residual},
          {"roundtrip_residual", w.roundtrip_residual},
          {"certificate_a", to_json(w.certificate_a)},
          {"certificate_b", to_json(w.certificate_b)},
          {"shared", to_json(ReverseGameInput{w.features, w.d_cb, w.mu_cb, w.f_cb, 0.5})},
          {"game_a", to_json(w.game_a)},
          {"game_b", to_json(w.game_b)},
          {"trace", w.trace}};
}

Json to_json(const ReverseGameInput& input) {
  Json axes = Json::array();
  for (const auto& a : input.features.axes()) {
    axes.push_back({{"name", a.name}, {"labels", a.labels}});
  }
  return {{"axes", axes},
          {"d_cb", input.d_cb.values},
          {"mu_cb", input.mu_cb.values},
          {"f_cb", input.f_cb.values},
          {"threshold", input.threshold}};
}

ReverseGameInput reverse_input_from_json(const Json& j) {
  try {
    ReverseGameInput in;
    std::vector<Axis> axes;
    for (const auto& a : j.at("axes")) {
      axes.push_back({a.at("name").get<std::string>(),
                      a.at("labels").get<std::vector<std::string>>()});
    }
    in.features = FeatureSpace(std::move(axes));
    auto values = [&](const char* key) {
      std::vector<double> out;
      for (const auto& v : j.at(key)) {
        out.push_back(v.is_string() ? to_double(parse_rational(v.get<std::string>()))
                                    : v.get<double>());
      }
      return out;
    };
    in.d_cb = {TableKind::kPolicy, values("d_cb")};
    in.mu_cb = {TableKind::kDistribution, values("mu_cb")};
    in.f_cb = {TableKind::kBelief, values("f_cb")};
    in.threshold = j.value("threshold", 0.5);
    return in;
  } catch (const ParseError&) {
    throw;
  } catch (const std::exception& e) {
    throw ParseError(std::string("reverse-game input: ") + e.what());
  }
}

std::string curves_csv(const WWCurve& ww, const EECorrespondence& ee) {
  std::string s = csv_row({"m", "l", "ww", "ee"});
  for (size_t m = 0; m < ww.l.size(); ++m) {
    const std::string e = m == 0 ? "" : format_number(ee.thresholds[m - 1]);
    s += csv_row({std::to_string(m), format_number(ww.l[m]), format_number(ww.ww[m]), e});
  }
  return s;
}

std::string intersections_csv(const std::vector<Intersection>& points) {
  std::string s = csv_row({"label", "l", "c", "kind", "degenerate"});
  for (size_t k = 0; k < points.size(); ++k) {
    s += csv_row({intersection_label(static_cast<int>(k)), format_number(points[k].l),
                  format_number(points[k].c), kind_name(points[k].kind),
                  points[k].degenerate ? "1" : "0"});
  }
  return s;
}

std::string equilibria_csv(const std::vector<EquilibriumRecord>& records) {
  std::string s = csv_row({"key", "cbar_w", "cbar_b", "l_w", "l_b", "ar_w", "ar_b", "tp_w",
                           "tp_b", "non_discriminatory"});
  for (const auto& r : records) {
    s += csv_row({r.key, format_number(r.cbar.w), format_number(r.cbar.b),
                  format_number(r.mixtures[0]), format_number(r.mixtures[1]),
                  format_number(r.rates[0].acceptance), format_number(r.rates[1].acceptance),
                  format_number(r.rates[0].true_positive),
                  format_number(r.rates[1].true_positive), r.non_discriminatory ? "1" : "0"});
  }
  return s;
}

std::string controlled_csv(const std::vector<ControlledEquilibriumRecord>& records) {
  std::string s = csv_row({"key", "control", "cbar_w", "cbar_b", "ar_w", "ar_b",
                           "non_discriminatory", "uncontrolled_equilibrium", "source",
                           "best_response_residual", "firm_residual"});
  for (const auto& r : records) {
    s += csv_row({r.key, r.control.name(), format_number(r.cbar.w), format_number(r.cbar.b),
                  format_number(r.rates[0].acceptance), format_number(r.rates[1].acceptance),
                  r.non_discriminatory ? "1" : "0", r.uncontrolled_equilibrium ? "1" : "0",
                  r.source, format_number(r.certificate.best_response_residual),
                  format_number(r.certificate.firm_residual)});
  }
  return s;
}

std::string continuity_csv(const ContinuityReport& report) {
  std::string s = csv_row({"sample", "perturbation_norm", "distance", "single_likelihood_class"});
  for (size_t k = 0; k < report.per_sample.size(); ++k) {
    const auto& p = report.per_sample[k];
    s += csv_row({std::to_string(k), format_number(p.perturbation_norm),
                  format_number(p.distance), p.single_likelihood_class ? "1" : "0"});
  }
  return s;
}

std::string tables_csv(const FeatureTable& mu, const FeatureTable& f, const FeatureSpace& X) {
  std::string s = csv_row({"group", "cell", "mu", "f"});
  for (Group i : kGroups) {
    for (int x = 0; x < mu.num_cells; ++x) {
      s += csv_row({std::string(group_label(i)), "\"" + X.cell_name(x) + "\"",
                    format_number(mu(i, x)), format_number(f(i, x))});
    }
  }
  return s;
}

std::string curves_svg(const WWCurve& ww, const EECorrespondence& ee,
                       const std::vector<Intersection>& points) {
  constexpr double kW = 640, kH = 400, kPad = 48;
  double c_max = 0.0;
  for (double v : ww.ww) c_max = std::max(c_max, v);
  const double c_hi = std::max(1e-6, 1.5 * c_max);
  const double c_lo = -0.5 * c_hi;
  const double l_hi = std::max(1e-6, 1.05 * ww.l.back());
  auto px = [&](double l) { return kPad + (kW - 2 * kPad) * l / l_hi; };
  auto py = [&](double c) {
    c = std::clamp(c, c_lo, c_hi);
    return kH - kPad - (kH - 2 * kPad) * (c - c_lo) / (c_hi - c_lo);
  };
  auto num = [](double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.2f", v);
    return std::string(buf);
  };
  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kW << "\" height=\"" << kH
     << "\" viewBox=\"0 0 " << kW << " " << kH << "\">\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  os << "<line x1=\"" << num(px(0)) << "\" y1=\"" << num(py(0)) << "\" x2=\"" << num(px(l_hi))
     << "\" y2=\"" << num(py(0)) << "\" stroke=\"#999\"/>\n";
  os << "<line x1=\"" << num(px(0)) << "\" y1=\"" << num(py(c_lo)) << "\" x2=\"" << num(px(0))
     << "\" y2=\"" << num(py(c_hi)) << "\" stroke=\"#999\"/>\n";
  os << "<polyline fill=\"none\" stroke=\"#1f77b4\" stroke-width=\"2\" points=\"";
  for (size_t m = 0; m < ww.l.size(); ++m) {
    os << (m ? " " : "") << num(px(ww.l[m])) << "," << num(py(ww.ww[m]));
  }
  os << "\"/>\n";
  for (const auto& s : ee_segments(ee, c_lo, c_hi)) {
    os << "<line x1=\"" << num(px(s.l0)) << "\" y1=\"" << num(py(s.c0)) << "\" x2=\""
       << num(px(s.l1)) << "\" y2=\"" << num(py(s.c1))
       << "\" stroke=\"#d62728\" stroke-width=\"2\"/>\n";
  }
  for (size_t k = 0; k < points.size(); ++k) {
    os << "<circle cx=\"" << num(px(points[k].l)) << "\" cy=\"" << num(py(points[k].c))
       << "\" r=\"4\" fill=\"black\"/>\n";
    os << "<text x=\"" << num(px(points[k].l) + 6) << "\" y=\"" << num(py(points[k].c) - 6)
       << "\" font-size=\"11\">" << intersection_label(static_cast<int>(k)) << "</text>\n";
  }
  os << "<text x=\"" << num(kW / 2) << "\" y=\"" << num(kH - 12)
     << "\" font-size=\"12\" text-anchor=\"middle\">likelihood l</text>\n";
  os << "<text x=\"14\" y=\"" << num(kH / 2)
     << "\" font-size=\"12\" transform=\"rotate(-90 14 " << num(kH / 2)
     << ")\" text-anchor=\"middle\">cost threshold</text>\n";
  os << "</svg>\n";
  return os.str();
}

}  // namespace fairlab
