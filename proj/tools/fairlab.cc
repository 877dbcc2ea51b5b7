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

// fairlab: batch front end for game validation, curve analysis, controlled
// equilibrium search, ideal-control checks, fragility probes and the full
// reproduction bundle.
//
// Exit codes: 0 success, 1 a check failed, 2 usage or parse error.

#include <chrono>
#include <cmath>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "fairlab/controls.h"
#include "fairlab/curves.h"
#include "fairlab/equilibrium.h"
#include "fairlab/fragility.h"
#include "fairlab/gamegen.h"
#include "fairlab/io.h"
#include "fairlab/model.h"
#include "fairlab/stats.h"

#ifndef FAIRLAB_VERSION
#define FAIRLAB_VERSION "0.0.0"
#endif

namespace fairlab::cli {
namespace {

enum ExitCode : int { kOk = 0, kCheckFailed = 1, kUsage = 2 };

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct RunConfig {
  std::string command;
  std::string game_path;
  std::string gen;  // family:GAMMA,DELTA
  std::string control = "eo";
  double eps = 1e-4;
  int samples = 100;
  int grid = 200;
  double tol = kCertificateTol;
  std::string out;
  unsigned seed = 0;
  std::string format = "table";
  std::string at;  // continuity point, "w:EqA|b:EqB"
  // gen family
  std::string gamma = "1/100";
  std::string delta = "1/100";
  bool limit = false;
  // gen reverse
  std::string input;
};

// Everything a command produces; written to --out and summarized on stdout.
struct Output {
  Json report = Json::object();
  std::map<std::string, std::string> tables;  // name -> CSV
  std::map<std::string, std::string> plots;   // name -> SVG
  std::vector<std::string> lines;             // human-readable summary
  bool passed = true;
};

// ---------------------------------------------------------------------------
// Game sources.

FamilyParams family_params(std::string_view spec) {
  constexpr std::string_view kPrefix = "family:";
  if (spec.substr(0, kPrefix.size()) != kPrefix) {
    throw UsageError("--gen expects family:GAMMA,DELTA, got '" + std::string(spec) + "'");
  }
  const std::string_view rest = spec.substr(kPrefix.size());
  const size_t comma = rest.find(',');
  if (comma == std::string_view::npos) throw UsageError("--gen family needs GAMMA,DELTA");
  FamilyParams p;
  try {
    p.gamma = parse_rational(rest.substr(0, comma));
    p.delta = parse_rational(rest.substr(comma + 1));
  } catch (const std::exception& e) {
    throw UsageError(std::string("--gen: ") + e.what());
  }
  p.limit = p.gamma == 0 || p.delta == 0;
  return p;
}

GameSpec load(const RunConfig& cfg) {
  if (!cfg.game_path.empty()) return load_game(cfg.game_path);
  if (!cfg.gen.empty()) {
    try {
      return cl_family(family_params(cfg.gen));
    } catch (const std::invalid_argument& e) {
      throw UsageError(e.what());
    }
  }
  throw UsageError("a game source is required: --game PATH or --gen family:GAMMA,DELTA");
}

// The family instance behind --gen, or the default (0.01, 0.01) instance.
FamilyParams family_or_default(const RunConfig& cfg) {
  if (!cfg.gen.empty()) return family_params(cfg.gen);
  return family_params("family:1/100,1/100");
}

ControlSpec control(const RunConfig& cfg) {
  try {
    ControlSpec k = parse_control(cfg.control);
    k.tol = std::min(k.tol, cfg.tol);
    return k;
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
}

ControlledSearchOptions search_options(const RunConfig& cfg) {
  ControlledSearchOptions o;
  o.grid = cfg.grid;
  o.tol = cfg.tol;
  return o;
}

std::string pass_fail(bool ok) { return ok ? "pass" : "fail"; }

std::string fmt(double x) { return format_number(x); }

// Threshold pair named by "w:EqA|b:EqB"; the default pairs the first and the
// last intersection.
CostThresholdPair resolve_point(const GameSpec& game, const std::string& at) {
  const auto points = intersections(game);
  if (points.empty()) throw std::invalid_argument("the game has no intersections");
  if (at.empty()) return {points.front().c, points.back().c};
  auto index = [&](std::string_view part, std::string_view group) {
    const std::string prefix = std::string(group) + ":Eq";
    if (part.substr(0, prefix.size()) != prefix) {
      throw UsageError("--at expects w:EqA|b:EqB, got '" + at + "'");
    }
    const int k = std::stoi(std::string(part.substr(prefix.size())));
    if (k < 1 || k > static_cast<int>(points.size())) {
      throw UsageError("--at: no intersection Eq" + std::to_string(k));
    }
    return points[k - 1].c;
  };
  const size_t bar = at.find('|');
  if (bar == std::string::npos) throw UsageError("--at expects w:EqA|b:EqB");
  return {index(std::string_view(at).substr(0, bar), "w"),
          index(std::string_view(at).substr(bar + 1), "b")};
}

// ---------------------------------------------------------------------------
// Commands.

Output cmd_validate(const RunConfig& cfg) {
  Output out;
  const GameSpec game = load(cfg);
  const ValidationReport report = validate_game(game);
  out.report = {{"command", "validate"}, {"ok", report.ok()}, {"validation", to_json(report)}};
  out.passed = report.ok();
  out.lines.push_back(report.ok() ? "valid" : "invalid");
  for (const auto& is : report.issues) {
    out.lines.push_back(std::string(is.severity == Severity::kError ? "error " : "warning ") +
                        is.code + ": " + is.message);
  }
  return out;
}

Output cmd_analyze(const RunConfig& cfg) {
  Output out;
  const GameSpec game = load(cfg);
  require_valid(game);
  const LikelihoodStructure ls = likelihood_structure(game);
  const WWCurve ww = ww_curve(game, ls);
  const EECorrespondence ee = ee_correspondence(game, ls);
  const auto points = intersections(ww, ee);
  const auto records = enumerate_equilibria(game);
  Json eqs = Json::array();
  for (const auto& r : records) eqs.push_back(to_json(r, game.features));
  out.report = {{"command", "analyze"},
                {"game", to_json(game)},
                {"likelihoods", ls.values},
                {"curves", to_json(ww, ee)},
                {"intersections", to_json(points)},
                {"equilibria", eqs}};
  out.tables["curves"] = curves_csv(ww, ee);
  out.tables["intersections"] = intersections_csv(points);
  out.tables["equilibria"] = equilibria_csv(records);
  out.plots["curves"] = curves_svg(ww, ee, points);
  out.lines.push_back(std::to_string(points.size()) + " intersections");
  for (size_t m = 0; m < points.size(); ++m) {
    out.lines.push_back("  Eq" + std::to_string(m + 1) + "  l=" + fmt(points[m].l) +
                        "  c=" + fmt(points[m].c));
  }
  int nd = 0;
  for (const auto& r : records) nd += r.non_discriminatory ? 1 : 0;
  out.lines.push_back(std::to_string(records.size()) + " equilibria, " + std::to_string(nd) +
                      " non-discriminatory");
  return out;
}

Output cmd_control(const RunConfig& cfg) {
  Output out;
  const GameSpec game = load(cfg);
  const ControlSpec k = control(cfg);
  const auto result = controlled_equilibria(game, k, search_options(cfg));
  out.report = {{"command", "control"},
                {"control", k.name()},
                {"result", to_json(result, game.features)}};
  out.tables["controlled"] = controlled_csv(result.records);
  out.passed = !result.degenerate;
  out.lines.push_back(k.name() + ": " + std::to_string(result.records.size()) +
                      " controlled equilibria, " + std::to_string(result.unresolved.size()) +
                      " unresolved cells");
  for (const auto& r : result.records) {
    out.lines.push_back("  " + r.key + (r.non_discriminatory ? "  non-discriminatory" : ""));
  }
  return out;
}

Output cmd_ideal(const RunConfig& cfg) {
  Output out;
  const GameSpec game = load(cfg);
  const ControlSpec k = control(cfg);
  const IdealCheckReport r = ideal_check(game, k, search_options(cfg));
  out.report = {{"command", "ideal"}, {"ideal", to_json(r, game.features)}};
  out.tables["controlled"] = controlled_csv(r.search.records);
  out.passed = r.property1_verdict == Verdict::kPass && r.property2;
  out.lines.push_back(k.name() + " property1 " + verdict_name(r.property1_verdict));
  out.lines.push_back(k.name() + " property2 " + pass_fail(r.property2));
  for (const auto& key : r.extra) out.lines.push_back("  extra " + key);
  for (const auto& key : r.missing) out.lines.push_back("  missing " + key);
  return out;
}

Output cmd_fragility(const RunConfig& cfg) {
  Output out;
  out.report = {{"command", "fragility"}};
  const ControlSpec k = control(cfg);
  GameSpec game;
  if (cfg.game_path.empty()) {
    const FamilyParams p = family_or_default(cfg);
    const double gamma = to_double(p.gamma), delta = to_double(p.delta);
    const FragilityProbeResult probe = no_proxies_fragility_probe(gamma, delta, cfg.eps);
    game = cl_family(p);
    out.report["no_proxies"] = to_json(probe, game.features);
    out.passed = probe.accepted();
    out.lines.push_back("noproxy eps=" + fmt(cfg.eps) + " epsilon-equilibrium " +
                        pass_fail(probe.epsilon_certificate.accepted) + ", exact equilibrium " +
                        pass_fail(probe.exact_certificate.accepted));
  } else {
    game = load(cfg);
    require_valid(game);
  }
  const CostThresholdPair cbar = resolve_point(game, cfg.at);
  const ContinuityReport cont = continuity_probe(game, k, cbar, cfg.samples, cfg.eps, cfg.seed);
  Json cj = to_json(cont);
  cj["cbar"] = {{"w", cbar.w}, {"b", cbar.b}};
  out.report["continuity"] = cj;
  out.tables["continuity"] = continuity_csv(cont);
  out.passed = out.passed && std::isfinite(cont.max_distance);
  out.lines.push_back(k.name() + " continuity eps=" + fmt(cfg.eps) + " samples=" +
                      std::to_string(cont.samples) + " max=" + fmt(cont.max_distance) +
                      " mean=" + fmt(cont.mean_distance));
  return out;
}

// The six (group, cell) entries of the gamma = delta = 0 tables at (1/3, 0).
struct LimitCell {
  Group group;
  int cell;
  const char* label;
  const char* mu;
  const char* f;
};

constexpr LimitCell kLimitCells[] = {
    {Group::kW, 4, "(H+,W)", "1/8", "2/3"},   {Group::kW, 2, "(H-,W)", "1/8", "2/3"},
    {Group::kW, 0, "(L,W)", "1/4", "1/3"},    {Group::kB, 5, "(H+,B)", "7/72", "2/7"},
    {Group::kB, 3, "(H-,B)", "7/72", "2/7"},  {Group::kB, 1, "(L,B)", "22/72", "1/11"},
};

Output cmd_reproduce(const RunConfig& cfg) {
  Output out;
  Json items = Json::array();
  auto record = [&](const std::string& name, bool ok, Json detail) {
    items.push_back({{"item", name}, {"pass", ok}, {"detail", std::move(detail)}});
    out.lines.push_back(pass_fail(ok) + "  " + name);
    out.passed = out.passed && ok;
  };

  // Limit tables, exact arithmetic.
  {
    const FamilyParams p{Rational(0), Rational(0), true};
    const ExactGameSpec g = cl_family_exact(p);
    const ExactThresholdPair cbar = family_threshold_exact(p);
    const auto mu = mu_re(g, cbar);
    const auto f = f_re(g, cbar);
    bool ok = true;
    Json cells = Json::array();
    for (const auto& c : kLimitCells) {
      const bool match = mu(c.group, c.cell) == parse_rational(c.mu) &&
                         f(c.group, c.cell) == parse_rational(c.f);
      ok = ok && match;
      cells.push_back({{"group", std::string(group_label(c.group))},
                       {"cell", c.label},
                       {"mu", to_string(mu(c.group, c.cell))},
                       {"f", to_string(f(c.group, c.cell))},
                       {"match", match}});
    }
    record("limit tables", ok, cells);
  }

  const FamilyParams params = family_or_default(cfg);
  const GameSpec game = cl_family(params);
  const auto points = intersections(game);
  {
    const bool ok = points.size() == 5 && std::abs(points[0].l - 0.5) <= 1e-9 &&
                    std::abs(points[0].c - 1.0 / 3.0) <= 1e-9;
    record("five intersections", ok, to_json(points));
  }

  // Ideal-control matrix.
  const ControlledSearchOptions opts = search_options(cfg);
  {
    const IdealCheckReport r = ideal_check(game, ControlSpec::of(ControlKind::kEqualOpportunity),
                                           opts);
    record("eo ideal", r.property1_verdict == Verdict::kPass && r.property2,
           {{"property1", verdict_name(r.property1_verdict)}, {"property2", r.property2}});
  }
  {
    const IdealCheckReport r = ideal_check(game, ControlSpec::of(ControlKind::kAffirmativeAction),
                                           opts);
    record("aa property1 passes, property2 fails",
           r.property1_verdict == Verdict::kPass && !r.property2,
           {{"property1", verdict_name(r.property1_verdict)},
            {"property2", r.property2},
            {"extra", r.extra}});
  }
  {
    const ControlSpec cb = ControlSpec::of(ControlKind::kColorBlind);
    const CostThresholdPair star = family_threshold(params);
    const FeatureTable d = family_policy();
    const auto cert = verify_controlled_equilibrium(game, cb, star, d, cfg.tol);
    EquilibriumRecord as_eq;
    as_eq.cbar = star;
    as_eq.policy = d;
    const bool discriminatory = !classify_equilibrium(game, as_eq).non_discriminatory;
    const std::string key = controlled_key(game, star, d);
    const IdealCheckReport r = ideal_check(game, cb, opts);
    const bool ok = cert.accepted && discriminatory && !r.property2 &&
                    r.extra == std::vector<std::string>{key};
    record("cb property2 fails with the extra key " + key, ok,
           {{"certificate", to_json(cert)},
            {"discriminatory", discriminatory},
            {"property2", r.property2},
            {"extra", r.extra}});
  }

  {
    const ImpossibilityWitness w =
        impossibility_witness(to_double(params.gamma), to_double(params.delta));
    record("impossibility witness",
           w.ok && w.shared_residual <= 1e-9 && w.roundtrip_residual <= 1e-9, to_json(w));
  }
  {
    const FragilityProbeResult probe = no_proxies_fragility_probe(
        to_double(params.gamma), to_double(params.delta), cfg.eps);
    record("noproxy fragility", probe.accepted(), to_json(probe, game.features));
  }
  {
    const CostThresholdPair at = resolve_point(game, "");
    const ControlSpec eo = ControlSpec::of(ControlKind::kEqualOpportunity);
    const auto coarse = continuity_probe(game, eo, at, cfg.samples, 1e-2, cfg.seed);
    const auto fine = continuity_probe(game, eo, at, cfg.samples, 1e-4, cfg.seed);
    const bool ok = std::isfinite(coarse.max_distance) && std::isfinite(fine.max_distance) &&
                    fine.max_distance <= coarse.max_distance;
    record("eo continuity trend", ok, {{"coarse", to_json(coarse)}, {"fine", to_json(fine)}});
    out.tables["continuity"] = continuity_csv(fine);
  }
  out.report = {{"command", "reproduce"}, {"pass", out.passed}, {"items", items}};
  return out;
}

// Writes the TOML to --out when given, else to stdout.
Output emit_toml(const RunConfig& cfg, const std::string& toml, Json report) {
  Output out;
  out.report = std::move(report);
  if (cfg.out.empty()) {
    std::cout << toml;
  } else {
    std::ofstream(cfg.out) << toml;
    out.lines.push_back("wrote " + cfg.out);
  }
  return out;
}

Output cmd_gen_family(const RunConfig& cfg) {
  FamilyParams p;
  try {
    p.gamma = parse_rational(cfg.gamma);
    p.delta = parse_rational(cfg.delta);
  } catch (const std::exception& e) {
    throw UsageError(e.what());
  }
  p.limit = cfg.limit;
  ExactGameSpec g;
  try {
    g = cl_family_exact(p);
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  return emit_toml(cfg, game_to_toml(g),
                   {{"command", "gen family"}, {"gamma", cfg.gamma}, {"delta", cfg.delta}});
}

Output cmd_gen_reverse(const RunConfig& cfg) {
  std::ifstream in(cfg.input);
  if (!in) throw ParseError("cannot read " + cfg.input);
  Json j;
  try {
    j = Json::parse(in);
  } catch (const std::exception& e) {
    throw ParseError(cfg.input + ": " + e.what());
  }
  const ReverseGameResult r = reverse_game(reverse_input_from_json(j));
  Output out = emit_toml(cfg, game_to_toml(r.game),
                         {{"command", "gen reverse"},
                          {"ok", r.certificate.ok},
                          {"roundtrip_residual", r.certificate.roundtrip_residual},
                          {"certificate", to_json(r.certificate.equilibrium)}});
  out.passed = r.certificate.ok;
  if (!r.certificate.ok) std::cerr << "reverse game certificate failed\n";
  return out;
}

// ---------------------------------------------------------------------------
// Output.

std::string utc_now() {
  const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&t));
  return buf;
}

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::filesystem::create_directories(path.parent_path());
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write " + path.string());
  f << text;
}

void write_run(const RunConfig& cfg, const Output& out, const std::vector<std::string>& argv) {
  namespace fs = std::filesystem;
  const fs::path dir(cfg.out);
  write_file(dir / "report.json", out.report.dump(2) + "\n");
  for (const auto& [name, csv] : out.tables) write_file(dir / "tables" / (name + ".csv"), csv);
  for (const auto& [name, svg] : out.plots) write_file(dir / "plots" / (name + ".svg"), svg);
  const Json meta = {{"fairlab_version", FAIRLAB_VERSION},
                     {"command", cfg.command},
                     {"argv", argv},
                     {"seed", cfg.seed},
                     {"tolerances", {{"certificate", cfg.tol}, {"eps", cfg.eps}}},
                     {"grid", cfg.grid},
                     {"samples", cfg.samples},
                     {"generated_at", utc_now()}};
  write_file(dir / "meta.json", meta.dump(2) + "\n");
}

void print(const RunConfig& cfg, const Output& out) {
  if (cfg.format == "json") {
    std::cout << out.report.dump(2) << "\n";
  } else if (cfg.format == "csv") {
    for (const auto& [name, csv] : out.tables) {
      if (out.tables.size() > 1) std::cout << "# " << name << ".csv\n";
      std::cout << csv;
    }
  } else {
    for (const auto& line : out.lines) std::cout << line << "\n";
  }
}

void add_common(CLI::App* app, RunConfig& cfg, bool with_control) {
  auto* game = app->add_option("--game", cfg.game_path, "game TOML file");
  auto* gen = app->add_option("--gen", cfg.gen, "generated game, family:GAMMA,DELTA");
  game->excludes(gen);
  gen->excludes(game);
  if (with_control) {
    app->add_option("--control", cfg.control, "un, cb, aa, eo, odds, mi:w, mi:b, noproxy");
  }
  app->add_option("--eps", cfg.eps, "perturbation radius");
  app->add_option("--samples", cfg.samples, "continuity samples")->check(CLI::PositiveNumber);
  app->add_option("--grid", cfg.grid, "search grid per axis")->check(CLI::Range(2, 100000));
  app->add_option("--tol", cfg.tol, "certificate tolerance")->check(CLI::PositiveNumber);
  app->add_option("--out", cfg.out, "output directory");
  app->add_option("--seed", cfg.seed, "sampling seed");
  app->add_option("--format", cfg.format, "stdout format")
      ->check(CLI::IsMember({"json", "csv", "table"}));
}

}  // namespace

int run(int argc, char** argv) {
  CLI::App app{"fairlab: equilibria and fairness controls for statistical discrimination games"};
  app.require_subcommand(1);
  app.set_version_flag("--version", FAIRLAB_VERSION);
  RunConfig cfg;

  auto* validate = app.add_subcommand("validate", "check a game file");
  add_common(validate, cfg, false);
  validate->add_option("path", cfg.game_path, "game TOML file");
  auto* analyze = app.add_subcommand("analyze", "WW/EE curves, intersections and equilibria");
  add_common(analyze, cfg, false);
  auto* control_cmd = app.add_subcommand("control", "controlled equilibria under --control");
  add_common(control_cmd, cfg, true);
  auto* ideal = app.add_subcommand("ideal", "check whether --control is ideal");
  add_common(ideal, cfg, true);
  auto* fragility = app.add_subcommand("fragility", "no-proxies and continuity probes");
  add_common(fragility, cfg, true);
  fragility->add_option("--at", cfg.at, "continuity point, w:EqA|b:EqB");
  auto* reproduce = app.add_subcommand("reproduce", "run every reproduction item");
  add_common(reproduce, cfg, false);
  auto* gen = app.add_subcommand("gen", "write game files");
  gen->require_subcommand(1);
  auto* gen_family = gen->add_subcommand("family", "the two-parameter example family");
  gen_family->add_option("--gamma", cfg.gamma, "gamma, rational or decimal");
  gen_family->add_option("--delta", cfg.delta, "delta, rational or decimal");
  gen_family->add_flag("--limit", cfg.limit, "allow gamma = 0 or delta = 0");
  gen_family->add_option("--out", cfg.out, "output TOML path");
  auto* gen_reverse = gen->add_subcommand("reverse", "a game from color-blind tables");
  gen_reverse->add_option("--input", cfg.input, "tables JSON")->required();
  gen_reverse->add_option("--out", cfg.out, "output TOML path");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }
  std::vector<std::string> args(argv, argv + argc);

  try {
    Output out;
    if (validate->parsed()) {
      cfg.command = "validate";
      out = cmd_validate(cfg);
    } else if (analyze->parsed()) {
      cfg.command = "analyze";
      out = cmd_analyze(cfg);
    } else if (control_cmd->parsed()) {
      cfg.command = "control";
      out = cmd_control(cfg);
    } else if (ideal->parsed()) {
      cfg.command = "ideal";
      out = cmd_ideal(cfg);
    } else if (fragility->parsed()) {
      cfg.command = "fragility";
      out = cmd_fragility(cfg);
    } else if (reproduce->parsed()) {
      cfg.command = "reproduce";
      out = cmd_reproduce(cfg);
    } else if (gen_family->parsed()) {
      cfg.command = "gen family";
      return cmd_gen_family(cfg).passed ? kOk : kCheckFailed;
    } else {
      cfg.command = "gen reverse";
      return cmd_gen_reverse(cfg).passed ? kOk : kCheckFailed;
    }
    if (!cfg.out.empty()) write_run(cfg, out, args);
    print(cfg, out);
    return out.passed ? kOk : kCheckFailed;
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return kUsage;
  } catch (const ParseError& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kCheckFailed;
  }
}

}  // namespace fairlab::cli

int main(int argc, char** argv) { return fairlab::cli::run(argc, argv); }
