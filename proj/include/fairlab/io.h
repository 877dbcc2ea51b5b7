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

// Game files (TOML), report serialization (JSON, CSV) and the WW/EE plot.
//
// Game file layout; every number may also be written as a string such as
// "1/6" or "0.01":
//
//   [features]
//   axes = [{ name = "score", labels = ["L", "H-", "H+"] },
//           { name = "proxy", labels = ["W", "B"] }]
//   [law]
//   class_axes = ["score"]
//   q = ["1/3", "1/3", "1/3"]          # p(x_Y | q)
//   u = ["2/3", "0.1767", "0.1567"]    # p(x_Y | u)
//   proxy.w = [[0.99, 0.01], ...]      # p(x_-Y | w, x_Y), one row per x_Y
//   proxy.b = [[0.01, 0.99], ...]
//   [game]
//   lambda_w = "1/2"
//   v_q = 1
//   v_u = 1
//   omega = 1
//   [costs]
//   kind = "piecewise"                 # or "logistic" with location, scale
//   knots = [[0, "1/6"], ["2/3", "5/6"]]
//   left_rate = 6
//   right_rate = 6

#ifndef FAIRLAB_IO_H_
#define FAIRLAB_IO_H_

#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "fairlab/controls.h"
#include "fairlab/curves.h"
#include "fairlab/equilibrium.h"
#include "fairlab/fragility.h"
#include "fairlab/gamegen.h"
#include "fairlab/model.h"

namespace fairlab {

using Json = nlohmann::ordered_json;

class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Throw ParseError with the offending key or line.
ExactGameSpec parse_game_toml_exact(std::string_view text);
GameSpec parse_game_toml(std::string_view text);
GameSpec load_game(const std::string& path);

std::string game_to_toml(const ExactGameSpec& game);
std::string game_to_toml(const GameSpec& game);

Json to_json(const GameSpec& game);
Json to_json(const ValidationReport& report);
Json to_json(const FeatureTable& table, const FeatureSpace& X);
Json to_json(const ColorBlindTable& table, const FeatureSpace& X);
Json to_json(const WWCurve& ww, const EECorrespondence& ee);
Json to_json(const std::vector<Intersection>& points);
Json to_json(const EquilibriumRecord& r, const FeatureSpace& X);
Json to_json(const EquilibriumCertificate& c);
Json to_json(const ControlledEquilibriumRecord& r, const FeatureSpace& X);
Json to_json(const ControlledSearchResult& r, const FeatureSpace& X);
Json to_json(const GainsVerdict& v);
Json to_json(const IdealCheckReport& r, const FeatureSpace& X);
Json to_json(const PerturbationCertificate& c, const FeatureSpace& X);
Json to_json(const FragilityProbeResult& r, const FeatureSpace& X);
Json to_json(const ContinuityReport& r);
Json to_json(const ImpossibilityWitness& w);
Json to_json(const ReverseGameInput& input);

// Reads {"axes": [...], "d_cb": [...], "mu_cb": [...], "f_cb": [...],
// "threshold": 0.5}. Throws ParseError.
ReverseGameInput reverse_input_from_json(const Json& j);

// Each CSV starts with a header row; numbers use shortest round-trip form.
std::string curves_csv(const WWCurve& ww, const EECorrespondence& ee);
std::string intersections_csv(const std::vector<Intersection>& points);
std::string equilibria_csv(const std::vector<EquilibriumRecord>& records);
std::string controlled_csv(const std::vector<ControlledEquilibriumRecord>& records);
std::string continuity_csv(const ContinuityReport& report);
std::string tables_csv(const FeatureTable& mu, const FeatureTable& f, const FeatureSpace& X);

// WW as a polyline, EE as its step correspondence, intersections as dots.
std::string curves_svg(const WWCurve& ww, const EECorrespondence& ee,
                       const std::vector<Intersection>& points);

// Shortest decimal string that round-trips.
std::string format_number(double x);

}  // namespace fairlab

#endif  // FAIRLAB_IO_H_
