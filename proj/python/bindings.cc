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

// Python extension. Results cross the boundary as JSON text produced by the
// same serializers the CLI uses; the Python package decodes them.

#include <string>

#include <pybind11/pybind11.h>

#include "fairlab/controls.h"
#include "fairlab/curves.h"
#include "fairlab/equilibrium.h"
#include "fairlab/fragility.h"
#include "fairlab/gamegen.h"
#include "fairlab/io.h"
#include "fairlab/model.h"
#include "fairlab/stats.h"

namespace py = pybind11;

namespace fairlab {
namespace {

FamilyParams family_params(const std::string& gamma, const std::string& delta) {
  FamilyParams p{parse_rational(gamma), parse_rational(delta), false};
  p.limit = p.gamma == 0 || p.delta == 0;
  return p;
}

std::string analyze(const GameSpec& game) {
  require_valid(game);
  const LikelihoodStructure ls = likelihood_structure(game);
  const WWCurve ww = ww_curve(game, ls);
  const EECorrespondence ee = ee_correspondence(game, ls);
  Json eqs = Json::array();
  for (const auto& r : enumerate_equilibria(game)) eqs.push_back(to_json(r, game.features));
  const Json j = {{"likelihoods", ls.values},
                  {"curves", to_json(ww, ee)},
                  {"intersections", to_json(intersections(ww, ee))},
                  {"equilibria", eqs}};
  return j.dump();
}

ControlledSearchOptions options(int grid, double tol) {
  ControlledSearchOptions o;
  o.grid = grid;
  o.tol = tol;
  return o;
}

}  // namespace
}  // namespace fairlab

PYBIND11_MODULE(_fairlab, m) {
  using namespace fairlab;
  m.doc() = "fairlab core bindings";
  py::register_exception<ParseError>(m, "ParseError", PyExc_ValueError);

  py::class_<GameSpec>(m, "Game")
      .def_static("from_toml", &parse_game_toml, py::arg("text"))
      .def_static("load", &load_game, py::arg("path"))
      .def_static(
          "family",
          [](const std::string& gamma, const std::string& delta) {
            return cl_family(family_params(gamma, delta));
          },
          py::arg("gamma") = "1/100", py::arg("delta") = "1/100")
      .def("to_toml", [](const GameSpec& g) { return game_to_toml(g); })
      .def("to_json", [](const GameSpec& g) { return to_json(g).dump(); })
      .def("validate", [](const GameSpec& g) { return to_json(validate_game(g)).dump(); })
      .def_property_readonly("num_cells", [](const GameSpec& g) { return g.features.num_cells(); })
      .def_readonly("lambda_w", &GameSpec::lambda_w)
      .def_readonly("v_q", &GameSpec::v_q)
      .def_readonly("v_u", &GameSpec::v_u)
      .def_readonly("omega", &GameSpec::omega);

  m.def("analyze", &analyze, py::arg("game"));
  m.def(
      "controlled_equilibria",
      [](const GameSpec& g, const std::string& control, int grid, double tol) {
        return to_json(controlled_equilibria(g, parse_control(control), options(grid, tol)),
                       g.features)
            .dump();
      },
      py::arg("game"), py::arg("control"), py::arg("grid") = 200,
      py::arg("tol") = kCertificateTol);
  m.def(
      "ideal_check",
      [](const GameSpec& g, const std::string& control, int grid, double tol) {
        return to_json(ideal_check(g, parse_control(control), options(grid, tol)), g.features)
            .dump();
      },
      py::arg("game"), py::arg("control"), py::arg("grid") = 200,
      py::arg("tol") = kCertificateTol);
  m.def(
      "no_proxies_fragility_probe",
      [](double gamma, double delta, double eps) {
        const FragilityProbeResult r = no_proxies_fragility_probe(gamma, delta, eps);
        return to_json(r, cl_family(gamma, delta).features).dump();
      },
      py::arg("gamma"), py::arg("delta"), py::arg("eps"));
  m.def(
      "continuity_probe",
      [](const GameSpec& g, const std::string& control, double cbar_w, double cbar_b,
         int samples, double eps, unsigned seed) {
        return to_json(continuity_probe(g, parse_control(control), {cbar_w, cbar_b}, samples, eps,
                                        seed))
            .dump();
      },
      py::arg("game"), py::arg("control"), py::arg("cbar_w"), py::arg("cbar_b"),
      py::arg("samples") = 100, py::arg("eps") = 1e-4, py::arg("seed") = 0u);
  m.def(
      "impossibility_witness",
      [](double gamma, double delta) { return to_json(impossibility_witness(gamma, delta)).dump(); },
      py::arg("gamma") = 0.01, py::arg("delta") = 0.01);
}
