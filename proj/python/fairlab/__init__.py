# Copyright 2026 The Fairlab Authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#      http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

"""Equilibria and fairness controls for statistical discrimination games."""

import json

from fairlab import _fairlab
from fairlab._fairlab import Game, ParseError

__all__ = [
    "Game",
    "ParseError",
    "analyze",
    "continuity_probe",
    "controlled_equilibria",
    "ideal_check",
    "impossibility_witness",
    "no_proxies_fragility_probe",
    "validate",
]


def validate(game):
    """Validation report of a game as a dict."""
    return json.loads(game.validate())


def analyze(game):
    """Likelihoods, WW/EE curves, intersections and uncontrolled equilibria."""
    return json.loads(_fairlab.analyze(game))


def controlled_equilibria(game, control, grid=200, tol=1e-7):
    """Certified equilibria under a control such as "eo", "cb" or "mi:w"."""
    return json.loads(_fairlab.controlled_equilibria(game, control, grid, tol))


def ideal_check(game, control, grid=200, tol=1e-7):
    """Both ideal-control properties for one control."""
    return json.loads(_fairlab.ideal_check(game, control, grid, tol))


def no_proxies_fragility_probe(gamma, delta, eps):
    return json.loads(_fairlab.no_proxies_fragility_probe(gamma, delta, eps))


def continuity_probe(game, control, cbar, samples=100, eps=1e-4, seed=0):
    """Displacement of controlled best responses under belief perturbations."""
    cbar_w, cbar_b = cbar
    return json.loads(
        _fairlab.continuity_probe(game, control, cbar_w, cbar_b, samples, eps, seed))


def impossibility_witness(gamma=0.01, delta=0.01):
    return json.loads(_fairlab.impossibility_witness(gamma, delta))
