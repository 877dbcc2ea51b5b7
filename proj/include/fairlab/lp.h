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

// Small dense linear and quadratic programs over boxes.

#ifndef FAIRLAB_LP_H_
#define FAIRLAB_LP_H_

#include <limits>
#include <vector>

namespace fairlab {

enum class RowSense { kEq, kLe, kGe };

struct LpRow {
  std::vector<double> a;
  RowSense sense = RowSense::kEq;
  double rhs = 0.0;
};

// maximize c'x  s.t.  rows,  lower <= x <= upper (lower finite).
struct LinearProgram {
  std::vector<double> objective;
  std::vector<double> lower;
  std::vector<double> upper;
  std::vector<LpRow> rows;

  int num_vars() const { return static_cast<int>(objective.size()); }
  // A program over [0,1]^n with a zero objective.
  static LinearProgram unit_box(int n);
};

enum class LpStatus { kOptimal, kInfeasible, kUnbounded, kIterationLimit };

struct LpSolution {
  LpStatus status = LpStatus::kInfeasible;
  std::vector<double> x;
  double value = 0.0;
  int iterations = 0;
  bool optimal() const { return status == LpStatus::kOptimal; }
};

// Two-phase bounded-variable simplex on a dense tableau.
LpSolution solve_lp(const LinearProgram& lp);

// Largest violation of the rows and bounds at x.
double lp_violation(const LinearProgram& lp, const std::vector<double>& x);

// Euclidean projection of `point` onto the feasible set of `lp` (objective
// ignored), by a primal active-set method started from a feasible vertex.
// Returns nullopt-like empty vector when the set is empty.
std::vector<double> project_onto_polytope(const LinearProgram& lp,
                                          const std::vector<double>& point);

}  // namespace fairlab

#endif  // FAIRLAB_LP_H_
