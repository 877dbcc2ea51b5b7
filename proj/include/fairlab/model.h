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

// Game instances of the statistical-discrimination model: the feature space,
// the factorized probability law, the applicants' cost distribution and the
// payoff parameters. Most types are templated on the scalar so the same
// description can be evaluated in doubles or exactly in rationals.

#ifndef FAIRLAB_MODEL_H_
#define FAIRLAB_MODEL_H_

#include <array>
#include <cmath>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <type_traits>
#include <utility>
#include <variant>
#include <vector>

#include "fairlab/rational.h"

namespace fairlab {

enum class Group : int { kW = 0, kB = 1 };
inline constexpr std::array<Group, 2> kGroups = {Group::kW, Group::kB};
inline constexpr int idx(Group g) { return static_cast<int>(g); }
inline constexpr Group other(Group g) {
  return g == Group::kW ? Group::kB : Group::kW;
}
std::string_view group_label(Group g);
Group parse_group(std::string_view label);

// Qualified (q) or unqualified (u).
enum class ClassLabel : int { kQualified = 0, kUnqualified = 1 };

// Raised when an internal identity that should hold for any well-formed
// input fails; indicates a malformed law or a bug rather than bad user input.
class InvariantViolation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

struct Axis {
  std::string name;
  std::vector<std::string> labels;
};

// Finite product X = X_1 x ... x X_N. Cells are numbered row-major with the
// last axis varying fastest.
class FeatureSpace {
 public:
  FeatureSpace() = default;
  // Throws std::invalid_argument on empty axes or duplicate names/labels.
  explicit FeatureSpace(std::vector<Axis> axes);

  const std::vector<Axis>& axes() const { return axes_; }
  int num_axes() const { return static_cast<int>(axes_.size()); }
  int num_cells() const { return num_cells_; }
  int axis_index(std::string_view name) const;

  std::vector<int> coords(int cell) const;
  int coord(int cell, int axis) const {
    return (cell / strides_[axis]) % static_cast<int>(axes_[axis].labels.size());
  }
  int cell(std::span<const int> coords) const;

  // Row-major index of the projection of `cell` onto `axes` (sorted).
  int project(int cell, std::span<const int> axes) const;
  int num_cells(std::span<const int> axes) const;
  std::vector<int> complement(std::span<const int> axes) const;

  // "(H+,W)".
  std::string cell_name(int cell) const;

 private:
  std::vector<Axis> axes_;
  std::vector<int> strides_;
  int num_cells_ = 0;
};

// p(x | i, y) = p(x_Y | y) * p(x_{-Y} | i, x_Y) for a nonempty set Y of
// class-relevant axes. Both factors are stored as dense tables indexed by the
// row-major projections of x onto Y and onto its complement.
template <typename T>
struct BasicProbabilityLaw {
  std::vector<int> class_axes;
  std::array<std::vector<T>, 2> p_class;                // [y][x_Y]
  std::array<std::vector<std::vector<T>>, 2> p_proxy;   // [i][x_Y][x_-Y]
};

// Interior knots (c_j, G(c_j)) joined linearly, with exponential tails
// G(c) = G_0 exp(r_l (c - c_0)) below the first knot and
// 1 - G(c) = (1 - G_k) exp(-r_r (c - c_k)) above the last.
template <typename T>
struct PiecewiseLinearCost {
  std::vector<std::pair<T, T>> knots;
  T left_rate;
  T right_rate;
};

template <typename T>
struct LogisticCost {
  T location;
  T scale;
};

template <typename T>
using BasicCostDistribution =
    std::variant<PiecewiseLinearCost<T>, LogisticCost<T>>;

template <typename T>
struct BasicGameSpec {
  FeatureSpace features;
  T lambda_w;
  BasicProbabilityLaw<T> law;
  BasicCostDistribution<T> costs;
  T v_q;
  T v_u;
  T omega;

  T lambda(Group i) const { return i == Group::kW ? lambda_w : T(1) - lambda_w; }
  int class_cell(int cell) const {
    return features.project(cell, law.class_axes);
  }
  int proxy_cell(int cell) const {
    return features.project(cell, features.complement(law.class_axes));
  }
  // p(x_Y | y).
  T p_class(ClassLabel y, int cell) const {
    return law.p_class[static_cast<int>(y)][class_cell(cell)];
  }
  // p(x | i, y).
  T p(Group i, ClassLabel y, int cell) const {
    const int yc = class_cell(cell);
    return law.p_class[static_cast<int>(y)][yc] *
           law.p_proxy[idx(i)][yc][proxy_cell(cell)];
  }
};

template <typename T>
struct BasicThresholdPair {
  T w;
  T b;
  const T& operator[](Group i) const { return i == Group::kW ? w : b; }
  T& operator[](Group i) { return i == Group::kW ? w : b; }
};

using ProbabilityLaw = BasicProbabilityLaw<double>;
using CostDistribution = BasicCostDistribution<double>;
using GameSpec = BasicGameSpec<double>;
using CostThresholdPair = BasicThresholdPair<double>;
using ExactGameSpec = BasicGameSpec<Rational>;
using ExactThresholdPair = BasicThresholdPair<Rational>;

GameSpec to_double(const ExactGameSpec& spec);
ExactGameSpec to_exact(const GameSpec& spec);

// ---------------------------------------------------------------------------
// Cost distribution.

namespace internal {
[[noreturn]] inline void no_exact_form() {
  throw std::domain_error(
      "cost distribution has no exact rational value at this point");
}
}  // namespace internal

template <typename T>
T cost_cdf(const BasicCostDistribution<T>& costs, const T& c) {
  if (const auto* pw = std::get_if<PiecewiseLinearCost<T>>(&costs)) {
    const auto& k = pw->knots;
    if (c < k.front().first) {
      if constexpr (std::is_floating_point_v<T>) {
        return k.front().second * std::exp(pw->left_rate * (c - k.front().first));
      } else {
        internal::no_exact_form();
      }
    }
    if (c > k.back().first) {
      if constexpr (std::is_floating_point_v<T>) {
        return T(1) - (T(1) - k.back().second) *
                          std::exp(-pw->right_rate * (c - k.back().first));
      } else {
        internal::no_exact_form();
      }
    }
    for (size_t j = 1; j < k.size(); ++j) {
      if (c <= k[j].first) {
        const T s = (k[j].second - k[j - 1].second) / (k[j].first - k[j - 1].first);
        return k[j - 1].second + s * (c - k[j - 1].first);
      }
    }
    return k.back().second;  // single knot, c == c_0
  }
  if constexpr (std::is_floating_point_v<T>) {
    const auto& lg = std::get<LogisticCost<T>>(costs);
    return T(1) / (T(1) + std::exp(-(c - lg.location) / lg.scale));
  } else {
    internal::no_exact_form();
  }
}

double cost_pdf(const CostDistribution& costs, double c);
// Throws std::invalid_argument unless 0 < p < 1.
double cost_quantile(const CostDistribution& costs, double p);
// Integral of t g(t) over (-inf, c].
double mean_below(const CostDistribution& costs, double c);

// ---------------------------------------------------------------------------
// Validation.

enum class Severity { kError, kWarning };

struct ValidationIssue {
  Severity severity;
  std::string code;
  std::string message;
};

struct ValidationReport {
  std::vector<ValidationIssue> issues;
  // Set when every error is a zero probability (e.g. the gamma = delta = 0
  // limit of the example family); such specs are usable for table
  // computations but refused by the equilibrium search.
  bool degenerate = false;

  bool ok() const;
  bool has(std::string_view code) const;
  std::vector<std::string> errors() const;
};

inline constexpr double kNormalizationTol = 1e-12;
inline constexpr double kLikelihoodTol = 1e-9;

ValidationReport validate_game(const GameSpec& spec);

// Throws std::invalid_argument listing the errors unless the game is valid
// and non-degenerate.
void require_valid(const GameSpec& spec);

}  // namespace fairlab

#endif  // FAIRLAB_MODEL_H_
