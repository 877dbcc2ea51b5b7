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

#include "fairlab/lp.h"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <Eigen/Dense>

namespace fairlab {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kCostTol = 1e-11;
constexpr double kPivotTol = 1e-11;
constexpr int kMaxIterations = 20000;

enum class VarState { kBasic, kLower, kUpper };

class Tableau {
 public:
  Tableau(int m, int n) : m_(m), n_(n), t_(m, std::vector<double>(n, 0.0)), beta_(m, 0.0),
                          upper_(n, kInf), state_(n, VarState::kLower), basis_(m, -1) {}

  // Runs the simplex for `cost`; returns the terminal status.
  LpStatus run(const std::vector<double>& cost, int& iterations) {
    int degenerate_streak = 0;
    while (iterations < kMaxIterations) {
      ++iterations;
      const bool bland = degenerate_streak > 50;
      int enter = -1;
      double best = 0.0;
      for (int j = 0; j < n_; ++j) {
        if (state_[j] == VarState::kBasic || upper_[j] <= 0.0) continue;
        double d = cost[j];
        for (int r = 0; r < m_; ++r) d -= cost[basis_[r]] * t_[r][j];
        const double gain = state_[j] == VarState::kLower ? d : -d;
        if (gain > kCostTol && (enter < 0 || (!bland && gain > best))) {
          enter = j;
          best = gain;
          if (bland) break;
        }
      }
      if (enter < 0) return LpStatus::kOptimal;
      const double s = state_[enter] == VarState::kLower ? 1.0 : -1.0;
      double theta = upper_[enter];
      int leave = -1;
      bool leave_to_upper = false;
      for (int r = 0; r < m_; ++r) {
        const double alpha = s * t_[r][enter];
        double lim = kInf;
        bool to_upper = false;
        if (alpha > kPivotTol) {
          lim = std::max(0.0, beta_[r]) / alpha;
        } else if (alpha < -kPivotTol && upper_[basis_[r]] < kInf) {
          lim = std::max(0.0, upper_[basis_[r]] - beta_[r]) / -alpha;
          to_upper = true;
        } else {
          continue;
        }
        if (lim < theta || (lim == theta && leave >= 0 && basis_[r] < basis_[leave])) {
          theta = lim;
          leave = r;
          leave_to_upper = to_upper;
        }
      }
      if (theta == kInf) return LpStatus::kUnbounded;
      degenerate_streak = theta <= 1e-14 ? degenerate_streak + 1 : 0;
      for (int r = 0; r < m_; ++r) beta_[r] -= theta * s * t_[r][enter];
      if (leave < 0) {
        state_[enter] = state_[enter] == VarState::kLower ? VarState::kUpper : VarState::kLower;
        continue;
      }
      const double entering_value = s > 0 ? theta : upper_[enter] - theta;
      const int out = basis_[leave];
      state_[out] = leave_to_upper ? VarState::kUpper : VarState::kLower;
      pivot(leave, enter);
      beta_[leave] = entering_value;
    }
    return LpStatus::kIterationLimit;
  }

  void pivot(int r, int j) {
    const double p = t_[r][j];
    for (double& v : t_[r]) v /= p;
    for (int k = 0; k < m_; ++k) {
      if (k == r) continue;
      const double factor = t_[k][j];
      if (factor == 0.0) continue;
      for (int c = 0; c < n_; ++c) t_[k][c] -= factor * t_[r][c];
      t_[k][j] = 0.0;
    }
    basis_[r] = j;
    state_[j] = VarState::kBasic;
  }

  double value(int j) const {
    if (state_[j] == VarState::kUpper) return upper_[j];
    if (state_[j] == VarState::kLower) return 0.0;
    for (int r = 0; r < m_; ++r) {
      if (basis_[r] == j) return beta_[r];
    }
    return 0.0;
  }

  int m_, n_;
  std::vector<std::vector<double>> t_;
  std::vector<double> beta_;
  std::vector<double> upper_;
  std::vector<VarState> state_;
  std::vector<int> basis_;
};

}  // namespace

LinearProgram LinearProgram::unit_box(int n) {
  LinearProgram lp;
  lp.objective.assign(n, 0.0);
  lp.lower.assign(n, 0.0);
  lp.upper.assign(n, 1.0);
  return lp;
}

LpSolution solve_lp(const LinearProgram& lp) {
  const int n = lp.num_vars();
  if (static_cast<int>(lp.lower.size()) != n || static_cast<int>(lp.upper.size()) != n) {
    throw std::invalid_argument("solve_lp: bound vectors have the wrong size");
  }
  for (int j = 0; j < n; ++j) {
    if (!std::isfinite(lp.lower[j]) || lp.upper[j] < lp.lower[j]) {
      LpSolution bad;
      bad.status = LpStatus::kInfeasible;
      return bad;
    }
  }
  const int m = static_cast<int>(lp.rows.size());
  int slacks = 0;
  for (const auto& row : lp.rows) {
    if (static_cast<int>(row.a.size()) != n) {
      throw std::invalid_argument("solve_lp: row has the wrong size");
    }
    if (row.sense != RowSense::kEq) ++slacks;
  }
  const int total = n + slacks + m;
  Tableau tab(m, total);
  for (int j = 0; j < n; ++j) tab.upper_[j] = lp.upper[j] - lp.lower[j];
  int slack = n;
  for (int r = 0; r < m; ++r) {
    const LpRow& row = lp.rows[r];
    double scale = 0.0;
    for (double v : row.a) scale = std::max(scale, std::abs(v));
    if (scale == 0.0) scale = 1.0;
    double rhs = row.rhs;
    for (int j = 0; j < n; ++j) {
      tab.t_[r][j] = row.a[j] / scale;
      rhs -= row.a[j] * lp.lower[j];
    }
    rhs /= scale;
    if (row.sense != RowSense::kEq) {
      tab.t_[r][slack] = row.sense == RowSense::kLe ? 1.0 : -1.0;
      ++slack;
    }
    if (rhs < 0.0) {
      for (int j = 0; j < n + slacks; ++j) tab.t_[r][j] = -tab.t_[r][j];
      rhs = -rhs;
    }
    const int art = n + slacks + r;
    tab.t_[r][art] = 1.0;
    tab.basis_[r] = art;
    tab.state_[art] = VarState::kBasic;
    tab.beta_[r] = rhs;
  }

  LpSolution sol;
  std::vector<double> phase1(total, 0.0);
  for (int r = 0; r < m; ++r) phase1[n + slacks + r] = -1.0;
  LpStatus st = tab.run(phase1, sol.iterations);
  if (st == LpStatus::kIterationLimit) {
    sol.status = st;
    return sol;
  }
  double infeas = 0.0;
  for (int r = 0; r < m; ++r) {
    if (tab.basis_[r] >= n + slacks) infeas += tab.beta_[r];
  }
  if (infeas > 1e-9) {
    sol.status = LpStatus::kInfeasible;
    return sol;
  }
  for (int r = 0; r < m; ++r) {
    if (tab.basis_[r] < n + slacks) continue;
    for (int j = 0; j < n + slacks; ++j) {
      if (tab.state_[j] != VarState::kBasic && std::abs(tab.t_[r][j]) > 1e-9) {
        const double v = tab.value(j);
        tab.state_[tab.basis_[r]] = VarState::kLower;
        tab.pivot(r, j);
        tab.beta_[r] = v;
        break;
      }
    }
  }
  for (int r = 0; r < m; ++r) tab.upper_[n + slacks + r] = 0.0;
  for (int r = 0; r < m; ++r) {
    if (tab.basis_[r] >= n + slacks) tab.beta_[r] = 0.0;
  }

  std::vector<double> phase2(total, 0.0);
  for (int j = 0; j < n; ++j) phase2[j] = lp.objective[j];
  st = tab.run(phase2, sol.iterations);
  sol.status = st;
  if (st != LpStatus::kOptimal) return sol;
  sol.x.resize(n);
  sol.value = 0.0;
  for (int j = 0; j < n; ++j) {
    sol.x[j] = std::clamp(lp.lower[j] + tab.value(j), lp.lower[j], lp.upper[j]);
    sol.value += lp.objective[j] * sol.x[j];
  }
  return sol;
}

double lp_violation(const LinearProgram& lp, const std::vector<double>& x) {
  double v = 0.0;
  for (int j = 0; j < lp.num_vars(); ++j) {
    v = std::max({v, lp.lower[j] - x[j], x[j] - lp.upper[j]});
  }
  for (const auto& row : lp.rows) {
    double s = -row.rhs;
    for (int j = 0; j < lp.num_vars(); ++j) s += row.a[j] * x[j];
    if (row.sense == RowSense::kEq) v = std::max(v, std::abs(s));
    if (row.sense == RowSense::kLe) v = std::max(v, s);
    if (row.sense == RowSense::kGe) v = std::max(v, -s);
  }
  return v;
}

std::vector<double> project_onto_polytope(const LinearProgram& lp,
                                          const std::vector<double>& point) {
  using Eigen::MatrixXd;
  using Eigen::VectorXd;
  LinearProgram feas = lp;
  std::fill(feas.objective.begin(), feas.objective.end(), 0.0);
  const LpSolution start = solve_lp(feas);
  if (!start.optimal()) return {};
  const int n = lp.num_vars();

  // Equalities E x = e and inequalities G x <= h.
  std::vector<std::vector<double>> E, G;
  std::vector<double> e, h;
  for (const auto& row : lp.rows) {
    if (row.sense == RowSense::kEq) {
      E.push_back(row.a);
      e.push_back(row.rhs);
    } else if (row.sense == RowSense::kLe) {
      G.push_back(row.a);
      h.push_back(row.rhs);
    } else {
      std::vector<double> neg(row.a);
      for (double& v : neg) v = -v;
      G.push_back(neg);
      h.push_back(-row.rhs);
    }
  }
  for (int j = 0; j < n; ++j) {
    std::vector<double> up(n, 0.0), lo(n, 0.0);
    up[j] = 1.0;
    lo[j] = -1.0;
    if (std::isfinite(lp.upper[j])) {
      G.push_back(up);
      h.push_back(lp.upper[j]);
    }
    G.push_back(lo);
    h.push_back(-lp.lower[j]);
  }
  const int ng = static_cast<int>(G.size());
  VectorXd x = Eigen::Map<const VectorXd>(start.x.data(), n);
  const VectorXd p = Eigen::Map<const VectorXd>(point.data(), n);
  auto gdot = [&](int k, const VectorXd& v) {
    double s = 0.0;
    for (int j = 0; j < n; ++j) s += G[k][j] * v[j];
    return s;
  };

  std::vector<int> work;
  auto build = [&](const std::vector<int>& w) {
    MatrixXd A(E.size() + w.size(), n);
    for (size_t r = 0; r < E.size(); ++r) {
      for (int j = 0; j < n; ++j) A(r, j) = E[r][j];
    }
    for (size_t r = 0; r < w.size(); ++r) {
      for (int j = 0; j < n; ++j) A(E.size() + r, j) = G[w[r]][j];
    }
    return A;
  };
  auto rank_of = [&](const std::vector<int>& w) {
    const MatrixXd A = build(w);
    if (A.rows() == 0) return 0L;
    Eigen::CompleteOrthogonalDecomposition<MatrixXd> cod(A);
    cod.setThreshold(1e-10);
    return static_cast<long>(cod.rank());
  };
  long rank = rank_of(work);
  for (int k = 0; k < ng; ++k) {
    if (std::abs(gdot(k, x) - h[k]) <= 1e-10) {
      work.push_back(k);
      const long r = rank_of(work);
      if (r == rank) {
        work.pop_back();
      } else {
        rank = r;
      }
    }
  }

  for (int iter = 0; iter < 2000; ++iter) {
    const MatrixXd A = build(work);
    const VectorXd rhs = p - x;
    VectorXd z = VectorXd::Zero(A.rows());
    VectorXd s = rhs;
    if (A.rows() > 0) {
      Eigen::CompleteOrthogonalDecomposition<MatrixXd> cod(A.transpose());
      cod.setThreshold(1e-10);
      z = cod.solve(rhs);
      s = rhs - A.transpose() * z;
    }
    if (s.norm() <= 1e-12) {
      int drop = -1;
      double most = -1e-12;
      for (size_t r = 0; r < work.size(); ++r) {
        const double nu = z[E.size() + r];
        if (nu < most) {
          most = nu;
          drop = static_cast<int>(r);
        }
      }
      if (drop < 0) break;
      work.erase(work.begin() + drop);
      continue;
    }
    double alpha = 1.0;
    int block = -1;
    for (int k = 0; k < ng; ++k) {
      if (std::find(work.begin(), work.end(), k) != work.end()) continue;
      const double gs = gdot(k, s);
      if (gs > 1e-14) {
        const double a = std::max(0.0, h[k] - gdot(k, x)) / gs;
        if (a < alpha) {
          alpha = a;
          block = k;
        }
      }
    }
    x += alpha * s;
    if (block >= 0) work.push_back(block);
  }
  return std::vector<double>(x.data(), x.data() + n);
}

}  // namespace fairlab
