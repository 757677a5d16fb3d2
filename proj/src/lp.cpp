//------------------------------------------------------------------------------
//
//   Copyright 2026 The mechlab Authors
//
//   Licensed under the Apache License, Version 2.0 (the "License");
//   you may not use this file except in compliance with the License.
//   You may obtain a copy of the License at
//
//       http://www.apache.org/licenses/LICENSE-2.0
//
//   Unless required by applicable law or agreed to in writing, software
//   distributed under the License is distributed on an "AS IS" BASIS,
//   WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
//   See the License for the specific language governing permissions and
//   limitations under the License.
//
//------------------------------------------------------------------------------

#include "mechlab/lp.hpp"

#include "mechlab/errors.hpp"

#include <atomic>
#include <limits>
#include <stdexcept>

namespace mechlab {

LinearProgram::LinearProgram(RationalVector objective_coefficients)
    : objective(std::move(objective_coefficients)),
      lower(objective.size(), Rational(0)),
      upper(objective.size()) {}

std::size_t LinearProgram::add_constraint(RationalVector row, Relation relation, Rational bound) {
  if (row.size() != objective.size()) {
    throw DimensionError("add_constraint: row length " + std::to_string(row.size()) + " != " +
                         std::to_string(objective.size()) + " variables");
  }
  rows.push_back(std::move(row));
  relations.push_back(relation);
  rhs.push_back(std::move(bound));
  return rows.size() - 1;
}

std::string to_string(LpStatus status) {
  switch (status) {
    case LpStatus::Optimal:
      return "OPTIMAL";
    case LpStatus::Infeasible:
      return "INFEASIBLE";
    case LpStatus::Unbounded:
      return "UNBOUNDED";
  }
  return "?";
}

namespace {

constexpr std::size_t kNone = std::numeric_limits<std::size_t>::max();

// How an original variable is expressed through non-negative columns.
struct VariableMap {
  enum class Kind { Shift, Mirror, Free } kind = Kind::Shift;
  std::size_t column = 0;  // x = offset + z  |  x = offset - z  |  x = z - z'
  std::size_t negative_column = kNone;
  Rational offset;
};

class Tableau {
 public:
  Tableau(std::vector<RationalVector> matrix, RationalVector rhs, std::vector<std::size_t> basis, std::size_t cols)
      : a_(std::move(matrix)), b_(std::move(rhs)), basis_(std::move(basis)), cols_(cols) {}

  std::size_t rows() const { return a_.size(); }
  std::size_t cols() const { return cols_; }
  const Rational& at(std::size_t i, std::size_t j) const { return a_[i][j]; }
  const Rational& rhs(std::size_t i) const { return b_[i]; }
  std::size_t basic(std::size_t i) const { return basis_[i]; }

  void pivot(std::size_t row, std::size_t col) {
    const Rational inv = 1 / a_[row][col];
    std::vector<std::size_t> nonzero;
    for (std::size_t j = 0; j < cols(); ++j) {
      if (sgn(a_[row][j]) != 0) {
        a_[row][j] *= inv;
        nonzero.push_back(j);
      }
    }
    b_[row] *= inv;
    for (std::size_t i = 0; i < rows(); ++i) {
      if (i == row || sgn(a_[i][col]) == 0) {
        continue;
      }
      const Rational factor = a_[i][col];
      for (std::size_t j : nonzero) {
        a_[i][j] -= factor * a_[row][j];
      }
      b_[i] -= factor * b_[row];
    }
    basis_[row] = col;
  }

  // Maximizes cost . z from the current feasible basis. Columns flagged in
  // `forbidden` never enter. Returns false when unbounded.
  bool optimize(const RationalVector& cost, const std::vector<bool>& forbidden) {
    for (;;) {
      std::size_t entering = kNone;
      for (std::size_t j = 0; j < cols() && entering == kNone; ++j) {
        if (forbidden[j]) {
          continue;
        }
        Rational r = cost[j];
        for (std::size_t i = 0; i < rows(); ++i) {
          if (sgn(a_[i][j]) != 0 && sgn(cost[basis_[i]]) != 0) {
            r -= cost[basis_[i]] * a_[i][j];
          }
        }
        if (sgn(r) > 0) {
          entering = j;
        }
      }
      if (entering == kNone) {
        return true;
      }
      std::size_t leaving = kNone;
      Rational best_ratio;
      for (std::size_t i = 0; i < rows(); ++i) {
        if (sgn(a_[i][entering]) <= 0) {
          continue;
        }
        Rational ratio = b_[i] / a_[i][entering];
        if (leaving == kNone || ratio < best_ratio || (ratio == best_ratio && basis_[i] < basis_[leaving])) {
          leaving = i;
          best_ratio = std::move(ratio);
        }
      }
      if (leaving == kNone) {
        return false;
      }
      pivot(leaving, entering);
    }
  }

  Rational objective(const RationalVector& cost) const {
    Rational v = 0;
    for (std::size_t i = 0; i < rows(); ++i) {
      v += cost[basis_[i]] * b_[i];
    }
    return v;
  }

 private:
  std::vector<RationalVector> a_;
  RationalVector b_;
  std::vector<std::size_t> basis_;
  std::size_t cols_;
};

}  // namespace

namespace {
std::atomic<std::uint64_t> g_solves{0};
std::atomic<std::uint64_t> g_optimal{0};
std::atomic<std::uint64_t> g_certified{0};
}  // namespace

LpResult lp_solve(const LinearProgram& lp) {
  g_solves.fetch_add(1, std::memory_order_relaxed);
  const std::size_t n = lp.variable_count();
  if (lp.lower.size() != n || lp.upper.size() != n || lp.relations.size() != lp.rows.size() ||
      lp.rhs.size() != lp.rows.size()) {
    throw DimensionError("lp_solve: inconsistent LinearProgram dimensions");
  }
  for (const auto& row : lp.rows) {
    if (row.size() != n) {
      throw DimensionError("lp_solve: constraint row length mismatch");
    }
  }

  // Map every variable onto non-negative columns.
  std::vector<VariableMap> vars(n);
  std::size_t z_count = 0;
  struct BoundRow {
    std::size_t column;
    Rational bound;
  };
  std::vector<BoundRow> bound_rows;
  for (std::size_t j = 0; j < n; ++j) {
    auto& v = vars[j];
    if (lp.lower[j]) {
      v.kind = VariableMap::Kind::Shift;
      v.offset = *lp.lower[j];
      v.column = z_count++;
      if (lp.upper[j]) {
        bound_rows.push_back({v.column, *lp.upper[j] - *lp.lower[j]});
      }
    } else if (lp.upper[j]) {
      v.kind = VariableMap::Kind::Mirror;
      v.offset = *lp.upper[j];
      v.column = z_count++;
    } else {
      v.kind = VariableMap::Kind::Free;
      v.column = z_count++;
      v.negative_column = z_count++;
    }
  }

  // Standard rows over z: coefficients, relation, rhs.
  struct StdRow {
    RationalVector coef;
    Relation relation;
    Rational rhs;
  };
  std::vector<StdRow> std_rows;
  std_rows.reserve(lp.rows.size() + bound_rows.size());
  for (std::size_t r = 0; r < lp.rows.size(); ++r) {
    StdRow row{RationalVector(z_count, Rational(0)), lp.relations[r], lp.rhs[r]};
    for (std::size_t j = 0; j < n; ++j) {
      const Rational& a = lp.rows[r][j];
      if (sgn(a) == 0) {
        continue;
      }
      const auto& v = vars[j];
      switch (v.kind) {
        case VariableMap::Kind::Shift:
          row.coef[v.column] += a;
          row.rhs -= a * v.offset;
          break;
        case VariableMap::Kind::Mirror:
          row.coef[v.column] -= a;
          row.rhs -= a * v.offset;
          break;
        case VariableMap::Kind::Free:
          row.coef[v.column] += a;
          row.coef[v.negative_column] -= a;
          break;
      }
    }
    std_rows.push_back(std::move(row));
  }
  for (const auto& br : bound_rows) {
    StdRow row{RationalVector(z_count, Rational(0)), Relation::LessEqual, br.bound};
    row.coef[br.column] = 1;
    std_rows.push_back(std::move(row));
  }

  RationalVector z_cost(z_count, Rational(0));
  Rational cost_offset = 0;
  for (std::size_t j = 0; j < n; ++j) {
    const auto& v = vars[j];
    const Rational& c = lp.objective[j];
    switch (v.kind) {
      case VariableMap::Kind::Shift:
        z_cost[v.column] += c;
        cost_offset += c * v.offset;
        break;
      case VariableMap::Kind::Mirror:
        z_cost[v.column] -= c;
        cost_offset += c * v.offset;
        break;
      case VariableMap::Kind::Free:
        z_cost[v.column] += c;
        z_cost[v.negative_column] -= c;
        break;
    }
  }

  // Columns: z | slacks | artificials.
  const std::size_t m = std_rows.size();
  std::size_t slack_count = 0;
  for (const auto& row : std_rows) {
    slack_count += row.relation == Relation::Equal ? 0 : 1;
  }
  std::vector<int> flip(m, 1);
  std::vector<std::size_t> slack_col(m, kNone);
  std::vector<bool> needs_artificial(m, true);
  {
    std::size_t next_slack = z_count;
    for (std::size_t i = 0; i < m; ++i) {
      if (sgn(std_rows[i].rhs) < 0) {
        flip[i] = -1;
      }
      if (std_rows[i].relation != Relation::Equal) {
        slack_col[i] = next_slack++;
        const int slack_sign = (std_rows[i].relation == Relation::LessEqual ? 1 : -1) * flip[i];
        needs_artificial[i] = slack_sign != 1;
      }
    }
  }
  std::size_t artificial_count = 0;
  for (bool b : needs_artificial) {
    artificial_count += b ? 1 : 0;
  }
  const std::size_t total_cols = z_count + slack_count + artificial_count;
  std::vector<RationalVector> matrix(m, RationalVector(total_cols, Rational(0)));
  RationalVector b(m);
  std::vector<std::size_t> basis(m);
  std::vector<std::size_t> unit_col(m);
  std::vector<bool> is_artificial(total_cols, false);
  {
    std::size_t next_art = z_count + slack_count;
    for (std::size_t i = 0; i < m; ++i) {
      for (std::size_t j = 0; j < z_count; ++j) {
        if (sgn(std_rows[i].coef[j]) != 0) {
          matrix[i][j] = flip[i] * std_rows[i].coef[j];
        }
      }
      if (slack_col[i] != kNone) {
        matrix[i][slack_col[i]] = (std_rows[i].relation == Relation::LessEqual ? 1 : -1) * flip[i];
      }
      b[i] = flip[i] * std_rows[i].rhs;
      if (needs_artificial[i]) {
        matrix[i][next_art] = 1;
        is_artificial[next_art] = true;
        basis[i] = next_art;
        unit_col[i] = next_art;
        ++next_art;
      } else {
        basis[i] = slack_col[i];
        unit_col[i] = slack_col[i];
      }
    }
  }

  Tableau tableau(std::move(matrix), std::move(b), std::move(basis), total_cols);
  LpResult result;

  // Phase 1.
  if (artificial_count > 0) {
    RationalVector phase1(total_cols, Rational(0));
    for (std::size_t j = 0; j < total_cols; ++j) {
      if (is_artificial[j]) {
        phase1[j] = -1;
      }
    }
    tableau.optimize(phase1, std::vector<bool>(total_cols, false));
    if (sgn(tableau.objective(phase1)) < 0) {
      result.status = LpStatus::Infeasible;
      return result;
    }
    for (std::size_t i = 0; i < m; ++i) {
      if (!is_artificial[tableau.basic(i)]) {
        continue;
      }
      for (std::size_t j = 0; j < total_cols; ++j) {
        if (!is_artificial[j] && sgn(tableau.at(i, j)) != 0) {
          tableau.pivot(i, j);
          break;
        }
      }
    }
  }

  // Phase 2.
  RationalVector phase2(total_cols, Rational(0));
  for (std::size_t j = 0; j < z_count; ++j) {
    phase2[j] = z_cost[j];
  }
  if (!tableau.optimize(phase2, is_artificial)) {
    result.status = LpStatus::Unbounded;
    return result;
  }

  RationalVector z(total_cols, Rational(0));
  for (std::size_t i = 0; i < m; ++i) {
    z[tableau.basic(i)] = tableau.rhs(i);
  }
  result.status = LpStatus::Optimal;
  result.primal.assign(n, Rational(0));
  for (std::size_t j = 0; j < n; ++j) {
    const auto& v = vars[j];
    switch (v.kind) {
      case VariableMap::Kind::Shift:
        result.primal[j] = v.offset + z[v.column];
        break;
      case VariableMap::Kind::Mirror:
        result.primal[j] = v.offset - z[v.column];
        break;
      case VariableMap::Kind::Free:
        result.primal[j] = z[v.column] - z[v.negative_column];
        break;
    }
  }
  result.value = tableau.objective(phase2) + cost_offset;

  // y_i = c_B . B^{-1} e_i, read off the column that started as e_i.
  result.dual.assign(lp.rows.size(), Rational(0));
  for (std::size_t r = 0; r < lp.rows.size(); ++r) {
    Rational y = 0;
    for (std::size_t k = 0; k < m; ++k) {
      const Rational& cb = phase2[tableau.basic(k)];
      if (sgn(cb) != 0 && sgn(tableau.at(k, unit_col[r])) != 0) {
        y += cb * tableau.at(k, unit_col[r]);
      }
    }
    result.dual[r] = flip[r] * y;
  }
  result.reduced_costs = lp.objective;
  for (std::size_t r = 0; r < lp.rows.size(); ++r) {
    if (sgn(result.dual[r]) == 0) {
      continue;
    }
    for (std::size_t j = 0; j < n; ++j) {
      if (sgn(lp.rows[r][j]) != 0) {
        result.reduced_costs[j] -= result.dual[r] * lp.rows[r][j];
      }
    }
  }

  g_optimal.fetch_add(1, std::memory_order_relaxed);
  if (auto failures = verify_certificate(lp, result); !failures.empty()) {
    std::string msg = "lp_solve produced an invalid certificate:";
    for (const auto& f : failures) {
      msg += " " + f + ";";
    }
    throw std::logic_error(msg);
  }
  g_certified.fetch_add(1, std::memory_order_relaxed);
  return result;
}

LpCounters lp_counters() {
  return LpCounters{g_solves.load(std::memory_order_relaxed), g_optimal.load(std::memory_order_relaxed),
                    g_certified.load(std::memory_order_relaxed)};
}

std::vector<std::string> verify_certificate(const LinearProgram& lp, const LpResult& result) {
  std::vector<std::string> failures;
  if (result.status != LpStatus::Optimal) {
    failures.push_back("status is " + to_string(result.status));
    return failures;
  }
  const std::size_t n = lp.variable_count();
  if (result.primal.size() != n || result.dual.size() != lp.rows.size()) {
    failures.push_back("certificate dimensions");
    return failures;
  }
  for (std::size_t j = 0; j < n; ++j) {
    if (lp.lower[j] && result.primal[j] < *lp.lower[j]) {
      failures.push_back("x" + std::to_string(j) + " below lower bound");
    }
    if (lp.upper[j] && result.primal[j] > *lp.upper[j]) {
      failures.push_back("x" + std::to_string(j) + " above upper bound");
    }
  }
  Rational dual_objective = 0;
  for (std::size_t r = 0; r < lp.rows.size(); ++r) {
    const Rational activity = dot(lp.rows[r], result.primal);
    const Rational& y = result.dual[r];
    const std::string tag = "row " + std::to_string(r);
    switch (lp.relations[r]) {
      case Relation::LessEqual:
        if (activity > lp.rhs[r]) failures.push_back(tag + " violated");
        if (sgn(y) < 0) failures.push_back(tag + " dual sign");
        break;
      case Relation::GreaterEqual:
        if (activity < lp.rhs[r]) failures.push_back(tag + " violated");
        if (sgn(y) > 0) failures.push_back(tag + " dual sign");
        break;
      case Relation::Equal:
        if (activity != lp.rhs[r]) failures.push_back(tag + " violated");
        break;
    }
    if (sgn(y) != 0 && activity != lp.rhs[r]) {
      failures.push_back(tag + " complementary slackness");
    }
    dual_objective += y * lp.rhs[r];
  }
  RationalVector reduced = lp.objective;
  for (std::size_t r = 0; r < lp.rows.size(); ++r) {
    for (std::size_t j = 0; j < n; ++j) {
      reduced[j] -= result.dual[r] * lp.rows[r][j];
    }
  }
  if (result.reduced_costs.size() == n && reduced != result.reduced_costs) {
    failures.push_back("reduced costs inconsistent with duals");
  }
  for (std::size_t j = 0; j < n; ++j) {
    const int s = sgn(reduced[j]);
    const std::string tag = "x" + std::to_string(j);
    if (s > 0) {
      if (!lp.upper[j] || result.primal[j] != *lp.upper[j]) {
        failures.push_back(tag + " positive reduced cost off upper bound");
      } else {
        dual_objective += reduced[j] * *lp.upper[j];
      }
    } else if (s < 0) {
      if (!lp.lower[j] || result.primal[j] != *lp.lower[j]) {
        failures.push_back(tag + " negative reduced cost off lower bound");
      } else {
        dual_objective += reduced[j] * *lp.lower[j];
      }
    }
  }
  const Rational primal_objective = dot(lp.objective, result.primal);
  if (primal_objective != result.value) {
    failures.push_back("reported value != c.x");
  }
  if (dual_objective != primal_objective) {
    failures.push_back("duality gap " + to_string(Rational(primal_objective - dual_objective)));
  }
  return failures;
}

}  // namespace mechlab
