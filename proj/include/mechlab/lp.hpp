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

#pragma once

#include "mechlab/rational.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace mechlab {

enum class Relation { LessEqual, Equal, GreaterEqual };

/// maximize objective . x  subject to  rows[i] . x (relation[i]) rhs[i],
/// lower[j] <= x[j] <= upper[j]. An empty lower bound means -infinity, an
/// empty upper bound +infinity. New variables default to x >= 0.
struct LinearProgram {
  RationalVector objective;
  std::vector<RationalVector> rows;
  std::vector<Relation> relations;
  RationalVector rhs;
  std::vector<std::optional<Rational>> lower;
  std::vector<std::optional<Rational>> upper;

  LinearProgram() = default;
  explicit LinearProgram(RationalVector objective_coefficients);

  std::size_t variable_count() const { return objective.size(); }
  std::size_t constraint_count() const { return rows.size(); }

  /// Returns the row index.
  std::size_t add_constraint(RationalVector row, Relation relation, Rational bound);
};

enum class LpStatus { Optimal, Infeasible, Unbounded };

std::string to_string(LpStatus status);

struct LpResult {
  LpStatus status = LpStatus::Infeasible;
  Rational value;
  RationalVector primal;
  /// One multiplier per constraint row: >= 0 for <= rows, <= 0 for >= rows.
  RationalVector dual;
  /// objective - rows^T dual, per variable.
  RationalVector reduced_costs;
};

/// Exact two-phase primal simplex with Bland's rule. Every optimal result is
/// checked with verify_certificate before it is returned; a failed
/// certificate throws std::logic_error.
LpResult lp_solve(const LinearProgram& lp);

/// Primal feasibility, dual sign conditions, reduced-cost optimality against
/// the variable bounds, complementary slackness and equal objectives. Returns
/// the list of failed conditions (empty when the certificate is valid).
std::vector<std::string> verify_certificate(const LinearProgram& lp, const LpResult& result);

/// Process-wide tallies: calls to lp_solve, optimal results, and optimal
/// results whose certificate passed verify_certificate.
struct LpCounters {
  std::uint64_t solves = 0;
  std::uint64_t optimal = 0;
  std::uint64_t certified = 0;
};
LpCounters lp_counters();

}  // namespace mechlab
