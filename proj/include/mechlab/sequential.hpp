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

#include "mechlab/exact_opt.hpp"
#include "mechlab/model.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace mechlab {

/// Buyers are served in `order`; buyer i faces `pricings[i]` (indexed by
/// buyer, not by position) over the items still unsold.
struct SequentialPricing {
  std::vector<std::size_t> order;
  std::vector<RandomItemPricing> pricings;

  bool deterministic() const;
};

/// Identity order 0..n-1.
std::vector<std::size_t> default_order(std::size_t buyers);

/// Throws std::invalid_argument unless `order` is a permutation of the buyers
/// and every pricing has m items and positive-weight atoms summing to 1.
void check_sequential(const Instance& instance, const SequentialPricing& seq);

/// Exact law of the unsold set faced by the buyer at `position` in the order
/// (position == n gives the set left after everyone). Throws GuardError when
/// 2^m exceeds the subset guard.
AvailabilityDistribution availability_dp(const Instance& instance, const SequentialPricing& seq, std::size_t position,
                                         const GuardLimits& guard = {});

struct BuyerCertificate {
  std::size_t buyer = 0;
  std::size_t position = 0;
  RationalVector availability;  // Pr[j in S_i]
  AllocationVector target_allocation;  // x_i / 2
  AllocationVector achieved_allocation;
  Rational target_revenue;  // half the buyer's ex-ante revenue
  Rational achieved_revenue;
  bool availability_ok = false;  // every Pr[j in S_i] >= 1/2
  bool dominance_ok = false;     // E_S[x_{p,S}] >= x_p / 2 for every atom p
  bool allocation_ok = false;
  bool revenue_ok = false;

  bool ok() const { return availability_ok && dominance_ok && allocation_ok && revenue_ok; }
};

struct SequentialBuild {
  SequentialPricing pricing;
  std::vector<BuyerCertificate> certificates;  // in service order
};

/// Builds q_i for each buyer in order: decomposes every atom p of the ex-ante
/// pricing against the exact availability S_i to hit x_p / 2, and merges the
/// pieces. Throws CheckFailure when a decomposition is infeasible.
SequentialBuild build_sequential(const Instance& instance, const ExAnteSolution& ea,
                                 const std::vector<std::size_t>& order, const GuardLimits& guard = {});

/// Conditional-expectation rounding: fixes buyers in order to the atom with
/// the largest exact expected total revenue given the atoms fixed so far.
SequentialPricing derandomize(const Instance& instance, const SequentialPricing& seq, const GuardLimits& guard = {});

struct MonteCarloEstimate {
  std::size_t trials = 0;
  std::uint64_t seed = 0;
  double mean = 0.0;
  double half_width = 0.0;  // 99% normal half-width
};

struct SequentialEvalReport {
  Rational total;
  RationalVector buyer_revenue;     // indexed by buyer
  RationalVector sale_probability;  // per item
  std::vector<RationalVector> availability;  // Pr[j in S] per service position
  std::optional<MonteCarloEstimate> monte_carlo;
};

SequentialEvalReport evaluate_sequential(const Instance& instance, const SequentialPricing& seq,
                                         const GuardLimits& guard = {});

/// Simulates `trials` independent runs with per-trial seeds derived from `seed`.
MonteCarloEstimate simulate_sequential(const Instance& instance, const SequentialPricing& seq, std::size_t trials,
                                       std::uint64_t seed);

struct HalfReport {
  ExAnteSolution exante;
  SequentialBuild build;
  SequentialPricing deterministic;
  Rational randomized_revenue;
  Rational derandomized_revenue;
  /// derandomized_revenue / EA-SRev (1 when EA-SRev is 0).
  Rational ratio;
  std::vector<std::string> failures;

  bool ok() const { return failures.empty(); }
};

/// exante_global, build_sequential, derandomize and exact evaluation, with
/// every certificate checked.
HalfReport verify_half(const Instance& instance, const std::vector<std::size_t>& order, const GuardLimits& guard = {});

}  // namespace mechlab
