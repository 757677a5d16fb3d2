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

#include "mechlab/lp.hpp"
#include "mechlab/model.hpp"

#include <cstdint>
#include <optional>
#include <vector>

namespace mechlab {

struct GuardLimits {
  /// Maximum number of choice mappings enumerated per buyer.
  std::uint64_t mappings = 2'000'000;
  /// Maximum number of item subsets (2^m, or 2^|support| for decompositions).
  std::uint64_t subsets = 4096;
};

/// Per-type chosen item; empty for the zero option.
using ChoiceMapping = std::vector<std::optional<std::size_t>>;

struct VertexPricing {
  ItemPricing pricing;
  /// Mapping whose LP produced `pricing`.
  ChoiceMapping mapping;
  /// Optimum of that mapping's LP (revenue, or profit when costs are given).
  Rational lp_objective;
  /// Re-evaluated under seller-favoring ties.
  Rational revenue;
  AllocationVector allocation;
  std::optional<Rational> profit;
};

struct EnumerationOptions {
  /// When present the per-mapping LP maximizes profit at these costs.
  std::optional<CostVector> costs;
  GuardLimits guard;
  /// Restricts each type to the items it values above cost (plus the zero
  /// option) and requires sold items to be priced at or above cost. Loses no
  /// optimal pricing but drops vertices useful as mixture atoms.
  bool prune_unprofitable = false;
  /// Drops pricings whose (allocation, objective) pair was already emitted.
  bool deduplicate = true;
};

/// Solves, for every feasible mapping of types to items or the zero option,
/// the LP maximizing the seller objective subject to each type's mapped
/// choice being weakly utility-maximal and individually rational. Results are
/// in mapping order (types in support order, items ascending, zero option
/// last). Throws GuardError when the number of mappings exceeds the guard.
std::vector<VertexPricing> enumerate_vertex_pricings(const TypeDistribution& dist,
                                                     const EnumerationOptions& options = {});

/// Optimal item pricing: SRev when `costs` is empty, SProfit_c otherwise.
VertexPricing opt_item_pricing(const TypeDistribution& dist, const std::optional<CostVector>& costs = std::nullopt,
                               const GuardLimits& guard = {});

/// The LP of one mapping solved with lp_solve. Empty when infeasible.
std::optional<Rational> mapping_lp_value(const TypeDistribution& dist, const ChoiceMapping& mapping,
                                         const std::optional<CostVector>& costs = std::nullopt);

/// Revenue vertices of every mapping (no pruning), deduplicated and reduced to
/// those not dominated by another atom with smaller-or-equal allocation and
/// larger-or-equal revenue. These are the atoms of the mixture LPs.
std::vector<VertexPricing> exante_atoms(const TypeDistribution& dist, const GuardLimits& guard = {});

/// Revenue-optimal mixture of realizable vertex pricings whose expected
/// allocation is at most `x`.
struct ExAnteBuyerResult {
  RandomItemPricing pricing;
  Rational revenue;
  AllocationVector allocation;
  /// Duals of the allocation rows (a supergradient of SRev at x).
  RationalVector allocation_duals;
  /// Dual of the normalization row.
  Rational normalization_dual;
  std::vector<bool> tight;
};

ExAnteBuyerResult exante_srev(const TypeDistribution& dist, const AllocationVector& x, const GuardLimits& guard = {});
/// Same LP over precomputed exante_atoms.
ExAnteBuyerResult exante_srev(const std::vector<VertexPricing>& atoms, const AllocationVector& x);

struct ExAnteSolution {
  std::vector<RandomItemPricing> pricings;
  std::vector<AllocationVector> allocations;
  RationalVector revenues;
  Rational total;
};

/// One joint LP over every buyer's mixture weights with sum_i x_ij <= 1.
ExAnteSolution exante_global(const Instance& instance, const GuardLimits& guard = {});

struct SupergradientCheck {
  AllocationVector y;
  Rational srev_y;
  Rational bound;  // SRev(x0) + c . (y - x0)
  bool ok = false;
};

struct SubgradientResult {
  CostVector costs;
  Rational srev_at_x0;
  std::vector<SupergradientCheck> checks;
  bool nonnegative = false;

  bool ok() const;
};

/// c = allocation-row duals of exante_srev at x0, with the supergradient
/// inequality evaluated at each point of `probes`.
SubgradientResult srev_subgradient(const TypeDistribution& dist, const AllocationVector& x0,
                                   const std::vector<AllocationVector>& probes = {}, const GuardLimits& guard = {});
SubgradientResult srev_subgradient(const std::vector<VertexPricing>& atoms, const AllocationVector& x0,
                                   const std::vector<AllocationVector>& probes = {});

struct Decomposition {
  /// Subsets T of the finite support of p with positive weight, and the weights.
  std::vector<ItemSet> subsets;
  RationalVector weights;
  /// p restricted to each subset, with the same weights.
  RandomItemPricing pricing;
  /// sum_T weight_T x_T and sum_T weight_T rev_T.
  AllocationVector allocation;
  Rational revenue;
};

/// Writes y as a convex combination of E_S[x_{p_T,S}] over T within the finite
/// support of p. Throws std::invalid_argument when y is not dominated by
/// E_S[x_{p,S}], CheckFailure when the feasibility LP fails, GuardError past
/// the subset guard.
Decomposition convex_decompose(const ItemPricing& p, const TypeDistribution& dist,
                               const AvailabilityDistribution& availability, const AllocationVector& y,
                               const GuardLimits& guard = {});

}  // namespace mechlab
