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

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace mechlab {

/// Bitmask over items; bit j set means item j is available.
using ItemSet = std::uint32_t;
inline constexpr std::size_t kMaxItems = 31;

ItemSet full_item_set(std::size_t item_count);
inline bool contains(ItemSet set, std::size_t item) { return ((set >> item) & 1U) != 0; }
std::string to_string(ItemSet set, std::size_t item_count);

/// Per-item values of a unit-demand type; the value of a set is the max over it.
using Valuation = RationalVector;
/// Per-item production costs.
using CostVector = RationalVector;
/// Per-item sale probabilities.
using AllocationVector = RationalVector;
/// Per-item allocation probabilities of a (possibly sub-stochastic) lottery.
using Lottery = RationalVector;

struct WeightedType {
  Valuation values;
  Rational probability;
};

/// Finite-support distribution of one buyer's type.
struct TypeDistribution {
  std::size_t item_count = 0;
  std::vector<WeightedType> support;
};

struct Instance {
  std::size_t item_count = 0;
  std::vector<TypeDistribution> buyers;
  std::optional<CostVector> costs;
};

struct MenuOption {
  Lottery lottery;
  Rational price;
};

/// Finite menu. The zero lottery at price 0 is always implicitly available.
struct LotteryMenu {
  std::size_t item_count = 0;
  std::vector<MenuOption> options;
};

/// Posted per-item prices; an infinite price withholds the item.
struct ItemPricing {
  std::vector<Price> prices;

  static ItemPricing withheld(std::size_t item_count);
  std::size_t item_count() const { return prices.size(); }
  /// Items with a finite price.
  ItemSet finite_support() const;
  /// Same prices on `keep`, infinite elsewhere.
  ItemPricing restricted_to(ItemSet keep) const;

  friend bool operator==(const ItemPricing&, const ItemPricing&) = default;
};

struct PricingAtom {
  ItemPricing pricing;
  Rational weight;
};

/// Distribution over deterministic item pricings.
struct RandomItemPricing {
  std::vector<PricingAtom> atoms;

  static RandomItemPricing deterministic(ItemPricing pricing);
  /// Merges equal pricings and drops zero-weight atoms; atom order is by first
  /// appearance.
  RandomItemPricing normalized() const;
};

/// Law of the set of available items.
struct AvailabilityDistribution {
  std::map<ItemSet, Rational> atoms;

  static AvailabilityDistribution full(std::size_t item_count);
  /// Pr[item in S] per item.
  RationalVector marginals(std::size_t item_count) const;
};

/// A buyer's selected option. `index` is the menu option or item; empty when
/// the buyer takes the zero option.
struct Choice {
  std::optional<std::size_t> index;
  Rational utility;
  Rational payment;
  Rational cost;

  bool bought() const { return index.has_value(); }
};

Rational lottery_value(const Valuation& values, const Lottery& lottery);

// Tie-breaking (seller-favoring): among utility-maximizing options prefer the
// higher seller objective (payment minus cost; just payment when `costs` is
// empty), then the higher payment, then the lower index. The zero option ranks
// after explicit options with equal keys, so a buyer with zero utility buys
// unless that purchase has negative seller objective.

Choice best_response_menu(const Valuation& values, const LotteryMenu& menu, std::span<const Rational> costs = {});

Choice best_response_items(const Valuation& values, const ItemPricing& pricing, ItemSet available,
                           std::span<const Rational> costs = {});
Choice best_response_items(const Valuation& values, const ItemPricing& pricing, std::span<const Rational> costs = {});

Rational expected_revenue(const TypeDistribution& dist, const LotteryMenu& menu);
Rational expected_revenue(const TypeDistribution& dist, const RandomItemPricing& pricing,
                          const AvailabilityDistribution& availability);
Rational expected_revenue(const TypeDistribution& dist, const ItemPricing& pricing);

Rational expected_profit(const TypeDistribution& dist, const LotteryMenu& menu, std::span<const Rational> costs);
Rational expected_profit(const TypeDistribution& dist, const RandomItemPricing& pricing,
                         std::span<const Rational> costs, const AvailabilityDistribution& availability);

AllocationVector allocation_vector(const TypeDistribution& dist, const RandomItemPricing& pricing,
                                   const AvailabilityDistribution& availability);
AllocationVector allocation_vector(const TypeDistribution& dist, const ItemPricing& pricing);
AllocationVector allocation_vector(const TypeDistribution& dist, const LotteryMenu& menu);

struct Violation {
  std::string invariant;
  std::string location;
};

std::vector<Violation> validate_distribution(const TypeDistribution& dist, const std::string& location = "dist");
std::vector<Violation> validate_instance(const Instance& instance);
std::vector<Violation> validate_menu(const LotteryMenu& menu);
std::vector<Violation> validate_random_pricing(const RandomItemPricing& pricing, std::size_t item_count);
std::vector<Violation> validate_availability(const AvailabilityDistribution& availability, std::size_t item_count);

/// Throws std::invalid_argument listing the violations, if any.
void require_valid(const std::vector<Violation>& violations, const std::string& what);

}  // namespace mechlab
