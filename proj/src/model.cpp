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

#include "mechlab/model.hpp"

#include "mechlab/errors.hpp"

#include <algorithm>
#include <sstream>

namespace mechlab {

ItemSet full_item_set(std::size_t item_count) {
  if (item_count > kMaxItems) {
    throw DimensionError("too many items for an item-set bitmask");
  }
  return item_count == 0 ? 0U : static_cast<ItemSet>((std::uint64_t{1} << item_count) - 1);
}

std::string to_string(ItemSet set, std::size_t item_count) {
  std::string out = "{";
  bool first = true;
  for (std::size_t j = 0; j < item_count; ++j) {
    if (contains(set, j)) {
      out += first ? "" : " ";
      out += std::to_string(j);
      first = false;
    }
  }
  return out + "}";
}

ItemPricing ItemPricing::withheld(std::size_t item_count) { return ItemPricing{std::vector<Price>(item_count)}; }

ItemSet ItemPricing::finite_support() const {
  ItemSet s = 0;
  for (std::size_t j = 0; j < prices.size(); ++j) {
    if (prices[j].is_finite()) {
      s |= ItemSet{1} << j;
    }
  }
  return s;
}

ItemPricing ItemPricing::restricted_to(ItemSet keep) const {
  ItemPricing out = *this;
  for (std::size_t j = 0; j < prices.size(); ++j) {
    if (!contains(keep, j)) {
      out.prices[j] = Price::infinity();
    }
  }
  return out;
}

RandomItemPricing RandomItemPricing::deterministic(ItemPricing pricing) {
  return RandomItemPricing{{PricingAtom{std::move(pricing), Rational(1)}}};
}

RandomItemPricing RandomItemPricing::normalized() const {
  RandomItemPricing out;
  for (const auto& atom : atoms) {
    if (sgn(atom.weight) == 0) {
      continue;
    }
    auto it = std::find_if(out.atoms.begin(), out.atoms.end(),
                           [&](const PricingAtom& a) { return a.pricing == atom.pricing; });
    if (it == out.atoms.end()) {
      out.atoms.push_back(atom);
    } else {
      it->weight += atom.weight;
    }
  }
  return out;
}

AvailabilityDistribution AvailabilityDistribution::full(std::size_t item_count) {
  AvailabilityDistribution d;
  d.atoms.emplace(full_item_set(item_count), Rational(1));
  return d;
}

RationalVector AvailabilityDistribution::marginals(std::size_t item_count) const {
  RationalVector out(item_count, Rational(0));
  for (const auto& [set, prob] : atoms) {
    for (std::size_t j = 0; j < item_count; ++j) {
      if (contains(set, j)) {
        out[j] += prob;
      }
    }
  }
  return out;
}

Rational lottery_value(const Valuation& values, const Lottery& lottery) {
  if (values.size() != lottery.size()) {
    throw DimensionError("lottery_value: valuation has " + std::to_string(values.size()) + " items, lottery has " +
                         std::to_string(lottery.size()));
  }
  return dot(values, lottery);
}

namespace {

// Lexicographic seller-favoring comparison; see the header for the rule.
struct Candidate {
  std::optional<std::size_t> index;
  Rational utility;
  Rational objective;
  Rational payment;
  Rational cost;
};

bool beats(const Candidate& challenger, const Candidate& incumbent) {
  if (int c = cmp(challenger.utility, incumbent.utility); c != 0) {
    return c > 0;
  }
  if (int c = cmp(challenger.objective, incumbent.objective); c != 0) {
    return c > 0;
  }
  if (int c = cmp(challenger.payment, incumbent.payment); c != 0) {
    return c > 0;
  }
  return !incumbent.index.has_value() && challenger.index.has_value();
}

Candidate none_candidate() { return Candidate{std::nullopt, 0, 0, 0, 0}; }

Choice to_choice(Candidate c) { return Choice{c.index, std::move(c.utility), std::move(c.payment), std::move(c.cost)}; }

void check_costs(std::span<const Rational> costs, std::size_t item_count, const char* where) {
  if (!costs.empty() && costs.size() != item_count) {
    throw DimensionError(std::string(where) + ": cost vector length mismatch");
  }
}

}  // namespace

Choice best_response_menu(const Valuation& values, const LotteryMenu& menu, std::span<const Rational> costs) {
  if (values.size() != menu.item_count) {
    throw DimensionError("best_response_menu: valuation/menu dimension mismatch");
  }
  check_costs(costs, menu.item_count, "best_response_menu");
  Candidate best = none_candidate();
  for (std::size_t k = 0; k < menu.options.size(); ++k) {
    const auto& option = menu.options[k];
    Candidate c;
    c.index = k;
    c.utility = lottery_value(values, option.lottery) - option.price;
    c.payment = option.price;
    c.cost = costs.empty() ? Rational(0) : dot(costs, option.lottery);
    c.objective = c.payment - c.cost;
    if (beats(c, best)) {
      best = std::move(c);
    }
  }
  return to_choice(std::move(best));
}

Choice best_response_items(const Valuation& values, const ItemPricing& pricing, ItemSet available,
                           std::span<const Rational> costs) {
  if (values.size() != pricing.item_count()) {
    throw DimensionError("best_response_items: valuation/pricing dimension mismatch");
  }
  check_costs(costs, values.size(), "best_response_items");
  Candidate best = none_candidate();
  for (std::size_t j = 0; j < values.size(); ++j) {
    if (!contains(available, j) || pricing.prices[j].is_infinite()) {
      continue;
    }
    Candidate c;
    c.index = j;
    c.payment = pricing.prices[j].value();
    c.utility = values[j] - c.payment;
    c.cost = costs.empty() ? Rational(0) : costs[j];
    c.objective = c.payment - c.cost;
    if (beats(c, best)) {
      best = std::move(c);
    }
  }
  return to_choice(std::move(best));
}

Choice best_response_items(const Valuation& values, const ItemPricing& pricing, std::span<const Rational> costs) {
  return best_response_items(values, pricing, full_item_set(values.size()), costs);
}

namespace {

void check_dist_dims(const TypeDistribution& dist, std::size_t item_count, const char* where) {
  if (dist.item_count != item_count) {
    throw DimensionError(std::string(where) + ": distribution has " + std::to_string(dist.item_count) +
                         " items, expected " + std::to_string(item_count));
  }
}

// Accumulates E[payment], E[cost] and the allocation of a random item pricing
// under random availability.
struct ItemPricingTotals {
  Rational revenue = 0;
  Rational cost = 0;
  AllocationVector allocation;
};

ItemPricingTotals accumulate(const TypeDistribution& dist, const RandomItemPricing& pricing,
                             const AvailabilityDistribution& availability, std::span<const Rational> costs) {
  const std::size_t m = dist.item_count;
  ItemPricingTotals totals{0, 0, AllocationVector(m, Rational(0))};
  for (const auto& atom : pricing.atoms) {
    if (atom.pricing.item_count() != m) {
      throw DimensionError("item pricing dimension mismatch");
    }
    if (sgn(atom.weight) == 0) {
      continue;
    }
    for (const auto& [set, set_prob] : availability.atoms) {
      if (sgn(set_prob) == 0) {
        continue;
      }
      const Rational outer = atom.weight * set_prob;
      for (const auto& type : dist.support) {
        if (sgn(type.probability) == 0) {
          continue;
        }
        const Choice choice = best_response_items(type.values, atom.pricing, set, costs);
        if (!choice.bought()) {
          continue;
        }
        const Rational w = outer * type.probability;
        totals.revenue += w * choice.payment;
        totals.cost += w * choice.cost;
        totals.allocation[*choice.index] += w;
      }
    }
  }
  return totals;
}

}  // namespace

Rational expected_revenue(const TypeDistribution& dist, const LotteryMenu& menu) {
  check_dist_dims(dist, menu.item_count, "expected_revenue");
  Rational total = 0;
  for (const auto& type : dist.support) {
    total += type.probability * best_response_menu(type.values, menu).payment;
  }
  return total;
}

Rational expected_revenue(const TypeDistribution& dist, const RandomItemPricing& pricing,
                          const AvailabilityDistribution& availability) {
  return accumulate(dist, pricing, availability, {}).revenue;
}

Rational expected_revenue(const TypeDistribution& dist, const ItemPricing& pricing) {
  return expected_revenue(dist, RandomItemPricing::deterministic(pricing), AvailabilityDistribution::full(dist.item_count));
}

Rational expected_profit(const TypeDistribution& dist, const LotteryMenu& menu, std::span<const Rational> costs) {
  check_dist_dims(dist, menu.item_count, "expected_profit");
  check_costs(costs, menu.item_count, "expected_profit");
  Rational total = 0;
  for (const auto& type : dist.support) {
    const Choice c = best_response_menu(type.values, menu, costs);
    total += type.probability * (c.payment - c.cost);
  }
  return total;
}

Rational expected_profit(const TypeDistribution& dist, const RandomItemPricing& pricing,
                         std::span<const Rational> costs, const AvailabilityDistribution& availability) {
  check_costs(costs, dist.item_count, "expected_profit");
  const auto totals = accumulate(dist, pricing, availability, costs);
  return totals.revenue - totals.cost;
}

AllocationVector allocation_vector(const TypeDistribution& dist, const RandomItemPricing& pricing,
                                   const AvailabilityDistribution& availability) {
  return accumulate(dist, pricing, availability, {}).allocation;
}

AllocationVector allocation_vector(const TypeDistribution& dist, const ItemPricing& pricing) {
  return allocation_vector(dist, RandomItemPricing::deterministic(pricing), AvailabilityDistribution::full(dist.item_count));
}

AllocationVector allocation_vector(const TypeDistribution& dist, const LotteryMenu& menu) {
  check_dist_dims(dist, menu.item_count, "allocation_vector");
  AllocationVector out(menu.item_count, Rational(0));
  for (const auto& type : dist.support) {
    const Choice c = best_response_menu(type.values, menu);
    if (c.bought()) {
      const auto& lottery = menu.options[*c.index].lottery;
      for (std::size_t j = 0; j < out.size(); ++j) {
        out[j] += type.probability * lottery[j];
      }
    }
  }
  return out;
}

std::vector<Violation> validate_distribution(const TypeDistribution& dist, const std::string& location) {
  std::vector<Violation> out;
  if (dist.item_count > kMaxItems) {
    out.push_back({"item count exceeds " + std::to_string(kMaxItems), location});
  }
  Rational mass = 0;
  for (std::size_t t = 0; t < dist.support.size(); ++t) {
    const auto& type = dist.support[t];
    const std::string where = location + ".types[" + std::to_string(t) + "]";
    if (type.values.size() != dist.item_count) {
      out.push_back({"valuation length != m", where});
    }
    for (std::size_t j = 0; j < type.values.size(); ++j) {
      if (sgn(type.values[j]) < 0) {
        out.push_back({"value < 0", where + ".values[" + std::to_string(j) + "]"});
      }
    }
    if (sgn(type.probability) < 0) {
      out.push_back({"probability < 0", where + ".prob"});
    }
    mass += type.probability;
  }
  if (mass != 1) {
    out.push_back({"distribution mass != 1", location + " (mass " + to_string(mass) + ")"});
  }
  return out;
}

std::vector<Violation> validate_instance(const Instance& instance) {
  std::vector<Violation> out;
  if (instance.buyers.empty()) {
    out.push_back({"no buyers", "buyers"});
  }
  for (std::size_t i = 0; i < instance.buyers.size(); ++i) {
    const auto& dist = instance.buyers[i];
    const std::string where = "buyers[" + std::to_string(i) + "]";
    if (dist.item_count != instance.item_count) {
      out.push_back({"distribution dimension != m", where});
    }
    auto sub = validate_distribution(dist, where);
    out.insert(out.end(), sub.begin(), sub.end());
  }
  if (instance.costs) {
    if (instance.costs->size() != instance.item_count) {
      out.push_back({"cost vector length != m", "costs"});
    }
    for (std::size_t j = 0; j < instance.costs->size(); ++j) {
      if (sgn((*instance.costs)[j]) < 0) {
        out.push_back({"cost < 0", "costs[" + std::to_string(j) + "]"});
      }
    }
  }
  return out;
}

std::vector<Violation> validate_menu(const LotteryMenu& menu) {
  std::vector<Violation> out;
  for (std::size_t k = 0; k < menu.options.size(); ++k) {
    const auto& option = menu.options[k];
    const std::string where = "options[" + std::to_string(k) + "]";
    if (option.lottery.size() != menu.item_count) {
      out.push_back({"lottery length != m", where});
    }
    Rational mass = 0;
    for (std::size_t j = 0; j < option.lottery.size(); ++j) {
      if (sgn(option.lottery[j]) < 0 || option.lottery[j] > 1) {
        out.push_back({"lottery probability outside [0,1]", where + ".lottery[" + std::to_string(j) + "]"});
      }
      mass += option.lottery[j];
    }
    if (mass > 1) {
      out.push_back({"lottery mass > 1", where});
    }
    if (sgn(option.price) < 0) {
      out.push_back({"price < 0", where + ".price"});
    }
  }
  return out;
}

std::vector<Violation> validate_random_pricing(const RandomItemPricing& pricing, std::size_t item_count) {
  std::vector<Violation> out;
  Rational mass = 0;
  for (std::size_t a = 0; a < pricing.atoms.size(); ++a) {
    const auto& atom = pricing.atoms[a];
    const std::string where = "atoms[" + std::to_string(a) + "]";
    if (atom.pricing.item_count() != item_count) {
      out.push_back({"pricing length != m", where});
    }
    for (std::size_t j = 0; j < atom.pricing.prices.size(); ++j) {
      if (atom.pricing.prices[j].is_finite() && sgn(atom.pricing.prices[j].value()) < 0) {
        out.push_back({"price < 0", where + ".prices[" + std::to_string(j) + "]"});
      }
    }
    if (sgn(atom.weight) < 0) {
      out.push_back({"weight < 0", where});
    }
    mass += atom.weight;
  }
  if (mass != 1) {
    out.push_back({"pricing weights != 1", "atoms"});
  }
  return out;
}

std::vector<Violation> validate_availability(const AvailabilityDistribution& availability, std::size_t item_count) {
  std::vector<Violation> out;
  Rational mass = 0;
  const ItemSet full = full_item_set(item_count);
  for (const auto& [set, prob] : availability.atoms) {
    if ((set & ~full) != 0) {
      out.push_back({"availability set outside [m]", to_string(set, kMaxItems)});
    }
    if (sgn(prob) < 0) {
      out.push_back({"probability < 0", to_string(set, item_count)});
    }
    mass += prob;
  }
  if (mass != 1) {
    out.push_back({"availability mass != 1", "atoms"});
  }
  return out;
}

void require_valid(const std::vector<Violation>& violations, const std::string& what) {
  if (violations.empty()) {
    return;
  }
  std::ostringstream msg;
  msg << what << " invalid:";
  for (const auto& v : violations) {
    msg << " [" << v.invariant << " at " << v.location << "]";
  }
  throw std::invalid_argument(msg.str());
}

}  // namespace mechlab
