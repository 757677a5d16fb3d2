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

// Reference implementations used only by tests. They share the data types of
// the library but none of its algorithms: best responses are recomputed by a
// plain scan, optimal pricings by grid search over integer prices, and
// sequential revenue by enumerating joint outcomes.

#include "mechlab/model.hpp"

#include <algorithm>
#include <cstddef>
#include <functional>
#include <optional>
#include <ostream>
#include <random>
#include <vector>

namespace mechlab {

// gtest printers.
inline void PrintTo(const Price& p, std::ostream* os) { *os << to_string(p); }
inline void PrintTo(const ItemPricing& p, std::ostream* os) {
  *os << "(";
  for (std::size_t j = 0; j < p.prices.size(); ++j) *os << (j ? ", " : "") << to_string(p.prices[j]);
  *os << ")";
}

}  // namespace mechlab

namespace oracle {

using mechlab::AllocationVector;
using mechlab::AvailabilityDistribution;
using mechlab::CostVector;
using mechlab::Instance;
using mechlab::ItemPricing;
using mechlab::ItemSet;
using mechlab::LotteryMenu;
using mechlab::Price;
using mechlab::RandomItemPricing;
using mechlab::Rational;
using mechlab::RationalVector;
using mechlab::TypeDistribution;
using mechlab::Valuation;

struct Pick {
  std::optional<std::size_t> item;  // menu option or item; empty for nothing
  Rational utility;
  Rational payment;
  Rational cost;
};

// Utility first, then payment minus cost, then payment, then a real purchase
// over nothing, then the lowest index.
inline bool better(const Pick& a, const Pick& b) {
  if (a.utility != b.utility) return a.utility > b.utility;
  const Rational ga = a.payment - a.cost;
  const Rational gb = b.payment - b.cost;
  if (ga != gb) return ga > gb;
  if (a.payment != b.payment) return a.payment > b.payment;
  if (a.item.has_value() != b.item.has_value()) return a.item.has_value();
  return a.item.value_or(0) < b.item.value_or(0);
}

inline Pick pick_item(const Valuation& v, const ItemPricing& p, ItemSet available, const CostVector* costs) {
  std::vector<Pick> all{{std::nullopt, Rational(0), Rational(0), Rational(0)}};
  for (std::size_t j = 0; j < v.size(); ++j) {
    if (((available >> j) & 1U) == 0 || p.prices[j].is_infinite()) continue;
    const Rational price = p.prices[j].value();
    all.push_back({j, Rational(v[j] - price), price, costs ? (*costs)[j] : Rational(0)});
  }
  return *std::min_element(all.begin(), all.end(), better);
}

inline Pick pick_menu(const Valuation& v, const LotteryMenu& menu, const CostVector* costs) {
  std::vector<Pick> all{{std::nullopt, Rational(0), Rational(0), Rational(0)}};
  for (std::size_t k = 0; k < menu.options.size(); ++k) {
    Rational value = 0;
    Rational cost = 0;
    for (std::size_t j = 0; j < v.size(); ++j) {
      value += v[j] * menu.options[k].lottery[j];
      if (costs) cost += (*costs)[j] * menu.options[k].lottery[j];
    }
    all.push_back({k, Rational(value - menu.options[k].price), menu.options[k].price, cost});
  }
  return *std::min_element(all.begin(), all.end(), better);
}

inline ItemSet everything(std::size_t m) { return m >= 32 ? ~0U : ((1U << m) - 1U); }

inline Rational revenue(const TypeDistribution& d, const ItemPricing& p, const CostVector* costs = nullptr) {
  Rational total = 0;
  for (const auto& t : d.support) {
    const Pick pk = pick_item(t.values, p, everything(d.item_count), costs);
    total += t.probability * (pk.payment - pk.cost);
  }
  return total;
}

inline AllocationVector allocation(const TypeDistribution& d, const ItemPricing& p, ItemSet available,
                                   const CostVector* costs = nullptr) {
  AllocationVector x(d.item_count, Rational(0));
  for (const auto& t : d.support) {
    const Pick pk = pick_item(t.values, p, available, costs);
    if (pk.item) x[*pk.item] += t.probability;
  }
  return x;
}

inline Rational menu_profit(const TypeDistribution& d, const LotteryMenu& menu, const CostVector* costs) {
  Rational total = 0;
  for (const auto& t : d.support) {
    const Pick pk = pick_menu(t.values, menu, costs);
    total += t.probability * (pk.payment - pk.cost);
  }
  return total;
}

// Calls f on every pricing with entries in {0, 1, ..., hi} or infinite.
inline void for_each_grid_pricing(std::size_t m, long hi, const std::function<void(const ItemPricing&)>& f) {
  std::vector<long> idx(m, 0);
  for (;;) {
    ItemPricing p;
    for (long k : idx) p.prices.push_back(k > hi ? Price::infinity() : Price(k));
    f(p);
    std::size_t pos = 0;
    while (pos < m && ++idx[pos] > hi + 1) idx[pos++] = 0;
    if (pos == m) return;
  }
}

inline long max_value(const TypeDistribution& d) {
  Rational best = 0;
  for (const auto& t : d.support)
    for (const auto& v : t.values) best = std::max(best, v);
  mpz_class c = best.get_num() / best.get_den();
  if (c * best.get_den() < best.get_num()) c += 1;
  return c.get_si();
}

// Optimal deterministic item pricing objective for integer values and costs.
// With integral data the difference-constraint vertices are integral, so the
// integer grid up to the largest value contains an optimum.
inline Rational grid_opt(const TypeDistribution& d, const CostVector* costs = nullptr) {
  Rational best = 0;
  for_each_grid_pricing(d.item_count, max_value(d), [&](const ItemPricing& p) {
    best = std::max(best, revenue(d, p, costs));
  });
  return best;
}

// Revenue of a sequential mechanism by enumerating every joint draw of types
// and pricing atoms.
inline Rational sequential_revenue(const Instance& inst, const std::vector<std::size_t>& order,
                                   const std::vector<RandomItemPricing>& pricings) {
  Rational total = 0;
  std::function<void(std::size_t, ItemSet, Rational, Rational)> go = [&](std::size_t pos, ItemSet avail,
                                                                         Rational prob, Rational paid) {
    if (pos == order.size()) {
      total += prob * paid;
      return;
    }
    const std::size_t b = order[pos];
    for (const auto& t : inst.buyers[b].support) {
      for (const auto& a : pricings[b].atoms) {
        const Pick pk = pick_item(t.values, a.pricing, avail, nullptr);
        const ItemSet next = pk.item ? (avail & ~(1U << *pk.item)) : avail;
        go(pos + 1, next, prob * t.probability * a.weight, paid + pk.payment);
      }
    }
  };
  go(0, everything(inst.item_count), Rational(1), Rational(0));
  return total;
}

// Pr[S] for the unsold set faced at `position`, by the same enumeration.
inline AvailabilityDistribution sequential_availability(const Instance& inst, const std::vector<std::size_t>& order,
                                                        const std::vector<RandomItemPricing>& pricings,
                                                        std::size_t position) {
  AvailabilityDistribution out;
  std::function<void(std::size_t, ItemSet, Rational)> go = [&](std::size_t pos, ItemSet avail, Rational prob) {
    if (pos == position) {
      out.atoms[avail] += prob;
      return;
    }
    const std::size_t b = order[pos];
    for (const auto& t : inst.buyers[b].support) {
      for (const auto& a : pricings[b].atoms) {
        const Pick pk = pick_item(t.values, a.pricing, avail, nullptr);
        go(pos + 1, pk.item ? (avail & ~(1U << *pk.item)) : avail, prob * t.probability * a.weight);
      }
    }
  };
  go(0, everything(inst.item_count), Rational(1));
  return out;
}

// E_S[x_{p,S}] summed atom by atom.
inline AllocationVector allocation_under(const TypeDistribution& d, const ItemPricing& p,
                                         const AvailabilityDistribution& avail) {
  AllocationVector x(d.item_count, Rational(0));
  for (const auto& [set, pr] : avail.atoms) {
    const AllocationVector xs = allocation(d, p, set);
    for (std::size_t j = 0; j < x.size(); ++j) x[j] += pr * xs[j];
  }
  return x;
}

inline Rational revenue_under(const TypeDistribution& d, const ItemPricing& p, const AvailabilityDistribution& avail) {
  Rational total = 0;
  for (const auto& [set, pr] : avail.atoms)
    for (const auto& t : d.support) total += pr * t.probability * pick_item(t.values, p, set, nullptr).payment;
  return total;
}

// Small integer-valued distribution; weights 1..3 normalized.
inline TypeDistribution small_distribution(std::mt19937_64& rng, std::size_t m, std::size_t support, long scale) {
  std::uniform_int_distribution<long> val(0, scale);
  std::uniform_int_distribution<long> w(1, 3);
  TypeDistribution d{m, {}};
  long total = 0;
  std::vector<long> ws;
  for (std::size_t t = 0; t < support; ++t) {
    RationalVector v;
    for (std::size_t j = 0; j < m; ++j) v.push_back(Rational(val(rng)));
    d.support.push_back({v, Rational(0)});
    ws.push_back(w(rng));
    total += ws.back();
  }
  for (std::size_t t = 0; t < support; ++t) d.support[t].probability = mechlab::make_rational(ws[t], total);
  return d;
}

}  // namespace oracle
