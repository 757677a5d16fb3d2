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

#include "mechlab/exact_opt.hpp"

#include "mechlab/errors.hpp"

#include <algorithm>
#include <bit>
#include <functional>
#include <limits>
#include <set>

namespace mechlab {

namespace {

constexpr std::size_t kNone = std::numeric_limits<std::size_t>::max();

Rational to_rational(std::int64_t x) { return Rational(static_cast<long>(x)); }
const Rational& to_rational(const Rational& x) { return x; }

Rational to_rational(__int128 x) {
  const bool negative = x < 0;
  unsigned __int128 u = negative ? -static_cast<unsigned __int128>(x) : static_cast<unsigned __int128>(x);
  mpz_class z(static_cast<unsigned long>(u >> 64));
  z <<= 64;
  z += static_cast<unsigned long>(static_cast<std::uint64_t>(u));
  if (negative) {
    z = -z;
  }
  return Rational(z);
}

// All-pairs shortest paths over nodes 0 (price reference) and 1..m (items),
// maintained incrementally as difference constraints p_b - p_a <= w arrive as
// edges a -> b.
template <class S>
class DistanceMatrix {
 public:
  explicit DistanceMatrix(std::size_t nodes) : n_(nodes), d_(nodes * nodes, S(0)), finite_(nodes * nodes, 0) {
    for (std::size_t i = 0; i < n_; ++i) {
      finite_[i * n_ + i] = 1;
    }
  }

  bool finite(std::size_t a, std::size_t b) const { return finite_[a * n_ + b] != 0; }
  const S& at(std::size_t a, std::size_t b) const { return d_[a * n_ + b]; }

  // Returns false when the edge closes a negative cycle.
  bool add_edge(std::size_t a, std::size_t b, const S& w) {
    if (finite(b, a)) {
      S cycle = at(b, a) + w;
      if (cycle < 0) {
        return false;
      }
    }
    if (finite(a, b) && !(w < at(a, b))) {
      return true;
    }
    for (std::size_t i = 0; i < n_; ++i) {
      if (!finite(i, a)) {
        continue;
      }
      S via = at(i, a) + w;
      for (std::size_t k = 0; k < n_; ++k) {
        if (!finite(b, k)) {
          continue;
        }
        S candidate = via + at(b, k);
        const std::size_t ik = i * n_ + k;
        if (!finite_[ik] || candidate < d_[ik]) {
          d_[ik] = std::move(candidate);
          finite_[ik] = 1;
        }
      }
    }
    return true;
  }

 private:
  std::size_t n_;
  std::vector<S> d_;
  std::vector<std::uint8_t> finite_;
};

// Scaled problem data. S holds values, costs and prices; O accumulates the
// probability-weighted objective.
template <class S, class O>
struct ScaledProblem {
  std::size_t items = 0;
  std::vector<std::vector<S>> values;  // [type][item]
  std::vector<S> floor;                // p_j >= floor_j for sold items
  std::vector<S> objective_cost;       // subtracted per sale in the objective
  std::vector<O> weights;              // per type
  std::vector<std::vector<std::size_t>> candidates;
  Rational price_scale = 1;      // price = S / price_scale
  Rational objective_scale = 1;  // objective = O / objective_scale
};

template <class S, class O>
class MappingSearch {
 public:
  using Leaf = std::function<void(const std::vector<std::size_t>&, ItemSet, const DistanceMatrix<S>&, const O&)>;

  MappingSearch(const ScaledProblem<S, O>& problem, Leaf leaf)
      : p_(problem), leaf_(std::move(leaf)), levels_(problem.values.size() + 1, DistanceMatrix<S>(problem.items + 1)),
        choice_(problem.values.size(), kNone) {}

  void run() { descend(0, 0); }

 private:
  bool activate(DistanceMatrix<S>& g, std::size_t j, std::size_t t) {
    if (!g.add_edge(j + 1, 0, S(-p_.floor[j]))) {
      return false;
    }
    for (std::size_t s = 0; s < t; ++s) {
      const auto& v = p_.values[s];
      const std::size_t k = choice_[s];
      const bool ok = k == kNone ? g.add_edge(j + 1, 0, S(-v[j])) : g.add_edge(j + 1, k + 1, S(v[k] - v[j]));
      if (!ok) {
        return false;
      }
    }
    return true;
  }

  bool assign(DistanceMatrix<S>& g, std::size_t t, std::size_t j, ItemSet& sold) {
    const auto& v = p_.values[t];
    if (j == kNone) {
      for (std::size_t k = 0; k < p_.items; ++k) {
        if (contains(sold, k) && !g.add_edge(k + 1, 0, S(-v[k]))) {
          return false;
        }
      }
      return true;
    }
    if (!contains(sold, j)) {
      if (!activate(g, j, t)) {
        return false;
      }
      sold |= ItemSet{1} << j;
    }
    if (!g.add_edge(0, j + 1, v[j])) {
      return false;
    }
    for (std::size_t k = 0; k < p_.items; ++k) {
      if (k != j && contains(sold, k) && !g.add_edge(k + 1, j + 1, S(v[j] - v[k]))) {
        return false;
      }
    }
    return true;
  }

  void descend(std::size_t t, ItemSet sold) {
    if (t == p_.values.size()) {
      const DistanceMatrix<S>& g = levels_[t];
      O objective(0);
      for (std::size_t s = 0; s < t; ++s) {
        const std::size_t j = choice_[s];
        if (j != kNone) {
          objective += p_.weights[s] * O(g.at(0, j + 1) - p_.objective_cost[j]);
        }
      }
      leaf_(choice_, sold, g, objective);
      return;
    }
    for (std::size_t j : p_.candidates[t]) {
      choice_[t] = j;
      levels_[t + 1] = levels_[t];
      ItemSet next = sold;
      if (assign(levels_[t + 1], t, j, next)) {
        descend(t + 1, next);
      }
    }
    choice_[t] = kNone;
  }

  const ScaledProblem<S, O>& p_;
  Leaf leaf_;
  std::vector<DistanceMatrix<S>> levels_;
  std::vector<std::size_t> choice_;
};

struct SearchInput {
  const TypeDistribution* dist = nullptr;
  const CostVector* costs = nullptr;  // null for revenue
  bool prune = false;
  GuardLimits guard;
};

std::vector<std::vector<std::size_t>> candidate_lists(const SearchInput& in) {
  const std::size_t m = in.dist->item_count;
  std::vector<std::vector<std::size_t>> lists;
  std::uint64_t product = 1;
  for (const auto& type : in.dist->support) {
    std::vector<std::size_t> items;
    for (std::size_t j = 0; j < m; ++j) {
      const Rational floor = (in.prune && in.costs) ? (*in.costs)[j] : Rational(0);
      if (!in.prune || type.values[j] > floor) {
        items.push_back(j);
      }
    }
    items.push_back(kNone);
    if (product > in.guard.mappings / items.size() + 1) {
      product = in.guard.mappings + 1;
    } else {
      product *= items.size();
    }
    lists.push_back(std::move(items));
  }
  if (product > in.guard.mappings) {
    throw GuardError("choice-mapping enumeration exceeds the guard of " + std::to_string(in.guard.mappings) +
                     " mappings");
  }
  return lists;
}

mpz_class lcm_of_denominators(const std::vector<const Rational*>& xs) {
  mpz_class l = 1;
  for (const Rational* x : xs) {
    mpz_lcm(l.get_mpz_t(), l.get_mpz_t(), x->get_den_mpz_t());
  }
  return l;
}

template <class S, class O>
ScaledProblem<S, O> scale_problem(const SearchInput& in, const mpz_class& value_scale, const mpz_class& weight_scale) {
  const auto& dist = *in.dist;
  const std::size_t m = dist.item_count;
  auto convert = [](const Rational& x, const mpz_class& scale) -> S {
    if constexpr (std::is_same_v<S, Rational>) {
      return x * scale;
    } else {
      const Rational y = x * scale;
      return static_cast<S>(y.get_num().get_si());
    }
  };
  ScaledProblem<S, O> p;
  p.items = m;
  for (const auto& type : dist.support) {
    std::vector<S> row;
    for (const auto& v : type.values) {
      row.push_back(convert(v, value_scale));
    }
    p.values.push_back(std::move(row));
    if constexpr (std::is_same_v<O, Rational>) {
      p.weights.push_back(type.probability * weight_scale);
    } else {
      const Rational w = type.probability * weight_scale;
      p.weights.push_back(static_cast<O>(w.get_num().get_si()));
    }
  }
  for (std::size_t j = 0; j < m; ++j) {
    const Rational c = in.costs ? (*in.costs)[j] : Rational(0);
    p.objective_cost.push_back(convert(c, value_scale));
    p.floor.push_back(in.prune ? convert(c, value_scale) : S(0));
  }
  p.candidates = candidate_lists(in);
  p.price_scale = Rational(value_scale);
  p.objective_scale = Rational(value_scale * weight_scale);
  return p;
}

struct RawLeaf {
  std::vector<std::size_t> choice;
  ItemPricing pricing;
  Rational objective;
};

ChoiceMapping to_mapping(const std::vector<std::size_t>& choice) {
  ChoiceMapping out;
  for (std::size_t j : choice) {
    out.push_back(j == kNone ? std::nullopt : std::optional<std::size_t>(j));
  }
  return out;
}

template <class S, class O>
ItemPricing leaf_pricing(const ScaledProblem<S, O>& p, ItemSet sold, const DistanceMatrix<S>& g) {
  ItemPricing pricing = ItemPricing::withheld(p.items);
  for (std::size_t j = 0; j < p.items; ++j) {
    if (contains(sold, j)) {
      pricing.prices[j] = Price(to_rational(g.at(0, j + 1)) / p.price_scale);
    }
  }
  return pricing;
}

// Runs the search on the scaled problem. With `best_only` only the first
// leaf of maximal objective is reported.
template <class S, class O>
void run_search(const ScaledProblem<S, O>& p, bool best_only, bool skip_repeated_prices,
                const std::function<void(RawLeaf)>& emit) {
  if (best_only) {
    std::optional<O> best;
    std::vector<std::size_t> best_choice;
    ItemPricing best_pricing;
    MappingSearch<S, O> search(p, [&](const std::vector<std::size_t>& choice, ItemSet sold,
                                      const DistanceMatrix<S>& g, const O& objective) {
      if (!best || *best < objective) {
        best = objective;
        best_choice = choice;
        best_pricing = leaf_pricing(p, sold, g);
      }
    });
    search.run();
    emit(RawLeaf{best_choice, best_pricing, to_rational(*best) / p.objective_scale});
    return;
  }
  std::set<std::vector<S>> seen;
  MappingSearch<S, O> search(p, [&](const std::vector<std::size_t>& choice, ItemSet sold, const DistanceMatrix<S>& g,
                                    const O& objective) {
    if (skip_repeated_prices) {
      std::vector<S> key{S(static_cast<long>(sold))};
      for (std::size_t j = 0; j < p.items; ++j) {
        key.push_back(contains(sold, j) ? g.at(0, j + 1) : S(0));
      }
      if (!seen.insert(std::move(key)).second) {
        return;
      }
    }
    emit(RawLeaf{choice, leaf_pricing(p, sold, g), to_rational(objective) / p.objective_scale});
  });
  search.run();
}

void search(const SearchInput& in, bool best_only, bool skip_repeated_prices, const std::function<void(RawLeaf)>& emit) {
  const auto& dist = *in.dist;
  const std::size_t m = dist.item_count;
  std::vector<const Rational*> value_terms;
  std::vector<const Rational*> weight_terms;
  Rational max_abs = 0;
  for (const auto& type : dist.support) {
    for (const auto& v : type.values) {
      value_terms.push_back(&v);
      max_abs = std::max(max_abs, Rational(abs(v)));
    }
    weight_terms.push_back(&type.probability);
  }
  if (in.costs) {
    for (const auto& c : *in.costs) {
      value_terms.push_back(&c);
      max_abs = std::max(max_abs, Rational(abs(c)));
    }
  }
  const mpz_class value_scale = lcm_of_denominators(value_terms);
  const mpz_class weight_scale = lcm_of_denominators(weight_terms);
  // Path sums stay within 8 (m + 2) max|value| and objectives within
  // weight_scale times that.
  const mpz_class path_bound = mpz_class(Rational(max_abs * value_scale).get_num() + 1) * 8 * (m + 2);
  const mpz_class objective_bound = path_bound * weight_scale * 2;
  const bool integral = mpz_sizeinbase(path_bound.get_mpz_t(), 2) < 62 &&
                        mpz_sizeinbase(weight_scale.get_mpz_t(), 2) < 62 &&
                        mpz_sizeinbase(objective_bound.get_mpz_t(), 2) < 125;
  if (integral) {
    run_search(scale_problem<std::int64_t, __int128>(in, value_scale, weight_scale), best_only, skip_repeated_prices,
               emit);
  } else {
    run_search(scale_problem<Rational, Rational>(in, 1, 1), best_only, skip_repeated_prices, emit);
  }
}

VertexPricing reevaluate(const TypeDistribution& dist, RawLeaf leaf, const CostVector* costs) {
  VertexPricing out;
  out.pricing = std::move(leaf.pricing);
  out.mapping = to_mapping(leaf.choice);
  out.lp_objective = std::move(leaf.objective);
  out.allocation.assign(dist.item_count, Rational(0));
  Rational profit = 0;
  const std::span<const Rational> cost_span = costs ? std::span<const Rational>(*costs) : std::span<const Rational>();
  for (const auto& type : dist.support) {
    const Choice choice = best_response_items(type.values, out.pricing, cost_span);
    if (choice.bought()) {
      out.revenue += type.probability * choice.payment;
      profit += type.probability * (choice.payment - choice.cost);
      out.allocation[*choice.index] += type.probability;
    }
  }
  if (costs) {
    out.profit = std::move(profit);
  }
  return out;
}

void check_distribution(const TypeDistribution& dist, const std::optional<CostVector>& costs) {
  require_valid(validate_distribution(dist), "distribution");
  if (dist.item_count > kMaxItems) {
    throw GuardError("more than " + std::to_string(kMaxItems) + " items");
  }
  if (costs && costs->size() != dist.item_count) {
    throw DimensionError("cost vector length mismatch");
  }
}

}  // namespace

std::vector<VertexPricing> enumerate_vertex_pricings(const TypeDistribution& dist, const EnumerationOptions& options) {
  check_distribution(dist, options.costs);
  const CostVector* costs = options.costs ? &*options.costs : nullptr;
  std::vector<VertexPricing> out;
  std::set<RationalVector> seen;
  search(SearchInput{&dist, costs, options.prune_unprofitable, options.guard}, false, options.deduplicate,
         [&](RawLeaf leaf) {
           VertexPricing vp = reevaluate(dist, std::move(leaf), costs);
           if (options.deduplicate) {
             RationalVector key = vp.allocation;
             key.push_back(costs ? *vp.profit : vp.revenue);
             if (!seen.insert(std::move(key)).second) {
               return;
             }
           }
           out.push_back(std::move(vp));
         });
  return out;
}

VertexPricing opt_item_pricing(const TypeDistribution& dist, const std::optional<CostVector>& costs,
                               const GuardLimits& guard) {
  check_distribution(dist, costs);
  const CostVector* cost_ptr = costs ? &*costs : nullptr;
  std::optional<VertexPricing> best;
  search(SearchInput{&dist, cost_ptr, true, guard}, true, false,
         [&](RawLeaf leaf) { best = reevaluate(dist, std::move(leaf), cost_ptr); });
  const Rational& achieved = costs ? *best->profit : best->revenue;
  if (achieved != best->lp_objective) {
    throw CheckFailure("opt_item_pricing: re-evaluated objective " + to_string(achieved) + " != LP optimum " +
                       to_string(best->lp_objective));
  }
  return std::move(*best);
}

std::optional<Rational> mapping_lp_value(const TypeDistribution& dist, const ChoiceMapping& mapping,
                                         const std::optional<CostVector>& costs) {
  check_distribution(dist, costs);
  const std::size_t m = dist.item_count;
  if (mapping.size() != dist.support.size()) {
    throw DimensionError("mapping_lp_value: one choice per type required");
  }
  ItemSet sold = 0;
  for (const auto& j : mapping) {
    if (j) {
      if (*j >= m) {
        throw DimensionError("mapping_lp_value: item index out of range");
      }
      sold |= ItemSet{1} << *j;
    }
  }
  LinearProgram lp(RationalVector(m, Rational(0)));
  Rational constant = 0;
  for (std::size_t t = 0; t < mapping.size(); ++t) {
    const auto& type = dist.support[t];
    if (mapping[t]) {
      lp.objective[*mapping[t]] += type.probability;
      if (costs) {
        constant -= type.probability * (*costs)[*mapping[t]];
      }
    }
  }
  for (std::size_t j = 0; j < m; ++j) {
    if (!contains(sold, j)) {
      lp.upper[j] = Rational(0);  // unsold items are withheld; their column is unused
    }
  }
  for (std::size_t t = 0; t < mapping.size(); ++t) {
    const auto& v = dist.support[t].values;
    if (mapping[t]) {
      const std::size_t j = *mapping[t];
      RationalVector row(m, Rational(0));
      row[j] = 1;
      lp.add_constraint(row, Relation::LessEqual, v[j]);
      for (std::size_t k = 0; k < m; ++k) {
        if (k != j && contains(sold, k)) {
          RationalVector diff(m, Rational(0));
          diff[j] = 1;
          diff[k] = -1;
          lp.add_constraint(std::move(diff), Relation::LessEqual, v[j] - v[k]);
        }
      }
    } else {
      for (std::size_t k = 0; k < m; ++k) {
        if (contains(sold, k)) {
          RationalVector row(m, Rational(0));
          row[k] = 1;
          lp.add_constraint(std::move(row), Relation::GreaterEqual, v[k]);
        }
      }
    }
  }
  const LpResult result = lp_solve(lp);
  if (result.status == LpStatus::Infeasible) {
    return std::nullopt;
  }
  if (result.status == LpStatus::Unbounded) {
    throw std::logic_error("mapping_lp_value: mapping LP unbounded");
  }
  return result.value + constant;
}

std::vector<VertexPricing> exante_atoms(const TypeDistribution& dist, const GuardLimits& guard) {
  EnumerationOptions options;
  options.guard = guard;
  std::vector<VertexPricing> all = enumerate_vertex_pricings(dist, options);
  std::vector<std::size_t> order(all.size());
  std::vector<Rational> mass(all.size());
  for (std::size_t a = 0; a < all.size(); ++a) {
    order[a] = a;
    mass[a] = sum(all[a].allocation);
  }
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (int c = cmp(all[a].revenue, all[b].revenue); c != 0) {
      return c > 0;
    }
    return mass[a] < mass[b];
  });
  std::vector<std::size_t> kept;
  for (std::size_t a : order) {
    const bool dominated = std::any_of(kept.begin(), kept.end(), [&](std::size_t b) {
      for (std::size_t j = 0; j < dist.item_count; ++j) {
        if (all[b].allocation[j] > all[a].allocation[j]) {
          return false;
        }
      }
      return true;
    });
    if (!dominated) {
      kept.push_back(a);
    }
  }
  std::sort(kept.begin(), kept.end());
  std::vector<VertexPricing> out;
  out.reserve(kept.size());
  for (std::size_t a : kept) {
    out.push_back(std::move(all[a]));
  }
  return out;
}

ExAnteBuyerResult exante_srev(const TypeDistribution& dist, const AllocationVector& x, const GuardLimits& guard) {
  return exante_srev(exante_atoms(dist, guard), x);
}

ExAnteBuyerResult exante_srev(const std::vector<VertexPricing>& atoms, const AllocationVector& x) {
  if (atoms.empty()) {
    throw std::invalid_argument("exante_srev: no atoms");
  }
  const std::size_t m = atoms.front().pricing.item_count();
  if (x.size() != m) {
    throw DimensionError("exante_srev: allocation vector length mismatch");
  }
  for (const auto& xj : x) {
    if (sgn(xj) < 0) {
      throw std::invalid_argument("exante_srev: negative allocation bound");
    }
  }
  LinearProgram lp;
  for (const auto& atom : atoms) {
    lp.objective.push_back(atom.revenue);
    lp.lower.emplace_back(Rational(0));
    lp.upper.emplace_back(std::nullopt);
  }
  for (std::size_t j = 0; j < m; ++j) {
    RationalVector row;
    for (const auto& atom : atoms) {
      row.push_back(atom.allocation[j]);
    }
    lp.add_constraint(std::move(row), Relation::LessEqual, x[j]);
  }
  lp.add_constraint(RationalVector(atoms.size(), Rational(1)), Relation::Equal, 1);
  const LpResult result = lp_solve(lp);
  if (result.status != LpStatus::Optimal) {
    throw CheckFailure("exante_srev: mixture LP " + to_string(result.status));
  }
  ExAnteBuyerResult out;
  out.revenue = result.value;
  out.allocation.assign(m, Rational(0));
  for (std::size_t a = 0; a < atoms.size(); ++a) {
    if (sgn(result.primal[a]) > 0) {
      out.pricing.atoms.push_back(PricingAtom{atoms[a].pricing, result.primal[a]});
      for (std::size_t j = 0; j < m; ++j) {
        out.allocation[j] += result.primal[a] * atoms[a].allocation[j];
      }
    }
  }
  out.pricing = out.pricing.normalized();
  out.allocation_duals.assign(result.dual.begin(), result.dual.begin() + static_cast<std::ptrdiff_t>(m));
  out.normalization_dual = result.dual[m];
  for (std::size_t j = 0; j < m; ++j) {
    out.tight.push_back(out.allocation[j] == x[j]);
  }
  return out;
}

ExAnteSolution exante_global(const Instance& instance, const GuardLimits& guard) {
  require_valid(validate_instance(instance), "instance");
  const std::size_t m = instance.item_count;
  const std::size_t n = instance.buyers.size();
  std::vector<std::vector<VertexPricing>> atoms;
  std::vector<std::size_t> offset{0};
  for (const auto& buyer : instance.buyers) {
    atoms.push_back(exante_atoms(buyer, guard));
    offset.push_back(offset.back() + atoms.back().size());
  }
  const std::size_t vars = offset.back();
  LinearProgram lp;
  for (const auto& list : atoms) {
    for (const auto& atom : list) {
      lp.objective.push_back(atom.revenue);
      lp.lower.emplace_back(Rational(0));
      lp.upper.emplace_back(std::nullopt);
    }
  }
  for (std::size_t j = 0; j < m; ++j) {
    RationalVector row;
    row.reserve(vars);
    for (const auto& list : atoms) {
      for (const auto& atom : list) {
        row.push_back(atom.allocation[j]);
      }
    }
    lp.add_constraint(std::move(row), Relation::LessEqual, 1);
  }
  for (std::size_t i = 0; i < n; ++i) {
    RationalVector row(vars, Rational(0));
    for (std::size_t a = offset[i]; a < offset[i + 1]; ++a) {
      row[a] = 1;
    }
    lp.add_constraint(std::move(row), Relation::Equal, 1);
  }
  const LpResult result = lp_solve(lp);
  if (result.status != LpStatus::Optimal) {
    throw CheckFailure("exante_global: joint LP " + to_string(result.status));
  }
  ExAnteSolution out;
  out.total = result.value;
  for (std::size_t i = 0; i < n; ++i) {
    RandomItemPricing pricing;
    AllocationVector x(m, Rational(0));
    Rational revenue = 0;
    for (std::size_t a = offset[i]; a < offset[i + 1]; ++a) {
      const Rational& w = result.primal[a];
      if (sgn(w) == 0) {
        continue;
      }
      const auto& atom = atoms[i][a - offset[i]];
      pricing.atoms.push_back(PricingAtom{atom.pricing, w});
      revenue += w * atom.revenue;
      for (std::size_t j = 0; j < m; ++j) {
        x[j] += w * atom.allocation[j];
      }
    }
    out.pricings.push_back(pricing.normalized());
    out.allocations.push_back(std::move(x));
    out.revenues.push_back(std::move(revenue));
  }
  return out;
}

bool SubgradientResult::ok() const {
  return nonnegative && std::all_of(checks.begin(), checks.end(), [](const SupergradientCheck& c) { return c.ok; });
}

SubgradientResult srev_subgradient(const TypeDistribution& dist, const AllocationVector& x0,
                                   const std::vector<AllocationVector>& probes, const GuardLimits& guard) {
  return srev_subgradient(exante_atoms(dist, guard), x0, probes);
}

SubgradientResult srev_subgradient(const std::vector<VertexPricing>& atoms, const AllocationVector& x0,
                                   const std::vector<AllocationVector>& probes) {
  const ExAnteBuyerResult at_x0 = exante_srev(atoms, x0);
  SubgradientResult out;
  out.costs = at_x0.allocation_duals;
  out.srev_at_x0 = at_x0.revenue;
  out.nonnegative = std::all_of(out.costs.begin(), out.costs.end(), [](const Rational& c) { return sgn(c) >= 0; });
  for (const auto& y : probes) {
    SupergradientCheck check;
    check.y = y;
    check.srev_y = exante_srev(atoms, y).revenue;
    check.bound = out.srev_at_x0;
    for (std::size_t j = 0; j < y.size(); ++j) {
      check.bound += out.costs[j] * (y[j] - x0[j]);
    }
    check.ok = check.srev_y <= check.bound;
    out.checks.push_back(std::move(check));
  }
  return out;
}

Decomposition convex_decompose(const ItemPricing& p, const TypeDistribution& dist,
                               const AvailabilityDistribution& availability, const AllocationVector& y,
                               const GuardLimits& guard) {
  const std::size_t m = p.item_count();
  if (dist.item_count != m || y.size() != m) {
    throw DimensionError("convex_decompose: dimension mismatch");
  }
  const ItemSet support = p.finite_support();
  const auto k = static_cast<std::size_t>(std::popcount(support));
  if (k >= 63 || (std::uint64_t{1} << k) > guard.subsets) {
    throw GuardError("convex_decompose: 2^" + std::to_string(k) + " subsets exceed the guard of " +
                     std::to_string(guard.subsets));
  }
  std::vector<ItemSet> subsets;
  for (ItemSet t = 0;; t = (t - support) & support) {
    subsets.push_back(t);
    if (t == support) {
      break;
    }
  }
  std::vector<AllocationVector> x;
  RationalVector revenue;
  for (ItemSet t : subsets) {
    const auto restricted = RandomItemPricing::deterministic(p.restricted_to(t));
    x.push_back(allocation_vector(dist, restricted, availability));
    revenue.push_back(expected_revenue(dist, restricted, availability));
  }
  const AllocationVector& x_star = x.back();
  for (std::size_t j = 0; j < m; ++j) {
    if (sgn(y[j]) < 0 || y[j] > x_star[j]) {
      throw std::invalid_argument("convex_decompose: y is not dominated by E_S[x_{p,S}] at item " +
                                  std::to_string(j));
    }
  }
  LinearProgram lp;
  for (ItemSet t : subsets) {
    const long size = std::popcount(t);
    lp.objective.push_back(Rational(size * size));
    lp.lower.emplace_back(Rational(0));
    lp.upper.emplace_back(std::nullopt);
  }
  for (std::size_t j = 0; j < m; ++j) {
    RationalVector row;
    for (const auto& xt : x) {
      row.push_back(xt[j]);
    }
    lp.add_constraint(std::move(row), Relation::Equal, y[j]);
  }
  lp.add_constraint(RationalVector(subsets.size(), Rational(1)), Relation::Equal, 1);
  const LpResult result = lp_solve(lp);
  if (result.status != LpStatus::Optimal) {
    throw CheckFailure("convex_decompose: y outside the hull of restricted allocations (" +
                       to_string(result.status) + ")");
  }
  Decomposition out;
  out.allocation.assign(m, Rational(0));
  for (std::size_t s = 0; s < subsets.size(); ++s) {
    const Rational& w = result.primal[s];
    if (sgn(w) == 0) {
      continue;
    }
    out.subsets.push_back(subsets[s]);
    out.weights.push_back(w);
    out.pricing.atoms.push_back(PricingAtom{p.restricted_to(subsets[s]), w});
    for (std::size_t j = 0; j < m; ++j) {
      out.allocation[j] += w * x[s][j];
    }
    out.revenue += w * revenue[s];
  }
  return out;
}

}  // namespace mechlab
