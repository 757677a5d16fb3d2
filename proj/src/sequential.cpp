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

#include "mechlab/sequential.hpp"

#include "mechlab/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

namespace mechlab {

bool SequentialPricing::deterministic() const {
  return std::all_of(pricings.begin(), pricings.end(), [](const RandomItemPricing& p) { return p.atoms.size() == 1; });
}

std::vector<std::size_t> default_order(std::size_t buyers) {
  std::vector<std::size_t> order(buyers);
  std::iota(order.begin(), order.end(), std::size_t{0});
  return order;
}

namespace {

void check_order(const std::vector<std::size_t>& order, std::size_t buyers) {
  std::vector<std::size_t> sorted = order;
  std::sort(sorted.begin(), sorted.end());
  if (sorted != default_order(buyers)) {
    throw std::invalid_argument("order is not a permutation of the " + std::to_string(buyers) + " buyers");
  }
}

void check_subset_guard(std::size_t m, const GuardLimits& guard) {
  if (m >= 63 || (std::uint64_t{1} << m) > guard.subsets) {
    throw GuardError("2^" + std::to_string(m) + " availability sets exceed the guard of " +
                     std::to_string(guard.subsets));
  }
}

// Law of the unsold set after `buyer` faces `pricing` under `before`.
AvailabilityDistribution step(const TypeDistribution& dist, const RandomItemPricing& pricing,
                              const AvailabilityDistribution& before) {
  AvailabilityDistribution after;
  for (const auto& [set, prob] : before.atoms) {
    for (const auto& atom : pricing.atoms) {
      const Rational outer = prob * atom.weight;
      for (const auto& type : dist.support) {
        if (sgn(type.probability) == 0) {
          continue;
        }
        const Choice choice = best_response_items(type.values, atom.pricing, set);
        const ItemSet next = choice.bought() ? set & ~(ItemSet{1} << *choice.index) : set;
        after.atoms[next] += outer * type.probability;
      }
    }
  }
  return after;
}

// Availability faced at every position 0..n (n is the final unsold set).
std::vector<AvailabilityDistribution> availability_sequence(const Instance& instance, const SequentialPricing& seq,
                                                            std::size_t upto) {
  std::vector<AvailabilityDistribution> out{AvailabilityDistribution::full(instance.item_count)};
  for (std::size_t k = 0; k < upto; ++k) {
    const std::size_t b = seq.order[k];
    out.push_back(step(instance.buyers[b], seq.pricings[b], out.back()));
  }
  return out;
}

Rational total_revenue(const Instance& instance, const SequentialPricing& seq) {
  Rational total = 0;
  AvailabilityDistribution current = AvailabilityDistribution::full(instance.item_count);
  for (std::size_t k = 0; k < seq.order.size(); ++k) {
    const std::size_t b = seq.order[k];
    total += expected_revenue(instance.buyers[b], seq.pricings[b], current);
    if (k + 1 < seq.order.size()) {
      current = step(instance.buyers[b], seq.pricings[b], current);
    }
  }
  return total;
}

}  // namespace

void check_sequential(const Instance& instance, const SequentialPricing& seq) {
  const std::size_t n = instance.buyers.size();
  check_order(seq.order, n);
  if (seq.pricings.size() != n) {
    throw std::invalid_argument("expected " + std::to_string(n) + " pricings, got " +
                                std::to_string(seq.pricings.size()));
  }
  for (std::size_t b = 0; b < n; ++b) {
    require_valid(validate_random_pricing(seq.pricings[b], instance.item_count), "pricing of buyer " + std::to_string(b));
  }
}

AvailabilityDistribution availability_dp(const Instance& instance, const SequentialPricing& seq, std::size_t position,
                                         const GuardLimits& guard) {
  check_sequential(instance, seq);
  check_subset_guard(instance.item_count, guard);
  if (position > seq.order.size()) {
    throw std::invalid_argument("availability_dp: position past the last buyer");
  }
  return availability_sequence(instance, seq, position).back();
}

SequentialBuild build_sequential(const Instance& instance, const ExAnteSolution& ea,
                                 const std::vector<std::size_t>& order, const GuardLimits& guard) {
  const std::size_t n = instance.buyers.size();
  const std::size_t m = instance.item_count;
  check_order(order, n);
  check_subset_guard(m, guard);
  if (ea.pricings.size() != n || ea.allocations.size() != n || ea.revenues.size() != n) {
    throw DimensionError("build_sequential: ex-ante solution does not match the buyer count");
  }
  const Rational half(1, 2);
  SequentialBuild out;
  out.pricing.order = order;
  out.pricing.pricings.assign(n, RandomItemPricing{});
  AvailabilityDistribution current = AvailabilityDistribution::full(m);
  for (std::size_t k = 0; k < n; ++k) {
    const std::size_t b = order[k];
    const TypeDistribution& dist = instance.buyers[b];
    BuyerCertificate cert;
    cert.buyer = b;
    cert.position = k;
    cert.availability = current.marginals(m);
    cert.availability_ok =
        std::all_of(cert.availability.begin(), cert.availability.end(), [&](const Rational& a) { return a >= half; });
    cert.dominance_ok = true;
    RandomItemPricing q;
    for (const auto& atom : ea.pricings[b].atoms) {
      AllocationVector target = allocation_vector(dist, atom.pricing);
      for (auto& t : target) {
        t *= half;
      }
      const AllocationVector reachable = allocation_vector(dist, RandomItemPricing::deterministic(atom.pricing), current);
      for (std::size_t j = 0; j < m; ++j) {
        if (reachable[j] < target[j]) {
          cert.dominance_ok = false;
          throw CheckFailure("build_sequential: buyer " + std::to_string(b) + " item " + std::to_string(j) +
                             " reachable allocation " + to_string(reachable[j]) + " < half of " +
                             to_string(2 * target[j]) + " (availability " + to_string(cert.availability[j]) + ")");
        }
      }
      const Decomposition dec = convex_decompose(atom.pricing, dist, current, target, guard);
      for (const auto& piece : dec.pricing.atoms) {
        q.atoms.push_back(PricingAtom{piece.pricing, atom.weight * piece.weight});
      }
    }
    q = q.normalized();
    cert.target_allocation = ea.allocations[b];
    for (auto& t : cert.target_allocation) {
      t *= half;
    }
    cert.target_revenue = ea.revenues[b] * half;
    cert.achieved_allocation = allocation_vector(dist, q, current);
    cert.achieved_revenue = expected_revenue(dist, q, current);
    cert.allocation_ok = cert.achieved_allocation == cert.target_allocation;
    cert.revenue_ok = cert.achieved_revenue == cert.target_revenue;
    if (k + 1 < n) {
      current = step(dist, q, current);
    }
    out.pricing.pricings[b] = std::move(q);
    out.certificates.push_back(std::move(cert));
  }
  return out;
}

SequentialPricing derandomize(const Instance& instance, const SequentialPricing& seq, const GuardLimits& guard) {
  check_sequential(instance, seq);
  check_subset_guard(instance.item_count, guard);
  SequentialPricing current = seq;
  for (std::size_t b : seq.order) {
    const auto atoms = current.pricings[b].atoms;
    if (atoms.size() == 1) {
      continue;
    }
    std::optional<Rational> best;
    std::size_t chosen = 0;
    for (std::size_t a = 0; a < atoms.size(); ++a) {
      current.pricings[b] = RandomItemPricing::deterministic(atoms[a].pricing);
      Rational value = total_revenue(instance, current);
      if (!best || value > *best) {
        best = std::move(value);
        chosen = a;
      }
    }
    current.pricings[b] = RandomItemPricing::deterministic(atoms[chosen].pricing);
  }
  return current;
}

SequentialEvalReport evaluate_sequential(const Instance& instance, const SequentialPricing& seq,
                                         const GuardLimits& guard) {
  check_sequential(instance, seq);
  check_subset_guard(instance.item_count, guard);
  const std::size_t n = seq.order.size();
  const std::size_t m = instance.item_count;
  const auto sets = availability_sequence(instance, seq, n);
  SequentialEvalReport report;
  report.buyer_revenue.assign(n, Rational(0));
  for (std::size_t k = 0; k < n; ++k) {
    const std::size_t b = seq.order[k];
    report.buyer_revenue[b] = expected_revenue(instance.buyers[b], seq.pricings[b], sets[k]);
    report.total += report.buyer_revenue[b];
    report.availability.push_back(sets[k].marginals(m));
  }
  const RationalVector left = sets.back().marginals(m);
  for (std::size_t j = 0; j < m; ++j) {
    report.sale_probability.push_back(1 - left[j]);
  }
  return report;
}

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::size_t draw(std::mt19937_64& rng, const std::vector<double>& cdf) {
  const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
  const auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
  return std::min(static_cast<std::size_t>(it - cdf.begin()), cdf.size() - 1);
}

template <class Range, class Weight>
std::vector<double> cumulative(const Range& range, Weight weight) {
  std::vector<double> cdf;
  double acc = 0.0;
  for (const auto& x : range) {
    acc += to_double(weight(x));
    cdf.push_back(acc);
  }
  return cdf;
}

}  // namespace

MonteCarloEstimate simulate_sequential(const Instance& instance, const SequentialPricing& seq, std::size_t trials,
                                       std::uint64_t seed) {
  check_sequential(instance, seq);
  const std::size_t n = seq.order.size();
  std::vector<std::vector<double>> type_cdf(n);
  std::vector<std::vector<double>> atom_cdf(n);
  for (std::size_t b = 0; b < n; ++b) {
    type_cdf[b] = cumulative(instance.buyers[b].support, [](const WeightedType& t) { return t.probability; });
    atom_cdf[b] = cumulative(seq.pricings[b].atoms, [](const PricingAtom& a) { return a.weight; });
  }
  MonteCarloEstimate est;
  est.trials = trials;
  est.seed = seed;
  double mean = 0.0;
  double m2 = 0.0;
  for (std::size_t t = 0; t < trials; ++t) {
    std::mt19937_64 rng(splitmix64(seed ^ splitmix64(t)));
    ItemSet available = full_item_set(instance.item_count);
    double revenue = 0.0;
    for (std::size_t b : seq.order) {
      const auto& atom = seq.pricings[b].atoms[draw(rng, atom_cdf[b])];
      const auto& type = instance.buyers[b].support[draw(rng, type_cdf[b])];
      const Choice choice = best_response_items(type.values, atom.pricing, available);
      if (choice.bought()) {
        revenue += to_double(choice.payment);
        available &= ~(ItemSet{1} << *choice.index);
      }
    }
    const double delta = revenue - mean;
    mean += delta / static_cast<double>(t + 1);
    m2 += delta * (revenue - mean);
  }
  est.mean = mean;
  if (trials > 1) {
    const double sd = std::sqrt(m2 / static_cast<double>(trials - 1));
    est.half_width = 2.5758293035489004 * sd / std::sqrt(static_cast<double>(trials));
  }
  return est;
}

HalfReport verify_half(const Instance& instance, const std::vector<std::size_t>& order, const GuardLimits& guard) {
  HalfReport report;
  report.exante = exante_global(instance, guard);
  report.build = build_sequential(instance, report.exante, order, guard);
  for (const auto& cert : report.build.certificates) {
    const std::string tag = "buyer " + std::to_string(cert.buyer) + ": ";
    if (!cert.availability_ok) report.failures.push_back(tag + "Pr[j in S] < 1/2");
    if (!cert.dominance_ok) report.failures.push_back(tag + "E_S[x_{p,S}] < x_p/2");
    if (!cert.allocation_ok) report.failures.push_back(tag + "allocation != x_i/2");
    if (!cert.revenue_ok) report.failures.push_back(tag + "revenue != half the ex-ante revenue");
  }
  report.randomized_revenue = evaluate_sequential(instance, report.build.pricing, guard).total;
  report.deterministic = derandomize(instance, report.build.pricing, guard);
  report.derandomized_revenue = evaluate_sequential(instance, report.deterministic, guard).total;
  if (report.randomized_revenue * 2 != report.exante.total) {
    report.failures.push_back("randomized revenue != EA-SRev/2");
  }
  if (report.derandomized_revenue < report.randomized_revenue) {
    report.failures.push_back("derandomized revenue < randomized expectation");
  }
  report.ratio = sgn(report.exante.total) == 0 ? Rational(1) : Rational(report.derandomized_revenue / report.exante.total);
  if (report.ratio < Rational(1, 2)) {
    report.failures.push_back("ratio < 1/2");
  }
  return report;
}

}  // namespace mechlab
