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

#include "mechlab/errors.hpp"
#include "mechlab/instances.hpp"
#include "mechlab/sequential.hpp"

#include "oracle.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>

namespace mechlab {
namespace {

Rational q(long n, long d = 1) { return make_rational(n, d); }

Instance two_identical() {
  const TypeDistribution single{1, {{{q(2)}, q(1)}}};
  return Instance{1, {single, single}, std::nullopt};
}

SequentialPricing fixed(const std::vector<ItemPricing>& ps) {
  SequentialPricing seq;
  seq.order = default_order(ps.size());
  for (const auto& p : ps) seq.pricings.push_back(RandomItemPricing::deterministic(p));
  return seq;
}

// Nonzero atoms only, so the two sides compare as maps.
AvailabilityDistribution nonzero(const AvailabilityDistribution& a) {
  AvailabilityDistribution out;
  for (const auto& [s, p] : a.atoms)
    if (p != 0) out.atoms[s] = p;
  return out;
}

TEST(AvailabilityDp, Examples) {
  const TypeDistribution half{1, {{{q(3)}, q(1, 2)}, {{q(0)}, q(1, 2)}}};
  const Instance inst{1, {half, half}, std::nullopt};
  const SequentialPricing seq = fixed({ItemPricing{{Price(1)}}, ItemPricing{{Price(1)}}});
  const AvailabilityDistribution first = availability_dp(inst, seq, 0);
  EXPECT_EQ(first.atoms.size(), 1U);
  EXPECT_EQ(first.atoms.at(1), 1);
  const AvailabilityDistribution second = nonzero(availability_dp(inst, seq, 1));
  EXPECT_EQ(second.atoms.at(1), q(1, 2));
  EXPECT_EQ(second.atoms.at(0), q(1, 2));

  const TypeDistribution wants0{2, {{{q(5), q(1)}, q(1)}}};
  const Instance two_items{2, {wants0, wants0}, std::nullopt};
  const SequentialPricing s2 = fixed({ItemPricing{{Price(1), Price(1)}}, ItemPricing{{Price(1), Price(1)}}});
  const AvailabilityDistribution after = nonzero(availability_dp(two_items, s2, 1));
  ASSERT_EQ(after.atoms.size(), 1U);
  EXPECT_EQ(after.atoms.at(0b10), 1);
}

TEST(AvailabilityDp, GuardLimit) {
  const Instance inst = gap_instance(16).instance;
  SequentialPricing seq;
  seq.order = {0};
  seq.pricings = {RandomItemPricing::deterministic(ItemPricing::withheld(16))};
  GuardLimits g;
  g.subsets = 1000;
  EXPECT_THROW(availability_dp(inst, seq, 1, g), GuardError);
}

TEST(CheckSequential, RejectsBadOrders) {
  const Instance inst = two_identical();
  SequentialPricing seq = fixed({ItemPricing{{Price(1)}}, ItemPricing{{Price(1)}}});
  EXPECT_NO_THROW(check_sequential(inst, seq));
  seq.order = {0, 0};
  EXPECT_THROW(check_sequential(inst, seq), std::invalid_argument);
  seq.order = {1, 0};
  seq.pricings[0].atoms[0].weight = q(1, 2);
  EXPECT_THROW(check_sequential(inst, seq), std::invalid_argument);
}

TEST(BuildSequential, TwoIdenticalBuyers) {
  const Instance inst = two_identical();
  const ExAnteSolution ea = exante_global(inst);
  ASSERT_EQ(ea.total, 2);
  const SequentialBuild b = build_sequential(inst, ea, default_order(2));
  ASSERT_EQ(b.certificates.size(), 2U);
  for (const auto& c : b.certificates) {
    EXPECT_TRUE(c.ok());
    EXPECT_EQ(c.achieved_allocation[0], ea.allocations[c.buyer][0] / 2);
  }
  EXPECT_GE(b.certificates[1].availability[0], q(1, 2));
  const SequentialEvalReport r = evaluate_sequential(inst, b.pricing);
  EXPECT_EQ(r.total, 1);
  EXPECT_EQ(oracle::sequential_revenue(inst, b.pricing.order, b.pricing.pricings), 1);
}

TEST(BuildSequential, SingleBuyerGetsHalf) {
  const Instance inst{2, {TypeDistribution{2, {{{q(3), q(1)}, q(1, 2)}, {{q(1), q(3)}, q(1, 2)}}}}, std::nullopt};
  const ExAnteSolution ea = exante_global(inst);
  const SequentialBuild b = build_sequential(inst, ea, {0});
  EXPECT_TRUE(b.certificates[0].ok());
  EXPECT_EQ(evaluate_sequential(inst, b.pricing).total, ea.total / 2);
}

TEST(Derandomize, Examples) {
  const Instance inst = two_identical();
  const SequentialBuild b = build_sequential(inst, exante_global(inst), default_order(2));
  const SequentialPricing det = derandomize(inst, b.pricing);
  EXPECT_TRUE(det.deterministic());
  EXPECT_GE(evaluate_sequential(inst, det).total, 1);

  const TypeDistribution single{1, {{{q(2)}, q(1)}}};
  const Instance one{1, {single}, std::nullopt};
  SequentialPricing mixed;
  mixed.order = {0};
  mixed.pricings = {RandomItemPricing{{{ItemPricing::withheld(1), q(1, 2)}, {ItemPricing{{Price(2)}}, q(1, 2)}}}};
  const SequentialPricing pick = derandomize(one, mixed);
  EXPECT_EQ(pick.pricings[0].atoms[0].pricing, ItemPricing{{Price(2)}});

  SequentialPricing same;
  same.order = {0};
  same.pricings = {RandomItemPricing{{{ItemPricing{{Price(1)}}, q(1, 2)}, {ItemPricing{{Price(1)}}, q(1, 2)}}}};
  EXPECT_EQ(derandomize(one, same).pricings[0].atoms[0].pricing, ItemPricing{{Price(1)}});
}

TEST(EvaluateSequential, SingleBuyerMatchesExpectedRevenue) {
  const TypeDistribution d{2, {{{q(3), q(1)}, q(1, 2)}, {{q(1), q(3)}, q(1, 2)}}};
  const ItemPricing p{{Price(2), Price(2)}};
  const Instance inst{2, {d}, std::nullopt};
  EXPECT_EQ(evaluate_sequential(inst, fixed({p})).total, expected_revenue(d, p));
}

TEST(SimulateSequential, TwoBuyerExampleWithinHalfWidth) {
  const Instance inst = two_identical();
  const SequentialBuild b = build_sequential(inst, exante_global(inst), default_order(2));
  const MonteCarloEstimate mc = simulate_sequential(inst, b.pricing, 100000, 42);
  EXPECT_EQ(mc.trials, 100000U);
  EXPECT_LE(std::abs(mc.mean - 1.0), mc.half_width);
  const MonteCarloEstimate again = simulate_sequential(inst, b.pricing, 100000, 42);
  EXPECT_EQ(mc.mean, again.mean);
}

TEST(VerifyHalf, Examples) {
  const HalfReport two = verify_half(two_identical(), default_order(2));
  EXPECT_TRUE(two.ok());
  EXPECT_EQ(two.randomized_revenue, 1);
  EXPECT_GE(two.derandomized_revenue, 1);
  EXPECT_GE(two.ratio, q(1, 2));

  const TypeDistribution a{2, {{{q(4), q(0)}, q(1)}}};
  const TypeDistribution b{2, {{{q(0), q(5)}, q(1)}}};
  const HalfReport disjoint = verify_half(Instance{2, {a, b}, std::nullopt}, {1, 0});
  EXPECT_TRUE(disjoint.ok());
  EXPECT_GE(disjoint.ratio, q(1, 2));
}

// Property: on random instances and orders the availability DP, the exact
// evaluator and the joint-outcome oracle agree, the certificates hold and the
// derandomized mechanism is at least the randomized one.
TEST(Sequential, RandomInstancesMatchJointEnumeration) {
  std::mt19937_64 rng(41);
  for (int trial = 0; trial < 40; ++trial) {
    RandomInstanceConfig cfg;
    cfg.buyers = 1 + trial % 3;
    cfg.items = 1 + trial % 3;
    cfg.support = 1 + trial % 3;
    cfg.value_scale = 5;
    cfg.style = static_cast<CorrelationStyle>(trial % 3);
    cfg.seed = 1000 + static_cast<std::uint64_t>(trial);
    const Instance inst = random_instance(cfg);
    std::vector<std::size_t> order = default_order(cfg.buyers);
    std::shuffle(order.begin(), order.end(), rng);
    const HalfReport r = verify_half(inst, order);
    ASSERT_TRUE(r.ok()) << r.failures.front();
    const SequentialPricing& seq = r.build.pricing;
    ASSERT_EQ(oracle::sequential_revenue(inst, seq.order, seq.pricings), r.randomized_revenue);
    ASSERT_EQ(oracle::sequential_revenue(inst, r.deterministic.order, r.deterministic.pricings),
              r.derandomized_revenue);
    ASSERT_GE(r.derandomized_revenue, r.randomized_revenue);
    ASSERT_EQ(r.randomized_revenue, r.exante.total / 2);
    for (std::size_t pos = 0; pos <= order.size(); ++pos) {
      ASSERT_EQ(nonzero(availability_dp(inst, seq, pos)).atoms,
                nonzero(oracle::sequential_availability(inst, seq.order, seq.pricings, pos)).atoms);
    }
    for (const auto& c : r.build.certificates) {
      const AvailabilityDistribution s =
          oracle::sequential_availability(inst, seq.order, seq.pricings, c.position);
      AllocationVector x(inst.item_count, Rational(0));
      for (const auto& atom : seq.pricings[c.buyer].atoms) {
        const AllocationVector xa = oracle::allocation_under(inst.buyers[c.buyer], atom.pricing, s);
        for (std::size_t j = 0; j < x.size(); ++j) x[j] += atom.weight * xa[j];
      }
      AllocationVector half = r.exante.allocations[c.buyer];
      for (auto& v : half) v /= 2;
      ASSERT_EQ(x, half);
    }
  }
}

}  // namespace
}  // namespace mechlab
