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
#include "mechlab/model.hpp"

#include "oracle.hpp"

#include <gtest/gtest.h>

#include <random>

namespace mechlab {
namespace {

Rational q(long n, long d = 1) { return make_rational(n, d); }

ItemPricing prices(std::initializer_list<Price> ps) { return ItemPricing{std::vector<Price>(ps)}; }

TypeDistribution two_types() {
  return TypeDistribution{2, {{{q(3), q(1)}, q(1, 2)}, {{q(1), q(3)}, q(1, 2)}}};
}

TEST(LotteryValue, WeightedSum) {
  EXPECT_EQ(lottery_value({q(3), q(1)}, {q(1, 2), q(1, 2)}), q(2));
  EXPECT_EQ(lottery_value({q(5), q(0)}, {q(0), q(0)}), q(0));
  EXPECT_EQ(lottery_value({q(4), q(4), q(0), q(0)}, {q(1, 2), q(1, 2), q(0), q(0)}), q(4));
}

TEST(BestResponseMenu, GapTypeBuysItsOwnOption) {
  const GapInstance gap = gap_instance(4);
  const Choice c = best_response_menu({q(4), q(4), q(0), q(0)}, gap.menu);
  ASSERT_TRUE(c.bought());
  EXPECT_EQ(*c.index, 0U);  // option for item 2
  EXPECT_EQ(c.utility, 0);
  EXPECT_EQ(c.payment, 4);
}

TEST(BestResponseMenu, ZeroTypeAndTies) {
  const LotteryMenu menu{2, {{{q(1), q(0)}, q(1)}, {{q(0), q(1)}, q(2)}}};
  EXPECT_FALSE(best_response_menu({q(0), q(0)}, menu).bought());
  const LotteryMenu single{1, {{{q(1)}, q(1)}}};
  const Choice c = best_response_menu({q(1)}, single);
  ASSERT_TRUE(c.bought());
  EXPECT_EQ(c.payment, 1);
  EXPECT_EQ(c.utility, 0);
}

TEST(BestResponseItems, Examples) {
  const ItemPricing p = prices({Price(2), Price(2)});
  const Choice a = best_response_items({q(3), q(1)}, p, 0b11);
  ASSERT_TRUE(a.bought());
  EXPECT_EQ(*a.index, 0U);
  EXPECT_EQ(a.utility, 1);
  EXPECT_EQ(a.payment, 2);
  EXPECT_FALSE(best_response_items({q(3), q(1)}, p, 0b10).bought());
  const Choice tie = best_response_items({q(5), q(5)}, prices({Price(3), Price(3)}), 0b11);
  EXPECT_EQ(*tie.index, 0U);
  EXPECT_EQ(tie.utility, 2);
}

TEST(BestResponseItems, SellerFavoringTieUsesProfit) {
  // Equal utility 1 on both items; item 1 has the larger margin at these costs.
  const ItemPricing p = prices({Price(2), Price(4)});
  const CostVector c{q(1), q(1)};
  const Choice pick = best_response_items({q(3), q(5)}, p, c);
  EXPECT_EQ(*pick.index, 1U);
  EXPECT_EQ(pick.cost, 1);
  // Without costs the higher payment wins the same tie.
  EXPECT_EQ(*best_response_items({q(3), q(5)}, p).index, 1U);
}

TEST(ExpectedRevenue, Examples) {
  const TypeDistribution d = two_types();
  const ItemPricing p = prices({Price(2), Price(2)});
  AvailabilityDistribution only2;
  only2.atoms[0b10] = 1;
  EXPECT_EQ(expected_revenue(d, RandomItemPricing::deterministic(p), only2), q(1));
  EXPECT_EQ(expected_revenue(d, p), q(2));
  const RandomItemPricing mix{{{p, q(1, 2)}, {p.restricted_to(0b10), q(1, 2)}}};
  EXPECT_EQ(expected_revenue(d, mix, AvailabilityDistribution::full(2)), q(3, 2));
  const TypeDistribution zero{1, {{{q(0)}, q(1)}}};
  EXPECT_EQ(expected_revenue(zero, prices({Price(0)})), 0);
}

TEST(ExpectedProfit, GapMenuMatchesOracle) {
  for (std::size_t m : {4U, 8U}) {
    const GapInstance gap = gap_instance(m);
    const TypeDistribution& d = gap.instance.buyers[0];
    const CostVector& c = *gap.instance.costs;
    EXPECT_EQ(expected_profit(d, gap.menu, c), oracle::menu_profit(d, gap.menu, &c)) << "m=" << m;
  }
  // High types prefer the cheaper option 2 lottery, so the m=4 profit is 9/8.
  const GapInstance gap = gap_instance(4);
  EXPECT_EQ(expected_profit(gap.instance.buyers[0], gap.menu, *gap.instance.costs), q(9, 8));
}

TEST(ExpectedProfit, ZeroCostsEqualRevenueAndPriceAtCost) {
  const TypeDistribution d = two_types();
  const LotteryMenu menu{2, {{{q(1), q(0)}, q(2)}, {{q(1, 2), q(1, 2)}, q(1)}}};
  EXPECT_EQ(expected_profit(d, menu, CostVector{q(0), q(0)}), expected_revenue(d, menu));
  const TypeDistribution one{1, {{{q(1)}, q(1)}}};
  EXPECT_EQ(expected_profit(one, RandomItemPricing::deterministic(prices({Price(1)})), CostVector{q(1)},
                            AvailabilityDistribution::full(1)),
            0);
}

TEST(AllocationVector, Examples) {
  const TypeDistribution d = two_types();
  EXPECT_EQ(allocation_vector(d, prices({Price(2), Price(2)})), (AllocationVector{q(1, 2), q(1, 2)}));
  EXPECT_EQ(allocation_vector(d, prices({Price(2), Price::infinity()})), (AllocationVector{q(1, 2), q(0)}));
  EXPECT_EQ(allocation_vector(d, ItemPricing::withheld(2)), (AllocationVector{q(0), q(0)}));
}

TEST(Validate, ReportsNamedInvariants) {
  EXPECT_TRUE(validate_instance(gap_instance(4).instance).empty());
  Instance bad{2, {TypeDistribution{2, {{{q(1), q(2)}, q(9, 10)}}}}, std::nullopt};
  auto v = validate_instance(bad);
  ASSERT_EQ(v.size(), 1U);
  EXPECT_EQ(v[0].invariant, "distribution mass != 1");
  bad.buyers[0].support[0] = {{q(-1), q(2)}, q(1)};
  v = validate_instance(bad);
  ASSERT_EQ(v.size(), 1U);
  EXPECT_EQ(v[0].invariant, "value < 0");
  EXPECT_THROW(require_valid(v, "instance"), std::invalid_argument);
  EXPECT_NO_THROW(require_valid({}, "instance"));

  const LotteryMenu heavy{2, {{{q(3, 4), q(1, 2)}, q(1)}}};
  ASSERT_EQ(validate_menu(heavy).size(), 1U);
  EXPECT_EQ(validate_menu(heavy)[0].invariant, "lottery mass > 1");
  const RandomItemPricing short_mass{{{ItemPricing::withheld(1), q(1, 2)}}};
  EXPECT_FALSE(validate_random_pricing(short_mass, 1).empty());
}

TEST(Validate, DimensionMismatchThrows) {
  const TypeDistribution d = two_types();
  EXPECT_THROW(expected_revenue(d, prices({Price(1)})), DimensionError);
}

TEST(AvailabilityDistribution, Marginals) {
  AvailabilityDistribution a;
  a.atoms[0b11] = q(3, 4);
  a.atoms[0b10] = q(1, 4);
  EXPECT_EQ(a.marginals(2), (RationalVector{q(3, 4), q(1)}));
  EXPECT_EQ(to_string(ItemSet{0b101}, 3), "{0 2}");
}

// Property: the library best response agrees with the scan oracle on random
// types, pricings, availabilities and costs, including the chosen index.
TEST(BestResponseItems, MatchesOracleOnRandomInputs) {
  std::mt19937_64 rng(11);
  std::uniform_int_distribution<long> val(0, 5);
  for (int trial = 0; trial < 2000; ++trial) {
    const std::size_t m = 1 + trial % 4;
    Valuation v;
    ItemPricing p;
    CostVector c;
    for (std::size_t j = 0; j < m; ++j) {
      v.push_back(Rational(val(rng)));
      const long k = val(rng);
      p.prices.push_back(k == 5 ? Price::infinity() : Price(k));
      c.push_back(Rational(val(rng) / 2));
    }
    const ItemSet avail = static_cast<ItemSet>(rng() & oracle::everything(m));
    const Choice lib = best_response_items(v, p, avail, c);
    const oracle::Pick ref = oracle::pick_item(v, p, avail, &c);
    ASSERT_EQ(lib.index, ref.item);
    ASSERT_EQ(lib.utility, ref.utility);
    ASSERT_EQ(lib.payment, ref.payment);
  }
}

TEST(BestResponseMenu, MatchesOracleOnRandomMenus) {
  std::mt19937_64 rng(12);
  for (int trial = 0; trial < 500; ++trial) {
    const std::size_t m = 1 + trial % 3;
    const LotteryMenu menu = random_menu(m, 1 + trial % 4, 6, rng);
    const TypeDistribution d = oracle::small_distribution(rng, m, 3, 6);
    const CostVector c = random_costs(m, 2, rng);
    for (const auto& t : d.support) {
      const Choice lib = best_response_menu(t.values, menu, c);
      const oracle::Pick ref = oracle::pick_menu(t.values, menu, &c);
      ASSERT_EQ(lib.index, ref.item);
      ASSERT_EQ(lib.utility, ref.utility);
    }
    ASSERT_EQ(expected_profit(d, menu, c), oracle::menu_profit(d, menu, &c));
  }
}

TEST(RandomItemPricing, NormalizedMergesEqualAtoms) {
  const ItemPricing a = prices({Price(1)});
  const ItemPricing b = prices({Price(2)});
  const RandomItemPricing r{{{a, q(1, 4)}, {b, q(0)}, {a, q(1, 4)}, {ItemPricing::withheld(1), q(1, 2)}}};
  const RandomItemPricing n = r.normalized();
  ASSERT_EQ(n.atoms.size(), 2U);
  EXPECT_EQ(n.atoms[0].pricing, a);
  EXPECT_EQ(n.atoms[0].weight, q(1, 2));
}

}  // namespace
}  // namespace mechlab
