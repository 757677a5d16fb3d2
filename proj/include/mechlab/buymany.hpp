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

#include "mechlab/model.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace mechlab {

/// Cheapest expected cost of acquiring each item by repeatedly buying one
/// menu option: min over options with lottery[i] > 0 of price / lottery[i].
/// Infinite when no option allocates the item.
using HatPrices = std::vector<Price>;

HatPrices hat_prices(const LotteryMenu& menu);

struct BuyManyWitness {
  std::size_t option = 0;
  Rational price;
  /// hat_prices . lottery, strictly below `price`.
  Rational replication_cost;
};

/// Empty when every option satisfies price <= hat_prices . lottery.
std::optional<BuyManyWitness> check_buy_many(const LotteryMenu& menu);

/// Repeatedly lowers each option's price to min(price, hat_prices . lottery)
/// until nothing changes. Throws CheckFailure if no fixpoint is reached within
/// `max_rounds` sweeps.
LotteryMenu buy_many_closure(const LotteryMenu& menu, std::size_t max_rounds = 10000);

/// Drops options priced below c2 . lottery, then re-closes. The result may be
/// empty (only the implicit zero option left).
LotteryMenu strip_below_cost(const LotteryMenu& menu, const CostVector& c2);

/// Adds, for every reachable item j not already sold outright at a price
/// <= hat_prices[j], the option (e_j, hat_prices[j]). These are the unit
/// lotteries a buyer can assemble by repeated purchase; with them the
/// options-only best response equals the buy-many best response.
LotteryMenu with_repeated_purchase(const LotteryMenu& menu);

/// q_i = min over options with lottery[i] > 0 of (price - c . lottery) / lottery[i] + c_i.
ItemPricing derived_item_pricing_q(const LotteryMenu& menu, const CostVector& costs);

/// Bounds of the blending parameter: [-1, 1 - 1/(2m)].
Rational alpha_lower();
Rational alpha_upper(std::size_t item_count);

/// alpha * c + (1 - alpha) * q componentwise; infinite entries stay infinite.
/// Throws std::invalid_argument outside [-1, 1 - 1/(2m)].
ItemPricing q_alpha(const ItemPricing& q, const CostVector& costs, const Rational& alpha);

/// Inverse CDF of the density 1 / ((1 - alpha) ln 4m) on [-1, 1 - 1/(2m)].
double sample_alpha(std::size_t item_count, double u);

struct CurvePiece {
  Rational lo;
  Rational hi;
  /// Purchased item on (lo, hi); empty for the zero option.
  std::optional<std::size_t> item;
  Rational intercept;
  /// (q - c)_item, or 0.
  Rational slope;
};

/// u(v, alpha) = max(0, max_j v_j - q_alpha_j) on [-1, 1 - 1/(2m)]: the upper
/// envelope of the lines (v_j - q_j) + alpha (q_j - c_j).
class UtilityCurve {
 public:
  UtilityCurve(std::vector<CurvePiece> pieces) : pieces_(std::move(pieces)) {}  // NOLINT

  const std::vector<CurvePiece>& pieces() const { return pieces_; }
  Rational value_at(const Rational& alpha) const;
  Rational start_value() const;
  Rational end_value() const;

  /// Integral of (1 - alpha) u'(alpha) against the density 1/((1 - alpha) ln 4m),
  /// as the coefficient of 1 / ln 4m: sum of slope * length over the pieces.
  Rational integrated_profit_coefficient() const;

 private:
  std::vector<CurvePiece> pieces_;
};

UtilityCurve utility_curve(const Valuation& values, const ItemPricing& q, const CostVector& costs);

struct TypeBoundRecord {
  std::size_t type_index = 0;
  Rational probability;
  Rational u_low;         // u(v, -1)
  Rational u_high;        // u(v, 1 - 1/(2m))
  Rational u_menu;        // buy-many utility under the processed menu
  Rational profit_menu;   // menu profit at costs 2c
  Rational qalpha_coefficient;     // (u_high - u_low); E_alpha profit = this / ln 4m
  Rational integrated_coefficient; // same quantity by piecewise integration
  bool upper_ok = false;     // u_low <= u_menu
  bool lower_ok = false;     // u_high >= u_menu + profit_menu / 2
  bool envelope_ok = false;  // closed form == piecewise integral
  bool monotone_ok = false;  // every slope >= 0
};

/// Per-type and aggregate quantities of the Lagrangian q_alpha argument that
/// an item pricing family recovers at least 1/(2 ln 4m) of the profit of a
/// buy-many menu facing doubled production costs.
struct ProfitBoundReport {
  std::size_t item_count = 0;
  CostVector costs;
  /// Input menu stripped at 2c and extended with repeated-purchase options.
  LotteryMenu processed_menu;
  ItemPricing q;
  std::vector<TypeBoundRecord> types;

  Rational sprofit_oracle;
  Rational supplied_menu_profit;  // options-only profit of the input menu at 2c
  Rational menu_profit;           // profit of processed_menu at 2c
  Rational qalpha_coefficient;    // E_alpha Profit_{q_alpha,c}(D) = this / ln 4m
  double log_4m = 0.0;
  double ratio = 0.0;  // menu_profit / sprofit (inf when sprofit == 0 < menu_profit)
  double bound = 0.0;  // 2 ln 4m

  bool bound_ok = false;           // menu_profit <= 2 ln 4m * sprofit, certified
  bool oracle_dominates = false;   // qalpha average <= sprofit, certified
  bool aggregates_ok = false;      // aggregates equal weighted per-type sums
  std::vector<std::string> failures;

  bool ok() const { return failures.empty(); }
};

/// Throws std::invalid_argument if the menu fails check_buy_many.
ProfitBoundReport profit_bound_report(const TypeDistribution& dist, const LotteryMenu& menu, const CostVector& costs,
                                      const Rational& sprofit_oracle);

/// Rational lower and upper bounds on ln(4m), a few ulps apart.
std::pair<Rational, Rational> log_4m_bracket(std::size_t item_count);

/// Monte-Carlo estimate of E_alpha Profit_{q_alpha,c}(D) using sample_alpha.
double estimate_qalpha_profit(const TypeDistribution& dist, const ItemPricing& q, const CostVector& costs,
                              std::size_t samples, std::uint64_t seed);

}  // namespace mechlab
