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

#include "mechlab/buymany.hpp"

#include "mechlab/errors.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace mechlab {

HatPrices hat_prices(const LotteryMenu& menu) {
  HatPrices hat(menu.item_count);
  for (const auto& option : menu.options) {
    for (std::size_t j = 0; j < menu.item_count; ++j) {
      if (sgn(option.lottery[j]) > 0) {
        hat[j] = min(hat[j], Price(option.price / option.lottery[j]));
      }
    }
  }
  return hat;
}

namespace {

// hat . lottery; every item the lottery touches has a finite hat price because
// the lottery itself is one of the options.
Rational replication_cost(const HatPrices& hat, const Lottery& lottery) {
  Rational total = 0;
  for (std::size_t j = 0; j < lottery.size(); ++j) {
    if (sgn(lottery[j]) > 0) {
      total += hat[j].value() * lottery[j];
    }
  }
  return total;
}

}  // namespace

std::optional<BuyManyWitness> check_buy_many(const LotteryMenu& menu) {
  const HatPrices hat = hat_prices(menu);
  for (std::size_t k = 0; k < menu.options.size(); ++k) {
    const auto& option = menu.options[k];
    Rational cheaper = replication_cost(hat, option.lottery);
    if (option.price > cheaper) {
      return BuyManyWitness{k, option.price, std::move(cheaper)};
    }
  }
  return std::nullopt;
}

LotteryMenu buy_many_closure(const LotteryMenu& menu, std::size_t max_rounds) {
  LotteryMenu out = menu;
  for (std::size_t round = 0; round < max_rounds; ++round) {
    const HatPrices hat = hat_prices(out);
    bool changed = false;
    for (auto& option : out.options) {
      Rational cheaper = replication_cost(hat, option.lottery);
      if (cheaper < option.price) {
        option.price = std::move(cheaper);
        changed = true;
      }
    }
    if (!changed) {
      return out;
    }
  }
  throw CheckFailure("buy_many_closure: no fixpoint after " + std::to_string(max_rounds) + " rounds");
}

LotteryMenu strip_below_cost(const LotteryMenu& menu, const CostVector& c2) {
  if (c2.size() != menu.item_count) {
    throw DimensionError("strip_below_cost: cost vector length mismatch");
  }
  LotteryMenu kept{menu.item_count, {}};
  for (const auto& option : menu.options) {
    if (option.price >= dot(c2, option.lottery)) {
      kept.options.push_back(option);
    }
  }
  return buy_many_closure(kept);
}

LotteryMenu with_repeated_purchase(const LotteryMenu& menu) {
  const HatPrices hat = hat_prices(menu);
  LotteryMenu out = menu;
  for (std::size_t j = 0; j < menu.item_count; ++j) {
    if (hat[j].is_infinite()) {
      continue;
    }
    const bool present = std::any_of(menu.options.begin(), menu.options.end(), [&](const MenuOption& o) {
      if (o.lottery[j] != 1 || o.price > hat[j].value()) {
        return false;
      }
      return std::all_of(o.lottery.begin(), o.lottery.end(), [](const Rational& x) { return sgn(x) == 0 || x == 1; });
    });
    if (!present) {
      Lottery unit(menu.item_count, Rational(0));
      unit[j] = 1;
      out.options.push_back(MenuOption{std::move(unit), hat[j].value()});
    }
  }
  return out;
}

ItemPricing derived_item_pricing_q(const LotteryMenu& menu, const CostVector& costs) {
  if (costs.size() != menu.item_count) {
    throw DimensionError("derived_item_pricing_q: cost vector length mismatch");
  }
  ItemPricing q = ItemPricing::withheld(menu.item_count);
  for (const auto& option : menu.options) {
    const Rational margin = option.price - dot(costs, option.lottery);
    for (std::size_t j = 0; j < menu.item_count; ++j) {
      if (sgn(option.lottery[j]) > 0) {
        q.prices[j] = min(q.prices[j], Price(margin / option.lottery[j] + costs[j]));
      }
    }
  }
  return q;
}

Rational alpha_lower() { return Rational(-1); }

Rational alpha_upper(std::size_t item_count) {
  if (item_count == 0) {
    throw std::invalid_argument("alpha range needs m >= 1");
  }
  return 1 - make_rational(1, static_cast<long>(2 * item_count));
}

ItemPricing q_alpha(const ItemPricing& q, const CostVector& costs, const Rational& alpha) {
  if (costs.size() != q.item_count()) {
    throw DimensionError("q_alpha: cost vector length mismatch");
  }
  if (alpha < alpha_lower() || alpha > alpha_upper(q.item_count())) {
    throw std::invalid_argument("q_alpha: alpha " + to_string(alpha) + " outside [-1, 1 - 1/(2m)]");
  }
  ItemPricing out = q;
  for (std::size_t j = 0; j < q.item_count(); ++j) {
    if (q.prices[j].is_finite()) {
      out.prices[j] = Price(alpha * costs[j] + (1 - alpha) * q.prices[j].value());
    }
  }
  return out;
}

double sample_alpha(std::size_t item_count, double u) {
  if (item_count == 0 || !(u >= 0.0 && u <= 1.0)) {
    throw std::invalid_argument("sample_alpha: need m >= 1 and u in [0,1]");
  }
  return 1.0 - 2.0 * std::pow(4.0 * static_cast<double>(item_count), -u);
}

Rational UtilityCurve::value_at(const Rational& alpha) const {
  for (const auto& piece : pieces_) {
    if (alpha >= piece.lo && alpha <= piece.hi) {
      return piece.intercept + piece.slope * alpha;
    }
  }
  throw std::invalid_argument("UtilityCurve::value_at: alpha outside the curve's domain");
}

Rational UtilityCurve::start_value() const { return pieces_.front().intercept + pieces_.front().slope * pieces_.front().lo; }

Rational UtilityCurve::end_value() const { return pieces_.back().intercept + pieces_.back().slope * pieces_.back().hi; }

Rational UtilityCurve::integrated_profit_coefficient() const {
  Rational total = 0;
  for (const auto& piece : pieces_) {
    total += piece.slope * (piece.hi - piece.lo);
  }
  return total;
}

namespace {

struct Line {
  std::optional<std::size_t> item;
  Rational intercept;
  Rational slope;

  Rational at(const Rational& x) const { return intercept + slope * x; }
};

// Higher value at x, then steeper, then an item over the zero option, then the
// lower item index.
bool dominates_at(const Line& a, const Line& b, const Rational& x) {
  if (int c = cmp(a.at(x), b.at(x)); c != 0) {
    return c > 0;
  }
  if (int c = cmp(a.slope, b.slope); c != 0) {
    return c > 0;
  }
  if (a.item.has_value() != b.item.has_value()) {
    return a.item.has_value();
  }
  return a.item.has_value() && *a.item < *b.item;
}

}  // namespace

UtilityCurve utility_curve(const Valuation& values, const ItemPricing& q, const CostVector& costs) {
  const std::size_t m = q.item_count();
  if (values.size() != m || costs.size() != m) {
    throw DimensionError("utility_curve: dimension mismatch");
  }
  std::vector<Line> lines{Line{std::nullopt, 0, 0}};
  for (std::size_t j = 0; j < m; ++j) {
    if (q.prices[j].is_finite()) {
      const Rational& qj = q.prices[j].value();
      lines.push_back(Line{j, values[j] - qj, qj - costs[j]});
    }
  }
  const Rational lo = alpha_lower();
  const Rational hi = alpha_upper(m);

  std::size_t current = 0;
  for (std::size_t k = 1; k < lines.size(); ++k) {
    if (dominates_at(lines[k], lines[current], lo)) {
      current = k;
    }
  }
  std::vector<CurvePiece> pieces;
  Rational start = lo;
  for (;;) {
    const Line& cur = lines[current];
    std::optional<std::size_t> next;
    Rational next_at;
    for (std::size_t k = 0; k < lines.size(); ++k) {
      if (lines[k].slope <= cur.slope) {
        continue;
      }
      Rational cross = (cur.intercept - lines[k].intercept) / (lines[k].slope - cur.slope);
      if (cross <= start) {
        continue;
      }
      if (!next || cross < next_at || (cross == next_at && dominates_at(lines[k], lines[*next], cross + 1))) {
        next = k;
        next_at = std::move(cross);
      }
    }
    if (!next || next_at >= hi) {
      pieces.push_back(CurvePiece{start, hi, cur.item, cur.intercept, cur.slope});
      break;
    }
    pieces.push_back(CurvePiece{start, next_at, cur.item, cur.intercept, cur.slope});
    start = next_at;
    current = *next;
  }
  return UtilityCurve(std::move(pieces));
}

std::pair<Rational, Rational> log_4m_bracket(std::size_t item_count) {
  const double x = std::log(4.0 * static_cast<double>(item_count));
  double below = x;
  double above = x;
  for (int i = 0; i < 8; ++i) {
    below = std::nextafter(below, 0.0);
    above = std::nextafter(above, HUGE_VAL);
  }
  return {from_double(below), from_double(above)};
}

ProfitBoundReport profit_bound_report(const TypeDistribution& dist, const LotteryMenu& menu, const CostVector& costs,
                                      const Rational& sprofit_oracle) {
  const std::size_t m = menu.item_count;
  if (dist.item_count != m || costs.size() != m) {
    throw DimensionError("profit_bound_report: dimension mismatch");
  }
  if (auto witness = check_buy_many(menu)) {
    throw std::invalid_argument("profit_bound_report: menu option " + std::to_string(witness->option) +
                                " violates the buy-many constraint");
  }
  ProfitBoundReport report;
  report.item_count = m;
  report.costs = costs;
  CostVector doubled(m);
  for (std::size_t j = 0; j < m; ++j) {
    doubled[j] = 2 * costs[j];
  }
  report.processed_menu = with_repeated_purchase(strip_below_cost(menu, doubled));
  report.q = derived_item_pricing_q(report.processed_menu, costs);
  report.sprofit_oracle = sprofit_oracle;

  Rational weighted_profit = 0;
  for (std::size_t t = 0; t < dist.support.size(); ++t) {
    const auto& type = dist.support[t];
    TypeBoundRecord rec;
    rec.type_index = t;
    rec.probability = type.probability;
    const UtilityCurve curve = utility_curve(type.values, report.q, costs);
    rec.u_low = curve.start_value();
    rec.u_high = curve.end_value();
    const Choice choice = best_response_menu(type.values, report.processed_menu, doubled);
    rec.u_menu = choice.utility;
    rec.profit_menu = choice.payment - choice.cost;
    rec.qalpha_coefficient = rec.u_high - rec.u_low;
    rec.integrated_coefficient = curve.integrated_profit_coefficient();
    rec.upper_ok = rec.u_low <= rec.u_menu;
    rec.lower_ok = rec.u_high >= rec.u_menu + rec.profit_menu / 2;
    rec.envelope_ok = rec.qalpha_coefficient == rec.integrated_coefficient;
    rec.monotone_ok = std::all_of(curve.pieces().begin(), curve.pieces().end(),
                                  [](const CurvePiece& p) { return sgn(p.slope) >= 0; });
    const std::string tag = "type " + std::to_string(t) + ": ";
    if (!rec.upper_ok) report.failures.push_back(tag + "u(v,-1) > u_v(p)");
    if (!rec.lower_ok) report.failures.push_back(tag + "u(v,1-1/2m) < u_v(p) + Profit/2");
    if (!rec.envelope_ok) report.failures.push_back(tag + "envelope identity");
    if (!rec.monotone_ok) report.failures.push_back(tag + "negative utility-curve slope");
    report.qalpha_coefficient += type.probability * rec.qalpha_coefficient;
    weighted_profit += type.probability * rec.profit_menu;
    report.types.push_back(std::move(rec));
  }
  report.menu_profit = expected_profit(dist, report.processed_menu, doubled);
  report.supplied_menu_profit = expected_profit(dist, menu, doubled);
  report.aggregates_ok = weighted_profit == report.menu_profit;
  if (!report.aggregates_ok) report.failures.push_back("aggregate profit != weighted per-type sum");

  const auto [ln_lo, ln_hi] = log_4m_bracket(m);
  report.log_4m = std::log(4.0 * static_cast<double>(m));
  report.bound = 2.0 * report.log_4m;
  const Rational& s = sprofit_oracle;
  if (sgn(s) > 0) {
    report.ratio = to_double(report.menu_profit) / to_double(s);
  } else {
    report.ratio = sgn(report.menu_profit) > 0 ? HUGE_VAL : 0.0;
  }
  if (report.menu_profit <= 2 * ln_lo * s) {
    report.bound_ok = true;
  } else {
    report.failures.push_back(report.menu_profit > 2 * ln_hi * s ? "Profit_{p,2c} > 2 ln 4m SProfit_c"
                                                                 : "bound undecided within ln bracket");
  }
  if (report.qalpha_coefficient <= ln_lo * s) {
    report.oracle_dominates = true;
  } else {
    report.failures.push_back("E_alpha Profit_{q_alpha,c} exceeds the SProfit oracle");
  }
  return report;
}

double estimate_qalpha_profit(const TypeDistribution& dist, const ItemPricing& q, const CostVector& costs,
                              std::size_t samples, std::uint64_t seed) {
  const std::size_t m = q.item_count();
  std::mt19937_64 rng(seed);
  const Rational lo = alpha_lower();
  const Rational hi = alpha_upper(m);
  const auto full = AvailabilityDistribution::full(m);
  double total = 0.0;
  for (std::size_t s = 0; s < samples; ++s) {
    const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
    Rational alpha = from_double(sample_alpha(m, u));
    if (alpha < lo) alpha = lo;
    if (alpha > hi) alpha = hi;
    const auto pricing = RandomItemPricing::deterministic(q_alpha(q, costs, alpha));
    total += to_double(expected_profit(dist, pricing, costs, full));
  }
  return samples == 0 ? 0.0 : total / static_cast<double>(samples);
}

}  // namespace mechlab
