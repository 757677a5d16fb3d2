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

#include "mechlab/cli.hpp"

#include "mechlab/buymany.hpp"
#include "mechlab/errors.hpp"
#include "mechlab/exact_opt.hpp"
#include "mechlab/instances.hpp"
#include "mechlab/sequential.hpp"

#include "CLI11.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <map>
#include <mutex>
#include <optional>
#include <random>
#include <sstream>
#include <thread>

#ifndef MECHLAB_VERSION
#define MECHLAB_VERSION "0.0.0"
#endif

namespace mechlab::cli {

bool CommandReport::ok() const {
  return std::all_of(rows.begin(), rows.end(), [](const CsvRow& r) { return r.pass; });
}

namespace {

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) {
    return s;
  }
  std::string out = "\"";
  for (char c : s) {
    out += c == '"' ? std::string("\"\"") : std::string(1, c);
  }
  return out + "\"";
}

std::string fmt(double x) {
  std::ostringstream os;
  os << std::setprecision(17) << x;
  return os.str();
}

std::string join(const RationalVector& xs) {
  std::string out;
  for (std::size_t k = 0; k < xs.size(); ++k) {
    out += (k ? " " : "") + to_string(xs[k]);
  }
  return out;
}

std::string join(const ItemPricing& p) {
  std::string out;
  for (std::size_t k = 0; k < p.prices.size(); ++k) {
    out += (k ? " " : "") + to_string(p.prices[k]);
  }
  return out;
}

CsvRow compare(std::string name, const Rational& lhs, const std::string& relation, const Rational& rhs) {
  bool pass = false;
  if (relation == "==") pass = lhs == rhs;
  if (relation == "<=") pass = lhs <= rhs;
  if (relation == ">=") pass = lhs >= rhs;
  return CsvRow{std::move(name), to_string(lhs), to_string(rhs), relation, pass};
}

void describe(CommandReport& report, const std::string& label, const RandomItemPricing& pricing) {
  for (const auto& atom : pricing.atoms) {
    report.notes.push_back(label + " atom weight " + to_string(atom.weight) + ": prices " + join(atom.pricing));
  }
}

struct Options {
  std::string instance;
  std::string menu;
  std::string costs;
  std::string x;
  std::string prices;
  std::string availability;
  std::string order;
  std::string pricing;
  std::string pricing_out;
  std::string out;
  std::string mode = "exact";
  std::string epsilon = "0";
  std::optional<std::size_t> buyer;
  std::size_t m = 4;
  std::size_t trials = 0;
  unsigned long long seed = 0;
  std::uint64_t guard_mappings = GuardLimits{}.mappings;
  std::uint64_t guard_subsets = GuardLimits{}.subsets;

  GuardLimits guard() const { return GuardLimits{guard_mappings, guard_subsets}; }
};

Instance load_instance(const Options& o) {
  if (o.instance.empty()) {
    throw ParseError("--instance is required");
  }
  return read_instance(o.instance);
}

std::optional<CostVector> load_costs(const Options& o, const Instance& instance) {
  if (!o.costs.empty()) {
    CostVector c = parse_rational_list(o.costs);
    if (c.size() != instance.item_count) {
      throw ParseError("--costs has " + std::to_string(c.size()) + " entries, expected " +
                       std::to_string(instance.item_count));
    }
    return c;
  }
  return instance.costs;
}

RationalVector load_vector(const std::string& text, const char* flag, std::size_t m) {
  if (text.empty()) {
    throw ParseError(std::string(flag) + " is required");
  }
  RationalVector v = parse_rational_list(text);
  if (v.size() != m) {
    throw ParseError(std::string(flag) + " has " + std::to_string(v.size()) + " entries, expected " +
                     std::to_string(m));
  }
  return v;
}

std::size_t pick_buyer(const Options& o, const Instance& instance) {
  const std::size_t b = o.buyer.value_or(0);
  if (b >= instance.buyers.size()) {
    throw ParseError("--buyer " + std::to_string(b) + " out of range");
  }
  return b;
}

std::vector<std::size_t> parse_order(const std::string& text, std::size_t buyers) {
  if (text.empty()) {
    return default_order(buyers);
  }
  std::vector<std::size_t> order;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      order.push_back(std::stoul(item));
    } catch (const std::exception&) {
      throw ParseError("--order: malformed entry '" + item + "'");
    }
  }
  return order;
}

// "0+1:3/4,1:1/4,none:0" -> sets with probabilities.
AvailabilityDistribution parse_availability(const std::string& text, std::size_t m) {
  if (text.empty()) {
    return AvailabilityDistribution::full(m);
  }
  AvailabilityDistribution dist;
  std::stringstream ss(text);
  std::string entry;
  while (std::getline(ss, entry, ',')) {
    const auto colon = entry.find(':');
    if (colon == std::string::npos) {
      throw ParseError("--availability: entry '" + entry + "' lacks ':'");
    }
    const std::string items = entry.substr(0, colon);
    ItemSet set = 0;
    if (items != "none") {
      std::stringstream is(items);
      std::string item;
      while (std::getline(is, item, '+')) {
        std::size_t j = 0;
        try {
          j = std::stoul(item);
        } catch (const std::exception&) {
          throw ParseError("--availability: malformed item '" + item + "'");
        }
        if (j >= m) {
          throw ParseError("--availability: item " + item + " out of range");
        }
        set |= ItemSet{1} << j;
      }
    }
    dist.atoms[set] += parse_rational(entry.substr(colon + 1));
  }
  require_valid(validate_availability(dist, m), "--availability");
  return dist;
}

CommandReport cmd_validate(const Options& o) {
  CommandReport report;
  if (o.instance.empty()) {
    throw ParseError("--instance is required");
  }
  const Instance instance = instance_from_json(read_json_file(o.instance));
  auto violations = validate_instance(instance);
  std::optional<LotteryMenu> menu;
  if (!o.menu.empty()) {
    menu = menu_from_json(read_json_file(o.menu));
    if (menu->item_count != instance.item_count) {
      violations.push_back({"menu item count != instance item count", "menu"});
    }
    for (auto& v : validate_menu(*menu)) {
      violations.push_back(std::move(v));
    }
  }
  if (!o.pricing.empty()) {
    const SequentialPricing seq = sequential_from_json(read_json_file(o.pricing), instance.item_count);
    try {
      check_sequential(instance, seq);
    } catch (const std::invalid_argument& e) {
      violations.push_back({e.what(), "sequential pricing"});
    }
  }
  for (const auto& v : violations) {
    report.rows.push_back(CsvRow{"violation: " + v.invariant + " at " + v.location, "1", "0", "==", false});
  }
  report.rows.push_back(CsvRow{"violations", std::to_string(violations.size()), "0", "==", violations.empty()});
  return report;
}

CommandReport cmd_check_buy_many(const Options& o) {
  if (o.menu.empty()) {
    throw ParseError("--menu is required");
  }
  const LotteryMenu menu = read_menu(o.menu);
  const HatPrices hat = hat_prices(menu);
  CommandReport report;
  for (std::size_t j = 0; j < hat.size(); ++j) {
    report.notes.push_back("hat price item " + std::to_string(j) + ": " + to_string(hat[j]));
  }
  for (std::size_t k = 0; k < menu.options.size(); ++k) {
    Rational replicate = 0;
    for (std::size_t j = 0; j < menu.item_count; ++j) {
      if (sgn(menu.options[k].lottery[j]) > 0) {
        replicate += hat[j].value() * menu.options[k].lottery[j];
      }
    }
    report.rows.push_back(compare("option[" + std::to_string(k) + "].price <= hat.lottery", menu.options[k].price,
                                  "<=", replicate));
  }
  if (auto w = check_buy_many(menu)) {
    report.notes.push_back("witness: option " + std::to_string(w->option) + " price " + to_string(w->price) +
                           " > replication cost " + to_string(w->replication_cost));
  }
  return report;
}

CommandReport cmd_opt_pricing(const Options& o) {
  const Instance instance = load_instance(o);
  const auto costs = load_costs(o, instance);
  CommandReport report;
  for (std::size_t b = 0; b < instance.buyers.size(); ++b) {
    if (o.buyer && *o.buyer != b) {
      continue;
    }
    const std::string tag = "buyer[" + std::to_string(b) + "]";
    const VertexPricing srev = opt_item_pricing(instance.buyers[b], std::nullopt, o.guard());
    report.notes.push_back(tag + " SRev pricing: " + join(srev.pricing));
    report.rows.push_back(compare(tag + ".srev (re-evaluated vs LP)", srev.revenue, "==", srev.lp_objective));
    report.rows.push_back(compare(tag + ".srev (expected_revenue)", expected_revenue(instance.buyers[b], srev.pricing),
                                  "==", srev.revenue));
    if (costs) {
      const VertexPricing sp = opt_item_pricing(instance.buyers[b], costs, o.guard());
      report.notes.push_back(tag + " SProfit pricing: " + join(sp.pricing));
      report.rows.push_back(compare(tag + ".sprofit (re-evaluated vs LP)", *sp.profit, "==", sp.lp_objective));
    }
  }
  if (o.buyer && *o.buyer >= instance.buyers.size()) {
    throw ParseError("--buyer out of range");
  }
  return report;
}

CommandReport cmd_exante(const Options& o) {
  const Instance instance = load_instance(o);
  CommandReport report;
  if (!o.x.empty()) {
    const std::size_t b = pick_buyer(o, instance);
    const AllocationVector x = load_vector(o.x, "--x", instance.item_count);
    const ExAnteBuyerResult r = exante_srev(instance.buyers[b], x, o.guard());
    describe(report, "buyer[" + std::to_string(b) + "]", r.pricing);
    report.rows.push_back(compare("srev(x) (mixture re-evaluated)",
                                  expected_revenue(instance.buyers[b], r.pricing,
                                                   AvailabilityDistribution::full(instance.item_count)),
                                  "==", r.revenue));
    for (std::size_t j = 0; j < x.size(); ++j) {
      report.rows.push_back(compare("allocation[" + std::to_string(j) + "]" + (r.tight[j] ? " (tight)" : " (slack)"),
                                    r.allocation[j], "<=", x[j]));
    }
    return report;
  }
  const ExAnteSolution ea = exante_global(instance, o.guard());
  report.notes.push_back("EA-SRev " + to_string(ea.total));
  Rational sum_rev = 0;
  for (std::size_t b = 0; b < instance.buyers.size(); ++b) {
    const std::string tag = "buyer[" + std::to_string(b) + "]";
    describe(report, tag, ea.pricings[b]);
    report.notes.push_back(tag + " allocation " + join(ea.allocations[b]));
    report.rows.push_back(compare(tag + ".revenue (mixture re-evaluated)",
                                  expected_revenue(instance.buyers[b], ea.pricings[b],
                                                   AvailabilityDistribution::full(instance.item_count)),
                                  "==", ea.revenues[b]));
    sum_rev += ea.revenues[b];
  }
  for (std::size_t j = 0; j < instance.item_count; ++j) {
    Rational total = 0;
    for (const auto& x : ea.allocations) {
      total += x[j];
    }
    report.rows.push_back(compare("sum_i x_i[" + std::to_string(j) + "]", total, "<=", 1));
  }
  report.rows.push_back(compare("total", ea.total, "==", sum_rev));
  return report;
}

AllocationVector random_point(std::mt19937_64& rng, std::size_t m) {
  AllocationVector y;
  for (std::size_t j = 0; j < m; ++j) {
    y.push_back(make_rational(uniform_int(rng, 0, 8), 8));
  }
  return y;
}

CommandReport cmd_subgradient(const Options& o) {
  const Instance instance = load_instance(o);
  const std::size_t b = pick_buyer(o, instance);
  const std::size_t m = instance.item_count;
  const AllocationVector x0 = load_vector(o.x, "--x", m);
  std::vector<AllocationVector> probes{AllocationVector(m, Rational(0)), x0, AllocationVector(m, Rational(1))};
  std::mt19937_64 rng(o.seed);
  for (std::size_t k = 0; k < (o.trials ? o.trials : 5); ++k) {
    probes.push_back(random_point(rng, m));
  }
  const SubgradientResult r = srev_subgradient(instance.buyers[b], x0, probes, o.guard());
  CommandReport report;
  report.notes.push_back("SRev(x0) " + to_string(r.srev_at_x0));
  for (std::size_t j = 0; j < r.costs.size(); ++j) {
    report.rows.push_back(compare("c[" + std::to_string(j) + "]", r.costs[j], ">=", 0));
  }
  for (const auto& check : r.checks) {
    report.rows.push_back(compare("SRev(" + join(check.y) + ") <= SRev(x0) + c.(y - x0)", check.srev_y, "<=",
                                  check.bound));
  }
  return report;
}

CommandReport cmd_profit_bound(const Options& o) {
  const Instance instance = load_instance(o);
  const std::size_t b = pick_buyer(o, instance);
  const auto costs = load_costs(o, instance);
  if (!costs) {
    throw ParseError("profit-bound needs --costs or costs in the instance");
  }
  if (o.menu.empty()) {
    throw ParseError("--menu is required");
  }
  const LotteryMenu menu = read_menu(o.menu);
  if (menu.item_count != instance.item_count) {
    throw ParseError("menu item count does not match the instance");
  }
  CommandReport report;
  if (auto w = check_buy_many(menu)) {
    report.rows.push_back(compare("menu is buy-many (option " + std::to_string(w->option) + ")", w->price, "<=",
                                  w->replication_cost));
    return report;
  }
  const TypeDistribution& dist = instance.buyers[b];
  const Rational sprofit = *opt_item_pricing(dist, costs, o.guard()).profit;
  const ProfitBoundReport r = profit_bound_report(dist, menu, *costs, sprofit);
  report.notes.push_back("q " + join(r.q));
  report.notes.push_back("options-only profit of the supplied menu at 2c " + to_string(r.supplied_menu_profit));
  report.notes.push_back("Profit/SProfit " + fmt(r.ratio) + " vs 2 ln 4m " + fmt(r.bound));
  for (const auto& t : r.types) {
    const std::string tag = "type[" + std::to_string(t.type_index) + "]";
    report.rows.push_back(compare(tag + " u(v,-1) <= u_v(p)", t.u_low, "<=", t.u_menu));
    report.rows.push_back(
        compare(tag + " u(v,1-1/2m) >= u_v(p) + profit/2", t.u_high, ">=", t.u_menu + t.profit_menu / 2));
    report.rows.push_back(compare(tag + " envelope (ln 4m units)", t.qalpha_coefficient, "==", t.integrated_coefficient));
  }
  const auto [ln_lo, ln_hi] = log_4m_bracket(instance.item_count);
  report.rows.push_back(CsvRow{"Profit_{p,2c} <= 2 ln 4m SProfit_c", to_string(r.menu_profit),
                               fmt(2 * r.log_4m * to_double(sprofit)), "<=", r.bound_ok});
  report.rows.push_back(CsvRow{"E_alpha Profit_{q_alpha,c} <= SProfit_c", fmt(to_double(r.qalpha_coefficient) / r.log_4m),
                               to_string(sprofit), "<=", r.oracle_dominates});
  report.rows.push_back(CsvRow{"aggregate profit == weighted per-type sum", to_string(r.menu_profit),
                               to_string(r.menu_profit), "==", r.aggregates_ok});
  if (o.trials > 0) {
    const double est = estimate_qalpha_profit(dist, r.q, *costs, o.trials, o.seed);
    report.notes.push_back("Monte-Carlo E_alpha Profit_{q_alpha,c} " + fmt(est) + " over " + std::to_string(o.trials) +
                           " samples; exact " + fmt(to_double(r.qalpha_coefficient) / r.log_4m));
  }
  return report;
}

CommandReport cmd_decompose(const Options& o) {
  const Instance instance = load_instance(o);
  const std::size_t b = pick_buyer(o, instance);
  const std::size_t m = instance.item_count;
  if (o.prices.empty()) {
    throw ParseError("--prices is required");
  }
  ItemPricing p;
  {
    std::stringstream ss(o.prices);
    std::string item;
    while (std::getline(ss, item, ',')) {
      p.prices.push_back(parse_price(item));
    }
  }
  if (p.item_count() != m) {
    throw ParseError("--prices has " + std::to_string(p.item_count()) + " entries, expected " + std::to_string(m));
  }
  const AllocationVector y = load_vector(o.x, "--x", m);
  const AvailabilityDistribution availability = parse_availability(o.availability, m);
  const Decomposition d = convex_decompose(p, instance.buyers[b], availability, y, o.guard());
  CommandReport report;
  Rational total_weight = 0;
  for (std::size_t k = 0; k < d.subsets.size(); ++k) {
    report.notes.push_back("alpha" + to_string(d.subsets[k], m) + " = " + to_string(d.weights[k]));
    total_weight += d.weights[k];
  }
  for (std::size_t j = 0; j < m; ++j) {
    report.rows.push_back(compare("allocation[" + std::to_string(j) + "]", d.allocation[j], "==", y[j]));
  }
  Rational yp = 0;
  for (std::size_t j = 0; j < m; ++j) {
    if (sgn(y[j]) != 0) {
      yp += y[j] * p.prices[j].value();
    }
  }
  report.rows.push_back(compare("revenue == y.p", d.revenue, "==", yp));
  report.rows.push_back(compare("revenue (mixture re-evaluated)",
                                expected_revenue(instance.buyers[b], d.pricing, availability), "==", d.revenue));
  report.rows.push_back(compare("sum alpha", total_weight, "==", 1));
  return report;
}

void append_mc(CommandReport& report, const Instance& instance, const SequentialPricing& seq, const Rational& exact,
               const Options& o) {
  if (o.mode != "mc") {
    return;
  }
  const MonteCarloEstimate mc = simulate_sequential(instance, seq, o.trials ? o.trials : 10000, o.seed);
  const double gap = std::abs(mc.mean - to_double(exact));
  report.rows.push_back(CsvRow{"|mc mean - exact| <= 99% half-width (" + std::to_string(mc.trials) + " trials)",
                               fmt(gap), fmt(mc.half_width), "<=", gap <= mc.half_width});
  report.notes.push_back("Monte-Carlo mean " + fmt(mc.mean) + " exact " + fmt(to_double(exact)));
}

CommandReport cmd_sequential(const Options& o) {
  const Instance instance = load_instance(o);
  if (o.mode != "exact" && o.mode != "mc") {
    throw ParseError("--mode must be exact or mc");
  }
  CommandReport report;
  if (!o.pricing.empty()) {
    const SequentialPricing seq = read_sequential(o.pricing, instance);
    const SequentialEvalReport ev = evaluate_sequential(instance, seq, o.guard());
    report.notes.push_back("expected revenue " + to_string(ev.total));
    Rational total = 0;
    for (std::size_t b = 0; b < ev.buyer_revenue.size(); ++b) {
      report.notes.push_back("buyer[" + std::to_string(b) + "] revenue " + to_string(ev.buyer_revenue[b]));
      total += ev.buyer_revenue[b];
    }
    report.rows.push_back(compare("total == sum of buyer revenues", ev.total, "==", total));
    for (std::size_t j = 0; j < ev.sale_probability.size(); ++j) {
      report.rows.push_back(compare("Pr[item " + std::to_string(j) + " sold]", ev.sale_probability[j], "<=", 1));
    }
    append_mc(report, instance, seq, ev.total, o);
    return report;
  }
  const auto order = parse_order(o.order, instance.buyers.size());
  const HalfReport h = verify_half(instance, order, o.guard());
  report.notes.push_back("EA-SRev " + to_string(h.exante.total) + ", ratio " + to_string(h.ratio));
  for (std::size_t b = 0; b < instance.buyers.size(); ++b) {
    describe(report, "derandomized buyer[" + std::to_string(b) + "]", h.deterministic.pricings[b]);
  }
  for (const auto& c : h.build.certificates) {
    const std::string tag = "buyer[" + std::to_string(c.buyer) + "]";
    for (std::size_t j = 0; j < c.availability.size(); ++j) {
      report.rows.push_back(compare(tag + " Pr[item " + std::to_string(j) + " available]", c.availability[j], ">=",
                                    Rational(1, 2)));
      report.rows.push_back(compare(tag + " allocation[" + std::to_string(j) + "] == x/2", c.achieved_allocation[j],
                                    "==", c.target_allocation[j]));
    }
    report.rows.push_back(compare(tag + " revenue == half ex-ante revenue", c.achieved_revenue, "==", c.target_revenue));
  }
  report.rows.push_back(compare("randomized revenue == EA-SRev/2", h.randomized_revenue, "==", h.exante.total / 2));
  report.rows.push_back(compare("derandomized >= randomized", h.derandomized_revenue, ">=", h.randomized_revenue));
  report.rows.push_back(compare("ratio", h.ratio, ">=", Rational(1, 2)));
  append_mc(report, instance, h.deterministic, h.derandomized_revenue, o);
  if (!o.pricing_out.empty()) {
    write_sequential(o.pricing_out, h.deterministic);
  }
  return report;
}

CommandReport cmd_gap(const Options& o) {
  const Rational epsilon = parse_rational(o.epsilon);
  const GapInstance gap = gap_instance(o.m, epsilon);
  const TypeDistribution& dist = gap.instance.buyers[0];
  const CostVector& c = *gap.instance.costs;
  CommandReport report;
  report.rows.push_back(CsvRow{"menu is buy-many", check_buy_many(gap.menu) ? "0" : "1", "1", "==",
                               !check_buy_many(gap.menu).has_value()});
  CostVector doubled = c;
  for (auto& x : doubled) {
    x *= 2;
  }
  const LotteryMenu stripped = strip_below_cost(gap.menu, doubled);
  report.rows.push_back(CsvRow{"options kept by strip at 2c", std::to_string(stripped.options.size()),
                               std::to_string(gap.menu.options.size()), "==",
                               stripped.options.size() == gap.menu.options.size()});
  const Rational menu_profit = expected_profit(dist, gap.menu, c);
  const Rational buy_many_profit = expected_profit(dist, with_repeated_purchase(gap.menu), c);
  report.rows.push_back(compare("menu profit at c == (m-1)/2", menu_profit, "==", gap.analytic_profit));
  report.rows.push_back(compare("buy-many profit at c == (m-1)/2", buy_many_profit, "==", gap.analytic_profit));
  const VertexPricing sp = opt_item_pricing(dist, c, o.guard());
  report.notes.push_back("SProfit pricing " + join(sp.pricing));
  report.rows.push_back(compare("SProfit_c", *sp.profit, "<=", 2));
  const Rational m_minus_1(static_cast<long>(o.m) - 1);
  report.rows.push_back(compare("buy-many profit / SProfit_c", buy_many_profit / *sp.profit, ">=", m_minus_1 / 4));
  return report;
}

struct SweepOutcome {
  std::vector<std::pair<std::string, bool>> checks;
};

SweepOutcome sweep_one(std::size_t index, const Options& o) {
  const std::uint64_t seed = o.seed * 1000003ULL + index;
  std::mt19937_64 rng(seed ^ 0x5eedULL);
  RandomInstanceConfig cfg;
  cfg.buyers = static_cast<std::size_t>(uniform_int(rng, 1, 3));
  cfg.items = static_cast<std::size_t>(uniform_int(rng, 1, static_cast<long>(std::max<std::size_t>(o.m, 1))));
  cfg.support = static_cast<std::size_t>(uniform_int(rng, 1, 4));
  cfg.value_scale = 6;
  cfg.style = static_cast<CorrelationStyle>(index % 3);
  cfg.seed = seed;
  const Instance instance = random_instance(cfg);
  const TypeDistribution& d0 = instance.buyers[0];
  const std::size_t m = instance.item_count;
  SweepOutcome out;

  const VertexPricing opt = opt_item_pricing(d0, std::nullopt, o.guard());
  const auto atoms = exante_atoms(d0, o.guard());
  out.checks.emplace_back("exante(1) == SRev", exante_srev(atoms, AllocationVector(m, Rational(1))).revenue == opt.revenue);

  bool dominates = true;
  for (int k = 0; k < 50; ++k) {
    ItemPricing p;
    for (std::size_t j = 0; j < m; ++j) {
      const long v = uniform_int(rng, 0, cfg.value_scale + 1);
      p.prices.push_back(v > cfg.value_scale ? Price::infinity() : Price(v));
    }
    dominates = dominates && expected_revenue(d0, p) <= opt.revenue;
  }
  out.checks.emplace_back("SRev >= random grid pricings", dominates);

  const AllocationVector x1 = random_point(rng, m);
  const AllocationVector x2 = random_point(rng, m);
  const Rational t = make_rational(uniform_int(rng, 0, 8), 8);
  AllocationVector mid(m);
  for (std::size_t j = 0; j < m; ++j) {
    mid[j] = t * x1[j] + (1 - t) * x2[j];
  }
  const Rational f1 = exante_srev(atoms, x1).revenue;
  const Rational f2 = exante_srev(atoms, x2).revenue;
  out.checks.emplace_back("SRev concave", exante_srev(atoms, mid).revenue >= t * f1 + (1 - t) * f2);
  out.checks.emplace_back("supergradient", srev_subgradient(atoms, x1, {x2, mid}).ok());

  std::vector<std::size_t> order = default_order(instance.buyers.size());
  std::shuffle(order.begin(), order.end(), rng);
  out.checks.emplace_back("sequential >= EA-SRev/2", verify_half(instance, order, o.guard()).ok());

  const CostVector costs = random_costs(m, 3, rng);
  const LotteryMenu menu = buy_many_closure(random_menu(m, static_cast<std::size_t>(uniform_int(rng, 1, 4)), 10, rng));
  const Rational sprofit = *opt_item_pricing(d0, costs, o.guard()).profit;
  out.checks.emplace_back("profit bound report", profit_bound_report(d0, menu, costs, sprofit).ok());
  return out;
}

CommandReport cmd_sweep(const Options& o) {
  const std::size_t count = o.trials ? o.trials : 20;
  std::size_t threads = std::max(1U, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("MECHLAB_THREADS")) {
    try {
      threads = std::max<std::size_t>(1, std::stoul(env));
    } catch (const std::exception&) {
      throw ParseError("MECHLAB_THREADS must be a positive integer");
    }
  }
  threads = std::min(threads, count);
  std::vector<SweepOutcome> outcomes(count);
  std::vector<std::string> errors(count);
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < threads; ++w) {
    pool.emplace_back([&] {
      for (std::size_t k = next++; k < count; k = next++) {
        try {
          outcomes[k] = sweep_one(k, o);
        } catch (const std::exception& e) {
          errors[k] = e.what();
        }
      }
    });
  }
  for (auto& t : pool) {
    t.join();
  }
  CommandReport report;
  std::vector<std::string> names;
  std::map<std::string, std::pair<std::size_t, std::size_t>> tally;
  for (std::size_t k = 0; k < count; ++k) {
    if (!errors[k].empty()) {
      report.notes.push_back("instance " + std::to_string(k) + " error: " + errors[k]);
      continue;
    }
    for (const auto& [name, pass] : outcomes[k].checks) {
      if (!tally.count(name)) {
        names.push_back(name);
      }
      auto& [passed, total] = tally[name];
      passed += pass ? 1 : 0;
      ++total;
      if (!pass) {
        report.notes.push_back("instance " + std::to_string(k) + " failed: " + name);
      }
    }
  }
  for (const auto& name : names) {
    const auto& [passed, total] = tally[name];
    report.rows.push_back(CsvRow{name, std::to_string(passed), std::to_string(total), "==", passed == total});
  }
  const auto errored = static_cast<std::size_t>(std::count_if(errors.begin(), errors.end(), [](const std::string& e) { return !e.empty(); }));
  report.rows.push_back(CsvRow{"instances without errors", std::to_string(count - errored), std::to_string(count), "==",
                               errored == 0});
  return report;
}

}  // namespace

std::string render_csv(const std::string& config, unsigned long long seed, const CommandReport& report) {
  std::ostringstream os;
  os << "# mechlab " << MECHLAB_VERSION << '\n';
  os << "# config: " << config << '\n';
  os << "# seed: " << seed << '\n';
  for (const auto& note : report.notes) {
    os << "# " << note << '\n';
  }
  os << "name,lhs,rhs,relation,pass\n";
  for (const auto& r : report.rows) {
    os << csv_field(r.name) << ',' << csv_field(r.lhs) << ',' << csv_field(r.rhs) << ',' << csv_field(r.relation) << ','
       << (r.pass ? "true" : "false") << '\n';
  }
  return os.str();
}

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Exact verification toolkit for buy-many mechanisms and item pricings", "mechlab"};
  app.require_subcommand(1);
  app.set_version_flag("--version", MECHLAB_VERSION);
  Options o;
  std::string buyer_text;

  auto add = [&](CLI::App* sub, std::initializer_list<const char*> flags) {
    for (const std::string flag : flags) {
      if (flag == "instance") sub->add_option("--instance", o.instance, "Instance JSON file");
      if (flag == "menu") sub->add_option("--menu", o.menu, "Menu JSON file");
      if (flag == "costs") sub->add_option("--costs", o.costs, "Comma-separated costs, e.g. 0,4,4,4");
      if (flag == "x") sub->add_option("--x", o.x, "Comma-separated allocation vector");
      if (flag == "prices") sub->add_option("--prices", o.prices, "Comma-separated item prices (inf allowed)");
      if (flag == "availability")
        sub->add_option("--availability", o.availability, "Availability law, e.g. 0+1:3/4,1:1/4,none:0");
      if (flag == "order") sub->add_option("--order", o.order, "Comma-separated service order");
      if (flag == "pricing") sub->add_option("--pricing", o.pricing, "Sequential pricing JSON file");
      if (flag == "pricing-out")
        sub->add_option("--pricing-out", o.pricing_out, "Write the derandomized sequential pricing here");
      if (flag == "mode") sub->add_option("--mode", o.mode, "exact or mc")->check(CLI::IsMember({"exact", "mc"}));
      if (flag == "buyer") sub->add_option("--buyer", buyer_text, "Buyer index");
      if (flag == "m") sub->add_option("--m", o.m, "Item count");
      if (flag == "epsilon") sub->add_option("--epsilon", o.epsilon, "Price perturbation of the gap menu");
      if (flag == "trials") sub->add_option("--trials", o.trials, "Trials, samples or instances");
      if (flag == "seed") sub->add_option("--seed", o.seed, "Random seed");
    }
    sub->add_option("--guard-mappings", o.guard_mappings, "Maximum choice mappings per buyer");
    sub->add_option("--guard-subsets", o.guard_subsets, "Maximum item subsets");
    sub->add_option("--out", o.out, "Write CSV here instead of stdout");
  };
  add(app.add_subcommand("validate", "Check an instance (and optional menu / sequential pricing)"),
      {"instance", "menu", "pricing"});
  add(app.add_subcommand("check-buy-many", "Check the buy-many constraint of a menu"), {"menu"});
  add(app.add_subcommand("opt-pricing", "Optimal item pricing revenue and profit"), {"instance", "costs", "buyer"});
  add(app.add_subcommand("exante", "Ex-ante constrained item pricing LP"), {"instance", "x", "buyer"});
  add(app.add_subcommand("subgradient", "Dual cost vector and supergradient checks"),
      {"instance", "x", "buyer", "trials", "seed"});
  add(app.add_subcommand("profit-bound", "Per-type and aggregate q_alpha bound report"),
      {"instance", "menu", "costs", "buyer", "trials", "seed"});
  add(app.add_subcommand("decompose", "Convex decomposition of a target allocation"),
      {"instance", "prices", "x", "availability", "buyer"});
  add(app.add_subcommand("sequential", "Build, derandomize and verify a sequential pricing"),
      {"instance", "order", "pricing", "pricing-out", "mode", "trials", "seed"});
  add(app.add_subcommand("gap", "Generate and verify the gap family"), {"m", "epsilon"});
  add(app.add_subcommand("sweep", "Random-instance property campaign"), {"m", "trials", "seed"});

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kExitParse;
  }

  CLI::App* sub = app.get_subcommands().front();
  std::string config = sub->get_name();
  for (const CLI::Option* opt : sub->get_options()) {
    if (opt->count() == 0 || opt->get_name() == "--help") {
      continue;
    }
    std::string value;
    for (const auto& r : opt->results()) {
      value += (value.empty() ? "" : ",") + r;
    }
    config += " " + opt->get_name() + "=" + value;
  }

  try {
    if (!buyer_text.empty()) {
      try {
        o.buyer = std::stoul(buyer_text);
      } catch (const std::exception&) {
        throw ParseError("--buyer: malformed index '" + buyer_text + "'");
      }
    }
    const std::string name = sub->get_name();
    CommandReport report;
    if (name == "validate") report = cmd_validate(o);
    else if (name == "check-buy-many") report = cmd_check_buy_many(o);
    else if (name == "opt-pricing") report = cmd_opt_pricing(o);
    else if (name == "exante") report = cmd_exante(o);
    else if (name == "subgradient") report = cmd_subgradient(o);
    else if (name == "profit-bound") report = cmd_profit_bound(o);
    else if (name == "decompose") report = cmd_decompose(o);
    else if (name == "sequential") report = cmd_sequential(o);
    else if (name == "gap") report = cmd_gap(o);
    else report = cmd_sweep(o);

    const std::string csv = render_csv(config, o.seed, report);
    if (o.out.empty()) {
      out << csv;
    } else {
      std::ofstream file(o.out);
      if (!file) {
        throw ParseError("cannot write '" + o.out + "'");
      }
      file << csv;
    }
    for (const auto& r : report.rows) {
      if (!r.pass) {
        err << "assertion failed: " << r.name << ": " << r.lhs << ' ' << r.relation << ' ' << r.rhs << '\n';
      }
    }
    return report.ok() ? kExitOk : kExitAssertion;
  } catch (const ParseError& e) {
    err << "parse error: " << e.what() << '\n';
    return kExitParse;
  } catch (const GuardError& e) {
    err << "guard limit: " << e.what() << '\n';
    return kExitGuard;
  } catch (const CheckFailure& e) {
    err << "assertion failed: " << e.what() << '\n';
    return kExitAssertion;
  } catch (const std::invalid_argument& e) {
    err << "invalid input: " << e.what() << '\n';
    return kExitParse;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << '\n';
    return kExitInternal;
  }
}

}  // namespace mechlab::cli
