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

#include "mechlab/instances.hpp"

#include "mechlab/errors.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

namespace mechlab {

using nlohmann::json;

GapInstance gap_instance(std::size_t m, const Rational& epsilon) {
  if (m < 2 || m > kMaxItems) {
    throw std::invalid_argument("gap_instance: need 2 <= m <= " + std::to_string(kMaxItems));
  }
  const Rational mm(static_cast<long>(m));
  GapInstance gap;
  gap.instance.item_count = m;
  CostVector costs(m, mm);
  costs[0] = 0;
  gap.instance.costs = costs;

  TypeDistribution dist{m, {}};
  gap.menu.item_count = m;
  Rational residual = 1;
  for (std::size_t i = 2; i <= m; ++i) {
    mpz_class pow2 = 1;
    pow2 <<= static_cast<mp_bitcnt_t>(i);
    Valuation v(m, Rational(0));
    v[0] = Rational(pow2);
    v[i - 1] = mm;
    const Rational prob(mpz_class(1), pow2);
    residual -= prob;
    dist.support.push_back(WeightedType{std::move(v), prob});

    Lottery lottery(m, Rational(0));
    lottery[0] = Rational(1, 2);
    lottery[i - 1] = Rational(1, 2);
    Rational price = Rational(pow2 / 2) + mm / 2 - epsilon;
    gap.menu.options.push_back(MenuOption{std::move(lottery), std::move(price)});
    gap.analytic_profit += prob * Rational(pow2 / 2);
  }
  dist.support.push_back(WeightedType{Valuation(m, Rational(0)), residual});
  gap.instance.buyers.push_back(std::move(dist));
  return gap;
}

std::string to_string(CorrelationStyle style) {
  switch (style) {
    case CorrelationStyle::Independent:
      return "independent";
    case CorrelationStyle::Comonotone:
      return "comonotone";
    case CorrelationStyle::Antithetic:
      return "antithetic";
  }
  return "independent";
}

CorrelationStyle parse_correlation_style(const std::string& text) {
  if (text == "independent") return CorrelationStyle::Independent;
  if (text == "comonotone") return CorrelationStyle::Comonotone;
  if (text == "antithetic") return CorrelationStyle::Antithetic;
  throw std::invalid_argument("unknown correlation style '" + text + "'");
}

long uniform_int(std::mt19937_64& rng, long lo, long hi) {
  if (hi < lo) {
    throw std::invalid_argument("uniform_int: empty range");
  }
  const auto span = static_cast<std::uint64_t>(hi - lo) + 1;
  return lo + static_cast<long>(rng() % span);
}

TypeDistribution random_distribution(std::size_t items, std::size_t support, long value_scale, long value_denominator,
                                     CorrelationStyle style, std::mt19937_64& rng) {
  if (items == 0 || support == 0 || value_scale <= 0 || value_denominator <= 0) {
    throw std::invalid_argument("random_distribution: dimensions and scales must be positive");
  }
  std::vector<std::vector<long>> grid(items, std::vector<long>(support));
  for (auto& column : grid) {
    for (auto& x : column) {
      x = uniform_int(rng, 0, value_scale * value_denominator);
    }
  }
  if (style != CorrelationStyle::Independent) {
    for (std::size_t j = 0; j < items; ++j) {
      std::sort(grid[j].begin(), grid[j].end());
      if (style == CorrelationStyle::Antithetic && j % 2 == 1) {
        std::reverse(grid[j].begin(), grid[j].end());
      }
    }
  }
  std::vector<long> weights(support);
  long total = 0;
  for (auto& w : weights) {
    w = uniform_int(rng, 1, 4);
    total += w;
  }
  TypeDistribution dist{items, {}};
  for (std::size_t t = 0; t < support; ++t) {
    Valuation v;
    for (std::size_t j = 0; j < items; ++j) {
      v.push_back(make_rational(grid[j][t], value_denominator));
    }
    dist.support.push_back(WeightedType{std::move(v), make_rational(weights[t], total)});
  }
  return dist;
}

Instance random_instance(const RandomInstanceConfig& config) {
  if (config.buyers == 0) {
    throw std::invalid_argument("random_instance: need at least one buyer");
  }
  std::mt19937_64 rng(config.seed);
  Instance instance;
  instance.item_count = config.items;
  for (std::size_t b = 0; b < config.buyers; ++b) {
    instance.buyers.push_back(random_distribution(config.items, config.support, config.value_scale,
                                                  config.value_denominator, config.style, rng));
  }
  if (config.with_costs) {
    instance.costs = random_costs(config.items, std::max(1L, config.value_scale / 2), rng);
  }
  return instance;
}

LotteryMenu random_menu(std::size_t items, std::size_t options, long price_scale, std::mt19937_64& rng) {
  LotteryMenu menu{items, {}};
  std::vector<std::size_t> perm(items);
  for (std::size_t k = 0; k < options; ++k) {
    Lottery lottery(items, Rational(0));
    long budget = 4;
    for (std::size_t j = 0; j < items; ++j) {
      perm[j] = j;
    }
    std::shuffle(perm.begin(), perm.end(), rng);
    for (std::size_t j : perm) {
      const long quarters = uniform_int(rng, 0, budget);
      lottery[j] = make_rational(quarters, 4);
      budget -= quarters;
    }
    if (budget == 4) {
      lottery[perm.front()] = 1;
    }
    menu.options.push_back(MenuOption{std::move(lottery), Rational(uniform_int(rng, 0, price_scale))});
  }
  return menu;
}

CostVector random_costs(std::size_t items, long scale, std::mt19937_64& rng) {
  CostVector costs;
  for (std::size_t j = 0; j < items; ++j) {
    costs.push_back(Rational(uniform_int(rng, 0, scale)));
  }
  return costs;
}

namespace {

json rationals_to_json(const RationalVector& xs) {
  json out = json::array();
  for (const auto& x : xs) {
    out.push_back(to_string(x));
  }
  return out;
}

json prices_to_json(const ItemPricing& p) {
  json out = json::array();
  for (const auto& x : p.prices) {
    out.push_back(to_string(x));
  }
  return out;
}

[[noreturn]] void fail(const std::string& field, const std::string& what) {
  throw ParseError("field '" + field + "': " + what);
}

const json& member(const json& j, const char* key, const std::string& where) {
  if (!j.is_object()) {
    fail(where, "expected an object");
  }
  const auto it = j.find(key);
  if (it == j.end()) {
    fail(where.empty() ? key : where + "." + key, "missing");
  }
  return *it;
}

std::string scalar_text(const json& j, const std::string& field) {
  if (j.is_string()) {
    return j.get<std::string>();
  }
  if (j.is_number_integer()) {
    return j.dump();
  }
  fail(field, "expected a rational string such as \"1/4\" or an integer");
}

Rational rational_field(const json& j, const std::string& field) {
  try {
    return parse_rational(scalar_text(j, field));
  } catch (const std::invalid_argument& e) {
    fail(field, e.what());
  }
}

Price price_field(const json& j, const std::string& field) {
  try {
    return parse_price(scalar_text(j, field));
  } catch (const std::invalid_argument& e) {
    fail(field, e.what());
  }
}

RationalVector rational_array(const json& j, const std::string& field, std::size_t expected) {
  if (!j.is_array()) {
    fail(field, "expected an array");
  }
  if (j.size() != expected) {
    fail(field, "expected " + std::to_string(expected) + " entries, got " + std::to_string(j.size()));
  }
  RationalVector out;
  for (std::size_t k = 0; k < j.size(); ++k) {
    out.push_back(rational_field(j[k], field + "[" + std::to_string(k) + "]"));
  }
  return out;
}

ItemPricing price_array(const json& j, const std::string& field, std::size_t expected) {
  if (!j.is_array()) {
    fail(field, "expected an array");
  }
  if (j.size() != expected) {
    fail(field, "expected " + std::to_string(expected) + " entries, got " + std::to_string(j.size()));
  }
  ItemPricing out;
  for (std::size_t k = 0; k < j.size(); ++k) {
    out.prices.push_back(price_field(j[k], field + "[" + std::to_string(k) + "]"));
  }
  return out;
}

std::size_t count_field(const json& j, const std::string& field) {
  if (!j.is_number_unsigned() && !(j.is_number_integer() && j.get<long>() >= 0)) {
    fail(field, "expected a non-negative integer");
  }
  return j.get<std::size_t>();
}

}  // namespace

json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw ParseError("cannot open '" + path.string() + "'");
  }
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
}

namespace {

void write_file(const std::filesystem::path& path, const json& j) {
  std::ofstream out(path);
  if (!out) {
    throw std::runtime_error("cannot write '" + path.string() + "'");
  }
  out << j.dump(2) << '\n';
}

}  // namespace

json instance_to_json(const Instance& instance) {
  json out;
  out["m"] = instance.item_count;
  if (instance.costs) {
    out["costs"] = rationals_to_json(*instance.costs);
  }
  json buyers = json::array();
  for (const auto& dist : instance.buyers) {
    json types = json::array();
    for (const auto& t : dist.support) {
      types.push_back({{"values", rationals_to_json(t.values)}, {"prob", to_string(t.probability)}});
    }
    buyers.push_back({{"types", types}});
  }
  out["buyers"] = buyers;
  return out;
}

json menu_to_json(const LotteryMenu& menu) {
  json options = json::array();
  for (const auto& o : menu.options) {
    options.push_back({{"lottery", rationals_to_json(o.lottery)}, {"price", to_string(o.price)}});
  }
  return {{"m", menu.item_count}, {"options", options}};
}

json pricing_to_json(const RandomItemPricing& pricing) {
  if (pricing.atoms.size() == 1 && pricing.atoms.front().weight == 1) {
    return prices_to_json(pricing.atoms.front().pricing);
  }
  json atoms = json::array();
  for (const auto& a : pricing.atoms) {
    atoms.push_back({{"prices", prices_to_json(a.pricing)}, {"weight", to_string(a.weight)}});
  }
  return {{"atoms", atoms}};
}

json sequential_to_json(const SequentialPricing& seq) {
  json pricings = json::array();
  for (const auto& p : seq.pricings) {
    pricings.push_back(pricing_to_json(p));
  }
  return {{"order", seq.order}, {"pricings", pricings}};
}

Instance instance_from_json(const json& j) {
  Instance instance;
  instance.item_count = count_field(member(j, "m", ""), "m");
  if (j.contains("costs")) {
    instance.costs = rational_array(j["costs"], "costs", instance.item_count);
  }
  const json& buyers = member(j, "buyers", "");
  if (!buyers.is_array()) {
    fail("buyers", "expected an array");
  }
  for (std::size_t b = 0; b < buyers.size(); ++b) {
    const std::string bf = "buyers[" + std::to_string(b) + "]";
    const json& types = member(buyers[b], "types", bf);
    if (!types.is_array()) {
      fail(bf + ".types", "expected an array");
    }
    TypeDistribution dist{instance.item_count, {}};
    for (std::size_t t = 0; t < types.size(); ++t) {
      const std::string tf = bf + ".types[" + std::to_string(t) + "]";
      dist.support.push_back(WeightedType{rational_array(member(types[t], "values", tf), tf + ".values", instance.item_count),
                                          rational_field(member(types[t], "prob", tf), tf + ".prob")});
    }
    instance.buyers.push_back(std::move(dist));
  }
  return instance;
}

LotteryMenu menu_from_json(const json& j) {
  const json& options = member(j, "options", "");
  if (!options.is_array()) {
    fail("options", "expected an array");
  }
  LotteryMenu menu;
  if (j.contains("m")) {
    menu.item_count = count_field(j["m"], "m");
  } else if (!options.empty() && options[0].is_object() && options[0].contains("lottery") &&
             options[0]["lottery"].is_array()) {
    menu.item_count = options[0]["lottery"].size();
  } else {
    fail("m", "missing and not inferable from the options");
  }
  for (std::size_t k = 0; k < options.size(); ++k) {
    const std::string f = "options[" + std::to_string(k) + "]";
    menu.options.push_back(MenuOption{rational_array(member(options[k], "lottery", f), f + ".lottery", menu.item_count),
                                      rational_field(member(options[k], "price", f), f + ".price")});
  }
  return menu;
}

SequentialPricing sequential_from_json(const json& j, std::size_t item_count) {
  SequentialPricing seq;
  const json& order = member(j, "order", "");
  if (!order.is_array()) {
    fail("order", "expected an array");
  }
  for (std::size_t k = 0; k < order.size(); ++k) {
    seq.order.push_back(count_field(order[k], "order[" + std::to_string(k) + "]"));
  }
  const json& pricings = member(j, "pricings", "");
  if (!pricings.is_array()) {
    fail("pricings", "expected an array");
  }
  for (std::size_t b = 0; b < pricings.size(); ++b) {
    const std::string f = "pricings[" + std::to_string(b) + "]";
    const json& p = pricings[b];
    if (p.is_array()) {
      seq.pricings.push_back(RandomItemPricing::deterministic(price_array(p, f, item_count)));
      continue;
    }
    const json& atoms = member(p, "atoms", f);
    if (!atoms.is_array()) {
      fail(f + ".atoms", "expected an array");
    }
    RandomItemPricing random;
    for (std::size_t a = 0; a < atoms.size(); ++a) {
      const std::string af = f + ".atoms[" + std::to_string(a) + "]";
      random.atoms.push_back(PricingAtom{price_array(member(atoms[a], "prices", af), af + ".prices", item_count),
                                         rational_field(member(atoms[a], "weight", af), af + ".weight")});
    }
    seq.pricings.push_back(std::move(random));
  }
  return seq;
}

Instance read_instance(const std::filesystem::path& path) {
  Instance instance = instance_from_json(read_json_file(path));
  require_valid(validate_instance(instance), path.string());
  return instance;
}

void write_instance(const std::filesystem::path& path, const Instance& instance) {
  write_file(path, instance_to_json(instance));
}

LotteryMenu read_menu(const std::filesystem::path& path) {
  LotteryMenu menu = menu_from_json(read_json_file(path));
  require_valid(validate_menu(menu), path.string());
  return menu;
}

void write_menu(const std::filesystem::path& path, const LotteryMenu& menu) { write_file(path, menu_to_json(menu)); }

SequentialPricing read_sequential(const std::filesystem::path& path, const Instance& instance) {
  SequentialPricing seq = sequential_from_json(read_json_file(path), instance.item_count);
  check_sequential(instance, seq);
  return seq;
}

void write_sequential(const std::filesystem::path& path, const SequentialPricing& seq) {
  write_file(path, sequential_to_json(seq));
}

RationalVector parse_rational_list(const std::string& text) {
  RationalVector out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      out.push_back(parse_rational(item));
    } catch (const std::invalid_argument& e) {
      throw ParseError("list '" + text + "': " + e.what());
    }
  }
  if (out.empty()) {
    throw ParseError("empty rational list");
  }
  return out;
}

bool operator==(const Instance& a, const Instance& b) {
  if (a.item_count != b.item_count || a.costs != b.costs || a.buyers.size() != b.buyers.size()) {
    return false;
  }
  for (std::size_t i = 0; i < a.buyers.size(); ++i) {
    const auto& x = a.buyers[i].support;
    const auto& y = b.buyers[i].support;
    if (a.buyers[i].item_count != b.buyers[i].item_count || x.size() != y.size()) {
      return false;
    }
    for (std::size_t t = 0; t < x.size(); ++t) {
      if (x[t].values != y[t].values || x[t].probability != y[t].probability) {
        return false;
      }
    }
  }
  return true;
}

bool operator==(const LotteryMenu& a, const LotteryMenu& b) {
  if (a.item_count != b.item_count || a.options.size() != b.options.size()) {
    return false;
  }
  for (std::size_t k = 0; k < a.options.size(); ++k) {
    if (a.options[k].lottery != b.options[k].lottery || a.options[k].price != b.options[k].price) {
      return false;
    }
  }
  return true;
}

}  // namespace mechlab
