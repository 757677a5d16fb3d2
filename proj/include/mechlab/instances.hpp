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
#include "mechlab/sequential.hpp"

#include "json.hpp"

#include <cstdint>
#include <filesystem>
#include <random>
#include <string>

namespace mechlab {

/// Single buyer with costs (0, m, ..., m). Type i in 2..m values item 1 at 2^i
/// and item i at m, with probability 2^-i; the rest of the mass is the zero
/// type. Option i sells item 1 and item i with probability 1/2 each at
/// 2^(i-1) + m/2 - epsilon.
struct GapInstance {
  Instance instance;
  LotteryMenu menu;
  /// Sum over i of 2^-i * 2^(i-1) = (m - 1) / 2, assuming type i buys option i.
  Rational analytic_profit;
};

/// Throws std::invalid_argument when m < 2 or m > kMaxItems.
GapInstance gap_instance(std::size_t m, const Rational& epsilon = 0);

enum class CorrelationStyle { Independent, Comonotone, Antithetic };

std::string to_string(CorrelationStyle style);
/// "independent", "comonotone" or "antithetic".
CorrelationStyle parse_correlation_style(const std::string& text);

struct RandomInstanceConfig {
  std::size_t buyers = 1;
  std::size_t items = 2;
  std::size_t support = 2;
  /// Values are multiples of 1/value_denominator in [0, value_scale].
  long value_scale = 8;
  long value_denominator = 1;
  CorrelationStyle style = CorrelationStyle::Independent;
  std::uint64_t seed = 0;
  bool with_costs = false;
};

/// Deterministic in the config. Type probabilities are integer weights in
/// 1..4 normalized.
Instance random_instance(const RandomInstanceConfig& config);

TypeDistribution random_distribution(std::size_t items, std::size_t support, long value_scale, long value_denominator,
                                     CorrelationStyle style, std::mt19937_64& rng);

/// `options` random lotteries (entries multiples of 1/4, mass <= 1) with
/// integer prices in [0, price_scale]; not closed under buy-many.
LotteryMenu random_menu(std::size_t items, std::size_t options, long price_scale, std::mt19937_64& rng);

/// Integer costs in [0, scale].
CostVector random_costs(std::size_t items, long scale, std::mt19937_64& rng);

/// Uniform integer in [lo, hi].
long uniform_int(std::mt19937_64& rng, long lo, long hi);

nlohmann::json instance_to_json(const Instance& instance);
nlohmann::json menu_to_json(const LotteryMenu& menu);
nlohmann::json sequential_to_json(const SequentialPricing& seq);
nlohmann::json pricing_to_json(const RandomItemPricing& pricing);

/// Throw ParseError naming the offending field. Semantic invariants are not
/// checked here.
Instance instance_from_json(const nlohmann::json& j);
LotteryMenu menu_from_json(const nlohmann::json& j);
SequentialPricing sequential_from_json(const nlohmann::json& j, std::size_t item_count);

/// Parses a JSON file; ParseError carries the path and position.
nlohmann::json read_json_file(const std::filesystem::path& path);

/// File round trips. Readers throw ParseError on malformed text or fields and
/// std::invalid_argument listing violated invariants.
Instance read_instance(const std::filesystem::path& path);
void write_instance(const std::filesystem::path& path, const Instance& instance);
LotteryMenu read_menu(const std::filesystem::path& path);
void write_menu(const std::filesystem::path& path, const LotteryMenu& menu);
SequentialPricing read_sequential(const std::filesystem::path& path, const Instance& instance);
void write_sequential(const std::filesystem::path& path, const SequentialPricing& seq);

/// Comma-separated rationals, e.g. "0,4,1/2".
RationalVector parse_rational_list(const std::string& text);

bool operator==(const Instance& a, const Instance& b);
bool operator==(const LotteryMenu& a, const LotteryMenu& b);

}  // namespace mechlab
