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

#include <gmpxx.h>

#include <compare>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace mechlab {

/// Exact rational number. Always kept in canonical form (reduced, positive
/// denominator); every constructor path in this library canonicalizes.
using Rational = mpq_class;
using RationalVector = std::vector<Rational>;

Rational make_rational(long numerator, long denominator = 1);

/// Parses "n", "-n" or "n/d". Throws std::invalid_argument on malformed text
/// or a zero denominator.
Rational parse_rational(std::string_view text);

/// "n" for integers, "n/d" otherwise.
std::string to_string(const Rational& value);

double to_double(const Rational& value);

/// Exact conversion of a finite double.
Rational from_double(double value);

Rational dot(std::span<const Rational> a, std::span<const Rational> b);
Rational sum(std::span<const Rational> values);

/// Rational extended with +infinity. Used for item prices (an infinite price
/// withholds the item) and for cheapest-acquisition prices.
class Price {
 public:
  Price() = default;  // +infinity
  Price(Rational value) : value_(std::move(value)) {}  // NOLINT(google-explicit-constructor)
  Price(long value) : value_(Rational(value)) {}       // NOLINT(google-explicit-constructor)

  static Price infinity() { return Price(); }

  bool is_finite() const { return value_.has_value(); }
  bool is_infinite() const { return !value_.has_value(); }

  /// Throws std::logic_error when infinite.
  const Rational& value() const;

  friend bool operator==(const Price& a, const Price& b);
  friend std::strong_ordering operator<=>(const Price& a, const Price& b);

 private:
  std::optional<Rational> value_;
};

Price min(const Price& a, const Price& b);

/// "inf" or the rational text.
std::string to_string(const Price& price);
Price parse_price(std::string_view text);

}  // namespace mechlab
