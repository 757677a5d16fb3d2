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

#include "mechlab/rational.hpp"

#include <cctype>
#include <cmath>

namespace mechlab {

Rational make_rational(long numerator, long denominator) {
  if (denominator == 0) {
    throw std::invalid_argument("zero denominator");
  }
  Rational r(numerator, denominator);
  r.canonicalize();
  return r;
}

namespace {

bool is_integer_text(std::string_view s) {
  if (s.empty()) {
    return false;
  }
  std::size_t i = (s[0] == '-' || s[0] == '+') ? 1 : 0;
  if (i == s.size()) {
    return false;
  }
  for (; i < s.size(); ++i) {
    if (!std::isdigit(static_cast<unsigned char>(s[i]))) {
      return false;
    }
  }
  return true;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) {
    s.remove_prefix(1);
  }
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) {
    s.remove_suffix(1);
  }
  return s;
}

}  // namespace

Rational parse_rational(std::string_view text) {
  const std::string_view s = trim(text);
  const auto slash = s.find('/');
  const std::string_view num = s.substr(0, slash);
  const std::string_view den = slash == std::string_view::npos ? std::string_view("1") : s.substr(slash + 1);
  if (!is_integer_text(num) || !is_integer_text(den) || den.front() == '-' || den.front() == '+') {
    throw std::invalid_argument("malformed rational '" + std::string(text) + "'");
  }
  mpz_class n{std::string(num.front() == '+' ? num.substr(1) : num)};
  mpz_class d{std::string(den)};
  if (d == 0) {
    throw std::invalid_argument("zero denominator in '" + std::string(text) + "'");
  }
  Rational r(n, d);
  r.canonicalize();
  return r;
}

std::string to_string(const Rational& value) {
  if (value.get_den() == 1) {
    return value.get_num().get_str();
  }
  return value.get_str();
}

double to_double(const Rational& value) { return value.get_d(); }

Rational from_double(double value) {
  if (!std::isfinite(value)) {
    throw std::invalid_argument("non-finite double");
  }
  Rational r(value);
  r.canonicalize();
  return r;
}

Rational dot(std::span<const Rational> a, std::span<const Rational> b) {
  if (a.size() != b.size()) {
    throw std::invalid_argument("dot: dimension mismatch");
  }
  Rational acc = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (sgn(a[i]) != 0 && sgn(b[i]) != 0) {
      acc += a[i] * b[i];
    }
  }
  return acc;
}

Rational sum(std::span<const Rational> values) {
  Rational acc = 0;
  for (const auto& v : values) {
    acc += v;
  }
  return acc;
}

const Rational& Price::value() const {
  if (!value_) {
    throw std::logic_error("value() of an infinite price");
  }
  return *value_;
}

bool operator==(const Price& a, const Price& b) {
  if (a.is_finite() != b.is_finite()) {
    return false;
  }
  return a.is_infinite() || *a.value_ == *b.value_;
}

std::strong_ordering operator<=>(const Price& a, const Price& b) {
  if (a.is_infinite() && b.is_infinite()) {
    return std::strong_ordering::equal;
  }
  if (a.is_infinite()) {
    return std::strong_ordering::greater;
  }
  if (b.is_infinite()) {
    return std::strong_ordering::less;
  }
  const int c = cmp(*a.value_, *b.value_);
  return c < 0 ? std::strong_ordering::less : c > 0 ? std::strong_ordering::greater : std::strong_ordering::equal;
}

Price min(const Price& a, const Price& b) { return b < a ? b : a; }

std::string to_string(const Price& price) { return price.is_finite() ? to_string(price.value()) : "inf"; }

Price parse_price(std::string_view text) {
  const std::string_view s = trim(text);
  if (s == "inf" || s == "Infinity" || s == "+inf") {
    return Price::infinity();
  }
  return Price(parse_rational(s));
}

}  // namespace mechlab
