// Copyright 2026 The Lyre Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "lyre/rational.hpp"

#include <charconv>

#include "lyre/error.hpp"

namespace lyre {

namespace {

std::int64_t parse_int(std::string_view text, std::string_view whole) {
  std::int64_t value = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size() || text.empty()) {
    throw ParseError("invalid rational '" + std::string(whole) + "'");
  }
  return value;
}

}  // namespace

Rational parse_rational(std::string_view text) {
  if (auto slash = text.find('/'); slash != std::string_view::npos) {
    std::int64_t num = parse_int(text.substr(0, slash), text);
    std::int64_t den = parse_int(text.substr(slash + 1), text);
    if (den == 0) throw ParseError("zero denominator in '" + std::string(text) + "'");
    return Rational(num, den);
  }
  if (auto dot = text.find('.'); dot != std::string_view::npos) {
    std::string_view whole = text.substr(0, dot);
    std::string_view frac = text.substr(dot + 1);
    if (frac.size() > 12) throw ParseError("too many decimals in '" + std::string(text) + "'");
    bool negative = !whole.empty() && whole.front() == '-';
    if (negative) whole.remove_prefix(1);
    std::int64_t scale = 1;
    for (std::size_t i = 0; i < frac.size(); ++i) scale *= 10;
    std::int64_t ipart = whole.empty() ? 0 : parse_int(whole, text);
    std::int64_t fpart = frac.empty() ? 0 : parse_int(frac, text);
    Rational value(ipart * scale + fpart, scale);
    return negative ? -value : value;
  }
  return Rational(parse_int(text, text));
}

std::string to_string(const Rational& value) {
  if (value.denominator() == 1) return std::to_string(value.numerator());
  return std::to_string(value.numerator()) + "/" + std::to_string(value.denominator());
}

double to_double(const Rational& value) {
  return static_cast<double>(value.numerator()) / static_cast<double>(value.denominator());
}

Rational floor_mod(const Rational& value, const Rational& modulus) {
  Rational q = value / modulus;
  std::int64_t k = q.numerator() / q.denominator();
  if (q.numerator() < 0 && q.numerator() % q.denominator() != 0) --k;
  return value - modulus * Rational(k);
}

}  // namespace lyre
