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

#ifndef LYRE_RATIONAL_HPP_
#define LYRE_RATIONAL_HPP_

#include <cstdint>
#include <string>
#include <string_view>

#include <boost/rational.hpp>

namespace boost {

// Under C++20 rewritten comparisons, boost's mixed rational/int operator==
// selects its own reversed form and recurses forever. Exact, non-template
// overloads are preferred over both candidates.
inline bool operator==(const rational<std::int64_t>& a, int b) { return a.denominator() == 1 && a.numerator() == b; }
inline bool operator==(int b, const rational<std::int64_t>& a) { return a == b; }

}  // namespace boost

namespace lyre {

// Exact musical time in quarter-note units.
using Rational = boost::rational<std::int64_t>;

// Parses "3", "1/2" or a finite decimal such as "0.75".
Rational parse_rational(std::string_view text);

// Formats as "n" or "n/d".
std::string to_string(const Rational& value);

double to_double(const Rational& value);

// Largest value r with 0 <= r < modulus and value = k * modulus + r.
Rational floor_mod(const Rational& value, const Rational& modulus);

}  // namespace lyre

#endif  // LYRE_RATIONAL_HPP_
