// Copyright 2026 The Fairlab Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef FAIRLAB_RATIONAL_H_
#define FAIRLAB_RATIONAL_H_

#include <string>
#include <string_view>

#include <boost/multiprecision/cpp_int.hpp>

namespace fairlab {

using Rational = boost::multiprecision::cpp_rational;

// Parses "7/72", "-3", "0.01", "2.5e-3" exactly. Throws std::invalid_argument.
Rational parse_rational(std::string_view text);

// Exact rational value of a finite double, via its shortest round-trip
// decimal form (so 0.01 becomes 1/100, not the nearest binary fraction).
Rational rational_from_double(double value);

inline double to_double(const Rational& r) { return r.convert_to<double>(); }
inline double to_double(double x) { return x; }

// "7/72" or "3" for integers.
std::string to_string(const Rational& r);

}  // namespace fairlab

#endif  // FAIRLAB_RATIONAL_H_
