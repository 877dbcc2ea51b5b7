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

#include "fairlab/rational.h"

#include <random>

#include <gtest/gtest.h>

namespace fairlab {
namespace {

TEST(ParseRationalTest, Fractions) {
  EXPECT_EQ(parse_rational("7/72"), Rational(7, 72));
  EXPECT_EQ(parse_rational("-3"), Rational(-3));
  EXPECT_EQ(parse_rational("22/72"), Rational(11, 36));
}

TEST(ParseRationalTest, DecimalsAreExact) {
  EXPECT_EQ(parse_rational("0.01"), Rational(1, 100));
  EXPECT_EQ(parse_rational("2.5e-3"), Rational(1, 400));
  EXPECT_EQ(parse_rational("-1.25"), Rational(-5, 4));
}

TEST(ParseRationalTest, RejectsGarbage) {
  EXPECT_THROW(parse_rational("abc"), std::invalid_argument);
  EXPECT_THROW(parse_rational("1/0"), std::invalid_argument);
  EXPECT_THROW(parse_rational(""), std::invalid_argument);
}

TEST(RationalFromDoubleTest, UsesShortestDecimal) {
  EXPECT_EQ(rational_from_double(0.01), Rational(1, 100));
  EXPECT_EQ(rational_from_double(0.5), Rational(1, 2));
  EXPECT_THROW(rational_from_double(std::numeric_limits<double>::infinity()),
               std::invalid_argument);
}

TEST(RationalFromDoubleTest, RoundTripsThroughDouble) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-10.0, 10.0);
  for (int t = 0; t < 1000; ++t) {
    const double x = u(rng);
    EXPECT_EQ(to_double(rational_from_double(x)), x);
  }
}

TEST(RationalToStringTest, Format) {
  EXPECT_EQ(to_string(Rational(7, 72)), "7/72");
  EXPECT_EQ(to_string(Rational(3)), "3");
  EXPECT_EQ(parse_rational(to_string(Rational(-22, 7))), Rational(-22, 7));
}

}  // namespace
}  // namespace fairlab
