// Copyright 2026 The otaada Authors
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

#include "otaada/special_functions.h"

#include <cmath>
#include <limits>
#include <numbers>
#include <random>

#include "gtest/gtest.h"
#include "oracles.h"

namespace otaada {
namespace {

constexpr double kInvE = 1.0 / std::numbers::e;

// Frozen from testing::BisectProductLog(-0.1, -20, -1).
constexpr double kWm1AtMinusTenth = -3.577152063957297;

TEST(LambertW0Test, KnownValues) {
  EXPECT_EQ(LambertW0(0.0), 0.0);
  EXPECT_NEAR(LambertW0(std::numbers::e), 1.0, 1e-15);
  EXPECT_DOUBLE_EQ(LambertW0(-kInvE), -1.0);
}

TEST(LambertW0Test, SmallArgumentsAreAbsolutelyAccurate) {
  for (double x : {1e-14, -1e-14, 1e-9, -1e-9, 1e-6, -1e-6}) {
    const double w = LambertW0(x);
    EXPECT_NEAR(w * std::exp(w), x, 1e-12 * std::abs(x)) << x;
  }
}

TEST(LambertW0Test, LargeArguments) {
  for (double x : {1e3, 1e10, 1e100, 1e300}) {
    const double w = LambertW0(x);
    EXPECT_NEAR(w + std::log(w), std::log(x), 1e-12 * std::log(x)) << x;
  }
}

TEST(LambertW0Test, RejectsBelowBranchPoint) {
  EXPECT_THROW(LambertW0(-kInvE - 1e-10), DomainError);
  EXPECT_NO_THROW(LambertW0(-kInvE - 1e-16));
}

TEST(LambertWMinus1Test, KnownValues) {
  EXPECT_DOUBLE_EQ(LambertWMinus1(-kInvE), -1.0);
  const double oracle = testing::BisectProductLog(-0.1, -20.0, -1.0);
  EXPECT_NEAR(oracle, kWm1AtMinusTenth, 1e-13);
  EXPECT_NEAR(LambertWMinus1(-0.1), kWm1AtMinusTenth,
              1e-12 * std::abs(kWm1AtMinusTenth));
}

TEST(LambertWMinus1Test, TinyArgumentResidual) {
  const double x = -1e-8;
  const double w = LambertWMinus1(x);
  EXPECT_LE(std::abs(w * std::exp(w) - x) / 1e-8, 1e-9);
  EXPECT_LT(w, -1.0);
}

TEST(LambertWMinus1Test, ArgumentsThatUnderflowExpW) {
  // exp(w) underflows for w < -745; the log form still converges.
  const double x = -std::numeric_limits<double>::denorm_min();
  const double w = LambertWMinus1(x);
  EXPECT_NEAR(w + std::log(-w), std::log(-x), 1e-12 * std::abs(w));
}

TEST(LambertWMinus1Test, RejectsOutsideDomain) {
  EXPECT_THROW(LambertWMinus1(0.0), DomainError);
  EXPECT_THROW(LambertWMinus1(0.5), DomainError);
  EXPECT_THROW(LambertWMinus1(-kInvE - 1e-10), DomainError);
  EXPECT_NO_THROW(LambertWMinus1(-kInvE - 1e-16));
}

TEST(LambertWMinus1Test, ExpFormHandlesHugeShifts) {
  // W_{-1}(-exp(-1001)): the argument is 0 in double precision.
  const double w = LambertWMinus1ExpForm(1000.0);
  EXPECT_NEAR(-w - std::log(-w), 1001.0, 1e-12 * 1001.0);
  EXPECT_EQ(LambertWMinus1ExpForm(0.0), -1.0);
  EXPECT_THROW(LambertWMinus1ExpForm(-1e-3), DomainError);
}

TEST(LambertWMinus1Test, ExpFormExcessKeepsPrecisionNearBranch) {
  // eps - log1p(eps) = s with eps ~ sqrt(2 s); compare with the series
  // eps = p + p^2/3 + p^3/36 (p = sqrt(2 s)) whose truncation error is
  // O(p^4).
  const double s = 1e-20;
  const double p = std::sqrt(2.0 * s);
  const double series = p + p * p / 3.0 + p * p * p / 36.0;
  EXPECT_NEAR(LambertWMinus1ExpFormExcess(s), series, 1e-14 * series);
}

TEST(LambertWPropertyTest, W0RoundTrip) {
  std::mt19937_64 rng(20261018);
  std::uniform_real_distribution<double> dist(-1.0, 20.0);
  for (int i = 0; i < 1000; ++i) {
    const double w = dist(rng);
    const double back = LambertW0(w * std::exp(w));
    EXPECT_NEAR(back, w, 1e-10 * std::max(std::abs(w), 1e-300)) << w;
  }
}

TEST(LambertWPropertyTest, WMinus1RoundTrip) {
  std::mt19937_64 rng(77);
  std::uniform_real_distribution<double> dist(-40.0, -1.0);
  for (int i = 0; i < 1000; ++i) {
    const double w = dist(rng);
    const double x = w * std::exp(w);
    if (x == 0.0) continue;
    EXPECT_NEAR(LambertWMinus1(x), w, 1e-10 * std::abs(w)) << w;
  }
}

TEST(LambertWPropertyTest, BranchOrdering) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> dist(-kInvE, 0.0);
  for (int i = 0; i < 1000; ++i) {
    const double x = dist(rng);
    if (x == -kInvE || x == 0.0) continue;
    const double lower = LambertWMinus1(x);
    const double upper = LambertW0(x);
    EXPECT_LT(lower, -1.0) << x;
    EXPECT_GT(upper, -1.0) << x;
    EXPECT_LT(upper, 0.0) << x;
  }
}

TEST(LambertWPropertyTest, WMinus1StrictlyDecreasing) {
  double previous = LambertWMinus1(-kInvE * (1.0 - 1e-9));
  for (int i = 1; i <= 2000; ++i) {
    const double x = -kInvE * (1.0 - 1e-9) * std::pow(1e-6, i / 2000.0);
    const double w = LambertWMinus1(x);
    EXPECT_LT(w, previous) << x;
    previous = w;
  }
}

TEST(FindRootTest, Examples) {
  EXPECT_NEAR(FindRoot([](double x) { return x - 2.0; },
                       BracketedRoot{0.0, 5.0, 1e-12}),
              2.0, 1e-12);
  EXPECT_NEAR(FindRoot([](double x) { return x * std::exp(x) + 0.1; },
                       BracketedRoot{-20.0, -1.0, 1e-13}),
              kWm1AtMinusTenth, 1e-10);
  EXPECT_NEAR(FindRoot([](double x) { return x * x - 2.0; },
                       BracketedRoot{0.0, 2.0, 1e-12}),
              std::numbers::sqrt2, 1e-11);
}

TEST(FindRootTest, Deterministic) {
  auto f = [](double x) { return std::cos(x) - x; };
  const BracketedRoot bracket{0.0, 1.0, 1e-15};
  EXPECT_EQ(FindRoot(f, bracket), FindRoot(f, bracket));
}

TEST(FindRootTest, NoSignChange) {
  try {
    FindRoot([](double x) { return x * x + 1.0; },
             BracketedRoot{-1.0, 1.0, 1e-12});
    FAIL() << "expected RootFindingError";
  } catch (const RootFindingError& e) {
    EXPECT_EQ(e.lo(), -1.0);
    EXPECT_EQ(e.hi(), 1.0);
  }
}

TEST(FindRootTest, NonConvergenceReportsBracket) {
  try {
    FindRoot([](double x) { return x < 0.3 ? -1.0 : 1.0; },
             BracketedRoot{0.0, 1.0, 1e-300}, 5);
    FAIL() << "expected RootFindingError";
  } catch (const RootFindingError& e) {
    EXPECT_LE(e.lo(), 0.3);
    EXPECT_GE(e.hi(), 0.3);
  }
}

TEST(FindRootTest, RejectsInvalidBracket) {
  auto f = [](double x) { return x; };
  EXPECT_THROW(FindRoot(f, BracketedRoot{1.0, 0.0, 1e-9}),
               InvalidArgumentError);
  EXPECT_THROW(FindRoot(f, BracketedRoot{-1.0, 1.0, 0.0}),
               InvalidArgumentError);
}

}  // namespace
}  // namespace otaada
