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

#ifndef OTAADA_TOLERANCES_H_
#define OTAADA_TOLERANCES_H_

// Numerical tolerances shared by the library and its tests.
namespace otaada::tolerance {

// Slack allowed below the Lambert W branch point -1/e.
inline constexpr double kBranchSlack = 1e-15;

// Relative accuracy targeted by the Lambert W evaluations.
inline constexpr double kLambertRelative = 1e-12;

// Residual accuracy promised by root-found quantities (g_inverse, s_opt).
inline constexpr double kRootResidual = 1e-9;

// Bracket width, relative to |x|, at which the internal root finds stop.
// Tighter than kRootResidual so composed quantities keep their accuracy.
inline constexpr double kRootBracketRelative = 1e-14;

// Iteration cap for bracketing root finders.
inline constexpr int kRootMaxIterations = 300;

// Closed-form evaluations compared against brute-force oracles.
inline constexpr double kOracleRelative = 1e-5;

// Lower end of the c bracket searched by g_inverse.
inline constexpr double kGInverseLowerC = 1e-12;

}  // namespace otaada::tolerance

#endif  // OTAADA_TOLERANCES_H_
