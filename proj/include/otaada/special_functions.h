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

#ifndef OTAADA_SPECIAL_FUNCTIONS_H_
#define OTAADA_SPECIAL_FUNCTIONS_H_

// Real Lambert W branches and a bracketing root finder.
//
// Both Lambert branches are computed from the logarithmic form of
// w * exp(w) = x. Writing x = -exp(-(1 + s)) with s >= 0 and w = -(1 + eps),
// the defining equation becomes
//
//   eps - log1p(eps) = s,
//
// with eps >= 0 on the W_{-1} branch and eps in (-1, 0] on the W_0 branch.
// This form never forms exp(w), so W_{-1} is available for arguments whose
// magnitude is far below the smallest double, and callers that know s
// directly (the bound formulas, where s = k / (n sigma^2)) keep full relative
// precision near the branch point.

#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>
#include <utility>

#include "otaada/errors.h"
#include "otaada/tolerances.h"

namespace otaada {

// A sign-changing bracket [lo, hi] and the absolute bracket width at which the
// search may stop.
struct BracketedRoot {
  double lo = 0.0;
  double hi = 0.0;
  double tolerance = 1e-12;
};

namespace internal {

inline constexpr double kInvE = 1.0 / std::numbers::e;

// 1 + e x at or below this is the branch point: the rounding of e and 1/e
// alone leaves a residue of a few ulps.
inline constexpr double kBranchDelta = 4.0 * std::numeric_limits<double>::epsilon();

// eps - log1p(eps) without cancellation for small |eps|.
inline double EpsMinusLog1p(double eps) {
  if (std::abs(eps) < 0.1) {
    // eps^2 * sum_{j>=0} (-eps)^j / (j + 2)
    double sum = 0.0;
    double power = 1.0;
    for (int j = 0; j < 40; ++j) {
      const double term = power / (j + 2);
      sum += term;
      if (std::abs(term) < 1e-18 * std::abs(sum)) break;
      power *= -eps;
    }
    return eps * eps * sum;
  }
  return eps - std::log1p(eps);
}

// Solves eps - log1p(eps) = s for eps >= 0 (W_{-1} side).
inline double SolveUpperEps(double s) {
  if (s == 0.0) return 0.0;
  double eps;
  if (s < 2.0) {
    const double p = std::sqrt(2.0 * s);
    eps = p * (1.0 + p * (1.0 / 3.0 + p * (1.0 / 36.0 +
                                           p * (-1.0 / 270.0 + p / 4320.0))));
  } else {
    const double t = 1.0 + s;
    eps = t + std::log(t + std::log(t)) - 1.0;
  }
  for (int iter = 0; iter < 100; ++iter) {
    const double h = EpsMinusLog1p(eps) - s;
    const double d1 = eps / (1.0 + eps);
    const double d2 = 1.0 / ((1.0 + eps) * (1.0 + eps));
    const double step = h / (d1 - h * d2 / (2.0 * d1));
    double next = eps - step;
    if (next <= 0.0) next = 0.5 * eps;
    const bool done = std::abs(next - eps) <=
                      4.0 * std::numeric_limits<double>::epsilon() * next;
    eps = next;
    if (done) break;
  }
  return eps;
}

}  // namespace internal

// Returns -1 - W_{-1}(-exp(-(1 + s))) for s >= 0, i.e. the distance of the
// lower branch below -1. Returning the excess instead of W keeps the relative
// precision of 1 + W when s is small.
inline double LambertWMinus1ExpFormExcess(double s) {
  if (!(s >= 0.0) || std::isinf(s)) {
    std::ostringstream msg;
    msg << "LambertWMinus1ExpForm: shift must be finite and >= 0, got " << s;
    throw DomainError(msg.str());
  }
  return internal::SolveUpperEps(s);
}

// W_{-1}(-exp(-(1 + s))) for s >= 0. Defined for every finite s, including
// those for which the argument itself underflows to zero.
inline double LambertWMinus1ExpForm(double s) {
  return -(1.0 + LambertWMinus1ExpFormExcess(s));
}

// Principal branch W_0(x) for x >= -1/e.
inline double LambertW0(double x) {
  using internal::kInvE;
  if (std::isnan(x) || x < -kInvE - tolerance::kBranchSlack) {
    std::ostringstream msg;
    msg << "LambertW0: argument " << x << " is below the branch point -1/e";
    throw DomainError(msg.str());
  }
  if (std::isinf(x)) return x;
  const double delta = std::fma(std::numbers::e, x, 1.0);
  if (delta <= internal::kBranchDelta) return -1.0;
  if (x == 0.0) return 0.0;
  if (std::abs(x) < 1e-8) return x * (1.0 - x * (1.0 - 1.5 * x));

  if (x > 100.0) {
    // Newton on w + ln(w) = ln(x); exp(w) is never formed.
    const double lx = std::log(x);
    double w = lx - std::log(lx) + std::log(lx) / lx;
    for (int iter = 0; iter < 100; ++iter) {
      const double step = (w + std::log(w) - lx) / (1.0 + 1.0 / w);
      w -= step;
      if (std::abs(step) <= 4.0 * std::numeric_limits<double>::epsilon() * w)
        break;
    }
    return w;
  }

  double w;
  if (delta < 0.25) {
    const double p = std::sqrt(2.0 * delta);
    w = -1.0 + p * (1.0 + p * (-1.0 / 3.0 + p * 11.0 / 72.0));
  } else if (x < 3.0) {
    w = std::log1p(x) * (x < 0.0 ? 1.1 : 0.8);
  } else {
    const double l1 = std::log(x);
    const double l2 = std::log(l1);
    w = l1 - l2 + l2 / l1;
  }
  // Halley on w * exp(w) - x.
  for (int iter = 0; iter < 100; ++iter) {
    const double ew = std::exp(w);
    const double f = w * ew - x;
    const double wp1 = w + 1.0;
    if (wp1 == 0.0) break;
    const double step = f / (ew * wp1 - (w + 2.0) * f / (2.0 * wp1));
    double next = w - step;
    if (next < -1.0) next = 0.5 * (w - 1.0);
    const bool done = std::abs(next - w) <=
                      4.0 * std::numeric_limits<double>::epsilon() *
                          std::max(std::abs(next), 1e-300);
    w = next;
    if (done) break;
  }
  return w;
}

// Lower branch W_{-1}(x) for -1/e <= x < 0.
inline double LambertWMinus1(double x) {
  using internal::kInvE;
  if (std::isnan(x) || x >= 0.0 || x < -kInvE - tolerance::kBranchSlack) {
    std::ostringstream msg;
    msg << "LambertWMinus1: argument " << x << " is outside [-1/e, 0)";
    throw DomainError(msg.str());
  }
  const double delta = std::fma(std::numbers::e, x, 1.0);
  if (delta <= internal::kBranchDelta) return -1.0;
  // x = -exp(-(1 + s)), i.e. s = -1 - ln(-x) = -log1p(-delta).
  const double s = delta < 0.5 ? -std::log1p(-delta) : -1.0 - std::log(-x);
  return LambertWMinus1ExpForm(s);
}

// Brent's method on a sign-changing bracket. Deterministic for a fixed f and
// bracket. Throws RootFindingError when f does not change sign or when the
// iteration cap is hit (the error carries the best bracket).
template <typename F>
double FindRoot(F&& f, const BracketedRoot& bracket,
                int max_iterations = tolerance::kRootMaxIterations) {
  if (!(bracket.lo < bracket.hi) || !std::isfinite(bracket.lo) ||
      !std::isfinite(bracket.hi) || !(bracket.tolerance > 0.0)) {
    std::ostringstream msg;
    msg << "FindRoot: invalid bracket [" << bracket.lo << ", " << bracket.hi
        << "] with tolerance " << bracket.tolerance;
    throw InvalidArgumentError(msg.str());
  }
  constexpr double kEps = std::numeric_limits<double>::epsilon();
  double a = bracket.lo;
  double b = bracket.hi;
  double fa = f(a);
  double fb = f(b);
  if (fa == 0.0) return a;
  if (fb == 0.0) return b;
  if ((fa > 0.0) == (fb > 0.0) || std::isnan(fa) || std::isnan(fb)) {
    std::ostringstream msg;
    msg << "FindRoot: no sign change on [" << a << ", " << b << "] (f = " << fa
        << ", " << fb << ")";
    throw RootFindingError(msg.str(), a, b);
  }
  double c = b;
  double fc = fb;
  double d = b - a;
  double e = d;
  for (int iter = 0; iter < max_iterations; ++iter) {
    if ((fb > 0.0) == (fc > 0.0)) {
      c = a;
      fc = fa;
      d = b - a;
      e = d;
    }
    if (std::abs(fc) < std::abs(fb)) {
      a = b;
      b = c;
      c = a;
      fa = fb;
      fb = fc;
      fc = fa;
    }
    const double tol1 = 2.0 * kEps * std::abs(b) + 0.5 * bracket.tolerance;
    const double xm = 0.5 * (c - b);
    if (std::abs(xm) <= tol1 || fb == 0.0) return b;
    if (std::abs(e) >= tol1 && std::abs(fa) > std::abs(fb)) {
      // Inverse quadratic interpolation, or secant when only two points.
      const double s = fb / fa;
      double p;
      double q;
      if (a == c) {
        p = 2.0 * xm * s;
        q = 1.0 - s;
      } else {
        const double qa = fa / fc;
        const double r = fb / fc;
        p = s * (2.0 * xm * qa * (qa - r) - (b - a) * (r - 1.0));
        q = (qa - 1.0) * (r - 1.0) * (s - 1.0);
      }
      if (p > 0.0) q = -q;
      p = std::abs(p);
      const double min1 = 3.0 * xm * q - std::abs(tol1 * q);
      const double min2 = std::abs(e * q);
      if (2.0 * p < std::min(min1, min2)) {
        e = d;
        d = p / q;
      } else {
        d = xm;
        e = d;
      }
    } else {
      d = xm;
      e = d;
    }
    a = b;
    fa = fb;
    b += std::abs(d) > tol1 ? d : std::copysign(tol1, xm);
    fb = f(b);
  }
  // The sign change after the last step is between b and either c or the
  // previous iterate a.
  const double other = (fb > 0.0) == (fc > 0.0) ? a : c;
  const double lo = std::min(b, other);
  const double hi = std::max(b, other);
  std::ostringstream msg;
  msg << "FindRoot: no convergence after " << max_iterations
      << " iterations; best bracket [" << lo << ", " << hi << "]";
  throw RootFindingError(msg.str(), lo, hi);
}

}  // namespace otaada

#endif  // OTAADA_SPECIAL_FUNCTIONS_H_
