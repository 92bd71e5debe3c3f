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

#ifndef OTAADA_BOUNDS_H_
#define OTAADA_BOUNDS_H_

// Accuracy and query-budget bounds for the Gaussian answering mechanism, and
// their mapping onto point-to-point and over-the-air federated channels.
//
// All sigma arguments below are on the normalized scale (answers in [0,1]),
// i.e. the physical channel noise divided by the transmit amplitude. Use
// ToEquivalent() to get there from a SystemConfig.
//
// Notation used in comments:
//   c       = k / (n sigma^2)
//   f(l, c) = (c - ln(1 - l)) / l
//   g(c)    = min over l in (0,1) of f(l, c)
//   k1      = n sigma^2 g^{-1}(n alpha^2 beta / 2)
//   k2      = (beta / 4) exp(alpha^2 / (8 sigma^2))
//   k       = min(k1, k2)

#include <cmath>
#include <cstdint>
#include <limits>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "otaada/errors.h"
#include "otaada/special_functions.h"
#include "otaada/tolerances.h"

namespace otaada {

// Target (alpha, beta): max_i |q_i(P) - a_i| >= alpha with probability at most
// beta.
class AccuracySpec {
 public:
  AccuracySpec(double alpha, double beta) : alpha_(alpha), beta_(beta) {
    if (!(alpha > 0.0 && alpha <= 1.0)) {
      std::ostringstream msg;
      msg << "alpha must lie in (0, 1], got " << alpha;
      throw InvalidArgumentError(msg.str());
    }
    if (!(beta > 0.0 && beta < 1.0)) {
      std::ostringstream msg;
      msg << "beta must lie in (0, 1), got " << beta;
      throw InvalidArgumentError(msg.str());
    }
  }

  double alpha() const { return alpha_; }
  double beta() const { return beta_; }

 private:
  double alpha_;
  double beta_;
};

// A Gaussian mechanism answering k queries on n samples with noise sigma.
struct MechanismPoint {
  MechanismPoint(std::int64_t n_samples, double noise_sigma, double queries)
      : n(n_samples), sigma(noise_sigma), k(queries) {
    if (n < 1) throw InvalidArgumentError("n must be >= 1");
    if (!(sigma > 0.0) || !std::isfinite(sigma))
      throw InvalidArgumentError("sigma must be finite and > 0");
    if (!(k > 0.0) || !std::isfinite(k))
      throw InvalidArgumentError("k must be finite and > 0");
  }

  std::int64_t n;
  double sigma;
  double k;
};

// Physical parameters of the answering system. L = 1 is point-to-point.
struct SystemConfig {
  SystemConfig(std::int64_t per_ep_samples, std::int64_t num_eps,
               double channel_sigma, double max_amplitude)
      : n0(per_ep_samples),
        L(num_eps),
        sigma_ch(channel_sigma),
        amplitude(max_amplitude) {
    if (n0 < 1) throw InvalidArgumentError("n0 must be >= 1");
    if (L < 1) throw InvalidArgumentError("L must be >= 1");
    if (!(sigma_ch > 0.0) || !std::isfinite(sigma_ch))
      throw InvalidArgumentError("sigma_ch must be finite and > 0");
    if (!(amplitude > 0.0) || !std::isfinite(amplitude))
      throw InvalidArgumentError("A_t must be finite and > 0");
    if (n0 > std::numeric_limits<std::int64_t>::max() / L)
      throw InvalidArgumentError("L * n0 overflows");
  }

  std::int64_t n0;
  std::int64_t L;
  double sigma_ch;
  double amplitude;
};

// The point-to-point mechanism a federated system is equivalent to.
struct EquivalentPoint {
  std::int64_t n_eq;
  double sigma_eq;             // sigma_ch / L, physical scale
  double sigma_normalized;     // sigma_ch / (L * A_t)
};

// g(c) ~= slope * c + intercept on the fitted range, and the constants of the
// linearized first budget term khat1 = w n^2 sigma^2 alpha^2 beta / 2 +
// b n sigma^2 that follow from it.
struct LinearFit {
  double w;
  double b;
  double slope;
  double intercept;
  std::pair<double, double> fit_range_c;
  double max_rel_residual;
  int samples;
};

// Which term of the accuracy bound limits the budget.
enum class Regime {
  kOverLeakage,   // k1 binds: too little noise
  kUnderLeakage,  // k2 binds: too much noise
};

inline const char* RegimeName(Regime regime) {
  return regime == Regime::kOverLeakage ? "over-leakage" : "under-leakage";
}

struct Budget {
  double k = 0.0;
  double k1 = 0.0;
  double k2 = 0.0;
  // False when n alpha^2 beta / 2 is below the range of g: no number of
  // queries satisfies the first term and k is reported as 0.
  bool k1_available = true;
  // k2's exponent exceeds the double range; k2 is +inf and never binds.
  bool k2_saturated = false;
  Regime regime = Regime::kOverLeakage;
  std::string reason;

  double floored() const { return std::floor(k); }
};

// f(lambda) for lambda in (0, 1) and c >= 0.
inline double FLambda(double lambda, double c) {
  if (!(lambda > 0.0 && lambda < 1.0)) {
    std::ostringstream msg;
    msg << "FLambda: lambda must lie in (0, 1), got " << lambda;
    throw DomainError(msg.str());
  }
  if (!(c >= 0.0)) throw DomainError("FLambda: c must be >= 0");
  return (c - std::log1p(-lambda)) / lambda;
}

namespace internal {

inline void RequirePositiveC(double c, const char* who) {
  if (!(c > 0.0) || std::isinf(c)) {
    std::ostringstream msg;
    msg << who << ": c must be finite and > 0, got " << c;
    throw DomainError(msg.str());
  }
}

}  // namespace internal

// Minimizer of f(., c): 1 + 1 / W_{-1}(-exp(-(c + 1))).
inline double LambdaStar(double c) {
  internal::RequirePositiveC(c, "LambdaStar");
  // With W = -(1 + eps): 1 + 1/W = eps / (1 + eps).
  const double eps = LambertWMinus1ExpFormExcess(c);
  return eps / (1.0 + eps);
}

// g(c) = W (c + ln(-W)) / (1 + W), W = W_{-1}(-exp(-(c + 1))).
inline double G(double c) {
  internal::RequirePositiveC(c, "G");
  const double eps = LambertWMinus1ExpFormExcess(c);
  const double w = -(1.0 + eps);
  const double one_plus_w = -eps;
  return w * (c + std::log1p(eps)) / one_plus_w;
}

// inf over c > 0 of g(c). g(c) -> 1 as c -> 0+.
inline constexpr double kGInfimum = 1.0;

// c with g(c) = y, by bracketing on [1e-12, c_hi].
inline double GInverse(double y) {
  constexpr double kLower = tolerance::kGInverseLowerC;
  if (!std::isfinite(y)) throw DomainError("GInverse: y must be finite");
  const double g_lower = G(kLower);
  if (!(y > g_lower)) {
    std::ostringstream msg;
    msg << "GInverse: y = " << y << " is below the attainable range of g "
        << "(g(" << kLower << ") = " << g_lower << ", inf g = " << kGInfimum
        << ")";
    throw OutOfRangeError(msg.str());
  }
  double hi = std::max(1.0, y);
  while (G(hi) < y) {
    hi *= 2.0;
    if (!std::isfinite(hi)) throw OutOfRangeError("GInverse: y too large");
  }
  return FindRoot([y](double c) { return G(c) - y; },
                  BracketedRoot{kLower, hi, 1e-300});
}

// Accuracy alpha attainable when answering point.k queries, per the two-term
// bound. The second term is taken as 0 when 4k/beta < 1.
inline double AlphaOf(const MechanismPoint& point, double beta) {
  if (!(beta > 0.0 && beta < 1.0))
    throw InvalidArgumentError("beta must lie in (0, 1)");
  const double n = static_cast<double>(point.n);
  const double var = point.sigma * point.sigma;
  const double c = point.k / (n * var);
  const double first = std::sqrt(2.0 / (n * beta) * G(c));
  const double second =
      std::sqrt(8.0 * var * std::max(0.0, std::log(4.0 * point.k / beta)));
  return std::max(first, second);
}

// First budget term. Throws OutOfRangeError when n alpha^2 beta / 2 is not
// attainable by g (n too small for this accuracy).
inline double K1(double sigma, std::int64_t n, const AccuracySpec& acc) {
  if (!(sigma > 0.0)) throw DomainError("K1: sigma must be > 0");
  if (n < 1) throw DomainError("K1: n must be >= 1");
  const double nd = static_cast<double>(n);
  const double y = nd * acc.alpha() * acc.alpha() * acc.beta() / 2.0;
  return nd * sigma * sigma * GInverse(y);
}

inline double LogK2(double sigma, const AccuracySpec& acc) {
  if (!(sigma > 0.0)) throw DomainError("K2: sigma must be > 0");
  return std::log(acc.beta() / 4.0) +
         acc.alpha() * acc.alpha() / (8.0 * sigma * sigma);
}

// Second budget term; +inf once the exponent leaves the double range.
inline double K2(double sigma, const AccuracySpec& acc) {
  const double log_k2 = LogK2(sigma, acc);
  if (log_k2 > std::log(std::numeric_limits<double>::max()))
    return std::numeric_limits<double>::infinity();
  return std::exp(log_k2);
}

// sigma at which k2 = 1: alpha / sqrt(8 ln(4 / beta)). Above it no query can
// be answered.
inline double K2UnitSigma(const AccuracySpec& acc) {
  return acc.alpha() / std::sqrt(8.0 * std::log(4.0 / acc.beta()));
}

// Smallest n for which k1 exists: n alpha^2 beta / 2 must exceed g(1e-12).
inline std::int64_t MinimumSamples(const AccuracySpec& acc) {
  const double y_min = G(tolerance::kGInverseLowerC);
  const double per_sample = acc.alpha() * acc.alpha() * acc.beta() / 2.0;
  auto n = static_cast<std::int64_t>(std::floor(y_min / per_sample));
  while (static_cast<double>(n) * per_sample <= y_min) ++n;
  return n;
}

// Query budget k = min(k1, k2) at normalized noise sigma. Never throws for
// valid inputs: when k1 is unavailable the budget is 0 with a reason.
inline Budget KBudget(double sigma, std::int64_t n, const AccuracySpec& acc) {
  if (!(sigma > 0.0) || !std::isfinite(sigma))
    throw DomainError("KBudget: sigma must be finite and > 0");
  if (n < 1) throw DomainError("KBudget: n must be >= 1");
  Budget out;
  out.k2 = K2(sigma, acc);
  out.k2_saturated = std::isinf(out.k2);
  try {
    out.k1 = K1(sigma, n, acc);
  } catch (const OutOfRangeError&) {
    out.k1_available = false;
    out.k1 = 0.0;
    out.k = 0.0;
    out.regime = Regime::kOverLeakage;
    std::ostringstream msg;
    msg << "n = " << n << " is too small for alpha = " << acc.alpha()
        << ", beta = " << acc.beta() << " (need n >= " << MinimumSamples(acc)
        << ")";
    out.reason = msg.str();
    return out;
  }
  if (out.k1 <= out.k2) {
    out.k = out.k1;
    out.regime = Regime::kOverLeakage;
  } else {
    out.k = out.k2;
    out.regime = Regime::kUnderLeakage;
  }
  return out;
}

// Fits the linear regime of g and derives khat1's constants. The line
// minimizes the maximum relative residual over a log-spaced grid (Lawson's
// iteratively reweighted least squares).
inline LinearFit FitKhat1(std::pair<double, double> c_range, int samples) {
  const auto [lo, hi] = c_range;
  if (!(lo >= 10.0) || !(hi > lo) || !std::isfinite(hi) || samples < 2) {
    std::ostringstream msg;
    msg << "FitKhat1: degenerate range [" << lo << ", " << hi << "] with "
        << samples << " samples (need 10 <= lo < hi, samples >= 2)";
    throw InvalidArgumentError(msg.str());
  }
  std::vector<double> cs(samples);
  std::vector<double> gs(samples);
  const double log_lo = std::log(lo);
  const double log_step = (std::log(hi) - log_lo) / (samples - 1);
  for (int i = 0; i < samples; ++i) {
    cs[i] = i + 1 == samples ? hi : std::exp(log_lo + log_step * i);
    gs[i] = G(cs[i]);
  }

  // Relative residual: (slope * c + intercept) / g - 1 = a_i slope + b_i
  // intercept - 1 with a_i = c/g, b_i = 1/g.
  std::vector<double> weights(samples, 1.0 / samples);
  double best_slope = 0.0;
  double best_intercept = 0.0;
  double best_residual = std::numeric_limits<double>::infinity();
  for (int iter = 0; iter < 2000; ++iter) {
    double saa = 0.0, sab = 0.0, sbb = 0.0, sa = 0.0, sb = 0.0;
    for (int i = 0; i < samples; ++i) {
      const double a = cs[i] / gs[i];
      const double b = 1.0 / gs[i];
      saa += weights[i] * a * a;
      sab += weights[i] * a * b;
      sbb += weights[i] * b * b;
      sa += weights[i] * a;
      sb += weights[i] * b;
    }
    const double det = saa * sbb - sab * sab;
    if (!(std::abs(det) > 0.0)) break;
    const double slope = (sa * sbb - sb * sab) / det;
    const double intercept = (saa * sb - sab * sa) / det;

    double max_residual = 0.0;
    double weight_sum = 0.0;
    for (int i = 0; i < samples; ++i) {
      const double r =
          std::abs((slope * cs[i] + intercept - gs[i]) / gs[i]);
      max_residual = std::max(max_residual, r);
      weights[i] *= r;
      weight_sum += weights[i];
    }
    if (max_residual < best_residual) {
      const bool stalled = best_residual - max_residual < 1e-12;
      best_residual = max_residual;
      best_slope = slope;
      best_intercept = intercept;
      if (stalled && iter > 10) break;
    }
    if (!(weight_sum > 0.0)) break;
    for (double& w : weights) w /= weight_sum;
  }

  LinearFit fit;
  fit.slope = best_slope;
  fit.intercept = best_intercept;
  fit.w = 1.0 / best_slope;
  fit.b = -best_intercept / best_slope;
  fit.fit_range_c = c_range;
  fit.max_rel_residual = best_residual;
  fit.samples = samples;
  return fit;
}

// Linearized first budget term w n^2 sigma^2 alpha^2 beta / 2 + b n sigma^2.
inline double Khat1(const LinearFit& fit, double sigma, std::int64_t n,
                    const AccuracySpec& acc) {
  const double nd = static_cast<double>(n);
  const double var = sigma * sigma;
  return fit.w * nd * nd * var * acc.alpha() * acc.alpha() * acc.beta() / 2.0 +
         fit.b * nd * var;
}

// Normalized sigma at which k1 = k2, the maximizer of the budget. Found on
// log k1 - log k2, which is strictly increasing in sigma.
inline double SOpt(std::int64_t n, const AccuracySpec& acc) {
  const double nd = static_cast<double>(n);
  const double c_y =
      GInverse(nd * acc.alpha() * acc.alpha() * acc.beta() / 2.0);
  const double log_nc = std::log(nd * c_y);
  auto gap = [&](double sigma) {
    return log_nc + 2.0 * std::log(sigma) - LogK2(sigma, acc);
  };
  double lo = acc.alpha() / 8.0;
  double hi = acc.alpha();
  for (int i = 0; i < 200 && gap(lo) > 0.0; ++i) lo *= 0.5;
  for (int i = 0; i < 200 && gap(hi) < 0.0; ++i) hi *= 2.0;
  return FindRoot(gap, BracketedRoot{lo, hi, 1e-300});
}

inline EquivalentPoint ToEquivalent(const SystemConfig& cfg) {
  const double l = static_cast<double>(cfg.L);
  return EquivalentPoint{cfg.L * cfg.n0, cfg.sigma_ch / l,
                         cfg.sigma_ch / (l * cfg.amplitude)};
}

inline Budget KBudget(const SystemConfig& cfg, const AccuracySpec& acc) {
  const EquivalentPoint eq = ToEquivalent(cfg);
  return KBudget(eq.sigma_normalized, eq.n_eq, acc);
}

// A_t = sigma_ch / (L s_opt(L n0)).
inline double OptimalAmplitude(const SystemConfig& cfg,
                               const AccuracySpec& acc) {
  return cfg.sigma_ch /
         (static_cast<double>(cfg.L) * SOpt(cfg.L * cfg.n0, acc));
}

// SNR in dB for amplitude ratio A_t / sigma, using A_t^2 / (2 sigma^2).
inline double SnrDbFromRatio(double amplitude_ratio) {
  return 10.0 * std::log10(amplitude_ratio * amplitude_ratio / 2.0);
}

inline double AmplitudeRatio(const SystemConfig& cfg) {
  return cfg.amplitude / cfg.sigma_ch;
}

inline double SnrDb(const SystemConfig& cfg) {
  return SnrDbFromRatio(AmplitudeRatio(cfg));
}

}  // namespace otaada

#endif  // OTAADA_BOUNDS_H_
