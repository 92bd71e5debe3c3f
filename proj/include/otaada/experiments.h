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

// Experiment plumbing shared by the command-line tool: flat key = value
// configuration, figure datasets, Monte-Carlo runs and the attack ladder.

#ifndef OTAADA_EXPERIMENTS_H_
#define OTAADA_EXPERIMENTS_H_

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <functional>
#include <limits>
#include <map>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include "otaada/analyst.h"
#include "otaada/bounds.h"
#include "otaada/csv.h"
#include "otaada/errors.h"
#include "otaada/federated_sim.h"
#include "otaada/random.h"

namespace otaada {

inline constexpr char kVersion[] = "1.0.0";
// Environment variable consulted for the master seed when neither the config
// file nor --seed sets one.
inline constexpr char kSeedEnvVar[] = "OTAADA_SEED";
inline constexpr std::uint64_t kDefaultSeed = 20260101;

// Usage or configuration problem; the message names the offending key and,
// for file input, the line.
class ConfigError : public InvalidArgumentError {
 public:
  using InvalidArgumentError::InvalidArgumentError;
};

// ---------------------------------------------------------------------------
// Value parsing.

namespace internal {

inline std::string_view Trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

inline bool IsIdentifier(std::string_view s) {
  return !s.empty() && std::all_of(s.begin(), s.end(), [](char ch) {
    return (ch >= 'a' && ch <= 'z') || (ch >= 'A' && ch <= 'Z') ||
           (ch >= '0' && ch <= '9') || ch == '_';
  });
}

}  // namespace internal

inline double ParseDouble(std::string_view text) {
  text = internal::Trim(text);
  double value = 0.0;
  const auto [end, ec] =
      std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || end != text.data() + text.size() || text.empty() ||
      !std::isfinite(value))
    throw InvalidArgumentError("expected a finite number, got '" +
                               std::string(text) + "'");
  return value;
}

// Accepts plain integers and integral reals such as 1e6.
inline std::int64_t ParseInt(std::string_view text) {
  text = internal::Trim(text);
  std::int64_t value = 0;
  const auto [end, ec] =
      std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec == std::errc() && end == text.data() + text.size() && !text.empty())
    return value;
  double real = 0.0;
  try {
    real = ParseDouble(text);
  } catch (const InvalidArgumentError&) {
    throw InvalidArgumentError("expected an integer, got '" +
                               std::string(text) + "'");
  }
  if (real != std::floor(real) || std::abs(real) >= 9.2e18)
    throw InvalidArgumentError("expected an integer, got '" +
                               std::string(text) + "'");
  return static_cast<std::int64_t>(real);
}

// Decimal or 0x-prefixed hexadecimal.
inline std::uint64_t ParseU64(std::string_view text) {
  text = internal::Trim(text);
  int base = 10;
  if (text.starts_with("0x") || text.starts_with("0X")) {
    text.remove_prefix(2);
    base = 16;
  }
  std::uint64_t value = 0;
  const auto [end, ec] =
      std::from_chars(text.data(), text.data() + text.size(), value, base);
  if (ec != std::errc() || end != text.data() + text.size() || text.empty())
    throw InvalidArgumentError("expected an unsigned 64-bit integer, got '" +
                               std::string(text) + "'");
  return value;
}

inline bool ParseBool(std::string_view text) {
  text = internal::Trim(text);
  if (text == "true" || text == "1" || text == "yes") return true;
  if (text == "false" || text == "0" || text == "no") return false;
  throw InvalidArgumentError("expected true or false, got '" +
                             std::string(text) + "'");
}

template <typename T, typename ParseFn>
std::vector<T> ParseList(std::string_view text, ParseFn parse) {
  std::vector<T> out;
  std::size_t start = 0;
  while (start <= text.size()) {
    const auto comma = text.find(',', start);
    const auto piece = text.substr(
        start, comma == std::string_view::npos ? std::string_view::npos
                                               : comma - start);
    out.push_back(parse(piece));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

// Shortest-round-trip rendering used when echoing a config.
inline std::string EchoNumber(double value) {
  char buf[64];
  const auto result = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, result.ptr);
}

// ---------------------------------------------------------------------------
// Raw key = value entries.

struct ConfigEntry {
  std::string value;
  std::string origin;  // "path:line", "--flag" or the environment variable
};

using ConfigEntries = std::map<std::string, ConfigEntry>;

// Parses flat "key = value" lines; '#' starts a comment. Text beginning with
// an "# otaada" banner is treated as the header of an earlier CSV output and
// its echoed configuration is read back.
inline ConfigEntries ParseConfigText(std::string_view text,
                                     const std::string& source) {
  ConfigEntries entries;
  const bool echoed = text.starts_with("# otaada ");
  std::size_t pos = 0;
  int line_no = 0;
  while (pos < text.size()) {
    auto eol = text.find('\n', pos);
    if (eol == std::string_view::npos) eol = text.size();
    std::string_view line = text.substr(pos, eol - pos);
    pos = eol + 1;
    ++line_no;
    if (echoed) {
      if (!line.starts_with("#")) break;  // end of the CSV header block
      if (line_no == 1) continue;         // banner
      line.remove_prefix(1);
    } else if (const auto hash = line.find('#');
               hash != std::string_view::npos) {
      line = line.substr(0, hash);
    }
    line = internal::Trim(line);
    if (line.empty()) continue;
    const std::string origin = source + ":" + std::to_string(line_no);
    const auto eq = line.find('=');
    if (eq == std::string_view::npos)
      throw ConfigError(origin + ": expected 'key = value', got '" +
                        std::string(line) + "'");
    const std::string key(internal::Trim(line.substr(0, eq)));
    const std::string value(internal::Trim(line.substr(eq + 1)));
    // Run notes and summaries in an echoed header are not settings.
    if (echoed && !internal::IsIdentifier(key)) continue;
    if (key.empty()) throw ConfigError(origin + ": missing key before '='");
    if (value.empty())
      throw ConfigError(origin + ": missing value for key '" + key + "'");
    if (entries.count(key))
      throw ConfigError(origin + ": duplicate key '" + key + "' (first set at " +
                        entries[key].origin + ")");
    entries[key] = {value, origin};
  }
  return entries;
}

inline ConfigEntries LoadConfigFile(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  std::ostringstream text;
  text << in.rdbuf();
  return ParseConfigText(text.str(), path);
}

// Later layers override earlier ones key by key.
inline void MergeEntries(ConfigEntries& base, const ConfigEntries& overrides) {
  for (const auto& [key, entry] : overrides) base[key] = entry;
}

// ---------------------------------------------------------------------------
// Validated configuration.

enum class SweepVar { kSigmaOverAt, kN, kL };

inline const char* SweepVarName(SweepVar var) {
  switch (var) {
    case SweepVar::kSigmaOverAt:
      return "sigma_over_At";
    case SweepVar::kN:
      return "n";
    case SweepVar::kL:
      return "L";
  }
  return "unknown";
}

struct SweepAxis {
  SweepVar var = SweepVar::kSigmaOverAt;
  double lo = 0.0;
  double hi = 1.0;
  std::int64_t points = 2;
  bool log_spacing = false;

  void Validate() const {
    if (!(lo < hi)) throw InvalidArgumentError("sweep_lo must be < sweep_hi");
    if (points < 2) throw InvalidArgumentError("sweep_points must be >= 2");
    if (log_spacing && !(lo > 0.0))
      throw InvalidArgumentError("log spacing needs sweep_lo > 0");
    if (var != SweepVar::kSigmaOverAt && lo < 1.0)
      throw InvalidArgumentError(std::string("sweep over ") +
                                 SweepVarName(var) + " needs sweep_lo >= 1");
  }

  std::vector<double> Values() const {
    std::vector<double> out(static_cast<std::size_t>(points));
    for (std::int64_t i = 0; i < points; ++i) {
      const double t = static_cast<double>(i) / static_cast<double>(points - 1);
      out[static_cast<std::size_t>(i)] =
          log_spacing ? std::exp(std::log(lo) + t * (std::log(hi) - std::log(lo)))
                      : lo + t * (hi - lo);
    }
    out.front() = lo;
    out.back() = hi;
    return out;
  }

  // Rounded, de-duplicated integer grid for the n and L axes.
  std::vector<std::int64_t> IntegerValues() const {
    std::vector<std::int64_t> out;
    for (double v : Values()) {
      const auto r = static_cast<std::int64_t>(std::llround(v));
      if (out.empty() || out.back() != r) out.push_back(r);
    }
    return out;
  }
};

inline std::vector<double> LogGrid(double lo, double hi, std::int64_t points) {
  return SweepAxis{SweepVar::kSigmaOverAt, lo, hi, points, true}.Values();
}

inline std::vector<double> LinearGrid(double lo, double hi,
                                      std::int64_t points) {
  return SweepAxis{SweepVar::kSigmaOverAt, lo, hi, points, false}.Values();
}

struct ExperimentConfig {
  // Accuracy target.
  double alpha = 0.1;
  double beta = 0.05;
  // System.
  std::optional<std::int64_t> n0;
  std::int64_t L = 1;
  std::optional<double> sigma_ch;
  // sigma_ch = auto: calibrate the channel so sigma_ch / (L A_t) = s_opt.
  bool sigma_ch_auto = false;
  double amplitude = 1.0;
  // Simulation.
  std::string policy = "random_nonadaptive";
  std::int64_t domain_size = 10000;
  std::optional<std::int64_t> k;
  std::int64_t k_cap = 10000;
  std::int64_t trials = 200;
  std::uint64_t seed = kDefaultSeed;
  int threads = 1;
  // Figures.
  std::string figure;
  std::optional<SweepAxis> sweep;
  std::vector<std::int64_t> n_values = {100000, 1000000, 10000000};
  std::vector<std::int64_t> n0_values = {1000, 10000, 100000};
  double ratio = 0.5;
  std::int64_t L_max = 500;
  // Outputs ("-" is stdout). Not echoed: they do not affect content.
  std::string out = "-";
  std::string transcript_out;

  AccuracySpec accuracy() const { return AccuracySpec(alpha, beta); }

  std::int64_t RequireN0() const {
    if (!n0) throw ConfigError("missing required key 'n0'");
    return *n0;
  }

  // Effective configuration as "key = value" lines; parsing them back yields
  // the same configuration.
  std::vector<std::string> Echo() const {
    std::vector<std::string> lines;
    auto add = [&](const std::string& key, const std::string& value) {
      lines.push_back(key + " = " + value);
    };
    auto join = [](const std::vector<std::int64_t>& xs) {
      std::string s;
      for (std::size_t i = 0; i < xs.size(); ++i)
        s += (i ? "," : "") + std::to_string(xs[i]);
      return s;
    };
    add("alpha", EchoNumber(alpha));
    add("beta", EchoNumber(beta));
    if (n0) add("n0", std::to_string(*n0));
    add("L", std::to_string(L));
    if (sigma_ch_auto) {
      add("sigma_ch", "auto");
    } else if (sigma_ch) {
      add("sigma_ch", EchoNumber(*sigma_ch));
    }
    add("At", EchoNumber(amplitude));
    add("policy", policy);
    add("domain_size", std::to_string(domain_size));
    if (k) add("k", std::to_string(*k));
    add("k_cap", std::to_string(k_cap));
    add("trials", std::to_string(trials));
    add("seed", std::to_string(seed));
    if (!figure.empty()) add("figure", figure);
    if (sweep) {
      add("sweep_var", SweepVarName(sweep->var));
      add("sweep_lo", EchoNumber(sweep->lo));
      add("sweep_hi", EchoNumber(sweep->hi));
      add("sweep_points", std::to_string(sweep->points));
      add("sweep_spacing", sweep->log_spacing ? "log" : "linear");
    }
    add("n_values", join(n_values));
    add("n0_values", join(n0_values));
    add("ratio", EchoNumber(ratio));
    add("L_max", std::to_string(L_max));
    return lines;
  }
};

namespace internal {

using Setter = std::function<void(ExperimentConfig&, const std::string&)>;

inline std::int64_t PositiveInt(const std::string& v, const char* what) {
  const std::int64_t x = ParseInt(v);
  if (x < 1) throw InvalidArgumentError(std::string(what) + " must be >= 1");
  return x;
}

inline double PositiveReal(const std::string& v, const char* what) {
  const double x = ParseDouble(v);
  if (!(x > 0.0)) throw InvalidArgumentError(std::string(what) + " must be > 0");
  return x;
}

inline std::vector<std::int64_t> PositiveIntList(const std::string& v) {
  auto xs = ParseList<std::int64_t>(
      v, [](std::string_view s) { return ParseInt(s); });
  for (auto x : xs)
    if (x < 1) throw InvalidArgumentError("list entries must be >= 1");
  return xs;
}

inline const std::map<std::string, Setter>& Setters() {
  static const auto* setters = new std::map<std::string, Setter>{
      {"alpha", [](ExperimentConfig& c, const std::string& v) {
         c.alpha = ParseDouble(v);
         if (!(c.alpha > 0.0 && c.alpha <= 1.0))
           throw InvalidArgumentError("alpha must lie in (0, 1], got " + v);
       }},
      {"beta", [](ExperimentConfig& c, const std::string& v) {
         c.beta = ParseDouble(v);
         if (!(c.beta > 0.0 && c.beta < 1.0))
           throw InvalidArgumentError("beta must lie in (0, 1), got " + v);
       }},
      {"n0", [](ExperimentConfig& c, const std::string& v) {
         c.n0 = PositiveInt(v, "n0");
       }},
      {"L", [](ExperimentConfig& c, const std::string& v) {
         c.L = PositiveInt(v, "L");
       }},
      {"sigma_ch", [](ExperimentConfig& c, const std::string& v) {
         if (Trim(v) == "auto") {
           c.sigma_ch_auto = true;
           c.sigma_ch.reset();
           return;
         }
         const double x = ParseDouble(v);
         if (x < 0.0) throw InvalidArgumentError("sigma_ch must be >= 0");
         c.sigma_ch_auto = false;
         c.sigma_ch = x;
       }},
      {"At", [](ExperimentConfig& c, const std::string& v) {
         c.amplitude = PositiveReal(v, "At");
       }},
      {"policy", [](ExperimentConfig& c, const std::string& v) {
         if (v != "random_nonadaptive" && v != "overfit_attack")
           throw InvalidArgumentError(
               "policy must be random_nonadaptive or overfit_attack, got '" +
               v + "'");
         c.policy = v;
       }},
      {"domain_size", [](ExperimentConfig& c, const std::string& v) {
         c.domain_size = PositiveInt(v, "domain_size");
         if (c.domain_size > std::numeric_limits<std::uint32_t>::max())
           throw InvalidArgumentError("domain_size is too large");
       }},
      {"k", [](ExperimentConfig& c, const std::string& v) {
         c.k = PositiveInt(v, "k");
       }},
      {"k_cap", [](ExperimentConfig& c, const std::string& v) {
         c.k_cap = PositiveInt(v, "k_cap");
       }},
      {"trials", [](ExperimentConfig& c, const std::string& v) {
         c.trials = PositiveInt(v, "trials");
       }},
      {"seed", [](ExperimentConfig& c, const std::string& v) {
         c.seed = ParseU64(v);
       }},
      {"threads", [](ExperimentConfig& c, const std::string& v) {
         const std::int64_t t = PositiveInt(v, "threads");
         c.threads = static_cast<int>(std::min<std::int64_t>(t, 1024));
       }},
      {"figure", [](ExperimentConfig& c, const std::string& v) {
         c.figure = v;
       }},
      {"sweep_var", [](ExperimentConfig& c, const std::string& v) {
         if (!c.sweep) c.sweep.emplace();
         if (v == "sigma_over_At") {
           c.sweep->var = SweepVar::kSigmaOverAt;
         } else if (v == "n") {
           c.sweep->var = SweepVar::kN;
         } else if (v == "L") {
           c.sweep->var = SweepVar::kL;
         } else {
           throw InvalidArgumentError(
               "sweep_var must be one of sigma_over_At, n, L; got '" + v + "'");
         }
       }},
      {"sweep_lo", [](ExperimentConfig& c, const std::string& v) {
         if (!c.sweep) c.sweep.emplace();
         c.sweep->lo = ParseDouble(v);
       }},
      {"sweep_hi", [](ExperimentConfig& c, const std::string& v) {
         if (!c.sweep) c.sweep.emplace();
         c.sweep->hi = ParseDouble(v);
       }},
      {"sweep_points", [](ExperimentConfig& c, const std::string& v) {
         if (!c.sweep) c.sweep.emplace();
         c.sweep->points = ParseInt(v);
       }},
      {"sweep_spacing", [](ExperimentConfig& c, const std::string& v) {
         if (!c.sweep) c.sweep.emplace();
         if (v != "linear" && v != "log")
           throw InvalidArgumentError("sweep_spacing must be linear or log");
         c.sweep->log_spacing = v == "log";
       }},
      {"n_values", [](ExperimentConfig& c, const std::string& v) {
         c.n_values = PositiveIntList(v);
       }},
      {"n0_values", [](ExperimentConfig& c, const std::string& v) {
         c.n0_values = PositiveIntList(v);
       }},
      {"ratio", [](ExperimentConfig& c, const std::string& v) {
         c.ratio = PositiveReal(v, "ratio");
       }},
      {"L_max", [](ExperimentConfig& c, const std::string& v) {
         c.L_max = PositiveInt(v, "L_max");
       }},
      {"out", [](ExperimentConfig& c, const std::string& v) { c.out = v; }},
      {"transcript_out", [](ExperimentConfig& c, const std::string& v) {
         c.transcript_out = v;
       }},
  };
  return *setters;
}

}  // namespace internal

// Applies entries over the defaults and validates the result. Unknown keys
// are errors unless `lenient`, in which case they are reported in `warnings`.
inline ExperimentConfig BuildConfig(const ConfigEntries& entries,
                                    bool lenient = false,
                                    std::vector<std::string>* warnings = nullptr) {
  ExperimentConfig cfg;
  const auto& setters = internal::Setters();
  for (const auto& [key, entry] : entries) {
    const auto it = setters.find(key);
    if (it == setters.end()) {
      const std::string msg = entry.origin + ": unknown key '" + key + "'";
      if (!lenient) throw ConfigError(msg);
      if (warnings) warnings->push_back(msg);
      continue;
    }
    try {
      it->second(cfg, entry.value);
    } catch (const ConfigError&) {
      throw;
    } catch (const InvalidArgumentError& e) {
      throw ConfigError(entry.origin + ": " + key + ": " + e.what());
    }
  }
  if (cfg.sweep) {
    auto origin = [&](const char* key) {
      const auto it = entries.find(key);
      return it == entries.end() ? std::string("config") : it->second.origin;
    };
    if (!entries.count("sweep_var"))
      throw ConfigError(origin("sweep_lo") +
                        ": sweep keys given without sweep_var");
    for (const char* key : {"sweep_lo", "sweep_hi", "sweep_points"})
      if (!entries.count(key))
        throw ConfigError(origin("sweep_var") + ": missing required key '" +
                          key + "' for the sweep");
    try {
      cfg.sweep->Validate();
    } catch (const InvalidArgumentError& e) {
      throw ConfigError(origin("sweep_var") + ": sweep: " + e.what());
    }
  }
  return cfg;
}

// ---------------------------------------------------------------------------
// Bound queries.

namespace internal {

// Blank when n is below the minimum sample count and k1 does not exist.
inline CsvCell K1Cell(const Budget& b) {
  return b.k1_available ? CsvCell(b.k1) : CsvCell(std::string());
}

inline CsvCell K2Cell(const Budget& b) {
  return b.k2_saturated ? CsvCell(std::string()) : CsvCell(b.k2);
}

}  // namespace internal

struct BoundsReport {
  std::int64_t n_eq = 0;
  double sigma_normalized = 0.0;
  Budget budget;
  double s_opt = 0.0;
  double amplitude_opt = 0.0;
  double amplitude_ratio = 0.0;
  double snr_db = 0.0;
  double snr_opt_db = 0.0;
  std::optional<double> alpha_of;
};

// Evaluates the budget of one system. Throws OutOfRangeError (naming the
// minimum sample count) when L n0 is too small for any query.
inline BoundsReport ComputeBounds(const SystemConfig& system,
                                  const AccuracySpec& acc,
                                  std::optional<double> k = std::nullopt) {
  BoundsReport r;
  const EquivalentPoint eq = ToEquivalent(system);
  r.n_eq = eq.n_eq;
  r.sigma_normalized = eq.sigma_normalized;
  if (r.n_eq < MinimumSamples(acc)) {
    std::ostringstream msg;
    msg << "L * n0 = " << r.n_eq << " is below the minimum sample count "
        << MinimumSamples(acc) << " for alpha = " << acc.alpha()
        << ", beta = " << acc.beta() << " (need n alpha^2 beta / 2 > 1)";
    throw OutOfRangeError(msg.str());
  }
  r.budget = KBudget(system, acc);
  r.s_opt = SOpt(r.n_eq, acc);
  r.amplitude_opt = OptimalAmplitude(system, acc);
  r.amplitude_ratio = AmplitudeRatio(system);
  r.snr_db = SnrDb(system);
  r.snr_opt_db = SnrDbFromRatio(r.amplitude_opt / system.sigma_ch);
  if (k) r.alpha_of = AlphaOf(MechanismPoint(r.n_eq, r.sigma_normalized, *k),
                              acc.beta());
  return r;
}

inline CsvTable BoundsTable(const SystemConfig& system, const BoundsReport& r) {
  CsvTable table;
  table.columns = {"n0",      "L",        "sigma_ch",       "At",
                   "n_eq",    "sigma_over_At_eq", "k",      "k_floor",
                   "k1",      "k2",       "k2_saturated",   "regime",
                   "s_opt",   "At_opt",   "amplitude_ratio", "snr_db",
                   "snr_opt_db", "alpha_of"};
  table.rows.push_back(
      {system.n0, system.L, system.sigma_ch, system.amplitude, r.n_eq,
       r.sigma_normalized, r.budget.k, r.budget.floored(),
       internal::K1Cell(r.budget),
       internal::K2Cell(r.budget),
       static_cast<std::int64_t>(r.budget.k2_saturated),
       std::string(RegimeName(r.budget.regime)), r.s_opt, r.amplitude_opt,
       r.amplitude_ratio, r.snr_db, r.snr_opt_db,
       r.alpha_of ? CsvCell(*r.alpha_of) : CsvCell(std::string())});
  return table;
}

// ---------------------------------------------------------------------------
// Figure datasets.

enum class Figure { kGVsC, kKVsRatio, kKmaxVsN, kKVsL, kKVsLOptimized };

inline const std::vector<std::pair<std::string, Figure>>& FigureNames() {
  static const auto* names = new std::vector<std::pair<std::string, Figure>>{
      {"g_vs_c", Figure::kGVsC},
      {"k_vs_ratio", Figure::kKVsRatio},
      {"kmax_vs_n", Figure::kKmaxVsN},
      {"k_vs_L", Figure::kKVsL},
      {"k_vs_L_optimized", Figure::kKVsLOptimized},
  };
  return *names;
}

inline Figure ParseFigure(const std::string& name) {
  std::string known;
  for (const auto& [n, f] : FigureNames()) {
    if (n == name) return f;
    known += (known.empty() ? "" : ", ") + n;
  }
  throw ConfigError("unknown figure '" + name + "' (expected one of " + known +
                    ")");
}

namespace internal {

inline void RequireSweep(const ExperimentConfig& cfg, SweepVar var,
                         const char* figure) {
  if (cfg.sweep && cfg.sweep->var != var)
    throw ConfigError(std::string("sweep_var '") + SweepVarName(cfg.sweep->var) +
                      "' does not apply to figure " + figure + " (expected " +
                      SweepVarName(var) + ")");
}

inline std::vector<std::int64_t> IntegerAxis(const ExperimentConfig& cfg,
                                             std::vector<std::int64_t> fallback) {
  return cfg.sweep ? cfg.sweep->IntegerValues() : fallback;
}

}  // namespace internal

// g(c) on c in [0.1, 100], 500 log-spaced points.
inline CsvTable FigureGVsC() {
  CsvTable table;
  table.columns = {"c", "g"};
  for (double c : LogGrid(0.1, 100.0, 500)) table.rows.push_back({c, G(c)});
  return table;
}

// k versus normalized noise sigma / A_t for each n. Default ratio grid
// [0.001, 0.02], 400 points. k2 is left blank (and flagged) when it exceeds
// the double range.
inline CsvTable FigureKVsRatio(const ExperimentConfig& cfg) {
  internal::RequireSweep(cfg, SweepVar::kSigmaOverAt, "k_vs_ratio");
  const AccuracySpec acc = cfg.accuracy();
  const std::vector<double> ratios =
      cfg.sweep ? cfg.sweep->Values() : LinearGrid(0.001, 0.02, 400);
  CsvTable table;
  table.columns = {"ratio", "n",  "k",  "k_floor",      "k1",
                   "k2",    "log10_k2", "k2_saturated", "regime"};
  for (std::int64_t n : cfg.n_values) {
    for (double ratio : ratios) {
      const Budget b = KBudget(ratio, n, acc);
      table.rows.push_back({ratio, n, b.k, b.floored(), internal::K1Cell(b),
                            internal::K2Cell(b),
                            LogK2(ratio, acc) / std::log(10.0),
                            static_cast<std::int64_t>(b.k2_saturated),
                            std::string(RegimeName(b.regime))});
    }
  }
  return table;
}

// Budget at s_opt for n log-spaced over [1e5, 1e7] (41 points).
inline CsvTable FigureKmaxVsN(const ExperimentConfig& cfg) {
  internal::RequireSweep(cfg, SweepVar::kN, "kmax_vs_n");
  const AccuracySpec acc = cfg.accuracy();
  std::vector<std::int64_t> ns;
  if (cfg.sweep) {
    ns = cfg.sweep->IntegerValues();
  } else {
    ns = SweepAxis{SweepVar::kN, 1e5, 1e7, 41, true}.IntegerValues();
  }
  CsvTable table;
  table.columns = {"n", "k_max", "k_max_floor", "ratio_opt"};
  for (std::int64_t n : ns) {
    if (n < MinimumSamples(acc)) {
      table.rows.push_back({n, 0.0, 0.0, std::string()});
      continue;
    }
    const double s = SOpt(n, acc);
    const Budget b = KBudget(s, n, acc);
    table.rows.push_back({n, b.k, b.floored(), s});
  }
  return table;
}

// k versus the number of EPs at fixed sigma / A_t (default 0.5) for each n0.
inline CsvTable FigureKVsL(const ExperimentConfig& cfg) {
  internal::RequireSweep(cfg, SweepVar::kL, "k_vs_L");
  const AccuracySpec acc = cfg.accuracy();
  std::vector<std::int64_t> ls;
  for (std::int64_t l = 1; l <= cfg.L_max; ++l) ls.push_back(l);
  ls = internal::IntegerAxis(cfg, ls);
  CsvTable table;
  table.columns = {"L",  "n0",      "sigma_over_At", "n_eq", "k",
                   "k_floor", "k1", "k2",       "k2_saturated", "regime"};
  for (std::int64_t n0 : cfg.n0_values) {
    for (std::int64_t l : ls) {
      const SystemConfig sys(n0, l, cfg.ratio, 1.0);
      const Budget b = KBudget(sys, acc);
      table.rows.push_back({l, n0, cfg.ratio, l * n0, b.k, b.floored(),
                            internal::K1Cell(b),
                            internal::K2Cell(b),
                            static_cast<std::int64_t>(b.k2_saturated),
                            std::string(RegimeName(b.regime))});
    }
  }
  return table;
}

// k versus L when the amplitude follows A_t = sigma / (L s_opt(L n0)),
// alongside the fixed-amplitude budget. The channel noise is sigma_ch if set,
// otherwise ratio * A_t. Rows where L n0 admits no query leave A_t_opt blank.
inline CsvTable FigureKVsLOptimized(const ExperimentConfig& cfg) {
  internal::RequireSweep(cfg, SweepVar::kL, "k_vs_L_optimized");
  const AccuracySpec acc = cfg.accuracy();
  const double sigma =
      cfg.sigma_ch && *cfg.sigma_ch > 0.0 ? *cfg.sigma_ch
                                          : cfg.ratio * cfg.amplitude;
  std::vector<std::int64_t> ls;
  for (std::int64_t l = 1; l <= cfg.L_max; ++l) ls.push_back(l);
  ls = internal::IntegerAxis(cfg, ls);
  CsvTable table;
  table.columns = {"L",        "n0",         "sigma_ch", "A_t_opt",
                   "snr_opt_db", "k",        "k_floor",  "k_fixed_At",
                   "k_fixed_At_floor", "feasible"};
  for (std::int64_t n0 : cfg.n0_values) {
    for (std::int64_t l : ls) {
      const Budget fixed = KBudget(SystemConfig(n0, l, sigma, cfg.amplitude), acc);
      if (l * n0 < MinimumSamples(acc)) {
        table.rows.push_back({l, n0, sigma, std::string(), std::string(), 0.0,
                              0.0, fixed.k, fixed.floored(),
                              std::int64_t{0}});
        continue;
      }
      const double a_opt =
          OptimalAmplitude(SystemConfig(n0, l, sigma, cfg.amplitude), acc);
      const Budget b = KBudget(SystemConfig(n0, l, sigma, a_opt), acc);
      table.rows.push_back({l, n0, sigma, a_opt, SnrDbFromRatio(a_opt / sigma),
                            b.k, b.floored(), fixed.k, fixed.floored(),
                            std::int64_t{1}});
    }
  }
  return table;
}

inline CsvTable FigureTable(Figure figure, const ExperimentConfig& cfg) {
  switch (figure) {
    case Figure::kGVsC:
      if (cfg.sweep) throw ConfigError("figure g_vs_c takes no sweep");
      return FigureGVsC();
    case Figure::kKVsRatio:
      return FigureKVsRatio(cfg);
    case Figure::kKmaxVsN:
      return FigureKmaxVsN(cfg);
    case Figure::kKVsL:
      return FigureKVsL(cfg);
    case Figure::kKVsLOptimized:
      return FigureKVsLOptimized(cfg);
  }
  throw ConfigError("unknown figure");
}

// ---------------------------------------------------------------------------
// Simulation.

inline AnalystPolicy PolicyFromConfig(const ExperimentConfig& cfg) {
  AnalystPolicy policy;
  policy.kind = cfg.policy == "overfit_attack"
                    ? AnalystPolicy::Kind::kOverfitAttack
                    : AnalystPolicy::Kind::kRandomNonadaptive;
  return policy;
}

// Noise level giving sigma / (L A_t) = s_opt(L n0); when L n0 is too small for
// s_opt to exist, the level at which k2 = 1 is used instead.
inline double CalibratedRatio(std::int64_t n_eq, const AccuracySpec& acc) {
  return n_eq >= MinimumSamples(acc) ? SOpt(n_eq, acc) : K2UnitSigma(acc);
}

struct SimulationPlan {
  SimTemplate sim;
  AnalystPolicy policy;
  std::int64_t k = 1;
  // Budget at the simulated noise level; absent for a noiseless channel or
  // when L n0 is below the minimum sample count.
  std::optional<Budget> budget;
  std::vector<std::string> notes;
};

inline SimulationPlan PlanSimulation(const ExperimentConfig& cfg) {
  const AccuracySpec acc = cfg.accuracy();
  SimulationPlan plan;
  plan.sim.n0 = cfg.RequireN0();
  plan.sim.L = cfg.L;
  plan.sim.amplitude = cfg.amplitude;
  if (cfg.n0 && *cfg.n0 > std::numeric_limits<std::int64_t>::max() / cfg.L)
    throw ConfigError("L * n0 overflows");
  const std::int64_t n_eq = plan.sim.n0 * plan.sim.L;
  if (cfg.sigma_ch_auto) {
    plan.sim.sigma_ch =
        CalibratedRatio(n_eq, acc) * static_cast<double>(cfg.L) * cfg.amplitude;
  } else if (cfg.sigma_ch) {
    plan.sim.sigma_ch = *cfg.sigma_ch;
  } else {
    throw ConfigError("missing required key 'sigma_ch' (a number or 'auto')");
  }
  plan.sim.population = std::make_shared<const Population>(
      Population::Uniform(static_cast<std::size_t>(cfg.domain_size)));
  plan.policy = PolicyFromConfig(cfg);

  if (plan.sim.sigma_ch > 0.0 && n_eq >= MinimumSamples(acc)) {
    plan.budget = KBudget(SystemConfig(plan.sim.n0, plan.sim.L,
                                       plan.sim.sigma_ch, plan.sim.amplitude),
                          acc);
  }
  if (cfg.k) {
    plan.k = *cfg.k;
    if (plan.budget && static_cast<double>(plan.k) > plan.budget->k) {
      std::ostringstream msg;
      msg << "k = " << plan.k << " exceeds the accuracy budget "
          << FormatNumber(plan.budget->k, 6);
      plan.notes.push_back(msg.str());
    }
  } else {
    if (!plan.budget || plan.budget->floored() < 1.0) {
      throw OutOfRangeError(
          "no default k: the accuracy budget at this configuration is below "
          "one query; set k explicitly");
    }
    plan.k = static_cast<std::int64_t>(
        std::min(plan.budget->floored(), static_cast<double>(cfg.k_cap)));
  }
  return plan;
}

// Runs the planned trials; unexpected failures inside a session surface as
// SimulationError.
inline AccuracyReport RunPlannedSimulation(const SimulationPlan& plan,
                                           const ExperimentConfig& cfg) {
  try {
    return EvaluateAccuracy(plan.policy, plan.sim, plan.k, cfg.alpha,
                            cfg.trials, cfg.seed, cfg.threads);
  } catch (const Error&) {
    throw;
  } catch (const std::exception& e) {
    throw SimulationError(std::string("session aborted: ") + e.what());
  }
}

// The transcript of trial 0, identical to the one evaluated in the report.
inline Transcript FirstTrialTranscript(const SimulationPlan& plan,
                                       const ExperimentConfig& cfg) {
  return RunPolicySession(plan.policy, plan.sim, plan.k,
                          SessionSeeds::ForTrial(cfg.seed, 0));
}

inline std::vector<std::string> SimulationComments(const SimulationPlan& plan,
                                                   const AccuracyReport& r) {
  std::vector<std::string> lines;
  std::ostringstream run;
  run << "run: policy=" << PolicyName(plan.policy.kind) << " k=" << plan.k
      << " sigma_ch=" << FormatNumber(plan.sim.sigma_ch)
      << " sigma_over_At_eq="
      << FormatNumber(plan.sim.sigma_ch /
                      (static_cast<double>(plan.sim.L) * plan.sim.amplitude));
  if (plan.budget) run << " k_budget=" << FormatNumber(plan.budget->k);
  lines.push_back(run.str());
  for (const auto& note : plan.notes) lines.push_back("note: " + note);
  lines.push_back("summary: " + AccuracySummaryLine(r));
  return lines;
}

// ---------------------------------------------------------------------------
// Attack ladder.

struct LadderRung {
  std::string label;
  double sigma_over_at = 0.0;  // normalized sigma_ch / (L A_t)
  double sigma_ch = 0.0;
  AccuracyReport report;
};

struct AttackLadder {
  double s_ref = 0.0;
  // True when s_ref is the k2 = 1 level because s_opt does not exist.
  bool fallback = false;
  std::int64_t k = 0;
  std::vector<LadderRung> rungs;
};

// Overfitting attack at normalized noise {0, s/10, s, 10 s}, s = s_opt(L n0).
// Every rung reuses the same master seed, so rungs differ only in noise.
inline AttackLadder RunAttackLadder(const ExperimentConfig& cfg) {
  const AccuracySpec acc = cfg.accuracy();
  const std::int64_t n0 = cfg.RequireN0();
  const std::int64_t n_eq = n0 * cfg.L;
  AttackLadder ladder;
  ladder.fallback = n_eq < MinimumSamples(acc);
  ladder.s_ref = CalibratedRatio(n_eq, acc);
  ladder.k = cfg.k.value_or(1001);

  SimTemplate sim;
  sim.population = std::make_shared<const Population>(
      Population::Uniform(static_cast<std::size_t>(cfg.domain_size)));
  sim.n0 = n0;
  sim.L = cfg.L;
  sim.amplitude = cfg.amplitude;
  AnalystPolicy policy;
  policy.kind = AnalystPolicy::Kind::kOverfitAttack;

  const std::vector<std::pair<std::string, double>> rungs = {
      {"zero", 0.0},
      {"s_opt/10", ladder.s_ref / 10.0},
      {"s_opt", ladder.s_ref},
      {"10*s_opt", 10.0 * ladder.s_ref},
  };
  for (const auto& [label, ratio] : rungs) {
    LadderRung rung;
    rung.label = label;
    rung.sigma_over_at = ratio;
    rung.sigma_ch = ratio * static_cast<double>(cfg.L) * cfg.amplitude;
    sim.sigma_ch = rung.sigma_ch;
    try {
      rung.report = EvaluateAccuracy(policy, sim, ladder.k, cfg.alpha,
                                     cfg.trials, cfg.seed, cfg.threads);
    } catch (const Error&) {
      throw;
    } catch (const std::exception& e) {
      throw SimulationError(std::string("session aborted: ") + e.what());
    }
    ladder.rungs.push_back(std::move(rung));
  }
  return ladder;
}

inline CsvTable AttackLadderTable(const AttackLadder& ladder) {
  CsvTable table;
  table.columns = {"rung",       "sigma_over_At", "sigma_ch",
                   "failure_rate", "wilson_lo",   "wilson_hi",
                   "failures",   "trials",        "mean_max_error",
                   "mean_final_error"};
  for (const LadderRung& r : ladder.rungs) {
    double mean_max = 0.0;
    double mean_final = 0.0;
    for (double e : r.report.max_errors) mean_max += e;
    for (double e : r.report.final_errors) mean_final += e;
    const auto n = static_cast<double>(r.report.trials);
    table.rows.push_back({r.label, r.sigma_over_at, r.sigma_ch,
                          r.report.failure_rate, r.report.wilson.lo,
                          r.report.wilson.hi, r.report.failures,
                          r.report.trials, mean_max / n, mean_final / n});
  }
  return table;
}

// ---------------------------------------------------------------------------
// Output.

// Header comment block: banner, effective configuration, then extra lines.
inline std::vector<std::string> HeaderComments(
    const std::string& command, const ExperimentConfig& cfg,
    const std::vector<std::string>& extra = {}) {
  std::vector<std::string> lines = {std::string("otaada ") + kVersion + " " +
                                    command};
  for (auto& line : cfg.Echo()) lines.push_back(std::move(line));
  lines.insert(lines.end(), extra.begin(), extra.end());
  return lines;
}

inline std::string RenderCsv(const CsvTable& table,
                             const std::vector<std::string>& comments) {
  std::ostringstream out;
  WriteCsv(out, table, comments);
  return out.str();
}

}  // namespace otaada

#endif  // OTAADA_EXPERIMENTS_H_
