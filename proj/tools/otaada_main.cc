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

// otaada: query budgets, figure datasets and Monte-Carlo checks for adaptive
// data analysis over noisy (over-the-air) channels.
//
// Exit codes: 0 success, 2 usage/config, 3 bound-domain, 4 runtime.

#include <cstdlib>
#include <deque>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "CLI11.hpp"
#include "otaada/bounds.h"
#include "otaada/errors.h"
#include "otaada/experiments.h"

namespace otaada {
namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 2;
constexpr int kExitDomain = 3;
constexpr int kExitRuntime = 4;

// Flags shared by every subcommand. Each set flag overrides the config key
// it is bound to.
struct CommonFlags {
  std::string config_path;
  bool lenient = false;
  bool floor = false;
  std::vector<std::string> sets;
  std::vector<std::pair<CLI::Option*, std::string>> bound;
  // Stable addresses: CLI11 writes through pointers into this container.
  std::deque<std::string> values;

  void Add(CLI::App* app) {
    app->add_option("--config", config_path, "Flat key = value config file");
    app->add_flag("--lenient", lenient, "Warn on unknown config keys");
    app->add_flag("--floor", floor, "Report k as an integer (bounds)");
    app->add_option("--set", sets, "Override any config key: --set key=value");
    Bind(app, "--seed", "seed", "Master seed (U64)");
    Bind(app, "--out", "out", "Output CSV path ('-' for stdout)");
    Bind(app, "--trials", "trials", "Monte-Carlo trials");
    Bind(app, "--alpha", "alpha", "Accuracy alpha in (0, 1]");
    Bind(app, "--beta", "beta", "Failure probability beta in (0, 1)");
    Bind(app, "--n,--n0", "n0", "Samples per EP (total samples when L = 1)");
    Bind(app, "--L", "L", "Number of EPs");
    Bind(app, "--sigma", "sigma_ch", "Channel noise std ('auto' = s_opt)");
    Bind(app, "--At", "At", "Transmit amplitude A_t");
    Bind(app, "--policy", "policy", "random_nonadaptive | overfit_attack");
    Bind(app, "--threads", "threads", "Worker threads for trials");
    Bind(app, "--transcript", "transcript_out",
         "Write the first trial's transcript CSV here");
  }

  void Bind(CLI::App* app, const std::string& names, const std::string& key,
            const std::string& help) {
    values.emplace_back();
    bound.emplace_back(app->add_option(names, values.back(), help), key);
  }

  ConfigEntries Overrides() const {
    ConfigEntries out;
    for (std::size_t i = 0; i < bound.size(); ++i) {
      if (bound[i].first->count() > 0)
        out[bound[i].second] = {values[i],
                                bound[i].first->get_name(false, true)};
    }
    for (const std::string& s : sets) {
      const auto eq = s.find('=');
      if (eq == std::string::npos || eq == 0)
        throw ConfigError("--set: expected key=value, got '" + s + "'");
      out[s.substr(0, eq)] = {s.substr(eq + 1), "--set " + s.substr(0, eq)};
    }
    return out;
  }

  // Built-in defaults < OTAADA_SEED < config file < flags.
  ExperimentConfig Resolve(std::ostream& err) const {
    ConfigEntries entries;
    if (const char* env = std::getenv(kSeedEnvVar); env && *env)
      entries["seed"] = {env, std::string("environment ") + kSeedEnvVar};
    if (!config_path.empty()) MergeEntries(entries, LoadConfigFile(config_path));
    MergeEntries(entries, Overrides());
    std::vector<std::string> warnings;
    ExperimentConfig cfg = BuildConfig(entries, lenient, &warnings);
    for (const auto& w : warnings) err << "warning: " << w << "\n";
    return cfg;
  }
};

void WriteText(const std::string& path, const std::string& text) {
  if (path == "-") {
    std::cout << text << std::flush;
    return;
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot open output file '" + path + "'");
  out << text;
  if (!out.flush()) throw Error("failed writing '" + path + "'");
}

int RunBounds(const CommonFlags& flags, const std::optional<double>& k) {
  const ExperimentConfig cfg = flags.Resolve(std::cerr);
  if (cfg.sigma_ch_auto || !cfg.sigma_ch)
    throw ConfigError("bounds: --sigma must be given as a number");
  const AccuracySpec acc = cfg.accuracy();
  const SystemConfig system(cfg.RequireN0(), cfg.L, *cfg.sigma_ch,
                            cfg.amplitude);
  const BoundsReport r = ComputeBounds(system, acc, k);

  auto num = [](double v) { return FormatNumber(v, 10); };
  std::ostream& os = std::cout;
  os << "n_eq = " << r.n_eq << "\n"
     << "sigma_over_At = " << num(r.sigma_normalized) << "\n"
     << "k = "
     << (flags.floor ? FormatNumber(r.budget.floored(), 17) : num(r.budget.k))
     << "\n"
     << "k1 = " << num(r.budget.k1) << "\n"
     << "k2 = " << (r.budget.k2_saturated ? "saturated" : num(r.budget.k2))
     << "\n"
     << "regime = " << RegimeName(r.budget.regime) << "\n"
     << "s_opt = " << num(r.s_opt) << "\n"
     << "At_opt = " << num(r.amplitude_opt) << "\n"
     << "snr_db = " << num(r.snr_db) << "\n"
     << "amplitude_ratio = " << num(r.amplitude_ratio) << "\n"
     << "snr_opt_db = " << num(r.snr_opt_db) << "\n";
  if (r.alpha_of) os << "alpha_of_k = " << num(*r.alpha_of) << "\n";
  if (cfg.out != "-")
    WriteText(cfg.out, RenderCsv(BoundsTable(system, r),
                                 HeaderComments("bounds", cfg)));
  return kExitOk;
}

int RunFigure(const CommonFlags& flags, const std::string& positional) {
  ExperimentConfig cfg = flags.Resolve(std::cerr);
  if (!positional.empty()) cfg.figure = positional;
  if (cfg.figure.empty())
    throw ConfigError("figure: missing figure name (or 'figure' config key)");
  const Figure figure = ParseFigure(cfg.figure);
  const CsvTable table = FigureTable(figure, cfg);
  WriteText(cfg.out, RenderCsv(table, HeaderComments("figure", cfg)));
  return kExitOk;
}

int RunSimulate(const CommonFlags& flags) {
  const ExperimentConfig cfg = flags.Resolve(std::cerr);
  const SimulationPlan plan = PlanSimulation(cfg);
  for (const auto& note : plan.notes) std::cerr << "note: " << note << "\n";
  const AccuracyReport report = RunPlannedSimulation(plan, cfg);
  WriteText(cfg.out,
            RenderCsv(AccuracyTable(report),
                      HeaderComments("simulate", cfg,
                                     SimulationComments(plan, report))));
  if (!cfg.transcript_out.empty()) {
    WriteText(cfg.transcript_out,
              RenderCsv(TranscriptTable(FirstTrialTranscript(plan, cfg)),
                        HeaderComments("simulate", cfg, {"transcript: trial 0"})));
  }
  (cfg.out == "-" ? std::cerr : std::cout) << AccuracySummaryLine(report)
                                           << "\n";
  return kExitOk;
}

int RunAttackDemo(const CommonFlags& flags) {
  const ExperimentConfig cfg = flags.Resolve(std::cerr);
  const AttackLadder ladder = RunAttackLadder(cfg);
  std::vector<std::string> extra;
  extra.push_back("ladder: k=" + std::to_string(ladder.k) +
                  " s_ref=" + FormatNumber(ladder.s_ref) +
                  (ladder.fallback ? " (k2 = 1 level; s_opt undefined at this n)"
                                   : " (s_opt)"));
  const std::string csv = RenderCsv(AttackLadderTable(ladder),
                                    HeaderComments("attack-demo", cfg, extra));
  WriteText(cfg.out, csv);
  if (cfg.out != "-") {
    for (const LadderRung& r : ladder.rungs) {
      std::cout << r.label << ": sigma_over_At="
                << FormatNumber(r.sigma_over_at, 6) << " "
                << AccuracySummaryLine(r.report) << "\n";
    }
  }
  return kExitOk;
}

int Main(int argc, char** argv) {
  CLI::App app{
      "otaada: accurately answerable query budgets and Monte-Carlo checks for "
      "adaptive data analysis over noisy channels"};
  app.footer(std::string("Environment:\n  ") + kSeedEnvVar +
             "  default master seed (overridden by the config file and "
             "--seed)\n\nExit codes: 0 ok, 2 usage/config, 3 bound domain, "
             "4 runtime");
  app.require_subcommand(1);

  CommonFlags bounds_flags, figure_flags, simulate_flags, attack_flags;
  auto* bounds = app.add_subcommand(
      "bounds", "Query budget k = min(k1, k2), s_opt and SNR for one system");
  bounds_flags.Add(bounds);
  std::optional<double> bounds_k;
  std::string bounds_k_text;
  auto* k_opt = bounds->add_option(
      "--k", bounds_k_text, "Query count for the forward alpha(n, sigma, k)");

  auto* figure = app.add_subcommand("figure", "Write a figure dataset as CSV");
  figure_flags.Add(figure);
  std::string figure_name;
  figure->add_option("name", figure_name,
                     "g_vs_c | k_vs_ratio | kmax_vs_n | k_vs_L | "
                     "k_vs_L_optimized");

  auto* simulate = app.add_subcommand(
      "simulate", "Monte-Carlo accuracy of an analyst policy over the MAC");
  simulate_flags.Add(simulate);
  simulate_flags.Bind(simulate, "--k", "k", "Rounds per session");

  auto* attack = app.add_subcommand(
      "attack-demo", "Overfitting attack across a ladder of channel noise");
  attack_flags.Add(attack);
  attack_flags.Bind(attack, "--k", "k", "Rounds per session (default 1001)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (*bounds) {
      if (k_opt->count() > 0) {
        try {
          bounds_k = ParseDouble(bounds_k_text);
        } catch (const InvalidArgumentError& e) {
          throw ConfigError(std::string("--k: ") + e.what());
        }
      }
      return RunBounds(bounds_flags, bounds_k);
    }
    if (*figure) return RunFigure(figure_flags, figure_name);
    if (*simulate) return RunSimulate(simulate_flags);
    if (*attack) return RunAttackDemo(attack_flags);
  } catch (const InvalidArgumentError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const DomainError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitDomain;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
  return kExitUsage;
}

}  // namespace
}  // namespace otaada

int main(int argc, char** argv) { return otaada::Main(argc, argv); }
