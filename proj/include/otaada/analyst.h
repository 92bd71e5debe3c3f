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

#ifndef OTAADA_ANALYST_H_
#define OTAADA_ANALYST_H_

// Analysts that drive sessions, and the Monte-Carlo (alpha, beta)-accuracy
// evaluator.
//
// The adversarial analyst is the random-probe / sign-majority overfitting
// attack: it asks k - 1 uniformly random 0/1 queries, records whether each
// answer came out above the population mean, and finally asks the query that
// selects the domain points whose probes agreed with those signs. Without
// noise the final query's empirical answer is far from its true answer.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <exception>
#include <memory>
#include <ostream>
#include <span>
#include <sstream>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "otaada/csv.h"
#include "otaada/errors.h"
#include "otaada/federated_sim.h"
#include "otaada/random.h"

namespace otaada {

// Query with i.i.d. uniform {0, 1} values.
inline QueryTable MakeRandomQuery(std::size_t domain_size, Rng& rng) {
  if (domain_size == 0)
    throw InvalidArgumentError("MakeRandomQuery: domain_size must be >= 1");
  std::vector<double> values(domain_size);
  std::uint64_t bits = 0;
  for (std::size_t x = 0; x < domain_size; ++x) {
    if (x % 64 == 0) bits = rng();
    values[x] = static_cast<double>(bits & 1U);
    bits >>= 1;
  }
  return QueryTable(std::move(values));
}

namespace internal {

// score[x] += s (2 probe[x] - 1), s = +1 if the answer exceeds the mean.
inline void AccumulateVote(std::vector<double>& score, const QueryTable& probe,
                           double answer, double population_mean) {
  const double sign = answer > population_mean ? 1.0 : -1.0;
  for (std::size_t x = 0; x < score.size(); ++x)
    score[x] += sign * (2.0 * probe[x] - 1.0);
}

inline QueryTable MajorityQuery(const std::vector<double>& score) {
  std::vector<double> values(score.size());
  for (std::size_t x = 0; x < score.size(); ++x)
    values[x] = score[x] > 0.0 ? 1.0 : 0.0;
  return QueryTable(std::move(values));
}

}  // namespace internal

// Majority-vote query built from the first probes.size() rounds of the
// transcript. Ties resolve to 0.
inline QueryTable OverfitAttackFinalQuery(const Transcript& transcript,
                                          std::span<const QueryTable> probes,
                                          double population_mean) {
  if (probes.size() > transcript.rounds.size()) {
    std::ostringstream msg;
    msg << "OverfitAttackFinalQuery: " << probes.size() << " probes but only "
        << transcript.rounds.size() << " answered rounds";
    throw InvalidArgumentError(msg.str());
  }
  if (probes.empty())
    throw InvalidArgumentError("OverfitAttackFinalQuery: no probes");
  const std::size_t domain = probes.front().size();
  std::vector<double> score(domain, 0.0);
  for (std::size_t j = 0; j < probes.size(); ++j) {
    if (probes[j].size() != domain)
      throw InvalidArgumentError("OverfitAttackFinalQuery: probe size mismatch");
    internal::AccumulateVote(score, probes[j], transcript.rounds[j].normalized,
                             population_mean);
  }
  return internal::MajorityQuery(score);
}

// Asks its queries in order, then refuses.
class FixedQueriesAnalyst : public Analyst {
 public:
  explicit FixedQueriesAnalyst(
      std::vector<std::shared_ptr<const QueryTable>> queries)
      : queries_(std::move(queries)) {}

  std::shared_ptr<const QueryTable> NextQuery(
      const Transcript& transcript) override {
    const std::size_t i = transcript.rounds.size();
    return i < queries_.size() ? queries_[i] : nullptr;
  }

 private:
  std::vector<std::shared_ptr<const QueryTable>> queries_;
};

// Fresh random 0/1 queries that ignore every answer.
class RandomNonadaptiveAnalyst : public Analyst {
 public:
  RandomNonadaptiveAnalyst(std::size_t domain_size, std::int64_t max_queries,
                           std::uint64_t seed)
      : domain_size_(domain_size), max_queries_(max_queries), rng_(seed) {}

  std::shared_ptr<const QueryTable> NextQuery(
      const Transcript& transcript) override {
    if (static_cast<std::int64_t>(transcript.rounds.size()) >= max_queries_)
      return nullptr;
    return std::make_shared<const QueryTable>(
        MakeRandomQuery(domain_size_, rng_));
  }

 private:
  std::size_t domain_size_;
  std::int64_t max_queries_;
  Rng rng_;
};

// k - 1 random probes followed by the majority-vote query. Votes are
// accumulated as answers arrive, so probes need not be retained.
class OverfitAttackAnalyst : public Analyst {
 public:
  OverfitAttackAnalyst(std::size_t domain_size, std::int64_t k,
                       double population_mean, std::uint64_t seed)
      : domain_size_(domain_size),
        k_(k),
        population_mean_(population_mean),
        rng_(seed),
        score_(domain_size, 0.0) {
    if (k < 1) throw InvalidArgumentError("OverfitAttackAnalyst: k < 1");
  }

  std::shared_ptr<const QueryTable> NextQuery(
      const Transcript& transcript) override {
    const auto round = static_cast<std::int64_t>(transcript.rounds.size());
    if (round >= k_) return nullptr;
    if (last_probe_ && round > 0) {
      internal::AccumulateVote(score_, *last_probe_,
                               transcript.rounds.back().normalized,
                               population_mean_);
      last_probe_.reset();
    }
    if (round < k_ - 1) {
      last_probe_ = std::make_shared<const QueryTable>(
          MakeRandomQuery(domain_size_, rng_));
      return last_probe_;
    }
    return std::make_shared<const QueryTable>(internal::MajorityQuery(score_));
  }

 private:
  std::size_t domain_size_;
  std::int64_t k_;
  double population_mean_;
  Rng rng_;
  std::vector<double> score_;
  std::shared_ptr<const QueryTable> last_probe_;
};

struct AnalystPolicy {
  enum class Kind { kFixedQueries, kRandomNonadaptive, kOverfitAttack };

  Kind kind = Kind::kRandomNonadaptive;
  // kFixedQueries only.
  std::vector<std::shared_ptr<const QueryTable>> queries;
  // kOverfitAttack only: threshold for reading an answer's sign. 0.5 is the
  // true answer of a random 0/1 query under any population.
  double population_mean = 0.5;
};

inline const char* PolicyName(AnalystPolicy::Kind kind) {
  switch (kind) {
    case AnalystPolicy::Kind::kFixedQueries:
      return "fixed_queries";
    case AnalystPolicy::Kind::kRandomNonadaptive:
      return "random_nonadaptive";
    case AnalystPolicy::Kind::kOverfitAttack:
      return "overfit_attack";
  }
  return "unknown";
}

inline std::unique_ptr<Analyst> MakeAnalyst(const AnalystPolicy& policy,
                                            std::size_t domain_size,
                                            std::int64_t k,
                                            std::uint64_t seed) {
  switch (policy.kind) {
    case AnalystPolicy::Kind::kFixedQueries:
      for (const auto& q : policy.queries)
        if (!q || q->size() != domain_size)
          throw InvalidArgumentError("fixed query does not match the domain");
      return std::make_unique<FixedQueriesAnalyst>(policy.queries);
    case AnalystPolicy::Kind::kRandomNonadaptive:
      return std::make_unique<RandomNonadaptiveAnalyst>(domain_size, k, seed);
    case AnalystPolicy::Kind::kOverfitAttack:
      return std::make_unique<OverfitAttackAnalyst>(
          domain_size, k, policy.population_mean, seed);
  }
  throw InvalidArgumentError("unknown analyst policy");
}

// Everything needed to instantiate a session apart from the seeds.
struct SimTemplate {
  std::shared_ptr<const Population> population;
  std::int64_t n0 = 1;
  std::int64_t L = 1;
  double sigma_ch = 0.0;  // 0 is a noiseless channel
  double amplitude = 1.0;

  void Validate() const {
    if (!population) throw InvalidArgumentError("SimTemplate: no population");
    if (n0 < 1) throw InvalidArgumentError("SimTemplate: n0 must be >= 1");
    if (L < 1) throw InvalidArgumentError("SimTemplate: L must be >= 1");
    if (!(sigma_ch >= 0.0) || !std::isfinite(sigma_ch))
      throw InvalidArgumentError("SimTemplate: sigma_ch must be >= 0");
    if (!(amplitude > 0.0) || !std::isfinite(amplitude))
      throw InvalidArgumentError("SimTemplate: A_t must be > 0");
  }
};

// Samples fresh EP datasets and runs one session under the policy.
inline Transcript RunPolicySession(const AnalystPolicy& policy,
                                   const SimTemplate& sim, std::int64_t k,
                                   const SessionSeeds& seeds,
                                   SessionOptions options = {}) {
  sim.Validate();
  Rng data_rng(seeds.data);
  std::vector<Dataset> datasets;
  datasets.reserve(static_cast<std::size_t>(sim.L));
  for (std::int64_t l = 0; l < sim.L; ++l)
    datasets.push_back(SampleDataset(*sim.population, sim.n0, data_rng, l));
  ChannelModel channel(sim.sigma_ch, seeds.channel);
  auto analyst =
      MakeAnalyst(policy, sim.population->domain_size(), k, seeds.analyst);
  return RunSession(*sim.population, datasets, *analyst, sim.amplitude, k,
                    channel, options);
}

struct WilsonInterval {
  double lo;
  double hi;
};

// 95% Wilson score interval for `failures` out of `trials`.
inline WilsonInterval Wilson95(std::int64_t failures, std::int64_t trials) {
  if (trials < 1) throw InvalidArgumentError("Wilson95: trials must be >= 1");
  constexpr double z = 1.959963984540054;
  const double n = static_cast<double>(trials);
  const double p = static_cast<double>(failures) / n;
  const double denom = 1.0 + z * z / n;
  const double center = (p + z * z / (2.0 * n)) / denom;
  const double half =
      z * std::sqrt(p * (1.0 - p) / n + z * z / (4.0 * n * n)) / denom;
  // Rounding can push an endpoint past p when failures is 0 or trials.
  return {std::clamp(center - half, 0.0, p), std::clamp(center + half, p, 1.0)};
}

struct AccuracyReport {
  std::int64_t trials = 0;
  // Per trial: max over rounds of |q_i(P) - normalized a_i|.
  std::vector<double> max_errors;
  // Per trial: error of the last answered round.
  std::vector<double> final_errors;
  double alpha = 0.0;
  std::int64_t failures = 0;
  double failure_rate = 0.0;
  WilsonInterval wilson{0.0, 1.0};
  // Sessions the analyst ended before k rounds.
  std::int64_t short_sessions = 0;
};

// Runs `trials` independent sessions (fresh datasets and noise per trial,
// seeds derived from master_seed and the trial index) and estimates
// Pr[max_i |q_i(P) - a_i| >= alpha]. Trials are split across `threads`
// workers; the report does not depend on the thread count.
inline AccuracyReport EvaluateAccuracy(const AnalystPolicy& policy,
                                       const SimTemplate& sim, std::int64_t k,
                                       double alpha, std::int64_t trials,
                                       std::uint64_t master_seed,
                                       int threads = 1) {
  if (trials < 1)
    throw InvalidArgumentError("EvaluateAccuracy: trials must be >= 1");
  if (!(alpha > 0.0))
    throw InvalidArgumentError("EvaluateAccuracy: alpha must be > 0");
  sim.Validate();

  AccuracyReport report;
  report.trials = trials;
  report.alpha = alpha;
  report.max_errors.assign(static_cast<std::size_t>(trials), 0.0);
  report.final_errors.assign(static_cast<std::size_t>(trials), 0.0);
  std::vector<char> short_flags(static_cast<std::size_t>(trials), 0);

  auto run_range = [&](std::int64_t begin, std::int64_t end) {
    for (std::int64_t t = begin; t < end; ++t) {
      const Transcript transcript =
          RunPolicySession(policy, sim, k, SessionSeeds::ForTrial(master_seed, t),
                           SessionOptions{.retain_queries = false});
      const auto i = static_cast<std::size_t>(t);
      report.max_errors[i] = transcript.MaxError();
      report.final_errors[i] =
          transcript.rounds.empty() ? 0.0 : transcript.rounds.back().abs_error();
      short_flags[i] = transcript.ended_early ? 1 : 0;
    }
  };

  const auto workers = static_cast<std::int64_t>(
      std::clamp<std::int64_t>(threads, 1, trials));
  if (workers == 1) {
    run_range(0, trials);
  } else {
    std::vector<std::exception_ptr> errors(static_cast<std::size_t>(workers));
    {
      std::vector<std::jthread> pool;
      for (std::int64_t w = 0; w < workers; ++w) {
        pool.emplace_back([&, w] {
          try {
            run_range(trials * w / workers, trials * (w + 1) / workers);
          } catch (...) {
            errors[static_cast<std::size_t>(w)] = std::current_exception();
          }
        });
      }
    }
    for (const auto& e : errors)
      if (e) std::rethrow_exception(e);
  }

  for (std::size_t i = 0; i < report.max_errors.size(); ++i) {
    if (report.max_errors[i] >= alpha) ++report.failures;
    report.short_sessions += short_flags[i];
  }
  report.failure_rate =
      static_cast<double>(report.failures) / static_cast<double>(trials);
  report.wilson = Wilson95(report.failures, trials);
  return report;
}

// Columns: trial, max_error, final_error, failed. The last row, labelled
// "summary", holds the mean errors and the failure count.
inline CsvTable AccuracyTable(const AccuracyReport& report) {
  CsvTable table;
  table.columns = {"trial", "max_error", "final_error", "failed"};
  double mean_max = 0.0;
  double mean_final = 0.0;
  for (std::size_t i = 0; i < report.max_errors.size(); ++i) {
    const bool failed = report.max_errors[i] >= report.alpha;
    table.rows.push_back({static_cast<std::int64_t>(i), report.max_errors[i],
                          report.final_errors[i],
                          static_cast<std::int64_t>(failed)});
    mean_max += report.max_errors[i];
    mean_final += report.final_errors[i];
  }
  const auto n = static_cast<double>(report.trials);
  table.rows.push_back({std::string("summary"), mean_max / n, mean_final / n,
                        report.failures});
  return table;
}

inline std::string AccuracySummaryLine(const AccuracyReport& report) {
  std::ostringstream out;
  out << "failure_rate=" << FormatNumber(report.failure_rate)
      << " wilson95=[" << FormatNumber(report.wilson.lo) << ","
      << FormatNumber(report.wilson.hi) << "] failures=" << report.failures
      << " trials=" << report.trials << " alpha=" << FormatNumber(report.alpha)
      << " short_sessions=" << report.short_sessions;
  return out.str();
}

}  // namespace otaada

#endif  // OTAADA_ANALYST_H_
