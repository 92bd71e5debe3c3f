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

#ifndef OTAADA_FEDERATED_SIM_H_
#define OTAADA_FEDERATED_SIM_H_

// Executable model of adaptive query answering over a Gaussian channel.
//
// A Population is a distribution over the finite domain {0..N-1}. Edge points
// (EPs) each hold a Dataset of n0 i.i.d. samples. For every statistical query
// q: {0..N-1} -> [0,1] each EP computes its empirical mean and transmits it,
// scaled by the amplitude A_t, uncoded. The receiver sees
//
//   a = A_t * sum_l q(S_l) + z,   z ~ N(0, sigma_ch^2),
//
// a single noise draw however many EPs transmit (over-the-air aggregation).
// L = 1 is the point-to-point link. a / (L A_t) estimates the pooled
// empirical mean.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <memory>
#include <numeric>
#include <ostream>
#include <random>
#include <span>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "otaada/csv.h"
#include "otaada/errors.h"
#include "otaada/random.h"

namespace otaada {

class Population {
 public:
  explicit Population(std::vector<double> probabilities)
      : probabilities_(std::move(probabilities)) {
    if (probabilities_.empty())
      throw InvalidArgumentError("Population: empty domain");
    double total = 0.0;
    for (double p : probabilities_) {
      if (!(p >= 0.0) || !std::isfinite(p))
        throw InvalidArgumentError("Population: probabilities must be >= 0");
      total += p;
    }
    if (std::abs(total - 1.0) > 1e-12) {
      std::ostringstream msg;
      msg << "Population: probabilities sum to " << total << ", not 1";
      throw InvalidArgumentError(msg.str());
    }
    const double first = probabilities_.front();
    uniform_ = std::all_of(probabilities_.begin(), probabilities_.end(),
                           [first](double p) { return p == first; });
  }

  static Population Uniform(std::size_t domain_size) {
    if (domain_size == 0)
      throw InvalidArgumentError("Population: empty domain");
    return Population(std::vector<double>(
        domain_size, 1.0 / static_cast<double>(domain_size)));
  }

  std::size_t domain_size() const { return probabilities_.size(); }
  const std::vector<double>& probabilities() const { return probabilities_; }
  bool is_uniform() const { return uniform_; }

 private:
  std::vector<double> probabilities_;
  bool uniform_ = false;
};

// A statistical query as a value table over the domain.
class QueryTable {
 public:
  explicit QueryTable(std::vector<double> values) : values_(std::move(values)) {
    if (values_.empty()) throw InvalidArgumentError("QueryTable: empty");
    for (double v : values_) {
      if (!(v >= 0.0 && v <= 1.0)) {
        std::ostringstream msg;
        msg << "QueryTable: value " << v << " is outside [0, 1]";
        throw InvalidArgumentError(msg.str());
      }
    }
  }

  static QueryTable Constant(std::size_t domain_size, double value) {
    return QueryTable(std::vector<double>(domain_size, value));
  }

  std::size_t size() const { return values_.size(); }
  double operator[](std::size_t x) const { return values_[x]; }
  const std::vector<double>& values() const { return values_; }

  friend bool operator==(const QueryTable&, const QueryTable&) = default;

 private:
  std::vector<double> values_;
};

// Samples held by one EP. Keeps a compressed histogram so that answering a
// query costs O(distinct samples).
class Dataset {
 public:
  Dataset(std::vector<std::uint32_t> samples, std::size_t domain_size,
          std::int64_t ep_id = 0)
      : samples_(std::move(samples)), domain_size_(domain_size), ep_id_(ep_id) {
    std::vector<std::uint32_t> sorted = samples_;
    std::sort(sorted.begin(), sorted.end());
    for (std::uint32_t x : sorted) {
      if (x >= domain_size_) {
        std::ostringstream msg;
        msg << "Dataset: sample " << x << " outside domain of size "
            << domain_size_;
        throw InvalidArgumentError(msg.str());
      }
      if (!support_.empty() && support_.back() == x) {
        ++counts_.back();
      } else {
        support_.push_back(x);
        counts_.push_back(1);
      }
    }
  }

  const std::vector<std::uint32_t>& samples() const { return samples_; }
  std::size_t size() const { return samples_.size(); }
  bool empty() const { return samples_.empty(); }
  std::size_t domain_size() const { return domain_size_; }
  std::int64_t ep_id() const { return ep_id_; }

  // Distinct sample values, ascending, with multiplicities.
  const std::vector<std::uint32_t>& support() const { return support_; }
  const std::vector<std::uint32_t>& counts() const { return counts_; }

 private:
  std::vector<std::uint32_t> samples_;
  std::size_t domain_size_;
  std::int64_t ep_id_;
  std::vector<std::uint32_t> support_;
  std::vector<std::uint32_t> counts_;
};

// q(P) = E_{x ~ P}[q(x)].
inline double TrueAnswer(const Population& pop, const QueryTable& q) {
  if (q.size() != pop.domain_size())
    throw InvalidArgumentError("TrueAnswer: query/domain size mismatch");
  const auto& p = pop.probabilities();
  double sum = 0.0;
  for (std::size_t x = 0; x < p.size(); ++x) sum += p[x] * q[x];
  return sum;
}

inline Dataset SampleDataset(const Population& pop, std::int64_t n, Rng& rng,
                             std::int64_t ep_id = 0) {
  if (n < 1) throw InvalidArgumentError("SampleDataset: n must be >= 1");
  std::vector<std::uint32_t> samples(static_cast<std::size_t>(n));
  if (pop.is_uniform()) {
    std::uniform_int_distribution<std::uint32_t> dist(
        0, static_cast<std::uint32_t>(pop.domain_size() - 1));
    for (auto& s : samples) s = dist(rng);
  } else {
    const auto& p = pop.probabilities();
    std::discrete_distribution<std::uint32_t> dist(p.begin(), p.end());
    for (auto& s : samples) s = dist(rng);
  }
  return Dataset(std::move(samples), pop.domain_size(), ep_id);
}

// q(S) = (1/n) sum_j q(x_j).
inline double EmpiricalAnswer(const Dataset& ds, const QueryTable& q) {
  if (ds.empty()) throw InvalidArgumentError("EmpiricalAnswer: empty dataset");
  if (q.size() != ds.domain_size())
    throw InvalidArgumentError("EmpiricalAnswer: query/domain size mismatch");
  const auto& support = ds.support();
  const auto& counts = ds.counts();
  double sum = 0.0;
  for (std::size_t i = 0; i < support.size(); ++i)
    sum += counts[i] * q[support[i]];
  return sum / static_cast<double>(ds.size());
}

// Block-constant AWGN. Every Draw() consumes exactly one N(0, sigma^2)
// sample from the channel's own stream. sigma = 0 is a noiseless link.
class ChannelModel {
 public:
  ChannelModel(double sigma, std::uint64_t seed) : sigma_(sigma), rng_(seed) {
    if (!(sigma >= 0.0) || !std::isfinite(sigma))
      throw InvalidArgumentError("ChannelModel: sigma must be finite and >= 0");
  }

  double Draw() {
    ++draws_;
    return sigma_ * normal_(rng_);
  }

  double sigma() const { return sigma_; }
  std::int64_t draws() const { return draws_; }

 private:
  double sigma_;
  Rng rng_;
  std::normal_distribution<double> normal_{0.0, 1.0};
  std::int64_t draws_ = 0;
};

// a = A_t q(S) + z.
inline double TransmitP2P(const Dataset& ds, const QueryTable& q,
                          double amplitude, ChannelModel& channel) {
  return amplitude * EmpiricalAnswer(ds, q) + channel.Draw();
}

// a = A_t sum_l q(S_l) + z, one noise draw in total. Per-EP empirical answers
// are written to ep_answers when given.
inline double TransmitMac(std::span<const Dataset> datasets,
                          const QueryTable& q, double amplitude,
                          ChannelModel& channel,
                          std::vector<double>* ep_answers = nullptr) {
  if (datasets.empty())
    throw InvalidArgumentError("TransmitMac: no transmitting EPs");
  if (ep_answers) ep_answers->clear();
  double sum = 0.0;
  for (const Dataset& ds : datasets) {
    const double answer = EmpiricalAnswer(ds, q);
    if (ep_answers) ep_answers->push_back(answer);
    sum += answer;
  }
  return amplitude * sum + channel.Draw();
}

// a / (L A_t).
inline double NormalizeReceived(double received, std::int64_t num_eps,
                                double amplitude) {
  if (num_eps < 1) throw InvalidArgumentError("NormalizeReceived: L < 1");
  if (!(amplitude > 0.0))
    throw InvalidArgumentError("NormalizeReceived: A_t must be > 0");
  return received / (static_cast<double>(num_eps) * amplitude);
}

struct Round {
  // Null when the session was run without retaining queries.
  std::shared_ptr<const QueryTable> query;
  std::vector<double> ep_answers;
  double received = 0.0;    // raw channel output a_i
  double normalized = 0.0;  // a_i / (L A_t)
  double true_answer = 0.0;

  double abs_error() const { return std::abs(true_answer - normalized); }
};

struct Transcript {
  std::vector<Round> rounds;
  // Set when the analyst stopped before the requested number of rounds.
  bool ended_early = false;

  double MaxError() const {
    double worst = 0.0;
    for (const Round& r : rounds) worst = std::max(worst, r.abs_error());
    return worst;
  }
};

// Chooses the next query from the transcript so far. Returning null refuses
// further queries and ends the session.
class Analyst {
 public:
  virtual ~Analyst() = default;
  virtual std::shared_ptr<const QueryTable> NextQuery(
      const Transcript& transcript) = 0;
};

struct SessionOptions {
  // Keep every query table in the transcript. Long sessions over large
  // domains may turn this off; analysts still see answers.
  bool retain_queries = true;
};

// Runs up to k adaptive rounds over the MAC formed by `datasets`.
inline Transcript RunSession(const Population& pop,
                             std::span<const Dataset> datasets,
                             Analyst& analyst, double amplitude,
                             std::int64_t k, ChannelModel& channel,
                             SessionOptions options = {}) {
  if (k < 1) throw InvalidArgumentError("RunSession: k must be >= 1");
  if (datasets.empty())
    throw InvalidArgumentError("RunSession: at least one EP is required");
  if (!(amplitude > 0.0))
    throw InvalidArgumentError("RunSession: A_t must be > 0");
  const std::size_t n0 = datasets.front().size();
  for (const Dataset& ds : datasets) {
    if (ds.size() != n0) {
      std::ostringstream msg;
      msg << "RunSession: EP dataset sizes must be equal (" << ds.size()
          << " vs " << n0 << ")";
      throw InvalidArgumentError(msg.str());
    }
    if (ds.domain_size() != pop.domain_size())
      throw InvalidArgumentError("RunSession: dataset/population domain mismatch");
  }
  const auto num_eps = static_cast<std::int64_t>(datasets.size());

  Transcript transcript;
  transcript.rounds.reserve(static_cast<std::size_t>(std::min<std::int64_t>(k, 1 << 16)));
  for (std::int64_t i = 0; i < k; ++i) {
    std::shared_ptr<const QueryTable> q = analyst.NextQuery(transcript);
    if (!q) {
      transcript.ended_early = true;
      break;
    }
    if (q->size() != pop.domain_size())
      throw InvalidArgumentError("RunSession: query/domain size mismatch");
    Round round;
    round.received = TransmitMac(datasets, *q, amplitude, channel,
                                 &round.ep_answers);
    round.normalized = NormalizeReceived(round.received, num_eps, amplitude);
    round.true_answer = TrueAnswer(pop, *q);
    if (options.retain_queries) round.query = std::move(q);
    transcript.rounds.push_back(std::move(round));
  }
  return transcript;
}

// Columns: round, true_answer, received_normalized, abs_error.
inline CsvTable TranscriptTable(const Transcript& transcript) {
  CsvTable table;
  table.columns = {"round", "true_answer", "received_normalized", "abs_error"};
  for (std::size_t i = 0; i < transcript.rounds.size(); ++i) {
    const Round& r = transcript.rounds[i];
    table.rows.push_back({static_cast<std::int64_t>(i + 1), r.true_answer,
                          r.normalized, r.abs_error()});
  }
  return table;
}

}  // namespace otaada

#endif  // OTAADA_FEDERATED_SIM_H_
