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

#include "otaada/federated_sim.h"

#include <cmath>
#include <cstdint>
#include <memory>
#include <sstream>
#include <vector>

#include "gtest/gtest.h"

namespace otaada {
namespace {

// Sample mean and standard deviation.
struct Moments {
  double mean;
  double stddev;
};

Moments ComputeMoments(const std::vector<double>& xs) {
  double mean = 0.0;
  for (double x : xs) mean += x;
  mean /= static_cast<double>(xs.size());
  double var = 0.0;
  for (double x : xs) var += (x - mean) * (x - mean);
  var /= static_cast<double>(xs.size() - 1);
  return {mean, std::sqrt(var)};
}

class ScriptedAnalyst : public Analyst {
 public:
  ScriptedAnalyst(std::shared_ptr<const QueryTable> q, int count)
      : q_(std::move(q)), count_(count) {}
  std::shared_ptr<const QueryTable> NextQuery(const Transcript& t) override {
    return static_cast<int>(t.rounds.size()) < count_ ? q_ : nullptr;
  }

 private:
  std::shared_ptr<const QueryTable> q_;
  int count_;
};

TEST(PopulationTest, Validation) {
  EXPECT_THROW(Population({0.5, 0.4}), InvalidArgumentError);
  EXPECT_THROW(Population({1.5, -0.5}), InvalidArgumentError);
  EXPECT_THROW(Population(std::vector<double>{}), InvalidArgumentError);
  EXPECT_TRUE(Population::Uniform(7).is_uniform());
  EXPECT_FALSE(Population({0.1, 0.9}).is_uniform());
}

TEST(QueryTableTest, RejectsValuesOutsideUnitInterval) {
  EXPECT_THROW(QueryTable({0.0, 1.1}), InvalidArgumentError);
  EXPECT_THROW(QueryTable({-0.1}), InvalidArgumentError);
  EXPECT_THROW(QueryTable({std::nan("")}), InvalidArgumentError);
  EXPECT_NO_THROW(QueryTable({0.0, 0.25, 1.0}));
}

TEST(TrueAnswerTest, Examples) {
  EXPECT_DOUBLE_EQ(TrueAnswer(Population::Uniform(5), QueryTable::Constant(5, 1.0)),
                   1.0);
  EXPECT_DOUBLE_EQ(TrueAnswer(Population::Uniform(4), QueryTable({0, 0, 1, 1})),
                   0.5);
  EXPECT_DOUBLE_EQ(TrueAnswer(Population({0.1, 0.9}), QueryTable({0, 1})), 0.9);
  EXPECT_THROW(TrueAnswer(Population::Uniform(3), QueryTable({0, 1})),
               InvalidArgumentError);
}

TEST(SampleDatasetTest, PointMass) {
  Rng rng(1);
  const Dataset ds = SampleDataset(Population({0, 0, 0, 1, 0}), 5, rng);
  EXPECT_EQ(ds.samples(), (std::vector<std::uint32_t>{3, 3, 3, 3, 3}));
}

TEST(SampleDatasetTest, UniformFrequency) {
  Rng rng(2);
  const Dataset ds = SampleDataset(Population::Uniform(2), 100000, rng);
  const double freq0 = EmpiricalAnswer(ds, QueryTable({1.0, 0.0}));
  EXPECT_NEAR(freq0, 0.5, 0.01);
}

TEST(SampleDatasetTest, NonUniformFrequency) {
  Rng rng(3);
  const Dataset ds = SampleDataset(Population({0.2, 0.8}), 100000, rng);
  EXPECT_NEAR(EmpiricalAnswer(ds, QueryTable({0.0, 1.0})), 0.8, 0.01);
}

TEST(SampleDatasetTest, SameSeedSameData) {
  Rng a(42);
  Rng b(42);
  const Population pop = Population::Uniform(1000);
  EXPECT_EQ(SampleDataset(pop, 500, a).samples(),
            SampleDataset(pop, 500, b).samples());
  EXPECT_THROW(SampleDataset(pop, 0, a), InvalidArgumentError);
}

TEST(DatasetTest, RejectsSamplesOutsideDomain) {
  EXPECT_THROW(Dataset({0, 5}, 5), InvalidArgumentError);
}

TEST(EmpiricalAnswerTest, Examples) {
  EXPECT_DOUBLE_EQ(EmpiricalAnswer(Dataset({0, 1}, 2), QueryTable({0, 1})),
                   0.5);
  EXPECT_DOUBLE_EQ(
      EmpiricalAnswer(Dataset({3, 1, 4, 1, 5}, 6), QueryTable::Constant(6, 0.3)),
      0.3);
  const QueryTable q({0.1, 0.7, 0.2});
  EXPECT_DOUBLE_EQ(EmpiricalAnswer(Dataset(std::vector<std::uint32_t>(9, 1), 3), q),
                   0.7);
  EXPECT_THROW(EmpiricalAnswer(Dataset({}, 3), q), InvalidArgumentError);
}

TEST(TransmitP2PTest, NoiselessLimit) {
  const Dataset ds({0, 1, 1, 2}, 3);
  const QueryTable q({0.0, 0.5, 1.0});
  ChannelModel channel(1e-300, 7);
  EXPECT_NEAR(TransmitP2P(ds, q, 1.0, channel), EmpiricalAnswer(ds, q), 1e-12);
  EXPECT_EQ(channel.draws(), 1);
}

TEST(TransmitP2PTest, Reproducible) {
  const Dataset ds({0, 1, 1, 2}, 3);
  const QueryTable q({0.0, 0.5, 1.0});
  ChannelModel a(0.3, 99);
  ChannelModel b(0.3, 99);
  for (int i = 0; i < 10; ++i)
    EXPECT_EQ(TransmitP2P(ds, q, 2.0, a), TransmitP2P(ds, q, 2.0, b));
}

TEST(TransmitP2PTest, MeanConcentrates) {
  const Dataset ds({0, 1, 1, 2}, 3);
  const QueryTable q({0.0, 0.5, 1.0});
  const double sigma = 0.2;
  const double amplitude = 3.0;
  ChannelModel channel(sigma, 5);
  std::vector<double> xs;
  for (int i = 0; i < 10000; ++i)
    xs.push_back(TransmitP2P(ds, q, amplitude, channel));
  EXPECT_NEAR(ComputeMoments(xs).mean, amplitude * EmpiricalAnswer(ds, q),
              6.0 * sigma / 100.0);
}

TEST(TransmitMacTest, SingleEpMatchesPointToPoint) {
  const std::vector<Dataset> eps = {Dataset({0, 2, 2}, 3)};
  const QueryTable q({0.2, 0.5, 0.9});
  ChannelModel a(0.1, 17);
  ChannelModel b(0.1, 17);
  for (int i = 0; i < 20; ++i)
    EXPECT_EQ(TransmitMac(eps, q, 1.7, a), TransmitP2P(eps[0], q, 1.7, b));
}

TEST(TransmitMacTest, AdditiveOverIdenticalEps) {
  const Dataset ds({0, 1, 2, 2}, 3);
  const std::vector<Dataset> eps(4, ds);
  const QueryTable q({0.2, 0.5, 0.9});
  ChannelModel channel(1e-300, 1);
  EXPECT_NEAR(TransmitMac(eps, q, 1.0, channel), 4.0 * EmpiricalAnswer(ds, q),
              1e-12);
  EXPECT_EQ(channel.draws(), 1);
  std::vector<Dataset> none;
  EXPECT_THROW(TransmitMac(none, q, 1.0, channel), InvalidArgumentError);
}

TEST(TransmitMacTest, NormalizedFormIdentity) {
  // a/L = (A_t / (L n0)) sum_l sum_j q(x_{j,l}) + z / L.
  const std::vector<Dataset> eps = {Dataset({0, 1, 1}, 3), Dataset({2, 2, 0}, 3)};
  const QueryTable q({0.25, 0.5, 1.0});
  const double amplitude = 2.0;
  ChannelModel channel(0.4, 8);
  ChannelModel replay(0.4, 8);
  const double received = TransmitMac(eps, q, amplitude, channel);
  const double z = replay.Draw();
  const double sum_q = (0.25 + 0.5 + 0.5) + (1.0 + 1.0 + 0.25);
  EXPECT_NEAR(received / 2.0, amplitude / (2.0 * 3.0) * sum_q + z / 2.0,
              1e-14);
}

TEST(NormalizeReceivedTest, Examples) {
  EXPECT_DOUBLE_EQ(NormalizeReceived(5 * 2.5 * 0.5, 5, 2.5), 0.5);
  EXPECT_THROW(NormalizeReceived(1.0, 0, 1.0), InvalidArgumentError);
  EXPECT_THROW(NormalizeReceived(1.0, 1, 0.0), InvalidArgumentError);
}

TEST(NormalizeReceivedTest, NoiselessPipelineRecoversPooledMean) {
  Rng rng(10);
  const Population pop = Population::Uniform(50);
  std::vector<Dataset> eps;
  std::vector<std::uint32_t> pooled;
  for (int l = 0; l < 6; ++l) {
    eps.push_back(SampleDataset(pop, 40, rng, l));
    pooled.insert(pooled.end(), eps.back().samples().begin(),
                  eps.back().samples().end());
  }
  Rng qrng(11);
  std::vector<double> values(50);
  for (auto& v : values) v = std::uniform_real_distribution<double>(0, 1)(qrng);
  const QueryTable q(values);
  ChannelModel channel(1e-300, 3);
  const double normalized =
      NormalizeReceived(TransmitMac(eps, q, 3.0, channel), 6, 3.0);
  EXPECT_NEAR(normalized, EmpiricalAnswer(Dataset(pooled, 50), q), 1e-12);
}

TEST(NormalizeReceivedTest, NoiseStdShrinksWithLAndAmplitude) {
  const std::vector<Dataset> eps(5, Dataset({0, 1}, 2));
  const QueryTable q({0.0, 1.0});
  const double sigma = 0.8;
  const double amplitude = 2.0;
  ChannelModel channel(sigma, 21);
  std::vector<double> xs;
  for (int i = 0; i < 10000; ++i)
    xs.push_back(NormalizeReceived(TransmitMac(eps, q, amplitude, channel), 5,
                                   amplitude));
  const double expected = sigma / (5.0 * amplitude);
  EXPECT_NEAR(ComputeMoments(xs).stddev, expected, 0.05 * expected);
}

TEST(EquivalenceLawTest, MacMatchesPooledPointToPoint) {
  // L EPs of n0 samples over noise sigma vs. one EP holding all L n0 samples
  // over noise sigma / L: same first and second moments of the normalized
  // answer.
  Rng rng(31);
  const Population pop = Population::Uniform(100);
  const std::int64_t num_eps = 8;
  std::vector<Dataset> eps;
  std::vector<std::uint32_t> pooled;
  for (std::int64_t l = 0; l < num_eps; ++l) {
    eps.push_back(SampleDataset(pop, 25, rng, l));
    pooled.insert(pooled.end(), eps.back().samples().begin(),
                  eps.back().samples().end());
  }
  const Dataset pooled_ds(pooled, 100);
  Rng qrng(32);
  std::vector<double> values(100);
  for (auto& v : values) v = std::uniform_real_distribution<double>(0, 1)(qrng);
  const QueryTable q(values);

  const double sigma = 1.2;
  const double amplitude = 1.5;
  ChannelModel mac_channel(sigma, 100);
  ChannelModel p2p_channel(sigma / num_eps, 200);
  std::vector<double> mac;
  std::vector<double> p2p;
  for (int i = 0; i < 10000; ++i) {
    mac.push_back(NormalizeReceived(TransmitMac(eps, q, amplitude, mac_channel),
                                    num_eps, amplitude));
    p2p.push_back(
        NormalizeReceived(TransmitP2P(pooled_ds, q, amplitude, p2p_channel), 1,
                          amplitude));
  }
  const Moments m = ComputeMoments(mac);
  const Moments p = ComputeMoments(p2p);
  const double noise_std = sigma / (num_eps * amplitude);
  EXPECT_NEAR(m.mean, p.mean, 0.05 * noise_std + 1e-12);
  EXPECT_NEAR(m.stddev, p.stddev, 0.05 * noise_std);

  ChannelModel quiet_a(0.0, 1);
  ChannelModel quiet_b(0.0, 1);
  EXPECT_NEAR(NormalizeReceived(TransmitMac(eps, q, amplitude, quiet_a), num_eps,
                                amplitude),
              NormalizeReceived(TransmitP2P(pooled_ds, q, amplitude, quiet_b), 1,
                                amplitude),
              1e-14);
}

TEST(RunSessionTest, ImmediateRefusal) {
  const Population pop = Population::Uniform(4);
  const std::vector<Dataset> eps = {Dataset({0, 1}, 4)};
  ScriptedAnalyst analyst(nullptr, 0);
  ChannelModel channel(0.1, 1);
  const Transcript t = RunSession(pop, eps, analyst, 1.0, 5, channel);
  EXPECT_TRUE(t.rounds.empty());
  EXPECT_TRUE(t.ended_early);
  EXPECT_EQ(channel.draws(), 0);
}

TEST(RunSessionTest, ConstantQueryAnswers) {
  const Population pop = Population::Uniform(4);
  const std::vector<Dataset> eps = {Dataset({0, 1}, 4), Dataset({2, 3}, 4)};
  ScriptedAnalyst analyst(
      std::make_shared<const QueryTable>(QueryTable::Constant(4, 1.0)), 3);
  const double amplitude = 2.0;
  ChannelModel channel(0.5, 12);
  ChannelModel replay(0.5, 12);
  const Transcript t = RunSession(pop, eps, analyst, amplitude, 3, channel);
  ASSERT_EQ(t.rounds.size(), 3U);
  EXPECT_FALSE(t.ended_early);
  for (const Round& r : t.rounds) {
    EXPECT_EQ(r.true_answer, 1.0);
    EXPECT_EQ(r.ep_answers, (std::vector<double>{1.0, 1.0}));
    const double z = replay.Draw();
    EXPECT_EQ(r.received, amplitude * 2.0 + z);
    EXPECT_NEAR(r.normalized, 1.0 + z / (2.0 * amplitude), 1e-15);
  }
  EXPECT_EQ(channel.draws(), 3);
}

TEST(RunSessionTest, OneNoiseDrawPerRoundForAnyL) {
  const Population pop = Population::Uniform(10);
  Rng rng(4);
  for (int num_eps : {1, 3, 17}) {
    std::vector<Dataset> eps;
    for (int l = 0; l < num_eps; ++l) eps.push_back(SampleDataset(pop, 5, rng));
    ScriptedAnalyst analyst(
        std::make_shared<const QueryTable>(QueryTable::Constant(10, 0.5)), 9);
    ChannelModel channel(1.0, 5);
    RunSession(pop, eps, analyst, 1.0, 9, channel);
    EXPECT_EQ(channel.draws(), 9) << num_eps;
  }
}

TEST(RunSessionTest, RejectsUnequalDatasets) {
  const Population pop = Population::Uniform(4);
  const std::vector<Dataset> eps = {Dataset({0, 1}, 4), Dataset({2}, 4)};
  ScriptedAnalyst analyst(
      std::make_shared<const QueryTable>(QueryTable::Constant(4, 1.0)), 1);
  ChannelModel channel(0.1, 1);
  EXPECT_THROW(RunSession(pop, eps, analyst, 1.0, 1, channel),
               InvalidArgumentError);
  EXPECT_THROW(RunSession(pop, {}, analyst, 1.0, 1, channel),
               InvalidArgumentError);
  EXPECT_THROW(RunSession(pop, eps, analyst, 1.0, 0, channel),
               InvalidArgumentError);
}

TEST(RunSessionTest, ReplayIsIdentical) {
  auto run = [] {
    const Population pop = Population::Uniform(30);
    Rng rng(55);
    std::vector<Dataset> eps;
    for (int l = 0; l < 3; ++l) eps.push_back(SampleDataset(pop, 20, rng, l));
    ScriptedAnalyst analyst(
        std::make_shared<const QueryTable>(QueryTable::Constant(30, 0.25)), 6);
    ChannelModel channel(0.3, 56);
    return RunSession(pop, eps, analyst, 1.3, 6, channel);
  };
  const Transcript a = run();
  const Transcript b = run();
  ASSERT_EQ(a.rounds.size(), b.rounds.size());
  for (std::size_t i = 0; i < a.rounds.size(); ++i) {
    EXPECT_EQ(*a.rounds[i].query, *b.rounds[i].query);
    EXPECT_EQ(a.rounds[i].ep_answers, b.rounds[i].ep_answers);
    EXPECT_EQ(a.rounds[i].received, b.rounds[i].received);
    EXPECT_EQ(a.rounds[i].normalized, b.rounds[i].normalized);
    EXPECT_EQ(a.rounds[i].true_answer, b.rounds[i].true_answer);
  }
}

TEST(TranscriptTableTest, Columns) {
  Transcript t;
  Round r;
  r.true_answer = 0.5;
  r.normalized = 0.75;
  t.rounds.push_back(r);
  std::ostringstream out;
  WriteCsv(out, TranscriptTable(t));
  EXPECT_EQ(out.str(),
            "round,true_answer,received_normalized,abs_error\n1,0.5,0.75,0.25\n");
}

}  // namespace
}  // namespace otaada
