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

#ifndef OTAADA_RANDOM_H_
#define OTAADA_RANDOM_H_

#include <cstdint>
#include <random>

namespace otaada {

using Rng = std::mt19937_64;

// Independent named streams derived from one master seed.
enum class Stream : std::uint64_t {
  kData = 1,
  kChannel = 2,
  kAnalyst = 3,
};

inline std::uint64_t SplitMix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline std::uint64_t DeriveSeed(std::uint64_t master, Stream stream,
                                std::uint64_t index = 0) {
  std::uint64_t h = SplitMix64(master);
  h = SplitMix64(h ^ static_cast<std::uint64_t>(stream));
  return SplitMix64(h ^ index);
}

struct SessionSeeds {
  std::uint64_t data;
  std::uint64_t channel;
  std::uint64_t analyst;

  static SessionSeeds ForTrial(std::uint64_t master, std::uint64_t trial) {
    return {DeriveSeed(master, Stream::kData, trial),
            DeriveSeed(master, Stream::kChannel, trial),
            DeriveSeed(master, Stream::kAnalyst, trial)};
  }
};

}  // namespace otaada

#endif  // OTAADA_RANDOM_H_
