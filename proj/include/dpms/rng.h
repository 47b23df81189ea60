//
// Copyright 2026 The dpms Authors
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
//

#ifndef DPMS_RNG_H_
#define DPMS_RNG_H_

#include <cstdint>
#include <random>

namespace dpms {

// Seeded random stream. Streams form a tree: Child(i) derives an independent
// stream from (seed, i) so parallel tasks can be scheduled in any order and
// still produce the same draws.
class Rng {
 public:
  explicit Rng(uint64_t seed);

  Rng Child(uint64_t index) const;

  uint64_t seed() const { return seed_; }

  // Uniform on the open interval (0, 1), 53 bits of resolution.
  double Uniform();
  double Normal();
  double ChiSquared(double df);
  double Gamma(double shape);
  double Beta(double a, double b);
  // Uniform integer in [0, n).
  uint64_t UniformInt(uint64_t n);

  std::mt19937_64& engine() { return engine_; }

 private:
  uint64_t seed_;
  std::mt19937_64 engine_;
};

uint64_t SplitMix64(uint64_t x);

}  // namespace dpms

#endif  // DPMS_RNG_H_
