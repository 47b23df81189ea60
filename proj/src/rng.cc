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

#include "dpms/rng.h"

#include <boost/random/chi_squared_distribution.hpp>
#include <boost/random/gamma_distribution.hpp>
#include <boost/random/normal_distribution.hpp>

namespace dpms {

uint64_t SplitMix64(uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

Rng::Rng(uint64_t seed) : seed_(seed), engine_(SplitMix64(seed)) {}

Rng Rng::Child(uint64_t index) const {
  return Rng(SplitMix64(seed_ ^ SplitMix64(index + 0x632be59bd9b4e019ULL)));
}

double Rng::Uniform() {
  // Rejects the single zero outcome so callers can take logs freely.
  for (;;) {
    const uint64_t bits = engine_() >> 11;
    if (bits != 0) return static_cast<double>(bits) * 0x1.0p-53;
  }
}

double Rng::Normal() {
  boost::random::normal_distribution<double> dist(0.0, 1.0);
  return dist(engine_);
}

double Rng::ChiSquared(double df) {
  boost::random::chi_squared_distribution<double> dist(df);
  return dist(engine_);
}

double Rng::Gamma(double shape) {
  boost::random::gamma_distribution<double> dist(shape, 1.0);
  return dist(engine_);
}

double Rng::Beta(double a, double b) {
  const double x = Gamma(a);
  const double y = Gamma(b);
  return x / (x + y);
}

uint64_t Rng::UniformInt(uint64_t n) {
  // Rejection removes modulo bias.
  const uint64_t limit = UINT64_MAX - UINT64_MAX % n;
  for (;;) {
    const uint64_t v = engine_();
    if (v < limit) return v % n;
  }
}

}  // namespace dpms
