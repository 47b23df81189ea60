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

#ifndef DPMS_NULL_CALIBRATION_H_
#define DPMS_NULL_CALIBRATION_H_

#include <cstdint>
#include <string>
#include <vector>

#include "dpms/linmodel.h"
#include "dpms/mechanisms.h"
#include "dpms/rng.h"

namespace dpms {

enum class NullKind { kLrt, kBayesFactor, kPValue };
const char* NullKindName(NullKind kind);

struct NullSimConfig {
  std::vector<int> subset_sizes;  // one entry per subset
  int df = 1;                     // chi-square degrees of freedom (LRT)
  CensorBounds bounds = CensorBounds::Default();
  PrivacyBudget budget;
  int nsim = 100000;
  // Clamp the aggregated statistic to the (scaled) censoring interval.
  bool censor_output = true;

  int num_subsets() const { return static_cast<int>(subset_sizes.size()); }
  void Validate() const;
};

struct EmpiricalNull {
  std::vector<double> sorted_samples;
  NullKind kind = NullKind::kLrt;

  int nsim() const { return static_cast<int>(sorted_samples.size()); }
};

// Null law of 2 log Lambda*: per subset 2 log Lambda_i ~ chi2(df) is halved,
// censored to [L, U], averaged, perturbed and doubled.
EmpiricalNull SimulateNullLrt(const NullSimConfig& cfg, const Rng& rng);

// Null law of log B* or log I*: per subset R^2 ~ Beta(p/2, (b - p - p0)/2).
EmpiricalNull SimulateNullBf(const NullSimConfig& cfg, const Statistic& stat,
                             int p, int p0, const Rng& rng);

enum class PValueScale { kIdentity, kLog };

// Null law of the aggregated p-value; per subset p ~ Uniform(0, 1) mapped to
// the aggregation scale before censoring.
EmpiricalNull SimulateNullPValue(const NullSimConfig& cfg, PValueScale scale,
                                 const Rng& rng);

// Smallest sample at or above the (1 - alpha) rank (numpy "higher").
double CriticalValue(const EmpiricalNull& null, double alpha);

// (1 + #{samples >= observed}) / (nsim + 1).
double PValue(const EmpiricalNull& null, double observed);

// Upper bound on P(R^2 > k) for R^2 ~ Beta(p/2, (b - p - p0)/2).
double BetaTailBound(double k, int b, int p, int p0);

// CSV rows "kind,quantile,value" at 0.01, 0.05, 0.25, 0.5, 0.75, 0.95, 0.99.
std::string QuantileTableCsv(const EmpiricalNull& null);

}  // namespace dpms

#endif  // DPMS_NULL_CALIBRATION_H_
