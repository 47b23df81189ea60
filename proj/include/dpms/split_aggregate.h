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

#ifndef DPMS_SPLIT_AGGREGATE_H_
#define DPMS_SPLIT_AGGREGATE_H_

#include <cstdint>
#include <vector>

#include "dpms/linmodel.h"
#include "dpms/mechanisms.h"
#include "dpms/rng.h"
#include "json.hpp"

namespace dpms {

// A partition of rows 0..n-1 into disjoint subsets.
struct SplitPlan {
  int num_subsets = 0;
  std::vector<int> assignment;  // row -> subset index in [0, num_subsets)
  uint64_t seed = 0;

  int n() const { return static_cast<int>(assignment.size()); }
  std::vector<int> Sizes() const;
  // Row indices of each subset, ascending.
  std::vector<std::vector<int>> Subsets() const;
};

// Seeded random permutation cut into near-equal blocks, larger blocks first.
// Throws kSplitInfeasible unless every block holds at least min_subset rows.
SplitPlan MakeSplit(int n, int num_subsets, int min_subset, uint64_t seed);

double Censor(double x, const CensorBounds& bounds);

// Log Bayes factor or log information criterion of each subset, computed
// with n replaced by the subset size. Errors name the failing subset.
std::vector<double> PerSubsetLogStats(const RegressionData& data,
                                      const SplitPlan& plan,
                                      const Statistic& stat);

struct DPTestResult {
  double log_bstar = 0.0;
  double log_bstar_censored = 0.0;
  std::vector<double> per_subset_logs;  // censored; diagnostics only
  NoiseDraw noise;
  PrivacyBudget budget;
  CensorBounds bounds;

  int num_subsets() const { return static_cast<int>(per_subset_logs.size()); }
};

// Censors, averages and adds one noise draw calibrated to (U - L) / M.
DPTestResult AggregatePrivate(const std::vector<double>& per_subset,
                              const CensorBounds& bounds,
                              const PrivacyBudget& budget, Rng& rng);

// P(H0 | D) = pi0 / (pi0 + (1 - pi0) exp(log_bstar)).
double PosteriorProbability(double log_bstar, double pi0);

// Flat record for reporting. Per-subset values are included only when
// diagnostics is set, and the record is then marked non-private.
nlohmann::json ToJson(const DPTestResult& result, double pi0, uint64_t seed,
                      bool diagnostics = false);

}  // namespace dpms

#endif  // DPMS_SPLIT_AGGREGATE_H_
