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

#include "dpms/split_aggregate.h"

#include <cmath>
#include <numeric>
#include <sstream>
#include <string>

#include "dpms/error.h"
#include "dpms/parallel.h"

namespace dpms {

std::vector<int> SplitPlan::Sizes() const {
  std::vector<int> sizes(num_subsets, 0);
  for (int s : assignment) ++sizes[s];
  return sizes;
}

std::vector<std::vector<int>> SplitPlan::Subsets() const {
  std::vector<std::vector<int>> out(num_subsets);
  for (int row = 0; row < n(); ++row) out[assignment[row]].push_back(row);
  return out;
}

SplitPlan MakeSplit(int n, int num_subsets, int min_subset, uint64_t seed) {
  if (n < 1 || num_subsets < 1) {
    Fail(ErrorCode::kInvalidArgument, "need n >= 1 and M >= 1");
  }
  if (static_cast<int64_t>(num_subsets) * min_subset > n) {
    std::ostringstream os;
    os << "cannot split n=" << n << " rows into M=" << num_subsets
       << " subsets of at least " << min_subset << " rows";
    Fail(ErrorCode::kSplitInfeasible, os.str());
  }
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  Rng rng(seed);
  for (int i = n - 1; i > 0; --i) {
    const int j = static_cast<int>(rng.UniformInt(static_cast<uint64_t>(i) + 1));
    std::swap(order[i], order[j]);
  }
  SplitPlan plan;
  plan.num_subsets = num_subsets;
  plan.seed = seed;
  plan.assignment.assign(n, 0);
  const int base = n / num_subsets;
  const int extra = n % num_subsets;
  int pos = 0;
  for (int s = 0; s < num_subsets; ++s) {
    const int size = base + (s < extra ? 1 : 0);
    for (int k = 0; k < size; ++k) plan.assignment[order[pos++]] = s;
  }
  return plan;
}

double Censor(double x, const CensorBounds& bounds) {
  return bounds.Clamp(x);
}

std::vector<double> PerSubsetLogStats(const RegressionData& data,
                                      const SplitPlan& plan,
                                      const Statistic& stat) {
  if (plan.n() != data.n()) {
    Fail(ErrorCode::kInvalidArgument, "split plan does not match data size");
  }
  const auto subsets = plan.Subsets();
  std::vector<double> out(plan.num_subsets);
  ParallelFor(subsets.size(), [&](std::size_t i) {
    try {
      const RegressionData part = data.Subset(subsets[i]);
      part.Validate();
      const double r2 = RSquared(Reparametrize(part));
      out[i] = LogStatistic(r2, part.n(), part.p(), part.p0(), stat);
    } catch (const Error& e) {
      std::ostringstream os;
      os << "subset " << i << ": " << e.what();
      throw Error(e.code(), os.str());
    }
  });
  return out;
}

DPTestResult AggregatePrivate(const std::vector<double>& per_subset,
                              const CensorBounds& bounds,
                              const PrivacyBudget& budget, Rng& rng) {
  if (per_subset.empty()) {
    Fail(ErrorCode::kInvalidArgument, "no per-subset statistics to aggregate");
  }
  bounds.Validate();
  budget.Validate();
  DPTestResult result;
  result.bounds = bounds;
  result.budget = budget;
  result.per_subset_logs.reserve(per_subset.size());
  double sum = 0.0;
  for (double v : per_subset) {
    const double c = Censor(v, bounds);
    result.per_subset_logs.push_back(c);
    sum += c;
  }
  const int m = static_cast<int>(per_subset.size());
  result.noise = DrawNoise(SubsampleNoiseScale(bounds, m, budget), rng);
  result.log_bstar = sum / m + result.noise.value;
  result.log_bstar_censored = Censor(result.log_bstar, bounds);
  return result;
}

double PosteriorProbability(double log_bstar, double pi0) {
  if (!(pi0 >= 0.0 && pi0 <= 1.0)) {
    Fail(ErrorCode::kInvalidArgument, "pi0 must lie in [0, 1]");
  }
  if (pi0 == 0.0) return 0.0;
  if (pi0 == 1.0) return 1.0;
  // 1 / (1 + exp(x)) with x = log((1 - pi0) / pi0) + log_bstar.
  const double x = std::log1p(-pi0) - std::log(pi0) + log_bstar;
  if (x > 0) {
    const double e = std::exp(-x);
    return e / (1.0 + e);
  }
  return 1.0 / (1.0 + std::exp(x));
}

nlohmann::json ToJson(const DPTestResult& result, double pi0, uint64_t seed,
                      bool diagnostics) {
  const double p_h0 = PosteriorProbability(result.log_bstar, pi0);
  nlohmann::json j = {
      {"log_bstar", result.log_bstar},
      {"log_bstar_censored", result.log_bstar_censored},
      {"p_h0", p_h0},
      {"p_h1", 1.0 - p_h0},
      {"p_h0_censored",
       PosteriorProbability(result.log_bstar_censored, pi0)},
      {"epsilon", result.budget.epsilon},
      {"delta", result.budget.delta},
      {"M", result.num_subsets()},
      {"L", result.bounds.lower},
      {"U", result.bounds.upper},
      {"mechanism", NoiseKindName(result.noise.mechanism)},
      {"noise_scale", result.noise.scale},
      {"seed", seed},
      {"private", !diagnostics},
  };
  if (diagnostics) {
    j["per_subset_logs"] = result.per_subset_logs;
    j["noise"] = result.noise.value;
  }
  return j;
}

}  // namespace dpms
