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

#include "dpms/null_calibration.h"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <sstream>

#include "dpms/error.h"
#include "dpms/parallel.h"

namespace dpms {
namespace {

constexpr int kChunk = 1024;

// Runs nsim replicates of draw(rng) with one child stream per chunk, so the
// output does not depend on the number of workers.
template <typename Draw>
std::vector<double> Replicate(int nsim, const Rng& rng, Draw draw) {
  std::vector<double> out(nsim);
  const int chunks = (nsim + kChunk - 1) / kChunk;
  ParallelFor(chunks, [&](std::size_t c) {
    Rng local = rng.Child(c);
    const int end = std::min<int>(nsim, (c + 1) * kChunk);
    for (int i = static_cast<int>(c) * kChunk; i < end; ++i) {
      out[i] = draw(local);
    }
  });
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace

const char* NullKindName(NullKind kind) {
  switch (kind) {
    case NullKind::kLrt:
      return "lrt";
    case NullKind::kBayesFactor:
      return "bf";
    case NullKind::kPValue:
      return "pvalue";
  }
  return "unknown";
}

void NullSimConfig::Validate() const {
  if (subset_sizes.empty()) {
    Fail(ErrorCode::kConfig, "null simulation needs at least one subset");
  }
  if (nsim < 1) Fail(ErrorCode::kConfig, "nsim must be >= 1");
  if (df < 1) Fail(ErrorCode::kConfig, "df must be >= 1");
  bounds.Validate();
  budget.Validate();
}

EmpiricalNull SimulateNullLrt(const NullSimConfig& cfg, const Rng& rng) {
  cfg.Validate();
  const NoiseScale law =
      SubsampleNoiseScale(cfg.bounds, cfg.num_subsets(), cfg.budget);
  const int m = cfg.num_subsets();
  EmpiricalNull null;
  null.kind = NullKind::kLrt;
  null.sorted_samples = Replicate(cfg.nsim, rng, [&](Rng& r) {
    double sum = 0.0;
    for (int i = 0; i < m; ++i) {
      sum += cfg.bounds.Clamp(0.5 * r.ChiSquared(cfg.df));
    }
    const double log_lambda = sum / m + DrawNoise(law, r).value;
    return 2.0 * (cfg.censor_output ? cfg.bounds.Clamp(log_lambda)
                                    : log_lambda);
  });
  return null;
}

EmpiricalNull SimulateNullBf(const NullSimConfig& cfg, const Statistic& stat,
                             int p, int p0, const Rng& rng) {
  cfg.Validate();
  for (int b : cfg.subset_sizes) {
    if (b <= p + p0) {
      std::ostringstream os;
      os << "subset size " << b << " must exceed p + p0 = " << p + p0;
      Fail(ErrorCode::kConfig, os.str());
    }
  }
  const NoiseScale law =
      SubsampleNoiseScale(cfg.bounds, cfg.num_subsets(), cfg.budget);
  const int m = cfg.num_subsets();
  EmpiricalNull null;
  null.kind = NullKind::kBayesFactor;
  null.sorted_samples = Replicate(cfg.nsim, rng, [&](Rng& r) {
    double sum = 0.0;
    for (int b : cfg.subset_sizes) {
      // Beta draws can round to 1 for very unbalanced shapes.
      const double r2 =
          std::min(r.Beta(0.5 * p, 0.5 * (b - p - p0)), 1.0 - 1e-16);
      sum += cfg.bounds.Clamp(LogStatistic(r2, b, p, p0, stat));
    }
    const double log_b = sum / m + DrawNoise(law, r).value;
    return cfg.censor_output ? cfg.bounds.Clamp(log_b) : log_b;
  });
  return null;
}

EmpiricalNull SimulateNullPValue(const NullSimConfig& cfg, PValueScale scale,
                                 const Rng& rng) {
  cfg.Validate();
  const NoiseScale law =
      SubsampleNoiseScale(cfg.bounds, cfg.num_subsets(), cfg.budget);
  const int m = cfg.num_subsets();
  EmpiricalNull null;
  null.kind = NullKind::kPValue;
  null.sorted_samples = Replicate(cfg.nsim, rng, [&](Rng& r) {
    double sum = 0.0;
    for (int i = 0; i < m; ++i) {
      const double u = r.Uniform();
      sum += cfg.bounds.Clamp(scale == PValueScale::kLog ? std::log(u) : u);
    }
    const double v = sum / m + DrawNoise(law, r).value;
    return cfg.censor_output ? cfg.bounds.Clamp(v) : v;
  });
  return null;
}

double CriticalValue(const EmpiricalNull& null, double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) {
    Fail(ErrorCode::kInvalidArgument, "alpha must lie in (0, 1)");
  }
  const int n = null.nsim();
  if (n < 1 || n * alpha < 1.0 - 1e-12) {
    std::ostringstream os;
    os << "nsim=" << n << " is too small for alpha=" << alpha;
    Fail(ErrorCode::kInsufficientSimulations, os.str());
  }
  // Guard against (1 - alpha)(n - 1) landing a hair above an integer.
  const double rank = (1.0 - alpha) * (n - 1);
  const int index = std::min<int>(n - 1, static_cast<int>(std::ceil(rank - 1e-9)));
  return null.sorted_samples[index];
}

double PValue(const EmpiricalNull& null, double observed) {
  const auto& s = null.sorted_samples;
  const auto at_least = s.end() - std::lower_bound(s.begin(), s.end(), observed);
  return (1.0 + static_cast<double>(at_least)) / (s.size() + 1.0);
}

double BetaTailBound(double k, int b, int p, int p0) {
  if (!(k > 0.0 && k < 1.0) || p < 1 || p0 < 0 || b <= p0 + p + 2) {
    std::ostringstream os;
    os << "Beta tail bound needs 0 < k < 1, p >= 1 and b > p + p0 + 2 (k=" << k
       << ", b=" << b << ", p=" << p << ", p0=" << p0 << ")";
    Fail(ErrorCode::kDomain, os.str());
  }
  auto log_beta = [](double a, double c) {
    return std::lgamma(a) + std::lgamma(c) - std::lgamma(a + c);
  };
  if (p >= 2) {
    const double m = b - p - p0;
    return std::exp(std::log(2.0) + 0.5 * m * std::log1p(-k) - std::log(m) -
                    log_beta(0.5 * p, 0.5 * m));
  }
  const double m = b - p0 - 2;
  return std::exp(-log_beta(0.5, 0.5 * (b - 1 - p0)) +
                  0.5 * (m * std::log1p(-k) + std::log(-std::log(k)) -
                         std::log(m)));
}

std::string QuantileTableCsv(const EmpiricalNull& null) {
  const int n = null.nsim();
  if (n < 1) Fail(ErrorCode::kInsufficientSimulations, "empty null sample");
  std::ostringstream os;
  os << "kind,quantile,value\n";
  for (double q : {0.01, 0.05, 0.25, 0.5, 0.75, 0.95, 0.99}) {
    const int index = std::min<int>(
        n - 1, static_cast<int>(std::ceil(q * (n - 1) - 1e-9)));
    os << NullKindName(null.kind) << ',' << q << ',' << std::setprecision(17)
       << null.sorted_samples[index] << std::setprecision(6) << '\n';
  }
  return os.str();
}

}  // namespace dpms
