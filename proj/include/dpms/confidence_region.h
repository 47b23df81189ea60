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

#ifndef DPMS_CONFIDENCE_REGION_H_
#define DPMS_CONFIDENCE_REGION_H_

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "dpms/gram_model.h"
#include "dpms/rng.h"
#include "json.hpp"

namespace dpms {

struct Functional {
  enum class Kind { kInclusion, kPosteriorMean, kCustom };
  Kind kind = Kind::kInclusion;
  int index = 0;
  std::function<double(const ModelPosterior&)> custom;

  static Functional Inclusion(int j) { return {Kind::kInclusion, j, {}}; }
  static Functional PosteriorMean(int j) {
    return {Kind::kPosteriorMean, j, {}};
  }
  static Functional Custom(std::function<double(const ModelPosterior&)> f) {
    return {Kind::kCustom, 0, std::move(f)};
  }
  double operator()(const ModelPosterior& post) const;
  std::string Name() const;
};

struct RegionConfig {
  double alpha = 0.05;
  int nsamples = 1000;
  uint64_t seed = 0;
  // Give up after this many draws per requested sample.
  int max_attempts_per_sample = 20;

  void Validate() const;
};

// Central 1 - alpha set for the Gram error of a mechanism: a box on the
// independent Laplace coordinates, or a spectral-norm ball for Wishart.
struct NoiseSet {
  NoiseKind mechanism = NoiseKind::kLaplace;
  double alpha = 0.05;
  double laplace_scale = 0.0;
  double box_half_width = 0.0;  // Laplace
  double spectral_bound = 0.0;  // Wishart
  int wishart_dof = 0;

  bool degenerate() const {
    return box_half_width == 0.0 && spectral_bound == 0.0;
  }
  bool Contains(const Eigen::MatrixXd& e) const;
};

NoiseSet BuildNoiseSet(const GramChain& chain, double alpha, Rng& rng);

struct Region {
  NoiseSet set;
  std::vector<Eigen::MatrixXd> candidates;  // all positive definite
  int rejected_non_pd = 0;

  // True when g is positive definite and G* - g lies in the noise set.
  bool Contains(const GramChain& chain, const Eigen::MatrixXd& g) const;
};

// Candidates G* - E with E drawn from the noise law restricted to the set.
Region SampleRegion(const GramChain& chain, const RegionConfig& cfg);

struct FunctionalHistogram {
  std::vector<double> bin_edges;  // 51 edges
  std::vector<int> counts;        // 50 bins
  std::vector<double> samples;
  double mean = 0.0;
  int accepted = 0;
  int rejected_non_pd = 0;
};

constexpr int kHistogramBins = 50;

// Refits the model posterior on every candidate and bins the functional.
// Inclusion probabilities use the fixed range [0, 1].
FunctionalHistogram MapFunctional(const Region& region,
                                  const Functional& functional, int n,
                                  const Statistic& stat, ModelPrior prior,
                                  int p0 = 1);

FunctionalHistogram BinSamples(std::vector<double> samples, double lo,
                               double hi);

// Exact mean of the accepted samples.
double HistogramMeanEstimate(const FunctionalHistogram& hist);

// Rows "bin_lo,bin_hi,count".
std::string HistogramCsv(const FunctionalHistogram& hist);

nlohmann::json HistogramSummaryJson(const FunctionalHistogram& hist,
                                    const Functional& functional,
                                    double alpha);

}  // namespace dpms

#endif  // DPMS_CONFIDENCE_REGION_H_
