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

#include "dpms/confidence_region.h"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <numeric>
#include <sstream>

#include "dpms/error.h"
#include "dpms/parallel.h"

namespace dpms {
namespace {

constexpr int kSpectralCalibrationDraws = 100000;

double SpectralNorm(const Eigen::MatrixXd& e) {
  const Eigen::VectorXd ev =
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(e, Eigen::EigenvaluesOnly)
          .eigenvalues();
  return std::max(std::abs(ev(0)), std::abs(ev(ev.size() - 1)));
}

// Laplace(0, b) conditioned on |x| <= w, by inverting the CDF of |x|.
double TruncatedLaplace(double b, double w, Rng& rng) {
  const double mass = -std::expm1(-w / b);
  const double magnitude = -b * std::log1p(-rng.Uniform() * mass);
  return rng.Uniform() < 0.5 ? -magnitude : magnitude;
}

Eigen::MatrixXd DrawFromSet(const NoiseSet& set, const GramChain& chain,
                            Rng& rng) {
  const int dim = chain.p() + 1;
  if (set.degenerate()) return Eigen::MatrixXd::Zero(dim, dim);
  if (set.mechanism == NoiseKind::kLaplace) {
    Eigen::MatrixXd e(dim, dim);
    for (int i = 0; i < dim; ++i) {
      for (int j = i; j < dim; ++j) {
        e(i, j) = TruncatedLaplace(set.laplace_scale, set.box_half_width, rng);
        e(j, i) = e(i, j);
      }
    }
    return e;
  }
  for (;;) {
    Eigen::MatrixXd e =
        WishartGramError(chain.p(), chain.budget, chain.sensitivity.l2, rng);
    if (SpectralNorm(e) <= set.spectral_bound) return e;
  }
}

}  // namespace

double Functional::operator()(const ModelPosterior& post) const {
  switch (kind) {
    case Kind::kInclusion:
      return post.inclusion(index);
    case Kind::kPosteriorMean:
      return post.beta_avg(index);
    case Kind::kCustom:
      return custom(post);
  }
  return 0.0;
}

std::string Functional::Name() const {
  switch (kind) {
    case Kind::kInclusion:
      return "inclusion[" + std::to_string(index) + "]";
    case Kind::kPosteriorMean:
      return "beta[" + std::to_string(index) + "]";
    case Kind::kCustom:
      return "custom";
  }
  return "unknown";
}

void RegionConfig::Validate() const {
  if (!(alpha > 0.0 && alpha < 1.0)) {
    Fail(ErrorCode::kConfig, "alpha must lie in (0, 1)");
  }
  if (nsamples < 100) Fail(ErrorCode::kConfig, "nsamples must be >= 100");
  if (max_attempts_per_sample < 1) {
    Fail(ErrorCode::kConfig, "max_attempts_per_sample must be >= 1");
  }
}

bool NoiseSet::Contains(const Eigen::MatrixXd& e) const {
  if (degenerate()) return e.cwiseAbs().maxCoeff() == 0.0;
  if (mechanism == NoiseKind::kLaplace) {
    return e.cwiseAbs().maxCoeff() <= box_half_width;
  }
  return SpectralNorm(e) <= spectral_bound;
}

NoiseSet BuildNoiseSet(const GramChain& chain, double alpha, Rng& rng) {
  if (!(alpha > 0.0 && alpha < 1.0)) {
    Fail(ErrorCode::kConfig, "alpha must lie in (0, 1)");
  }
  NoiseSet set;
  set.mechanism = chain.mechanism;
  set.alpha = alpha;
  if (chain.budget.noiseless()) return set;
  const int p = chain.p();
  if (chain.budget.pure()) {
    const double m = (p + 1.0) * (p + 2.0) / 2.0;
    const double level = std::pow(1.0 - alpha, 1.0 / m);
    set.laplace_scale = LaplaceGramScale(p, chain.budget, chain.sensitivity.l1);
    set.box_half_width = -set.laplace_scale * std::log1p(-level);
    return set;
  }
  set.wishart_dof = WishartDegreesOfFreedom(p, chain.budget);
  std::vector<double> norms(kSpectralCalibrationDraws);
  for (auto& v : norms) {
    v = SpectralNorm(
        WishartGramError(p, chain.budget, chain.sensitivity.l2, rng));
  }
  std::sort(norms.begin(), norms.end());
  const double rank = (1.0 - alpha) * (norms.size() - 1);
  set.spectral_bound = norms[static_cast<std::size_t>(std::ceil(rank - 1e-9))];
  return set;
}

bool Region::Contains(const GramChain& chain, const Eigen::MatrixXd& g) const {
  return IsPositiveDefinite(g) && set.Contains(chain.g_star - g);
}

Region SampleRegion(const GramChain& chain, const RegionConfig& cfg) {
  cfg.Validate();
  const Rng root(cfg.seed);
  Rng calibration = root.Child(0);
  Rng draws = root.Child(1);
  Region region;
  region.set = BuildNoiseSet(chain, cfg.alpha, calibration);
  if (region.set.degenerate()) {
    if (!IsPositiveDefinite(chain.g_star)) {
      Fail(ErrorCode::kEmptyRegion,
           "noise-free region is a single matrix that is not positive "
           "definite");
    }
    region.candidates.push_back(chain.g_star);
    return region;
  }
  const long max_attempts =
      static_cast<long>(cfg.nsamples) * cfg.max_attempts_per_sample;
  for (long attempt = 0; attempt < max_attempts &&
                         static_cast<int>(region.candidates.size()) <
                             cfg.nsamples;
       ++attempt) {
    Eigen::MatrixXd g = chain.g_star - DrawFromSet(region.set, chain, draws);
    if (IsPositiveDefinite(g)) {
      region.candidates.push_back(std::move(g));
    } else {
      ++region.rejected_non_pd;
    }
  }
  if (region.candidates.empty()) {
    std::ostringstream os;
    os << "every one of " << region.rejected_non_pd
       << " candidate Gram matrices was indefinite; increase epsilon or alpha";
    Fail(ErrorCode::kEmptyRegion, os.str());
  }
  return region;
}

FunctionalHistogram BinSamples(std::vector<double> samples, double lo,
                               double hi) {
  if (samples.empty()) {
    Fail(ErrorCode::kEmptyRegion, "no samples to bin");
  }
  if (!(hi > lo)) {
    lo -= 0.5;
    hi += 0.5;
  }
  FunctionalHistogram h;
  h.bin_edges.resize(kHistogramBins + 1);
  for (int b = 0; b <= kHistogramBins; ++b) {
    h.bin_edges[b] = lo + (hi - lo) * b / kHistogramBins;
  }
  h.counts.assign(kHistogramBins, 0);
  for (double v : samples) {
    const int bin = std::clamp(
        static_cast<int>(std::floor((v - lo) / (hi - lo) * kHistogramBins)), 0,
        kHistogramBins - 1);
    ++h.counts[bin];
  }
  h.accepted = static_cast<int>(samples.size());
  h.samples = std::move(samples);
  h.mean = HistogramMeanEstimate(h);
  return h;
}

FunctionalHistogram MapFunctional(const Region& region,
                                  const Functional& functional, int n,
                                  const Statistic& stat, ModelPrior prior,
                                  int p0) {
  if (region.candidates.empty()) {
    Fail(ErrorCode::kEmptyRegion, "region has no candidates");
  }
  std::vector<double> values(region.candidates.size());
  ParallelFor(values.size(), [&](std::size_t i) {
    values[i] = functional(
        EnumeratePosterior(region.candidates[i], n, stat, prior, p0));
  });
  double lo = *std::min_element(values.begin(), values.end());
  double hi = *std::max_element(values.begin(), values.end());
  if (functional.kind == Functional::Kind::kInclusion) {
    lo = 0.0;
    hi = 1.0;
  }
  FunctionalHistogram h = BinSamples(std::move(values), lo, hi);
  h.rejected_non_pd = region.rejected_non_pd;
  return h;
}

double HistogramMeanEstimate(const FunctionalHistogram& hist) {
  if (hist.samples.empty()) {
    Fail(ErrorCode::kEmptyRegion, "histogram has no accepted samples");
  }
  return std::accumulate(hist.samples.begin(), hist.samples.end(), 0.0) /
         hist.samples.size();
}

std::string HistogramCsv(const FunctionalHistogram& hist) {
  std::ostringstream os;
  os << std::setprecision(17) << "bin_lo,bin_hi,count\n";
  for (std::size_t b = 0; b < hist.counts.size(); ++b) {
    os << hist.bin_edges[b] << ',' << hist.bin_edges[b + 1] << ','
       << hist.counts[b] << '\n';
  }
  return os.str();
}

nlohmann::json HistogramSummaryJson(const FunctionalHistogram& hist,
                                    const Functional& functional,
                                    double alpha) {
  return {{"functional", functional.Name()},
          {"mean", hist.mean},
          {"accepted", hist.accepted},
          {"rejected_non_pd", hist.rejected_non_pd},
          {"alpha", alpha}};
}

}  // namespace dpms
