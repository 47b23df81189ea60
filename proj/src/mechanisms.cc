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

#include "dpms/mechanisms.h"

#include <sstream>

#include "dpms/error.h"

namespace dpms {
namespace {

constexpr int kBracketIterations = 2100;
constexpr double kSigmaRelativeTolerance = 1e-12;

double StandardNormalCdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

}  // namespace

void PrivacyBudget::Validate() const {
  if (!(epsilon > 0.0)) {
    Fail(ErrorCode::kInvalidArgument, "epsilon must be positive");
  }
  if (!(delta >= 0.0 && delta <= 1.0)) {
    Fail(ErrorCode::kInvalidArgument, "delta must lie in [0, 1]");
  }
}

CensorBounds CensorBounds::Default() {
  return {std::log((1.0 - 0.99) / 0.99), std::log((1.0 - 0.01) / 0.01)};
}

double CensorBounds::Clamp(double x) const {
  return std::min(std::max(x, lower), upper);
}

void CensorBounds::Validate() const {
  if (!std::isfinite(lower) || !std::isfinite(upper)) {
    Fail(ErrorCode::kInvalidArgument, "censor bounds must be finite");
  }
  if (!(lower < upper)) {
    std::ostringstream os;
    os << "invalid censor bounds: L=" << lower << " must be below U=" << upper;
    Fail(ErrorCode::kInvalidArgument, os.str());
  }
}

const char* NoiseKindName(NoiseKind kind) {
  return kind == NoiseKind::kLaplace ? "laplace" : "gaussian";
}

double LaplaceNoise(double scale, Rng& rng) {
  if (!(scale > 0.0) || !std::isfinite(scale)) {
    Fail(ErrorCode::kInvalidArgument, "Laplace scale must be positive");
  }
  // Inverse CDF on a centered uniform.
  const double u = rng.Uniform() - 0.5;
  const double magnitude = -scale * std::log1p(-2.0 * std::abs(u));
  return u < 0.0 ? -magnitude : magnitude;
}

double GaussianMechanismDelta(double epsilon, double l2, double sigma) {
  const double a = l2 / (2.0 * sigma);
  const double b = epsilon * sigma / l2;
  return StandardNormalCdf(a - b) -
         std::exp(epsilon) * StandardNormalCdf(-a - b);
}

double AnalyticGaussianSigma(const PrivacyBudget& budget, double l2) {
  budget.Validate();
  if (!(l2 > 0.0)) Fail(ErrorCode::kInvalidArgument, "l2 must be positive");
  if (budget.delta == 0.0) {
    Fail(ErrorCode::kInvalidArgument,
         "analytic Gaussian calibration needs delta > 0");
  }
  if (budget.noiseless()) return 0.0;
  const double eps = budget.epsilon;
  const double target = budget.delta;
  auto excess = [&](double sigma) {
    return GaussianMechanismDelta(eps, l2, sigma) - target;
  };

  // delta(sigma) decreases from 1 at sigma -> 0 to 0 at sigma -> inf.
  double lo = 0.0;
  double hi = l2;
  int iterations = 0;
  while (excess(hi) > 0.0) {
    lo = hi;
    hi *= 2.0;
    if (++iterations > kBracketIterations || !std::isfinite(hi)) break;
  }
  if (lo == 0.0) {
    lo = hi / 2.0;
    while (excess(lo) <= 0.0) {
      hi = lo;
      lo /= 2.0;
      if (++iterations > kBracketIterations || lo == 0.0) break;
    }
  }
  if (iterations > kBracketIterations || !std::isfinite(hi) || lo == 0.0 ||
      excess(lo) <= 0.0 || excess(hi) > 0.0) {
    std::ostringstream os;
    os << "analytic Gaussian calibration failed to bracket sigma (epsilon="
       << eps << ", delta=" << target << ", l2=" << l2 << ", lo=" << lo
       << ", hi=" << hi << ", iterations=" << iterations << ")";
    Fail(ErrorCode::kNumericFailure, os.str());
  }
  while (hi - lo > kSigmaRelativeTolerance * hi) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (excess(mid) > 0.0) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return hi;
}

double ClassicalGaussianSigma(const PrivacyBudget& budget, double l2) {
  return std::sqrt(2.0 * std::log(1.25 / budget.delta)) * l2 / budget.epsilon;
}

NoiseScale SubsampleNoiseScale(const CensorBounds& bounds, int num_subsets,
                               const PrivacyBudget& budget) {
  bounds.Validate();
  budget.Validate();
  if (num_subsets < 1) {
    Fail(ErrorCode::kInvalidArgument, "number of subsets must be positive");
  }
  const double sensitivity = bounds.width() / num_subsets;
  if (budget.pure()) {
    return {budget.noiseless() ? 0.0 : sensitivity / budget.epsilon,
            NoiseKind::kLaplace};
  }
  return {AnalyticGaussianSigma(budget, sensitivity), NoiseKind::kGaussian};
}

NoiseDraw DrawNoise(const NoiseScale& law, Rng& rng) {
  NoiseDraw draw{0.0, law.scale, law.mechanism};
  if (law.scale == 0.0) return draw;
  draw.value = law.mechanism == NoiseKind::kLaplace
                   ? LaplaceNoise(law.scale, rng)
                   : law.scale * rng.Normal();
  return draw;
}

double LaplaceGramScale(int p, const PrivacyBudget& budget,
                        double per_entry_sensitivity) {
  if (budget.noiseless()) return 0.0;
  return per_entry_sensitivity * (p + 1.0) * (p + 2.0) /
         (2.0 * budget.epsilon);
}

Eigen::MatrixXd LaplaceGramError(int p, const PrivacyBudget& budget,
                                 double per_entry_sensitivity, Rng& rng) {
  budget.Validate();
  if (!budget.pure()) {
    Fail(ErrorCode::kInvalidArgument,
         "Laplace Gram noise is the delta == 0 mechanism");
  }
  if (!(per_entry_sensitivity > 0.0)) {
    Fail(ErrorCode::kInvalidArgument, "per-entry sensitivity must be positive");
  }
  const int dim = p + 1;
  const double scale = LaplaceGramScale(p, budget, per_entry_sensitivity);
  Eigen::MatrixXd e = Eigen::MatrixXd::Zero(dim, dim);
  if (scale == 0.0) return e;
  for (int i = 0; i < dim; ++i) {
    for (int j = i; j < dim; ++j) {
      e(i, j) = LaplaceNoise(scale, rng);
      e(j, i) = e(i, j);
    }
  }
  return e;
}

int WishartDegreesOfFreedom(int p, const PrivacyBudget& budget) {
  budget.Validate();
  if (budget.pure()) {
    Fail(ErrorCode::kInvalidArgument, "the Wishart mechanism needs delta > 0");
  }
  const double extra =
      budget.noiseless()
          ? 0.0
          : 28.0 * std::log(4.0 / budget.delta) /
                (budget.epsilon * budget.epsilon);
  return static_cast<int>(std::floor(p + 1.0 + extra));
}

Eigen::MatrixXd SampleScaledWishart(int dim, int dof, double scale_sq,
                                    Rng& rng) {
  if (dof < dim) {
    Fail(ErrorCode::kInvalidArgument,
         "Wishart degrees of freedom must be at least the dimension");
  }
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(dim, dim);
  for (int i = 0; i < dim; ++i) {
    a(i, i) = std::sqrt(rng.ChiSquared(static_cast<double>(dof - i)));
    for (int j = 0; j < i; ++j) a(i, j) = rng.Normal();
  }
  Eigen::MatrixXd w = a.triangularView<Eigen::Lower>() * a.transpose();
  w *= scale_sq;
  // Symmetrize away rounding in the product.
  return 0.5 * (w + w.transpose());
}

Eigen::MatrixXd WishartGramError(int p, const PrivacyBudget& budget,
                                 double l2_row_bound, Rng& rng) {
  if (!(l2_row_bound > 0.0)) {
    Fail(ErrorCode::kInvalidArgument, "row-norm bound must be positive");
  }
  const int dim = p + 1;
  const int k = WishartDegreesOfFreedom(p, budget);
  if (budget.noiseless()) return Eigen::MatrixXd::Zero(dim, dim);
  const double scale_sq = l2_row_bound * l2_row_bound;
  Eigen::MatrixXd e = SampleScaledWishart(dim, k, scale_sq, rng);
  e.diagonal().array() -= k * scale_sq;
  return e;
}

}  // namespace dpms
