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

// Noise primitives and privacy calibration: the Laplace and analytic
// Gaussian mechanisms, the Wishart perturbation of a Gram matrix, and the
// noise scale used by subsample-and-aggregate releases.

#ifndef DPMS_MECHANISMS_H_
#define DPMS_MECHANISMS_H_

#include <cmath>
#include <limits>
#include <string>

#include <Eigen/Dense>

#include "dpms/rng.h"

namespace dpms {

// (epsilon, delta). delta == 0 selects the pure-epsilon (Laplace) family,
// delta > 0 the approximate family (analytic Gaussian, Wishart).
// epsilon == +inf is accepted and means "no noise"; it exists for
// zero-noise oracle runs and is never a private setting.
struct PrivacyBudget {
  double epsilon = 1.0;
  double delta = 0.0;

  static PrivacyBudget Pure(double epsilon) { return {epsilon, 0.0}; }
  static PrivacyBudget Approximate(double epsilon, double delta) {
    return {epsilon, delta};
  }
  static PrivacyBudget NoNoise() {
    return {std::numeric_limits<double>::infinity(), 0.0};
  }

  bool pure() const { return delta == 0.0; }
  bool noiseless() const { return std::isinf(epsilon); }

  // Throws kInvalidArgument when epsilon <= 0 or delta is outside [0, 1].
  void Validate() const;
};

// Global sensitivities. In the Gram pipeline l1 is the entry bound on the
// data matrix and l2 the bound on the Euclidean norm of its rows.
struct Sensitivity {
  double l1 = 0.0;
  double l2 = 0.0;
};

// Censoring interval [lower, upper] applied on the log scale.
struct CensorBounds {
  double lower = 0.0;
  double upper = 0.0;

  // Censors posterior probabilities at 0.01 and 0.99:
  // lower = log(0.01 / 0.99), upper = log(0.99 / 0.01).
  static CensorBounds Default();

  double width() const { return upper - lower; }
  double Clamp(double x) const;
  // Throws kInvalidArgument unless lower < upper and both are finite.
  void Validate() const;
};

enum class NoiseKind { kLaplace, kGaussian };

const char* NoiseKindName(NoiseKind kind);

// Parameters of a scalar noise law. scale is the Laplace scale or the
// Gaussian standard deviation; zero means noise is switched off.
struct NoiseScale {
  double scale = 0.0;
  NoiseKind mechanism = NoiseKind::kLaplace;
};

struct NoiseDraw {
  double value = 0.0;
  double scale = 0.0;
  NoiseKind mechanism = NoiseKind::kLaplace;
};

// One draw from Laplace(0, scale). scale must be positive.
double LaplaceNoise(double scale, Rng& rng);

// The tight Gaussian-mechanism privacy curve
//   delta(sigma) = Phi(l2/(2 sigma) - eps sigma/l2)
//                  - e^eps Phi(-l2/(2 sigma) - eps sigma/l2).
double GaussianMechanismDelta(double epsilon, double l2, double sigma);

// Smallest sigma with GaussianMechanismDelta(eps, l2, sigma) <= delta, found by
// bracketing and bisection to a relative bracket width of 1e-12.
// Requires 0 < delta < 1; throws kNumericFailure if no bracket is found.
double AnalyticGaussianSigma(const PrivacyBudget& budget, double l2);

// The classical sqrt(2 log(1.25/delta)) l2 / eps calibration, for reference.
double ClassicalGaussianSigma(const PrivacyBudget& budget, double l2);

// Noise law for the mean of M values censored to bounds: Laplace with scale
// (U-L)/(M eps) when delta == 0, otherwise Gaussian with the analytic sigma
// for l2 sensitivity (U-L)/M.
NoiseScale SubsampleNoiseScale(const CensorBounds& bounds, int num_subsets,
                               const PrivacyBudget& budget);

NoiseDraw DrawNoise(const NoiseScale& law, Rng& rng);

// Laplace scale per Gram entry: per_entry_sensitivity (p+1)(p+2) / (2 eps).
double LaplaceGramScale(int p, const PrivacyBudget& budget,
                        double per_entry_sensitivity);

// Symmetric (p+1)x(p+1) matrix whose upper triangle (with diagonal) is iid
// Laplace(0, LaplaceGramScale(...)). Requires delta == 0.
Eigen::MatrixXd LaplaceGramError(int p, const PrivacyBudget& budget,
                                 double per_entry_sensitivity, Rng& rng);

// k = floor(p + 1 + 28 log(4/delta) / eps^2).
int WishartDegreesOfFreedom(int p, const PrivacyBudget& budget);

// One Wishart(dof, scale_sq I_dim) draw by the Bartlett decomposition.
Eigen::MatrixXd SampleScaledWishart(int dim, int dof, double scale_sq,
                                    Rng& rng);

// E = W - k l2^2 I for W ~ Wishart(k, l2^2 I_{p+1}). Requires delta > 0.
Eigen::MatrixXd WishartGramError(int p, const PrivacyBudget& budget,
                                 double l2_row_bound, Rng& rng);

}  // namespace dpms

#endif  // DPMS_MECHANISMS_H_
