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

// Non-private normal linear model statistics. Everything here depends on the
// data only through R^2 once the common predictors are projected out.

#ifndef DPMS_LINMODEL_H_
#define DPMS_LINMODEL_H_

#include <string>
#include <variant>
#include <vector>

#include <Eigen/Dense>

namespace dpms {

// y = X0 beta0 + X beta + sigma W. X0 holds the predictors shared by both
// hypotheses (usually an intercept), X the tested predictors.
struct RegressionData {
  Eigen::VectorXd y;
  Eigen::MatrixXd x0;
  Eigen::MatrixXd x;
  std::string y_name = "y";
  std::vector<std::string> x0_names;
  std::vector<std::string> x_names;

  int n() const { return static_cast<int>(y.size()); }
  int p() const { return static_cast<int>(x.cols()); }
  int p0() const { return static_cast<int>(x0.cols()); }

  // Shape checks, n > p + p0 and full column rank of [X0 X]. Throws
  // RankError naming the first dependent column of [X0 X].
  void Validate() const;

  // Rows selected by `rows`, in the given order.
  RegressionData Subset(const std::vector<int>& rows) const;
};

// Z = (I - P_X0) y and V = (I - P_X0) X.
struct CenteredData {
  Eigen::VectorXd z;
  Eigen::MatrixXd v;

  int n() const { return static_cast<int>(z.size()); }
  int p() const { return static_cast<int>(v.cols()); }
};

// Rank of `a`; singular values below 1e-10 times the largest are dropped.
int NumericalRank(const Eigen::MatrixXd& a);

// Index of the first column that is (numerically) in the span of the columns
// before it, or -1 when `a` has full column rank.
int FirstDependentColumn(const Eigen::MatrixXd& a);

// Projects X0 out of y and X through a Householder QR of X0.
CenteredData Reparametrize(const RegressionData& data);

// Z' P_V Z / Z'Z via a QR of V. Throws kDomain when Z'Z == 0 and RankError
// when V is rank deficient.
double RSquared(const CenteredData& centered);

// Mixing distribution of g in the mixture of g-priors.
struct GPrior {
  enum class Kind { kFixed, kSampleSize, kZellnerSiow };

  Kind kind = Kind::kSampleSize;
  double g = 0.0;  // only for kFixed

  static GPrior Fixed(double g) { return {Kind::kFixed, g}; }
  // Point mass at g = n, where n is the sample size the factor is computed on.
  static GPrior SampleSize() { return {Kind::kSampleSize, 0.0}; }
  // g ~ InverseGamma(1/2, n/2).
  static GPrior ZellnerSiow() { return {Kind::kZellnerSiow, 0.0}; }

  bool point_mass() const { return kind != Kind::kZellnerSiow; }
  double ResolveG(double n) const { return kind == Kind::kFixed ? g : n; }
};

// I10 = n^(-rho/2) Lambda10. The penalty grows linearly with the number of
// tested coefficients: rho = c * dim with c = 1 (BIC), 2 / log n (AIC),
// 0 (likelihood ratio) or a caller-supplied c.
struct InfoCriterion {
  enum class Kind { kBic, kAic, kLrt, kCustom };

  Kind kind = Kind::kBic;
  double rho_per_coefficient = 1.0;  // only for kCustom

  static InfoCriterion Bic() { return {Kind::kBic, 1.0}; }
  static InfoCriterion Aic() { return {Kind::kAic, 0.0}; }
  static InfoCriterion Lrt() { return {Kind::kLrt, 0.0}; }
  static InfoCriterion Custom(double c) { return {Kind::kCustom, c}; }

  double Rho(int dim, double n) const;
};

using Statistic = std::variant<GPrior, InfoCriterion>;

std::string StatisticName(const Statistic& stat);

struct QuadratureOptions {
  // Kronrod rule used by the adaptive integrator: 15 or 31 points.
  int kronrod_points = 15;
  double relative_tolerance = 1e-10;
  int max_depth = 20;
};

// log of Zellner-Siow's InverseGamma(1/2, n/2) density at g.
double ZellnerSiowLogDensity(double g, double n);

// log B10 for testing p coefficients with p0 common predictors:
//   log int (g+1)^((n-p-p0)/2) [1 + g(1-R^2)]^(-(n-p0)/2) pi(g) dg.
// Requires 0 <= r2 < 1 and n > p + p0. Mixtures are integrated adaptively
// in t = log g in log space, so large n cannot overflow.
double LogBayesFactor(double r2, int n, int p, int p0, const GPrior& prior,
                      const QuadratureOptions& options = {});

// log I10 = -(rho/2) log n - (n/2) log(1 - R^2).
double LogInfoCriterion(double r2, int n, int p, const InfoCriterion& ic);

double LogStatistic(double r2, int n, int p, int p0, const Statistic& stat);

// Posterior mean of the shrinkage factor g/(1+g) given R^2. Point-mass priors
// return g/(1+g); information criteria have no shrinkage (1).
double PosteriorShrinkage(double r2, int n, int p, int p0,
                          const Statistic& stat,
                          const QuadratureOptions& options = {});

}  // namespace dpms

#endif  // DPMS_LINMODEL_H_
