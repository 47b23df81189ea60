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

#include "dpms/linmodel.h"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <sstream>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "dpms/error.h"

namespace dpms {
namespace {

constexpr double kRankTolerance = 1e-10;

// log(1 + e^x) without overflow.
double Softplus(double x) {
  return x > 0.0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x));
}

void CheckArguments(double r2, int n, int p, int p0) {
  if (!(r2 >= 0.0 && r2 < 1.0)) {
    std::ostringstream os;
    os << "R^2 must lie in [0, 1), got " << r2;
    Fail(ErrorCode::kDomain, os.str());
  }
  if (p < 1 || p0 < 0 || n <= p + p0) {
    std::ostringstream os;
    os << "need n > p + p0 with p >= 1 (n=" << n << ", p=" << p
       << ", p0=" << p0 << ")";
    Fail(ErrorCode::kDomain, os.str());
  }
}

// Log integrand of the Zellner-Siow Bayes factor in t = log g, including the
// Jacobian dg = g dt.
struct ZellnerSiowIntegrand {
  double a;  // (n - p - p0) / 2
  double c;  // (n - p0) / 2
  double log_one_minus_r2;
  double n;

  // a * softplus(t) - c * softplus(t + l), arranged so the two large terms
  // never cancel: softplus(t) - softplus(t + l) = log1p(-expm1(l) /
  // (exp(-t) + exp(l))).
  double operator()(double t) const {
    const double gap = std::log1p(-std::expm1(log_one_minus_r2) /
                                  (std::exp(-t) + std::exp(log_one_minus_r2)));
    return a * gap - (c - a) * Softplus(t + log_one_minus_r2) +
           ZellnerSiowLogDensity(std::exp(t), n) + t;
  }

  // Rounding noise in the log integrand, which bounds attainable accuracy.
  double Noise() const {
    return 64 * std::numeric_limits<double>::epsilon() *
           (1.0 + a * std::abs(log_one_minus_r2) + n);
  }
};

struct LogIntegrals {
  double log_mass;       // log of int e^h dt
  double log_shrinkage;  // log of int g/(1+g) e^h dt
};

template <int Points>
double Integrate(const std::function<double(double)>& f, double lo, double hi,
                 const QuadratureOptions& options) {
  double error = 0.0;
  return boost::math::quadrature::gauss_kronrod<double, Points>::integrate(
      f, lo, hi, options.max_depth, options.relative_tolerance, &error);
}

double IntegrateWith(const std::function<double(double)>& f, double lo,
                     double hi, const QuadratureOptions& options) {
  switch (options.kronrod_points) {
    case 15:
      return Integrate<15>(f, lo, hi, options);
    case 31:
      return Integrate<31>(f, lo, hi, options);
    default:
      Fail(ErrorCode::kInvalidArgument, "kronrod_points must be 15 or 31");
  }
}

LogIntegrals ZellnerSiowIntegrals(double r2, int n, int p, int p0,
                                  const QuadratureOptions& options) {
  const ZellnerSiowIntegrand h{0.5 * (n - p - p0), 0.5 * (n - p0),
                               std::log1p(-r2), static_cast<double>(n)};

  // Coarse scan for the mode, then golden-section refinement. The integrand
  // is unimodal in t.
  constexpr double kScanLo = -40.0;
  constexpr double kStep = 0.25;
  const double scan_hi = 60.0 + std::log(static_cast<double>(n)) -
                         h.log_one_minus_r2;
  double best_t = kScanLo;
  double best_h = h(kScanLo);
  for (double t = kScanLo + kStep; t <= scan_hi; t += kStep) {
    const double v = h(t);
    if (v > best_h) {
      best_h = v;
      best_t = t;
    }
  }
  double lo = best_t - kStep;
  double hi = best_t + kStep;
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  for (int it = 0; it < 80 && hi - lo > 1e-9; ++it) {
    const double x1 = hi - inv_phi * (hi - lo);
    const double x2 = lo + inv_phi * (hi - lo);
    if (h(x1) < h(x2)) {
      lo = x1;
    } else {
      hi = x2;
    }
  }
  const double mode = 0.5 * (lo + hi);
  const double h_max = std::max(h(mode), best_h);

  // Everything more than 60 nats below the peak is negligible at the
  // requested tolerance.
  constexpr double kDrop = 60.0;
  double left = mode;
  double step = 0.5;
  while (h(left) > h_max - kDrop && left > -745.0) {
    left -= step;
    step *= 1.5;
  }
  double right = mode;
  step = 0.5;
  while (h(right) > h_max - kDrop && right < 745.0) {
    right += step;
    step *= 1.5;
  }

  QuadratureOptions tuned = options;
  tuned.relative_tolerance = std::max(options.relative_tolerance, h.Noise());
  const std::function<double(double)> mass = [&](double t) {
    return std::exp(h(t) - h_max);
  };
  const std::function<double(double)> shrunk = [&](double t) {
    return std::exp(h(t) - h_max - Softplus(-t));
  };
  // Splitting at the mode keeps the peak away from the panel interiors.
  const double m0 = IntegrateWith(mass, left, mode, tuned) +
                    IntegrateWith(mass, mode, right, tuned);
  const double m1 = IntegrateWith(shrunk, left, mode, tuned) +
                    IntegrateWith(shrunk, mode, right, tuned);
  if (!(m0 > 0.0) || !std::isfinite(m0) || !(m1 > 0.0) || !std::isfinite(m1)) {
    std::ostringstream os;
    os << "Zellner-Siow quadrature failed (r2=" << r2 << ", n=" << n
       << ", p=" << p << ", p0=" << p0 << ")";
    Fail(ErrorCode::kNumericFailure, os.str());
  }
  return {h_max + std::log(m0), h_max + std::log(m1)};
}

}  // namespace

int NumericalRank(const Eigen::MatrixXd& a) {
  if (a.cols() == 0) return 0;
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(a);
  const auto& s = svd.singularValues();
  if (s.size() == 0 || s(0) == 0.0) return 0;
  const double cut = kRankTolerance * s(0);
  int rank = 0;
  for (int i = 0; i < s.size(); ++i) {
    if (s(i) > cut) ++rank;
  }
  return rank;
}

int FirstDependentColumn(const Eigen::MatrixXd& a) {
  if (NumericalRank(a) == a.cols()) return -1;
  for (int j = 1; j <= a.cols(); ++j) {
    if (NumericalRank(a.leftCols(j)) < j) return j - 1;
  }
  return static_cast<int>(a.cols()) - 1;
}

void RegressionData::Validate() const {
  if (x0.rows() != y.size() || x.rows() != y.size()) {
    Fail(ErrorCode::kData, "response and design matrices disagree on n");
  }
  if (p() < 1) Fail(ErrorCode::kData, "at least one tested predictor needed");
  if (n() <= p() + p0()) {
    std::ostringstream os;
    os << "need n > p + p0 (n=" << n() << ", p=" << p() << ", p0=" << p0()
       << ")";
    Fail(ErrorCode::kData, os.str());
  }
  Eigen::MatrixXd full(n(), p0() + p());
  full << x0, x;
  const int bad = FirstDependentColumn(full);
  if (bad >= 0) {
    std::ostringstream os;
    os << "design [X0 X] is rank deficient at column " << bad;
    if (bad < p0() && bad < static_cast<int>(x0_names.size())) {
      os << " (" << x0_names[bad] << ")";
    } else if (bad >= p0() &&
               bad - p0() < static_cast<int>(x_names.size())) {
      os << " (" << x_names[bad - p0()] << ")";
    }
    throw RankError(os.str(), bad);
  }
}

RegressionData RegressionData::Subset(const std::vector<int>& rows) const {
  RegressionData out;
  const int m = static_cast<int>(rows.size());
  out.y.resize(m);
  out.x0.resize(m, x0.cols());
  out.x.resize(m, x.cols());
  for (int i = 0; i < m; ++i) {
    out.y(i) = y(rows[i]);
    out.x0.row(i) = x0.row(rows[i]);
    out.x.row(i) = x.row(rows[i]);
  }
  out.y_name = y_name;
  out.x0_names = x0_names;
  out.x_names = x_names;
  return out;
}

CenteredData Reparametrize(const RegressionData& data) {
  if (data.x0.rows() != data.y.size() || data.x.rows() != data.y.size()) {
    Fail(ErrorCode::kData, "response and design matrices disagree on n");
  }
  CenteredData out;
  const int p0 = data.p0();
  if (p0 == 0) {
    out.z = data.y;
    out.v = data.x;
    return out;
  }
  const int bad = FirstDependentColumn(data.x0);
  if (bad >= 0) {
    std::ostringstream os;
    os << "common predictors X0 are rank deficient at column " << bad;
    if (bad < static_cast<int>(data.x0_names.size())) {
      os << " (" << data.x0_names[bad] << ")";
    }
    throw RankError(os.str(), bad);
  }
  const Eigen::HouseholderQR<Eigen::MatrixXd> qr(data.x0);
  const auto q = qr.householderQ();
  // (I - Q1 Q1') w = Q [0; (Q'w)_tail].
  auto residual = [&](const Eigen::VectorXd& w) -> Eigen::VectorXd {
    Eigen::VectorXd coef = q.adjoint() * w;
    coef.head(p0).setZero();
    return q * coef;
  };
  out.z = residual(data.y);
  out.v.resize(data.n(), data.p());
  for (int j = 0; j < data.p(); ++j) out.v.col(j) = residual(data.x.col(j));
  return out;
}

double RSquared(const CenteredData& centered) {
  const double zz = centered.z.squaredNorm();
  if (!(zz > 0.0)) {
    Fail(ErrorCode::kDomain, "degenerate response: Z'Z = 0");
  }
  const int p = centered.p();
  if (p == 0) return 0.0;
  const int bad = FirstDependentColumn(centered.v);
  if (bad >= 0) {
    std::ostringstream os;
    os << "centered design V is rank deficient at column " << bad;
    throw RankError(os.str(), bad);
  }
  const Eigen::HouseholderQR<Eigen::MatrixXd> qr(centered.v);
  const Eigen::VectorXd qtz = qr.householderQ().adjoint() * centered.z;
  const double r2 = qtz.head(p).squaredNorm() / zz;
  return std::clamp(r2, 0.0, 1.0);
}

double InfoCriterion::Rho(int dim, double n) const {
  switch (kind) {
    case Kind::kBic:
      return dim;
    case Kind::kAic:
      return 2.0 * dim / std::log(n);
    case Kind::kLrt:
      return 0.0;
    case Kind::kCustom:
      return rho_per_coefficient * dim;
  }
  return 0.0;
}

std::string StatisticName(const Statistic& stat) {
  if (const auto* prior = std::get_if<GPrior>(&stat)) {
    switch (prior->kind) {
      case GPrior::Kind::kFixed: {
        std::ostringstream os;
        os << "g=" << prior->g;
        return os.str();
      }
      case GPrior::Kind::kSampleSize:
        return "g=n";
      case GPrior::Kind::kZellnerSiow:
        return "zellner-siow";
    }
  }
  const auto& ic = std::get<InfoCriterion>(stat);
  switch (ic.kind) {
    case InfoCriterion::Kind::kBic:
      return "bic";
    case InfoCriterion::Kind::kAic:
      return "aic";
    case InfoCriterion::Kind::kLrt:
      return "lrt";
    case InfoCriterion::Kind::kCustom: {
      std::ostringstream os;
      os << "rho=" << ic.rho_per_coefficient << "*dim";
      return os.str();
    }
  }
  return "unknown";
}

double ZellnerSiowLogDensity(double g, double n) {
  // (n/2)^(1/2) / Gamma(1/2) g^(-3/2) exp(-n / (2g))
  return 0.5 * std::log(0.5 * n) - std::lgamma(0.5) - 1.5 * std::log(g) -
         0.5 * n / g;
}

double LogBayesFactor(double r2, int n, int p, int p0, const GPrior& prior,
                      const QuadratureOptions& options) {
  CheckArguments(r2, n, p, p0);
  if (prior.point_mass()) {
    const double g = prior.ResolveG(n);
    if (!(g >= 0.0)) Fail(ErrorCode::kDomain, "g must be nonnegative");
    return 0.5 * (n - p - p0) * std::log1p(g) -
           0.5 * (n - p0) * std::log1p(g * (1.0 - r2));
  }
  return ZellnerSiowIntegrals(r2, n, p, p0, options).log_mass;
}

double LogInfoCriterion(double r2, int n, int p, const InfoCriterion& ic) {
  if (!(r2 >= 0.0 && r2 < 1.0)) {
    std::ostringstream os;
    os << "R^2 must lie in [0, 1), got " << r2;
    Fail(ErrorCode::kDomain, os.str());
  }
  if (n < 1) Fail(ErrorCode::kDomain, "n must be positive");
  const double rho = ic.Rho(p, n);
  if (!(rho >= 0.0)) Fail(ErrorCode::kDomain, "rho must be nonnegative");
  return -0.5 * rho * std::log(static_cast<double>(n)) -
         0.5 * n * std::log1p(-r2);
}

double LogStatistic(double r2, int n, int p, int p0, const Statistic& stat) {
  if (const auto* prior = std::get_if<GPrior>(&stat)) {
    return LogBayesFactor(r2, n, p, p0, *prior);
  }
  return LogInfoCriterion(r2, n, p, std::get<InfoCriterion>(stat));
}

double PosteriorShrinkage(double r2, int n, int p, int p0,
                          const Statistic& stat,
                          const QuadratureOptions& options) {
  const auto* prior = std::get_if<GPrior>(&stat);
  if (prior == nullptr) return 1.0;
  if (prior->point_mass()) {
    const double g = prior->ResolveG(n);
    return g / (1.0 + g);
  }
  CheckArguments(r2, n, p, p0);
  const LogIntegrals li = ZellnerSiowIntegrals(r2, n, p, p0, options);
  return std::exp(li.log_shrinkage - li.log_mass);
}

}  // namespace dpms
