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

#include "dpms/gram_model.h"

#include <algorithm>
#include <bit>
#include <cmath>
#include <iomanip>
#include <limits>
#include <sstream>

#include "dpms/error.h"
#include "dpms/parallel.h"

namespace dpms {
namespace {

constexpr int kRepairDraws = 1000;
constexpr int kThresholdDraws = 100000;
constexpr double kMaxR2 = 1.0 - 1e-12;

std::vector<int> Support(uint64_t gamma, int p) {
  std::vector<int> idx;
  for (int j = 0; j < p; ++j) {
    if (gamma >> j & 1) idx.push_back(j);
  }
  return idx;
}

double MinEigenvalue(const Eigen::MatrixXd& m) {
  return Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(
             m, Eigen::EigenvaluesOnly)
      .eigenvalues()(0);
}

// Sorted-sample percentile with the "higher" convention.
double Percentile(std::vector<double> v, double pct) {
  std::sort(v.begin(), v.end());
  const double rank = pct / 100.0 * (v.size() - 1);
  const auto index = std::min<std::size_t>(
      v.size() - 1, static_cast<std::size_t>(std::ceil(rank - 1e-9)));
  return v[index];
}

bool Wishart(const PrivacyBudget& budget) { return !budget.pure(); }

}  // namespace

GramMatrix BuildGram(const CenteredData& c) {
  if (c.z.squaredNorm() == 0.0) {
    Fail(ErrorCode::kDomain, "response is identically zero after centering");
  }
  Eigen::MatrixXd d(c.n(), c.p() + 1);
  d << c.v, c.z;
  GramMatrix out;
  out.g = d.transpose() * d;
  out.g = 0.5 * (out.g + out.g.transpose());
  out.n = c.n();
  return out;
}

Sensitivity DefaultGramSensitivity(int p, double entry_bound) {
  return {2.0 * entry_bound * entry_bound, std::sqrt(p + 1.0) * entry_bound};
}

Eigen::MatrixXd DrawGramError(int p, const PrivacyBudget& budget,
                              const Sensitivity& sens, Rng& rng) {
  if (Wishart(budget)) {
    if (!(sens.l2 > 0.0)) {
      Fail(ErrorCode::kConfig, "the Wishart mechanism needs a row-norm bound");
    }
    return WishartGramError(p, budget, sens.l2, rng);
  }
  if (!(sens.l1 > 0.0)) {
    Fail(ErrorCode::kConfig,
         "the Laplace mechanism needs a per-entry Gram sensitivity");
  }
  return LaplaceGramError(p, budget, sens.l1, rng);
}

GramChain PrivatizeGram(const GramMatrix& gram, const PrivacyBudget& budget,
                        const Sensitivity& sens, Rng& rng) {
  budget.Validate();
  GramChain chain;
  chain.g_star = gram.g + DrawGramError(gram.p(), budget, sens, rng);
  chain.g_thresh = chain.g_star;
  chain.g_reg = chain.g_star;
  chain.n = gram.n;
  chain.mechanism = Wishart(budget) ? NoiseKind::kGaussian : NoiseKind::kLaplace;
  chain.budget = budget;
  chain.sensitivity = sens;
  return chain;
}

double ThresholdLevel(const GramChain& chain, double lambda_pct, Rng& rng) {
  if (!(lambda_pct > 0.0 && lambda_pct < 100.0)) {
    Fail(ErrorCode::kInvalidArgument, "lambda_pct must lie in (0, 100)");
  }
  if (chain.budget.noiseless()) return 0.0;
  const int p = chain.p();
  if (!Wishart(chain.budget)) {
    const double b = LaplaceGramScale(p, chain.budget, chain.sensitivity.l1);
    return -b * std::log1p(-lambda_pct / 100.0);
  }
  // An off-diagonal Wishart entry is l2^2 * sum_t x_t y_t, which has the law
  // of l2^2 * sqrt(chi2_k) * N(0, 1).
  const int k = WishartDegreesOfFreedom(p, chain.budget);
  const double s2 = chain.sensitivity.l2 * chain.sensitivity.l2;
  std::vector<double> draws(kThresholdDraws);
  for (auto& v : draws) {
    v = std::abs(s2 * std::sqrt(rng.ChiSquared(k)) * rng.Normal());
  }
  return Percentile(std::move(draws), lambda_pct);
}

void ThresholdOffdiagonal(GramChain& chain, double lambda_pct, Rng& rng) {
  chain.e_lambda = ThresholdLevel(chain, lambda_pct, rng);
  chain.lambda_pct = lambda_pct;
  chain.g_thresh = chain.g_star;
  const int dim = chain.p() + 1;
  for (int i = 0; i < dim; ++i) {
    for (int j = 0; j < dim; ++j) {
      if (i != j && std::abs(chain.g_star(i, j)) < chain.e_lambda) {
        chain.g_thresh(i, j) = 0.0;
      }
    }
  }
  chain.g_reg = chain.g_thresh;
}

bool IsPositiveDefinite(const Eigen::MatrixXd& m) {
  const Eigen::VectorXd ev =
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(m, Eigen::EigenvaluesOnly)
          .eigenvalues();
  const double top = std::max(std::abs(ev(0)), std::abs(ev(ev.size() - 1)));
  return ev(0) > 1e-10 * top && ev(0) > 0.0;
}

void PdRepair(GramChain& chain, RepairPolicy policy, double fixed_r,
              Rng& rng) {
  const int dim = chain.p() + 1;
  const Eigen::MatrixXd eye = Eigen::MatrixXd::Identity(dim, dim);
  chain.escalated = false;
  if (policy == RepairPolicy::kFixed) {
    if (!(fixed_r >= 0.0)) {
      Fail(ErrorCode::kInvalidArgument, "r must be nonnegative");
    }
    chain.r = fixed_r;
    chain.g_reg = chain.g_thresh + fixed_r * eye;
    if (!IsPositiveDefinite(chain.g_reg)) {
      std::ostringstream os;
      os << "G** + rI is not positive definite for r=" << fixed_r
         << " (lambda_min(G**)=" << MinEigenvalue(chain.g_thresh) << ")";
      Fail(ErrorCode::kRepairFailure, os.str());
    }
    return;
  }
  double r = 0.0;
  if (!chain.budget.noiseless()) {
    std::vector<double> shifts(kRepairDraws);
    for (auto& s : shifts) {
      s = -MinEigenvalue(
          DrawGramError(chain.p(), chain.budget, chain.sensitivity, rng));
    }
    r = std::max(0.0, Percentile(std::move(shifts), 99.0));
  }
  chain.r = r;
  chain.g_reg = chain.g_thresh + r * eye;
  if (IsPositiveDefinite(chain.g_reg)) return;
  const double lambda_min = MinEigenvalue(chain.g_thresh);
  chain.r = 3.0 * std::abs(lambda_min);
  chain.escalated = true;
  chain.g_reg = chain.g_thresh + chain.r * eye;
  if (!IsPositiveDefinite(chain.g_reg)) {
    std::ostringstream os;
    os << "positive-definite repair failed (lambda_min(G**)=" << lambda_min
       << ", r=" << chain.r << ")";
    Fail(ErrorCode::kRepairFailure, os.str());
  }
}

Eigen::MatrixXd SyntheticDataset(const Eigen::MatrixXd& g_reg, int n,
                                 uint64_t seed) {
  const int dim = static_cast<int>(g_reg.rows());
  if (n <= dim) {
    Fail(ErrorCode::kInvalidArgument, "synthetic dataset needs n > p + 1");
  }
  const Eigen::LLT<Eigen::MatrixXd> color(g_reg);
  if (color.info() != Eigen::Success) {
    Fail(ErrorCode::kDomain, "released Gram matrix is not positive definite");
  }
  const Rng root(seed);
  for (int attempt = 0; attempt < 2; ++attempt) {
    Rng rng = root.Child(attempt);
    Eigen::MatrixXd u(n, dim);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < dim; ++j) u(i, j) = rng.Uniform();
    u.rowwise() -= u.colwise().mean();
    const Eigen::LLT<Eigen::MatrixXd> white(u.transpose() * u);
    if (white.info() != Eigen::Success) continue;
    // u R^{-1} has orthonormal columns; multiplying by U' of g_reg colors it.
    const Eigen::MatrixXd w =
        white.matrixL().solve(u.transpose()).transpose();
    Eigen::MatrixXd d = w * color.matrixU().toDenseMatrix();
    return d;
  }
  Fail(ErrorCode::kNumericFailure, "centered uniform draw was rank deficient");
}

double R2Gamma(const Eigen::MatrixXd& g, uint64_t gamma, bool* clamped) {
  if (clamped) *clamped = false;
  if (gamma == 0) return 0.0;
  const int p = static_cast<int>(g.rows()) - 1;
  const auto idx = Support(gamma, p);
  const int k = static_cast<int>(idx.size());
  Eigen::MatrixXd vtv(k, k);
  Eigen::VectorXd vtz(k);
  for (int a = 0; a < k; ++a) {
    vtz(a) = g(idx[a], p);
    for (int b = 0; b < k; ++b) vtv(a, b) = g(idx[a], idx[b]);
  }
  const Eigen::LLT<Eigen::MatrixXd> llt(vtv);
  if (llt.info() != Eigen::Success) {
    Fail(ErrorCode::kInternal, "predictor block of the Gram is singular");
  }
  const double raw = vtz.dot(llt.solve(vtz)) / g(p, p);
  const double r2 = std::clamp(raw, 0.0, kMaxR2);
  if (clamped && r2 != raw) *clamped = true;
  return r2;
}

const char* ModelPriorName(ModelPrior kind) {
  return kind == ModelPrior::kUniform ? "uniform" : "hierarchical_uniform";
}

double ModelPriorLog(uint64_t gamma, int p, ModelPrior kind) {
  if (kind == ModelPrior::kUniform) return -p * std::log(2.0);
  const int k = std::popcount(gamma);
  const double log_choose =
      std::lgamma(p + 1.0) - std::lgamma(k + 1.0) - std::lgamma(p - k + 1.0);
  return -std::log(p + 1.0) - log_choose;
}

Eigen::VectorXd ModelBeta(const Eigen::MatrixXd& g, uint64_t gamma) {
  const int p = static_cast<int>(g.rows()) - 1;
  Eigen::VectorXd beta = Eigen::VectorXd::Zero(p);
  if (gamma == 0) return beta;
  const auto idx = Support(gamma, p);
  const int k = static_cast<int>(idx.size());
  Eigen::MatrixXd vtv(k, k);
  Eigen::VectorXd vtz(k);
  for (int a = 0; a < k; ++a) {
    vtz(a) = g(idx[a], p);
    for (int b = 0; b < k; ++b) vtv(a, b) = g(idx[a], idx[b]);
  }
  const Eigen::VectorXd sub = vtv.llt().solve(vtz);
  for (int a = 0; a < k; ++a) beta(idx[a]) = sub(a);
  return beta;
}

ModelPosterior EnumeratePosterior(const Eigen::MatrixXd& g, int n,
                                  const Statistic& stat, ModelPrior prior,
                                  int p0) {
  const int p = static_cast<int>(g.rows()) - 1;
  if (p < 1) Fail(ErrorCode::kInvalidArgument, "need at least one predictor");
  if (p > kMaxEnumeratedPredictors) {
    std::ostringstream os;
    os << "p=" << p << " exceeds the enumeration limit of "
       << kMaxEnumeratedPredictors
       << " predictors; screen predictors before model averaging";
    Fail(ErrorCode::kInvalidArgument, os.str());
  }
  if (n <= p + p0) {
    Fail(ErrorCode::kDomain, "need n > p + p0 to enumerate all models");
  }
  const std::size_t models = std::size_t{1} << p;
  ModelPosterior post;
  post.p = p;
  post.prior = prior;
  post.r2.resize(models);
  post.log_statistic.resize(models);
  post.log_marginal.resize(models);
  post.posterior.resize(models);
  post.shrinkage.resize(models);
  std::vector<char> clamped(models, 0);
  ParallelFor(models, [&](std::size_t gamma) {
    bool c = false;
    const double r2 = R2Gamma(g, gamma, &c);
    clamped[gamma] = c;
    const int k = std::popcount(gamma);
    post.r2[gamma] = r2;
    post.log_statistic[gamma] =
        k == 0 ? 0.0 : LogStatistic(r2, n, k, p0, stat);
    post.shrinkage[gamma] =
        k == 0 ? 1.0 : PosteriorShrinkage(r2, n, k, p0, stat);
    post.log_marginal[gamma] =
        ModelPriorLog(gamma, p, prior) + post.log_statistic[gamma];
  });
  post.clamped = static_cast<int>(std::count(clamped.begin(), clamped.end(), 1));
  const double top =
      *std::max_element(post.log_marginal.begin(), post.log_marginal.end());
  double total = 0.0;
  for (std::size_t m = 0; m < models; ++m) {
    post.posterior[m] = std::exp(post.log_marginal[m] - top);
    total += post.posterior[m];
  }
  post.inclusion = Eigen::VectorXd::Zero(p);
  for (std::size_t m = 0; m < models; ++m) {
    post.posterior[m] /= total;
    for (int j = 0; j < p; ++j) {
      if (m >> j & 1) post.inclusion(j) += post.posterior[m];
    }
  }
  // Rounding in the sum can overshoot 1 by an ulp.
  post.inclusion = post.inclusion.cwiseMin(1.0);
  post.beta_avg = ModelAveragedBeta(post, g);
  return post;
}

Eigen::VectorXd ModelAveragedBeta(const ModelPosterior& post,
                                  const Eigen::MatrixXd& g) {
  Eigen::VectorXd beta = Eigen::VectorXd::Zero(post.p);
  for (std::size_t m = 1; m < post.num_models(); ++m) {
    const double w = post.posterior[m] * post.shrinkage[m];
    if (w == 0.0) continue;
    beta += w * ModelBeta(g, m);
  }
  return beta;
}

double MseOfFit(const Eigen::VectorXd& v_beta, const Eigen::MatrixXd& v,
                const Eigen::VectorXd& beta_hat) {
  if (v.rows() != v_beta.size() || v.cols() != beta_hat.size()) {
    Fail(ErrorCode::kInvalidArgument, "dimension mismatch in MSE");
  }
  return (v_beta - v * beta_hat).squaredNorm() / v_beta.size();
}

std::string GammaString(uint64_t gamma, int p) {
  std::string s(p, '0');
  for (int j = 0; j < p; ++j) {
    if (gamma >> j & 1) s[j] = '1';
  }
  return s;
}

std::string ModelPosteriorCsv(const ModelPosterior& post) {
  std::ostringstream os;
  os << std::setprecision(17) << "gamma,size,r2,log_marginal,posterior\n";
  for (std::size_t m = 0; m < post.num_models(); ++m) {
    os << GammaString(m, post.p) << ',' << std::popcount(m) << ','
       << post.r2[m] << ',' << post.log_marginal[m] << ','
       << post.posterior[m] << '\n';
  }
  return os.str();
}

nlohmann::json ModelSummaryJson(const ModelPosterior& post,
                                const GramChain& chain, uint64_t seed) {
  std::vector<double> inclusion(post.inclusion.data(),
                                post.inclusion.data() + post.p);
  std::vector<double> beta(post.beta_avg.data(),
                           post.beta_avg.data() + post.p);
  return {
      {"p", post.p},
      {"n", chain.n},
      {"inclusion", inclusion},
      {"beta_avg", beta},
      {"prior", ModelPriorName(post.prior)},
      {"mechanism", chain.budget.pure() ? "laplace" : "wishart"},
      {"epsilon", chain.budget.epsilon},
      {"delta", chain.budget.delta},
      {"e_lambda", chain.e_lambda},
      {"lambda_pct", chain.lambda_pct},
      {"r", chain.r},
      {"r_escalated", chain.escalated},
      {"r2_clamped", post.clamped},
      {"seed", seed},
  };
}

std::string MatrixCsv(const Eigen::MatrixXd& m,
                      const std::vector<std::string>& header) {
  std::ostringstream os;
  os << std::setprecision(17);
  for (std::size_t j = 0; j < header.size(); ++j) {
    os << (j ? "," : "") << header[j];
  }
  if (!header.empty()) os << '\n';
  for (int i = 0; i < m.rows(); ++i) {
    for (int j = 0; j < m.cols(); ++j) os << (j ? "," : "") << m(i, j);
    os << '\n';
  }
  return os.str();
}

}  // namespace dpms
