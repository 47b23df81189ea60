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

#ifndef DPMS_GRAM_MODEL_H_
#define DPMS_GRAM_MODEL_H_

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "dpms/linmodel.h"
#include "dpms/mechanisms.h"
#include "dpms/rng.h"
#include "json.hpp"

namespace dpms {

// G = D'D for D = [V Z], laid out as [V'V V'Z; Z'V Z'Z].
struct GramMatrix {
  Eigen::MatrixXd g;
  int n = 0;

  int p() const { return static_cast<int>(g.rows()) - 1; }
};

GramMatrix BuildGram(const CenteredData& c);

// Sensitivities for rows whose entries are bounded by entry_bound in
// absolute value: l1 = 2 entry_bound^2 per Gram entry (Laplace) and
// l2 = sqrt(p + 1) entry_bound per row (Wishart).
Sensitivity DefaultGramSensitivity(int p, double entry_bound);

enum class RepairPolicy { kAuto, kFixed };

struct GramChain {
  Eigen::MatrixXd g_star;
  Eigen::MatrixXd g_thresh;
  Eigen::MatrixXd g_reg;
  int n = 0;
  NoiseKind mechanism = NoiseKind::kLaplace;
  PrivacyBudget budget;
  Sensitivity sensitivity;
  double e_lambda = 0.0;
  double lambda_pct = 0.0;  // 0 when thresholding was not applied
  double r = 0.0;
  bool escalated = false;

  int p() const { return static_cast<int>(g_star.rows()) - 1; }
};

// Draws one Gram error for the chain's mechanism: Laplace when delta == 0,
// otherwise Wishart.
Eigen::MatrixXd DrawGramError(int p, const PrivacyBudget& budget,
                              const Sensitivity& sens, Rng& rng);

// G* = G + E. Later stages start as copies of G*.
GramChain PrivatizeGram(const GramMatrix& gram, const PrivacyBudget& budget,
                        const Sensitivity& sens, Rng& rng);

// lambda_pct percentile of |E_ij| for an off-diagonal entry.
double ThresholdLevel(const GramChain& chain, double lambda_pct, Rng& rng);

// Zeroes off-diagonal entries of G* with |G*_ij| < e_lambda.
void ThresholdOffdiagonal(GramChain& chain, double lambda_pct, Rng& rng);

// g_reg = g_thresh + r I. kAuto takes r from the 99th percentile of
// -lambda_min(E) over 1000 mechanism draws and escalates to
// 3 |lambda_min(g_thresh)| if that is not enough.
void PdRepair(GramChain& chain, RepairPolicy policy, double fixed_r, Rng& rng);

// Minimum eigenvalue above 1e-10 times the largest magnitude.
bool IsPositiveDefinite(const Eigen::MatrixXd& m);

// n x (p+1) centered matrix whose Gram equals g_reg.
Eigen::MatrixXd SyntheticDataset(const Eigen::MatrixXd& g_reg, int n,
                                 uint64_t seed);

// R^2 of model gamma from the Gram blocks, clamped to [0, 1 - 1e-12].
double R2Gamma(const Eigen::MatrixXd& g, uint64_t gamma,
               bool* clamped = nullptr);

enum class ModelPrior { kUniform, kHierarchicalUniform };
const char* ModelPriorName(ModelPrior kind);

double ModelPriorLog(uint64_t gamma, int p, ModelPrior kind);

struct ModelPosterior {
  int p = 0;
  std::vector<double> r2;
  std::vector<double> log_statistic;  // log B_gamma0 or log I_gamma0
  std::vector<double> log_marginal;   // log prior + log statistic
  std::vector<double> posterior;
  std::vector<double> shrinkage;      // posterior mean of g/(1+g)
  Eigen::VectorXd inclusion;
  Eigen::VectorXd beta_avg;
  ModelPrior prior = ModelPrior::kUniform;
  int clamped = 0;

  std::size_t num_models() const { return posterior.size(); }
};

constexpr int kMaxEnumeratedPredictors = 25;

// Posterior over all 2^p models with p0 common predictors already removed.
ModelPosterior EnumeratePosterior(const Eigen::MatrixXd& g, int n,
                                  const Statistic& stat, ModelPrior prior,
                                  int p0 = 1);

// Least-squares coefficients of model gamma embedded into p dimensions.
Eigen::VectorXd ModelBeta(const Eigen::MatrixXd& g, uint64_t gamma);

// sum_gamma posterior * shrinkage * beta_gamma.
Eigen::VectorXd ModelAveragedBeta(const ModelPosterior& post,
                                  const Eigen::MatrixXd& g);

// n^{-1} || V beta - V beta_hat ||^2 given v_beta = V beta.
double MseOfFit(const Eigen::VectorXd& v_beta, const Eigen::MatrixXd& v,
                const Eigen::VectorXd& beta_hat);

std::string GammaString(uint64_t gamma, int p);

// One row per model: gamma,r2,log_marginal,posterior.
std::string ModelPosteriorCsv(const ModelPosterior& post);

nlohmann::json ModelSummaryJson(const ModelPosterior& post,
                                const GramChain& chain, uint64_t seed);

std::string MatrixCsv(const Eigen::MatrixXd& m,
                      const std::vector<std::string>& header);

}  // namespace dpms

#endif  // DPMS_GRAM_MODEL_H_
