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

#ifndef DPMS_HARNESS_H_
#define DPMS_HARNESS_H_

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "dpms/gram_model.h"
#include "dpms/linmodel.h"
#include "dpms/mechanisms.h"
#include "dpms/rng.h"

namespace dpms {

struct CsvTable {
  std::vector<std::string> names;
  Eigen::MatrixXd values;  // rows x columns, complete rows only
  int dropped_rows = 0;    // rows with an empty or NA cell

  int Column(const std::string& name) const;  // throws kData if absent
};

// Reads a headed numeric CSV. Rows with an empty or NA cell are dropped and
// counted; any other non-numeric cell is an error naming its data row
// (1-based, header excluded) and column.
CsvTable ReadCsv(const std::string& path);

struct ColumnSpec {
  std::string response;
  std::vector<std::string> common;  // besides the intercept
  std::vector<std::string> tested;
  bool intercept = true;
};

struct IngestReport {
  int dropped_rows = 0;
  std::vector<std::string> warnings;
};

// Builds the regression design. Constant tested columns are rejected. When
// unit_box_check is set, values outside (-0.5, 0.5) produce warnings.
RegressionData IngestCsv(const CsvTable& table, const ColumnSpec& spec,
                         bool unit_box_check, IngestReport* report = nullptr);

// Affine per-column map of declared [lower, upper] onto [-0.5, 0.5].
struct UnitBoxTransform {
  std::vector<double> lower;
  std::vector<double> upper;

  Eigen::MatrixXd Apply(const Eigen::MatrixXd& x) const;
  Eigen::MatrixXd Invert(const Eigen::MatrixXd& x) const;
};

// Rescales y and the tested predictors with declared bounds: y_bounds for the
// response, x_bounds[j] for tested column j.
RegressionData RescaleToUnitBox(const RegressionData& data,
                                const std::pair<double, double>& y_bounds,
                                const std::vector<std::pair<double, double>>&
                                    x_bounds,
                                UnitBoxTransform* y_transform = nullptr,
                                UnitBoxTransform* x_transform = nullptr);

struct SimStudyConfig {
  int p = 9;
  int n = 50000;
  double snr = 1.0;
  int n_active = 3;
  int n_datasets = 10;
  double beta_sd = 0.13;
  // Noise standard deviation when the regression function is constant.
  double null_sigma = 0.1;
  uint64_t seed = 0;

  void Validate() const;
};

struct SimDataset {
  RegressionData data;
  Eigen::VectorXd beta;
  double sigma = 0.0;
  int outside_unit_box = 0;  // responses outside (-0.5, 0.5)
};

// Predictors iid N(0, 1) scaled per column into (-0.5, 0.5); intercept 0;
// n_active coefficients N(0, beta_sd^2) on a random support; sigma set so
// var(X beta) / sigma^2 equals snr exactly.
SimDataset GenerateSimDataset(const SimStudyConfig& cfg, Rng& rng);

// One private model-uncertainty method.
struct MethodSpec {
  std::string name;
  PrivacyBudget budget;      // epsilon = inf gives the non-private oracle
  double lambda_pct = 0.0;   // 0 disables thresholding
};

// O, LM, LMT, WM, WMT at one epsilon.
std::vector<MethodSpec> StandardMethods(double epsilon, double wishart_delta,
                                        double lambda_pct = 99.0);

struct ModelSettings {
  Statistic stat = GPrior::ZellnerSiow();
  ModelPrior prior = ModelPrior::kUniform;
  double entry_bound = 0.5;
};

struct MethodOutcome {
  std::string method;
  double mse = 0.0;           // model-averaged fit
  double mse_full = 0.0;      // all predictors
  double relative_mse = 0.0;  // (mse_full - mse) / mse_full
  double inclusion_distance = 0.0;  // ||incl - incl_oracle|| / sqrt(p)
  double true_model_posterior = 0.0;
  Eigen::VectorXd inclusion;
  double r = 0.0;
};

// Runs every method on one dataset. Inclusion distances are measured against
// the non-private fit; method k draws from rng.Child(k).
std::vector<MethodOutcome> EvaluateMethods(
    const SimDataset& sim, const std::vector<MethodSpec>& methods,
    const ModelSettings& settings, const Rng& rng);

// Bitmask of the nonzero entries of beta.
uint64_t SupportMask(const Eigen::VectorXd& beta);

}  // namespace dpms

#endif  // DPMS_HARNESS_H_
