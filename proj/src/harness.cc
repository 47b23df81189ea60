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

#include "dpms/harness.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "dpms/error.h"

namespace dpms {
namespace {

std::string Trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r\"");
  if (first == std::string::npos) return "";
  const auto last = s.find_last_not_of(" \t\r\"");
  return s.substr(first, last - first + 1);
}

std::vector<std::string> SplitLine(const std::string& line) {
  std::vector<std::string> cells;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) cells.push_back(Trim(cell));
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

bool IsMissing(const std::string& cell) {
  return cell.empty() || cell == "NA" || cell == "N/A" || cell == "na" ||
         cell == "NaN" || cell == "nan";
}

}  // namespace

int CsvTable::Column(const std::string& name) const {
  const auto it = std::find(names.begin(), names.end(), name);
  if (it == names.end()) Fail(ErrorCode::kData, "no column named \"" + name + "\"");
  return static_cast<int>(it - names.begin());
}

CsvTable ReadCsv(const std::string& path) {
  std::ifstream in(path);
  if (!in) Fail(ErrorCode::kData, "cannot open " + path);
  CsvTable table;
  std::string line;
  if (!std::getline(in, line)) Fail(ErrorCode::kData, path + " is empty");
  table.names = SplitLine(line);
  const std::size_t cols = table.names.size();
  std::vector<std::vector<double>> rows;
  int data_row = 0;
  while (std::getline(in, line)) {
    if (Trim(line).empty()) continue;
    ++data_row;
    const auto cells = SplitLine(line);
    if (cells.size() != cols) {
      std::ostringstream os;
      os << path << ": data row " << data_row << " has " << cells.size()
         << " cells, expected " << cols;
      Fail(ErrorCode::kData, os.str());
    }
    std::vector<double> row(cols);
    bool missing = false;
    for (std::size_t j = 0; j < cols; ++j) {
      if (IsMissing(cells[j])) {
        missing = true;
        continue;
      }
      char* end = nullptr;
      row[j] = std::strtod(cells[j].c_str(), &end);
      if (end != cells[j].c_str() + cells[j].size() || !std::isfinite(row[j])) {
        std::ostringstream os;
        os << path << ": non-numeric value \"" << cells[j] << "\" at data row "
           << data_row << ", column \"" << table.names[j] << "\"";
        Fail(ErrorCode::kData, os.str());
      }
    }
    if (missing) {
      ++table.dropped_rows;
      continue;
    }
    rows.push_back(std::move(row));
  }
  table.values.resize(rows.size(), cols);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t j = 0; j < cols; ++j) table.values(i, j) = rows[i][j];
  }
  return table;
}

RegressionData IngestCsv(const CsvTable& table, const ColumnSpec& spec,
                         bool unit_box_check, IngestReport* report) {
  if (spec.tested.empty()) {
    Fail(ErrorCode::kConfig, "at least one tested predictor is required");
  }
  const int n = static_cast<int>(table.values.rows());
  RegressionData d;
  d.y_name = spec.response;
  d.y = table.values.col(table.Column(spec.response));
  const int p0 = static_cast<int>(spec.common.size()) + (spec.intercept ? 1 : 0);
  d.x0.resize(n, p0);
  int c = 0;
  if (spec.intercept) {
    d.x0.col(c++).setOnes();
    d.x0_names.push_back("(intercept)");
  }
  for (const auto& name : spec.common) {
    d.x0.col(c++) = table.values.col(table.Column(name));
    d.x0_names.push_back(name);
  }
  d.x.resize(n, spec.tested.size());
  for (std::size_t j = 0; j < spec.tested.size(); ++j) {
    d.x.col(j) = table.values.col(table.Column(spec.tested[j]));
    d.x_names.push_back(spec.tested[j]);
    if (n > 0 && (d.x.col(j).array() == d.x(0, j)).all()) {
      Fail(ErrorCode::kData,
           "tested column \"" + spec.tested[j] + "\" is constant");
    }
  }
  IngestReport local;
  local.dropped_rows = table.dropped_rows;
  if (unit_box_check) {
    auto check = [&](const Eigen::VectorXd& col, const std::string& name) {
      const int outside = static_cast<int>(
          (col.array().abs() >= 0.5).count());
      if (outside > 0) {
        local.warnings.push_back(std::to_string(outside) + " values of \"" +
                                 name + "\" lie outside (-0.5, 0.5)");
      }
    };
    check(d.y, d.y_name);
    for (int j = 0; j < d.p(); ++j) check(d.x.col(j), d.x_names[j]);
  }
  if (report) *report = local;
  return d;
}

Eigen::MatrixXd UnitBoxTransform::Apply(const Eigen::MatrixXd& x) const {
  Eigen::MatrixXd out(x.rows(), x.cols());
  for (int j = 0; j < x.cols(); ++j) {
    out.col(j) =
        (x.col(j).array() - lower[j]) / (upper[j] - lower[j]) - 0.5;
  }
  return out;
}

Eigen::MatrixXd UnitBoxTransform::Invert(const Eigen::MatrixXd& x) const {
  Eigen::MatrixXd out(x.rows(), x.cols());
  for (int j = 0; j < x.cols(); ++j) {
    out.col(j) = (x.col(j).array() + 0.5) * (upper[j] - lower[j]) + lower[j];
  }
  return out;
}

RegressionData RescaleToUnitBox(
    const RegressionData& data, const std::pair<double, double>& y_bounds,
    const std::vector<std::pair<double, double>>& x_bounds,
    UnitBoxTransform* y_transform, UnitBoxTransform* x_transform) {
  if (static_cast<int>(x_bounds.size()) != data.p()) {
    Fail(ErrorCode::kConfig, "one bound pair is needed per tested column");
  }
  auto check = [](const std::pair<double, double>& b) {
    if (!(b.second > b.first) || !std::isfinite(b.first) ||
        !std::isfinite(b.second)) {
      Fail(ErrorCode::kConfig, "rescaling bounds must satisfy lower < upper");
    }
  };
  check(y_bounds);
  UnitBoxTransform ty{{y_bounds.first}, {y_bounds.second}};
  UnitBoxTransform tx;
  for (const auto& b : x_bounds) {
    check(b);
    tx.lower.push_back(b.first);
    tx.upper.push_back(b.second);
  }
  RegressionData out = data;
  out.y = ty.Apply(data.y).col(0);
  out.x = tx.Apply(data.x);
  if (y_transform) *y_transform = ty;
  if (x_transform) *x_transform = tx;
  return out;
}

void SimStudyConfig::Validate() const {
  if (p < 1) Fail(ErrorCode::kConfig, "p must be >= 1");
  if (n <= p + 1) Fail(ErrorCode::kConfig, "n must exceed p + 1");
  if (!(snr > 0.0)) Fail(ErrorCode::kConfig, "snr must be positive");
  if (n_active < 0 || n_active > p) {
    Fail(ErrorCode::kConfig, "n_active must lie in [0, p]");
  }
  if (n_datasets < 1) Fail(ErrorCode::kConfig, "n_datasets must be >= 1");
  if (!(beta_sd > 0.0)) Fail(ErrorCode::kConfig, "beta_sd must be positive");
  if (!(null_sigma > 0.0)) {
    Fail(ErrorCode::kConfig, "null_sigma must be positive");
  }
}

SimDataset GenerateSimDataset(const SimStudyConfig& cfg, Rng& rng) {
  cfg.Validate();
  SimDataset sim;
  RegressionData& d = sim.data;
  d.x.resize(cfg.n, cfg.p);
  for (int j = 0; j < cfg.p; ++j) {
    for (int i = 0; i < cfg.n; ++i) d.x(i, j) = rng.Normal();
    // Strictly inside (-0.5, 0.5).
    const double scale = 2.0 * d.x.col(j).cwiseAbs().maxCoeff() * (1.0 + 1e-9);
    d.x.col(j) /= scale;
    d.x_names.push_back("x" + std::to_string(j + 1));
  }
  d.x0 = Eigen::MatrixXd::Ones(cfg.n, 1);
  d.x0_names = {"(intercept)"};
  d.y_name = "y";

  std::vector<int> order(cfg.p);
  for (int j = 0; j < cfg.p; ++j) order[j] = j;
  for (int j = 0; j < cfg.n_active; ++j) {
    const int k = j + static_cast<int>(rng.UniformInt(cfg.p - j));
    std::swap(order[j], order[k]);
  }
  sim.beta = Eigen::VectorXd::Zero(cfg.p);
  for (int j = 0; j < cfg.n_active; ++j) {
    sim.beta(order[j]) = cfg.beta_sd * rng.Normal();
  }
  const Eigen::VectorXd f = d.x * sim.beta;
  const double var_f = (f.array() - f.mean()).square().mean();
  sim.sigma = var_f > 0.0 ? std::sqrt(var_f / cfg.snr) : cfg.null_sigma;
  d.y.resize(cfg.n);
  for (int i = 0; i < cfg.n; ++i) d.y(i) = f(i) + sim.sigma * rng.Normal();
  sim.outside_unit_box =
      static_cast<int>((d.y.array().abs() >= 0.5).count());
  return sim;
}

std::vector<MethodSpec> StandardMethods(double epsilon, double wishart_delta,
                                        double lambda_pct) {
  return {
      {"O", PrivacyBudget::NoNoise(), 0.0},
      {"LM", PrivacyBudget::Pure(epsilon), 0.0},
      {"LMT", PrivacyBudget::Pure(epsilon), lambda_pct},
      {"WM", PrivacyBudget::Approximate(epsilon, wishart_delta), 0.0},
      {"WMT", PrivacyBudget::Approximate(epsilon, wishart_delta), lambda_pct},
  };
}

uint64_t SupportMask(const Eigen::VectorXd& beta) {
  uint64_t mask = 0;
  for (int j = 0; j < beta.size(); ++j) {
    if (beta(j) != 0.0) mask |= uint64_t{1} << j;
  }
  return mask;
}

std::vector<MethodOutcome> EvaluateMethods(
    const SimDataset& sim, const std::vector<MethodSpec>& methods,
    const ModelSettings& settings, const Rng& rng) {
  const CenteredData centered = Reparametrize(sim.data);
  const GramMatrix gram = BuildGram(centered);
  const int p = gram.p();
  const int n = gram.n;
  const int p0 = sim.data.p0();
  const Eigen::VectorXd v_beta = centered.v * sim.beta;
  const uint64_t truth = SupportMask(sim.beta);
  const uint64_t full = (uint64_t{1} << p) - 1;
  const Sensitivity sens = DefaultGramSensitivity(p, settings.entry_bound);

  const ModelPosterior oracle =
      EnumeratePosterior(gram.g, n, settings.stat, settings.prior, p0);
  std::vector<MethodOutcome> out;
  for (std::size_t k = 0; k < methods.size(); ++k) {
    const MethodSpec& m = methods[k];
    Rng local = rng.Child(k);
    GramChain chain = PrivatizeGram(gram, m.budget, sens, local);
    if (m.lambda_pct > 0.0) ThresholdOffdiagonal(chain, m.lambda_pct, local);
    PdRepair(chain, RepairPolicy::kAuto, 0.0, local);
    const ModelPosterior post =
        EnumeratePosterior(chain.g_reg, n, settings.stat, settings.prior, p0);
    MethodOutcome o;
    o.method = m.name;
    o.mse = MseOfFit(v_beta, centered.v, post.beta_avg);
    o.mse_full = MseOfFit(v_beta, centered.v,
                          post.shrinkage[full] * ModelBeta(chain.g_reg, full));
    o.relative_mse = o.mse_full > 0.0 ? (o.mse_full - o.mse) / o.mse_full : 0.0;
    o.inclusion = post.inclusion;
    o.inclusion_distance =
        (post.inclusion - oracle.inclusion).norm() / std::sqrt(p);
    o.true_model_posterior = post.posterior[truth];
    o.r = chain.r;
    out.push_back(std::move(o));
  }
  return out;
}

}  // namespace dpms
