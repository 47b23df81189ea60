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

#include "dpms/cli.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include <boost/math/distributions/chi_squared.hpp>

#include "CLI11.hpp"
#include "dpms/confidence_region.h"
#include "dpms/error.h"
#include "dpms/gram_model.h"
#include "dpms/harness.h"
#include "dpms/linmodel.h"
#include "dpms/mechanisms.h"
#include "dpms/null_calibration.h"
#include "dpms/parallel.h"
#include "dpms/rng.h"
#include "dpms/split_aggregate.h"

namespace dpms {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

const std::vector<std::string> kCommands = {"test", "select", "calibrate",
                                            "region", "simulate"};

// Doubles survive JSON and config round trips only at 17 digits; infinities
// are spelled out because JSON has no literal for them.
std::string Num(double x) {
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  std::ostringstream os;
  os << std::setprecision(17) << x;
  return os.str();
}

json JsonNum(double x) {
  if (std::isfinite(x)) return x;
  return Num(x);
}

json JsonNums(const std::vector<double>& xs) {
  json a = json::array();
  for (double x : xs) a.push_back(JsonNum(x));
  return a;
}

std::string Quote(const std::string& s) { return json(s).dump(); }

std::string QuoteList(const std::vector<std::string>& xs) {
  std::string out = "[";
  for (std::size_t i = 0; i < xs.size(); ++i) {
    out += (i ? ", " : "") + Quote(xs[i]);
  }
  return out + "]";
}

std::string NumList(const std::vector<double>& xs) {
  std::string out = "[";
  for (std::size_t i = 0; i < xs.size(); ++i) out += (i ? ", " : "") + Num(xs[i]);
  return out + "]";
}

Statistic StatisticFor(const RunConfig& cfg) {
  if (cfg.prior == "g") {
    return cfg.g > 0.0 ? Statistic(GPrior::Fixed(cfg.g))
                       : Statistic(GPrior::SampleSize());
  }
  if (cfg.prior == "zs") return GPrior::ZellnerSiow();
  if (cfg.prior == "bic") return InfoCriterion::Bic();
  if (cfg.prior == "aic") return InfoCriterion::Aic();
  return InfoCriterion::Lrt();
}

ModelPrior ModelPriorFor(const RunConfig& cfg) {
  return cfg.model_prior == "hierarchical" ? ModelPrior::kHierarchicalUniform
                                           : ModelPrior::kUniform;
}

// Laplace is pure; the other two take delta.
PrivacyBudget BudgetFor(const RunConfig& cfg) {
  if (std::isinf(cfg.epsilon)) return PrivacyBudget::NoNoise();
  if (cfg.mechanism == "laplace") {
    if (cfg.delta != 0.0) {
      Fail(ErrorCode::kConfig, "the laplace mechanism takes delta = 0");
    }
    return PrivacyBudget::Pure(cfg.epsilon);
  }
  if (!(cfg.delta > 0.0)) {
    Fail(ErrorCode::kConfig,
         "mechanism " + cfg.mechanism + " needs delta in (0, 1)");
  }
  return PrivacyBudget::Approximate(cfg.epsilon, cfg.delta);
}

CensorBounds BoundsFor(const RunConfig& cfg) { return {cfg.L, cfg.U}; }

fs::path OutDir(const RunConfig& cfg) {
  fs::path dir(cfg.out);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) Fail(ErrorCode::kConfig, "cannot create " + cfg.out);
  return dir;
}

void WriteFile(const fs::path& path, const std::string& body) {
  std::ofstream f(path, std::ios::binary);
  if (!f) Fail(ErrorCode::kConfig, "cannot write " + path.string());
  f << body;
}

void WriteJson(const fs::path& path, const json& j) {
  WriteFile(path, j.dump(2) + "\n");
}

// CSV artifacts carry the config as a leading comment line.
void WriteCsv(const RunConfig& cfg, const fs::path& path,
              const std::string& body) {
  json c = cfg.ToJson();
  c["command"] = cfg.command;
  WriteFile(path, "# config: " + c.dump() + "\n" + body);
}

json Envelope(const RunConfig& cfg) {
  json c = cfg.ToJson();
  c["command"] = cfg.command;
  return {{"config", c}};
}

RegressionData LoadData(const RunConfig& cfg, bool unit_box_check,
                        json* warnings) {
  const CsvTable table = ReadCsv(cfg.input);
  IngestReport report;
  RegressionData data =
      IngestCsv(table, {cfg.response, cfg.common, cfg.tested, cfg.intercept},
                unit_box_check && cfg.y_bounds.empty(), &report);
  if (!cfg.y_bounds.empty()) {
    std::vector<std::pair<double, double>> xb;
    for (std::size_t j = 0; j + 1 < cfg.x_bounds.size(); j += 2) {
      xb.emplace_back(cfg.x_bounds[j], cfg.x_bounds[j + 1]);
    }
    data = RescaleToUnitBox(data, {cfg.y_bounds[0], cfg.y_bounds[1]}, xb);
  }
  if (warnings) {
    *warnings = json::array();
    for (const auto& w : report.warnings) warnings->push_back(w);
  }
  if (warnings && report.dropped_rows > 0) {
    warnings->push_back(std::to_string(report.dropped_rows) +
                        " rows with missing values dropped");
  }
  return data;
}

// numpy's default linear interpolation between order statistics.
double Quantile(std::vector<double> xs, double q) {
  std::sort(xs.begin(), xs.end());
  const double pos = q * (xs.size() - 1);
  const std::size_t lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, xs.size() - 1);
  return xs[lo] + (pos - lo) * (xs[hi] - xs[lo]);
}

void RunTest(const RunConfig& cfg) {
  if (cfg.mechanism == "wishart") {
    Fail(ErrorCode::kConfig, "test uses the laplace or gaussian mechanism");
  }
  const RegressionData data = LoadData(cfg, false, nullptr);
  const PrivacyBudget budget = BudgetFor(cfg);
  const CensorBounds bounds = BoundsFor(cfg);
  bounds.Validate();
  const SplitPlan plan =
      MakeSplit(data.n(), cfg.M, data.p() + data.p0() + 1, cfg.seed);
  const std::vector<double> logs =
      PerSubsetLogStats(data, plan, StatisticFor(cfg));
  const Rng root(cfg.seed);
  Rng noise_rng = root.Child(1);
  const DPTestResult result = AggregatePrivate(logs, bounds, budget, noise_rng);

  const fs::path dir = OutDir(cfg);
  json j = Envelope(cfg);
  j["result"] = ToJson(result, cfg.pi0, cfg.seed, cfg.diagnostics);
  j["result"]["epsilon"] = JsonNum(budget.epsilon);
  WriteJson(dir / "test.json", j);

  if (cfg.epsilon_grid.empty()) return;
  std::ostringstream csv;
  csv << std::setprecision(17) << "epsilon,p_h1_q25,p_h1_median,p_h1_q75\n";
  for (std::size_t i = 0; i < cfg.epsilon_grid.size(); ++i) {
    RunConfig cell = cfg;
    cell.epsilon = cfg.epsilon_grid[i];
    const PrivacyBudget b = BudgetFor(cell);
    Rng rng = root.Child(2 + i);
    std::vector<double> p_h1(cfg.ndraws);
    for (int d = 0; d < cfg.ndraws; ++d) {
      const DPTestResult r = AggregatePrivate(logs, bounds, b, rng);
      p_h1[d] = 1.0 - PosteriorProbability(r.log_bstar, cfg.pi0);
    }
    csv << Num(cell.epsilon) << "," << Quantile(p_h1, 0.25) << ","
        << Quantile(p_h1, 0.5) << "," << Quantile(p_h1, 0.75) << "\n";
  }
  WriteCsv(cfg, dir / "sweep.csv", csv.str());
}

void RunCalibrate(const RunConfig& cfg) {
  if (cfg.mechanism == "wishart") {
    Fail(ErrorCode::kConfig, "calibrate uses the laplace or gaussian mechanism");
  }
  const PrivacyBudget budget = BudgetFor(cfg);
  const Rng root(cfg.seed);
  NullSimConfig null_cfg;
  null_cfg.bounds = BoundsFor(cfg);
  null_cfg.budget = budget;
  null_cfg.nsim = cfg.nsim;

  json observed;
  std::vector<double> logs;
  if (!cfg.input.empty()) {
    const RegressionData data = LoadData(cfg, false, nullptr);
    const SplitPlan plan =
        MakeSplit(data.n(), cfg.M, data.p() + data.p0() + 1, cfg.seed);
    null_cfg.subset_sizes = plan.Sizes();
    null_cfg.df = cfg.df > 0 ? cfg.df : data.p();
    logs = PerSubsetLogStats(data, plan, InfoCriterion::Lrt());
  } else {
    if (cfg.df <= 0) Fail(ErrorCode::kConfig, "calibrate without input needs df");
    if (cfg.M < 1 || cfg.n < cfg.M) {
      Fail(ErrorCode::kConfig, "calibrate without input needs n >= M >= 1");
    }
    for (int i = 0; i < cfg.M; ++i) {
      null_cfg.subset_sizes.push_back(cfg.n / cfg.M + (i < cfg.n % cfg.M));
    }
    null_cfg.df = cfg.df;
  }
  const EmpiricalNull null = SimulateNullLrt(null_cfg, root.Child(2));
  const double critical = CriticalValue(null, cfg.alpha);

  const fs::path dir = OutDir(cfg);
  json j = Envelope(cfg);
  j["calibration"] = {{"kind", NullKindName(null.kind)},
                      {"nsim", null.nsim()},
                      {"df", null_cfg.df},
                      {"M", null_cfg.num_subsets()},
                      {"alpha", cfg.alpha},
                      {"critical_value", critical},
                      {"chi2_cutoff_uncalibrated",
                       boost::math::quantile(boost::math::complement(
                           boost::math::chi_squared(null_cfg.df),
                           cfg.alpha))}};
  if (!logs.empty()) {
    Rng noise_rng = root.Child(1);
    const DPTestResult r =
        AggregatePrivate(logs, null_cfg.bounds, budget, noise_rng);
    const double stat = 2.0 * r.log_bstar_censored;
    j["observed"] = {{"statistic", stat},
                     {"p_value", PValue(null, stat)},
                     {"reject", stat > critical}};
  }
  WriteJson(dir / "calibrate.json", j);
  WriteCsv(cfg, dir / "null_quantiles.csv", QuantileTableCsv(null));
}

GramChain BuildChain(const RunConfig& cfg, const GramMatrix& gram) {
  const Rng root(cfg.seed);
  const PrivacyBudget budget = BudgetFor(cfg);
  Rng noise = root.Child(1);
  GramChain chain = PrivatizeGram(
      gram, budget, DefaultGramSensitivity(gram.p(), cfg.entry_bound), noise);
  if (cfg.lambda > 0.0) {
    Rng rng = root.Child(2);
    ThresholdOffdiagonal(chain, cfg.lambda, rng);
  }
  Rng repair = root.Child(3);
  if (cfg.r == "auto") {
    PdRepair(chain, RepairPolicy::kAuto, 0.0, repair);
  } else {
    PdRepair(chain, RepairPolicy::kFixed, std::stod(cfg.r), repair);
  }
  return chain;
}

std::vector<std::string> GramHeader(const RegressionData& data) {
  std::vector<std::string> h = data.x_names;
  h.push_back(data.y_name);
  return h;
}

void RunSelect(const RunConfig& cfg) {
  json warnings;
  const RegressionData data = LoadData(cfg, true, &warnings);
  data.Validate();
  const GramMatrix gram = BuildGram(Reparametrize(data));
  const GramChain chain = BuildChain(cfg, gram);
  const ModelPosterior post = EnumeratePosterior(
      chain.g_reg, gram.n, StatisticFor(cfg), ModelPriorFor(cfg), data.p0());

  const fs::path dir = OutDir(cfg);
  json j = Envelope(cfg);
  j["summary"] = ModelSummaryJson(post, chain, cfg.seed);
  j["summary"]["epsilon"] = JsonNum(chain.budget.epsilon);
  j["summary"]["predictors"] = data.x_names;
  j["warnings"] = warnings;
  WriteJson(dir / "summary.json", j);
  WriteCsv(cfg, dir / "model_posterior.csv", ModelPosteriorCsv(post));
  WriteCsv(cfg, dir / "released_gram.csv",
           MatrixCsv(chain.g_reg, GramHeader(data)));
}

void RunRegion(const RunConfig& cfg) {
  json warnings;
  const RegressionData data = LoadData(cfg, true, &warnings);
  data.Validate();
  const GramMatrix gram = BuildGram(Reparametrize(data));
  const GramChain chain = BuildChain(cfg, gram);
  RegionConfig rcfg;
  rcfg.alpha = cfg.alpha;
  rcfg.nsamples = cfg.nsamples;
  rcfg.seed = Rng(cfg.seed).Child(4).seed();
  const Region region = SampleRegion(chain, rcfg);

  const fs::path dir = OutDir(cfg);
  json j = Envelope(cfg);
  j["region"] = {{"accepted", region.candidates.size()},
                 {"rejected_non_pd", region.rejected_non_pd},
                 {"box_half_width", region.set.box_half_width},
                 {"spectral_bound", region.set.spectral_bound},
                 {"r", chain.r}};
  j["functionals"] = json::array();
  for (int k = 0; k < data.p(); ++k) {
    const Functional f = cfg.functional == "mean" ? Functional::PosteriorMean(k)
                                                  : Functional::Inclusion(k);
    const FunctionalHistogram hist =
        MapFunctional(region, f, gram.n, StatisticFor(cfg),
                      ModelPriorFor(cfg), data.p0());
    json s = HistogramSummaryJson(hist, f, cfg.alpha);
    s["predictor"] = data.x_names[k];
    j["functionals"].push_back(s);
    WriteCsv(cfg, dir / ("hist_" + cfg.functional + "_" + data.x_names[k] +
                         ".csv"),
             HistogramCsv(hist));
  }
  j["warnings"] = warnings;
  WriteJson(dir / "region.json", j);
}

void RunSimulate(const RunConfig& cfg) {
  SimStudyConfig sim_cfg;
  sim_cfg.p = cfg.p;
  sim_cfg.n = cfg.n;
  sim_cfg.snr = cfg.snr;
  sim_cfg.n_active = cfg.n_active;
  sim_cfg.n_datasets = cfg.n_datasets;
  sim_cfg.beta_sd = cfg.beta_sd;
  sim_cfg.null_sigma = cfg.null_sigma;
  sim_cfg.seed = cfg.seed;
  sim_cfg.Validate();
  if (cfg.p > kMaxEnumeratedPredictors) {
    Fail(ErrorCode::kConfig, "p is too large to enumerate");
  }
  const double wd = cfg.wishart_delta > 0.0 ? cfg.wishart_delta : std::exp(-10.0);
  const auto methods = StandardMethods(cfg.epsilon, wd, cfg.lambda);
  ModelSettings settings;
  settings.stat = StatisticFor(cfg);
  settings.prior = ModelPriorFor(cfg);
  settings.entry_bound = cfg.entry_bound;

  const Rng root(cfg.seed);
  std::vector<std::vector<MethodOutcome>> outcomes(cfg.n_datasets);
  std::vector<int> outside(cfg.n_datasets);
  ParallelFor(cfg.n_datasets, [&](std::size_t r) {
    const Rng rep = root.Child(r);
    Rng data_rng = rep.Child(0);
    const SimDataset sim = GenerateSimDataset(sim_cfg, data_rng);
    outside[r] = sim.outside_unit_box;
    outcomes[r] = EvaluateMethods(sim, methods, settings, rep.Child(1));
  });

  std::ostringstream rows;
  rows << std::setprecision(17)
       << "dataset,method,mse,mse_full,relative_mse,inclusion_distance,"
          "true_model_posterior,r,outside_unit_box\n";
  const std::size_t k = methods.size();
  std::vector<double> sum_mse(k), sum_sq(k), sum_rel(k), sum_dist(k),
      sum_true(k);
  for (int r = 0; r < cfg.n_datasets; ++r) {
    for (std::size_t m = 0; m < k; ++m) {
      const MethodOutcome& o = outcomes[r][m];
      rows << r << "," << o.method << "," << o.mse << "," << o.mse_full << ","
           << o.relative_mse << "," << o.inclusion_distance << ","
           << o.true_model_posterior << "," << o.r << "," << outside[r]
           << "\n";
      sum_mse[m] += o.mse;
      sum_sq[m] += o.mse * o.mse;
      sum_rel[m] += o.relative_mse;
      sum_dist[m] += o.inclusion_distance;
      sum_true[m] += o.true_model_posterior;
    }
  }
  const double reps = cfg.n_datasets;
  std::ostringstream summary;
  summary << std::setprecision(17)
          << "method,mean_mse,se_mse,mean_relative_mse,"
             "mean_inclusion_distance,mean_true_model_posterior\n";
  json j = Envelope(cfg);
  j["methods"] = json::array();
  for (std::size_t m = 0; m < k; ++m) {
    const double mean = sum_mse[m] / reps;
    const double var =
        reps > 1 ? std::max(0.0, (sum_sq[m] - reps * mean * mean) / (reps - 1))
                 : 0.0;
    const double se = std::sqrt(var / reps);
    summary << methods[m].name << "," << mean << "," << se << ","
            << sum_rel[m] / reps << "," << sum_dist[m] / reps << ","
            << sum_true[m] / reps << "\n";
    j["methods"].push_back(
        {{"method", methods[m].name},
         {"mean_mse", mean},
         {"oracle_mse_not_larger", sum_mse[0] <= sum_mse[m]}});
  }
  int total_outside = 0;
  for (int o : outside) total_outside += o;
  j["responses_outside_unit_box"] = total_outside;

  const fs::path dir = OutDir(cfg);
  WriteCsv(cfg, dir / "simulate.csv", rows.str());
  WriteCsv(cfg, dir / "summary.csv", summary.str());
  WriteJson(dir / "simulate.json", j);
}

void WriteErrorRecord(const std::string& out, const std::string& code,
                      const std::string& message, int exit_code) {
  const json rec = {{"error", code},
                    {"message", message},
                    {"exit_code", exit_code}};
  std::cerr << rec.dump() << std::endl;
  if (!out.empty() && fs::is_directory(out)) {
    std::ofstream(fs::path(out) / "error.json") << rec.dump(2) << "\n";
  }
}

}  // namespace

void RunConfig::Validate() const {
  if (std::find(kCommands.begin(), kCommands.end(), command) == kCommands.end()) {
    Fail(ErrorCode::kConfig, "unknown command \"" + command + "\"");
  }
  if (out.empty()) Fail(ErrorCode::kConfig, "--out is required");
  const bool needs_input = command == "test" || command == "select" ||
                           command == "region";
  if (needs_input && input.empty()) {
    Fail(ErrorCode::kConfig, command + " needs --input");
  }
  if (!input.empty() && (response.empty() || tested.empty())) {
    Fail(ErrorCode::kConfig, "--response and --tested are required with --input");
  }
  if (!(epsilon > 0.0)) Fail(ErrorCode::kConfig, "epsilon must be positive");
  if (!(delta >= 0.0 && delta < 1.0)) {
    Fail(ErrorCode::kConfig, "delta must lie in [0, 1)");
  }
  if (M < 1) Fail(ErrorCode::kConfig, "M must be >= 1");
  if (!(pi0 >= 0.0 && pi0 <= 1.0)) {
    Fail(ErrorCode::kConfig, "pi0 must lie in [0, 1]");
  }
  if (!(alpha > 0.0 && alpha < 1.0)) {
    Fail(ErrorCode::kConfig, "alpha must lie in (0, 1)");
  }
  if (nsim < 1 || ndraws < 1) {
    Fail(ErrorCode::kConfig, "nsim and ndraws must be positive");
  }
  if (!(lambda >= 0.0 && lambda < 100.0)) {
    Fail(ErrorCode::kConfig, "lambda must lie in [0, 100)");
  }
  if (r != "auto") {
    char* end = nullptr;
    const double v = std::strtod(r.c_str(), &end);
    if (end != r.c_str() + r.size() || !(v >= 0.0)) {
      Fail(ErrorCode::kConfig, "r must be \"auto\" or a nonnegative number");
    }
  }
  if (!(entry_bound > 0.0)) {
    Fail(ErrorCode::kConfig, "entry-bound must be positive");
  }
  if (!y_bounds.empty() &&
      (y_bounds.size() != 2 || x_bounds.size() != 2 * tested.size())) {
    Fail(ErrorCode::kConfig,
         "y-bounds takes lo hi and x-bounds takes lo hi per tested column");
  }
  if (y_bounds.empty() && !x_bounds.empty()) {
    Fail(ErrorCode::kConfig, "x-bounds requires y-bounds");
  }
  for (double e : epsilon_grid) {
    if (!(e > 0.0)) Fail(ErrorCode::kConfig, "epsilon-grid entries must be positive");
  }
}

json RunConfig::ToJson() const {
  return {
      {"input", input},
      {"response", response},
      {"common", common},
      {"tested", tested},
      {"intercept", intercept},
      {"y-bounds", JsonNums(y_bounds)},
      {"x-bounds", JsonNums(x_bounds)},
      {"epsilon", JsonNum(epsilon)},
      {"delta", delta},
      {"M", M},
      {"L", L},
      {"U", U},
      {"pi0", pi0},
      {"prior", prior},
      {"g", g},
      {"mechanism", mechanism},
      {"epsilon-grid", JsonNums(epsilon_grid)},
      {"ndraws", ndraws},
      {"lambda", lambda},
      {"r", r},
      {"model-prior", model_prior},
      {"entry-bound", entry_bound},
      {"functional", functional},
      {"alpha", alpha},
      {"nsim", nsim},
      {"nsamples", nsamples},
      {"df", df},
      {"p", p},
      {"n", n},
      {"snr", snr},
      {"n-active", n_active},
      {"n-datasets", n_datasets},
      {"beta-sd", beta_sd},
      {"null-sigma", null_sigma},
      {"wishart-delta", wishart_delta},
      {"seed", seed},
      {"out", out},
      {"diagnostics", diagnostics},
  };
}

std::string RunConfig::ToConfigText() const {
  std::ostringstream os;
  auto str = [&](const char* k, const std::string& v) {
    os << k << " = " << Quote(v) << "\n";
  };
  auto num = [&](const char* k, double v) { os << k << " = " << Num(v) << "\n"; };
  str("input", input);
  str("response", response);
  if (!common.empty()) os << "common = " << QuoteList(common) << "\n";
  if (!tested.empty()) os << "tested = " << QuoteList(tested) << "\n";
  os << "intercept = " << (intercept ? "true" : "false") << "\n";
  if (!y_bounds.empty()) os << "y-bounds = " << NumList(y_bounds) << "\n";
  if (!x_bounds.empty()) os << "x-bounds = " << NumList(x_bounds) << "\n";
  num("epsilon", epsilon);
  num("delta", delta);
  os << "M = " << M << "\n";
  num("L", L);
  num("U", U);
  num("pi0", pi0);
  str("prior", prior);
  num("g", g);
  str("mechanism", mechanism);
  if (!epsilon_grid.empty()) {
    os << "epsilon-grid = " << NumList(epsilon_grid) << "\n";
  }
  os << "ndraws = " << ndraws << "\n";
  num("lambda", lambda);
  str("r", r);
  str("model-prior", model_prior);
  num("entry-bound", entry_bound);
  str("functional", functional);
  num("alpha", alpha);
  os << "nsim = " << nsim << "\nnsamples = " << nsamples << "\ndf = " << df
     << "\np = " << p << "\nn = " << n << "\n";
  num("snr", snr);
  os << "n-active = " << n_active << "\nn-datasets = " << n_datasets << "\n";
  num("beta-sd", beta_sd);
  num("null-sigma", null_sigma);
  num("wishart-delta", wishart_delta);
  os << "seed = " << seed << "\n";
  str("out", out);
  os << "diagnostics = " << (diagnostics ? "true" : "false") << "\n";
  return os.str();
}

bool ParseArgs(int argc, const char* const* argv, RunConfig* cfg) {
  RunConfig& c = *cfg;
  const CensorBounds def = CensorBounds::Default();
  c.L = def.lower;
  c.U = def.upper;

  CLI::App app{"Differentially private model selection"};
  app.set_config("--config", "", "config file; flags given on the command line win");
  app.add_option("command", c.command, "test | select | calibrate | region | simulate")
      ->required()
      ->check(CLI::IsMember(kCommands));
  app.add_option("--input", c.input, "CSV file with a header row");
  app.add_option("--response", c.response);
  app.add_option("--common", c.common, "predictors in both models");
  app.add_option("--tested", c.tested, "predictors under test");
  app.add_option("--intercept", c.intercept);
  app.add_option("--y-bounds", c.y_bounds, "declared response range: lo hi")
      ->expected(2);
  app.add_option("--x-bounds", c.x_bounds, "lo hi per tested column");
  app.add_option("--epsilon", c.epsilon, "inf disables noise");
  app.add_option("--delta", c.delta);
  app.add_option("--M", c.M, "number of subsets");
  app.add_option("--L", c.L, "lower censoring bound");
  app.add_option("--U", c.U, "upper censoring bound");
  app.add_option("--pi0", c.pi0, "prior probability of the null");
  app.add_option("--prior", c.prior)
      ->check(CLI::IsMember({"g", "zs", "bic", "aic", "lrt"}));
  app.add_option("--g", c.g, "fixed g for --prior g; 0 means g = n");
  app.add_option("--mechanism", c.mechanism)
      ->check(CLI::IsMember({"laplace", "gaussian", "wishart"}));
  app.add_option("--epsilon-grid", c.epsilon_grid, "test: sweep these epsilons");
  app.add_option("--ndraws", c.ndraws, "test: noise draws per sweep point");
  app.add_option("--lambda", c.lambda, "threshold percentile; 0 disables");
  app.add_option("--r", c.r, "auto or a fixed ridge");
  app.add_option("--model-prior", c.model_prior)
      ->check(CLI::IsMember({"uniform", "hierarchical"}));
  app.add_option("--entry-bound", c.entry_bound);
  app.add_option("--functional", c.functional)
      ->check(CLI::IsMember({"inclusion", "mean"}));
  app.add_option("--alpha", c.alpha);
  app.add_option("--nsim", c.nsim);
  app.add_option("--nsamples", c.nsamples);
  app.add_option("--df", c.df);
  app.add_option("--p", c.p);
  app.add_option("--n", c.n);
  app.add_option("--snr", c.snr);
  app.add_option("--n-active", c.n_active);
  app.add_option("--n-datasets", c.n_datasets);
  app.add_option("--beta-sd", c.beta_sd);
  app.add_option("--null-sigma", c.null_sigma);
  app.add_option("--wishart-delta", c.wishart_delta);
  app.add_option("--seed", c.seed)->required();
  app.add_option("--out", c.out, "output directory")->required();
  app.add_option("--diagnostics", c.diagnostics,
                 "include per-subset statistics (not private)");
  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    app.exit(e);
    return false;
  } catch (const CLI::ParseError& e) {
    Fail(ErrorCode::kConfig, e.what());
  }
  c.Validate();
  return true;
}

void RunCommand(const RunConfig& cfg) {
  cfg.Validate();
  // Written first so a failed run can still be reproduced.
  WriteFile(OutDir(cfg) / "config.toml", cfg.ToConfigText());
  if (cfg.command == "test") {
    RunTest(cfg);
  } else if (cfg.command == "select") {
    RunSelect(cfg);
  } else if (cfg.command == "calibrate") {
    RunCalibrate(cfg);
  } else if (cfg.command == "region") {
    RunRegion(cfg);
  } else {
    RunSimulate(cfg);
  }
}

int RunCli(int argc, const char* const* argv) {
  RunConfig cfg;
  try {
    if (!ParseArgs(argc, argv, &cfg)) return 0;
    RunCommand(cfg);
    return 0;
  } catch (const Error& e) {
    const int code = ExitCodeFor(e.code());
    WriteErrorRecord(cfg.out, ErrorCodeName(e.code()), e.what(), code);
    return code;
  } catch (const std::exception& e) {
    WriteErrorRecord(cfg.out, "internal", e.what(), 4);
    return 4;
  }
}

}  // namespace dpms
