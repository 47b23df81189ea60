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

#ifndef DPMS_CLI_H_
#define DPMS_CLI_H_

#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "json.hpp"

namespace dpms {

// Everything a command needs. Field names match the long flag names and the
// keys of the config file.
struct RunConfig {
  std::string command;  // test | select | calibrate | region | simulate

  // Data.
  std::string input;
  std::string response;
  std::vector<std::string> common;
  std::vector<std::string> tested;
  bool intercept = true;
  std::vector<double> y_bounds;  // lo, hi; empty means no rescaling
  std::vector<double> x_bounds;  // lo, hi per tested column

  // Privacy and testing.
  double epsilon = 1.0;
  double delta = 0.0;
  int M = 1;
  double L = 0.0;  // defaults filled from CensorBounds::Default()
  double U = 0.0;
  double pi0 = 0.5;
  std::string prior = "g";  // g | zs | bic | aic | lrt
  double g = 0.0;           // fixed g for prior "g"; 0 means g = n
  std::string mechanism = "laplace";  // laplace | gaussian | wishart
  std::vector<double> epsilon_grid;
  int ndraws = 1000;

  // Gram pipeline.
  double lambda = 99.0;  // 0 disables thresholding
  std::string r = "auto";
  std::string model_prior = "uniform";  // uniform | hierarchical
  double entry_bound = 0.5;
  std::string functional = "inclusion";  // inclusion | mean

  // Calibration and regions.
  double alpha = 0.05;
  int nsim = 100000;
  int nsamples = 1000;
  int df = 0;  // 0 means the number of tested columns

  // Simulation study.
  int p = 9;
  int n = 50000;
  double snr = 1.0;
  int n_active = 3;
  int n_datasets = 10;
  double beta_sd = 0.13;
  double null_sigma = 0.1;
  double wishart_delta = 0.0;  // 0 means exp(-10)

  uint64_t seed = 0;
  std::string out;
  bool diagnostics = false;

  void Validate() const;
  // Every field except `command`, for embedding in artifacts.
  nlohmann::json ToJson() const;
  // Config-file text that reproduces this run when passed to --config.
  std::string ToConfigText() const;
};

// Parses argv. Throws Error(kConfig) on bad flags; returns false when help
// was printed and nothing should run.
bool ParseArgs(int argc, const char* const* argv, RunConfig* cfg);

// Runs one command and writes its artifacts under cfg.out.
void RunCommand(const RunConfig& cfg);

// Parse plus run. Errors become a JSON record on stderr (and error.json in
// the output directory when it exists) and a nonzero exit code.
int RunCli(int argc, const char* const* argv);

}  // namespace dpms

#endif  // DPMS_CLI_H_
