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
#include <vector>

#include "dpms/error.h"
#include "gtest/gtest.h"

namespace dpms {
namespace {

struct Simulated {
  RegressionData data;
  CenteredData centered;
  GramMatrix gram;
};

Simulated Simulate(int n, int p, uint64_t seed, double signal = 0.4) {
  Rng rng(seed);
  Simulated s;
  s.data.x0 = Eigen::MatrixXd::Ones(n, 1);
  s.data.x.resize(n, p);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < p; ++j) s.data.x(i, j) = rng.Uniform() - 0.5;
  Eigen::VectorXd beta = Eigen::VectorXd::Zero(p);
  for (int j = 0; j < p; j += 2) beta(j) = signal;
  s.data.y.resize(n);
  for (int i = 0; i < n; ++i) {
    s.data.y(i) = 1.0 + s.data.x.row(i).dot(beta) + 0.3 * rng.Normal();
  }
  s.centered = Reparametrize(s.data);
  s.gram = BuildGram(s.centered);
  return s;
}

GramChain Noiseless(const GramMatrix& gram) {
  Rng rng(0);
  return PrivatizeGram(gram, PrivacyBudget::NoNoise(), {1.0, 1.0}, rng);
}

// Residual sum of squares from a least-squares fit on raw rows.
double RawRss(const Eigen::MatrixXd& a, const Eigen::VectorXd& y) {
  return (y - a * a.colPivHouseholderQr().solve(y)).squaredNorm();
}

Eigen::MatrixXd RawDesign(const RegressionData& d, uint64_t gamma) {
  std::vector<int> cols;
  for (int j = 0; j < d.p(); ++j) {
    if (gamma >> j & 1) cols.push_back(j);
  }
  Eigen::MatrixXd a(d.n(), 1 + cols.size());
  a.col(0).setOnes();
  for (std::size_t c = 0; c < cols.size(); ++c) a.col(c + 1) = d.x.col(cols[c]);
  return a;
}

TEST(BuildGramTest, OrthonormalBlocks) {
  CenteredData c;
  c.v = Eigen::MatrixXd::Zero(4, 2);
  c.v(0, 0) = 1;
  c.v(1, 1) = 1;
  c.z = Eigen::VectorXd::Zero(4);
  c.z(2) = 1;
  const GramMatrix g = BuildGram(c);
  EXPECT_EQ(g.g, Eigen::MatrixXd::Identity(3, 3));
  EXPECT_EQ(g.p(), 2);
}

TEST(BuildGramTest, MatchesTripleLoop) {
  Rng rng(1);
  CenteredData c;
  c.v.resize(50, 4);
  c.z.resize(50);
  for (int i = 0; i < 50; ++i) {
    for (int j = 0; j < 4; ++j) c.v(i, j) = rng.Normal();
    c.z(i) = rng.Normal();
  }
  const GramMatrix g = BuildGram(c);
  Eigen::MatrixXd d(50, 5);
  d << c.v, c.z;
  for (int a = 0; a < 5; ++a) {
    for (int b = 0; b < 5; ++b) {
      double sum = 0.0;
      for (int i = 0; i < 50; ++i) sum += d(i, a) * d(i, b);
      EXPECT_NEAR(g.g(a, b), sum, 1e-12);
    }
  }
  const double trace = g.g.trace();
  EXPECT_GE(Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(g.g).eigenvalues()(0),
            -1e-10 * trace);
}

TEST(BuildGramTest, ZeroResponse) {
  CenteredData c{Eigen::VectorXd::Zero(5), Eigen::MatrixXd::Ones(5, 1)};
  EXPECT_THROW(BuildGram(c), Error);
}

TEST(PrivatizeGramTest, NoiselessHookIsExact) {
  const auto s = Simulate(100, 3, 2);
  EXPECT_EQ(Noiseless(s.gram).g_star, s.gram.g);
  Rng rng(3);
  const auto w = PrivatizeGram(s.gram, {INFINITY, 0.1}, {1, 1}, rng);
  EXPECT_EQ(w.g_star, s.gram.g);
}

TEST(PrivatizeGramTest, WishartShiftIsPositiveSemidefinite) {
  const auto s = Simulate(100, 3, 4);
  const PrivacyBudget budget = PrivacyBudget::Approximate(1.0, std::exp(-10));
  const int k = WishartDegreesOfFreedom(3, budget);
  Rng rng(5);
  for (int t = 0; t < 50; ++t) {
    const auto chain = PrivatizeGram(s.gram, budget, {0, 0.7}, rng);
    const Eigen::MatrixXd shifted =
        chain.g_star - s.gram.g + k * 0.49 * Eigen::MatrixXd::Identity(4, 4);
    EXPECT_GE(Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(shifted)
                  .eigenvalues()(0),
              -1e-9 * shifted.norm());
  }
}

TEST(PrivatizeGramTest, LaplaceEntryVariance) {
  GramMatrix gram{Eigen::MatrixXd::Identity(3, 3), 10};
  Rng rng(6);
  const int draws = 10000;
  Eigen::MatrixXd sum_sq = Eigen::MatrixXd::Zero(3, 3);
  for (int t = 0; t < draws; ++t) {
    const auto chain = PrivatizeGram(gram, PrivacyBudget::Pure(1), {1, 0}, rng);
    const Eigen::MatrixXd e = chain.g_star - gram.g;
    sum_sq += e.cwiseProduct(e);
  }
  sum_sq /= draws;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) EXPECT_NEAR(sum_sq(i, j), 72.0, 7.2);
}

TEST(PrivatizeGramTest, MissingSensitivity) {
  GramMatrix gram{Eigen::MatrixXd::Identity(3, 3), 10};
  Rng rng(7);
  try {
    PrivatizeGram(gram, PrivacyBudget::Pure(1), {0, 1}, rng);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kConfig);
  }
  EXPECT_THROW(PrivatizeGram(gram, {1, 0.01}, {1, 0}, rng), Error);
}

TEST(DefaultGramSensitivityTest, Arithmetic) {
  const Sensitivity s = DefaultGramSensitivity(3, 0.5);
  EXPECT_DOUBLE_EQ(s.l1, 0.5);
  EXPECT_DOUBLE_EQ(s.l2, 1.0);
}

TEST(ThresholdTest, LaplaceClosedForm) {
  GramMatrix gram{Eigen::MatrixXd::Identity(3, 3), 10};
  Rng rng(8);
  auto chain = PrivatizeGram(gram, PrivacyBudget::Pure(1), {1, 0}, rng);
  EXPECT_NEAR(ThresholdLevel(chain, 99, rng), 6.0 * std::log(100.0), 1e-12);
  EXPECT_NEAR(ThresholdLevel(chain, 99, rng), 4.6052 * 6.0, 1e-3);
}

TEST(ThresholdTest, WishartLevelMatchesSampledMatrices) {
  GramMatrix gram{Eigen::MatrixXd::Identity(3, 3), 10};
  const PrivacyBudget budget = PrivacyBudget::Approximate(1.0, std::exp(-10));
  Rng rng(9);
  auto chain = PrivatizeGram(gram, budget, {0, 0.5}, rng);
  const double level = ThresholdLevel(chain, 90, rng);
  std::vector<double> entries;
  for (int t = 0; t < 20000; ++t) {
    entries.push_back(std::abs(WishartGramError(2, budget, 0.5, rng)(0, 1)));
  }
  std::sort(entries.begin(), entries.end());
  // The 90th percentile of 20000 draws has a relative MC error near 1%.
  EXPECT_NEAR(level, entries[18000], 0.04 * entries[18000]);
}

TEST(ThresholdTest, TinyLevelKeepsEverything) {
  const auto s = Simulate(200, 4, 10);
  Rng rng(11);
  auto chain = PrivatizeGram(s.gram, PrivacyBudget::Pure(1), {0.5, 0}, rng);
  ThresholdOffdiagonal(chain, 1e-12, rng);
  EXPECT_EQ(chain.g_thresh, chain.g_star);
}

TEST(ThresholdTest, HugeLevelLeavesDiagonal) {
  Eigen::MatrixXd g = Eigen::MatrixXd::Identity(4, 4) * 100;
  GramMatrix gram{g, 10};
  Rng rng(12);
  auto chain = PrivatizeGram(gram, PrivacyBudget::Pure(1e-6), {1, 0}, rng);
  chain.g_star.diagonal() = g.diagonal();
  // Off-diagonal noise is far below the threshold at this budget.
  chain.g_star(0, 1) = chain.g_star(1, 0) = 1.0;
  ThresholdOffdiagonal(chain, 99.9, rng);
  EXPECT_EQ(chain.g_thresh, Eigen::MatrixXd(chain.g_star.diagonal().asDiagonal()));
}

TEST(ThresholdTest, MonotoneInLambda) {
  const auto s = Simulate(300, 6, 13);
  Rng rng(14);
  auto chain = PrivatizeGram(s.gram, PrivacyBudget::Pure(1), {0.05, 0}, rng);
  int previous = 1 << 30;
  for (double lambda : {1.0, 20.0, 50.0, 80.0, 95.0, 99.0, 99.9}) {
    ThresholdOffdiagonal(chain, lambda, rng);
    int nonzero = 0;
    for (int i = 0; i < 7; ++i)
      for (int j = 0; j < 7; ++j) nonzero += i != j && chain.g_thresh(i, j) != 0;
    EXPECT_LE(nonzero, previous);
    previous = nonzero;
  }
  EXPECT_EQ(chain.g_thresh.diagonal(), chain.g_star.diagonal());
}

TEST(PdRepairTest, FixedZeroOnPositiveDefinite) {
  const auto s = Simulate(100, 3, 15);
  auto chain = Noiseless(s.gram);
  Rng rng(0);
  PdRepair(chain, RepairPolicy::kFixed, 0.0, rng);
  EXPECT_EQ(chain.g_reg, s.gram.g);
}

TEST(PdRepairTest, EigenvalueShift) {
  GramChain chain;
  chain.g_thresh = Eigen::Vector3d(-2.0, 1.0, 5.0).asDiagonal();
  Eigen::Matrix3d q = Eigen::Matrix3d(Eigen::AngleAxisd(0.7, Eigen::Vector3d(1, 2, 3).normalized()));
  chain.g_thresh = q * chain.g_thresh * q.transpose();
  chain.g_star = chain.g_thresh;
  Rng rng(0);
  PdRepair(chain, RepairPolicy::kFixed, 3.0, rng);
  EXPECT_NEAR(Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(chain.g_reg)
                  .eigenvalues()(0),
              1.0, 1e-12);
  try {
    PdRepair(chain, RepairPolicy::kFixed, 1.0, rng);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kRepairFailure);
  }
}

TEST(PdRepairTest, AutoAlwaysPositiveDefinite) {
  GramMatrix gram{Eigen::MatrixXd::Identity(3, 3), 10};
  const Rng root(16);
  int pd = 0;
  for (int t = 0; t < 1000; ++t) {
    Rng rng = root.Child(t);
    auto chain = PrivatizeGram(gram, PrivacyBudget::Pure(1),
                               DefaultGramSensitivity(2, 0.5), rng);
    PdRepair(chain, RepairPolicy::kAuto, 0.0, rng);
    pd += IsPositiveDefinite(chain.g_reg);
    EXPECT_GE(chain.r, 0.0);
  }
  EXPECT_EQ(pd, 1000);
}

TEST(PdRepairTest, AutoIsZeroWithoutNoise) {
  const auto s = Simulate(100, 3, 17);
  auto chain = Noiseless(s.gram);
  Rng rng(0);
  PdRepair(chain, RepairPolicy::kAuto, 0.0, rng);
  EXPECT_EQ(chain.r, 0.0);
  EXPECT_EQ(chain.g_reg, s.gram.g);
}

TEST(SyntheticDatasetTest, ReproducesGramAndIsCentered) {
  const auto s = Simulate(150, 4, 18);
  const Eigen::MatrixXd d = SyntheticDataset(s.gram.g, 80, 19);
  EXPECT_LE((d.transpose() * d - s.gram.g).cwiseAbs().maxCoeff(),
            1e-8 * s.gram.g.norm());
  EXPECT_LE(d.colwise().sum().cwiseAbs().maxCoeff(), 1e-8);
}

TEST(SyntheticDatasetTest, SizeDoesNotChangeModelFits) {
  const auto s = Simulate(150, 4, 20);
  const Eigen::MatrixXd a = SyntheticDataset(s.gram.g, 30, 1);
  const Eigen::MatrixXd b = SyntheticDataset(s.gram.g, 3000, 2);
  const Eigen::MatrixXd ga = a.transpose() * a, gb = b.transpose() * b;
  for (uint64_t gamma = 0; gamma < 16; ++gamma) {
    EXPECT_NEAR(R2Gamma(ga, gamma), R2Gamma(gb, gamma), 1e-9);
  }
}

TEST(SyntheticDatasetTest, EnumerationMatchesReleasedGram) {
  const auto s = Simulate(400, 5, 21);
  Rng rng(22);
  auto chain = PrivatizeGram(s.gram, PrivacyBudget::Pure(1),
                             DefaultGramSensitivity(5, 0.5), rng);
  PdRepair(chain, RepairPolicy::kAuto, 0, rng);
  const Eigen::MatrixXd d = SyntheticDataset(chain.g_reg, 400, 23);
  CenteredData c{d.col(5), d.leftCols(5)};
  const auto direct =
      EnumeratePosterior(chain.g_reg, 400, GPrior::SampleSize(),
                         ModelPrior::kUniform);
  const auto via = EnumeratePosterior(BuildGram(c).g, 400,
                                      GPrior::SampleSize(),
                                      ModelPrior::kUniform);
  for (std::size_t m = 0; m < direct.num_models(); ++m) {
    EXPECT_NEAR(direct.posterior[m], via.posterior[m], 1e-8);
  }
}

TEST(R2GammaTest, NullFullAndSingle) {
  const auto s = Simulate(120, 3, 24);
  EXPECT_EQ(R2Gamma(s.gram.g, 0), 0.0);
  EXPECT_NEAR(R2Gamma(s.gram.g, 7), RSquared(s.centered), 1e-10);
  for (int j = 0; j < 3; ++j) {
    const Eigen::VectorXd v = s.centered.v.col(j);
    const double dot = v.dot(s.centered.z);
    EXPECT_NEAR(R2Gamma(s.gram.g, 1u << j),
                dot * dot / (v.squaredNorm() * s.centered.z.squaredNorm()),
                1e-12);
    const double raw = 1 - RawRss(RawDesign(s.data, 1u << j), s.data.y) /
                               RawRss(RawDesign(s.data, 0), s.data.y);
    EXPECT_NEAR(R2Gamma(s.gram.g, 1u << j), raw, 1e-10);
  }
}

TEST(R2GammaTest, ClampsPerfectFit) {
  Eigen::Matrix2d g;
  g << 1, 1, 1, 1 + 1e-15;
  bool clamped = false;
  EXPECT_EQ(R2Gamma(g, 1, &clamped), 1.0 - 1e-12);
  EXPECT_TRUE(clamped);
}

TEST(ModelPriorLogTest, HierarchicalUniformP2) {
  const double expected[] = {1.0 / 3, 1.0 / 6, 1.0 / 6, 1.0 / 3};
  for (uint64_t g = 0; g < 4; ++g) {
    EXPECT_NEAR(std::exp(ModelPriorLog(g, 2, ModelPrior::kHierarchicalUniform)),
                expected[g], 1e-15);
  }
  for (uint64_t g = 0; g < 8; ++g) {
    EXPECT_NEAR(std::exp(ModelPriorLog(g, 3, ModelPrior::kUniform)), 0.125,
                1e-15);
  }
}

TEST(ModelPriorLogTest, Normalized) {
  for (int p = 1; p <= 12; ++p) {
    for (auto kind : {ModelPrior::kUniform, ModelPrior::kHierarchicalUniform}) {
      double sum = 0.0;
      for (uint64_t g = 0; g < (1u << p); ++g) {
        sum += std::exp(ModelPriorLog(g, p, kind));
      }
      EXPECT_NEAR(sum, 1.0, 1e-12) << "p=" << p;
    }
  }
}

TEST(EnumeratePosteriorTest, NoSignalFavoursNullUnderBic) {
  Eigen::MatrixXd g = Eigen::MatrixXd::Identity(5, 5) * 100;
  const auto post =
      EnumeratePosterior(g, 100, InfoCriterion::Bic(), ModelPrior::kUniform);
  const auto top = std::max_element(post.posterior.begin(), post.posterior.end());
  EXPECT_EQ(top - post.posterior.begin(), 0);
  for (double r2 : post.r2) EXPECT_EQ(r2, 0.0);
}

TEST(EnumeratePosteriorTest, TwoModelBayesRule) {
  Eigen::Matrix2d g;
  g << 2.0, 0.6, 0.6, 1.5;
  const int n = 40;
  const double r2 = 0.36 / 3.0;
  const double bf = std::pow(1.0 + n, 0.5 * (n - 2)) *
                    std::pow(1.0 + n * (1 - r2), -0.5 * (n - 1));
  const auto post = EnumeratePosterior(g, n, GPrior::SampleSize(),
                                       ModelPrior::kUniform);
  EXPECT_NEAR(post.posterior[1], bf / (1 + bf), 1e-12);
  EXPECT_NEAR(post.posterior[0], 1 / (1 + bf), 1e-12);
  EXPECT_NEAR(post.inclusion(0), post.posterior[1], 1e-15);
}

TEST(EnumeratePosteriorTest, MatchesRawDataEnumeration) {
  for (uint64_t seed = 0; seed < 10; ++seed) {
    const int p = 2 + seed % 5;
    const int n = 500;
    const auto s = Simulate(n, p, 100 + seed);
    const auto post = EnumeratePosterior(Noiseless(s.gram).g_reg, n,
                                         GPrior::SampleSize(),
                                         ModelPrior::kUniform);
    const double rss0 = RawRss(RawDesign(s.data, 0), s.data.y);
    std::vector<double> log_bf(1u << p);
    double top = -INFINITY;
    for (uint64_t m = 0; m < (1u << p); ++m) {
      const int k = std::popcount(m);
      const double r2 = 1 - RawRss(RawDesign(s.data, m), s.data.y) / rss0;
      log_bf[m] = 0.5 * (n - k - 1) * std::log1p(n) -
                  0.5 * (n - 1) * std::log1p(n * (1 - r2));
      top = std::max(top, log_bf[m]);
      EXPECT_NEAR(post.r2[m], r2, 1e-10);
    }
    double total = 0.0;
    for (double v : log_bf) total += std::exp(v - top);
    double sum = 0.0;
    for (uint64_t m = 0; m < (1u << p); ++m) {
      EXPECT_NEAR(post.posterior[m], std::exp(log_bf[m] - top) / total, 1e-10);
      sum += post.posterior[m];
    }
    EXPECT_NEAR(sum, 1.0, 1e-12);
  }
}

TEST(EnumeratePosteriorTest, InclusionIsSumOverModels) {
  const auto s = Simulate(300, 5, 25, 0.1);
  const auto post = EnumeratePosterior(s.gram.g, 300, GPrior::ZellnerSiow(),
                                       ModelPrior::kHierarchicalUniform);
  for (int j = 0; j < 5; ++j) {
    double sum = 0.0;
    for (uint64_t m = 0; m < 32; ++m) {
      if (m >> j & 1) sum += post.posterior[m];
    }
    EXPECT_EQ(post.inclusion(j), std::min(sum, 1.0));
    EXPECT_GE(post.inclusion(j), 0.0);
    EXPECT_LE(post.inclusion(j), 1.0);
  }
}

TEST(EnumeratePosteriorTest, RefusesLargeModelSpaces) {
  const Eigen::MatrixXd g = Eigen::MatrixXd::Identity(27, 27);
  EXPECT_THROW(EnumeratePosterior(g, 1000, InfoCriterion::Bic(),
                                  ModelPrior::kUniform),
               Error);
}

TEST(ModelAveragedBetaTest, DegeneratePosteriors) {
  const auto s = Simulate(200, 3, 26);
  ModelPosterior post;
  post.p = 3;
  post.posterior.assign(8, 0.0);
  post.shrinkage.assign(8, 200.0 / 201.0);
  post.posterior[0] = 1.0;
  EXPECT_EQ(ModelAveragedBeta(post, s.gram.g), Eigen::VectorXd::Zero(3));
  post.posterior[0] = 0.0;
  post.posterior[7] = 1.0;
  const Eigen::VectorXd ols = s.centered.v.colPivHouseholderQr().solve(s.centered.z);
  EXPECT_LE((ModelAveragedBeta(post, s.gram.g) - 200.0 / 201.0 * ols)
                .cwiseAbs()
                .maxCoeff(),
            1e-10);
}

TEST(ModelAveragedBetaTest, FourModelBruteForce) {
  const auto s = Simulate(250, 2, 27);
  const int n = 250;
  const auto post = EnumeratePosterior(s.gram.g, n, GPrior::Fixed(50),
                                       ModelPrior::kUniform);
  const double rss0 = RawRss(RawDesign(s.data, 0), s.data.y);
  double weights[4], total = 0.0;
  Eigen::VectorXd betas[4];
  for (uint64_t m = 0; m < 4; ++m) {
    const Eigen::MatrixXd a = RawDesign(s.data, m);
    const Eigen::VectorXd coef = a.colPivHouseholderQr().solve(s.data.y);
    const double r2 = 1 - RawRss(a, s.data.y) / rss0;
    const int k = std::popcount(m);
    weights[m] = std::exp(0.5 * (n - k - 1) * std::log1p(50.0) -
                          0.5 * (n - 1) * std::log1p(50 * (1 - r2)));
    total += weights[m];
    betas[m] = Eigen::VectorXd::Zero(2);
    int c = 1;
    for (int j = 0; j < 2; ++j) {
      if (m >> j & 1) betas[m](j) = coef(c++);
    }
  }
  Eigen::VectorXd expected = Eigen::VectorXd::Zero(2);
  for (int m = 0; m < 4; ++m) expected += weights[m] / total * 50.0 / 51.0 * betas[m];
  EXPECT_LE((post.beta_avg - expected).cwiseAbs().maxCoeff(), 1e-10);
}

TEST(ModelAveragedBetaTest, CriteriaDoNotShrink) {
  const auto s = Simulate(250, 1, 28);
  const auto post = EnumeratePosterior(s.gram.g, 250, InfoCriterion::Bic(),
                                       ModelPrior::kUniform);
  const double ols = s.gram.g(0, 1) / s.gram.g(0, 0);
  EXPECT_NEAR(post.beta_avg(0), post.posterior[1] * ols, 1e-14);
}

TEST(MseOfFitTest, Examples) {
  Rng rng(29);
  Eigen::MatrixXd v(30, 3);
  for (int i = 0; i < 30; ++i)
    for (int j = 0; j < 3; ++j) v(i, j) = rng.Normal();
  const Eigen::Vector3d beta(0.5, -1.0, 0.0), hat(0.4, -0.7, 0.2);
  const Eigen::VectorXd vb = v * beta;
  EXPECT_EQ(MseOfFit(vb, v, beta), 0.0);
  EXPECT_NEAR(MseOfFit(vb, v, Eigen::Vector3d::Zero()), vb.squaredNorm() / 30,
              1e-15);
  double loop = 0.0;
  for (int i = 0; i < 30; ++i) {
    double diff = 0.0;
    for (int j = 0; j < 3; ++j) diff += v(i, j) * (beta(j) - hat(j));
    loop += diff * diff;
  }
  EXPECT_NEAR(MseOfFit(vb, v, hat), loop / 30, 1e-12);
  EXPECT_THROW(MseOfFit(vb, v, Eigen::Vector2d::Zero()), Error);
}

TEST(GramScaleTest, ReleasedGramOverNConverges) {
  double coarse = 0.0, fine = 0.0;
  for (uint64_t seed = 0; seed < 20; ++seed) {
    auto scaled = [&](int n, uint64_t salt) {
      const auto s = Simulate(n, 3, 1000 * seed + salt);
      Rng rng(seed + salt);
      auto chain = PrivatizeGram(s.gram, PrivacyBudget::Pure(1),
                                 DefaultGramSensitivity(3, 0.5), rng);
      PdRepair(chain, RepairPolicy::kAuto, 0, rng);
      return Eigen::MatrixXd(chain.g_reg / n);
    };
    coarse += (scaled(1000, 1) - scaled(2000, 2)).cwiseAbs().maxCoeff();
    fine += (scaled(16000, 3) - scaled(32000, 4)).cwiseAbs().maxCoeff();
  }
  EXPECT_LT(fine, coarse);
}

TEST(SerializationTest, CsvShapes) {
  const auto s = Simulate(100, 3, 30);
  const auto chain = Noiseless(s.gram);
  const auto post = EnumeratePosterior(chain.g_reg, 100, InfoCriterion::Bic(),
                                       ModelPrior::kUniform);
  const std::string csv = ModelPosteriorCsv(post);
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 9);
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "gamma,size,r2,log_marginal,posterior");
  EXPECT_EQ(GammaString(5, 3), "101");
  const auto j = ModelSummaryJson(post, chain, 7);
  EXPECT_EQ(j["inclusion"].size(), 3u);
  EXPECT_EQ(j["mechanism"], "laplace");
  const std::string m = MatrixCsv(Eigen::Matrix2d::Identity(), {"a", "b"});
  EXPECT_EQ(m, "a,b\n1,0\n0,1\n");
}

}  // namespace
}  // namespace dpms
