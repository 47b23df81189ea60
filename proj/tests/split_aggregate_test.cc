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

#include "dpms/split_aggregate.h"

#include <algorithm>
#include <cmath>
#include <set>
#include <vector>

#include "dpms/error.h"
#include "gtest/gtest.h"
#include "test_data.h"

namespace dpms {
namespace {

// BIC-style log information criterion of one subset from two ordinary
// least-squares fits.
double DirectLogBic(const RegressionData& d) {
  auto rss = [&](const Eigen::MatrixXd& a) {
    const Eigen::VectorXd coef =
        a.colPivHouseholderQr().solve(d.y);
    return (d.y - a * coef).squaredNorm();
  };
  Eigen::MatrixXd full(d.n(), d.p0() + d.p());
  full << d.x0, d.x;
  const double r2 = 1.0 - rss(full) / rss(d.x0);
  return -0.5 * d.p() * std::log(d.n()) - 0.5 * d.n() * std::log(1.0 - r2);
}

TEST(MakeSplitTest, SizesFollowRemainderRule) {
  EXPECT_EQ(MakeSplit(10, 2, 1, 7).Sizes(), (std::vector<int>{5, 5}));
  EXPECT_EQ(MakeSplit(11, 2, 1, 7).Sizes(), (std::vector<int>{6, 5}));
  EXPECT_EQ(MakeSplit(23, 4, 5, 7).Sizes(), (std::vector<int>{6, 6, 6, 5}));
}

TEST(MakeSplitTest, DeterministicDisjointAndCovering) {
  const SplitPlan a = MakeSplit(200, 10, 20, 42);
  const SplitPlan b = MakeSplit(200, 10, 20, 42);
  EXPECT_EQ(a.assignment, b.assignment);
  EXPECT_NE(a.assignment, MakeSplit(200, 10, 20, 43).assignment);
  std::set<int> seen;
  for (const auto& subset : a.Subsets()) {
    EXPECT_EQ(subset.size(), 20u);
    for (int row : subset) EXPECT_TRUE(seen.insert(row).second);
  }
  EXPECT_EQ(seen.size(), 200u);
}

TEST(MakeSplitTest, PermutesRows) {
  const SplitPlan plan = MakeSplit(100, 2, 1, 3);
  int first_half_in_zero = 0;
  for (int row = 0; row < 50; ++row) first_half_in_zero += plan.assignment[row] == 0;
  EXPECT_GT(first_half_in_zero, 10);
  EXPECT_LT(first_half_in_zero, 40);
}

TEST(MakeSplitTest, Infeasible) {
  try {
    MakeSplit(10, 3, 4, 0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kSplitInfeasible);
  }
}

TEST(CensorTest, Examples) {
  const CensorBounds b{-4.595, 4.595};
  EXPECT_EQ(Censor(5.0, b), 4.595);
  EXPECT_EQ(Censor(0.0, b), 0.0);
  EXPECT_EQ(Censor(-10.0, b), -4.595);
}

TEST(PerSubsetLogStatsTest, SingleSubsetEqualsGlobalStatistic) {
  const auto d = testing::Design(testing::Hsb2(), "math", {}, {"gender"});
  const auto logs = PerSubsetLogStats(d, MakeSplit(d.n(), 1, 1, 0),
                                      GPrior::SampleSize());
  ASSERT_EQ(logs.size(), 1u);
  EXPECT_DOUBLE_EQ(logs[0], LogBayesFactor(RSquared(Reparametrize(d)), d.n(),
                                           1, 1, GPrior::SampleSize()));
}

TEST(PerSubsetLogStatsTest, IdenticalSubsetsGiveIdenticalValues) {
  const auto half = testing::Design(testing::Hsb2(), "math", {"science"},
                                    {"read"});
  RegressionData twice = half;
  const int n = half.n();
  twice.y.resize(2 * n);
  twice.y << half.y, half.y;
  twice.x0.resize(2 * n, half.p0());
  twice.x0 << half.x0, half.x0;
  twice.x.resize(2 * n, half.p());
  twice.x << half.x, half.x;
  SplitPlan plan;
  plan.num_subsets = 2;
  plan.assignment.assign(2 * n, 0);
  std::fill(plan.assignment.begin() + n, plan.assignment.end(), 1);
  const auto logs = PerSubsetLogStats(twice, plan, GPrior::ZellnerSiow());
  EXPECT_EQ(logs[0], logs[1]);
}

TEST(PerSubsetLogStatsTest, Hsb2HalvesMatchDirectRegressions) {
  const auto cols = testing::Hsb2();
  for (const auto& d :
       {testing::Design(cols, "math", {}, {"gender"}),
        testing::Design(cols, "math", {"science"}, {"read"})}) {
    const SplitPlan plan = MakeSplit(d.n(), 2, 10, 11);
    const auto logs = PerSubsetLogStats(d, plan, InfoCriterion::Bic());
    const auto subsets = plan.Subsets();
    for (int i = 0; i < 2; ++i) {
      EXPECT_NEAR(logs[i], DirectLogBic(d.Subset(subsets[i])), 1e-10);
    }
  }
}

TEST(PerSubsetLogStatsTest, RankDeficientSubsetIsNamed) {
  RegressionData d;
  d.y = Eigen::VectorXd::LinSpaced(12, 0, 1);
  d.x0 = Eigen::MatrixXd::Ones(12, 1);
  d.x = Eigen::MatrixXd::Zero(12, 1);
  d.x(0, 0) = 1;
  d.x(1, 0) = -1;
  d.x(2, 0) = 0.5;
  SplitPlan plan;
  plan.num_subsets = 2;
  plan.assignment = {0, 0, 0, 0, 0, 0, 1, 1, 1, 1, 1, 1};
  try {
    PerSubsetLogStats(d, plan, InfoCriterion::Bic());
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kRankDeficient);
    EXPECT_NE(std::string(e.what()).find("subset 1"), std::string::npos);
  }
}

TEST(AggregatePrivateTest, ConstantInputWithoutNoise) {
  Rng rng(1);
  const auto r = AggregatePrivate({1.5, 1.5, 1.5}, CensorBounds::Default(),
                                  PrivacyBudget::NoNoise(), rng);
  EXPECT_EQ(r.log_bstar, 1.5);
  EXPECT_EQ(r.log_bstar_censored, 1.5);
  EXPECT_EQ(r.noise.value, 0.0);
}

TEST(AggregatePrivateTest, CensorsEntriesAndResult) {
  Rng rng(1);
  const CensorBounds b{-1.0, 2.0};
  const auto r = AggregatePrivate({-5.0, 0.5, 9.0}, b, PrivacyBudget::Pure(0.01),
                                  rng);
  EXPECT_EQ(r.per_subset_logs, (std::vector<double>{-1.0, 0.5, 2.0}));
  EXPECT_GE(r.log_bstar_censored, -1.0);
  EXPECT_LE(r.log_bstar_censored, 2.0);
  EXPECT_NEAR(r.log_bstar, 0.5 + r.noise.value, 1e-15);
  EXPECT_NEAR(r.noise.scale, 3.0 / (3 * 0.01), 1e-12);
}

TEST(AggregatePrivateTest, NegationIsExactWithoutNoise) {
  Rng rng(2);
  std::vector<double> logs(10);
  for (auto& v : logs) v = 8 * rng.Uniform() - 4;
  const CensorBounds b = CensorBounds::Default();
  const CensorBounds reflected{-b.upper, -b.lower};
  std::vector<double> negated(logs.size());
  std::transform(logs.begin(), logs.end(), negated.begin(),
                 [](double v) { return -v; });
  const auto forward = AggregatePrivate(logs, b, PrivacyBudget::NoNoise(), rng);
  const auto reverse =
      AggregatePrivate(negated, reflected, PrivacyBudget::NoNoise(), rng);
  EXPECT_EQ(reverse.log_bstar, -forward.log_bstar);
}

TEST(AggregatePrivateTest, InterquartileRangeOfLaplaceNoise) {
  const std::vector<double> logs(10, 0.0);
  Rng rng(3);
  std::vector<double> draws(100000);
  for (auto& v : draws) {
    v = AggregatePrivate(logs, CensorBounds::Default(),
                         PrivacyBudget::Pure(1.0), rng)
            .log_bstar;
  }
  std::sort(draws.begin(), draws.end());
  const double iqr = draws[75000] - draws[25000];
  EXPECT_NEAR(iqr, 2 * 0.919024 * std::log(2.0), 0.03);
}

TEST(AggregatePrivateTest, SwappedHypothesesAgreeInDistribution) {
  Rng data_rng(4);
  std::vector<double> logs(10), negated(10);
  for (int i = 0; i < 10; ++i) {
    logs[i] = 6 * data_rng.Uniform() - 3;
    negated[i] = -logs[i];
  }
  const CensorBounds b = CensorBounds::Default();
  const CensorBounds reflected{-b.upper, -b.lower};
  const int kDraws = 100000;
  std::vector<double> forward(kDraws), reverse(kDraws);
  const Rng root(5);
  for (int s = 0; s < kDraws; ++s) {
    Rng a = root.Child(2 * s);
    Rng c = root.Child(2 * s + 1);
    forward[s] = -AggregatePrivate(logs, b, PrivacyBudget::Pure(1), a).log_bstar;
    reverse[s] =
        AggregatePrivate(negated, reflected, PrivacyBudget::Pure(1), c).log_bstar;
  }
  EXPECT_GT(testing::KolmogorovSmirnov(forward, reverse).second, 0.01);
}

TEST(AggregatePrivateTest, EmptyInput) {
  Rng rng(0);
  EXPECT_THROW(AggregatePrivate({}, CensorBounds::Default(),
                                PrivacyBudget::Pure(1), rng),
               Error);
}

TEST(PosteriorProbabilityTest, Examples) {
  EXPECT_DOUBLE_EQ(PosteriorProbability(0.0, 0.5), 0.5);
  EXPECT_NEAR(PosteriorProbability(std::log(3.0), 0.5), 0.25, 1e-15);
  EXPECT_EQ(PosteriorProbability(123.0, 1.0), 1.0);
  EXPECT_EQ(PosteriorProbability(-123.0, 0.0), 0.0);
  EXPECT_THROW(PosteriorProbability(0.0, 1.5), Error);
}

TEST(PosteriorProbabilityTest, StrictlyDecreasingAndStable) {
  for (double pi0 : {0.01, 0.5, 0.9}) {
    double previous = 2.0;
    for (double lb = -30; lb <= 30; lb += 0.5) {
      const double p = PosteriorProbability(lb, pi0);
      EXPECT_LT(p, previous);
      previous = p;
    }
  }
  EXPECT_EQ(PosteriorProbability(-1e6, 0.5), 1.0);
  EXPECT_EQ(PosteriorProbability(1e6, 0.5), 0.0);
}

TEST(ToJsonTest, PrivateRecordHidesSubsetValues) {
  Rng rng(6);
  const auto r = AggregatePrivate({0.1, 0.2}, CensorBounds::Default(),
                                  PrivacyBudget::Pure(1), rng);
  const auto j = ToJson(r, 0.5, 99);
  for (const char* key : {"log_bstar", "log_bstar_censored", "p_h0", "p_h1",
                          "epsilon", "delta", "M", "L", "U", "mechanism",
                          "seed"}) {
    EXPECT_TRUE(j.contains(key)) << key;
  }
  EXPECT_FALSE(j.contains("per_subset_logs"));
  EXPECT_TRUE(j["private"].get<bool>());
  EXPECT_EQ(j["seed"].get<uint64_t>(), 99u);
  const auto diag = ToJson(r, 0.5, 99, true);
  EXPECT_EQ(diag["per_subset_logs"].size(), 2u);
  EXPECT_FALSE(diag["private"].get<bool>());
}

}  // namespace
}  // namespace dpms
