// Copyright 2026 The srgw-sbm Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <numeric>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "srgw/error.hpp"
#include "srgw/init.hpp"
#include "srgw/metrics.hpp"

namespace srgw {
namespace {

TEST(Ari, UnitCases) {
  const Labels x({0, 0, 1, 1, 2, 2}, 3);
  EXPECT_DOUBLE_EQ(ari(x, x), 1.0);
  EXPECT_DOUBLE_EQ(ari(Labels({0, 0, 1, 1}, 2), Labels({0, 1, 0, 1}, 2)), -0.5);
  EXPECT_DOUBLE_EQ(ari(Labels({1, 1, 0, 0, 2, 2}, 3), x), 1.0);
  EXPECT_DOUBLE_EQ(ari(Labels({0, 0, 0}, 1), Labels({0, 0, 0}, 1)), 1.0);
  EXPECT_THROW(ari(Labels({0}, 1), Labels({0, 0}, 1)), ValidationError);
}

TEST(Ari, MatchesPairCountingAndIsPermutationInvariant) {
  Rng rng(1, streams::kInstances);
  for (int rep = 0; rep < 100; ++rep) {
    const int n = 2 + static_cast<int>(rng.below(40));
    const int kx = 1 + static_cast<int>(rng.below(5));
    const int ky = 1 + static_cast<int>(rng.below(5));
    std::vector<int> x(n), y(n);
    for (int i = 0; i < n; ++i) {
      x[i] = static_cast<int>(rng.below(kx));
      y[i] = static_cast<int>(rng.below(ky));
    }
    const double value = ari(Labels(x, kx), Labels(y, ky));
    EXPECT_NEAR(value, oracle::ari_by_pairs(x, y), 1e-12);
    std::vector<int> perm(kx);
    std::iota(perm.begin(), perm.end(), 0);
    std::reverse(perm.begin(), perm.end());
    std::vector<int> xp(n);
    for (int i = 0; i < n; ++i) xp[i] = perm[x[i]];
    EXPECT_DOUBLE_EQ(ari(Labels(xp, kx), Labels(y, ky)), value);
    EXPECT_DOUBLE_EQ(ari(Labels(y, ky), Labels(x, kx)), value);
  }
}

TEST(HardLabels, LowestIndexWinsTies) {
  Eigen::MatrixXd t(2, 3);
  t << 0.25, 0.25, 0.0, 0.1, 0.2, 0.2;
  const auto l = hard_labels(TransportPlan(t));
  EXPECT_EQ(l.values(), (std::vector<int>{0, 1}));
}

TEST(SelectedK, CountsColumnsAboveTolerance) {
  Eigen::MatrixXd t(2, 3);
  t << 0.5, 0.0, 1e-8, 0.0, 0.5, 0.0;
  EXPECT_EQ(selected_k(TransportPlan::trusted(t)), 2);
  EXPECT_EQ(selected_k(TransportPlan::trusted(t), 1e-9), 3);
}

TEST(SolveAssignment, MatchesBruteForce) {
  Rng rng(2, streams::kInstances);
  for (int rep = 0; rep < 20; ++rep) {
    const int n = 1 + static_cast<int>(rng.below(6));
    Eigen::MatrixXd cost(n, n);
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) cost(i, j) = rng.uniform() * 10.0 - 3.0;
    }
    std::vector<int> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    double best = std::numeric_limits<double>::infinity();
    do {
      double total = 0.0;
      for (int i = 0; i < n; ++i) total += cost(i, perm[i]);
      best = std::min(best, total);
    } while (std::next_permutation(perm.begin(), perm.end()));
    const auto got = solve_assignment(cost);
    double total = 0.0;
    std::vector<bool> seen(n, false);
    for (int i = 0; i < n; ++i) {
      total += cost(i, got[i]);
      EXPECT_FALSE(seen[got[i]]);
      seen[got[i]] = true;
    }
    EXPECT_NEAR(total, best, 1e-12);
  }
}

TEST(LabelAccuracy, PermutationAligned) {
  EXPECT_DOUBLE_EQ(label_accuracy(Labels({1, 1, 0, 0}, 2), Labels({0, 0, 1, 1}, 2)), 1.0);
  EXPECT_DOUBLE_EQ(label_accuracy(Labels({0, 0, 0, 1}, 2), Labels({0, 0, 1, 1}, 2)), 0.75);
}

TEST(ThetaRecoveryError, ZeroUnderRelabeling) {
  const auto star = build_scenario(Scenario::kHub, 3, 0.4, 0.1);
  const std::vector<int> perm{2, 0, 1};
  const Labels truth({0, 0, 1, 1, 2, 2}, 3);
  std::vector<int> relabeled(6);
  // Cluster c in the estimate corresponds to perm[c] in the truth.
  std::vector<int> inverse(3);
  for (int c = 0; c < 3; ++c) inverse[perm[c]] = c;
  for (int i = 0; i < 6; ++i) relabeled[i] = inverse[truth[i]];
  const auto hat = star.permuted(perm);
  EXPECT_NEAR(theta_recovery_error(hat, star, Labels(relabeled, 3), truth), 0.0, 1e-15);
  EXPECT_NEAR(theta_recovery_error_by_confusion(hat, star, Labels(relabeled, 3), truth), 0.0, 1e-15);
}

TEST(ThetaRecoveryError, UnusedClustersDroppedExtraOnesPenalized) {
  const auto star = build_scenario(Scenario::kAssortative, 2, 0.4, 0.1);
  Eigen::Matrix3d hat_values;
  hat_values << 0.4, 0.1, 0.9, 0.1, 0.4, 0.9, 0.9, 0.9, 0.9;
  const Labels truth({0, 0, 1, 1}, 2);
  EXPECT_NEAR(theta_recovery_error(ConnectivityMatrix(hat_values), star, Labels({0, 0, 1, 1}, 3), truth), 0.0,
              1e-15);
  const double err = theta_recovery_error(ConnectivityMatrix(hat_values), star, Labels({0, 0, 1, 2}, 3), truth);
  EXPECT_GT(err, 0.5);
}

TEST(Evaluate, Report) {
  const Labels truth({0, 0, 1, 1}, 2);
  const auto star = build_scenario(Scenario::kAssortative, 2, 0.4, 0.1);
  const auto report = evaluate(labels_to_plan(truth, 2), star, truth, star);
  EXPECT_DOUBLE_EQ(report.ari, 1.0);
  EXPECT_EQ(report.k_hat, 2);
  EXPECT_NEAR(report.theta_error, 0.0, 1e-15);
  EXPECT_DOUBLE_EQ(report.label_accuracy, 1.0);
  EXPECT_TRUE(report.notes.empty());
}

}  // namespace
}  // namespace srgw
