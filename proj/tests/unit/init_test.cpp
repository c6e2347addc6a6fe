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

TEST(KMeans, SeparatedDoubletons) {
  Eigen::MatrixXd pts(4, 1);
  pts << 0, 0, 10, 10;
  const auto l = kmeans(pts, 2, 1);
  EXPECT_EQ(l[0], l[1]);
  EXPECT_EQ(l[2], l[3]);
  EXPECT_NE(l[0], l[2]);
}

TEST(KMeans, OneClusterPerPoint) {
  Rng rng(1, 0);
  Eigen::MatrixXd pts(6, 2);
  for (int i = 0; i < 6; ++i) pts.row(i) << rng.uniform(), rng.uniform();
  const auto fit = kmeans_fit(pts, 6, 3);
  EXPECT_NEAR(fit.inertia, 0.0, 1e-24);
  std::vector<int> sorted = fit.labels.values();
  std::sort(sorted.begin(), sorted.end());
  EXPECT_EQ(sorted, (std::vector<int>{0, 1, 2, 3, 4, 5}));
}

TEST(KMeans, DeterministicAndInertiaMonotone) {
  Rng rng(2, 0);
  Eigen::MatrixXd pts(120, 3);
  for (int i = 0; i < 120; ++i) pts.row(i) << rng.normal() + (i % 4), rng.normal(), rng.normal() * 0.5;
  const auto a = kmeans_fit(pts, 4, 9);
  const auto b = kmeans_fit(pts, 4, 9);
  EXPECT_EQ(a.labels, b.labels);
  EXPECT_EQ(a.inertia, b.inertia);
  for (std::size_t s = 1; s < a.inertia_history.size(); ++s) {
    EXPECT_LE(a.inertia_history[s], a.inertia_history[s - 1] + 1e-12);
  }
}

TEST(KMeans, Validation) {
  const Eigen::MatrixXd pts = Eigen::MatrixXd::Zero(3, 1);
  EXPECT_THROW(kmeans(pts, 0, 1), ValidationError);
  EXPECT_THROW(kmeans(pts, 4, 1), ValidationError);
}

TEST(KMeans, DuplicatePointsStillFillClusters) {
  const Eigen::MatrixXd pts = Eigen::MatrixXd::Zero(5, 2);
  const auto fit = kmeans_fit(pts, 2, 1);
  EXPECT_EQ(fit.labels.n(), 5);
  EXPECT_EQ(fit.inertia, 0.0);
}

TEST(LabelsToPlan, Examples) {
  const auto t = labels_to_plan(Labels({0, 1, 0}, 2), 2);
  Eigen::MatrixXd expected(3, 2);
  expected << 1.0 / 3, 0, 0, 1.0 / 3, 1.0 / 3, 0;
  EXPECT_EQ(t.entries(), expected);
  const auto all0 = labels_to_plan(Labels({0, 0, 0, 0}, 3), 3);
  EXPECT_EQ(all0.column_masses(), Eigen::Vector3d(1, 0, 0));
  const Labels z({2, 0, 1, 1, 2}, 3);
  EXPECT_EQ(hard_labels(labels_to_plan(z, 3)), z);
  EXPECT_THROW(labels_to_plan(Labels({0, 2}, 3), 2), ValidationError);
}

TEST(SpectralInit, DisconnectedCliques) {
  std::vector<std::pair<int, int>> edges;
  for (int base : {0, 5}) {
    for (int i = 0; i < 5; ++i) {
      for (int j = i + 1; j < 5; ++j) edges.emplace_back(base + i, base + j);
    }
  }
  const auto a = AdjacencyMatrix::from_edges(10, edges);
  const auto t0 = spectral_init(a, 2, 0);
  EXPECT_DOUBLE_EQ(ari(hard_labels(t0), Labels({0, 0, 0, 0, 0, 1, 1, 1, 1, 1}, 2)), 1.0);
  EXPECT_LE(t0.max_row_deviation(), TransportPlan::kRowTolerance);
  EXPECT_NEAR(t0.entries().minCoeff(), 1e-3 / 20.0, 1e-18);
}

TEST(SpectralInit, SingleColumn) {
  const auto a = AdjacencyMatrix::from_edges(4, {{0, 1}});
  const auto t0 = spectral_init(a, 1, 0);
  EXPECT_EQ(t0.k(), 1);
  EXPECT_NEAR(t0(2, 0), 0.25, 1e-15);
  EXPECT_THROW(spectral_init(a, 5, 0), ValidationError);
  EXPECT_THROW(spectral_init(a, 0, 0), ValidationError);
}

TEST(SpectralInit, DeterministicAndPermutationInvariant) {
  const auto g = sample_graph(build_scenario(Scenario::kAssortative, 3, 0.6, 0.02),
                              Proportions::uniform(3), 90, 3);
  EXPECT_EQ(spectral_init(g.adjacency, 3, 4).entries(), spectral_init(g.adjacency, 3, 4).entries());
  Rng rng(5, 0);
  for (int rep = 0; rep < 5; ++rep) {
    std::vector<int> perm(90);
    std::iota(perm.begin(), perm.end(), 0);
    for (int i = 89; i > 0; --i) std::swap(perm[i], perm[rng.below(i + 1)]);
    const Labels base = hard_labels(spectral_init(g.adjacency, 3, 4));
    const Labels moved = hard_labels(spectral_init(g.adjacency.permuted(perm), 3, 4));
    std::vector<int> back(90);
    for (int i = 0; i < 90; ++i) back[perm[i]] = moved[i];
    EXPECT_DOUBLE_EQ(ari(base, Labels(back, 3)), 1.0);
  }
}

TEST(SingularVectors, RandomizedMatchesDenseSubspace) {
  const auto g = sample_graph(build_scenario(Scenario::kAssortative, 3, 0.5, 0.05),
                              Proportions::uniform(3), 150, 6);
  const Eigen::MatrixXd dense = leading_singular_vectors(g.adjacency, 3, 0);
  const Eigen::MatrixXd fast = randomized_singular_vectors(g.adjacency, 3, 0);
  const Eigen::MatrixXd p1 = dense * dense.transpose();
  const Eigen::MatrixXd p2 = fast * fast.transpose();
  EXPECT_LT((p1 - p2).norm(), 1e-8);
  EXPECT_NEAR((fast.transpose() * fast - Eigen::Matrix3d::Identity()).norm(), 0.0, 1e-10);
}

}  // namespace
}  // namespace srgw
