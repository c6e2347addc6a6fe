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

#include <cmath>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "srgw/baselines.hpp"
#include "srgw/error.hpp"
#include "srgw/init.hpp"
#include "srgw/solver.hpp"

namespace srgw {
namespace {

const CompositeLoss kNll(LossKind::kBernoulliNll);

TEST(ExactLogLikelihood, SinglePair) {
  const auto a = AdjacencyMatrix::from_edges(2, {{0, 1}});
  EXPECT_NEAR(exact_log_likelihood(a, ConnectivityMatrix::constant(1, 0.7), Proportions::uniform(1)),
              std::log(0.7), 1e-15);
  Eigen::Matrix2d th;
  th << 0.9, 0.1, 0.1, 0.9;
  EXPECT_NEAR(exact_log_likelihood(a, ConnectivityMatrix(th), Proportions::uniform(2)), std::log(0.5),
              1e-15);
}

TEST(ExactLogLikelihood, MatchesDirectProductSum) {
  Rng rng(1, streams::kInstances);
  for (int rep = 0; rep < 10; ++rep) {
    const int n = 2 + static_cast<int>(rng.below(4));
    const int k = 1 + static_cast<int>(rng.below(3));
    const auto a = oracle::random_graph(rng, n, 0.5);
    const auto theta = oracle::random_theta(rng, k, 0.05, 0.95);
    Eigen::VectorXd alpha(k);
    for (int c = 0; c < k; ++c) alpha(c) = 0.1 + rng.uniform();
    alpha /= alpha.sum();
    const double direct = std::log(oracle::likelihood(a.entries(), theta.values(), alpha));
    const double got = exact_log_likelihood(a, theta, Proportions(alpha));
    EXPECT_NEAR(got, direct, 1e-10 * std::abs(direct));
  }
}

TEST(ExactLogLikelihood, LabelSwitchingInvariant) {
  Rng rng(2, streams::kInstances);
  const auto a = oracle::random_graph(rng, 6, 0.5);
  const auto theta = oracle::random_theta(rng, 3, 0.05, 0.95);
  const Eigen::Vector3d alpha(0.2, 0.3, 0.5);
  const std::vector<int> perm{2, 0, 1};
  Eigen::Vector3d moved;
  for (int c = 0; c < 3; ++c) moved(c) = alpha(perm[c]);
  EXPECT_NEAR(exact_log_likelihood(a, theta, Proportions(alpha)),
              exact_log_likelihood(a, theta.permuted(perm), Proportions(moved)), 1e-12);
}

TEST(ExactLogLikelihood, GuardsSize) {
  const auto a = AdjacencyMatrix::from_edges(30, {{0, 1}});
  EXPECT_THROW(exact_log_likelihood(a, ConnectivityMatrix::constant(2, 0.3), Proportions::uniform(2)),
               InstanceTooLarge);
}

TEST(SupAlphaLogLikelihood, Basics) {
  Rng rng(3, streams::kInstances);
  const auto a = oracle::random_graph(rng, 6, 0.5);
  EXPECT_NEAR(sup_alpha_log_likelihood(a, ConnectivityMatrix::constant(1, 0.4)),
              exact_log_likelihood(a, ConnectivityMatrix::constant(1, 0.4), Proportions::uniform(1)), 1e-14);
  for (int k : {2, 3}) {
    const auto theta = oracle::random_theta(rng, k, 0.05, 0.95);
    EXPECT_GE(sup_alpha_log_likelihood(a, theta), exact_log_likelihood(a, theta, Proportions::uniform(k)));
  }
  EXPECT_THROW(sup_alpha_log_likelihood(a, ConnectivityMatrix::constant(4, 0.3)), ValidationError);
}

TEST(SupAlphaLogLikelihood, BeatsFineGrid) {
  Rng rng(4, streams::kInstances);
  const auto a = oracle::random_graph(rng, 7, 0.4);
  const auto theta = oracle::random_theta(rng, 2, 0.05, 0.95);
  double best = -std::numeric_limits<double>::infinity();
  for (int g = 0; g <= 1000; ++g) {
    const double w = g / 1000.0;
    best = std::max(best, std::log(oracle::likelihood(a.entries(), theta.values(), Eigen::Vector2d(w, 1 - w))));
  }
  EXPECT_GE(sup_alpha_log_likelihood(a, theta), best - 1e-9);
}

TEST(VertexOracle, OneEdgeExample) {
  const auto a = AdjacencyMatrix::from_edges(2, {{0, 1}});
  Eigen::Matrix2d th;
  th << 0.9, 0.1, 0.1, 0.9;
  const auto r = vertex_srgw_oracle(a, kNll, ConnectivityMatrix(th));
  EXPECT_NEAR(r.value, -2.0 * std::log(0.9) / 4.0, 1e-15);
  EXPECT_EQ(r.labels.values(), (std::vector<int>{0, 0}));
}

TEST(VertexOracle, ConstantThetaCollapse) {
  Rng rng(5, streams::kInstances);
  const auto a = oracle::random_graph(rng, 6, 0.5);
  const double c = 0.35;
  double expected = 0.0;
  for (int i = 0; i < 6; ++i) {
    for (int j = 0; j < 6; ++j) {
      if (i != j) expected += oracle::loss(LossKind::kBernoulliNll, a(i, j), c);
    }
  }
  const auto r = vertex_srgw_oracle(a, kNll, ConnectivityMatrix::constant(3, c));
  EXPECT_NEAR(r.value, expected / 36.0, 1e-14);
  EXPECT_EQ(r.labels.values(), std::vector<int>(6, 0));
}

TEST(VertexOracle, MatchesLoopEnumeration) {
  Rng rng(6, streams::kInstances);
  for (LossKind kind : {LossKind::kBernoulliNll, LossKind::kSquared}) {
    for (int rep = 0; rep < 4; ++rep) {
      const auto a = oracle::random_graph(rng, 6, 0.5);
      const auto theta = oracle::random_theta(rng, 3, 0.05, 0.95);
      const auto r = vertex_srgw_oracle(a, CompositeLoss(kind), theta);
      EXPECT_NEAR(r.value, oracle::best_vertex(kind, a.entries(), theta.values()), 1e-13);
      EXPECT_NEAR(srgw_objective(a, labels_to_plan(r.labels, 3), theta, CompositeLoss(kind)), r.value, 1e-13);
    }
  }
  EXPECT_THROW(vertex_srgw_oracle(oracle::random_graph(rng, 30, 0.5), kNll, ConnectivityMatrix::constant(2, 0.3)),
               InstanceTooLarge);
}

TEST(Vem, ElboMonotoneAndBelowLikelihood) {
  Rng rng(7, streams::kInstances);
  for (int rep = 0; rep < 5; ++rep) {
    const auto g = sample_graph(build_scenario(Scenario::kAssortative, 2, 0.7, 0.1), Proportions::uniform(2),
                                9, rep);
    const Eigen::MatrixXd tau0 = 9.0 * oracle::random_plan(rng, 9, 2);
    const auto state = vem_fit(g.adjacency, 2, tau0, 100, 1e-10);
    for (std::size_t s = 1; s < state.elbo_history.size(); ++s) {
      EXPECT_GE(state.elbo_history[s], state.elbo_history[s - 1] - 1e-10);
    }
    EXPECT_NEAR(state.elbo, elbo_value(state.tau, g.adjacency, state.theta, state.alpha), 1e-10);
    EXPECT_LE(state.elbo, exact_log_likelihood(g.adjacency, state.theta, state.alpha) + 1e-9);
    EXPECT_NEAR((state.tau.rowwise().sum().array() - 1.0).abs().maxCoeff(), 0.0, 1e-12);
  }
}

TEST(Vem, RecoversClearBlocks) {
  const auto g = sample_graph(build_scenario(Scenario::kAssortative, 3, 0.5, 0.03), Proportions::uniform(3),
                              150, 2);
  const Eigen::MatrixXd tau0 = 150.0 * spectral_init(g.adjacency, 3, 2, 0.3).entries();
  const auto state = vem_fit(g.adjacency, 3, tau0, 100, 1e-8);
  std::vector<int> z(150);
  for (int i = 0; i < 150; ++i) state.tau.row(i).maxCoeff(&z[i]);
  EXPECT_DOUBLE_EQ(oracle::ari_by_pairs(z, g.labels.values()), 1.0);
}

TEST(VemMStep, ClosedForms) {
  const auto a = AdjacencyMatrix::from_edges(4, {{0, 1}, {0, 2}});
  Eigen::MatrixXd tau = Eigen::MatrixXd::Zero(4, 2);
  tau(0, 0) = tau(1, 0) = tau(2, 1) = tau(3, 1) = 1.0;
  const auto [theta, alpha] = vem_m_step(a, tau);
  EXPECT_NEAR(theta(0, 1), 0.25, 1e-15);
  EXPECT_NEAR(theta(0, 0), 1.0 - 1e-6, 1e-15);
  EXPECT_NEAR(alpha[0], 0.5, 1e-15);
}

}  // namespace
}  // namespace srgw
