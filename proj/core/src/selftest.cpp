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
#include <functional>
#include <ostream>
#include <string>
#include <vector>

#include "srgw/baselines.hpp"
#include "srgw/harness.hpp"
#include "srgw/init.hpp"
#include "srgw/losses.hpp"
#include "srgw/metrics.hpp"
#include "srgw/random.hpp"
#include "srgw/solver.hpp"

namespace srgw {
namespace {

SampledGraph small_graph(std::uint64_t seed) {
  return sample_graph(build_scenario(Scenario::kAssortative, 3, 0.6, 0.05), Proportions::uniform(3),
                      30, seed);
}

bool rng_reproducible() {
  Rng a(42, streams::kEdges);
  Rng b(42, streams::kEdges);
  for (int i = 0; i < 1000; ++i) {
    if (a.next_u64() != b.next_u64()) return false;
  }
  return true;
}

bool sampler_reproducible() {
  const SampledGraph g1 = small_graph(7);
  const SampledGraph g2 = small_graph(7);
  return g1.adjacency.entries() == g2.adjacency.entries() && g1.labels == g2.labels;
}

bool cost_matches_loop() {
  const SampledGraph g = small_graph(1);
  const CompositeLoss loss = make_loss(LossKind::kBernoulliNll);
  const ConnectivityMatrix theta = build_scenario(Scenario::kAssortative, 3, 0.6, 0.05);
  const TransportPlan t = spectral_init(g.adjacency, 3, 1, 0.2);
  const int n = g.adjacency.n();
  double naive = 0.0;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (i == j) continue;
      for (int k = 0; k < 3; ++k) {
        for (int l = 0; l < 3; ++l) naive += loss(g.adjacency(i, j), theta(k, l)) * t(i, k) * t(j, l);
      }
    }
  }
  return std::abs(naive - srgw_objective(g.adjacency, t, theta, loss)) <= 1e-10 * std::abs(naive);
}

bool fw_monotone() {
  const SampledGraph g = small_graph(2);
  const CompositeLoss loss = make_loss(LossKind::kBernoulliNll);
  const ConnectivityMatrix theta = build_scenario(Scenario::kAssortative, 3, 0.6, 0.05);
  FrankWolfeTrace trace;
  SolverOptions opts;
  fw_solve(g.adjacency, loss, theta, TransportPlan::uniform(30, 3), Eigen::MatrixXd::Zero(30, 3),
           opts, &trace);
  for (std::size_t s = 1; s < trace.objective.size(); ++s) {
    if (trace.objective[s] > trace.objective[s - 1] + 1e-12) return false;
  }
  return !trace.objective.empty();
}

bool bcd_monotone_and_valid() {
  const SampledGraph g = small_graph(3);
  SolverOptions opts;
  opts.lambda = 0.05;
  const FitResult fit =
      bcd_fit(g.adjacency, make_loss(LossKind::kBernoulliNll), spectral_init(g.adjacency, 5, 3), opts);
  for (std::size_t s = 1; s < fit.loss_history.size(); ++s) {
    if (fit.loss_history[s] > fit.loss_history[s - 1] + 1e-9) return false;
  }
  return fit.t_hat.max_row_deviation() <= TransportPlan::kRowTolerance && fit.k_hat >= 1 &&
         fit.k_hat <= 5;
}

bool ari_identity() {
  const SampledGraph g = small_graph(4);
  std::vector<int> relabeled = g.labels.values();
  for (int& v : relabeled) v = (v + 1) % 3;
  return std::abs(ari(g.labels, Labels(relabeled, 3)) - 1.0) < 1e-15;
}

bool vertex_oracle_bounds_fw() {
  Rng rng(5, streams::kInstances);
  std::vector<std::pair<int, int>> edges;
  for (int i = 0; i < 6; ++i) {
    for (int j = i + 1; j < 6; ++j) {
      if (rng.uniform() < 0.5) edges.emplace_back(i, j);
    }
  }
  const AdjacencyMatrix a = AdjacencyMatrix::from_edges(6, edges);
  const ConnectivityMatrix theta(Eigen::Matrix2d{{0.7, 0.2}, {0.2, 0.5}});
  const CompositeLoss loss = make_loss(LossKind::kBernoulliNll);
  const VertexOracleResult oracle = vertex_srgw_oracle(a, loss, theta);
  const double fw = srgw_objective(a, fw_solve(a, loss, theta, TransportPlan::uniform(6, 2),
                                               Eigen::MatrixXd::Zero(6, 2), SolverOptions{}),
                                   theta, loss);
  return fw >= oracle.value - 1e-9;
}

}  // namespace

bool run_selftest(std::ostream& out) {
  const std::vector<std::pair<std::string, std::function<bool()>>> checks{
      {"rng_reproducible", rng_reproducible},
      {"sampler_reproducible", sampler_reproducible},
      {"cost_matches_loop", cost_matches_loop},
      {"fw_monotone", fw_monotone},
      {"bcd_monotone_and_valid", bcd_monotone_and_valid},
      {"ari_identity", ari_identity},
      {"vertex_oracle_bounds_fw", vertex_oracle_bounds_fw},
  };
  bool all = true;
  for (const auto& [name, check] : checks) {
    bool ok = false;
    try {
      ok = check();
    } catch (const std::exception& e) {
      out << "error " << name << ": " << e.what() << '\n';
    }
    out << (ok ? "ok   " : "FAIL ") << name << '\n';
    all = all && ok;
  }
  return all;
}

}  // namespace srgw
