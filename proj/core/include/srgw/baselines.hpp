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

#ifndef SRGW_BASELINES_HPP_
#define SRGW_BASELINES_HPP_

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "srgw/losses.hpp"
#include "srgw/sbm.hpp"

namespace srgw {

// Exhaustive oracles refuse instances with more than this many assignments.
inline constexpr double kMaxEnumeration = 1e7;

struct VemState {
  Eigen::MatrixXd tau;  // N x K, rows sum to 1
  ConnectivityMatrix theta;
  Proportions alpha;
  double elbo = 0.0;
  std::vector<double> elbo_history;  // after every M-step
  int iterations = 0;
};

struct VemOptions {
  double damping = 0.5;
  int max_sweeps = 50;
  double sweep_tol = 1e-6;  // mean |delta tau| per sweep
  double alpha_floor = 1e-8;
};

// Variational EM for the Bernoulli SBM. E-step: Gauss-Seidel row updates
//   log tau_ik = log alpha_k + sum_{j != i, l} tau_jl log p(A_ij | theta_kl) + c
// mixed 50/50 with the previous row; M-step: closed-form alpha and theta.
// Stops when the ELBO relative change drops below tol.
VemState vem_fit(const AdjacencyMatrix& a, int k, const Eigen::MatrixXd& tau0, int max_iters,
                 double tol, const VemOptions& opts = {});

// M-step alone: alpha_k = mean_i tau_ik and the block edge density with
// i == j pairs excluded, clamped to [1e-6, 1 - 1e-6].
std::pair<ConnectivityMatrix, Proportions> vem_m_step(const AdjacencyMatrix& a,
                                                      const Eigen::MatrixXd& tau,
                                                      double alpha_floor = 1e-8);

// log p(A | theta, alpha) summed over all K^N label vectors (log-sum-exp).
double exact_log_likelihood(const AdjacencyMatrix& a, const ConnectivityMatrix& theta,
                            const Proportions& alpha);

// sup over alpha of exact_log_likelihood, K in {1, 2, 3}: simplex grid with
// grid_size points per edge, then golden-section refinement around the best
// grid point.
double sup_alpha_log_likelihood(const AdjacencyMatrix& a, const ConnectivityMatrix& theta,
                                int grid_size = 101);

struct VertexOracleResult {
  double value;
  Labels labels;
};

// Minimum of L(T_z, theta) over all hard plans T_z = Z / N, lexicographically
// smallest z on ties.
VertexOracleResult vertex_srgw_oracle(const AdjacencyMatrix& a, const CompositeLoss& loss,
                                      const ConnectivityMatrix& theta);

}  // namespace srgw

#endif  // SRGW_BASELINES_HPP_
