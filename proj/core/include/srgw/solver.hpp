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

#ifndef SRGW_SOLVER_HPP_
#define SRGW_SOLVER_HPP_

#include <vector>

#include <Eigen/Dense>

#include "srgw/losses.hpp"
#include "srgw/sbm.hpp"

namespace srgw {

struct SolverOptions {
  int fw_max_iters = 500;
  double fw_rel_tol = 1e-9;
  int mm_max_iters = 50;
  double mm_rel_tol = 1e-7;
  int bcd_max_iters = 50;
  double bcd_rel_tol = 1e-8;
  // Strength of the sqrt-mass sparsity penalty. Applied to the unscaled
  // objective L(T, theta), whose plans carry total mass 1.
  double lambda = 0.0;
  // Floor inside sqrt(q_k) when linearising the penalty.
  double mass_floor = 1e-16;
  // A column counts as an active cluster when its mass exceeds this.
  double active_mass_tol = 1e-6;

  void validate() const;
};

struct FitResult {
  TransportPlan t_hat;
  ConnectivityMatrix theta_hat;
  // Penalized objective L(T_{t+1}, theta_t) + lambda * Omega(T_{t+1}) per
  // block-coordinate iteration.
  std::vector<double> loss_history;
  int k_hat = 0;
  Labels labels;
  double runtime_ms = 0.0;
  // Every active theta cell holds the same value, e.g. an empty graph.
  bool degenerate_theta = false;
};

// Omega(T) = sum_k sqrt(q_k), q = T^T 1.
double omega(const TransportPlan& t);
double omega(const Eigen::MatrixXd& t);

// Column-constant matrix R_ik = lambda / (2 sqrt(max(q_k, mass_floor))), the
// gradient of lambda * Omega at T. Majorizes lambda * Omega by concavity.
Eigen::MatrixXd linearize_omega(const TransportPlan& t, double lambda, double mass_floor);

struct FrankWolfeTrace {
  // Objective L + <linear_term, T> at the start and after each accepted step.
  std::vector<double> objective;
  int iterations = 0;
};

struct MajorizeMinimizeTrace {
  // True penalized objective L + lambda * Omega, start then per outer step.
  std::vector<double> objective;
  std::vector<FrankWolfeTrace> inner;
};

// Frank-Wolfe on T -> L(T, theta) + <linear_term, T> over plans with rows
// summing to 1/N. The linear minimization oracle sends each row's mass to its
// cheapest column (lowest index on ties). The step size comes from the
// parabola through the objective at 0, 1/2 and 1, which is exact because the
// objective is quadratic along the segment.
TransportPlan fw_solve(const AdjacencyMatrix& a, const CompositeLoss& loss,
                       const ConnectivityMatrix& theta, const TransportPlan& t0,
                       const Eigen::MatrixXd& linear_term, const SolverOptions& opts,
                       FrankWolfeTrace* trace = nullptr);

// Majorization-minimization for L + lambda * Omega: relinearize the penalty at
// the current plan, then warm-started Frank-Wolfe on the surrogate. With
// lambda == 0 this is a single fw_solve with a zero linear term.
TransportPlan mm_solve(const AdjacencyMatrix& a, const CompositeLoss& loss,
                       const ConnectivityMatrix& theta, const TransportPlan& t0,
                       const SolverOptions& opts, MajorizeMinimizeTrace* trace = nullptr);

// Block coordinate descent: closed-form theta given T, then mm_solve for T
// given theta, until the penalized objective stalls. Returns the last theta
// and the plan computed from it.
FitResult bcd_fit(const AdjacencyMatrix& a, const CompositeLoss& loss, const TransportPlan& t0,
                  const SolverOptions& opts);

namespace detail {

// Operator-level entry points shared by the public functions above.
Eigen::MatrixXd fw_run(const CostOperator& op, Eigen::MatrixXd t,
                       const Eigen::MatrixXd& linear_term, const SolverOptions& opts,
                       FrankWolfeTrace* trace);
Eigen::MatrixXd mm_run(const CostOperator& op, Eigen::MatrixXd t, const SolverOptions& opts,
                       MajorizeMinimizeTrace* trace);

}  // namespace detail

// H(X) = -sum x log x with 0 log 0 = 0.
double entropy(const Eigen::MatrixXd& x);

// Mean-field evidence lower bound for a Bernoulli SBM:
//   1/2 sum_{i != j, k, l} tau_ik tau_jl log p(A_ij | theta_kl)
//   - sum tau log tau + sum_k (sum_i tau_ik) log alpha_k.
// tau is N x K row-stochastic; theta entries must lie in (0, 1).
double elbo_value(const Eigen::MatrixXd& tau, const AdjacencyMatrix& a,
                  const ConnectivityMatrix& theta, const Proportions& alpha);

// L_p(T, theta) - (2 / N) [H(T) - H(T^T 1)] with the Bernoulli NLL.
double entropic_objective(const TransportPlan& t, const AdjacencyMatrix& a,
                          const ConnectivityMatrix& theta);

}  // namespace srgw

#endif  // SRGW_SOLVER_HPP_
