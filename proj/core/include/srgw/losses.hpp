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

#ifndef SRGW_LOSSES_HPP_
#define SRGW_LOSSES_HPP_

#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "srgw/sbm.hpp"

namespace srgw {

enum class LossKind { kSquared, kBernoulliNll, kPoissonNll, kExponentialNll };

LossKind parse_loss_kind(std::string_view name);
std::string_view to_string(LossKind kind);

// Inner loss of the form l(a, b) = f1(a) + f2(b) - h1(a) * h2(b), where a is an
// observed edge value and b a connectivity entry. This split is what lets the
// quadratic objective be applied in O(N^2 K + N K^2).
//
//   kind             f1(a)      f2(b)          h1(a)  h2(b)            b domain
//   squared          a^2        b^2            a      2b               R
//   bernoulli_nll    0          -log(1 - b)    a      log(b / (1-b))   (0, 1)
//   poisson_nll      log(a!)    b              a      log b            (0, inf)
//   exponential_nll  0          -log b         a      -b               (0, inf)
class CompositeLoss {
 public:
  explicit CompositeLoss(LossKind kind);

  LossKind kind() const { return kind_; }

  double f1(double a) const;
  double f2(double b) const;
  double h1(double a) const;
  double h2(double b) const;
  double operator()(double a, double b) const { return f1(a) + f2(b) - h1(a) * h2(b); }

  // (f2' / h2')^{-1}: maps a weighted block mean of h1(A) to the minimising b.
  double theta_inverse_map(double x) const;

  // Open interval on which f2 and h2 are finite.
  double domain_lo() const { return domain_lo_; }
  double domain_hi() const { return domain_hi_; }
  bool in_domain(double b) const;

  // Closed interval strictly inside the domain used for estimated entries.
  double clamp_lo() const { return clamp_lo_; }
  double clamp_hi() const { return clamp_hi_; }
  double clamp(double b) const;

  // Value given to connectivity cells with no mass behind them.
  double neutral_value() const { return neutral_; }

 private:
  LossKind kind_;
  double domain_lo_;
  double domain_hi_;
  double clamp_lo_;
  double clamp_hi_;
  double neutral_;
};

CompositeLoss make_loss(LossKind kind);

// Soft assignment of N nodes to K clusters: nonnegative, every row sums to 1/N.
class TransportPlan {
 public:
  static constexpr double kRowTolerance = 1e-10;

  explicit TransportPlan(Eigen::MatrixXd entries);

  // Skips validation; for solver internals that preserve the polytope by
  // construction (convex combinations of feasible plans).
  static TransportPlan trusted(Eigen::MatrixXd entries);
  static TransportPlan uniform(int n, int k);

  int n() const { return static_cast<int>(entries_.rows()); }
  int k() const { return static_cast<int>(entries_.cols()); }
  const Eigen::MatrixXd& entries() const { return entries_; }
  double operator()(int i, int k) const { return entries_(i, k); }

  // q = T^T 1_N, the estimated cluster proportions.
  Eigen::VectorXd column_masses() const { return entries_.colwise().sum().transpose(); }

  // max_i |sum_k T_ik - 1/N|
  double max_row_deviation() const;

 private:
  struct Trusted {};
  TransportPlan(Eigen::MatrixXd entries, Trusted) : entries_(std::move(entries)) {}

  Eigen::MatrixXd entries_;
};

// Linear operator X -> M(X) with
//
//   M(X)_ik = sum_{j != i} sum_l loss(A_ij, theta_kl) X_jl,
//
// evaluated as f1(A) r 1^T + 1 (F2 q)^T - h1(A) X H2^T minus the exact i == j
// terms, where r = X 1 and q = X^T 1. For a feasible plan T, <M(T), T> is the
// srGW objective and 2 M(T) its gradient (A and theta symmetric).
//
// The operator keeps its own copies of f1(A) and h1(A).
class CostOperator {
 public:
  CostOperator(const AdjacencyMatrix& a, const CompositeLoss& loss);

  // Throws DomainError if an entry is outside the loss domain.
  void set_theta(const ConnectivityMatrix& theta);

  int n() const { return n_; }
  int k() const { return static_cast<int>(f2_.rows()); }
  const CompositeLoss& loss() const { return loss_; }
  const Eigen::MatrixXd& h1_adjacency() const { return h1a_; }
  const Eigen::VectorXd& h1_diagonal() const { return h1_diag_; }

  Eigen::MatrixXd apply(const Eigen::MatrixXd& x) const;

  // Same as apply() for X with X(i, assignment[i]) = mass and zeros elsewhere.
  // O(N^2 + N K^2) instead of a dense product.
  Eigen::MatrixXd apply_hard(const std::vector<int>& assignment, double mass) const;

  double objective(const Eigen::MatrixXd& t) const;

 private:
  Eigen::MatrixXd finish(Eigen::MatrixXd m, const Eigen::VectorXd& row_sums,
                         const Eigen::VectorXd& col_sums) const;

  CompositeLoss loss_;
  int n_;
  Eigen::MatrixXd f1a_;  // empty when f1(A) vanishes identically
  Eigen::MatrixXd h1a_;
  Eigen::VectorXd f1_diag_;
  Eigen::VectorXd h1_diag_;
  Eigen::MatrixXd f2_;
  Eigen::MatrixXd h2_;
};

// M = sum over j != i, l of loss(A_ij, theta_kl) T_jl, as an N x K matrix.
Eigen::MatrixXd cost_application(const AdjacencyMatrix& a, const TransportPlan& t,
                                 const ConnectivityMatrix& theta, const CompositeLoss& loss);

// L(T, theta) = sum_{i != j, k, l} loss(A_ij, theta_kl) T_ik T_jl.
double srgw_objective(const AdjacencyMatrix& a, const TransportPlan& t,
                      const ConnectivityMatrix& theta, const CompositeLoss& loss);

// Whether the block sums for the theta update skip i == j pairs. kExcluded
// matches the objective above; kIncluded is the plain T^T h1(A) T / q q^T form.
enum class DiagonalMode { kExcluded, kIncluded };

struct ThetaEstimate {
  ConnectivityMatrix theta;
  // false where the block pair carries no mass (denominator <= 1e-12); those
  // cells hold loss.neutral_value().
  Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic> active;
};

inline constexpr double kThetaDenominatorFloor = 1e-12;

// Exact minimiser of theta -> L(T, theta) at fixed T, cell by cell:
//   S = T^T h1(A) T - sum_i h1(A_ii) T_i^T T_i,  D = q q^T - T^T T,
//   theta_kl = clamp(theta_inverse_map(S_kl / D_kl)).
ThetaEstimate theta_closed_form(const AdjacencyMatrix& a, const TransportPlan& t,
                                const CompositeLoss& loss,
                                DiagonalMode mode = DiagonalMode::kExcluded);

// Same, reusing the h1(A) already held by a cost operator.
ThetaEstimate theta_closed_form(const CostOperator& op, const Eigen::MatrixXd& t,
                                DiagonalMode mode = DiagonalMode::kExcluded);

}  // namespace srgw

#endif  // SRGW_LOSSES_HPP_
