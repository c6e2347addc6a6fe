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

#include "srgw/solver.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>

#include "srgw/error.hpp"
#include "srgw/metrics.hpp"

namespace srgw {
namespace {

double inner(const Eigen::MatrixXd& x, const Eigen::MatrixXd& y) {
  return (x.array() * y.array()).sum();
}

double relative_change(double before, double after) {
  const double scale = std::max(std::abs(before), std::numeric_limits<double>::min());
  return (before - after) / scale;
}

double omega_from_masses(const Eigen::VectorXd& q) {
  return q.cwiseMax(0.0).cwiseSqrt().sum();
}

Eigen::MatrixXd linearize(const Eigen::MatrixXd& t, double lambda, double mass_floor) {
  const Eigen::VectorXd q = t.colwise().sum().transpose();
  Eigen::RowVectorXd column_cost(q.size());
  for (Eigen::Index k = 0; k < q.size(); ++k) {
    column_cost(k) = lambda / (2.0 * std::sqrt(std::max(q(k), mass_floor)));
  }
  return column_cost.replicate(t.rows(), 1);
}

// Row-wise argmin with the lowest index winning ties.
std::vector<int> cheapest_columns(const Eigen::MatrixXd& g) {
  std::vector<int> best(static_cast<std::size_t>(g.rows()));
  for (Eigen::Index i = 0; i < g.rows(); ++i) {
    Eigen::Index arg = 0;
    double value = g(i, 0);
    for (Eigen::Index k = 1; k < g.cols(); ++k) {
      if (g(i, k) < value) {
        value = g(i, k);
        arg = k;
      }
    }
    best[static_cast<std::size_t>(i)] = static_cast<int>(arg);
  }
  return best;
}

void check_plan_shape(const AdjacencyMatrix& a, const ConnectivityMatrix& theta,
                      const TransportPlan& t0) {
  if (t0.n() != a.n()) throw ValidationError("plan and graph disagree on N");
  if (t0.k() != theta.k()) throw ValidationError("plan and theta disagree on K");
}

}  // namespace

void SolverOptions::validate() const {
  if (fw_max_iters < 1 || mm_max_iters < 1 || bcd_max_iters < 1) {
    throw ValidationError("iteration caps must be positive");
  }
  if (!(fw_rel_tol > 0.0 && mm_rel_tol > 0.0 && bcd_rel_tol > 0.0)) {
    throw ValidationError("tolerances must be positive");
  }
  if (!(lambda >= 0.0) || !std::isfinite(lambda)) throw ValidationError("lambda must be >= 0");
  if (!(mass_floor > 0.0)) throw ValidationError("mass_floor must be positive");
  if (!(active_mass_tol > 0.0)) throw ValidationError("active_mass_tol must be positive");
}

double omega(const Eigen::MatrixXd& t) {
  return omega_from_masses(t.colwise().sum().transpose());
}

double omega(const TransportPlan& t) { return omega(t.entries()); }

Eigen::MatrixXd linearize_omega(const TransportPlan& t, double lambda, double mass_floor) {
  if (!(lambda >= 0.0)) throw ValidationError("lambda must be >= 0");
  if (!(mass_floor > 0.0)) throw ValidationError("mass_floor must be positive");
  return linearize(t.entries(), lambda, mass_floor);
}

namespace detail {

Eigen::MatrixXd fw_run(const CostOperator& op, Eigen::MatrixXd t,
                       const Eigen::MatrixXd& linear_term, const SolverOptions& opts,
                       FrankWolfeTrace* trace) {
  const double row_mass = 1.0 / static_cast<double>(t.rows());
  Eigen::MatrixXd m = op.apply(t);
  double objective = inner(m, t) + inner(linear_term, t);
  if (!std::isfinite(objective)) throw DomainError("Frank-Wolfe objective is not finite");
  if (trace != nullptr) {
    trace->objective.assign(1, objective);
    trace->iterations = 0;
  }

  for (int it = 0; it < opts.fw_max_iters; ++it) {
    const Eigen::MatrixXd gradient = 2.0 * m + linear_term;
    if (!gradient.allFinite()) throw DomainError("Frank-Wolfe gradient is not finite");
    const std::vector<int> vertex = cheapest_columns(gradient);

    Eigen::MatrixXd s = Eigen::MatrixXd::Zero(t.rows(), t.cols());
    for (Eigen::Index i = 0; i < t.rows(); ++i) s(i, vertex[static_cast<std::size_t>(i)]) = row_mass;

    const Eigen::MatrixXd direction = s - t;
    if (inner(gradient, direction) >= 0.0) break;  // stationary

    const Eigen::MatrixXd m_vertex = op.apply_hard(vertex, row_mass);
    const double at_one = inner(m_vertex, s) + inner(linear_term, s);
    const Eigen::MatrixXd mid = 0.5 * (t + s);
    const double at_half = inner(0.5 * (m + m_vertex), mid) + inner(linear_term, mid);

    // phi(g) = curvature g^2 + slope g + objective through the three points.
    const double curvature = 2.0 * at_one - 4.0 * at_half + 2.0 * objective;
    const double slope = 4.0 * at_half - at_one - 3.0 * objective;
    double step = 0.0;
    if (curvature > 0.0) {
      step = std::clamp(-slope / (2.0 * curvature), 0.0, 1.0);
    } else {
      step = at_one < objective ? 1.0 : 0.0;
    }
    if (step <= 0.0) break;

    Eigen::MatrixXd t_next = t + step * direction;
    Eigen::MatrixXd m_next = (1.0 - step) * m + step * m_vertex;
    if (step == 1.0) {
      t_next = s;
      m_next = m_vertex;
    }
    const double next = inner(m_next, t_next) + inner(linear_term, t_next);
    if (!std::isfinite(next)) throw DomainError("Frank-Wolfe objective is not finite");
    if (next > objective) break;  // rounding; keep the better iterate

    const double decrease = relative_change(objective, next);
    t = std::move(t_next);
    m = std::move(m_next);
    objective = next;
    if (trace != nullptr) {
      trace->objective.push_back(objective);
      trace->iterations = it + 1;
    }
    if (decrease < opts.fw_rel_tol) break;
  }
  return t;
}

Eigen::MatrixXd mm_run(const CostOperator& op, Eigen::MatrixXd t, const SolverOptions& opts,
                       MajorizeMinimizeTrace* trace) {
  if (trace != nullptr) {
    trace->objective.clear();
    trace->inner.clear();
  }
  if (opts.lambda == 0.0) {
    const Eigen::MatrixXd zero = Eigen::MatrixXd::Zero(t.rows(), t.cols());
    FrankWolfeTrace fw_trace;
    t = fw_run(op, std::move(t), zero, opts, trace != nullptr ? &fw_trace : nullptr);
    if (trace != nullptr) {
      trace->objective = {fw_trace.objective.front(), op.objective(t)};
      trace->inner.push_back(std::move(fw_trace));
    }
    return t;
  }

  double penalized = op.objective(t) + opts.lambda * omega(t);
  if (trace != nullptr) trace->objective.push_back(penalized);
  for (int it = 0; it < opts.mm_max_iters; ++it) {
    const Eigen::MatrixXd surrogate_cost = linearize(t, opts.lambda, opts.mass_floor);
    FrankWolfeTrace fw_trace;
    Eigen::MatrixXd t_next =
        fw_run(op, t, surrogate_cost, opts, trace != nullptr ? &fw_trace : nullptr);
    const double next = op.objective(t_next) + opts.lambda * omega(t_next);
    if (!std::isfinite(next)) throw DomainError("penalized objective is not finite");
    const double change = std::abs(relative_change(penalized, next));
    t = std::move(t_next);
    penalized = next;
    if (trace != nullptr) {
      trace->objective.push_back(penalized);
      trace->inner.push_back(std::move(fw_trace));
    }
    if (change < opts.mm_rel_tol) break;
  }
  return t;
}

}  // namespace detail

TransportPlan fw_solve(const AdjacencyMatrix& a, const CompositeLoss& loss,
                       const ConnectivityMatrix& theta, const TransportPlan& t0,
                       const Eigen::MatrixXd& linear_term, const SolverOptions& opts,
                       FrankWolfeTrace* trace) {
  opts.validate();
  check_plan_shape(a, theta, t0);
  if (linear_term.rows() != t0.n() || linear_term.cols() != t0.k()) {
    throw ValidationError("linear term shape mismatch");
  }
  CostOperator op(a, loss);
  op.set_theta(theta);
  return TransportPlan::trusted(detail::fw_run(op, t0.entries(), linear_term, opts, trace));
}

TransportPlan mm_solve(const AdjacencyMatrix& a, const CompositeLoss& loss,
                       const ConnectivityMatrix& theta, const TransportPlan& t0,
                       const SolverOptions& opts, MajorizeMinimizeTrace* trace) {
  opts.validate();
  check_plan_shape(a, theta, t0);
  CostOperator op(a, loss);
  op.set_theta(theta);
  return TransportPlan::trusted(detail::mm_run(op, t0.entries(), opts, trace));
}

FitResult bcd_fit(const AdjacencyMatrix& a, const CompositeLoss& loss, const TransportPlan& t0,
                  const SolverOptions& opts) {
  opts.validate();
  if (t0.n() != a.n()) throw ValidationError("plan and graph disagree on N");
  const auto start = std::chrono::steady_clock::now();

  CostOperator op(a, loss);
  Eigen::MatrixXd t = t0.entries();
  std::vector<double> history;
  ThetaEstimate estimate = theta_closed_form(op, t);
  for (int it = 0; it < opts.bcd_max_iters; ++it) {
    if (it > 0) estimate = theta_closed_form(op, t);
    op.set_theta(estimate.theta);
    t = detail::mm_run(op, std::move(t), opts, nullptr);
    const double value = op.objective(t) + opts.lambda * omega(t);
    if (!std::isfinite(value)) throw DomainError("penalized objective is not finite");
    const bool stalled =
        !history.empty() && std::abs(relative_change(history.back(), value)) < opts.bcd_rel_tol;
    history.push_back(value);
    if (stalled) break;
  }

  bool degenerate = true;
  double reference = std::numeric_limits<double>::quiet_NaN();
  for (Eigen::Index l = 0; l < estimate.active.cols(); ++l) {
    for (Eigen::Index k = 0; k < estimate.active.rows(); ++k) {
      if (!estimate.active(k, l)) continue;
      const double v = estimate.theta(static_cast<int>(k), static_cast<int>(l));
      if (std::isnan(reference)) {
        reference = v;
      } else if (v != reference) {
        degenerate = false;
      }
    }
  }

  TransportPlan plan = TransportPlan::trusted(std::move(t));
  const int k_hat = selected_k(plan, opts.active_mass_tol);
  Labels labels = hard_labels(plan);
  const double elapsed =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  return FitResult{std::move(plan),   std::move(estimate.theta), std::move(history), k_hat,
                   std::move(labels), elapsed,                   degenerate};
}

double entropy(const Eigen::MatrixXd& x) {
  double h = 0.0;
  for (Eigen::Index j = 0; j < x.cols(); ++j) {
    for (Eigen::Index i = 0; i < x.rows(); ++i) {
      const double v = x(i, j);
      if (v > 0.0) h -= v * std::log(v);
    }
  }
  return h;
}

double elbo_value(const Eigen::MatrixXd& tau, const AdjacencyMatrix& a,
                  const ConnectivityMatrix& theta, const Proportions& alpha) {
  if (tau.rows() != a.n() || tau.cols() != theta.k() || alpha.k() != theta.k()) {
    throw ValidationError("elbo_value: dimension mismatch");
  }
  if (!theta.all_within(std::numeric_limits<double>::min(), 1.0) ||
      (theta.values().array() >= 1.0).any()) {
    throw DomainError("elbo_value: theta entries must lie in (0, 1)");
  }
  const Eigen::MatrixXd log_theta = theta.values().array().log().matrix();
  const Eigen::MatrixXd log_not_theta = (-theta.values().array()).log1p().matrix();

  const Eigen::VectorXd counts = tau.colwise().sum().transpose();
  const Eigen::MatrixXd pairs = counts * counts.transpose() - tau.transpose() * tau;
  const Eigen::MatrixXd edges = tau.transpose() * (a.entries() * tau);
  const Eigen::MatrixXd non_edges = pairs - edges;
  const double likelihood =
      0.5 * (inner(edges, log_theta) + inner(non_edges, log_not_theta));

  double prior = 0.0;
  for (int k = 0; k < alpha.k(); ++k) {
    if (counts(k) <= 0.0) continue;
    if (alpha[k] <= 0.0) throw ValidationError("elbo_value: alpha_k = 0 on a cluster with mass");
    prior += counts(k) * std::log(alpha[k]);
  }
  return likelihood + entropy(tau) + prior;
}

double entropic_objective(const TransportPlan& t, const AdjacencyMatrix& a,
                          const ConnectivityMatrix& theta) {
  const double lp = srgw_objective(a, t, theta, make_loss(LossKind::kBernoulliNll));
  const Eigen::MatrixXd masses = t.column_masses();
  const double n = static_cast<double>(t.n());
  return lp - (2.0 / n) * (entropy(t.entries()) - entropy(masses));
}

}  // namespace srgw
