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

#include "srgw/losses.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "srgw/error.hpp"

namespace srgw {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Clamp margins for estimated entries. For the half-line domains the neutral
// value 1 is the geometric midpoint of [1e-6, 1e6].
constexpr double kPositiveClampHi = 1e6;

double log_factorial(double a) {
  if (a == 0.0 || a == 1.0) return 0.0;
  return std::lgamma(a + 1.0);
}

}  // namespace

LossKind parse_loss_kind(std::string_view name) {
  if (name == "squared") return LossKind::kSquared;
  if (name == "bernoulli_nll") return LossKind::kBernoulliNll;
  if (name == "poisson_nll") return LossKind::kPoissonNll;
  if (name == "exponential_nll") return LossKind::kExponentialNll;
  throw ValidationError("unknown loss kind '" + std::string(name) + "'");
}

std::string_view to_string(LossKind kind) {
  switch (kind) {
    case LossKind::kSquared: return "squared";
    case LossKind::kBernoulliNll: return "bernoulli_nll";
    case LossKind::kPoissonNll: return "poisson_nll";
    case LossKind::kExponentialNll: return "exponential_nll";
  }
  return "unknown";
}

CompositeLoss::CompositeLoss(LossKind kind) : kind_(kind) {
  switch (kind_) {
    case LossKind::kSquared:
      domain_lo_ = -kInf;
      domain_hi_ = kInf;
      clamp_lo_ = -kInf;
      clamp_hi_ = kInf;
      neutral_ = 0.5;
      break;
    case LossKind::kBernoulliNll:
      domain_lo_ = 0.0;
      domain_hi_ = 1.0;
      clamp_lo_ = kThetaMin;
      clamp_hi_ = 1.0 - kThetaMin;
      neutral_ = 0.5;
      break;
    case LossKind::kPoissonNll:
    case LossKind::kExponentialNll:
      domain_lo_ = 0.0;
      domain_hi_ = kInf;
      clamp_lo_ = kThetaMin;
      clamp_hi_ = kPositiveClampHi;
      neutral_ = 1.0;
      break;
  }
}

double CompositeLoss::f1(double a) const {
  switch (kind_) {
    case LossKind::kSquared: return a * a;
    case LossKind::kPoissonNll: return log_factorial(a);
    case LossKind::kBernoulliNll:
    case LossKind::kExponentialNll: return 0.0;
  }
  return 0.0;
}

double CompositeLoss::f2(double b) const {
  switch (kind_) {
    case LossKind::kSquared: return b * b;
    case LossKind::kBernoulliNll: return -std::log1p(-b);
    case LossKind::kPoissonNll: return b;
    case LossKind::kExponentialNll: return -std::log(b);
  }
  return 0.0;
}

double CompositeLoss::h1(double a) const { return a; }

double CompositeLoss::h2(double b) const {
  switch (kind_) {
    case LossKind::kSquared: return 2.0 * b;
    case LossKind::kBernoulliNll: return std::log(b) - std::log1p(-b);
    case LossKind::kPoissonNll: return std::log(b);
    case LossKind::kExponentialNll: return -b;
  }
  return 0.0;
}

double CompositeLoss::theta_inverse_map(double x) const {
  if (kind_ == LossKind::kExponentialNll) return x > 0.0 ? 1.0 / x : kInf;
  return x;
}

bool CompositeLoss::in_domain(double b) const {
  return std::isfinite(b) && b > domain_lo_ && b < domain_hi_;
}

double CompositeLoss::clamp(double b) const {
  if (std::isnan(b)) return neutral_;
  return std::min(std::max(b, clamp_lo_), clamp_hi_);
}

CompositeLoss make_loss(LossKind kind) { return CompositeLoss(kind); }

TransportPlan::TransportPlan(Eigen::MatrixXd entries) : entries_(std::move(entries)) {
  if (entries_.rows() < 1 || entries_.cols() < 1) {
    throw ValidationError("transport plan must be nonempty");
  }
  if (!entries_.allFinite() || entries_.minCoeff() < 0.0) {
    throw ValidationError("transport plan entries must be finite and nonnegative");
  }
  if (max_row_deviation() > kRowTolerance) {
    throw ValidationError("transport plan rows must each sum to 1/N");
  }
}

TransportPlan TransportPlan::trusted(Eigen::MatrixXd entries) {
  return TransportPlan(std::move(entries), Trusted{});
}

TransportPlan TransportPlan::uniform(int n, int k) {
  if (n < 1 || k < 1) throw ValidationError("uniform plan needs n, k >= 1");
  return TransportPlan(Eigen::MatrixXd::Constant(n, k, 1.0 / (static_cast<double>(n) * k)));
}

double TransportPlan::max_row_deviation() const {
  const double target = 1.0 / static_cast<double>(n());
  return (entries_.rowwise().sum().array() - target).abs().maxCoeff();
}

CostOperator::CostOperator(const AdjacencyMatrix& a, const CompositeLoss& loss)
    : loss_(loss), n_(a.n()) {
  const Eigen::MatrixXd& entries = a.entries();
  h1a_ = entries.unaryExpr([&](double v) { return loss_.h1(v); });
  f1a_ = entries.unaryExpr([&](double v) { return loss_.f1(v); });
  if ((f1a_.array() == 0.0).all()) f1a_.resize(0, 0);
  f1_diag_.resize(n_);
  h1_diag_.resize(n_);
  for (int i = 0; i < n_; ++i) {
    f1_diag_(i) = loss_.f1(entries(i, i));
    h1_diag_(i) = loss_.h1(entries(i, i));
  }
}

void CostOperator::set_theta(const ConnectivityMatrix& theta) {
  const Eigen::MatrixXd& values = theta.values();
  for (Eigen::Index l = 0; l < values.cols(); ++l) {
    for (Eigen::Index k = 0; k < values.rows(); ++k) {
      if (!loss_.in_domain(values(k, l))) {
        std::ostringstream msg;
        msg << "theta(" << k << ", " << l << ") = " << values(k, l) << " is outside the domain of "
            << to_string(loss_.kind());
        throw DomainError(msg.str());
      }
    }
  }
  f2_ = values.unaryExpr([&](double b) { return loss_.f2(b); });
  h2_ = values.unaryExpr([&](double b) { return loss_.h2(b); });
}

Eigen::MatrixXd CostOperator::finish(Eigen::MatrixXd m, const Eigen::VectorXd& row_sums,
                                     const Eigen::VectorXd& col_sums) const {
  // m holds h1(A) X on entry.
  m = -(m * h2_.transpose());
  m.rowwise() += (f2_ * col_sums).transpose();
  if (f1a_.size() > 0) m.colwise() += f1a_ * row_sums;
  return m;
}

Eigen::MatrixXd CostOperator::apply(const Eigen::MatrixXd& x) const {
  if (f2_.size() == 0) throw ValidationError("CostOperator::set_theta was not called");
  if (x.rows() != n_ || x.cols() != k()) throw ValidationError("plan shape mismatch");
  const Eigen::VectorXd r = x.rowwise().sum();
  const Eigen::VectorXd q = x.colwise().sum().transpose();
  Eigen::MatrixXd m = finish(h1a_ * x, r, q);
  // Remove the i == j terms: f1(A_ii) r_i + (F2 x_i)_k - h1(A_ii) (H2 x_i)_k.
  m.noalias() -= x * f2_.transpose();
  m.noalias() += h1_diag_.asDiagonal() * (x * h2_.transpose());
  m.colwise() -= f1_diag_.cwiseProduct(r);
  return m;
}

Eigen::MatrixXd CostOperator::apply_hard(const std::vector<int>& assignment, double mass) const {
  if (f2_.size() == 0) throw ValidationError("CostOperator::set_theta was not called");
  if (static_cast<int>(assignment.size()) != n_) throw ValidationError("assignment size mismatch");
  const int kk = k();
  Eigen::MatrixXd gathered = Eigen::MatrixXd::Zero(n_, kk);
  Eigen::VectorXd q = Eigen::VectorXd::Zero(kk);
  for (int j = 0; j < n_; ++j) {
    const int c = assignment[static_cast<std::size_t>(j)];
    gathered.col(c) += h1a_.col(j);
    q(c) += mass;
  }
  gathered *= mass;
  const Eigen::VectorXd r = Eigen::VectorXd::Constant(n_, mass);
  Eigen::MatrixXd m = finish(std::move(gathered), r, q);
  for (int i = 0; i < n_; ++i) {
    const int c = assignment[static_cast<std::size_t>(i)];
    m.row(i) -= mass * (f2_.col(c).transpose() - h1_diag_(i) * h2_.col(c).transpose());
    m.row(i).array() -= f1_diag_(i) * mass;
  }
  return m;
}

double CostOperator::objective(const Eigen::MatrixXd& t) const {
  return (apply(t).array() * t.array()).sum();
}

Eigen::MatrixXd cost_application(const AdjacencyMatrix& a, const TransportPlan& t,
                                 const ConnectivityMatrix& theta, const CompositeLoss& loss) {
  if (t.n() != a.n() || t.k() != theta.k()) throw ValidationError("dimension mismatch");
  CostOperator op(a, loss);
  op.set_theta(theta);
  return op.apply(t.entries());
}

double srgw_objective(const AdjacencyMatrix& a, const TransportPlan& t,
                      const ConnectivityMatrix& theta, const CompositeLoss& loss) {
  const Eigen::MatrixXd m = cost_application(a, t, theta, loss);
  const double value = (m.array() * t.entries().array()).sum();
  if (!std::isfinite(value)) throw DomainError("srGW objective is not finite");
  return value;
}

ThetaEstimate theta_closed_form(const CostOperator& op, const Eigen::MatrixXd& t,
                                DiagonalMode mode) {
  if (t.rows() != op.n()) throw ValidationError("plan and graph disagree on N");
  const CompositeLoss& loss = op.loss();
  const Eigen::VectorXd q = t.colwise().sum().transpose();
  Eigen::MatrixXd s = t.transpose() * (op.h1_adjacency() * t);
  Eigen::MatrixXd d = q * q.transpose();
  if (mode == DiagonalMode::kExcluded) {
    s.noalias() -= t.transpose() * op.h1_diagonal().asDiagonal() * t;
    d.noalias() -= t.transpose() * t;
  }
  s = 0.5 * (s + s.transpose()).eval();
  d = 0.5 * (d + d.transpose()).eval();

  const auto kk = t.cols();
  Eigen::MatrixXd theta(kk, kk);
  Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic> active(kk, kk);
  for (Eigen::Index l = 0; l < kk; ++l) {
    for (Eigen::Index k = 0; k < kk; ++k) {
      if (d(k, l) <= kThetaDenominatorFloor) {
        theta(k, l) = loss.neutral_value();
        active(k, l) = false;
      } else {
        theta(k, l) = loss.clamp(loss.theta_inverse_map(s(k, l) / d(k, l)));
        active(k, l) = true;
      }
    }
  }
  return ThetaEstimate{ConnectivityMatrix(std::move(theta)), std::move(active)};
}

ThetaEstimate theta_closed_form(const AdjacencyMatrix& a, const TransportPlan& t,
                                const CompositeLoss& loss, DiagonalMode mode) {
  return theta_closed_form(CostOperator(a, loss), t.entries(), mode);
}

}  // namespace srgw
