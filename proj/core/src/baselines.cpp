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

#include "srgw/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <sstream>

#include "srgw/error.hpp"
#include "srgw/solver.hpp"

namespace srgw {
namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();
constexpr double kGolden = 0.6180339887498949;

void guard_enumeration(int n, int k) {
  if (std::pow(static_cast<double>(k), n) > kMaxEnumeration) {
    std::ostringstream msg;
    msg << "K^N = " << k << "^" << n << " exceeds the enumeration guard of " << kMaxEnumeration;
    throw InstanceTooLarge(msg.str());
  }
}

double log_sum_exp(double x, double y) {
  if (x == kNegInf) return y;
  if (y == kNegInf) return x;
  const double hi = std::max(x, y);
  return hi + std::log1p(std::exp(std::min(x, y) - hi));
}

double bernoulli_log_p(double a, double b) {
  // 0 * log 0 counts as 0 so that theta in {0, 1} is handled exactly.
  double v = 0.0;
  if (a != 0.0) v += a * std::log(b);
  if (a != 1.0) v += (1.0 - a) * std::log1p(-b);
  return v;
}

// Pair table value(i, j, k, l) flattened, only i < j used.
class PairTable {
 public:
  PairTable(int n, int k) : n_(n), k_(k), data_(static_cast<std::size_t>(n) * n * k * k, 0.0) {}
  double& at(int i, int j, int a, int b) {
    return data_[((static_cast<std::size_t>(i) * n_ + j) * k_ + a) * k_ + b];
  }
  double at(int i, int j, int a, int b) const {
    return data_[((static_cast<std::size_t>(i) * n_ + j) * k_ + a) * k_ + b];
  }

 private:
  int n_;
  int k_;
  std::vector<double> data_;
};

// Depth-first enumeration of z in lexicographic order (z_0 most significant),
// accumulating sum_{i<j} table(i, j, z_i, z_j). visit(z, total) at leaves.
void enumerate(const PairTable& table, int n, int k,
               const std::function<void(const std::vector<int>&, double)>& visit) {
  std::vector<int> z(static_cast<std::size_t>(n), 0);
  std::vector<double> prefix(static_cast<std::size_t>(n) + 1, 0.0);
  std::function<void(int)> descend = [&](int depth) {
    if (depth == n) {
      visit(z, prefix[static_cast<std::size_t>(n)]);
      return;
    }
    for (int c = 0; c < k; ++c) {
      z[static_cast<std::size_t>(depth)] = c;
      double add = 0.0;
      for (int i = 0; i < depth; ++i) add += table.at(i, depth, z[static_cast<std::size_t>(i)], c);
      prefix[static_cast<std::size_t>(depth) + 1] = prefix[static_cast<std::size_t>(depth)] + add;
      descend(depth + 1);
    }
  };
  descend(0);
}

// log-likelihood per cluster-count vector: log sum over z with those counts
// of p(A | z, theta). The alpha factor only depends on the counts.
using CountTable = std::map<std::vector<int>, double>;

CountTable likelihood_by_counts(const AdjacencyMatrix& a, const ConnectivityMatrix& theta) {
  const int n = a.n();
  const int k = theta.k();
  guard_enumeration(n, k);
  if (!theta.all_within(0.0, 1.0)) throw ValidationError("Bernoulli theta must lie in [0, 1]");
  PairTable table(n, k);
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      for (int x = 0; x < k; ++x) {
        for (int y = 0; y < k; ++y) table.at(i, j, x, y) = bernoulli_log_p(a(i, j), theta(x, y));
      }
    }
  }
  CountTable groups;
  std::vector<int> counts(static_cast<std::size_t>(k));
  enumerate(table, n, k, [&](const std::vector<int>& z, double ll) {
    std::fill(counts.begin(), counts.end(), 0);
    for (int v : z) ++counts[static_cast<std::size_t>(v)];
    auto [it, inserted] = groups.try_emplace(counts, ll);
    if (!inserted) it->second = log_sum_exp(it->second, ll);
  });
  return groups;
}

double evaluate_alpha(const CountTable& groups, const std::vector<double>& alpha) {
  double total = kNegInf;
  for (const auto& [counts, ll] : groups) {
    double term = ll;
    for (std::size_t c = 0; c < counts.size(); ++c) {
      if (counts[c] == 0) continue;
      if (alpha[c] <= 0.0) {
        term = kNegInf;
        break;
      }
      term += counts[c] * std::log(alpha[c]);
    }
    total = log_sum_exp(total, term);
  }
  return total;
}

// Maximizes f on [lo, hi] by golden-section search.
double golden_max(const std::function<double(double)>& f, double lo, double hi, double tol) {
  double x1 = hi - kGolden * (hi - lo);
  double x2 = lo + kGolden * (hi - lo);
  double f1 = f(x1);
  double f2 = f(x2);
  while (hi - lo > tol) {
    if (f1 < f2) {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + kGolden * (hi - lo);
      f2 = f(x2);
    } else {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - kGolden * (hi - lo);
      f1 = f(x1);
    }
  }
  return std::max({f1, f2, f(0.5 * (lo + hi))});
}

Eigen::MatrixXd check_row_stochastic(const Eigen::MatrixXd& tau, int n, int k) {
  if (tau.rows() != n || tau.cols() != k) throw ValidationError("tau0 must be N x K");
  if (!tau.allFinite() || tau.minCoeff() < 0.0) throw ValidationError("tau0 must be nonnegative");
  if ((tau.rowwise().sum().array() - 1.0).abs().maxCoeff() > 1e-10) {
    throw ValidationError("tau0 rows must sum to 1");
  }
  return tau;
}

}  // namespace

std::pair<ConnectivityMatrix, Proportions> vem_m_step(const AdjacencyMatrix& a,
                                                      const Eigen::MatrixXd& tau,
                                                      double alpha_floor) {
  const double n = static_cast<double>(a.n());
  const Eigen::VectorXd counts = tau.colwise().sum().transpose();
  Eigen::VectorXd alpha = counts / n;
  if (alpha.minCoeff() < alpha_floor) {
    alpha = alpha.cwiseMax(alpha_floor);
    alpha /= alpha.sum();
  }
  Eigen::MatrixXd edges = tau.transpose() * (a.entries() * tau);
  Eigen::MatrixXd pairs = counts * counts.transpose() - tau.transpose() * tau;
  edges = 0.5 * (edges + edges.transpose()).eval();
  pairs = 0.5 * (pairs + pairs.transpose()).eval();
  const auto k = tau.cols();
  Eigen::MatrixXd theta(k, k);
  for (Eigen::Index l = 0; l < k; ++l) {
    for (Eigen::Index c = 0; c < k; ++c) {
      // Same floor as theta_closed_form on T = tau / N.
      if (pairs(c, l) <= kThetaDenominatorFloor * n * n) {
        theta(c, l) = 0.5;
      } else {
        theta(c, l) = std::clamp(edges(c, l) / pairs(c, l), kThetaMin, 1.0 - kThetaMin);
      }
    }
  }
  return {ConnectivityMatrix(std::move(theta)), Proportions(std::move(alpha))};
}

VemState vem_fit(const AdjacencyMatrix& a, int k, const Eigen::MatrixXd& tau0, int max_iters,
                 double tol, const VemOptions& opts) {
  if (k < 1) throw ValidationError("vem_fit needs k >= 1");
  if (max_iters < 1 || !(tol > 0.0)) throw ValidationError("vem_fit needs max_iters >= 1, tol > 0");
  const int n = a.n();
  Eigen::MatrixXd tau = check_row_stochastic(tau0, n, k);
  auto [theta, alpha] = vem_m_step(a, tau, opts.alpha_floor);
  double elbo = elbo_value(tau, a, theta, alpha);
  std::vector<double> history{elbo};
  const Eigen::MatrixXd& adj = a.entries();

  int it = 0;
  for (; it < max_iters; ++it) {
    const Eigen::MatrixXd log_theta = theta.values().array().log().matrix();
    const Eigen::MatrixXd log_not_theta = (-theta.values().array()).log1p().matrix();
    const Eigen::VectorXd log_alpha = alpha.weights().array().log().matrix();
    Eigen::RowVectorXd column_mass = tau.colwise().sum();
    for (int sweep = 0; sweep < opts.max_sweeps; ++sweep) {
      double moved = 0.0;
      for (int i = 0; i < n; ++i) {
        const Eigen::RowVectorXd linked = adj.row(i) * tau;
        const Eigen::RowVectorXd unlinked = column_mass - tau.row(i) - linked;
        Eigen::RowVectorXd logits = log_alpha.transpose() + linked * log_theta.transpose() +
                                    unlinked * log_not_theta.transpose();
        logits.array() -= logits.maxCoeff();
        Eigen::RowVectorXd fresh = logits.array().exp();
        fresh /= fresh.sum();
        const Eigen::RowVectorXd updated = opts.damping * tau.row(i) + (1.0 - opts.damping) * fresh;
        moved += (updated - tau.row(i)).cwiseAbs().sum();
        column_mass += updated - tau.row(i);
        tau.row(i) = updated;
      }
      if (moved / (static_cast<double>(n) * k) < opts.sweep_tol) break;
    }
    std::tie(theta, alpha) = vem_m_step(a, tau, opts.alpha_floor);
    const double next = elbo_value(tau, a, theta, alpha);
    history.push_back(next);
    const double change = std::abs(next - elbo) / std::max(std::abs(elbo), 1e-300);
    elbo = next;
    if (change < tol) {
      ++it;
      break;
    }
  }
  return VemState{std::move(tau), std::move(theta), std::move(alpha), elbo, std::move(history), it};
}

double exact_log_likelihood(const AdjacencyMatrix& a, const ConnectivityMatrix& theta,
                            const Proportions& alpha) {
  if (alpha.k() != theta.k()) throw ValidationError("theta and alpha disagree on k");
  const CountTable groups = likelihood_by_counts(a, theta);
  return evaluate_alpha(groups, std::vector<double>(alpha.weights().data(),
                                                    alpha.weights().data() + alpha.k()));
}

double sup_alpha_log_likelihood(const AdjacencyMatrix& a, const ConnectivityMatrix& theta,
                                int grid_size) {
  const int k = theta.k();
  if (k > 3) throw ValidationError("sup_alpha_log_likelihood supports K <= 3");
  if (grid_size < 2) throw ValidationError("grid_size must be at least 2");
  const CountTable groups = likelihood_by_counts(a, theta);
  if (k == 1) return evaluate_alpha(groups, {1.0});

  const double h = 1.0 / (grid_size - 1);
  constexpr double kRefineTol = 1e-10;
  if (k == 2) {
    double best = kNegInf;
    int best_i = 0;
    for (int i = 0; i < grid_size; ++i) {
      const double x = i * h;
      const double v = evaluate_alpha(groups, {1.0 - x, x});
      if (v > best) {
        best = v;
        best_i = i;
      }
    }
    const double lo = std::max(0.0, (best_i - 1) * h);
    const double hi = std::min(1.0, (best_i + 1) * h);
    const double refined = golden_max(
        [&](double x) { return evaluate_alpha(groups, {1.0 - x, x}); }, lo, hi, kRefineTol);
    return std::max(best, refined);
  }

  // K == 3: triangular grid, then a line search through the best point along
  // each of the three edge directions of the simplex.
  double best = kNegInf;
  std::vector<double> best_alpha{1.0, 0.0, 0.0};
  for (int i = 0; i < grid_size; ++i) {
    for (int j = 0; i + j < grid_size; ++j) {
      std::vector<double> alpha{i * h, j * h, std::max(0.0, 1.0 - (i + j) * h)};
      const double v = evaluate_alpha(groups, alpha);
      if (v > best) {
        best = v;
        best_alpha = alpha;
      }
    }
  }
  const int pairs[3][2] = {{0, 1}, {0, 2}, {1, 2}};
  for (const auto& pair : pairs) {
    const int p = pair[0];
    const int q = pair[1];
    const double shared = best_alpha[static_cast<std::size_t>(p)] + best_alpha[static_cast<std::size_t>(q)];
    if (shared <= 0.0) continue;
    const double center = best_alpha[static_cast<std::size_t>(p)];
    const double lo = std::max(0.0, center - h);
    const double hi = std::min(shared, center + h);
    const double refined = golden_max(
        [&](double x) {
          std::vector<double> alpha = best_alpha;
          alpha[static_cast<std::size_t>(p)] = x;
          alpha[static_cast<std::size_t>(q)] = shared - x;
          return evaluate_alpha(groups, alpha);
        },
        lo, hi, kRefineTol);
    best = std::max(best, refined);
  }
  return best;
}

VertexOracleResult vertex_srgw_oracle(const AdjacencyMatrix& a, const CompositeLoss& loss,
                                      const ConnectivityMatrix& theta) {
  const int n = a.n();
  const int k = theta.k();
  guard_enumeration(n, k);
  for (int x = 0; x < k; ++x) {
    for (int y = 0; y < k; ++y) {
      if (!loss.in_domain(theta(x, y))) throw DomainError("theta outside the loss domain");
    }
  }
  PairTable table(n, k);
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      for (int x = 0; x < k; ++x) {
        for (int y = 0; y < k; ++y) {
          // Both ordered pairs (i, j) and (j, i) contribute.
          table.at(i, j, x, y) = loss(a(i, j), theta(x, y)) + loss(a(j, i), theta(y, x));
        }
      }
    }
  }
  double best = std::numeric_limits<double>::infinity();
  std::vector<int> best_z(static_cast<std::size_t>(n), 0);
  enumerate(table, n, k, [&](const std::vector<int>& z, double total) {
    if (total < best) {
      best = total;
      best_z = z;
    }
  });
  const double scale = 1.0 / (static_cast<double>(n) * n);
  return VertexOracleResult{best * scale, Labels(std::move(best_z), k)};
}

}  // namespace srgw
