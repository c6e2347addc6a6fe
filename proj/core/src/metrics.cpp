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

#include "srgw/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>

#include "srgw/error.hpp"

namespace srgw {
namespace {

using Int = std::int64_t;
using Wide = __int128;

Wide choose2(Int n) { return static_cast<Wide>(n) * (n - 1) / 2; }

// Confusion counts, rows indexed by x's labels, columns by y's.
std::vector<std::vector<Int>> contingency(const Labels& x, const Labels& y) {
  std::vector<std::vector<Int>> table(x.k(), std::vector<Int>(y.k(), 0));
  for (int i = 0; i < x.n(); ++i) ++table[x[i]][y[i]];
  return table;
}

struct Reduced {
  Eigen::MatrixXd theta;
  std::vector<int> used;  // original index of each kept cluster
};

Reduced drop_unused(const ConnectivityMatrix& theta, const Labels& labels) {
  std::vector<bool> seen(theta.k(), false);
  for (int v : labels.values()) {
    if (v < theta.k()) seen[v] = true;
  }
  Reduced r;
  for (int c = 0; c < theta.k(); ++c) {
    if (seen[c]) r.used.push_back(c);
  }
  const auto kk = static_cast<Eigen::Index>(r.used.size());
  r.theta.resize(kk, kk);
  for (Eigen::Index b = 0; b < kk; ++b) {
    for (Eigen::Index a = 0; a < kk; ++a) {
      r.theta(a, b) = theta(r.used[a], r.used[b]);
    }
  }
  return r;
}

Eigen::MatrixXd pad(const Eigen::MatrixXd& m, Eigen::Index size) {
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(size, size);
  out.topLeftCorner(m.rows(), m.cols()) = m;
  return out;
}

// ||P theta_hat P^T - theta_star||_F where estimate cluster perm[s] plays
// star cluster s.
double aligned_distance(const Eigen::MatrixXd& hat, const Eigen::MatrixXd& star,
                        const std::vector<int>& perm) {
  double sum = 0.0;
  for (Eigen::Index b = 0; b < star.cols(); ++b) {
    for (Eigen::Index a = 0; a < star.rows(); ++a) {
      const double d = hat(perm[a], perm[b]) - star(a, b);
      sum += d * d;
    }
  }
  return std::sqrt(sum);
}

struct Aligned {
  Eigen::MatrixXd hat;
  Eigen::MatrixXd star;
  std::vector<int> hat_ids;  // padded index -> original estimate cluster, -1 for padding
};

Aligned prepare(const ConnectivityMatrix& theta_hat, const ConnectivityMatrix& theta_star,
                const Labels& labels_hat, const Labels& labels_star) {
  if (labels_hat.n() != labels_star.n()) throw ValidationError("label vectors differ in length");
  const Reduced reduced = drop_unused(theta_hat, labels_hat);
  const Eigen::Index size = std::max<Eigen::Index>(reduced.theta.rows(), theta_star.k());
  Aligned out{pad(reduced.theta, size), pad(theta_star.values(), size), {}};
  out.hat_ids.assign(size, -1);
  for (std::size_t i = 0; i < reduced.used.size(); ++i) out.hat_ids[i] = reduced.used[i];
  return out;
}

double by_confusion(const Aligned& al, const Labels& labels_hat, const Labels& labels_star) {
  const auto size = al.hat.rows();
  std::vector<int> padded_of(labels_hat.k(), -1);
  for (std::size_t p = 0; p < al.hat_ids.size(); ++p) {
    if (al.hat_ids[p] >= 0) padded_of[al.hat_ids[p]] = static_cast<int>(p);
  }
  // cost(star s, hat h) = -overlap, so the assignment maximizes the trace.
  Eigen::MatrixXd cost = Eigen::MatrixXd::Zero(size, size);
  for (int i = 0; i < labels_hat.n(); ++i) {
    const int h = padded_of[labels_hat[i]];
    const int s = labels_star[i];
    if (h >= 0 && s < size) cost(s, h) -= 1.0;
  }
  return aligned_distance(al.hat, al.star, solve_assignment(cost));
}

}  // namespace

double ari(const Labels& x, const Labels& y) {
  if (x.n() != y.n()) throw ValidationError("ari: label vectors differ in length");
  const Int n = x.n();
  const auto table = contingency(x, y);
  Wide index = 0;
  std::vector<Int> row_totals(table.size(), 0);
  std::vector<Int> col_totals(y.k(), 0);
  for (std::size_t r = 0; r < table.size(); ++r) {
    for (std::size_t c = 0; c < table[r].size(); ++c) {
      index += choose2(table[r][c]);
      row_totals[r] += table[r][c];
      col_totals[c] += table[r][c];
    }
  }
  Wide sum_rows = 0;
  Wide sum_cols = 0;
  for (Int a : row_totals) sum_rows += choose2(a);
  for (Int b : col_totals) sum_cols += choose2(b);
  const Wide pairs = choose2(n);
  // ARI = (index - rows*cols/pairs) / ((rows+cols)/2 - rows*cols/pairs), scaled by 2*pairs.
  const Wide numerator = 2 * (index * pairs - sum_rows * sum_cols);
  const Wide denominator = (sum_rows + sum_cols) * pairs - 2 * sum_rows * sum_cols;
  if (denominator == 0) return numerator == 0 ? 1.0 : 0.0;
  return static_cast<double>(numerator) / static_cast<double>(denominator);
}

Labels hard_labels(const TransportPlan& t) {
  const Eigen::MatrixXd& e = t.entries();
  std::vector<int> out(t.n());
  for (int i = 0; i < t.n(); ++i) {
    int arg = 0;
    for (int k = 1; k < t.k(); ++k) {
      if (e(i, k) > e(i, arg)) arg = k;
    }
    out[i] = arg;
  }
  return Labels(std::move(out), t.k());
}

int selected_k(const TransportPlan& t, double mass_tol) {
  const Eigen::VectorXd q = t.column_masses();
  return static_cast<int>((q.array() > mass_tol).count());
}

double label_accuracy(const Labels& estimate, const Labels& truth) {
  if (estimate.n() != truth.n()) throw ValidationError("label vectors differ in length");
  const int size = std::max(estimate.k(), truth.k());
  Eigen::MatrixXd cost = Eigen::MatrixXd::Zero(size, size);
  for (int i = 0; i < truth.n(); ++i) cost(truth[i], estimate[i]) -= 1.0;
  const std::vector<int> match = solve_assignment(cost);
  double hits = 0.0;
  for (int s = 0; s < size; ++s) hits -= cost(s, match[s]);
  return hits / truth.n();
}

double theta_recovery_error(const ConnectivityMatrix& theta_hat,
                            const ConnectivityMatrix& theta_star, const Labels& labels_hat,
                            const Labels& labels_star) {
  const Aligned al = prepare(theta_hat, theta_star, labels_hat, labels_star);
  const auto size = static_cast<int>(al.hat.rows());
  if (size > 8) return by_confusion(al, labels_hat, labels_star);
  std::vector<int> perm(size);
  std::iota(perm.begin(), perm.end(), 0);
  double best = std::numeric_limits<double>::infinity();
  do {
    best = std::min(best, aligned_distance(al.hat, al.star, perm));
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best;
}

double theta_recovery_error_by_confusion(const ConnectivityMatrix& theta_hat,
                                         const ConnectivityMatrix& theta_star,
                                         const Labels& labels_hat, const Labels& labels_star) {
  return by_confusion(prepare(theta_hat, theta_star, labels_hat, labels_star), labels_hat,
                      labels_star);
}

std::vector<int> solve_assignment(const Eigen::MatrixXd& cost) {
  // Shortest augmenting paths with row/column potentials, O(n^3). Arrays are
  // 1-based; column 0 is a virtual source.
  const int n = static_cast<int>(cost.rows());
  if (cost.cols() != n) throw ValidationError("assignment cost must be square");
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0);
  std::vector<int> owner(n + 1, 0), way(n + 1, 0);
  for (int i = 1; i <= n; ++i) {
    owner[0] = i;
    int j0 = 0;
    std::vector<double> minv(n + 1, inf);
    std::vector<bool> used(n + 1, false);
    do {
      used[j0] = true;
      const int i0 = owner[j0];
      double delta = inf;
      int j1 = 0;
      for (int j = 1; j <= n; ++j) {
        if (used[j]) continue;
        const double reduced = cost(i0 - 1, j - 1) - u[i0] - v[j];
        if (reduced < minv[j]) {
          minv[j] = reduced;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (int j = 0; j <= n; ++j) {
        if (used[j]) {
          u[owner[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (owner[j0] != 0);
    do {
      const int j1 = way[j0];
      owner[j0] = owner[j1];
      j0 = j1;
    } while (j0 != 0);
  }
  std::vector<int> assignment(n, -1);
  for (int j = 1; j <= n; ++j) {
    if (owner[j] > 0) assignment[owner[j] - 1] = j - 1;
  }
  return assignment;
}

EvalReport evaluate(const TransportPlan& t, const ConnectivityMatrix& theta_hat,
                    const Labels& truth, const ConnectivityMatrix& theta_star, double mass_tol) {
  const Labels estimate = hard_labels(t);
  EvalReport report;
  report.ari = ari(estimate, truth);
  report.k_hat = selected_k(t, mass_tol);
  report.theta_error = theta_recovery_error(theta_hat, theta_star, estimate, truth);
  report.label_accuracy = label_accuracy(estimate, truth);
  if (report.k_hat != theta_star.k()) report.notes = "k_hat differs from the true K";
  return report;
}

}  // namespace srgw
