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

#include "srgw/init.hpp"

#include <algorithm>
#include <limits>
#include <numeric>

#include "srgw/error.hpp"
#include "srgw/random.hpp"

namespace srgw {
namespace {

struct LloydRun {
  std::vector<int> assignment;
  Eigen::MatrixXd centers;
  double inertia = 0.0;
  std::vector<double> history;
};

double squared_distance(const Eigen::MatrixXd& points, Eigen::Index i, const Eigen::MatrixXd& centers,
                        Eigen::Index c) {
  return (points.row(i) - centers.row(c)).squaredNorm();
}

Eigen::MatrixXd plus_plus_seeding(const Eigen::MatrixXd& points, int k, Rng& rng) {
  const Eigen::Index n = points.rows();
  Eigen::MatrixXd centers(k, points.cols());
  centers.row(0) = points.row(static_cast<Eigen::Index>(rng.below(static_cast<std::uint64_t>(n))));
  Eigen::VectorXd nearest(n);
  for (Eigen::Index i = 0; i < n; ++i) nearest(i) = squared_distance(points, i, centers, 0);
  for (int c = 1; c < k; ++c) {
    const double total = nearest.sum();
    Eigen::Index pick = 0;
    if (total > 0.0) {
      const double target = rng.uniform() * total;
      double acc = 0.0;
      pick = n - 1;
      for (Eigen::Index i = 0; i < n; ++i) {
        acc += nearest(i);
        if (acc > target) {
          pick = i;
          break;
        }
      }
    } else {
      pick = static_cast<Eigen::Index>(rng.below(static_cast<std::uint64_t>(n)));
    }
    centers.row(c) = points.row(pick);
    for (Eigen::Index i = 0; i < n; ++i) {
      nearest(i) = std::min(nearest(i), squared_distance(points, i, centers, c));
    }
  }
  return centers;
}

double assign(const Eigen::MatrixXd& points, const Eigen::MatrixXd& centers,
              std::vector<int>& assignment) {
  double inertia = 0.0;
  for (Eigen::Index i = 0; i < points.rows(); ++i) {
    int best = 0;
    double best_d = squared_distance(points, i, centers, 0);
    for (Eigen::Index c = 1; c < centers.rows(); ++c) {
      const double d = squared_distance(points, i, centers, c);
      if (d < best_d) {
        best_d = d;
        best = static_cast<int>(c);
      }
    }
    assignment[static_cast<std::size_t>(i)] = best;
    inertia += best_d;
  }
  return inertia;
}

// Recomputes centers; refills empty clusters with the farthest point.
void update_centers(const Eigen::MatrixXd& points, std::vector<int>& assignment,
                    Eigen::MatrixXd& centers) {
  const auto k = centers.rows();
  for (;;) {
    std::vector<int> counts(static_cast<std::size_t>(k), 0);
    for (int c : assignment) ++counts[static_cast<std::size_t>(c)];
    const auto empty = std::find(counts.begin(), counts.end(), 0);
    if (empty == counts.end()) break;
    Eigen::Index far = -1;
    double far_d = -1.0;
    for (Eigen::Index i = 0; i < points.rows(); ++i) {
      const int c = assignment[static_cast<std::size_t>(i)];
      if (counts[static_cast<std::size_t>(c)] < 2) continue;
      const double d = squared_distance(points, i, centers, c);
      if (d > far_d) {
        far_d = d;
        far = i;
      }
    }
    if (far < 0) break;  // fewer distinct slots than clusters
    const auto slot = static_cast<int>(empty - counts.begin());
    assignment[static_cast<std::size_t>(far)] = slot;
    centers.row(slot) = points.row(far);
  }
  Eigen::MatrixXd sums = Eigen::MatrixXd::Zero(k, points.cols());
  Eigen::VectorXd counts = Eigen::VectorXd::Zero(k);
  for (Eigen::Index i = 0; i < points.rows(); ++i) {
    const int c = assignment[static_cast<std::size_t>(i)];
    sums.row(c) += points.row(i);
    counts(c) += 1.0;
  }
  for (Eigen::Index c = 0; c < k; ++c) {
    if (counts(c) > 0.0) centers.row(c) = sums.row(c) / counts(c);
  }
}

double inertia_of(const Eigen::MatrixXd& points, const Eigen::MatrixXd& centers,
                  const std::vector<int>& assignment) {
  double total = 0.0;
  for (Eigen::Index i = 0; i < points.rows(); ++i) {
    total += squared_distance(points, i, centers, assignment[static_cast<std::size_t>(i)]);
  }
  return total;
}

LloydRun lloyd(const Eigen::MatrixXd& points, int k, Rng& rng, int max_iters) {
  LloydRun run;
  run.centers = plus_plus_seeding(points, k, rng);
  run.assignment.assign(static_cast<std::size_t>(points.rows()), -1);
  std::vector<int> previous;
  for (int it = 0; it < max_iters; ++it) {
    previous = run.assignment;
    assign(points, run.centers, run.assignment);
    update_centers(points, run.assignment, run.centers);
    run.inertia = inertia_of(points, run.centers, run.assignment);
    run.history.push_back(run.inertia);
    if (run.assignment == previous) break;
  }
  return run;
}

Eigen::MatrixXd sign_normalized(Eigen::MatrixXd vectors) {
  for (Eigen::Index c = 0; c < vectors.cols(); ++c) {
    Eigen::Index arg = 0;
    vectors.col(c).cwiseAbs().maxCoeff(&arg);
    if (vectors(arg, c) < 0.0) vectors.col(c) *= -1.0;
  }
  return vectors;
}

// Columns of `vectors` reordered by decreasing |value|, first k kept.
Eigen::MatrixXd top_by_magnitude(const Eigen::VectorXd& values, const Eigen::MatrixXd& vectors,
                                 int k) {
  std::vector<Eigen::Index> order(static_cast<std::size_t>(values.size()));
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](Eigen::Index x, Eigen::Index y) {
    return std::abs(values(x)) > std::abs(values(y));
  });
  Eigen::MatrixXd out(vectors.rows(), k);
  for (int c = 0; c < k; ++c) out.col(c) = vectors.col(order[static_cast<std::size_t>(c)]);
  return sign_normalized(std::move(out));
}

Eigen::MatrixXd orthonormal_basis(const Eigen::MatrixXd& y) {
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(y);
  return qr.householderQ() * Eigen::MatrixXd::Identity(y.rows(), y.cols());
}

}  // namespace

KMeansResult kmeans_fit(const Eigen::MatrixXd& points, int k, std::uint64_t seed,
                        const KMeansOptions& opts) {
  if (k < 1) throw ValidationError("kmeans needs k >= 1");
  if (k > points.rows()) throw ValidationError("kmeans needs k <= number of points");
  if (!points.allFinite()) throw ValidationError("kmeans points must be finite");
  if (opts.restarts < 1 || opts.max_iters < 1) throw ValidationError("kmeans options must be positive");

  Rng rng(seed, streams::kKMeans);
  LloydRun best;
  int best_restart = -1;
  for (int r = 0; r < opts.restarts; ++r) {
    LloydRun run = lloyd(points, k, rng, opts.max_iters);
    if (best_restart < 0 || run.inertia < best.inertia) {
      best = std::move(run);
      best_restart = r;
    }
  }
  return KMeansResult{Labels(std::move(best.assignment), k), std::move(best.centers), best.inertia,
                      best_restart, std::move(best.history)};
}

Labels kmeans(const Eigen::MatrixXd& points, int k, std::uint64_t seed) {
  return kmeans_fit(points, k, seed).labels;
}

TransportPlan labels_to_plan(const Labels& labels, int k) {
  if (k < 1) throw ValidationError("labels_to_plan needs k >= 1");
  const int n = labels.n();
  if (n < 1) throw ValidationError("labels_to_plan needs at least one node");
  Eigen::MatrixXd t = Eigen::MatrixXd::Zero(n, k);
  const double mass = 1.0 / static_cast<double>(n);
  for (int i = 0; i < n; ++i) {
    if (labels[i] >= k) throw ValidationError("label out of range for k");
    t(i, labels[i]) = mass;
  }
  return TransportPlan(std::move(t));
}

EmbeddingMatrix randomized_singular_vectors(const AdjacencyMatrix& a, int k, std::uint64_t seed,
                                            int oversampling, int power_steps) {
  const int n = a.n();
  if (k < 1 || k > n) throw ValidationError("need 1 <= k <= N singular vectors");
  const int width = std::min(n, k + oversampling);
  Rng rng(seed, streams::kSketch);
  Eigen::MatrixXd sketch(n, width);
  for (Eigen::Index c = 0; c < width; ++c) {
    for (Eigen::Index i = 0; i < n; ++i) sketch(i, c) = rng.normal();
  }
  Eigen::MatrixXd q = orthonormal_basis(a.entries() * sketch);
  for (int step = 0; step < power_steps; ++step) q = orthonormal_basis(a.entries() * q);
  const Eigen::MatrixXd small = q.transpose() * a.entries() * q;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(0.5 * (small + small.transpose()));
  return top_by_magnitude(eig.eigenvalues(), q * eig.eigenvectors(), k);
}

EmbeddingMatrix leading_singular_vectors(const AdjacencyMatrix& a, int k, std::uint64_t seed) {
  if (k < 1 || k > a.n()) throw ValidationError("need 1 <= k <= N singular vectors");
  if (a.n() >= kDenseEigenLimit) return randomized_singular_vectors(a, k, seed);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(a.entries());
  return top_by_magnitude(eig.eigenvalues(), eig.eigenvectors(), k);
}

TransportPlan spectral_init(const AdjacencyMatrix& a, int k, std::uint64_t seed, double blend) {
  if (k < 1) throw ValidationError("spectral_init needs k >= 1");
  if (k > a.n()) throw ValidationError("spectral_init needs k <= N");
  if (!(blend >= 0.0 && blend <= 1.0)) throw ValidationError("blend must lie in [0, 1]");
  const int n = a.n();
  if (k == 1) return TransportPlan::uniform(n, 1);
  const EmbeddingMatrix embedding = leading_singular_vectors(a, k, seed);
  const TransportPlan hard = labels_to_plan(kmeans(embedding, k, seed), k);
  const double floor = blend / (static_cast<double>(n) * k);
  return TransportPlan::trusted((1.0 - blend) * hard.entries().array() + floor);
}

}  // namespace srgw
