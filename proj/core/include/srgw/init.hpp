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

#ifndef SRGW_INIT_HPP_
#define SRGW_INIT_HPP_

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "srgw/losses.hpp"
#include "srgw/sbm.hpp"

namespace srgw {

// N x d node embedding, one row per node.
using EmbeddingMatrix = Eigen::MatrixXd;

struct KMeansOptions {
  int restarts = 10;
  int max_iters = 100;
};

struct KMeansResult {
  Labels labels;
  Eigen::MatrixXd centers;  // k x d
  double inertia = 0.0;
  int best_restart = 0;
  // Inertia after every Lloyd iteration of the winning restart.
  std::vector<double> inertia_history;
};

// Lloyd's algorithm with k-means++ seeding; the restart with the lowest
// inertia wins (earliest restart on ties). An empty cluster is refilled with
// the point farthest from its current center.
KMeansResult kmeans_fit(const Eigen::MatrixXd& points, int k, std::uint64_t seed,
                        const KMeansOptions& opts = {});
Labels kmeans(const Eigen::MatrixXd& points, int k, std::uint64_t seed);

// T_ik = 1/N when labels_i == k.
TransportPlan labels_to_plan(const Labels& labels, int k);

// Top-k left singular vectors of the symmetric adjacency matrix, i.e. the
// eigenvectors with the largest |eigenvalue|. Below kDenseEigenLimit nodes a
// full symmetric eigendecomposition is used; above it, seeded randomized
// subspace iteration (8 extra columns, 30 power steps). Each vector is signed
// so its largest-magnitude entry is positive.
inline constexpr int kDenseEigenLimit = 1000;
EmbeddingMatrix leading_singular_vectors(const AdjacencyMatrix& a, int k, std::uint64_t seed);
EmbeddingMatrix randomized_singular_vectors(const AdjacencyMatrix& a, int k, std::uint64_t seed,
                                            int oversampling = 8, int power_steps = 30);

// k-means on the spectral embedding, then blended with the uniform plan:
//   T0 = (1 - blend) * hard + blend / (N K).
inline constexpr double kSpectralBlend = 1e-3;
TransportPlan spectral_init(const AdjacencyMatrix& a, int k, std::uint64_t seed,
                            double blend = kSpectralBlend);

}  // namespace srgw

#endif  // SRGW_INIT_HPP_
