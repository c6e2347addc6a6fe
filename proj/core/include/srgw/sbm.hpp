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

#ifndef SRGW_SBM_HPP_
#define SRGW_SBM_HPP_

#include <cstdint>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace srgw {

// Default clamp for connectivity entries used with log-based losses.
inline constexpr double kThetaMin = 1e-6;

// Observed undirected graph, stored dense. Symmetric with a zero diagonal.
class AdjacencyMatrix {
 public:
  explicit AdjacencyMatrix(Eigen::MatrixXd entries);

  static AdjacencyMatrix from_edges(int n, const std::vector<std::pair<int, int>>& edges);

  int n() const { return static_cast<int>(entries_.rows()); }
  const Eigen::MatrixXd& entries() const { return entries_; }
  double operator()(int i, int j) const { return entries_(i, j); }

  bool is_binary() const;
  // Undirected edges i < j with a nonzero entry, in row-major order.
  std::vector<std::pair<int, int>> edges() const;
  std::int64_t edge_count() const;

  // Relabels nodes: result(i, j) = A(perm[i], perm[j]).
  AdjacencyMatrix permuted(const std::vector<int>& perm) const;

 private:
  Eigen::MatrixXd entries_;
};

// Symmetric K x K matrix of block parameters. Entries are kept raw; callers
// that need log-safety go through clamped().
class ConnectivityMatrix {
 public:
  explicit ConnectivityMatrix(Eigen::MatrixXd values);

  static ConnectivityMatrix constant(int k, double value);

  int k() const { return static_cast<int>(values_.rows()); }
  const Eigen::MatrixXd& values() const { return values_; }
  double operator()(int k, int l) const { return values_(k, l); }

  ConnectivityMatrix clamped(double theta_min = kThetaMin) const;
  bool all_within(double lo, double hi) const;

  // No two clusters share the same row of connectivities.
  bool has_distinct_rows() const;

  // result(a, b) = theta(perm[a], perm[b]).
  ConnectivityMatrix permuted(const std::vector<int>& perm) const;

 private:
  Eigen::MatrixXd values_;
};

// Cluster proportions on the probability simplex (sum within 1e-12).
class Proportions {
 public:
  explicit Proportions(Eigen::VectorXd weights);

  static Proportions uniform(int k);

  int k() const { return static_cast<int>(weights_.size()); }
  const Eigen::VectorXd& weights() const { return weights_; }
  double operator[](int k) const { return weights_(k); }

  // Every weight lies in [gamma, 1 - gamma] (forbids empty clusters).
  bool bounded_away_from_zero(double gamma) const;

 private:
  Eigen::VectorXd weights_;
};

// Node cluster labels, 0-indexed, tagged with the number of clusters used.
class Labels {
 public:
  Labels(std::vector<int> values, int k);

  int n() const { return static_cast<int>(values_.size()); }
  int k() const { return k_; }
  const std::vector<int>& values() const { return values_; }
  int operator[](int i) const { return values_[static_cast<std::size_t>(i)]; }

  friend bool operator==(const Labels&, const Labels&) = default;

 private:
  std::vector<int> values_;
  int k_;
};

enum class Scenario { kAssortative, kHub, kDisassortative };

Scenario parse_scenario(std::string_view name);
std::string_view to_string(Scenario scenario);

// assortative:    (p_in - p_out) I + p_out 11^T
// hub:            assortative with first row and column set to p_in
// disassortative: (p_out - p_in) I + p_in 11^T
ConnectivityMatrix build_scenario(Scenario kind, int k, double p_in, double p_out);

// w_j proportional to 1 / j^2, j = 1..k.
Proportions unbalanced_proportions(int k);

struct SampledGraph {
  AdjacencyMatrix adjacency;
  Labels labels;
};

// Bernoulli SBM draw. Labels are i.i.d. categorical(alpha) from one stream,
// then every pair i < j (row-major) gets one uniform from a second stream and
// is an edge when u < theta(z_i, z_j). Raw theta entries are used, so 0 and 1
// are honoured exactly.
SampledGraph sample_graph(const ConnectivityMatrix& theta, const Proportions& alpha, int n,
                          std::uint64_t seed);

}  // namespace srgw

#endif  // SRGW_SBM_HPP_
