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

#include "srgw/sbm.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "srgw/error.hpp"
#include "srgw/random.hpp"

namespace srgw {
namespace {

constexpr double kSymmetryTol = 1e-12;
constexpr double kSimplexTol = 1e-12;

bool all_finite(const Eigen::MatrixXd& m) { return m.allFinite(); }

}  // namespace

AdjacencyMatrix::AdjacencyMatrix(Eigen::MatrixXd entries) : entries_(std::move(entries)) {
  if (entries_.rows() < 1 || entries_.rows() != entries_.cols()) {
    throw ValidationError("adjacency matrix must be square and nonempty");
  }
  if (!all_finite(entries_)) throw ValidationError("adjacency matrix has non-finite entries");
  const Eigen::Index n = entries_.rows();
  for (Eigen::Index i = 0; i < n; ++i) {
    if (entries_(i, i) != 0.0) throw ValidationError("adjacency matrix diagonal must be zero");
    for (Eigen::Index j = i + 1; j < n; ++j) {
      if (entries_(i, j) != entries_(j, i)) {
        throw ValidationError("adjacency matrix must be symmetric");
      }
    }
  }
}

AdjacencyMatrix AdjacencyMatrix::from_edges(int n, const std::vector<std::pair<int, int>>& edges) {
  if (n < 1) throw ValidationError("graph needs at least one node");
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n, n);
  for (const auto& [i, j] : edges) {
    if (i < 0 || j < 0 || i >= n || j >= n) {
      std::ostringstream msg;
      msg << "edge (" << i << ", " << j << ") out of range for n = " << n;
      throw ValidationError(msg.str());
    }
    if (i == j) throw ValidationError("self loops are not allowed");
    a(i, j) = 1.0;
    a(j, i) = 1.0;
  }
  return AdjacencyMatrix(std::move(a));
}

bool AdjacencyMatrix::is_binary() const {
  return (entries_.array() == 0.0 || entries_.array() == 1.0).all();
}

std::vector<std::pair<int, int>> AdjacencyMatrix::edges() const {
  std::vector<std::pair<int, int>> out;
  for (int i = 0; i < n(); ++i) {
    for (int j = i + 1; j < n(); ++j) {
      if (entries_(i, j) != 0.0) out.emplace_back(i, j);
    }
  }
  return out;
}

std::int64_t AdjacencyMatrix::edge_count() const {
  std::int64_t count = 0;
  for (int j = 0; j < n(); ++j) {
    for (int i = 0; i < j; ++i) count += entries_(i, j) != 0.0;
  }
  return count;
}

AdjacencyMatrix AdjacencyMatrix::permuted(const std::vector<int>& perm) const {
  if (static_cast<int>(perm.size()) != n()) throw ValidationError("permutation size mismatch");
  Eigen::MatrixXd out(n(), n());
  for (int j = 0; j < n(); ++j) {
    for (int i = 0; i < n(); ++i) out(i, j) = entries_(perm[i], perm[j]);
  }
  return AdjacencyMatrix(std::move(out));
}

ConnectivityMatrix::ConnectivityMatrix(Eigen::MatrixXd values) : values_(std::move(values)) {
  if (values_.rows() < 1 || values_.rows() != values_.cols()) {
    throw ValidationError("connectivity matrix must be square and nonempty");
  }
  if (!all_finite(values_)) throw ValidationError("connectivity matrix has non-finite entries");
  if ((values_ - values_.transpose()).cwiseAbs().maxCoeff() > kSymmetryTol) {
    throw ValidationError("connectivity matrix must be symmetric");
  }
  // Exact symmetry keeps the gradient identity grad = 2 * cost exact.
  values_ = 0.5 * (values_ + values_.transpose()).eval();
}

ConnectivityMatrix ConnectivityMatrix::constant(int k, double value) {
  if (k < 1) throw ValidationError("k must be positive");
  return ConnectivityMatrix(Eigen::MatrixXd::Constant(k, k, value));
}

ConnectivityMatrix ConnectivityMatrix::clamped(double theta_min) const {
  if (!(theta_min >= 0.0 && theta_min < 0.5)) throw ValidationError("theta_min must be in [0, 0.5)");
  return ConnectivityMatrix(values_.cwiseMax(theta_min).cwiseMin(1.0 - theta_min));
}

bool ConnectivityMatrix::all_within(double lo, double hi) const {
  return values_.minCoeff() >= lo && values_.maxCoeff() <= hi;
}

bool ConnectivityMatrix::has_distinct_rows() const {
  for (int a = 0; a < k(); ++a) {
    for (int b = a + 1; b < k(); ++b) {
      if (values_.row(a) == values_.row(b)) return false;
    }
  }
  return true;
}

ConnectivityMatrix ConnectivityMatrix::permuted(const std::vector<int>& perm) const {
  if (static_cast<int>(perm.size()) != k()) throw ValidationError("permutation size mismatch");
  Eigen::MatrixXd out(k(), k());
  for (int b = 0; b < k(); ++b) {
    for (int a = 0; a < k(); ++a) out(a, b) = values_(perm[a], perm[b]);
  }
  return ConnectivityMatrix(std::move(out));
}

Proportions::Proportions(Eigen::VectorXd weights) : weights_(std::move(weights)) {
  if (weights_.size() < 1) throw ValidationError("proportions need at least one cluster");
  if (!weights_.allFinite() || weights_.minCoeff() < 0.0) {
    throw ValidationError("proportions must be finite and nonnegative");
  }
  if (std::abs(weights_.sum() - 1.0) > kSimplexTol) {
    throw ValidationError("proportions must sum to 1");
  }
}

Proportions Proportions::uniform(int k) {
  if (k < 1) throw ValidationError("k must be positive");
  return Proportions(Eigen::VectorXd::Constant(k, 1.0 / k));
}

bool Proportions::bounded_away_from_zero(double gamma) const {
  return weights_.minCoeff() >= gamma && weights_.maxCoeff() <= 1.0 - gamma;
}

Labels::Labels(std::vector<int> values, int k) : values_(std::move(values)), k_(k) {
  if (k_ < 1) throw ValidationError("labels need k >= 1");
  for (int v : values_) {
    if (v < 0 || v >= k_) {
      std::ostringstream msg;
      msg << "label " << v << " outside [0, " << k_ << ")";
      throw ValidationError(msg.str());
    }
  }
}

Scenario parse_scenario(std::string_view name) {
  if (name == "assortative") return Scenario::kAssortative;
  if (name == "hub") return Scenario::kHub;
  if (name == "disassortative") return Scenario::kDisassortative;
  throw ValidationError("unknown scenario '" + std::string(name) + "'");
}

std::string_view to_string(Scenario scenario) {
  switch (scenario) {
    case Scenario::kAssortative: return "assortative";
    case Scenario::kHub: return "hub";
    case Scenario::kDisassortative: return "disassortative";
  }
  return "unknown";
}

ConnectivityMatrix build_scenario(Scenario kind, int k, double p_in, double p_out) {
  if (k < 1) throw ValidationError("scenario needs k >= 1");
  if (!(p_out > 0.0 && p_out <= p_in && p_in < 1.0)) {
    throw ValidationError("scenario probabilities must satisfy 0 < p_out <= p_in < 1");
  }
  Eigen::MatrixXd theta;
  switch (kind) {
    case Scenario::kAssortative:
      theta = Eigen::MatrixXd::Constant(k, k, p_out);
      theta.diagonal().setConstant(p_in);
      break;
    case Scenario::kHub:
      if (k < 2) throw ValidationError("hub scenario needs k >= 2");
      theta = Eigen::MatrixXd::Constant(k, k, p_out);
      theta.diagonal().setConstant(p_in);
      theta.row(0).setConstant(p_in);
      theta.col(0).setConstant(p_in);
      break;
    case Scenario::kDisassortative:
      theta = Eigen::MatrixXd::Constant(k, k, p_in);
      theta.diagonal().setConstant(p_out);
      break;
  }
  return ConnectivityMatrix(std::move(theta));
}

Proportions unbalanced_proportions(int k) {
  if (k < 1) throw ValidationError("unbalanced proportions need k >= 1");
  Eigen::VectorXd w(k);
  for (int j = 0; j < k; ++j) w(j) = 1.0 / (static_cast<double>(j + 1) * (j + 1));
  w /= w.sum();
  return Proportions(std::move(w));
}

SampledGraph sample_graph(const ConnectivityMatrix& theta, const Proportions& alpha, int n,
                          std::uint64_t seed) {
  if (theta.k() != alpha.k()) throw ValidationError("theta and alpha disagree on k");
  if (n < 2) throw ValidationError("sample_graph needs n >= 2");
  if (!theta.all_within(0.0, 1.0)) throw ValidationError("Bernoulli theta entries must lie in [0, 1]");

  const int k = theta.k();
  Eigen::VectorXd cumulative(k);
  double acc = 0.0;
  for (int c = 0; c < k; ++c) {
    acc += alpha[c];
    cumulative(c) = acc;
  }

  Rng label_rng(seed, streams::kLabels);
  std::vector<int> z(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    const double u = label_rng.uniform() * acc;
    int c = 0;
    while (c + 1 < k && u >= cumulative(c)) ++c;
    z[static_cast<std::size_t>(i)] = c;
  }

  Rng edge_rng(seed, streams::kEdges);
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n, n);
  const Eigen::MatrixXd& p = theta.values();
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      if (edge_rng.uniform() < p(z[i], z[j])) {
        a(i, j) = 1.0;
        a(j, i) = 1.0;
      }
    }
  }
  return SampledGraph{AdjacencyMatrix(std::move(a)), Labels(std::move(z), k)};
}

}  // namespace srgw
