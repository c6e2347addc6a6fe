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

#ifndef SRGW_METRICS_HPP_
#define SRGW_METRICS_HPP_

#include <string>
#include <vector>

#include "srgw/losses.hpp"
#include "srgw/sbm.hpp"

namespace srgw {

struct EvalReport {
  double ari = 0.0;
  int k_hat = 0;
  double theta_error = 0.0;
  double label_accuracy = 0.0;
  std::string notes;
};

// Adjusted Rand index from the contingency table. Pair counts are exact
// integers; only the final ratio is floating point. Can be negative.
double ari(const Labels& x, const Labels& y);

// Row argmax of the plan, lowest column index on ties.
Labels hard_labels(const TransportPlan& t);

// Number of columns whose mass exceeds mass_tol.
int selected_k(const TransportPlan& t, double mass_tol = 1e-6);

// Best-permutation accuracy between two labelings (confusion-matrix
// assignment).
double label_accuracy(const Labels& estimate, const Labels& truth);

// Frobenius distance between theta_hat and theta_star after aligning cluster
// labels. Clusters that no node of labels_hat uses are dropped from theta_hat
// first; the smaller matrix is then zero padded to the larger size. Alignment
// is exhaustive over permutations up to 8 clusters, otherwise the permutation
// maximizing the trace of the label confusion matrix is used.
double theta_recovery_error(const ConnectivityMatrix& theta_hat,
                            const ConnectivityMatrix& theta_star, const Labels& labels_hat,
                            const Labels& labels_star);

// Same, but forces the confusion-matrix alignment regardless of K.
double theta_recovery_error_by_confusion(const ConnectivityMatrix& theta_hat,
                                         const ConnectivityMatrix& theta_star,
                                         const Labels& labels_hat, const Labels& labels_star);

// Minimum-cost perfect assignment on a square cost matrix (Hungarian method).
// Returns assignment[row] = column.
std::vector<int> solve_assignment(const Eigen::MatrixXd& cost);

EvalReport evaluate(const TransportPlan& t, const ConnectivityMatrix& theta_hat,
                    const Labels& truth, const ConnectivityMatrix& theta_star,
                    double mass_tol = 1e-6);

}  // namespace srgw

#endif  // SRGW_METRICS_HPP_
