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

#ifndef SRGW_HARNESS_HPP_
#define SRGW_HARNESS_HPP_

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "srgw/losses.hpp"
#include "srgw/sbm.hpp"
#include "srgw/solver.hpp"

namespace srgw {

enum class Method { kSrgwNll, kSrgwL2, kVem, kSpectralOnly };
enum class ProportionsKind { kBalanced, kInverseSquare };

Method parse_method(std::string_view name);
std::string_view to_string(Method method);
ProportionsKind parse_proportions(std::string_view name);
std::string_view to_string(ProportionsKind kind);

inline constexpr int kCsvSchemaVersion = 1;

struct ExperimentConfig {
  Scenario scenario = Scenario::kAssortative;
  int n = 1000;
  int k_true = 5;
  int k_search = 20;
  double p_out = 0.03;
  std::vector<double> p_in_grid;
  // Unset means "auto": k_search / (2 n).
  std::optional<double> lambda;
  std::vector<double> lambda_grid;
  std::vector<std::uint64_t> seeds{0, 1, 2, 3, 4};
  LossKind loss = LossKind::kBernoulliNll;
  Method method = Method::kSrgwNll;
  ProportionsKind proportions = ProportionsKind::kBalanced;
  std::string output_path;
  // Node counts for the consistency ladder.
  std::vector<int> n_grid;
  SolverOptions solver;
  int vem_max_iters = 100;
  double vem_tol = 1e-8;

  double resolved_lambda() const;
  double resolved_lambda(int n_nodes) const;
  void validate() const;
};

// JSON schema documented in the README. Unknown keys are rejected.
ExperimentConfig parse_config(std::string_view json_text);
ExperimentConfig load_config(const std::filesystem::path& path);
std::string config_to_json(const ExperimentConfig& config);

struct ResultRow {
  std::string scenario;
  std::string method;
  int n = 0;
  int k_true = 0;
  int k_search = 0;
  double p_in = 0.0;
  double p_out = 0.0;
  double lambda = 0.0;
  std::uint64_t seed = 0;
  double ari = 0.0;
  int k_hat = 0;
  double theta_error = 0.0;
  double final_loss = 0.0;
  double runtime_ms = 0.0;
  // Column masses of the final plan; persisted next to the CSV for audits.
  std::vector<double> column_masses;
};

struct ConsistencyRow {
  std::string scenario;
  int n = 0;
  int k_true = 0;
  double p_in = 0.0;
  double p_out = 0.0;
  std::uint64_t seed = 0;
  // min over column permutations of ||T_hat - Z / N||_1, theta fixed to truth.
  double plan_l1_error = 0.0;
  // Aligned ||theta_hat - theta_star||_F from a full block-coordinate fit.
  double theta_error = 0.0;
  double ari = 0.0;
  double runtime_ms = 0.0;
};

std::string result_csv_header();
std::string to_csv_line(const ResultRow& row);
std::string consistency_csv_header();
std::string to_csv_line(const ConsistencyRow& row);

// One (p_in, lambda, seed) cell: sample, initialize spectrally, fit, evaluate.
ResultRow run_single(const ExperimentConfig& config, double p_in, double lambda,
                     std::uint64_t seed);
ConsistencyRow run_consistency_single(const ExperimentConfig& config, int n, std::uint64_t seed);

struct SweepOptions {
  int jobs = 1;
  // Log one line per finished cell.
  std::ostream* progress = nullptr;
};

// Every sweep groups rows into cells (one p_in value, or one (p_in, lambda)
// pair; for consistency one N). Each finished cell is written atomically under
// "<output_path>.cells/", existing cell files are reused so an interrupted run
// resumes, and the final CSV is assembled in cell order. Without an
// output_path nothing is written.
std::vector<ResultRow> run_ari_sweep(const ExperimentConfig& config, const SweepOptions& opts = {});
std::vector<ResultRow> run_lambda_sweep(const ExperimentConfig& config,
                                        const SweepOptions& opts = {});
std::vector<ConsistencyRow> run_consistency(const ExperimentConfig& config,
                                            const SweepOptions& opts = {});

// Drops the runtime_ms column (and comment lines are kept) so two runs can be
// compared byte for byte.
std::string strip_runtime_column(std::string_view csv);

struct AuditReport {
  int audited = 0;
  int mismatches = 0;
};

// Re-derives k_hat from the persisted column masses for a deterministic ~10%
// sample of rows (at least one) and counts disagreements.
AuditReport audit_k_hat(const std::filesystem::path& output_path, double mass_tol = 1e-6,
                        double fraction = 0.1);

// Worker count: SRGW_SBM_JOBS when set, otherwise the given default.
int resolve_jobs(int requested);

// Fast invariant checks with fixed seeds. Prints one line per check; output
// does not depend on timing. Returns true when every check passes.
bool run_selftest(std::ostream& out);

}  // namespace srgw

#endif  // SRGW_HARNESS_HPP_
