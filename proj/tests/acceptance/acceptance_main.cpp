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

// Acceptance gate. Prints one [PASS]/[FAIL] line per criterion and exits
// non-zero when any criterion fails. Thresholds and runtime budgets are fixed
// here and never adjusted to fit results.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "srgw/baselines.hpp"
#include "srgw/harness.hpp"
#include "srgw/init.hpp"
#include "srgw/losses.hpp"
#include "srgw/metrics.hpp"
#include "srgw/solver.hpp"
#include "srgw_tools/cli.hpp"

namespace {

using namespace srgw;
namespace fs = std::filesystem;

struct Outcome {
  bool pass = false;
  std::string detail;
};

struct Criterion {
  std::string id;
  std::string name;
  double budget_s;
  std::function<Outcome()> run;
};

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.3g", v);
  return buf;
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t m = v.size() / 2;
  return v.size() % 2 == 1 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

constexpr LossKind kAllKinds[] = {LossKind::kSquared, LossKind::kBernoulliNll, LossKind::kPoissonNll,
                                  LossKind::kExponentialNll};

AdjacencyMatrix graph_for(LossKind kind, Rng& rng, int n) {
  switch (kind) {
    case LossKind::kSquared:
      return oracle::random_weighted(rng, n, [](Rng& r) { return r.normal(); });
    case LossKind::kBernoulliNll:
      return oracle::random_graph(rng, n, 0.4);
    case LossKind::kPoissonNll:
      return oracle::random_weighted(rng, n, [](Rng& r) { return static_cast<double>(r.below(6)); });
    case LossKind::kExponentialNll:
      return oracle::random_weighted(rng, n, [](Rng& r) { return -std::log(1.0 - r.uniform()); });
  }
  return oracle::random_graph(rng, n, 0.5);
}

ConnectivityMatrix theta_for(LossKind kind, Rng& rng, int k) {
  switch (kind) {
    case LossKind::kSquared: return oracle::random_theta(rng, k, -1.0, 2.0);
    case LossKind::kBernoulliNll: return oracle::random_theta(rng, k, 0.05, 0.95);
    case LossKind::kPoissonNll: return oracle::random_theta(rng, k, 0.2, 4.0);
    case LossKind::kExponentialNll: return oracle::random_theta(rng, k, 0.2, 3.0);
  }
  return ConnectivityMatrix::constant(k, 0.5);
}

// 1. Frank-Wolfe restarted from every vertex reaches the enumerated optimum.
Outcome oracle_equivalence() {
  Rng rng(101, streams::kInstances);
  const CompositeLoss loss(LossKind::kBernoulliNll);
  int ok = 0;
  double worst = -std::numeric_limits<double>::infinity();
  for (int rep = 0; rep < 50; ++rep) {
    const int n = 4 + static_cast<int>(rng.below(5));
    const auto a = oracle::random_graph(rng, n, 0.5);
    const auto theta = oracle::random_theta(rng, 2, 0.05, 0.95);
    const VertexOracleResult ref = vertex_srgw_oracle(a, loss, theta);
    double best = std::numeric_limits<double>::infinity();
    oracle::for_each_assignment(n, 2, [&](const std::vector<int>& z) {
      const auto t = fw_solve(a, loss, theta, TransportPlan(oracle::hard_plan(z, 2)),
                              Eigen::MatrixXd::Zero(n, 2), SolverOptions{});
      best = std::min(best, srgw_objective(a, t, theta, loss));
    });
    const double gap = best - ref.value;
    worst = std::max(worst, gap);
    ok += gap <= 1e-9;
  }
  return {ok == 50, std::to_string(ok) + "/50 instances, worst gap " + fmt(worst)};
}

// 2. ELBO equals the entropic srGW form.
Outcome elbo_identity() {
  Rng rng(102, streams::kInstances);
  double worst = 0.0;
  for (int rep = 0; rep < 100; ++rep) {
    const int n = 2 + static_cast<int>(rng.below(29));
    const int k = 1 + static_cast<int>(rng.below(5));
    const auto a = oracle::random_graph(rng, n, 0.1 + 0.8 * rng.uniform());
    const auto theta = oracle::random_theta(rng, k, 0.02, 0.98);
    const Eigen::MatrixXd t = oracle::random_plan(rng, n, k);
    const Eigen::VectorXd q = t.colwise().sum().transpose();
    const double elbo = elbo_value(n * t, a, theta, Proportions(q / q.sum()));
    const double lp = srgw_objective(a, TransportPlan(t), theta, CompositeLoss(LossKind::kBernoulliNll));
    const double rhs = -0.5 * n * n * (lp - (2.0 / n) * (entropy(t) - entropy(q))) - n * std::log(n);
    worst = std::max(worst, std::abs(elbo - rhs) / (1.0 + std::abs(elbo)));
  }
  return {worst <= 1e-8, "max relative deviation " + fmt(worst) + " over 100 draws"};
}

// 3. -L_p(T_hat, theta) - log(K)/N <= sup_alpha log p / N^2.
Outcome lemma_sandwich() {
  Rng rng(103, streams::kInstances);
  const CompositeLoss loss(LossKind::kBernoulliNll);
  int ok = 0;
  double worst = -std::numeric_limits<double>::infinity();
  for (int rep = 0; rep < 50; ++rep) {
    const int n = 3 + static_cast<int>(rng.below(8));
    const auto a = oracle::random_graph(rng, n, 0.5);
    const auto theta = oracle::random_theta(rng, 2, 0.05, 0.95);
    const auto t = fw_solve(a, loss, theta, TransportPlan::uniform(n, 2), Eigen::MatrixXd::Zero(n, 2),
                            SolverOptions{});
    const double lhs = -srgw_objective(a, t, theta, loss) - std::log(2.0) / n;
    const double rhs = sup_alpha_log_likelihood(a, theta) / (static_cast<double>(n) * n);
    worst = std::max(worst, lhs - rhs);
    ok += lhs <= rhs + 1e-6;
  }
  return {ok == 50, std::to_string(ok) + "/50 instances, max lhs-rhs " + fmt(worst)};
}

// 4. Closed-form theta matches per-cell golden-section minimization.
Outcome theta_optimality() {
  Rng rng(104, streams::kInstances);
  double worst = 0.0;
  for (LossKind kind : kAllKinds) {
    const CompositeLoss loss(kind);
    for (int rep = 0; rep < 20; ++rep) {
      const int n = 5 + static_cast<int>(rng.below(6));
      const int k = 1 + static_cast<int>(rng.below(3));
      const auto a = graph_for(kind, rng, n);
      const Eigen::MatrixXd t = oracle::random_plan(rng, n, k);
      const auto est = theta_closed_form(a, TransportPlan(t), loss);
      for (int p = 0; p < k; ++p) {
        for (int q = p; q < k; ++q) {
          auto f = [&](double x) {
            Eigen::MatrixXd th = est.theta.values();
            th(p, q) = th(q, p) = x;
            return oracle::objective(kind, a.entries(), t, th);
          };
          const double lo = kind == LossKind::kSquared ? -10.0 : loss.clamp_lo();
          const double hi = kind == LossKind::kSquared ? 10.0 : std::min(loss.clamp_hi(), 100.0);
          const double best = oracle::golden_section(f, lo, hi);
          worst = std::max(worst, std::abs(est.theta(p, q) - best) / std::max(1.0, std::abs(best)));
        }
      }
    }
  }
  return {worst <= 1e-6, "max deviation " + fmt(worst) + " over 4 kinds x 20 instances"};
}

// 5. 2 * cost_application against central differences of the objective.
Outcome gradient_check() {
  Rng rng(105, streams::kInstances);
  double worst = 0.0;
  for (LossKind kind : kAllKinds) {
    for (int rep = 0; rep < 5; ++rep) {
      const int n = 3 + static_cast<int>(rng.below(10));
      const int k = 1 + static_cast<int>(rng.below(4));
      const auto a = graph_for(kind, rng, n);
      const auto theta = theta_for(kind, rng, k);
      const Eigen::MatrixXd t = oracle::random_plan(rng, n, k);
      const Eigen::MatrixXd grad = 2.0 * cost_application(a, TransportPlan(t), theta, CompositeLoss(kind));
      const double h = 1e-5;
      for (int i = 0; i < n; ++i) {
        for (int c = 0; c < k; ++c) {
          Eigen::MatrixXd up = t, down = t;
          up(i, c) += h;
          down(i, c) -= h;
          const double fd = (oracle::objective(kind, a.entries(), up, theta.values()) -
                             oracle::objective(kind, a.entries(), down, theta.values())) /
                            (2.0 * h);
          worst = std::max(worst, std::abs(grad(i, c) - fd) / std::max(1.0, std::abs(fd)));
        }
      }
    }
  }
  return {worst <= 1e-5, "max relative error " + fmt(worst)};
}

// 6. Penalized objective never increases along bcd_fit.
Outcome descent_monotonicity() {
  const Scenario scenarios[] = {Scenario::kAssortative, Scenario::kHub, Scenario::kDisassortative};
  double worst = -std::numeric_limits<double>::infinity();
  int runs = 0;
  for (int rep = 0; rep < 20; ++rep) {
    const Scenario s = scenarios[rep % 3];
    const int n = 100 + 20 * (rep % 5);
    const int k = 6;
    const auto g = sample_graph(build_scenario(s, 3, 0.25, 0.04), Proportions::uniform(3), n, 600 + rep);
    SolverOptions opts;
    opts.lambda = rep % 4 == 0 ? 0.0 : k / (2.0 * n) * (rep % 4);
    const LossKind kind = rep % 2 == 0 ? LossKind::kBernoulliNll : LossKind::kSquared;
    const auto fit = bcd_fit(g.adjacency, CompositeLoss(kind), spectral_init(g.adjacency, k, rep), opts);
    for (std::size_t i = 1; i < fit.loss_history.size(); ++i) {
      worst = std::max(worst, fit.loss_history[i] - fit.loss_history[i - 1]);
    }
    ++runs;
  }
  return {worst <= 1e-10, std::to_string(runs) + " runs, largest increase " + fmt(worst)};
}

ExperimentConfig desk_config() {
  ExperimentConfig c;
  c.scenario = Scenario::kAssortative;
  c.n = 600;
  c.k_true = 3;
  c.k_search = 10;
  c.p_out = 0.03;
  c.p_in_grid = {0.2};
  c.method = Method::kSrgwNll;
  c.loss = LossKind::kBernoulliNll;
  return c;
}

// 7. Partitioning quality at desk and large scale.
Outcome partitioning() {
  const auto desk = desk_config();
  double desk_ari = 0.0;
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    desk_ari += run_single(desk, 0.2, desk.resolved_lambda(), seed).ari / 5.0;
  }
  ExperimentConfig large = desk;
  large.n = 1000;
  large.k_true = 5;
  large.k_search = 20;
  double large_ari = 0.0;
  int exact_k = 0;
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const auto row = run_single(large, 0.2, large.resolved_lambda(), seed);
    large_ari += row.ari / 5.0;
    exact_k += row.k_hat == 5;
  }
  const bool pass = desk_ari >= 0.95 && large_ari >= 0.9 && exact_k >= 3;
  return {pass, "desk mean ARI " + fmt(desk_ari) + " (need >= 0.95); large mean ARI " + fmt(large_ari) +
                    " (need >= 0.9), k_hat = 5 in " + std::to_string(exact_k) + "/5 (need >= 3)"};
}

// 8. k_hat plateau over lambda.
Outcome model_selection_plateau() {
  const auto c = desk_config();
  const double n = c.n;
  const double k = c.k_search;
  std::ostringstream detail;
  bool pass = true;
  for (double lambda : {k / (4.0 * n), k / (2.0 * n), k / n}) {
    int hits = 0;
    for (std::uint64_t seed = 0; seed < 5; ++seed) hits += run_single(c, 0.2, lambda, seed).k_hat == c.k_true;
    pass = pass && hits >= 4;
    detail << "lambda " << fmt(lambda) << ": " << hits << "/5; ";
  }
  int full = 0, single = 0;
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    full += run_single(c, 0.2, 0.0, seed).k_hat == c.k_search;
    single += run_single(c, 0.2, 10.0, seed).k_hat == 1;
  }
  pass = pass && full == 5 && single == 5;
  detail << "lambda 0 -> K_search " << full << "/5; lambda 10 -> 1 " << single << "/5";
  return {pass, detail.str()};
}

// 9. Consistency ladder.
Outcome consistency_trends() {
  ExperimentConfig c = desk_config();
  c.k_true = 3;
  c.k_search = 3;
  c.lambda = 0.0;
  std::vector<double> plan_medians, theta_medians;
  for (int n : {100, 400, 1600}) {
    std::vector<double> plan, theta;
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
      const auto row = run_consistency_single(c, n, seed);
      plan.push_back(row.plan_l1_error);
      theta.push_back(row.theta_error);
    }
    plan_medians.push_back(median(plan));
    theta_medians.push_back(median(theta));
  }
  const bool pass = plan_medians[1] < plan_medians[0] && plan_medians[2] < plan_medians[1] &&
                    theta_medians[1] < theta_medians[0] && theta_medians[2] < theta_medians[1];
  return {pass, "plan L1 medians " + fmt(plan_medians[0]) + ", " + fmt(plan_medians[1]) + ", " +
                    fmt(plan_medians[2]) + "; theta medians " + fmt(theta_medians[0]) + ", " +
                    fmt(theta_medians[1]) + ", " + fmt(theta_medians[2]) + " (need strictly decreasing)"};
}

// 10. ARI unit vectors.
Outcome metric_correctness() {
  const Labels x({0, 0, 1, 1, 2, 2}, 3);
  const bool identical = ari(x, x) == 1.0;
  const double crossed = ari(Labels({0, 0, 1, 1}, 2), Labels({0, 1, 0, 1}, 2));
  Rng rng(110, streams::kInstances);
  int invariant = 0;
  for (int rep = 0; rep < 100; ++rep) {
    const int n = 2 + static_cast<int>(rng.below(50));
    const int k = 1 + static_cast<int>(rng.below(6));
    std::vector<int> a(n), b(n), perm(k);
    for (int i = 0; i < n; ++i) {
      a[i] = static_cast<int>(rng.below(k));
      b[i] = static_cast<int>(rng.below(k));
    }
    std::iota(perm.begin(), perm.end(), 0);
    for (int i = k - 1; i > 0; --i) std::swap(perm[i], perm[rng.below(i + 1)]);
    std::vector<int> ap(n);
    for (int i = 0; i < n; ++i) ap[i] = perm[a[i]];
    const double base = ari(Labels(a, k), Labels(b, k));
    invariant += base == ari(Labels(ap, k), Labels(b, k)) && std::abs(base - oracle::ari_by_pairs(a, b)) < 1e-12;
  }
  const bool pass = identical && crossed == -0.5 && invariant == 100;
  return {pass, std::string("identical -> ") + (identical ? "1" : "not 1") + "; crossed -> " + fmt(crossed) +
                    "; invariant " + std::to_string(invariant) + "/100"};
}

// 11. f(K) with lambda = 0 is non-increasing in K.
Outcome fk_monotonicity() {
  const CompositeLoss loss(LossKind::kBernoulliNll);
  int monotone = 0;
  std::ostringstream detail;
  for (std::uint64_t g = 0; g < 5; ++g) {
    const auto graph = sample_graph(build_scenario(Scenario::kAssortative, 3, 0.3, 0.05),
                                    Proportions::uniform(3), 120, 1100 + g);
    std::vector<double> f;
    for (int k = 2; k <= 5; ++k) {
      double best = std::numeric_limits<double>::infinity();
      for (std::uint64_t r = 0; r < 10; ++r) {
        const auto fit = bcd_fit(graph.adjacency, loss, spectral_init(graph.adjacency, k, r), SolverOptions{});
        best = std::min(best, fit.loss_history.back());
      }
      f.push_back(best);
    }
    bool ok = true;
    for (std::size_t i = 1; i < f.size(); ++i) ok = ok && f[i] <= f[i - 1];
    monotone += ok;
    if (!ok) detail << "graph " << g << " violates; ";
  }
  detail << monotone << "/5 graphs monotone over K = 2..5";
  return {monotone == 5, detail.str()};
}

// 12. Byte-identical reruns.
Outcome determinism() {
  std::ostringstream s1, s2, err;
  const int c1 = tools::cli_dispatch({"selftest"}, s1, err);
  const int c2 = tools::cli_dispatch({"selftest"}, s2, err);
  const bool selftest_same = c1 == 0 && c2 == 0 && s1.str() == s2.str();

  const fs::path dir = fs::temp_directory_path() / "srgw_acceptance_determinism";
  fs::remove_all(dir);
  fs::create_directories(dir);
  std::string csv[2];
  bool sweep_ok = true;
  for (int run = 0; run < 2; ++run) {
    const fs::path out = dir / ("run" + std::to_string(run) + ".csv");
    const fs::path cfg = dir / ("cfg" + std::to_string(run) + ".json");
    {
      std::ofstream f(cfg);
      f << R"({"scenario": "hub", "n": 200, "k_true": 3, "k_search": 6, "p_out": 0.03, "p_in_grid": [0.2],
               "seeds": [0, 1, 2, 3, 4], "output_path": ")"
        << out.string() << "\"}";
    }
    std::ostringstream o;
    sweep_ok = sweep_ok && tools::cli_dispatch({"experiment", "ari-sweep", "--config", cfg.string()}, o, err) == 0;
    std::ifstream in(out);
    std::stringstream content;
    content << in.rdbuf();
    csv[run] = strip_runtime_column(content.str());
  }
  fs::remove_all(dir);
  const bool sweep_same = sweep_ok && !csv[0].empty() && csv[0] == csv[1];
  return {selftest_same && sweep_same, std::string("selftest ") + (selftest_same ? "identical" : "differs") +
                                           "; sweep cell " + (sweep_same ? "identical" : "differs")};
}

}  // namespace

int main() {
  const std::vector<Criterion> criteria{
      {"AC1", "oracle equivalence", 120, oracle_equivalence},
      {"AC2", "ELBO identity", 10, elbo_identity},
      {"AC3", "one-sided likelihood sandwich", 300, lemma_sandwich},
      {"AC4", "closed-form theta optimality", 60, theta_optimality},
      {"AC5", "gradient check", 60, gradient_check},
      {"AC6", "descent monotonicity", 300, descent_monotonicity},
      {"AC7", "partitioning at desk and large scale", 900, partitioning},
      {"AC8", "model-selection plateau", 1200, model_selection_plateau},
      {"AC9", "consistency trends", 1200, consistency_trends},
      {"AC10", "metric correctness", 5, metric_correctness},
      {"AC11", "f(K) monotonicity", 600, fk_monotonicity},
      {"AC12", "determinism", 120, determinism},
  };
  int failed = 0;
  for (const auto& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome outcome;
    try {
      outcome = c.run();
    } catch (const std::exception& e) {
      outcome = {false, std::string("exception: ") + e.what()};
    }
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const bool in_time = seconds < c.budget_s;
    const bool pass = outcome.pass && in_time;
    failed += !pass;
    std::cout << (pass ? "[PASS] " : "[FAIL] ") << c.id << " " << c.name << ": " << outcome.detail << " ("
              << fmt(seconds) << " s" << (in_time ? "" : ", over budget " + fmt(c.budget_s) + " s") << ")"
              << std::endl;
  }
  std::cout << (criteria.size() - failed) << "/" << criteria.size() << " criteria passed" << std::endl;
  return failed == 0 ? 0 : 1;
}
