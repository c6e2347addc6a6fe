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

#include "srgw_tools/cli.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <functional>
#include <fstream>
#include <iostream>
#include <limits>
#include <optional>
#include <sstream>
#include <stdexcept>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "srgw/baselines.hpp"
#include "srgw/error.hpp"
#include "srgw/graph_io.hpp"
#include "srgw/harness.hpp"
#include "srgw/init.hpp"
#include "srgw/losses.hpp"
#include "srgw/metrics.hpp"
#include "srgw/random.hpp"
#include "srgw/solver.hpp"

namespace srgw::tools {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

struct SampleArgs {
  std::string scenario = "assortative";
  int n = 100;
  int k = 3;
  double p_in = 0.2;
  double p_out = 0.03;
  std::uint64_t seed = 0;
  std::string proportions = "balanced";
  std::string out;
  std::string labels_out;
};

struct FitArgs {
  std::string graph;
  int k = 20;
  std::string loss = "bernoulli_nll";
  std::string lambda = "auto";
  std::uint64_t seed = 0;
  std::string out_dir = ".";
};

struct OracleArgs {
  int n = 6;
  int k = 2;
  std::uint64_t seed = 0;
  std::string loss = "bernoulli_nll";
};

struct ExperimentArgs {
  std::string config;
  int jobs = 1;
};

std::string render(const std::function<void(std::ostream&)>& fill) {
  std::ostringstream s;
  fill(s);
  return s.str();
}

int run_sample(const SampleArgs& args, std::ostream& out) {
  const Scenario scenario = parse_scenario(args.scenario);
  const ProportionsKind kind = parse_proportions(args.proportions);
  const ConnectivityMatrix theta = build_scenario(scenario, args.k, args.p_in, args.p_out);
  const Proportions alpha =
      kind == ProportionsKind::kBalanced ? Proportions::uniform(args.k) : unbalanced_proportions(args.k);
  const SampledGraph graph = sample_graph(theta, alpha, args.n, args.seed);
  const std::string edges = render([&](std::ostream& s) { io::write_edge_list(s, graph.adjacency); });
  if (args.out.empty()) {
    out << edges;
  } else {
    io::write_file_atomic(args.out, edges);
  }
  if (!args.labels_out.empty()) {
    io::write_file_atomic(args.labels_out,
                          render([&](std::ostream& s) { io::write_labels(s, graph.labels); }));
  }
  return kExitOk;
}

json matrix_json(const Eigen::MatrixXd& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    std::vector<double> row(static_cast<std::size_t>(m.cols()));
    for (Eigen::Index j = 0; j < m.cols(); ++j) row[static_cast<std::size_t>(j)] = m(i, j);
    rows.push_back(row);
  }
  return rows;
}

int run_fit(const FitArgs& args, std::ostream& out) {
  const AdjacencyMatrix a = io::load_edge_list(args.graph);
  if (args.k < 1 || args.k > a.n()) throw ValidationError("--k must lie in [1, N]");
  const LossKind kind = parse_loss_kind(args.loss);
  SolverOptions opts;
  if (args.lambda == "auto") {
    opts.lambda = static_cast<double>(args.k) / (2.0 * a.n());
  } else {
    std::size_t used = 0;
    try {
      opts.lambda = std::stod(args.lambda, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != args.lambda.size() || !(opts.lambda >= 0.0) || !std::isfinite(opts.lambda)) {
      throw ValidationError("--lambda must be 'auto' or a nonnegative number");
    }
  }
  opts.validate();

  const TransportPlan t0 = spectral_init(a, args.k, args.seed);
  const FitResult fit = bcd_fit(a, make_loss(kind), t0, opts);

  const fs::path dir = args.out_dir;
  fs::create_directories(dir);
  io::write_file_atomic(dir / "labels.csv",
                        render([&](std::ostream& s) { io::write_labels(s, fit.labels); }));
  io::write_file_atomic(dir / "theta.csv", render([&](std::ostream& s) {
                          io::write_csv_matrix(s, fit.theta_hat.values());
                        }));
  const Eigen::VectorXd masses = fit.t_hat.column_masses();
  json report{{"config",
               {{"graph", args.graph},
                {"k", args.k},
                {"loss", args.loss},
                {"lambda", opts.lambda},
                {"lambda_arg", args.lambda},
                {"seed", args.seed},
                {"n", a.n()}}},
              {"k_hat", fit.k_hat},
              {"loss_history", fit.loss_history},
              {"runtime_ms", fit.runtime_ms},
              {"degenerate_theta", fit.degenerate_theta},
              {"labels", fit.labels.values()},
              {"theta_hat", matrix_json(fit.theta_hat.values())},
              {"column_masses", std::vector<double>(masses.data(), masses.data() + masses.size())},
              {"t_hat", matrix_json(fit.t_hat.entries())}};
  io::write_file_atomic(dir / "report.json", report.dump(2) + "\n");
  out << "k_hat=" << fit.k_hat << " final_loss=" << io::format_double(fit.loss_history.back())
      << " lambda=" << io::format_double(opts.lambda) << '\n';
  return kExitOk;
}

TransportPlan vertex_plan(std::uint64_t code, int n, int k) {
  Eigen::MatrixXd t = Eigen::MatrixXd::Zero(n, k);
  for (int i = n - 1; i >= 0; --i) {
    t(i, static_cast<int>(code % static_cast<std::uint64_t>(k))) = 1.0 / n;
    code /= static_cast<std::uint64_t>(k);
  }
  return TransportPlan(std::move(t));
}

int run_oracle(const OracleArgs& args, std::ostream& out) {
  if (args.n < 2 || args.k < 1) throw ValidationError("oracle needs n >= 2 and k >= 1");
  if (std::pow(static_cast<double>(args.k), args.n) > 1e5) {
    throw ValidationError("oracle restarts from every vertex; keep k^n <= 1e5");
  }
  const CompositeLoss loss = make_loss(parse_loss_kind(args.loss));
  Rng rng(args.seed, streams::kInstances);
  std::vector<std::pair<int, int>> edges;
  for (int i = 0; i < args.n; ++i) {
    for (int j = i + 1; j < args.n; ++j) {
      if (rng.uniform() < 0.5) edges.emplace_back(i, j);
    }
  }
  const AdjacencyMatrix a = AdjacencyMatrix::from_edges(args.n, edges);
  Eigen::MatrixXd values(args.k, args.k);
  for (int p = 0; p < args.k; ++p) {
    for (int q = p; q < args.k; ++q) values(p, q) = values(q, p) = 0.05 + 0.9 * rng.uniform();
  }
  const ConnectivityMatrix theta(values);

  const VertexOracleResult oracle = vertex_srgw_oracle(a, loss, theta);
  const Eigen::MatrixXd zero = Eigen::MatrixXd::Zero(args.n, args.k);
  const SolverOptions opts;
  const auto vertices = static_cast<std::uint64_t>(std::llround(std::pow(args.k, args.n)));
  double best = std::numeric_limits<double>::infinity();
  for (std::uint64_t code = 0; code < vertices; ++code) {
    const TransportPlan t = fw_solve(a, loss, theta, vertex_plan(code, args.n, args.k), zero, opts);
    best = std::min(best, srgw_objective(a, t, theta, loss));
  }
  const double gap = best - oracle.value;
  out << "oracle=" << io::format_double(oracle.value) << " fw_best=" << io::format_double(best)
      << " gap=" << io::format_double(gap) << (gap <= 1e-9 ? " ok" : " MISMATCH") << '\n';
  return gap <= 1e-9 ? kExitOk : kExitRuntime;
}

int run_experiment(const std::string& kind, const ExperimentArgs& args, std::ostream& out,
                   std::ostream& err) {
  const ExperimentConfig config = load_config(args.config);
  SweepOptions sweep;
  sweep.jobs = resolve_jobs(args.jobs);
  sweep.progress = &err;
  std::size_t rows = 0;
  if (kind == "ari-sweep") {
    rows = run_ari_sweep(config, sweep).size();
  } else if (kind == "lambda-sweep") {
    rows = run_lambda_sweep(config, sweep).size();
  } else {
    rows = run_consistency(config, sweep).size();
  }
  out << kind << ": " << rows << " rows";
  if (!config.output_path.empty()) out << " -> " << config.output_path;
  out << '\n';
  return kExitOk;
}

}  // namespace

int cli_dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Semi-relaxed Gromov-Wasserstein inference for stochastic block models",
               "srgw-sbm"};
  app.require_subcommand(1);

  SampleArgs sample_args;
  CLI::App* sample = app.add_subcommand("sample", "Sample an SBM graph as an edge list");
  sample->add_option("--scenario", sample_args.scenario, "assortative|hub|disassortative");
  sample->add_option("--n", sample_args.n, "Number of nodes");
  sample->add_option("--k", sample_args.k, "Number of clusters");
  sample->add_option("--p-in", sample_args.p_in, "Within-cluster probability");
  sample->add_option("--p-out", sample_args.p_out, "Between-cluster probability");
  sample->add_option("--seed", sample_args.seed, "Seed");
  sample->add_option("--proportions", sample_args.proportions, "balanced|inverse_square");
  sample->add_option("--out", sample_args.out, "Edge-list path (stdout when omitted)");
  sample->add_option("--labels-out", sample_args.labels_out, "Label file path");

  FitArgs fit_args;
  CLI::App* fit = app.add_subcommand("fit", "Fit labels and connectivity to an edge list");
  fit->add_option("--graph", fit_args.graph, "Edge-list path")->required();
  fit->add_option("--k", fit_args.k, "Maximum number of clusters");
  fit->add_option("--loss", fit_args.loss, "squared|bernoulli_nll|poisson_nll|exponential_nll");
  fit->add_option("--lambda", fit_args.lambda, "Penalty weight or 'auto' (K/2N)");
  fit->add_option("--seed", fit_args.seed, "Seed for the spectral initialization");
  fit->add_option("--out-dir", fit_args.out_dir, "Directory for labels.csv, theta.csv, report.json");

  OracleArgs oracle_args;
  CLI::App* oracle = app.add_subcommand("oracle", "Compare Frank-Wolfe against vertex enumeration");
  oracle->add_option("--n", oracle_args.n, "Number of nodes");
  oracle->add_option("--k", oracle_args.k, "Number of clusters");
  oracle->add_option("--seed", oracle_args.seed, "Seed");
  oracle->add_option("--loss", oracle_args.loss, "Loss kind");

  ExperimentArgs exp_args;
  std::string exp_kind;
  CLI::App* experiment = app.add_subcommand("experiment", "Run a sweep from a JSON config");
  experiment->add_option("kind", exp_kind, "ari-sweep|lambda-sweep|consistency")
      ->required()
      ->check(CLI::IsMember({"ari-sweep", "lambda-sweep", "consistency"}));
  experiment->add_option("--config", exp_args.config, "Config path")->required();
  experiment->add_option("--jobs", exp_args.jobs, "Worker count (SRGW_SBM_JOBS overrides)");

  CLI::App* selftest = app.add_subcommand("selftest", "Run the invariant checks");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << e.what() << "\n\n" << app.help();
    return kExitValidation;
  }

  try {
    if (*sample) return run_sample(sample_args, out);
    if (*fit) return run_fit(fit_args, out);
    if (*oracle) return run_oracle(oracle_args, out);
    if (*experiment) return run_experiment(exp_kind, exp_args, out, err);
    if (*selftest) return run_selftest(out) ? kExitOk : kExitRuntime;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << '\n';
    return kExitValidation;
  } catch (const std::length_error& e) {
    err << "error: " << e.what() << '\n';
    return kExitValidation;
  } catch (const std::exception& e) {
    err << "failure: " << e.what() << '\n';
    return kExitRuntime;
  }
  err << app.help();
  return kExitValidation;
}

}  // namespace srgw::tools
