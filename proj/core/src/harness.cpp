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

#include "srgw/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <fstream>
#include <limits>
#include <mutex>
#include <numeric>
#include <ostream>
#include <sstream>
#include <thread>

#include <nlohmann/json.hpp>

#include "srgw/baselines.hpp"
#include "srgw/error.hpp"
#include "srgw/graph_io.hpp"
#include "srgw/init.hpp"
#include "srgw/metrics.hpp"
#include "srgw/random.hpp"

namespace srgw {
namespace {

using nlohmann::json;
namespace fs = std::filesystem;

double elapsed_ms(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start)
      .count();
}

Proportions make_proportions(ProportionsKind kind, int k) {
  return kind == ProportionsKind::kBalanced ? Proportions::uniform(k) : unbalanced_proportions(k);
}

LossKind implied_loss(Method method) {
  return method == Method::kSrgwL2 ? LossKind::kSquared : LossKind::kBernoulliNll;
}

// Field readers that name the offending key in their errors.
template <typename T>
T read(const json& j, const char* key) {
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ValidationError(std::string("config field '") + key + "': " + e.what());
  }
}

json solver_to_json(const SolverOptions& s) {
  return json{{"fw_max_iters", s.fw_max_iters}, {"fw_rel_tol", s.fw_rel_tol},
              {"mm_max_iters", s.mm_max_iters}, {"mm_rel_tol", s.mm_rel_tol},
              {"bcd_max_iters", s.bcd_max_iters}, {"bcd_rel_tol", s.bcd_rel_tol},
              {"mass_floor", s.mass_floor},       {"active_mass_tol", s.active_mass_tol}};
}

SolverOptions solver_from_json(const json& j, SolverOptions s) {
  for (const auto& [key, value] : j.items()) {
    if (key == "fw_max_iters") s.fw_max_iters = read<int>(j, "fw_max_iters");
    else if (key == "fw_rel_tol") s.fw_rel_tol = read<double>(j, "fw_rel_tol");
    else if (key == "mm_max_iters") s.mm_max_iters = read<int>(j, "mm_max_iters");
    else if (key == "mm_rel_tol") s.mm_rel_tol = read<double>(j, "mm_rel_tol");
    else if (key == "bcd_max_iters") s.bcd_max_iters = read<int>(j, "bcd_max_iters");
    else if (key == "bcd_rel_tol") s.bcd_rel_tol = read<double>(j, "bcd_rel_tol");
    else if (key == "mass_floor") s.mass_floor = read<double>(j, "mass_floor");
    else if (key == "active_mass_tol") s.active_mass_tol = read<double>(j, "active_mass_tol");
    else throw ValidationError("unknown solver option '" + key + "'");
  }
  return s;
}

json row_to_json(const ResultRow& r) {
  return json{{"scenario", r.scenario}, {"method", r.method},       {"n", r.n},
              {"k_true", r.k_true},     {"k_search", r.k_search},   {"p_in", r.p_in},
              {"p_out", r.p_out},       {"lambda", r.lambda},       {"seed", r.seed},
              {"ari", r.ari},           {"k_hat", r.k_hat},         {"theta_error", r.theta_error},
              {"final_loss", r.final_loss}, {"runtime_ms", r.runtime_ms},
              {"column_masses", r.column_masses}};
}

ResultRow row_from_json(const json& j) {
  ResultRow r;
  r.scenario = j.at("scenario").get<std::string>();
  r.method = j.at("method").get<std::string>();
  r.n = j.at("n").get<int>();
  r.k_true = j.at("k_true").get<int>();
  r.k_search = j.at("k_search").get<int>();
  r.p_in = j.at("p_in").get<double>();
  r.p_out = j.at("p_out").get<double>();
  r.lambda = j.at("lambda").get<double>();
  r.seed = j.at("seed").get<std::uint64_t>();
  r.ari = j.at("ari").get<double>();
  r.k_hat = j.at("k_hat").get<int>();
  r.theta_error = j.at("theta_error").get<double>();
  r.final_loss = j.at("final_loss").get<double>();
  r.runtime_ms = j.at("runtime_ms").get<double>();
  r.column_masses = j.at("column_masses").get<std::vector<double>>();
  return r;
}

json row_to_json(const ConsistencyRow& r) {
  return json{{"scenario", r.scenario},   {"n", r.n},
              {"k_true", r.k_true},       {"p_in", r.p_in},
              {"p_out", r.p_out},         {"seed", r.seed},
              {"plan_l1_error", r.plan_l1_error}, {"theta_error", r.theta_error},
              {"ari", r.ari},             {"runtime_ms", r.runtime_ms}};
}

ConsistencyRow consistency_from_json(const json& j) {
  ConsistencyRow r;
  r.scenario = j.at("scenario").get<std::string>();
  r.n = j.at("n").get<int>();
  r.k_true = j.at("k_true").get<int>();
  r.p_in = j.at("p_in").get<double>();
  r.p_out = j.at("p_out").get<double>();
  r.seed = j.at("seed").get<std::uint64_t>();
  r.plan_l1_error = j.at("plan_l1_error").get<double>();
  r.theta_error = j.at("theta_error").get<double>();
  r.ari = j.at("ari").get<double>();
  r.runtime_ms = j.at("runtime_ms").get<double>();
  return r;
}

// Runs cells 0..count-1 on a bounded pool, reusing finished cell files under
// cell_dir. Results come back in cell order regardless of completion order.
template <typename Row, typename RunCell, typename ToJson, typename FromJson>
std::vector<std::vector<Row>> run_cells(std::size_t count, const fs::path& cell_dir,
                                        const SweepOptions& opts, RunCell run_cell,
                                        ToJson to_json, FromJson from_json) {
  std::vector<std::vector<Row>> results(count);
  std::vector<bool> done(count, false);
  if (!cell_dir.empty()) {
    for (std::size_t c = 0; c < count; ++c) {
      const fs::path file = cell_dir / ("cell_" + std::to_string(c) + ".json");
      if (!fs::exists(file)) continue;
      std::ifstream in(file);
      const json rows = json::parse(in);
      for (const auto& r : rows) results[c].push_back(from_json(r));
      done[c] = true;
    }
  }

  std::atomic<std::size_t> next{0};
  std::mutex log_mutex;
  std::exception_ptr failure;
  auto worker = [&]() {
    for (;;) {
      const std::size_t c = next.fetch_add(1);
      if (c >= count) return;
      if (done[c]) continue;
      try {
        std::vector<Row> rows = run_cell(c);
        if (!cell_dir.empty()) {
          json arr = json::array();
          for (const auto& r : rows) arr.push_back(to_json(r));
          io::write_file_atomic(cell_dir / ("cell_" + std::to_string(c) + ".json"), arr.dump() + "\n");
        }
        results[c] = std::move(rows);
        if (opts.progress != nullptr) {
          std::lock_guard<std::mutex> lock(log_mutex);
          *opts.progress << "cell " << c + 1 << "/" << count << " done\n";
        }
      } catch (...) {
        std::lock_guard<std::mutex> lock(log_mutex);
        if (!failure) failure = std::current_exception();
        next.store(count);
      }
    }
  };
  const int jobs = std::max(1, std::min<int>(opts.jobs, static_cast<int>(count)));
  if (jobs == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < jobs; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  if (failure) std::rethrow_exception(failure);
  return results;
}

fs::path prepare_cell_dir(const ExperimentConfig& config, std::string_view kind) {
  if (config.output_path.empty()) return {};
  fs::path dir = config.output_path;
  dir += ".cells";
  fs::create_directories(dir);
  ExperimentConfig fingerprint = config;
  fingerprint.output_path.clear();
  const std::string expected = std::string(kind) + "\n" + config_to_json(fingerprint);
  const fs::path stamp = dir / "config.json";
  if (fs::exists(stamp)) {
    std::ifstream in(stamp);
    std::stringstream existing;
    existing << in.rdbuf();
    if (existing.str() != expected) {
      throw ValidationError("cell directory " + dir.string() +
                            " was produced by a different configuration; remove it to rerun");
    }
  } else {
    io::write_file_atomic(stamp, expected);
  }
  return dir;
}

void write_result_csv(const ExperimentConfig& config, const std::vector<ResultRow>& rows) {
  if (config.output_path.empty()) return;
  std::string csv = result_csv_header();
  std::string masses;
  for (const auto& r : rows) {
    csv += to_csv_line(r);
    for (std::size_t c = 0; c < r.column_masses.size(); ++c) {
      if (c > 0) masses += ',';
      masses += io::format_double(r.column_masses[c]);
    }
    masses += '\n';
  }
  const fs::path out = config.output_path;
  if (out.has_parent_path()) fs::create_directories(out.parent_path());
  io::write_file_atomic(out, csv);
  fs::path masses_path = out;
  masses_path += ".masses.csv";
  io::write_file_atomic(masses_path, masses);
}

template <typename Row>
std::vector<Row> flatten(std::vector<std::vector<Row>> cells) {
  std::vector<Row> out;
  for (auto& cell : cells) {
    for (auto& r : cell) out.push_back(std::move(r));
  }
  return out;
}

// ||T P - Z / N||_1 minimized over column permutations P (K <= 8).
double plan_l1_error(const Eigen::MatrixXd& t, const Labels& truth) {
  const int k = static_cast<int>(t.cols());
  const double mass = 1.0 / static_cast<double>(t.rows());
  std::vector<int> perm(static_cast<std::size_t>(k));
  std::iota(perm.begin(), perm.end(), 0);
  double best = std::numeric_limits<double>::infinity();
  do {
    double total = 0.0;
    for (Eigen::Index i = 0; i < t.rows(); ++i) {
      for (int c = 0; c < k; ++c) {
        const double target = truth[static_cast<int>(i)] == c ? mass : 0.0;
        total += std::abs(t(i, perm[static_cast<std::size_t>(c)]) - target);
      }
    }
    best = std::min(best, total);
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best;
}

}  // namespace

Method parse_method(std::string_view name) {
  if (name == "srgw_nll") return Method::kSrgwNll;
  if (name == "srgw_l2") return Method::kSrgwL2;
  if (name == "vem") return Method::kVem;
  if (name == "spectral_only") return Method::kSpectralOnly;
  throw ValidationError("unknown method '" + std::string(name) + "'");
}

std::string_view to_string(Method method) {
  switch (method) {
    case Method::kSrgwNll: return "srgw_nll";
    case Method::kSrgwL2: return "srgw_l2";
    case Method::kVem: return "vem";
    case Method::kSpectralOnly: return "spectral_only";
  }
  return "unknown";
}

ProportionsKind parse_proportions(std::string_view name) {
  if (name == "balanced") return ProportionsKind::kBalanced;
  if (name == "inverse_square") return ProportionsKind::kInverseSquare;
  throw ValidationError("unknown proportions '" + std::string(name) + "'");
}

std::string_view to_string(ProportionsKind kind) {
  return kind == ProportionsKind::kBalanced ? "balanced" : "inverse_square";
}

double ExperimentConfig::resolved_lambda() const { return resolved_lambda(n); }

double ExperimentConfig::resolved_lambda(int n_nodes) const {
  if (lambda.has_value()) return *lambda;
  return static_cast<double>(k_search) / (2.0 * n_nodes);
}

void ExperimentConfig::validate() const {
  if (n < 2) throw ValidationError("n must be at least 2");
  if (k_true < 1 || k_search < 1) throw ValidationError("k_true and k_search must be positive");
  if (k_search > n) throw ValidationError("k_search cannot exceed n");
  if (scenario == Scenario::kHub && k_true < 2) throw ValidationError("hub scenario needs k_true >= 2");
  if (p_in_grid.empty()) throw ValidationError("p_in_grid must be nonempty");
  for (double p : p_in_grid) {
    if (!(p_out > 0.0 && p_out <= p && p < 1.0)) {
      throw ValidationError("every p_in must satisfy 0 < p_out <= p_in < 1");
    }
  }
  if (lambda.has_value() && !(*lambda >= 0.0)) throw ValidationError("lambda must be >= 0");
  for (double l : lambda_grid) {
    if (!(l >= 0.0) || !std::isfinite(l)) throw ValidationError("lambda_grid entries must be >= 0");
  }
  if (seeds.empty()) throw ValidationError("seeds must be nonempty");
  for (int m : n_grid) {
    if (m < 2 || m < k_search) throw ValidationError("n_grid entries must be >= max(2, k_search)");
  }
  if (method == Method::kSrgwL2 && loss != LossKind::kSquared) {
    throw ValidationError("method srgw_l2 requires the squared loss");
  }
  if (method == Method::kSrgwNll && loss == LossKind::kSquared) {
    throw ValidationError("method srgw_nll requires a likelihood loss");
  }
  if (vem_max_iters < 1 || !(vem_tol > 0.0)) throw ValidationError("invalid VEM settings");
  solver.validate();
}

ExperimentConfig parse_config(std::string_view json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ValidationError(std::string("config is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) throw ValidationError("config must be a JSON object");
  ExperimentConfig c;
  bool loss_given = false;
  for (const auto& [key, value] : j.items()) {
    if (key == "scenario") c.scenario = parse_scenario(read<std::string>(j, "scenario"));
    else if (key == "n") c.n = read<int>(j, "n");
    else if (key == "k_true") c.k_true = read<int>(j, "k_true");
    else if (key == "k_search") c.k_search = read<int>(j, "k_search");
    else if (key == "p_out") c.p_out = read<double>(j, "p_out");
    else if (key == "p_in_grid") c.p_in_grid = read<std::vector<double>>(j, "p_in_grid");
    else if (key == "lambda") {
      if (value.is_string()) {
        if (value.get<std::string>() != "auto") throw ValidationError("lambda must be a number or \"auto\"");
        c.lambda.reset();
      } else {
        c.lambda = read<double>(j, "lambda");
      }
    } else if (key == "lambda_grid") c.lambda_grid = read<std::vector<double>>(j, "lambda_grid");
    else if (key == "seeds") c.seeds = read<std::vector<std::uint64_t>>(j, "seeds");
    else if (key == "loss") {
      c.loss = parse_loss_kind(read<std::string>(j, "loss"));
      loss_given = true;
    } else if (key == "method") c.method = parse_method(read<std::string>(j, "method"));
    else if (key == "proportions") c.proportions = parse_proportions(read<std::string>(j, "proportions"));
    else if (key == "output_path") c.output_path = read<std::string>(j, "output_path");
    else if (key == "n_grid") c.n_grid = read<std::vector<int>>(j, "n_grid");
    else if (key == "solver") c.solver = solver_from_json(value, c.solver);
    else if (key == "vem_max_iters") c.vem_max_iters = read<int>(j, "vem_max_iters");
    else if (key == "vem_tol") c.vem_tol = read<double>(j, "vem_tol");
    else throw ValidationError("unknown config key '" + key + "'");
  }
  if (!loss_given) c.loss = implied_loss(c.method);
  c.validate();
  return c;
}

ExperimentConfig load_config(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open config " + path.string());
  std::stringstream text;
  text << in.rdbuf();
  return parse_config(text.str());
}

std::string config_to_json(const ExperimentConfig& c) {
  json j{{"scenario", to_string(c.scenario)},
         {"n", c.n},
         {"k_true", c.k_true},
         {"k_search", c.k_search},
         {"p_out", c.p_out},
         {"p_in_grid", c.p_in_grid},
         {"lambda_grid", c.lambda_grid},
         {"seeds", c.seeds},
         {"loss", to_string(c.loss)},
         {"method", to_string(c.method)},
         {"proportions", to_string(c.proportions)},
         {"output_path", c.output_path},
         {"n_grid", c.n_grid},
         {"solver", solver_to_json(c.solver)},
         {"vem_max_iters", c.vem_max_iters},
         {"vem_tol", c.vem_tol}};
  if (c.lambda.has_value()) {
    j["lambda"] = *c.lambda;
  } else {
    j["lambda"] = "auto";
  }
  return j.dump(2) + "\n";
}

std::string result_csv_header() {
  return "# schema_version=" + std::to_string(kCsvSchemaVersion) +
         "\nscenario,method,n,k_true,k_search,p_in,p_out,lambda,seed,ari,k_hat,theta_error,"
         "final_loss,runtime_ms\n";
}

std::string to_csv_line(const ResultRow& r) {
  std::ostringstream out;
  out << r.scenario << ',' << r.method << ',' << r.n << ',' << r.k_true << ',' << r.k_search << ','
      << io::format_double(r.p_in) << ',' << io::format_double(r.p_out) << ','
      << io::format_double(r.lambda) << ',' << r.seed << ',' << io::format_double(r.ari) << ','
      << r.k_hat << ',' << io::format_double(r.theta_error) << ','
      << io::format_double(r.final_loss) << ',' << io::format_double(r.runtime_ms) << '\n';
  return out.str();
}

std::string consistency_csv_header() {
  return "# schema_version=" + std::to_string(kCsvSchemaVersion) +
         "\nscenario,n,k_true,p_in,p_out,seed,plan_l1_error,theta_error,ari,runtime_ms\n";
}

std::string to_csv_line(const ConsistencyRow& r) {
  std::ostringstream out;
  out << r.scenario << ',' << r.n << ',' << r.k_true << ',' << io::format_double(r.p_in) << ','
      << io::format_double(r.p_out) << ',' << r.seed << ',' << io::format_double(r.plan_l1_error)
      << ',' << io::format_double(r.theta_error) << ',' << io::format_double(r.ari) << ','
      << io::format_double(r.runtime_ms) << '\n';
  return out.str();
}

ResultRow run_single(const ExperimentConfig& config, double p_in, double lambda,
                     std::uint64_t seed) {
  const ConnectivityMatrix theta_star =
      build_scenario(config.scenario, config.k_true, p_in, config.p_out);
  const Proportions alpha = make_proportions(config.proportions, config.k_true);
  const SampledGraph graph = sample_graph(theta_star, alpha, config.n, seed);
  const AdjacencyMatrix& a = graph.adjacency;

  ResultRow row;
  row.scenario = std::string(to_string(config.scenario));
  row.method = std::string(to_string(config.method));
  row.n = config.n;
  row.k_true = config.k_true;
  row.k_search = config.k_search;
  row.p_in = p_in;
  row.p_out = config.p_out;
  row.seed = seed;

  const auto start = std::chrono::steady_clock::now();
  const TransportPlan t0 = spectral_init(a, config.k_search, seed);
  Labels labels = hard_labels(t0);
  std::optional<ConnectivityMatrix> theta_hat;
  Eigen::VectorXd masses;

  switch (config.method) {
    case Method::kSrgwNll:
    case Method::kSrgwL2: {
      SolverOptions opts = config.solver;
      opts.lambda = lambda;
      row.lambda = lambda;
      FitResult fit = bcd_fit(a, make_loss(config.loss), t0, opts);
      row.final_loss = fit.loss_history.back();
      row.k_hat = fit.k_hat;
      masses = fit.t_hat.column_masses();
      labels = std::move(fit.labels);
      theta_hat = std::move(fit.theta_hat);
      break;
    }
    case Method::kVem: {
      const Eigen::MatrixXd tau0 = t0.entries() * static_cast<double>(config.n);
      VemState state = vem_fit(a, config.k_search, tau0, config.vem_max_iters, config.vem_tol);
      const TransportPlan plan = TransportPlan::trusted(state.tau / static_cast<double>(config.n));
      row.final_loss = -state.elbo;
      row.k_hat = selected_k(plan, config.solver.active_mass_tol);
      masses = plan.column_masses();
      labels = hard_labels(plan);
      theta_hat = std::move(state.theta);
      break;
    }
    case Method::kSpectralOnly: {
      const TransportPlan hard = labels_to_plan(labels, config.k_search);
      const CompositeLoss loss = make_loss(LossKind::kBernoulliNll);
      ThetaEstimate estimate = theta_closed_form(a, hard, loss);
      row.final_loss = srgw_objective(a, hard, estimate.theta, loss);
      row.k_hat = selected_k(hard, config.solver.active_mass_tol);
      masses = hard.column_masses();
      theta_hat = std::move(estimate.theta);
      break;
    }
  }
  row.runtime_ms = elapsed_ms(start);
  row.ari = ari(labels, graph.labels);
  row.theta_error = theta_recovery_error(*theta_hat, theta_star, labels, graph.labels);
  row.column_masses.assign(masses.data(), masses.data() + masses.size());
  return row;
}

ConsistencyRow run_consistency_single(const ExperimentConfig& config, int n, std::uint64_t seed) {
  const double p_in = config.p_in_grid.front();
  const ConnectivityMatrix theta_star =
      build_scenario(config.scenario, config.k_true, p_in, config.p_out);
  const Proportions alpha = make_proportions(config.proportions, config.k_true);
  const SampledGraph graph = sample_graph(theta_star, alpha, n, seed);
  const CompositeLoss loss = make_loss(config.loss);

  ConsistencyRow row;
  row.scenario = std::string(to_string(config.scenario));
  row.n = n;
  row.k_true = config.k_true;
  row.p_in = p_in;
  row.p_out = config.p_out;
  row.seed = seed;

  const auto start = std::chrono::steady_clock::now();
  const TransportPlan t0 = spectral_init(graph.adjacency, config.k_true, seed);
  SolverOptions opts = config.solver;
  opts.lambda = 0.0;
  const ConnectivityMatrix theta_known =
      loss.kind() == LossKind::kSquared ? theta_star : theta_star.clamped();
  const Eigen::MatrixXd zero = Eigen::MatrixXd::Zero(n, config.k_true);
  const TransportPlan known = fw_solve(graph.adjacency, loss, theta_known, t0, zero, opts);
  row.plan_l1_error = plan_l1_error(known.entries(), graph.labels);

  opts.lambda = config.lambda.value_or(0.0);
  const FitResult fit = bcd_fit(graph.adjacency, loss, t0, opts);
  row.theta_error = theta_recovery_error(fit.theta_hat, theta_star, fit.labels, graph.labels);
  row.ari = ari(fit.labels, graph.labels);
  row.runtime_ms = elapsed_ms(start);
  return row;
}

std::vector<ResultRow> run_ari_sweep(const ExperimentConfig& config, const SweepOptions& opts) {
  config.validate();
  const fs::path dir = prepare_cell_dir(config, "ari-sweep");
  const double lambda = config.resolved_lambda();
  auto cells = run_cells<ResultRow>(
      config.p_in_grid.size(), dir, opts,
      [&](std::size_t c) {
        std::vector<ResultRow> rows;
        for (std::uint64_t seed : config.seeds) {
          rows.push_back(run_single(config, config.p_in_grid[c], lambda, seed));
        }
        return rows;
      },
      [](const ResultRow& r) { return row_to_json(r); }, row_from_json);
  std::vector<ResultRow> rows = flatten(std::move(cells));
  write_result_csv(config, rows);
  return rows;
}

std::vector<ResultRow> run_lambda_sweep(const ExperimentConfig& config,
                                        const SweepOptions& opts) {
  config.validate();
  if (config.lambda_grid.empty()) throw ValidationError("lambda sweep needs a nonempty lambda_grid");
  const fs::path dir = prepare_cell_dir(config, "lambda-sweep");
  const std::size_t per_p = config.lambda_grid.size();
  auto cells = run_cells<ResultRow>(
      config.p_in_grid.size() * per_p, dir, opts,
      [&](std::size_t c) {
        const double p_in = config.p_in_grid[c / per_p];
        const double lambda = config.lambda_grid[c % per_p];
        std::vector<ResultRow> rows;
        for (std::uint64_t seed : config.seeds) rows.push_back(run_single(config, p_in, lambda, seed));
        return rows;
      },
      [](const ResultRow& r) { return row_to_json(r); }, row_from_json);
  std::vector<ResultRow> rows = flatten(std::move(cells));
  write_result_csv(config, rows);
  return rows;
}

std::vector<ConsistencyRow> run_consistency(const ExperimentConfig& config,
                                            const SweepOptions& opts) {
  config.validate();
  if (config.n_grid.empty()) throw ValidationError("consistency needs a nonempty n_grid");
  if (config.k_true > 8) throw ValidationError("consistency plan alignment supports k_true <= 8");
  const fs::path dir = prepare_cell_dir(config, "consistency");
  auto cells = run_cells<ConsistencyRow>(
      config.n_grid.size(), dir, opts,
      [&](std::size_t c) {
        std::vector<ConsistencyRow> rows;
        for (std::uint64_t seed : config.seeds) {
          rows.push_back(run_consistency_single(config, config.n_grid[c], seed));
        }
        return rows;
      },
      [](const ConsistencyRow& r) { return row_to_json(r); }, consistency_from_json);
  std::vector<ConsistencyRow> rows = flatten(std::move(cells));
  if (!config.output_path.empty()) {
    std::string csv = consistency_csv_header();
    for (const auto& r : rows) csv += to_csv_line(r);
    const fs::path out = config.output_path;
    if (out.has_parent_path()) fs::create_directories(out.parent_path());
    io::write_file_atomic(out, csv);
  }
  return rows;
}

std::string strip_runtime_column(std::string_view csv) {
  std::string out;
  std::istringstream in{std::string(csv)};
  std::string line;
  long runtime_index = -1;
  while (std::getline(in, line)) {
    if (!line.empty() && line.front() == '#') {
      out += line + '\n';
      continue;
    }
    std::vector<std::string> fields;
    std::istringstream cells(line);
    std::string cell;
    while (std::getline(cells, cell, ',')) fields.push_back(cell);
    if (runtime_index < 0) {
      const auto it = std::find(fields.begin(), fields.end(), "runtime_ms");
      runtime_index = it == fields.end() ? static_cast<long>(fields.size()) : it - fields.begin();
    }
    std::string kept;
    for (std::size_t f = 0; f < fields.size(); ++f) {
      if (static_cast<long>(f) == runtime_index) continue;
      if (!kept.empty()) kept += ',';
      kept += fields[f];
    }
    out += kept + '\n';
  }
  return out;
}

AuditReport audit_k_hat(const fs::path& output_path, double mass_tol, double fraction) {
  std::ifstream csv(output_path);
  fs::path masses_path = output_path;
  masses_path += ".masses.csv";
  std::ifstream masses(masses_path);
  if (!csv || !masses) throw ValidationError("audit needs " + output_path.string() + " and its masses file");

  std::vector<int> k_hats;
  std::string line;
  bool header_seen = false;
  long k_hat_index = -1;
  while (std::getline(csv, line)) {
    if (line.empty() || line.front() == '#') continue;
    std::vector<std::string> fields;
    std::istringstream cells(line);
    std::string cell;
    while (std::getline(cells, cell, ',')) fields.push_back(cell);
    if (!header_seen) {
      header_seen = true;
      const auto it = std::find(fields.begin(), fields.end(), "k_hat");
      if (it == fields.end()) throw ValidationError("CSV has no k_hat column");
      k_hat_index = it - fields.begin();
      continue;
    }
    k_hats.push_back(std::stoi(fields.at(static_cast<std::size_t>(k_hat_index))));
  }

  AuditReport report;
  const auto stride = static_cast<std::uint64_t>(std::max(1.0, std::round(1.0 / fraction)));
  std::size_t row = 0;
  while (std::getline(masses, line)) {
    if (row >= k_hats.size()) break;
    const bool sampled = row == 0 || splitmix64(row) % stride == 0;
    if (sampled) {
      std::istringstream cells(line);
      std::string cell;
      int active = 0;
      while (std::getline(cells, cell, ',')) active += std::stod(cell) > mass_tol;
      ++report.audited;
      report.mismatches += active != k_hats[row];
    }
    ++row;
  }
  return report;
}

int resolve_jobs(int requested) {
  if (const char* env = std::getenv("SRGW_SBM_JOBS"); env != nullptr && *env != '\0') {
    char* end = nullptr;
    const long value = std::strtol(env, &end, 10);
    if (end == env || *end != '\0' || value < 1) {
      throw ValidationError("SRGW_SBM_JOBS must be a positive integer");
    }
    return static_cast<int>(value);
  }
  return std::max(1, requested);
}

}  // namespace srgw
