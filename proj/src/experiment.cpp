#include "dpc/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "dpc/errors.hpp"
#include "dpc/mechanisms.hpp"
#include "dpc/metrics.hpp"
#include "dpc/rng.hpp"

namespace dpc {

std::string algorithm_name(Algorithm a) {
  switch (a) {
    case Algorithm::private_pipeline: return "private";
    case Algorithm::rr_baseline: return "rr_baseline";
    case Algorithm::nonprivate: return "nonprivate";
  }
  throw InvalidInput("algorithm_name: unknown algorithm");
}

Algorithm parse_algorithm(const std::string& name) {
  if (name == "private") return Algorithm::private_pipeline;
  if (name == "rr_baseline") return Algorithm::rr_baseline;
  if (name == "nonprivate") return Algorithm::nonprivate;
  throw InvalidInput("unknown algorithm '" + name + "'");
}

ExperimentConfig parse_experiment_config(const std::string& json_text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::parse_error& e) {
    throw IoError(std::string("config: ") + e.what());
  }
  ExperimentConfig cfg;
  try {
    for (const auto& cell : j.at("cells")) {
      ExperimentCell c;
      c.sbm.n = cell.at("n").get<int>();
      c.sbm.k = cell.at("k").get<int>();
      c.sbm.p = cell.at("p").get<double>();
      c.sbm.q = cell.at("q").get<double>();
      c.c_lambda = cell.value("c_lambda", 1.0);
      cfg.cells.push_back(c);
    }
    if (j.contains("algorithms")) {
      cfg.algorithms.clear();
      for (const auto& name : j.at("algorithms"))
        cfg.algorithms.push_back(parse_algorithm(name.get<std::string>()));
    }
    cfg.eps = j.value("eps", 1.0);
    if (j.contains("delta")) {
      const auto& d = j.at("delta");
      if (d.is_string()) {
        if (d.get<std::string>() != "1/n^2")
          throw IoError("config: delta string must be \"1/n^2\"");
        cfg.delta = std::nullopt;
      } else {
        cfg.delta = d.get<double>();
      }
    }
    cfg.graphs_per_cell = j.value("graphs_per_cell", 10);
    cfg.runs_per_graph = j.value("runs_per_graph", 10);
    cfg.base_seed = j.value("base_seed", std::uint64_t{0});
    if (j.contains("b")) cfg.b = j.at("b").get<double>();
    cfg.use_exact_b = j.value("use_exact_b", false);
    cfg.kmeans_restarts = j.value("kmeans_restarts", 10);
    cfg.kmeans_max_iters = j.value("kmeans_max_iters", 100);
    if (j.contains("solver")) {
      const auto& s = j.at("solver");
      cfg.solver.rho = s.value("rho", cfg.solver.rho);
      cfg.solver.tol_primal = s.value("tol_primal", cfg.solver.tol_primal);
      cfg.solver.tol_dual = s.value("tol_dual", cfg.solver.tol_dual);
      cfg.solver.tol_feas = s.value("tol_feas", cfg.solver.tol_feas);
      cfg.solver.max_iters = s.value("max_iters", cfg.solver.max_iters);
      cfg.solver.over_relaxation =
          s.value("over_relaxation", cfg.solver.over_relaxation);
      cfg.solver.adapt_rho = s.value("adapt_rho", cfg.solver.adapt_rho);
    }
  } catch (const nlohmann::json::exception& e) {
    throw IoError(std::string("config: ") + e.what());
  }
  if (cfg.cells.empty()) throw IoError("config: no cells");
  if (cfg.algorithms.empty()) throw IoError("config: no algorithms");
  if (cfg.graphs_per_cell < 1 || cfg.runs_per_graph < 1)
    throw IoError("config: counts must be positive");
  return cfg;
}

ExperimentConfig load_experiment_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_experiment_config(buf.str());
}

double resolve_delta(const std::optional<double>& delta, int n) {
  if (delta) {
    if (!(*delta > 0.0) || *delta > 1.0)
      throw InvalidInput("delta must lie in (0, 1]");
    return *delta;
  }
  return 1.0 / (static_cast<double>(n) * static_cast<double>(n));
}

double lambda_heuristic(double c, long long m, int n, double eps,
                        double delta) {
  if (!(c > 0.0)) throw InvalidInput("lambda_heuristic: c must be positive");
  return c * std::sqrt(static_cast<double>(m) * eps * eps /
                       (static_cast<double>(n) * std::log(2.0 / delta)));
}

namespace {

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.9g", v);
  return buf;
}

std::string diagnostics_digest(const PipelineDiagnostics& d) {
  char buf[160];
  std::snprintf(buf, sizeof(buf),
                "conv=%d;iters=%d;sigma=%.6g;gap=%.6g;cost=%.6g;rej=%d;empty=%d",
                d.solver_converged ? 1 : 0, d.solver_iterations, d.sigma,
                d.eigengap, d.kmeans_cost, d.rejected_vertices,
                d.empty_clusters);
  return buf;
}

struct RunContext {
  const ExperimentConfig* config;
  int cell_index;
  int graph_index;
  Graph graph;
  Clustering truth;
  std::uint64_t graph_seed;
  double delta;
  double b;
  double lambda;  // heuristic value for the regularized pipelines
};

ResultRow make_row(const RunContext& ctx, Algorithm algo, int run_index,
                   std::uint64_t run_seed, const PipelineResult& result,
                   double seconds, double lambda_used) {
  const ExperimentCell& cell = ctx.config->cells[ctx.cell_index];
  ResultRow row;
  row.algorithm = algorithm_name(algo);
  row.n = cell.sbm.n;
  row.k = cell.sbm.k;
  row.p = cell.sbm.p;
  row.q = cell.sbm.q;
  row.c_lambda = cell.c_lambda;
  row.lambda = lambda_used;
  row.eps = ctx.config->eps;
  row.delta = ctx.delta;
  row.b = ctx.b;
  row.graph_index = ctx.graph_index;
  row.run_index = run_index;
  row.graph_seed = ctx.graph_seed;
  row.run_seed = run_seed;
  row.ami = ami(result.clustering, ctx.truth);
  row.nmi = nmi(result.clustering, ctx.truth, NmiNorm::arithmetic);
  row.seconds = seconds;
  row.digest = diagnostics_digest(result.diagnostics);
  return row;
}

// One task: a (cell, graph, algorithm) triple covering all runs, so the
// regularized pipelines can reuse a single relaxation solve per graph.
struct Task {
  int cell_index;
  int graph_index;
  int algo_index;
};

}  // namespace

std::vector<ResultRow> run_experiment(const ExperimentConfig& config,
                                      int threads) {
  const int cells = static_cast<int>(config.cells.size());
  const int graphs = config.graphs_per_cell;
  const int runs = config.runs_per_graph;
  const int algos = static_cast<int>(config.algorithms.size());

  std::vector<Task> tasks;
  tasks.reserve(static_cast<size_t>(cells) * graphs * algos);
  for (int c = 0; c < cells; ++c)
    for (int g = 0; g < graphs; ++g)
      for (int a = 0; a < algos; ++a) tasks.push_back({c, g, a});

  std::vector<ResultRow> rows(static_cast<size_t>(cells) * graphs * runs *
                              algos);
  auto row_slot = [&](int c, int g, int r, int a) -> ResultRow& {
    size_t idx = ((static_cast<size_t>(c) * graphs + g) * runs + r) * algos + a;
    return rows[idx];
  };

  auto run_task = [&](const Task& task) {
    const ExperimentCell& cell = config.cells[task.cell_index];
    Algorithm algo = config.algorithms[task.algo_index];

    std::uint64_t graph_seed =
        derive_seed(config.base_seed, 0xC0DE, task.cell_index, task.graph_index);
    Graph graph = sample_sbm(cell.sbm, graph_seed);
    Clustering truth = sbm_truth(cell.sbm.n, cell.sbm.k);

    RunContext ctx{&config,
                   task.cell_index,
                   task.graph_index,
                   std::move(graph),
                   std::move(truth),
                   graph_seed,
                   resolve_delta(config.delta, cell.sbm.n),
                   0.0,
                   0.0};
    ctx.b = config.b ? *config.b
                     : (config.use_exact_b
                            ? balance_b(ctx.graph, ctx.truth)
                            : (static_cast<double>(cell.sbm.k) - 1.0) /
                                  static_cast<double>(cell.sbm.k));
    ctx.lambda = lambda_heuristic(cell.c_lambda, ctx.graph.m(), cell.sbm.n,
                                  config.eps, ctx.delta);

    PipelineConfig pcfg;
    pcfg.k = cell.sbm.k;
    pcfg.b = ctx.b;
    pcfg.budget = {config.eps, ctx.delta};
    pcfg.solver = config.solver;
    pcfg.kmeans_restarts = config.kmeans_restarts;
    pcfg.kmeans_max_iters = config.kmeans_max_iters;

    using clock = std::chrono::steady_clock;

    if (algo == Algorithm::rr_baseline) {
      pcfg.lambda = std::nullopt;
      for (int r = 0; r < runs; ++r) {
        std::uint64_t run_seed =
            derive_seed(ctx.graph_seed, 0xB0B, r, task.algo_index);
        auto t0 = clock::now();
        PipelineResult result = rr_baseline_cluster(ctx.graph, pcfg, run_seed);
        double secs = std::chrono::duration<double>(clock::now() - t0).count();
        row_slot(task.cell_index, task.graph_index, r, task.algo_index) =
            make_row(ctx, algo, r, run_seed, result, secs, 0.0);
      }
      return;
    }

    // Regularized pipelines: one solve per graph, reused across runs.
    pcfg.lambda = ctx.lambda;
    if (algo == Algorithm::nonprivate) pcfg.noise_override = 0.0;

    auto t0 = clock::now();
    SdpInstance inst = build_instance(ctx.graph, pcfg.b, pcfg.lambda);
    GramSolution sol = solve(inst, pcfg.solver);
    double solve_secs =
        std::chrono::duration<double>(clock::now() - t0).count();

    double sigma =
        pcfg.noise_override
            ? *pcfg.noise_override
            : noise_scale(pcfg.budget, *pcfg.lambda, ctx.graph.m()).sigma();

    for (int r = 0; r < runs; ++r) {
      std::uint64_t run_seed =
          derive_seed(ctx.graph_seed, 0xB0B, r, task.algo_index);
      auto t1 = clock::now();
      Eigen::MatrixXd x2 =
          privatize_gram(sol.x, inst.degrees(), sigma, derive_seed(run_seed, 1));
      Embedding emb = embed(x2, inst.degrees(), pcfg.k, pcfg.side);
      KmeansResult km = kmeans(emb, pcfg.k, pcfg.kmeans_restarts,
                               pcfg.kmeans_max_iters, derive_seed(run_seed, 2));
      double secs = std::chrono::duration<double>(clock::now() - t1).count() +
                    solve_secs / runs;

      PipelineResult result;
      result.clustering = Clustering::from_labels(km.labels, pcfg.k);
      result.diagnostics.sigma = sigma;
      result.diagnostics.lambda = *pcfg.lambda;
      result.diagnostics.solver_iterations = sol.iterations;
      result.diagnostics.solver_converged = sol.converged;
      result.diagnostics.solver_primal_residual = sol.primal_residual;
      result.diagnostics.solver_dual_residual = sol.dual_residual;
      result.diagnostics.objective = sol.objective;
      auto [values, vectors] = sym_eig(x2);
      int take = std::min<int>(pcfg.k + 1, static_cast<int>(values.size()));
      result.diagnostics.top_eigenvalues.assign(values.data(),
                                                values.data() + take);
      result.diagnostics.eigengap =
          values.size() > pcfg.k ? values(pcfg.k - 1) - values(pcfg.k)
                                 : values(pcfg.k - 1);
      result.diagnostics.kmeans_cost = km.cost;
      result.diagnostics.seed = run_seed;
      result.diagnostics.empty_clusters = km.empty_clusters;

      row_slot(task.cell_index, task.graph_index, r, task.algo_index) =
          make_row(ctx, algo, r, run_seed, result, secs, *pcfg.lambda);
    }
  };

  int workers = std::max(1, threads);
  if (workers == 1) {
    for (const Task& t : tasks) run_task(t);
  } else {
    std::atomic<size_t> next{0};
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (int w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (;;) {
          size_t i = next.fetch_add(1);
          if (i >= tasks.size()) return;
          run_task(tasks[i]);
        }
      });
    }
    for (auto& t : pool) t.join();
  }
  return rows;
}

const char* const kResultCsvHeader =
    "algorithm,n,k,p,q,c_lambda,lambda,eps,delta,b,graph_index,run_index,"
    "graph_seed,run_seed,ami,nmi,seconds,digest";

std::string result_row_csv(const ResultRow& row) {
  std::ostringstream out;
  out << row.algorithm << ',' << row.n << ',' << row.k << ','
      << format_double(row.p) << ',' << format_double(row.q) << ','
      << format_double(row.c_lambda) << ',' << format_double(row.lambda) << ','
      << format_double(row.eps) << ',' << format_double(row.delta) << ','
      << format_double(row.b) << ',' << row.graph_index << ',' << row.run_index
      << ',' << row.graph_seed << ',' << row.run_seed << ','
      << format_double(row.ami) << ',' << format_double(row.nmi) << ','
      << format_double(row.seconds) << ',' << row.digest;
  return out.str();
}

void write_result_csv(std::ostream& out, const std::vector<ResultRow>& rows) {
  out << kResultCsvHeader << '\n';
  for (const ResultRow& row : rows) out << result_row_csv(row) << '\n';
}

double lower_median(std::vector<double> values) {
  if (values.empty()) throw InvalidInput("lower_median: no values");
  std::sort(values.begin(), values.end());
  return values[(values.size() - 1) / 2];
}

std::vector<SummaryRow> summarize(const ExperimentConfig& config,
                                  const std::vector<ResultRow>& rows) {
  std::vector<SummaryRow> out;
  double nan = std::nan("");
  for (const ExperimentCell& cell : config.cells) {
    SummaryRow s;
    s.n = cell.sbm.n;
    s.k = cell.sbm.k;
    s.p = cell.sbm.p;
    s.q = cell.sbm.q;
    s.c_lambda = cell.c_lambda;
    s.rr_ami = s.rr_nmi = s.private_ami = s.private_nmi = s.nonprivate_ami =
        s.nonprivate_nmi = nan;
    for (Algorithm algo : config.algorithms) {
      std::vector<double> amis, nmis;
      for (const ResultRow& row : rows) {
        if (row.n != cell.sbm.n || row.k != cell.sbm.k || row.p != cell.sbm.p ||
            row.q != cell.sbm.q || row.c_lambda != cell.c_lambda)
          continue;
        if (row.algorithm != algorithm_name(algo)) continue;
        amis.push_back(row.ami);
        nmis.push_back(row.nmi);
      }
      if (amis.empty()) continue;
      double med_ami = lower_median(amis);
      double med_nmi = lower_median(nmis);
      switch (algo) {
        case Algorithm::rr_baseline:
          s.rr_ami = med_ami;
          s.rr_nmi = med_nmi;
          break;
        case Algorithm::private_pipeline:
          s.private_ami = med_ami;
          s.private_nmi = med_nmi;
          break;
        case Algorithm::nonprivate:
          s.nonprivate_ami = med_ami;
          s.nonprivate_nmi = med_nmi;
          break;
      }
    }
    out.push_back(s);
  }
  return out;
}

void write_summary_csv(std::ostream& out, const std::vector<SummaryRow>& rows) {
  out << "n,k,p,q,c_lambda,rr_ami,rr_nmi,private_ami,private_nmi,"
         "nonprivate_ami,nonprivate_nmi\n";
  auto cell_text = [](double v) {
    return std::isnan(v) ? std::string() : format_double(v);
  };
  for (const SummaryRow& s : rows) {
    out << s.n << ',' << s.k << ',' << format_double(s.p) << ','
        << format_double(s.q) << ',' << format_double(s.c_lambda) << ','
        << cell_text(s.rr_ami) << ',' << cell_text(s.rr_nmi) << ','
        << cell_text(s.private_ami) << ',' << cell_text(s.private_nmi) << ','
        << cell_text(s.nonprivate_ami) << ',' << cell_text(s.nonprivate_nmi)
        << '\n';
  }
}

namespace {

Graph random_min_degree_graph(int n, double edge_prob, std::uint64_t seed) {
  // Resample until no vertex is isolated; each attempt uses a derived seed.
  for (std::uint64_t attempt = 0;; ++attempt) {
    Rng rng(derive_seed(seed, 0xE0, attempt));
    std::vector<std::pair<int, int>> edges;
    for (int u = 0; u < n; ++u)
      for (int v = u + 1; v < n; ++v)
        if (rng.uniform() < edge_prob) edges.emplace_back(u, v);
    Graph g = Graph::from_edges(n, edges);
    bool ok = g.m() > 0;
    for (int u = 0; ok && u < n; ++u)
      if (g.degree(u) == 0) ok = false;
    if (ok) return g;
  }
}

Graph toggle_pair(const Graph& g, int u, int v) {
  auto edges = g.edges();
  if (g.has_edge(u, v)) {
    auto key = std::minmax(u, v);
    edges.erase(std::find(edges.begin(), edges.end(),
                          std::make_pair(key.first, key.second)));
  } else {
    edges.emplace_back(std::min(u, v), std::max(u, v));
  }
  return Graph::from_edges(g.n(), edges);
}

}  // namespace

AuditReport audit_sensitivity(int n, int trials, double lambda,
                              double edge_prob, std::uint64_t seed,
                              const SolverSettings& solver) {
  if (n < 3) throw InvalidInput("audit_sensitivity: n too small");
  if (trials < 1) throw InvalidInput("audit_sensitivity: need trials >= 1");
  if (!(lambda > 0.0))
    throw InvalidInput("audit_sensitivity: lambda must be positive");
  if (!(edge_prob > 0.0) || edge_prob >= 1.0)
    throw InvalidInput("audit_sensitivity: edge_prob must lie in (0, 1)");

  const double b = 0.5;
  AuditReport report;
  for (int t = 0; t < trials; ++t) {
    std::uint64_t trial_seed = derive_seed(seed, 0xAD17, t);
    Graph g = random_min_degree_graph(n, edge_prob, trial_seed);

    // Toggle a uniformly random pair, rejecting toggles that isolate a vertex.
    Rng rng(derive_seed(trial_seed, 0xF1));
    int u = 0, v = 0;
    for (;;) {
      u = static_cast<int>(rng.uniform_int(n));
      v = static_cast<int>(rng.uniform_int(n));
      if (u == v) continue;
      if (g.has_edge(u, v) && (g.degree(u) == 1 || g.degree(v) == 1)) continue;
      break;
    }
    Graph g2 = toggle_pair(g, u, v);

    GramSolution s1 = solve(build_instance(g, b, lambda), solver);
    GramSolution s2 = solve(build_instance(g2, b, lambda), solver);

    auto scaled = [](const Graph& gr, const Eigen::MatrixXd& x) {
      Eigen::VectorXd root(gr.n());
      for (int w = 0; w < gr.n(); ++w)
        root(w) = std::sqrt(static_cast<double>(gr.degree(w)));
      return Eigen::MatrixXd(static_cast<double>(gr.n()) *
                             (root.asDiagonal() * x * root.asDiagonal()));
    };

    AuditTrial trial;
    trial.m = g.m();
    trial.m_prime = g2.m();
    trial.distance = (scaled(g, s1.x) - scaled(g2, s2.x)).norm();
    trial.bound = std::sqrt(24.0 * (lambda + 3.0) *
                            static_cast<double>(std::max(trial.m, trial.m_prime)));
    trial.ratio = trial.distance / trial.bound;
    trial.converged = s1.converged && s2.converged;
    report.max_ratio = std::max(report.max_ratio, trial.ratio);
    report.trials.push_back(trial);
  }
  return report;
}

}  // namespace dpc
