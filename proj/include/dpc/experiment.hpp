#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "dpc/graph.hpp"
#include "dpc/pipeline.hpp"
#include "dpc/sdp.hpp"

namespace dpc {

enum class Algorithm { private_pipeline, rr_baseline, nonprivate };

std::string algorithm_name(Algorithm a);
Algorithm parse_algorithm(const std::string& name);

// One block-model configuration plus its regularizer constant.
struct ExperimentCell {
  SbmParams sbm;
  double c_lambda = 1.0;
};

struct ExperimentConfig {
  std::vector<ExperimentCell> cells;
  std::vector<Algorithm> algorithms{Algorithm::rr_baseline,
                                    Algorithm::private_pipeline};
  double eps = 1.0;
  // Literal delta; unset means 1/n^2 per cell.
  std::optional<double> delta = std::nullopt;
  int graphs_per_cell = 10;
  int runs_per_graph = 10;
  std::uint64_t base_seed = 0;
  // Balance target; unset means (k-1)/k per cell.  Exact-b mode instead
  // measures b from the generated graph and its ground truth.
  std::optional<double> b = std::nullopt;
  bool use_exact_b = false;
  SolverSettings solver;
  int kmeans_restarts = 10;
  int kmeans_max_iters = 100;
};

// Loads a config from JSON.  Accepts "delta" as a number or the string
// "1/n^2"; "algorithms" as a list of names.
ExperimentConfig load_experiment_config(const std::string& path);
ExperimentConfig parse_experiment_config(const std::string& json_text);

double resolve_delta(const std::optional<double>& delta, int n);

// Regularizer heuristic lambda = c sqrt(m eps^2 / (n ln(2/delta))), from the
// edge count of the graph the solver sees.
double lambda_heuristic(double c, long long m, int n, double eps, double delta);

struct ResultRow {
  std::string algorithm;
  int n = 0, k = 0;
  double p = 0.0, q = 0.0, c_lambda = 0.0;
  double lambda = 0.0;  // 0 for the unregularized baseline
  double eps = 0.0, delta = 0.0, b = 0.0;
  int graph_index = 0, run_index = 0;
  std::uint64_t graph_seed = 0, run_seed = 0;
  double ami = 0.0;
  double nmi = 0.0;  // arithmetic normalization
  double seconds = 0.0;
  std::string digest;  // compact deterministic diagnostics summary
};

// Runs the full grid: cells x graphs x runs x algorithms.  Rows come back
// ordered by (cell, graph, run, algorithm) regardless of thread count.  The
// regularized pipelines solve once per graph and reuse the solution across
// runs; the flip baseline re-solves per run on its flipped graph.
std::vector<ResultRow> run_experiment(const ExperimentConfig& config,
                                      int threads = 1);

extern const char* const kResultCsvHeader;
std::string result_row_csv(const ResultRow& row);
void write_result_csv(std::ostream& out, const std::vector<ResultRow>& rows);

// Lower median: after sorting, the element at index (N-1)/2.
double lower_median(std::vector<double> values);

struct SummaryRow {
  int n = 0, k = 0;
  double p = 0.0, q = 0.0, c_lambda = 0.0;
  // Medians pooled over all (graph, run) rows of the cell; NaN when an
  // algorithm was not part of the grid.
  double rr_ami, rr_nmi, private_ami, private_nmi, nonprivate_ami,
      nonprivate_nmi;
};

std::vector<SummaryRow> summarize(const ExperimentConfig& config,
                                  const std::vector<ResultRow>& rows);
void write_summary_csv(std::ostream& out, const std::vector<SummaryRow>& rows);

struct AuditTrial {
  long long m = 0, m_prime = 0;
  double distance = 0.0;  // Frobenius distance between scaled solutions
  double bound = 0.0;     // sqrt(24 (lambda + 3) max(m, m'))
  double ratio = 0.0;
  bool converged = true;
};

struct AuditReport {
  std::vector<AuditTrial> trials;
  double max_ratio = 0.0;
};

// Empirical check of the scaled-solution sensitivity bound: random graphs,
// one toggled pair each, both relaxations solved, distance over bound.
AuditReport audit_sensitivity(int n, int trials, double lambda,
                              double edge_prob, std::uint64_t seed,
                              const SolverSettings& solver = {});

}  // namespace dpc
