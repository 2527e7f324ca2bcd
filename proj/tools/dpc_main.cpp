// Command-line front end: graph generation, single clustering runs, the
// experiment grid, the sensitivity audit and clustering metrics.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "dpc/errors.hpp"
#include "dpc/experiment.hpp"
#include "dpc/graph.hpp"
#include "dpc/io.hpp"
#include "dpc/mechanisms.hpp"
#include "dpc/metrics.hpp"
#include "dpc/pipeline.hpp"
#include "dpc/rng.hpp"

namespace {

std::optional<double> parse_delta_text(const std::string& text) {
  if (text == "1/n^2") return std::nullopt;
  return std::stod(text);
}

int cmd_generate(int n, int k, double p, double q, std::uint64_t seed,
                 const std::string& out_prefix) {
  dpc::SbmParams params{n, k, p, q};
  dpc::Graph g = dpc::sample_sbm(params, seed);
  dpc::Clustering truth = dpc::sbm_truth(n, k);
  dpc::write_edge_list_file(out_prefix + ".edges", g);
  dpc::write_labels_file(out_prefix + ".labels", truth);
  std::cout << "wrote " << out_prefix << ".edges (" << g.n() << " vertices, "
            << g.m() << " edges) and " << out_prefix << ".labels\n";
  return 0;
}

int cmd_cluster(const std::string& graph_path, const std::string& algorithm,
                int k, double eps, const std::string& delta_text,
                double c_lambda, std::optional<double> lambda_override,
                std::optional<double> b_override, std::uint64_t seed,
                const std::string& side, const std::string& out_path,
                const std::string& diag_path) {
  dpc::Graph g = dpc::read_edge_list_file(graph_path);
  double delta = dpc::resolve_delta(parse_delta_text(delta_text), g.n());

  dpc::PipelineConfig cfg;
  cfg.k = k;
  cfg.b = b_override ? *b_override
                     : (static_cast<double>(k) - 1.0) / static_cast<double>(k);
  cfg.budget = {eps, delta};
  cfg.side = side == "bottom" ? dpc::EigenSide::bottom : dpc::EigenSide::top;

  dpc::Algorithm algo = dpc::parse_algorithm(algorithm);
  dpc::PipelineResult result;
  if (algo == dpc::Algorithm::rr_baseline) {
    result = dpc::rr_baseline_cluster(g, cfg, seed);
  } else {
    cfg.lambda = lambda_override
                     ? *lambda_override
                     : dpc::lambda_heuristic(c_lambda, g.m(), g.n(), eps, delta);
    if (algo == dpc::Algorithm::nonprivate) cfg.noise_override = 0.0;
    result = dpc::private_cluster(g, cfg, seed);
  }

  if (out_path.empty()) {
    dpc::write_labels(std::cout, result.clustering);
  } else {
    dpc::write_labels_file(out_path, result.clustering);
  }
  if (!diag_path.empty()) {
    std::ofstream diag(diag_path);
    if (!diag) throw dpc::IoError("cannot open " + diag_path + " for writing");
    diag << result.diagnostics.to_json() << '\n';
  }
  return 0;
}

int cmd_experiment(const std::string& config_path, const std::string& out_path,
                   const std::string& summary_path, bool paper_scale,
                   int threads) {
  dpc::ExperimentConfig config = dpc::load_experiment_config(config_path);
  if (paper_scale) {
    config.graphs_per_cell = 10;
    config.runs_per_graph = 100;
  }
  std::vector<dpc::ResultRow> rows = dpc::run_experiment(config, threads);

  std::ofstream out(out_path);
  if (!out) throw dpc::IoError("cannot open " + out_path + " for writing");
  dpc::write_result_csv(out, rows);

  std::vector<dpc::SummaryRow> summary = dpc::summarize(config, rows);
  if (!summary_path.empty()) {
    std::ofstream sout(summary_path);
    if (!sout) throw dpc::IoError("cannot open " + summary_path + " for writing");
    dpc::write_summary_csv(sout, summary);
  }
  dpc::write_summary_csv(std::cout, summary);
  return 0;
}

int cmd_audit(int n, int trials, double lambda, double edge_prob,
              std::uint64_t seed, const std::string& out_path) {
  dpc::AuditReport report =
      dpc::audit_sensitivity(n, trials, lambda, edge_prob, seed);
  std::ostream* out = &std::cout;
  std::ofstream file;
  if (!out_path.empty()) {
    file.open(out_path);
    if (!file) throw dpc::IoError("cannot open " + out_path + " for writing");
    out = &file;
  }
  *out << "trial,m,m_prime,distance,bound,ratio,converged\n";
  for (size_t t = 0; t < report.trials.size(); ++t) {
    const dpc::AuditTrial& trial = report.trials[t];
    *out << t << ',' << trial.m << ',' << trial.m_prime << ','
         << trial.distance << ',' << trial.bound << ',' << trial.ratio << ','
         << (trial.converged ? 1 : 0) << '\n';
  }
  std::cout << "max_ratio=" << report.max_ratio << '\n';
  return report.max_ratio <= 1.0 ? 0 : 1;
}

int cmd_metrics(const std::string& pred_path, const std::string& truth_path,
                const std::string& graph_path) {
  dpc::Clustering pred = dpc::read_labels_file(pred_path);
  dpc::Clustering truth = dpc::read_labels_file(truth_path);
  // Align cluster counts so that partitions using fewer labels still compare.
  int k = std::max(pred.k, truth.k);
  pred = dpc::Clustering::from_labels(pred.labels, k);
  truth = dpc::Clustering::from_labels(truth.labels, k);

  std::cout << "ami=" << dpc::ami(pred, truth) << '\n';
  std::cout << "nmi_geometric=" << dpc::nmi(pred, truth, dpc::NmiNorm::geometric)
            << '\n';
  std::cout << "nmi_arithmetic="
            << dpc::nmi(pred, truth, dpc::NmiNorm::arithmetic) << '\n';
  if (!graph_path.empty()) {
    dpc::Graph g = dpc::read_edge_list_file(graph_path);
    dpc::VolMisclassification vm = dpc::vol_misclassification(g, pred, truth);
    std::cout << "vol_max_ratio=" << vm.max_ratio << '\n';
  }
  if (k == 2) {
    auto signs = [](const dpc::Clustering& c) {
      std::vector<int> s(c.labels.size());
      for (size_t i = 0; i < s.size(); ++i) s[i] = c.labels[i] == 0 ? 1 : -1;
      return s;
    };
    std::cout << "err=" << dpc::err_rate(signs(pred), signs(truth)) << '\n';
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Differentially private clustering of well-clustered graphs"};
  app.require_subcommand(1);

  // generate
  auto* gen = app.add_subcommand("generate", "Sample a block-model graph");
  int gen_n = 100, gen_k = 2;
  double gen_p = 0.3, gen_q = 0.1;
  std::uint64_t gen_seed = 0;
  std::string gen_out = "graph";
  gen->add_option("--n", gen_n, "Vertex count")->required();
  gen->add_option("--k", gen_k, "Cluster count")->required();
  gen->add_option("--p", gen_p, "Intra-block edge probability")->required();
  gen->add_option("--q", gen_q, "Inter-block edge probability")->required();
  gen->add_option("--seed", gen_seed, "Seed");
  gen->add_option("--out", gen_out, "Output prefix (.edges and .labels)");

  // cluster
  auto* clu = app.add_subcommand("cluster", "Cluster one graph");
  std::string clu_graph, clu_algo = "private", clu_delta = "1/n^2";
  std::string clu_side = "top", clu_out, clu_diag;
  int clu_k = 2;
  double clu_eps = 1.0, clu_c = 1.0;
  double clu_lambda = 0.0, clu_b = -1.0;
  std::uint64_t clu_seed = 0;
  clu->add_option("--graph", clu_graph, "Edge-list file")->required();
  clu->add_option("--algorithm", clu_algo,
                  "private | rr_baseline | nonprivate");
  clu->add_option("--k", clu_k, "Cluster count")->required();
  clu->add_option("--eps", clu_eps, "Privacy parameter epsilon");
  clu->add_option("--delta", clu_delta, "Privacy parameter delta or '1/n^2'");
  clu->add_option("--c-lambda", clu_c, "Regularizer heuristic constant");
  clu->add_option("--lambda", clu_lambda,
                  "Explicit regularizer weight (overrides --c-lambda)");
  clu->add_option("--b", clu_b, "Balance target (default (k-1)/k)");
  clu->add_option("--seed", clu_seed, "Seed");
  clu->add_option("--side", clu_side, "Spectrum end: top | bottom");
  clu->add_option("--out", clu_out, "Labels output path (default stdout)");
  clu->add_option("--diag", clu_diag, "Diagnostics JSON output path");

  // experiment
  auto* exp = app.add_subcommand("experiment", "Run an experiment grid");
  std::string exp_config, exp_out = "results.csv", exp_summary;
  bool exp_paper = false;
  int exp_threads = 1;
  exp->add_option("--config", exp_config, "Grid config JSON")->required();
  exp->add_option("--out", exp_out, "Per-run CSV output path");
  exp->add_option("--summary", exp_summary, "Per-cell summary CSV path");
  exp->add_flag("--paper", exp_paper, "Force 10 graphs x 100 runs per cell");
  exp->add_option("--threads", exp_threads, "Worker threads");

  // audit-sensitivity
  auto* aud = app.add_subcommand("audit-sensitivity",
                                 "Empirical sensitivity-bound check");
  int aud_n = 20, aud_trials = 30;
  double aud_lambda = 1.0, aud_prob = 0.4;
  std::uint64_t aud_seed = 0;
  std::string aud_out;
  aud->add_option("--n", aud_n, "Vertex count per trial graph");
  aud->add_option("--trials", aud_trials, "Neighboring pairs to test");
  aud->add_option("--lambda", aud_lambda, "Regularizer weight");
  aud->add_option("--edge-prob", aud_prob, "Trial graph edge probability");
  aud->add_option("--seed", aud_seed, "Seed");
  aud->add_option("--out", aud_out, "Per-trial CSV output path");

  // metrics
  auto* met = app.add_subcommand("metrics", "Compare two clusterings");
  std::string met_pred, met_truth, met_graph;
  met->add_option("--pred", met_pred, "Predicted labels file")->required();
  met->add_option("--truth", met_truth, "Ground-truth labels file")->required();
  met->add_option("--graph", met_graph,
                  "Edge-list file for volume-weighted misclassification");

  CLI11_PARSE(app, argc, argv);

  try {
    if (gen->parsed())
      return cmd_generate(gen_n, gen_k, gen_p, gen_q, gen_seed, gen_out);
    if (clu->parsed())
      return cmd_cluster(clu_graph, clu_algo, clu_k, clu_eps, clu_delta, clu_c,
                         clu_lambda > 0.0 ? std::optional<double>(clu_lambda)
                                          : std::nullopt,
                         clu_b >= 0.0 ? std::optional<double>(clu_b)
                                      : std::nullopt,
                         clu_seed, clu_side, clu_out, clu_diag);
    if (exp->parsed())
      return cmd_experiment(exp_config, exp_out, exp_summary, exp_paper,
                            exp_threads);
    if (aud->parsed())
      return cmd_audit(aud_n, aud_trials, aud_lambda, aud_prob, aud_seed,
                       aud_out);
    if (met->parsed()) return cmd_metrics(met_pred, met_truth, met_graph);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
