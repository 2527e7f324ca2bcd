#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "dpc/graph.hpp"
#include "dpc/mechanisms.hpp"
#include "dpc/sdp.hpp"

namespace dpc {

// Which end of the spectrum supplies the embedding coordinates.
enum class EigenSide { top, bottom };

struct PipelineConfig {
  int k = 2;
  double b = 0.5;                      // balance target for the relaxation
  std::optional<double> lambda;        // regularizer weight; nullopt disables
  PrivacyBudget budget{1.0, 0.01};
  SolverSettings solver;
  int kmeans_restarts = 10;
  int kmeans_max_iters = 100;
  EigenSide side = EigenSide::top;
  // Test hook: forces the noise standard deviation (0 disables noise).
  std::optional<double> noise_override;
};

// Per-vertex coordinates with the degree weights k-means minimizes against.
struct Embedding {
  Eigen::MatrixXd points;   // n x k
  Eigen::VectorXd weights;  // degrees
};

struct KmeansResult {
  std::vector<int> labels;
  Eigen::MatrixXd centers;  // k x dim
  double cost = 0.0;
  int empty_clusters = 0;
};

struct PipelineDiagnostics {
  double sigma = 0.0;
  double lambda = 0.0;  // 0 when the regularizer is disabled
  int solver_iterations = 0;
  bool solver_converged = false;
  double solver_primal_residual = 0.0;
  double solver_dual_residual = 0.0;
  double objective = 0.0;
  std::vector<double> top_eigenvalues;  // leading k+1 of the embedded matrix
  double eigengap = 0.0;                // mu_k - mu_{k+1}
  double kmeans_cost = 0.0;
  std::uint64_t seed = 0;
  int rejected_vertices = 0;  // zero-degree vertices parked after edge flips
  int empty_clusters = 0;

  std::string to_json() const;
};

struct PipelineResult {
  Clustering clustering;
  PipelineDiagnostics diagnostics;
};

// Reference matrix for a known partition: Z_uv = sqrt(d_u d_v) when u and v
// share a cluster, else 0.  Its nonzero eigenvalues are cluster volumes.
Eigen::MatrixXd ideal_gram(const Graph& g, const Clustering& truth);

// Rows F(u) = deg(u)^{-1/2} (f_1(u), ..., f_k(u)) from the chosen end of the
// spectrum of x2.  Degrees supply the k-means weights.
Embedding embed(const Eigen::MatrixXd& x2, const Eigen::VectorXd& degrees,
                int k, EigenSide side = EigenSide::top);

// Weighted k-means: distance-squared seeding and Lloyd steps, both weighted
// by the embedding weights.  Restarts keep the lowest final cost; ties keep
// the earliest restart.  Deterministic per seed.
KmeansResult kmeans(const Embedding& emb, int k, int restarts, int max_iters,
                    std::uint64_t seed);

// Full private pipeline: solve the regularized relaxation, scale and noise
// the solution, embed, cluster.  Requires cfg.lambda.
PipelineResult private_cluster(const Graph& g, const PipelineConfig& cfg,
                               std::uint64_t seed);

// Baseline: flip every pair via randomized response, then run the
// unregularized relaxation on the flipped graph with no added noise.
// Zero-degree vertices of the flipped graph are parked in an extra reject
// cluster (label cfg.k) and flagged in the diagnostics.
PipelineResult rr_baseline_cluster(const Graph& g, const PipelineConfig& cfg,
                                   std::uint64_t seed);

}  // namespace dpc
