#include "dpc/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <json.hpp>

#include "dpc/errors.hpp"
#include "dpc/rng.hpp"

namespace dpc {

std::string PipelineDiagnostics::to_json() const {
  nlohmann::json j;
  j["sigma"] = sigma;
  j["lambda"] = lambda;
  j["solver"] = {{"iterations", solver_iterations},
                 {"converged", solver_converged},
                 {"primal_residual", solver_primal_residual},
                 {"dual_residual", solver_dual_residual},
                 {"objective", objective}};
  j["top_eigenvalues"] = top_eigenvalues;
  j["eigengap"] = eigengap;
  j["kmeans_cost"] = kmeans_cost;
  j["seed"] = seed;
  j["rejected_vertices"] = rejected_vertices;
  j["empty_clusters"] = empty_clusters;
  return j.dump(2);
}

Eigen::MatrixXd ideal_gram(const Graph& g, const Clustering& truth) {
  if (truth.n() != g.n())
    throw InvalidInput("ideal_gram: clustering size differs from graph");
  int n = g.n();
  Eigen::VectorXd root(n);
  for (int u = 0; u < n; ++u)
    root(u) = std::sqrt(static_cast<double>(g.degree(u)));
  Eigen::MatrixXd z = Eigen::MatrixXd::Zero(n, n);
  for (int u = 0; u < n; ++u)
    for (int v = 0; v < n; ++v)
      if (truth.labels[u] == truth.labels[v]) z(u, v) = root(u) * root(v);
  return z;
}

Embedding embed(const Eigen::MatrixXd& x2, const Eigen::VectorXd& degrees,
                int k, EigenSide side) {
  int n = static_cast<int>(x2.rows());
  if (x2.cols() != n) throw InvalidInput("embed: matrix not square");
  if (degrees.size() != n) throw InvalidInput("embed: degree vector mismatch");
  if (k < 1 || k > n) throw InvalidInput("embed: k must lie in [1, n]");
  for (int u = 0; u < n; ++u)
    if (!(degrees(u) > 0.0))
      throw InvalidInput("embed: degrees must be positive");

  auto [values, vectors] = sym_eig(x2);
  Eigen::MatrixXd basis(n, k);
  if (side == EigenSide::top) {
    basis = vectors.leftCols(k);
  } else {
    // k smallest, smallest first.
    basis = vectors.rightCols(k).rowwise().reverse();
  }
  Embedding emb;
  emb.points = degrees.cwiseSqrt().cwiseInverse().asDiagonal() * basis;
  emb.weights = degrees;
  return emb;
}

namespace {

// Samples an index with probability proportional to mass (nonnegative, not
// all zero).
int sample_proportional(const Eigen::VectorXd& mass, Rng& rng) {
  double total = mass.sum();
  double t = rng.uniform() * total;
  double acc = 0.0;
  int last = 0;
  for (int i = 0; i < mass.size(); ++i) {
    if (mass(i) <= 0.0) continue;
    acc += mass(i);
    last = i;
    if (t < acc) return i;
  }
  return last;  // guards against roundoff at t ~ total
}

struct LloydOutcome {
  std::vector<int> labels;
  Eigen::MatrixXd centers;
  double cost;
};

LloydOutcome run_lloyd(const Eigen::MatrixXd& points,
                       const Eigen::VectorXd& weights, int k, int max_iters,
                       Rng& rng) {
  int n = static_cast<int>(points.rows());
  int dim = static_cast<int>(points.cols());

  // Distance-squared seeding, weighted: the first center is drawn by weight,
  // each next one by weight times squared distance to the nearest center.
  Eigen::MatrixXd centers(k, dim);
  Eigen::VectorXd nearest =
      Eigen::VectorXd::Constant(n, std::numeric_limits<double>::infinity());
  centers.row(0) = points.row(sample_proportional(weights, rng));
  for (int c = 1; c < k; ++c) {
    for (int u = 0; u < n; ++u) {
      double d2 = (points.row(u) - centers.row(c - 1)).squaredNorm();
      if (d2 < nearest(u)) nearest(u) = d2;
    }
    Eigen::VectorXd mass = weights.cwiseProduct(nearest);
    if (mass.sum() <= 0.0) mass = weights;  // all points already covered
    centers.row(c) = points.row(sample_proportional(mass, rng));
  }

  std::vector<int> labels(n, 0);
  std::vector<int> prev_labels;
  for (int it = 0; it < max_iters; ++it) {
    // Assignment; ties go to the lowest center index.
    for (int u = 0; u < n; ++u) {
      double best = std::numeric_limits<double>::infinity();
      int arg = 0;
      for (int c = 0; c < k; ++c) {
        double d2 = (points.row(u) - centers.row(c)).squaredNorm();
        if (d2 < best) {
          best = d2;
          arg = c;
        }
      }
      labels[u] = arg;
    }
    if (labels == prev_labels) break;
    prev_labels = labels;

    // Weighted centroid update; empty clusters keep their center.
    Eigen::MatrixXd sums = Eigen::MatrixXd::Zero(k, dim);
    Eigen::VectorXd mass = Eigen::VectorXd::Zero(k);
    for (int u = 0; u < n; ++u) {
      sums.row(labels[u]) += weights(u) * points.row(u);
      mass(labels[u]) += weights(u);
    }
    for (int c = 0; c < k; ++c)
      if (mass(c) > 0.0) centers.row(c) = sums.row(c) / mass(c);
  }

  double cost = 0.0;
  for (int u = 0; u < n; ++u)
    cost += weights(u) * (points.row(u) - centers.row(labels[u])).squaredNorm();
  return {std::move(labels), std::move(centers), cost};
}

}  // namespace

KmeansResult kmeans(const Embedding& emb, int k, int restarts, int max_iters,
                    std::uint64_t seed) {
  int n = static_cast<int>(emb.points.rows());
  if (k < 1 || k > n) throw InvalidInput("kmeans: k must lie in [1, n]");
  if (restarts < 1) throw InvalidInput("kmeans: need at least one restart");
  if (max_iters < 1) throw InvalidInput("kmeans: need at least one iteration");
  if (emb.weights.size() != n) throw InvalidInput("kmeans: weight size mismatch");
  if (emb.weights.minCoeff() <= 0.0)
    throw InvalidInput("kmeans: weights must be positive");

  LloydOutcome best{{}, {}, std::numeric_limits<double>::infinity()};
  for (int r = 0; r < restarts; ++r) {
    Rng rng(derive_seed(seed, static_cast<std::uint64_t>(r)));
    LloydOutcome out = run_lloyd(emb.points, emb.weights, k, max_iters, rng);
    if (out.cost < best.cost) best = std::move(out);
  }

  KmeansResult res;
  res.labels = std::move(best.labels);
  res.centers = std::move(best.centers);
  res.cost = best.cost;
  std::vector<int> counts(k, 0);
  for (int l : res.labels) ++counts[l];
  for (int c : counts)
    if (c == 0) ++res.empty_clusters;
  return res;
}

namespace {

void fill_spectrum_diagnostics(const Eigen::MatrixXd& x2, int k,
                               PipelineDiagnostics& diag) {
  auto [values, vectors] = sym_eig(x2);
  int take = std::min<int>(k + 1, static_cast<int>(values.size()));
  diag.top_eigenvalues.assign(values.data(), values.data() + take);
  if (values.size() > k)
    diag.eigengap = values(k - 1) - values(k);
  else
    diag.eigengap = values(k - 1);
}

}  // namespace

PipelineResult private_cluster(const Graph& g, const PipelineConfig& cfg,
                               std::uint64_t seed) {
  if (!cfg.lambda)
    throw InvalidInput("private_cluster: regularizer weight is required");

  SdpInstance inst = build_instance(g, cfg.b, cfg.lambda);
  GramSolution sol = solve(inst, cfg.solver);

  double sigma = cfg.noise_override
                     ? *cfg.noise_override
                     : noise_scale(cfg.budget, *cfg.lambda, g.m()).sigma();
  if (sigma < 0.0) throw InvalidInput("private_cluster: negative noise override");

  Eigen::MatrixXd x2 =
      privatize_gram(sol.x, inst.degrees(), sigma, derive_seed(seed, 1));
  Embedding emb = embed(x2, inst.degrees(), cfg.k, cfg.side);
  KmeansResult km = kmeans(emb, cfg.k, cfg.kmeans_restarts,
                           cfg.kmeans_max_iters, derive_seed(seed, 2));

  PipelineResult res;
  res.clustering = Clustering::from_labels(km.labels, cfg.k);
  res.diagnostics.sigma = sigma;
  res.diagnostics.lambda = *cfg.lambda;
  res.diagnostics.solver_iterations = sol.iterations;
  res.diagnostics.solver_converged = sol.converged;
  res.diagnostics.solver_primal_residual = sol.primal_residual;
  res.diagnostics.solver_dual_residual = sol.dual_residual;
  res.diagnostics.objective = sol.objective;
  fill_spectrum_diagnostics(x2, cfg.k, res.diagnostics);
  res.diagnostics.kmeans_cost = km.cost;
  res.diagnostics.seed = seed;
  res.diagnostics.empty_clusters = km.empty_clusters;
  return res;
}

PipelineResult rr_baseline_cluster(const Graph& g, const PipelineConfig& cfg,
                                   std::uint64_t seed) {
  Graph flipped = randomized_response(g, cfg.budget.eps, derive_seed(seed, 0));
  if (flipped.m() == 0)
    throw InvalidInput("rr_baseline_cluster: flipped graph has no edges");

  // Zero-degree vertices cannot enter the relaxation; park them in an extra
  // reject cluster at the end.
  std::vector<int> keep, index(flipped.n(), -1);
  for (int u = 0; u < flipped.n(); ++u) {
    if (flipped.degree(u) > 0) {
      index[u] = static_cast<int>(keep.size());
      keep.push_back(u);
    }
  }
  std::vector<std::pair<int, int>> kept_edges;
  for (auto [u, v] : flipped.edges())
    kept_edges.emplace_back(index[u], index[v]);
  Graph h = Graph::from_edges(static_cast<int>(keep.size()), kept_edges);

  SdpInstance inst = build_instance(h, cfg.b, std::nullopt);
  GramSolution sol = solve(inst, cfg.solver);

  Eigen::MatrixXd x2 = privatize_gram(sol.x, inst.degrees(), 0.0, 0);
  Embedding emb = embed(x2, inst.degrees(), cfg.k, cfg.side);
  KmeansResult km = kmeans(emb, cfg.k, cfg.kmeans_restarts,
                           cfg.kmeans_max_iters, derive_seed(seed, 2));

  int rejected = flipped.n() - static_cast<int>(keep.size());
  std::vector<int> labels(g.n(), cfg.k);
  for (size_t i = 0; i < keep.size(); ++i) labels[keep[i]] = km.labels[i];

  PipelineResult res;
  res.clustering =
      Clustering::from_labels(std::move(labels), rejected > 0 ? cfg.k + 1 : cfg.k);
  res.diagnostics.sigma = 0.0;
  res.diagnostics.lambda = 0.0;
  res.diagnostics.solver_iterations = sol.iterations;
  res.diagnostics.solver_converged = sol.converged;
  res.diagnostics.solver_primal_residual = sol.primal_residual;
  res.diagnostics.solver_dual_residual = sol.dual_residual;
  res.diagnostics.objective = sol.objective;
  fill_spectrum_diagnostics(x2, cfg.k, res.diagnostics);
  res.diagnostics.kmeans_cost = km.cost;
  res.diagnostics.seed = seed;
  res.diagnostics.rejected_vertices = rejected;
  res.diagnostics.empty_clusters = km.empty_clusters;
  return res;
}

}  // namespace dpc
