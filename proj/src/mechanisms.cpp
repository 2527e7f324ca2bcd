#include "dpc/mechanisms.hpp"

#include <cmath>

#include "dpc/errors.hpp"
#include "dpc/rng.hpp"

namespace dpc {

double NoiseScale::sigma() const { return std::sqrt(variance); }

NoiseScale noise_scale(const PrivacyBudget& budget, double lambda,
                       long long m) {
  if (!(budget.eps > 0.0) || budget.eps > 1.0)
    throw InvalidInput("noise_scale: eps must lie in (0, 1]");
  if (!(budget.delta > 0.0) || budget.delta > 1.0)
    throw InvalidInput("noise_scale: delta must lie in (0, 1]");
  if (!(lambda > 0.0)) throw InvalidInput("noise_scale: lambda must be positive");
  if (m < 1) throw InvalidInput("noise_scale: need at least one edge");
  NoiseScale s;
  s.variance = 24.0 * (lambda + 3.0) * static_cast<double>(m) *
               std::log(2.0 / budget.delta) / (budget.eps * budget.eps);
  return s;
}

Eigen::MatrixXd sample_symmetric_gaussian(int n, double sigma,
                                          std::uint64_t seed) {
  if (n <= 0) throw InvalidInput("sample_symmetric_gaussian: n must be positive");
  if (sigma < 0.0)
    throw InvalidInput("sample_symmetric_gaussian: sigma must be nonnegative");
  Eigen::MatrixXd w = Eigen::MatrixXd::Zero(n, n);
  if (sigma == 0.0) return w;
  Rng rng(seed);
  for (int i = 0; i < n; ++i) {
    for (int j = i; j < n; ++j) {
      double v = rng.normal(sigma);
      w(i, j) = v;
      w(j, i) = v;
    }
  }
  return w;
}

Eigen::MatrixXd privatize_gram(const Eigen::MatrixXd& x1,
                               const Eigen::VectorXd& degrees, double sigma,
                               std::uint64_t seed) {
  if (x1.rows() != x1.cols())
    throw InvalidInput("privatize_gram: matrix not square");
  if (degrees.size() != x1.rows())
    throw InvalidInput("privatize_gram: degree vector size mismatch");
  int n = static_cast<int>(x1.rows());
  Eigen::VectorXd root = degrees.cwiseSqrt();
  Eigen::MatrixXd x2 = static_cast<double>(n) *
                       (root.asDiagonal() * x1 * root.asDiagonal());
  if (sigma > 0.0) x2 += sample_symmetric_gaussian(n, sigma, seed);
  return x2;
}

Eigen::MatrixXd privatize_gram(const Eigen::MatrixXd& x1,
                               const Eigen::VectorXd& degrees,
                               const PrivacyBudget& budget, double lambda,
                               long long m, std::uint64_t seed) {
  return privatize_gram(x1, degrees, noise_scale(budget, lambda, m).sigma(),
                        seed);
}

double rr_flip_prob(double eps) {
  if (!(eps > 0.0)) throw InvalidInput("rr_flip_prob: eps must be positive");
  return 1.0 / (1.0 + std::exp(eps));
}

Graph randomized_response(const Graph& g, double eps, std::uint64_t seed) {
  if (g.has_self_loops())
    throw InvalidInput("randomized_response: input must be loop-free");
  double p = rr_flip_prob(eps);
  Rng rng(seed);
  std::vector<std::pair<int, int>> edges;
  for (int u = 0; u < g.n(); ++u) {
    for (int v = u + 1; v < g.n(); ++v) {
      bool edge = g.has_edge(u, v);
      if (rng.uniform() < p) edge = !edge;
      if (edge) edges.emplace_back(u, v);
    }
  }
  return Graph::from_edges(g.n(), edges);
}

}  // namespace dpc
