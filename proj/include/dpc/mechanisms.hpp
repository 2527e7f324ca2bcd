#pragma once

#include <Eigen/Dense>
#include <cstdint>

#include "dpc/graph.hpp"

namespace dpc {

struct PrivacyBudget {
  double eps = 0.0;
  double delta = 0.0;
};

struct NoiseScale {
  double variance = 0.0;
  double sigma() const;
};

// Gaussian calibration for the scaled solution matrix:
//   sigma^2 = 24 (lambda + 3) m ln(2 / delta) / eps^2.
// Requires 0 < eps <= 1, 0 < delta <= 1, lambda > 0, m >= 1.
NoiseScale noise_scale(const PrivacyBudget& budget, double lambda, long long m);

// Symmetric matrix with iid N(0, sigma^2) entries on and above the diagonal,
// mirrored below.  sigma = 0 returns zeros.  Deterministic per seed.
Eigen::MatrixXd sample_symmetric_gaussian(int n, double sigma,
                                          std::uint64_t seed);

// X2 = n D^{1/2} X1 D^{1/2} + W with W symmetric Gaussian at the given sigma.
// sigma = 0 (the test hook) applies no noise.
Eigen::MatrixXd privatize_gram(const Eigen::MatrixXd& x1,
                               const Eigen::VectorXd& degrees, double sigma,
                               std::uint64_t seed);

// Convenience overload deriving sigma from the budget via noise_scale.
Eigen::MatrixXd privatize_gram(const Eigen::MatrixXd& x1,
                               const Eigen::VectorXd& degrees,
                               const PrivacyBudget& budget, double lambda,
                               long long m, std::uint64_t seed);

// Flip probability 1 / (1 + e^eps) of the edge-flip mechanism; eps > 0.
double rr_flip_prob(double eps);

// Flips every unordered vertex pair independently with probability
// 1 / (1 + e^eps).  Self-pairs are never touched.  One uniform draw per pair
// in lexicographic order, so identical seeds give identical graphs.
Graph randomized_response(const Graph& g, double eps, std::uint64_t seed);

}  // namespace dpc
