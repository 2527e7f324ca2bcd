#pragma once

#include <Eigen/Dense>
#include <iosfwd>
#include <optional>
#include <utility>
#include <vector>

#include "dpc/graph.hpp"

namespace dpc {

// Regularized clustering relaxation over the domain
//   D = { X psd, X >= 0 entrywise, X_uu = 1/n, <A_bal, X> >= c_bal }
// with objective <L, X> + (kappa / 2) ||D^{1/2} X D^{1/2}||_F^2, where
// A_bal = n diag(d o d) - d d^T, c_bal = b m^2 / n and kappa = 2n / (lambda m).
// A disabled regularizer (no lambda) sets kappa = 0.
class SdpInstance {
 public:
  SdpInstance(Eigen::MatrixXd laplacian, Eigen::VectorXd degrees, long long m,
              double b, std::optional<double> lambda);

  int n() const { return static_cast<int>(degrees_.size()); }
  long long m() const { return m_; }
  double b() const { return b_; }
  std::optional<double> lambda() const { return lambda_; }
  double kappa() const { return kappa_; }
  double balance_rhs() const { return c_bal_; }
  const Eigen::MatrixXd& laplacian() const { return laplacian_; }
  const Eigen::VectorXd& degrees() const { return degrees_; }

  // n diag(d o d) - d d^T, built on first use.
  const Eigen::MatrixXd& balance_matrix() const;

 private:
  Eigen::MatrixXd laplacian_;
  Eigen::VectorXd degrees_;
  long long m_;
  double b_;
  std::optional<double> lambda_;
  double kappa_;
  double c_bal_;
  mutable Eigen::MatrixXd balance_;  // cache; empty until first use
};

struct SolverSettings {
  double rho = 0.0;          // consensus penalty; 0 means the default 1/n
  double tol_primal = 1e-6;  // scaled by n inside the solver
  double tol_dual = 1e-6;    // scaled by n inside the solver
  double tol_feas = 1e-6;    // scaled by n for the feasibility certificate
  int max_iters = 20000;
  double over_relaxation = 1.0;  // valid range [1, 1.8]
  bool adapt_rho = true;         // residual balancing, factor 2 at ratio > 10
  bool record_history = false;   // keep per-iteration combined residuals
  std::ostream* iter_log = nullptr;  // CSV: iter,objective,primal,dual
  int log_every = 50;
};

struct GramSolution {
  Eigen::MatrixXd x;
  double objective = 0.0;
  double primal_residual = 0.0;
  double dual_residual = 0.0;
  int iterations = 0;
  bool converged = false;
  std::vector<double> residual_history;  // filled when record_history is set
};

// Builds an instance from a graph.  Rejects empty graphs, isolated vertices,
// b outside [0, 1] and non-positive lambda.
SdpInstance build_instance(const Graph& g, double b,
                           std::optional<double> lambda);

double objective(const SdpInstance& inst, const Eigen::MatrixXd& x);

// Nearest positive semidefinite matrix in Frobenius norm.  Eigenvalues within
// 1e-10 of zero are snapped to zero so near-ties clamp together.
Eigen::MatrixXd project_psd(const Eigen::MatrixXd& m);

// Clamps entries to be nonnegative and pins the diagonal to diag_value.
Eigen::MatrixXd project_box_diag(const Eigen::MatrixXd& m, double diag_value);

// Projection onto { M : <A, M> >= c }.
Eigen::MatrixXd project_halfspace(const Eigen::MatrixXd& m,
                                  const Eigen::MatrixXd& a, double c);

// Eigendecomposition of a symmetric matrix: eigenvalues in descending order,
// eigenvectors as matching columns.
std::pair<Eigen::VectorXd, Eigen::MatrixXd> sym_eig(const Eigen::MatrixXd& m);

// Three-block consensus splitting: local copies for the psd cone, the
// box/diagonal slab and the balance halfspace, with the closed-form entrywise
// global update
//   X_uv = (3 rho avg_i(Y_i - U_i)_uv - L_uv) / (3 rho + kappa d_u d_v).
// The returned X is symmetrized and box/diagonal-projected once.  A run that
// exhausts max_iters returns its best iterate with converged = false.
GramSolution solve(const SdpInstance& inst, const SolverSettings& settings = {});

}  // namespace dpc
