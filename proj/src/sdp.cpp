#include "dpc/sdp.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include "dpc/errors.hpp"

namespace dpc {

SdpInstance::SdpInstance(Eigen::MatrixXd laplacian, Eigen::VectorXd degrees,
                         long long m, double b, std::optional<double> lambda)
    : laplacian_(std::move(laplacian)),
      degrees_(std::move(degrees)),
      m_(m),
      b_(b),
      lambda_(lambda) {
  double n = static_cast<double>(degrees_.size());
  kappa_ = lambda_ ? 2.0 * n / (*lambda_ * static_cast<double>(m_)) : 0.0;
  c_bal_ = b_ * static_cast<double>(m_) * static_cast<double>(m_) / n;
}

const Eigen::MatrixXd& SdpInstance::balance_matrix() const {
  if (balance_.size() == 0) {
    double nd = static_cast<double>(n());
    balance_ = -degrees_ * degrees_.transpose();
    balance_.diagonal() += nd * degrees_.cwiseProduct(degrees_);
  }
  return balance_;
}

SdpInstance build_instance(const Graph& g, double b,
                           std::optional<double> lambda) {
  if (g.m() == 0) throw InvalidInput("build_instance: graph has no edges");
  for (int u = 0; u < g.n(); ++u)
    if (g.degree(u) == 0)
      throw InvalidInput("build_instance: isolated vertex " + std::to_string(u));
  if (b < 0.0 || b > 1.0)
    throw InvalidInput("build_instance: b must lie in [0, 1]");
  if (lambda && *lambda <= 0.0)
    throw InvalidInput("build_instance: lambda must be positive");
  Eigen::VectorXd d(g.n());
  for (int u = 0; u < g.n(); ++u) d(u) = static_cast<double>(g.degree(u));
  return SdpInstance(laplacian(g), d, g.m(), b, lambda);
}

double objective(const SdpInstance& inst, const Eigen::MatrixXd& x) {
  if (x.rows() != inst.n() || x.cols() != inst.n())
    throw InvalidInput("objective: matrix size differs from instance");
  double lin = inst.laplacian().cwiseProduct(x).sum();
  if (inst.kappa() == 0.0) return lin;
  const Eigen::VectorXd& d = inst.degrees();
  // ||D^{1/2} X D^{1/2}||_F^2 = sum_{uv} d_u d_v X_uv^2
  double reg = (d.asDiagonal() * x.cwiseProduct(x) * d.asDiagonal()).sum();
  return lin + 0.5 * inst.kappa() * reg;
}

Eigen::MatrixXd project_psd(const Eigen::MatrixXd& m) {
  Eigen::MatrixXd sym = 0.5 * (m + m.transpose());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sym);
  if (es.info() != Eigen::Success)
    throw NumericalFailure("project_psd: eigensolver failed");
  Eigen::VectorXd ev = es.eigenvalues();
  for (int i = 0; i < ev.size(); ++i) ev(i) = ev(i) < 1e-10 ? 0.0 : ev(i);
  Eigen::MatrixXd out =
      es.eigenvectors() * ev.asDiagonal() * es.eigenvectors().transpose();
  return 0.5 * (out + out.transpose());
}

Eigen::MatrixXd project_box_diag(const Eigen::MatrixXd& m, double diag_value) {
  Eigen::MatrixXd out = m.cwiseMax(0.0);
  out.diagonal().setConstant(diag_value);
  return out;
}

Eigen::MatrixXd project_halfspace(const Eigen::MatrixXd& m,
                                  const Eigen::MatrixXd& a, double c) {
  if (m.rows() != a.rows() || m.cols() != a.cols())
    throw InvalidInput("project_halfspace: shape mismatch");
  double val = a.cwiseProduct(m).sum();
  if (val >= c) return m;
  double denom = a.squaredNorm();
  if (denom == 0.0)
    throw InvalidInput("project_halfspace: zero normal with violated bound");
  return m + ((c - val) / denom) * a;
}

std::pair<Eigen::VectorXd, Eigen::MatrixXd> sym_eig(const Eigen::MatrixXd& m) {
  if (m.rows() != m.cols()) throw InvalidInput("sym_eig: matrix not square");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (m + m.transpose()));
  if (es.info() != Eigen::Success)
    throw NumericalFailure("sym_eig: eigensolver failed");
  return {es.eigenvalues().reverse(), es.eigenvectors().rowwise().reverse()};
}

namespace {

struct FeasReport {
  double min_eig;
  double balance_slack;  // <A, X> - c_bal, negative when violated
};

FeasReport feasibility_of(const SdpInstance& inst, const Eigen::MatrixXd& x) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(x,
                                                    Eigen::EigenvaluesOnly);
  double min_eig =
      es.info() == Eigen::Success ? es.eigenvalues()(0) : -HUGE_VAL;
  double bal = inst.balance_matrix().cwiseProduct(x).sum() - inst.balance_rhs();
  return {min_eig, bal};
}

}  // namespace

GramSolution solve(const SdpInstance& inst, const SolverSettings& settings) {
  const int n = inst.n();
  const double nd = static_cast<double>(n);
  if (settings.over_relaxation < 1.0 || settings.over_relaxation > 1.8)
    throw InvalidInput("solve: over_relaxation outside [1, 1.8]");
  if (settings.max_iters <= 0) throw InvalidInput("solve: max_iters must be positive");

  double rho = settings.rho > 0.0 ? settings.rho : 1.0 / nd;
  const double alpha = settings.over_relaxation;
  const Eigen::MatrixXd& l = inst.laplacian();
  const Eigen::MatrixXd& a_bal = inst.balance_matrix();
  const double c_bal = inst.balance_rhs();
  const double a_norm = a_bal.norm();
  const double diag_value = 1.0 / nd;

  // Denominator of the entrywise global update; depends on rho.
  Eigen::MatrixXd quad =
      inst.kappa() * (inst.degrees() * inst.degrees().transpose());
  Eigen::MatrixXd denom = quad.array() + 3.0 * rho;

  Eigen::MatrixXd x = Eigen::MatrixXd::Zero(n, n);
  x.diagonal().setConstant(diag_value);
  Eigen::MatrixXd y1 = x, y2 = x, y3 = x;
  Eigen::MatrixXd u1 = Eigen::MatrixXd::Zero(n, n), u2 = u1, u3 = u1;

  const double eps_pri = settings.tol_primal * nd;
  const double eps_dual = settings.tol_dual * nd;
  const double eps_feas = settings.tol_feas * nd;

  GramSolution best;
  double best_combined = HUGE_VAL;
  bool residuals_ok = false;
  int last_cert = -1000000;
  GramSolution out;
  out.converged = false;

  Eigen::MatrixXd x_prev(n, n), yhat(n, n), sum_yu(n, n);

  int iter = 0;
  for (iter = 1; iter <= settings.max_iters; ++iter) {
    x_prev = x;

    y1 = project_psd(x + u1);
    y2 = project_box_diag(x + u2, diag_value);
    y3 = project_halfspace(x + u3, a_bal, c_bal);

    sum_yu.setZero();
    if (alpha == 1.0) {
      sum_yu = (y1 - u1) + (y2 - u2) + (y3 - u3);
    } else {
      // Relaxation mixes each local copy with the previous global iterate.
      sum_yu = alpha * (y1 + y2 + y3) + 3.0 * (1.0 - alpha) * x_prev -
               (u1 + u2 + u3);
    }
    x = (rho * sum_yu - l).cwiseQuotient(denom);

    if (alpha == 1.0) {
      u1 += x - y1;
      u2 += x - y2;
      u3 += x - y3;
    } else {
      u1 += x - (alpha * y1 + (1.0 - alpha) * x_prev);
      u2 += x - (alpha * y2 + (1.0 - alpha) * x_prev);
      u3 += x - (alpha * y3 + (1.0 - alpha) * x_prev);
    }

    double r = std::sqrt((x - y1).squaredNorm() + (x - y2).squaredNorm() +
                         (x - y3).squaredNorm());
    double s = rho * std::sqrt(3.0) * (x - x_prev).norm();
    double combined = std::max(r, s);
    if (settings.record_history) out.residual_history.push_back(combined);

    if (settings.iter_log && iter % settings.log_every == 0)
      *settings.iter_log << iter << ',' << objective(inst, x) << ',' << r << ','
                         << s << '\n';

    if (combined < best_combined) {
      best_combined = combined;
      best.x = x;
      best.primal_residual = r;
      best.dual_residual = s;
      best.iterations = iter;
    }

    residuals_ok = r <= eps_pri && s <= eps_dual;
    if (residuals_ok && iter - last_cert >= 25) {
      last_cert = iter;
      Eigen::MatrixXd candidate =
          project_box_diag(0.5 * (x + x.transpose()), diag_value);
      FeasReport feas = feasibility_of(inst, candidate);
      if (feas.min_eig >= -eps_feas && feas.balance_slack >= -eps_feas * a_norm) {
        out.x = std::move(candidate);
        out.objective = objective(inst, out.x);
        out.primal_residual = r;
        out.dual_residual = s;
        out.iterations = iter;
        out.converged = true;
        return out;
      }
    }

    if (settings.adapt_rho && iter % 25 == 0) {
      if (r > 10.0 * s) {
        rho *= 2.0;
        u1 *= 0.5;
        u2 *= 0.5;
        u3 *= 0.5;
        denom = quad.array() + 3.0 * rho;
      } else if (s > 10.0 * r) {
        rho *= 0.5;
        u1 *= 2.0;
        u2 *= 2.0;
        u3 *= 2.0;
        denom = quad.array() + 3.0 * rho;
      }
    }
  }

  // Exhausted the budget: report the best iterate seen.
  out.x = project_box_diag(0.5 * (best.x + best.x.transpose()), diag_value);
  out.objective = objective(inst, out.x);
  out.primal_residual = best.primal_residual;
  out.dual_residual = best.dual_residual;
  out.iterations = settings.max_iters;
  out.converged = false;
  return out;
}

}  // namespace dpc
