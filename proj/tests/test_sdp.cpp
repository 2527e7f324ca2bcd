#include <doctest.h>

#include <cmath>
#include <sstream>

#include "dpc/errors.hpp"
#include "dpc/graph.hpp"
#include "dpc/rng.hpp"
#include "dpc/sdp.hpp"
#include "oracles.hpp"

using namespace dpc;

namespace {

Graph cycle_graph(int n) {
  std::vector<std::pair<int, int>> edges;
  for (int u = 0; u < n; ++u) edges.emplace_back(u, (u + 1) % n);
  return Graph::from_edges(n, edges);
}

// Two disjoint triangles: the cleanest two-cluster instance.
Graph triangle_pair() {
  return Graph::from_edges(6, {{0, 1}, {1, 2}, {0, 2}, {3, 4}, {4, 5}, {3, 5}});
}

Graph random_connected_graph(int n, double p, std::uint64_t seed) {
  for (std::uint64_t attempt = 0;; ++attempt) {
    Rng rng(derive_seed(seed, 77, attempt));
    std::vector<std::pair<int, int>> edges;
    for (int u = 0; u < n; ++u)
      for (int v = u + 1; v < n; ++v)
        if (rng.uniform() < p) edges.emplace_back(u, v);
    Graph g = Graph::from_edges(n, edges);
    bool ok = g.m() > 0;
    for (int u = 0; ok && u < n; ++u)
      if (g.degree(u) == 0) ok = false;
    if (ok) return g;
  }
}

oracle::Domain domain_of_instance(const SdpInstance& inst) {
  return oracle::domain_of(inst.degrees(), inst.m(), inst.b());
}

}  // namespace

TEST_CASE("instance carries the balance data of the cycle") {
  Graph c4 = cycle_graph(4);
  SdpInstance inst = build_instance(c4, 0.5, 2.0);
  CHECK(inst.n() == 4);
  CHECK(inst.m() == 4);
  // kappa = 2n / (lambda m) = 8 / 8 = 1.
  CHECK(inst.kappa() == doctest::Approx(1.0));
  // c_bal = b m^2 / n = 0.5 * 16 / 4 = 2.
  CHECK(inst.balance_rhs() == doctest::Approx(2.0));

  // All degrees are 2, so A_bal = 16 I - 4 J with zero row sums.
  const Eigen::MatrixXd& a = inst.balance_matrix();
  Eigen::MatrixXd want =
      16.0 * Eigen::MatrixXd::Identity(4, 4) - 4.0 * Eigen::MatrixXd::Ones(4, 4);
  CHECK((a - want).norm() == doctest::Approx(0.0));
  CHECK(a.rowwise().sum().norm() == doctest::Approx(0.0));

  // Disabled regularizer means kappa = 0.
  CHECK(build_instance(c4, 0.5, std::nullopt).kappa() == 0.0);
}

TEST_CASE("instance construction rejects bad inputs") {
  Graph c4 = cycle_graph(4);
  CHECK_THROWS_AS(build_instance(c4, -0.1, 1.0), InvalidInput);
  CHECK_THROWS_AS(build_instance(c4, 1.1, 1.0), InvalidInput);
  CHECK_THROWS_AS(build_instance(c4, 0.5, 0.0), InvalidInput);
  CHECK_THROWS_AS(build_instance(c4, 0.5, -1.0), InvalidInput);
  Graph isolated = Graph::from_edges(3, {{0, 1}});
  CHECK_THROWS_AS(build_instance(isolated, 0.5, 1.0), InvalidInput);
}

TEST_CASE("objective splits into laplacian term and weighted norm") {
  Graph c4 = cycle_graph(4);
  double lambda = 2.0;
  SdpInstance inst = build_instance(c4, 0.5, lambda);
  int n = 4;
  Eigen::MatrixXd eye = Eigen::MatrixXd::Identity(n, n) / n;
  // <L, I/n> = 2m/n and the regularizer adds sum d^2 / (lambda m n).
  double sum_d2 = 4.0 * 4.0;
  double want = 2.0 * 4.0 / n + sum_d2 / (lambda * 4.0 * n);
  CHECK(objective(inst, eye) == doctest::Approx(want));

  // Cross-check against the from-scratch oracle on a random psd-ish matrix.
  Rng rng(5);
  Eigen::MatrixXd r(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) r(i, j) = rng.normal();
  Eigen::MatrixXd x = 0.5 * (r + r.transpose());
  CHECK(objective(inst, x) ==
        doctest::Approx(oracle::objective(inst.laplacian(), inst.degrees(),
                                          inst.kappa(), x))
            .epsilon(1e-12));

  CHECK_THROWS_AS(objective(inst, Eigen::MatrixXd::Zero(3, 3)), InvalidInput);
}

TEST_CASE("projections behave on hand-checked inputs") {
  Eigen::MatrixXd m(2, 2);
  m << 1.0, 0.0, 0.0, -1.0;
  Eigen::MatrixXd p = project_psd(m);
  CHECK(p(0, 0) == doctest::Approx(1.0));
  CHECK(p(1, 1) == doctest::Approx(0.0));
  CHECK((p - p.transpose()).norm() == doctest::Approx(0.0));

  // Asymmetric input is symmetrized first.
  Eigen::MatrixXd asym(2, 2);
  asym << 1.0, 4.0, 0.0, 1.0;
  Eigen::MatrixXd ps = project_psd(asym);
  CHECK(ps(0, 1) == doctest::Approx(ps(1, 0)));

  Eigen::MatrixXd b(2, 2);
  b << 0.7, -0.3, -0.3, 0.1;
  Eigen::MatrixXd pb = project_box_diag(b, 0.5);
  CHECK(pb(0, 0) == doctest::Approx(0.5));
  CHECK(pb(1, 1) == doctest::Approx(0.5));
  CHECK(pb(0, 1) == doctest::Approx(0.0));

  Eigen::MatrixXd a = Eigen::MatrixXd::Identity(2, 2);
  Eigen::MatrixXd inside = 3.0 * Eigen::MatrixXd::Identity(2, 2);
  CHECK((project_halfspace(inside, a, 1.0) - inside).norm() ==
        doctest::Approx(0.0));
  Eigen::MatrixXd outside = Eigen::MatrixXd::Zero(2, 2);
  Eigen::MatrixXd proj = project_halfspace(outside, a, 1.0);
  CHECK(a.cwiseProduct(proj).sum() == doctest::Approx(1.0));
  // The shift is along a itself.
  CHECK(proj(0, 0) == doctest::Approx(0.5));
  CHECK(proj(0, 1) == doctest::Approx(0.0));
}

TEST_CASE("symmetric eigensystem comes back in descending order") {
  Rng rng(11);
  Eigen::MatrixXd r(5, 5);
  for (int i = 0; i < 5; ++i)
    for (int j = 0; j < 5; ++j) r(i, j) = rng.normal();
  Eigen::MatrixXd m = 0.5 * (r + r.transpose());
  auto [values, vectors] = sym_eig(m);
  for (int i = 1; i < 5; ++i) CHECK(values(i - 1) >= values(i));
  Eigen::MatrixXd rebuilt = vectors * values.asDiagonal() * vectors.transpose();
  CHECK((rebuilt - m).norm() == doctest::Approx(0.0).epsilon(1e-9));
  CHECK_THROWS_AS(sym_eig(Eigen::MatrixXd::Zero(2, 3)), InvalidInput);
}

TEST_CASE("single-edge relaxation matches the grid-search optimum") {
  // n = 2, one edge, b = 0, lambda = 1: the feasible set is the segment
  // X = [[1/2, t], [t, 1/2]] with t in [0, 1/2] and the objective reduces to
  // f(t) = 2 - 2t + 4t^2, minimized at t = 1/4 with value 7/4.
  Graph g = Graph::from_edges(2, {{0, 1}});
  SdpInstance inst = build_instance(g, 0.0, 1.0);
  CHECK(inst.kappa() == doctest::Approx(4.0));

  double best_t = 0.0, best_f = HUGE_VAL;
  for (int i = 0; i <= 100000; ++i) {
    double t = 0.5 * i / 100000.0;
    double f = 2.0 - 2.0 * t + 4.0 * t * t;
    if (f < best_f) {
      best_f = f;
      best_t = t;
    }
  }
  CHECK(best_t == doctest::Approx(0.25).epsilon(1e-4));
  CHECK(best_f == doctest::Approx(1.75).epsilon(1e-8));

  GramSolution sol = solve(inst);
  CHECK(sol.converged);
  CHECK(sol.objective == doctest::Approx(1.75).epsilon(1e-4));
  CHECK(sol.x(0, 1) == doctest::Approx(0.25).epsilon(1e-3));
  CHECK(sol.x(0, 0) == doctest::Approx(0.5));
}

TEST_CASE("solver output is feasible and beats projected probes") {
  for (std::uint64_t seed : {21ull, 22ull, 23ull}) {
    Graph g = random_connected_graph(10, 0.4, seed);
    SdpInstance inst = build_instance(g, 0.5, 1.0);
    GramSolution sol = solve(inst);
    CHECK(sol.converged);

    int n = inst.n();
    double tol = 1e-6 * n;
    oracle::Domain dom = domain_of_instance(inst);

    // Exact by construction: box, diagonal.  Approximate: cone, halfspace.
    CHECK(sol.x.minCoeff() >= 0.0);
    CHECK((sol.x.diagonal().array() - 1.0 / n).abs().maxCoeff() == 0.0);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sol.x,
                                                      Eigen::EigenvaluesOnly);
    CHECK(es.eigenvalues()(0) >= -tol);
    double slack = dom.a_bal.cwiseProduct(sol.x).sum() - dom.c_bal;
    CHECK(slack >= -tol * dom.a_bal.norm());

    // Dykstra-projected probes are feasible points, so none may score below
    // the reported optimum.
    Rng rng(derive_seed(seed, 3));
    for (int probe = 0; probe < 5; ++probe) {
      Eigen::MatrixXd r(n, n);
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) r(i, j) = 0.2 * rng.normal();
      Eigen::MatrixXd x0 =
          Eigen::MatrixXd::Identity(n, n) / n + 0.5 * (r + r.transpose());
      oracle::Projection proj = oracle::dykstra_project(x0, dom);
      REQUIRE(proj.min_eig >= -1e-8);
      REQUIRE(proj.box_violation <= 1e-8);
      REQUIRE(proj.diag_error <= 1e-8);
      REQUIRE(proj.balance_slack >= -1e-8 * dom.a_bal.norm());
      double f_probe = oracle::objective(inst.laplacian(), inst.degrees(),
                                         inst.kappa(), proj.x);
      CHECK(sol.objective <= f_probe + 1e-5);
    }
  }
}

TEST_CASE("objective grows quadratically away from the optimum") {
  // f(X) - f(X*) >= (kappa/2) ||D^{1/2} (X - X*) D^{1/2}||_F^2 up to solver
  // accuracy, for feasible X.
  Graph g = random_connected_graph(8, 0.5, 31);
  SdpInstance inst = build_instance(g, 0.5, 1.0);
  GramSolution sol = solve(inst);
  REQUIRE(sol.converged);
  oracle::Domain dom = domain_of_instance(inst);
  Eigen::VectorXd root = inst.degrees().cwiseSqrt();

  Rng rng(99);
  int n = inst.n();
  for (int probe = 0; probe < 5; ++probe) {
    Eigen::MatrixXd r(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) r(i, j) = 0.3 * rng.normal();
    oracle::Projection proj = oracle::dykstra_project(
        Eigen::MatrixXd::Identity(n, n) / n + 0.5 * (r + r.transpose()), dom);
    double gap = objective(inst, proj.x) - sol.objective;
    Eigen::MatrixXd diff =
        root.asDiagonal() * (proj.x - sol.x) * root.asDiagonal();
    CHECK(gap >= 0.5 * inst.kappa() * diff.squaredNorm() - 1e-4);
  }
}

TEST_CASE("a lightly regularized solve separates disjoint triangles") {
  Graph g = triangle_pair();
  SdpInstance inst = build_instance(g, 0.5, 1e6);
  GramSolution sol = solve(inst);
  CHECK(sol.converged);
  double inv_n = 1.0 / 6.0;
  Clustering truth = sbm_truth(6, 2);
  for (int u = 0; u < 6; ++u) {
    for (int v = u + 1; v < 6; ++v) {
      if (truth.labels[u] == truth.labels[v])
        CHECK(sol.x(u, v) >= 0.9 * inv_n);
      else
        CHECK(sol.x(u, v) <= 0.1 * inv_n);
    }
  }
}

TEST_CASE("solver knobs are validated and optional outputs work") {
  Graph g = triangle_pair();
  SdpInstance inst = build_instance(g, 0.5, 1.0);

  SolverSettings bad;
  bad.over_relaxation = 0.9;
  CHECK_THROWS_AS(solve(inst, bad), InvalidInput);
  bad.over_relaxation = 1.9;
  CHECK_THROWS_AS(solve(inst, bad), InvalidInput);
  SolverSettings none;
  none.max_iters = 0;
  CHECK_THROWS_AS(solve(inst, none), InvalidInput);

  SolverSettings relaxed;
  relaxed.over_relaxation = 1.5;
  GramSolution fast = solve(inst, relaxed);
  GramSolution plain = solve(inst);
  CHECK(fast.converged);
  CHECK(fast.objective == doctest::Approx(plain.objective).epsilon(1e-4));

  SolverSettings hist;
  hist.record_history = true;
  std::ostringstream log;
  hist.iter_log = &log;
  hist.log_every = 10;
  GramSolution sol = solve(inst, hist);
  CHECK(sol.residual_history.size() == static_cast<size_t>(sol.iterations));
  CHECK(log.str().find(',') != std::string::npos);

  // Starving the iteration budget must still return a usable iterate.
  SolverSettings tiny;
  tiny.max_iters = 3;
  GramSolution partial = solve(inst, tiny);
  CHECK_FALSE(partial.converged);
  CHECK(partial.x.rows() == 6);
  CHECK(partial.x.minCoeff() >= 0.0);
  CHECK(partial.x(0, 0) == doctest::Approx(1.0 / 6.0));
}
