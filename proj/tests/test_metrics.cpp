#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "dpc/errors.hpp"
#include "dpc/graph.hpp"
#include "dpc/metrics.hpp"
#include "dpc/rng.hpp"
#include "oracles.hpp"

using namespace dpc;

namespace {

Clustering random_clustering(int n, int k, Rng& rng) {
  std::vector<int> labels(n);
  for (int u = 0; u < n; ++u) labels[u] = static_cast<int>(rng.uniform_int(k));
  // Guarantee every label is populated so k is honest.
  for (int c = 0; c < k; ++c) labels[c % n] = c;
  return Clustering::from_labels(std::move(labels), k);
}

Graph path_graph(int n) {
  std::vector<std::pair<int, int>> edges;
  for (int u = 0; u + 1 < n; ++u) edges.emplace_back(u, u + 1);
  return Graph::from_edges(n, edges);
}

}  // namespace

TEST_CASE("contingency table counts and margins") {
  Clustering a = Clustering::from_labels({0, 0, 1, 1}, 2);
  Clustering b = Clustering::from_labels({0, 0, 1, 0}, 2);
  ContingencyTable t = ContingencyTable::build(a, b);
  CHECK(t.n == 4);
  CHECK(t.counts[0][0] == 2);
  CHECK(t.counts[0][1] == 0);
  CHECK(t.counts[1][0] == 1);
  CHECK(t.counts[1][1] == 1);
  CHECK(t.row_sums == std::vector<long long>{2, 2});
  CHECK(t.col_sums == std::vector<long long>{3, 1});

  Clustering c = Clustering::from_labels({0, 1}, 2);
  CHECK_THROWS_AS(ContingencyTable::build(a, c), InvalidInput);
}

TEST_CASE("entropy and mutual information on a hand-computed table") {
  Clustering a = Clustering::from_labels({0, 0, 1, 1}, 2);
  Clustering b = Clustering::from_labels({0, 0, 1, 0}, 2);
  CHECK(partition_entropy(a) == doctest::Approx(std::log(2.0)));
  double hb = -(0.75 * std::log(0.75) + 0.25 * std::log(0.25));
  CHECK(partition_entropy(b) == doctest::Approx(hb));

  double mi = 0.5 * std::log(4.0 / 3.0) + 0.25 * std::log(2.0 / 3.0) +
              0.25 * std::log(2.0);
  CHECK(mutual_information(a, b) == doctest::Approx(mi).epsilon(1e-12));
  CHECK(mutual_information(a, a) == doctest::Approx(std::log(2.0)));

  CHECK(nmi(a, b, NmiNorm::geometric) ==
        doctest::Approx(mi / std::sqrt(std::log(2.0) * hb)));
  CHECK(nmi(a, b, NmiNorm::arithmetic) ==
        doctest::Approx(mi / (0.5 * (std::log(2.0) + hb))));
}

TEST_CASE("normalized mutual information conventions") {
  Clustering a = Clustering::from_labels({0, 1, 0, 1}, 2);
  CHECK(nmi(a, a) == doctest::Approx(1.0));

  Clustering trivial = Clustering::from_labels({0, 0, 0, 0}, 1);
  CHECK(nmi(trivial, trivial) == doctest::Approx(1.0));
  CHECK(nmi(a, trivial) == doctest::Approx(0.0));
  CHECK(nmi(trivial, a) == doctest::Approx(0.0));

  // Independent labels: the 2x2 table (1,1;1,1) carries zero information.
  Clustering c = Clustering::from_labels({0, 0, 1, 1}, 2);
  Clustering d = Clustering::from_labels({0, 1, 0, 1}, 2);
  CHECK(nmi(c, d) == doctest::Approx(0.0));
}

TEST_CASE("expected mutual information equals the permutation average") {
  Clustering a = Clustering::from_labels({0, 0, 1, 1, 2, 2}, 3);
  Clustering b = Clustering::from_labels({0, 1, 0, 1, 0, 1}, 2);

  std::vector<int> perm(6);
  std::iota(perm.begin(), perm.end(), 0);
  double total = 0.0;
  long long count = 0;
  std::vector<int> shuffled(6);
  do {
    for (int i = 0; i < 6; ++i) shuffled[i] = b.labels[perm[i]];
    total += mutual_information(a, Clustering::from_labels(shuffled, 2));
    ++count;
  } while (std::next_permutation(perm.begin(), perm.end()));
  double averaged = total / static_cast<double>(count);

  ContingencyTable t = ContingencyTable::build(a, b);
  CHECK(expected_mutual_information(t) ==
        doctest::Approx(averaged).epsilon(1e-10));
}

TEST_CASE("adjusted mutual information conventions and null behavior") {
  Clustering a = Clustering::from_labels({0, 0, 1, 1, 2, 2}, 3);
  CHECK(ami(a, a) == doctest::Approx(1.0));
  Clustering trivial = Clustering::from_labels(std::vector<int>(6, 0), 1);
  CHECK(ami(trivial, trivial) == doctest::Approx(1.0));

  // Independent partitions should score near zero on average.
  Rng rng(1234);
  double mean = 0.0;
  int reps = 200;
  for (int r = 0; r < reps; ++r) {
    Clustering x = random_clustering(60, 3, rng);
    Clustering y = random_clustering(60, 3, rng);
    mean += ami(x, y);
  }
  mean /= reps;
  CHECK(std::abs(mean) < 0.02);

  // A label permutation must not change the score.
  Clustering b = Clustering::from_labels({1, 1, 2, 2, 0, 0}, 3);
  CHECK(ami(a, b) == doctest::Approx(1.0));
}

TEST_CASE("volume misclassification on a hand-worked path") {
  Graph g = path_graph(4);  // degrees 1, 2, 2, 1
  Clustering pred = Clustering::from_labels({0, 0, 1, 1}, 2);
  Clustering truth = Clustering::from_labels({0, 1, 1, 1}, 2);
  VolMisclassification vm = vol_misclassification(g, pred, truth);
  // Matching 0->0, 1->1: ratios (3 + 1 - 2)/1 = 2 and (3 + 5 - 6)/5 = 0.4.
  CHECK(vm.assignment == std::vector<int>{0, 1});
  CHECK(vm.ratios[0] == doctest::Approx(2.0));
  CHECK(vm.ratios[1] == doctest::Approx(0.4));
  CHECK(vm.max_ratio == doctest::Approx(2.0));

  VolMisclassification perfect = vol_misclassification(g, truth, truth);
  CHECK(perfect.max_ratio == doctest::Approx(0.0));

  Clustering k3 = Clustering::from_labels({0, 1, 2, 0}, 3);
  CHECK_THROWS_AS(vol_misclassification(g, pred, k3), InvalidInput);
  Clustering zero_vol = Clustering::from_labels({0, 0, 0, 1}, 2);
  Graph g2 = Graph::from_edges(4, {{0, 1}, {1, 2}, {0, 2}});
  CHECK_THROWS_AS(vol_misclassification(g2, pred, zero_vol), InvalidInput);
}

TEST_CASE("volume misclassification agrees with the permutation oracle") {
  Rng rng(55);
  for (int rep = 0; rep < 6; ++rep) {
    int n = 12, k = 3 + rep % 2;
    std::vector<std::pair<int, int>> edges;
    for (int u = 0; u < n; ++u)
      for (int v = u + 1; v < n; ++v)
        if (rng.uniform() < 0.5) edges.emplace_back(u, v);
    Graph g = Graph::from_edges(n, edges);
    bool ok = true;
    for (int u = 0; u < n; ++u)
      if (g.degree(u) == 0) ok = false;
    if (!ok) continue;
    Clustering pred = random_clustering(n, k, rng);
    Clustering truth = random_clustering(n, k, rng);

    std::vector<double> pv(k, 0.0), tv(k, 0.0);
    std::vector<std::vector<double>> joint(k, std::vector<double>(k, 0.0));
    for (int u = 0; u < n; ++u) {
      double d = g.degree(u);
      pv[pred.labels[u]] += d;
      tv[truth.labels[u]] += d;
      joint[pred.labels[u]][truth.labels[u]] += d;
    }
    bool positive = true;
    for (double v : tv)
      if (v <= 0.0) positive = false;
    if (!positive) continue;

    VolMisclassification vm = vol_misclassification(g, pred, truth);
    CHECK(vm.max_ratio ==
          doctest::Approx(oracle::minimax_ratio(pv, tv, joint)).epsilon(1e-12));
  }
}

TEST_CASE("volume misclassification falls back to assignment for many clusters") {
  // With k > 8 the matching switches to min-cost assignment; on an exact
  // match it must still find the zero-cost pairing.
  int k = 9, n = 18;
  std::vector<std::pair<int, int>> edges;
  for (int c = 0; c < k; ++c) edges.emplace_back(2 * c, 2 * c + 1);
  Graph g = Graph::from_edges(n, edges);
  std::vector<int> labels(n);
  for (int u = 0; u < n; ++u) labels[u] = u / 2;
  Clustering truth = Clustering::from_labels(labels, k);
  // Relabel clusters by a rotation; the matching has to undo it.
  std::vector<int> rotated(n);
  for (int u = 0; u < n; ++u) rotated[u] = (labels[u] + 3) % k;
  Clustering pred = Clustering::from_labels(rotated, k);
  VolMisclassification vm = vol_misclassification(g, pred, truth);
  CHECK(vm.max_ratio == doctest::Approx(0.0));
  // Predicted cluster i holds the vertices whose truth label is i - 3.
  for (int i = 0; i < k; ++i) CHECK(vm.assignment[i] == (i + k - 3) % k);
}

TEST_CASE("sign agreement error is a flip-invariant pseudometric") {
  std::vector<int> u{1, 1, 1, 1};
  std::vector<int> v{1, 1, -1, -1};
  CHECK(err_rate(u, u) == doctest::Approx(0.0));
  CHECK(err_rate(u, v) == doctest::Approx(0.5));

  std::vector<int> w{1, 1, 1, -1};
  CHECK(err_rate(u, w) == doctest::Approx(0.25));
  std::vector<int> wf{-1, -1, -1, 1};
  CHECK(err_rate(u, wf) == doctest::Approx(0.25));
  CHECK(err_rate(wf, u) == doctest::Approx(0.25));

  Rng rng(61);
  for (int rep = 0; rep < 200; ++rep) {
    int n = 9;
    std::vector<int> a(n), b(n), c(n);
    for (int i = 0; i < n; ++i) {
      a[i] = rng.bernoulli(0.5) ? 1 : -1;
      b[i] = rng.bernoulli(0.5) ? 1 : -1;
      c[i] = rng.bernoulli(0.5) ? 1 : -1;
    }
    CHECK(err_rate(a, b) == doctest::Approx(err_rate(b, a)));
    CHECK(err_rate(a, c) <= err_rate(a, b) + err_rate(b, c) + 1e-12);
  }

  CHECK_THROWS_AS(err_rate({}, {}), InvalidInput);
  CHECK_THROWS_AS(err_rate({1}, {1, -1}), InvalidInput);
  CHECK_THROWS_AS(err_rate({2}, {1}), InvalidInput);
}
