#include "dpc/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "dpc/errors.hpp"

namespace dpc {

ContingencyTable ContingencyTable::build(const Clustering& a,
                                         const Clustering& b) {
  if (a.n() != b.n())
    throw InvalidInput("contingency: partitions cover different vertex counts");
  ContingencyTable t;
  t.n = a.n();
  t.counts.assign(a.k, std::vector<long long>(b.k, 0));
  t.row_sums.assign(a.k, 0);
  t.col_sums.assign(b.k, 0);
  for (int u = 0; u < t.n; ++u) {
    ++t.counts[a.labels[u]][b.labels[u]];
    ++t.row_sums[a.labels[u]];
    ++t.col_sums[b.labels[u]];
  }
  return t;
}

namespace {

double entropy_of_counts(const std::vector<long long>& counts, int n) {
  double h = 0.0;
  for (long long c : counts) {
    if (c == 0) continue;
    double p = static_cast<double>(c) / n;
    h -= p * std::log(p);
  }
  return h;
}

double mi_of_table(const ContingencyTable& t) {
  double mi = 0.0;
  double n = static_cast<double>(t.n);
  for (size_t i = 0; i < t.counts.size(); ++i) {
    for (size_t j = 0; j < t.counts[i].size(); ++j) {
      long long c = t.counts[i][j];
      if (c == 0) continue;
      double joint = static_cast<double>(c) / n;
      mi += joint * std::log(n * static_cast<double>(c) /
                             (static_cast<double>(t.row_sums[i]) *
                              static_cast<double>(t.col_sums[j])));
    }
  }
  return std::max(0.0, mi);
}

}  // namespace

double partition_entropy(const Clustering& a) {
  std::vector<long long> counts(a.k, 0);
  for (int l : a.labels) ++counts[l];
  return entropy_of_counts(counts, a.n());
}

double mutual_information(const Clustering& a, const Clustering& b) {
  return mi_of_table(ContingencyTable::build(a, b));
}

double nmi(const Clustering& a, const Clustering& b, NmiNorm norm) {
  ContingencyTable t = ContingencyTable::build(a, b);
  double ha = entropy_of_counts(t.row_sums, t.n);
  double hb = entropy_of_counts(t.col_sums, t.n);
  if (ha == 0.0 && hb == 0.0) return 1.0;  // both trivially single-cluster
  if (ha == 0.0 || hb == 0.0) return 0.0;
  double mi = mi_of_table(t);
  double denom = norm == NmiNorm::geometric ? std::sqrt(ha * hb)
                                            : 0.5 * (ha + hb);
  return mi / denom;
}

double expected_mutual_information(const ContingencyTable& t) {
  double n = static_cast<double>(t.n);
  double lg_n = std::lgamma(n + 1.0);
  double emi = 0.0;
  for (long long ai : t.row_sums) {
    if (ai == 0) continue;
    for (long long bj : t.col_sums) {
      if (bj == 0) continue;
      long long lo = std::max<long long>(1, ai + bj - t.n);
      long long hi = std::min(ai, bj);
      double a = static_cast<double>(ai), b = static_cast<double>(bj);
      for (long long nij = lo; nij <= hi; ++nij) {
        double x = static_cast<double>(nij);
        double term = (x / n) * std::log(n * x / (a * b));
        // Hypergeometric probability of nij via log-factorials.
        double lp = std::lgamma(a + 1.0) + std::lgamma(b + 1.0) +
                    std::lgamma(n - a + 1.0) + std::lgamma(n - b + 1.0) -
                    lg_n - std::lgamma(x + 1.0) - std::lgamma(a - x + 1.0) -
                    std::lgamma(b - x + 1.0) -
                    std::lgamma(n - a - b + x + 1.0);
        emi += term * std::exp(lp);
      }
    }
  }
  return emi;
}

double ami(const Clustering& a, const Clustering& b) {
  ContingencyTable t = ContingencyTable::build(a, b);
  double ha = entropy_of_counts(t.row_sums, t.n);
  double hb = entropy_of_counts(t.col_sums, t.n);
  if (ha == 0.0 && hb == 0.0) return 1.0;
  double mi = mi_of_table(t);
  double emi = expected_mutual_information(t);
  double denom = 0.5 * (ha + hb) - emi;
  if (std::abs(denom) < 1e-15) return 0.0;
  return (mi - emi) / denom;
}

namespace {

// Min-cost assignment (Hungarian algorithm with potentials), O(k^3).
std::vector<int> min_cost_assignment(const std::vector<std::vector<double>>& cost) {
  int k = static_cast<int>(cost.size());
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> u(k + 1, 0.0), v(k + 1, 0.0);
  std::vector<int> p(k + 1, 0), way(k + 1, 0);
  for (int i = 1; i <= k; ++i) {
    p[0] = i;
    int j0 = 0;
    std::vector<double> minv(k + 1, inf);
    std::vector<char> used(k + 1, 0);
    do {
      used[j0] = 1;
      int i0 = p[j0], j1 = 0;
      double delta = inf;
      for (int j = 1; j <= k; ++j) {
        if (used[j]) continue;
        double cur = cost[i0 - 1][j - 1] - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (int j = 0; j <= k; ++j) {
        if (used[j]) {
          u[p[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (p[j0] != 0);
    do {
      int j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0);
  }
  std::vector<int> assignment(k, -1);
  for (int j = 1; j <= k; ++j)
    if (p[j] > 0) assignment[p[j] - 1] = j - 1;
  return assignment;
}

}  // namespace

VolMisclassification vol_misclassification(const Graph& g,
                                           const Clustering& pred,
                                           const Clustering& truth) {
  if (pred.n() != g.n() || truth.n() != g.n())
    throw InvalidInput("vol_misclassification: partition size differs from graph");
  if (pred.k != truth.k)
    throw InvalidInput("vol_misclassification: cluster counts differ");
  int k = pred.k;

  std::vector<double> pred_vol(k, 0.0), truth_vol(k, 0.0);
  std::vector<std::vector<double>> joint(k, std::vector<double>(k, 0.0));
  for (int u = 0; u < g.n(); ++u) {
    double d = static_cast<double>(g.degree(u));
    pred_vol[pred.labels[u]] += d;
    truth_vol[truth.labels[u]] += d;
    joint[pred.labels[u]][truth.labels[u]] += d;
  }
  for (int j = 0; j < k; ++j)
    if (truth_vol[j] <= 0.0)
      throw InvalidInput("vol_misclassification: truth cluster with zero volume");

  auto ratio = [&](int i, int j) {
    return (pred_vol[i] + truth_vol[j] - 2.0 * joint[i][j]) / truth_vol[j];
  };

  std::vector<int> assignment;
  if (k <= 8) {
    // Exhaustive search for the permutation minimizing the worst ratio.
    std::vector<int> perm(k);
    std::iota(perm.begin(), perm.end(), 0);
    double best = std::numeric_limits<double>::infinity();
    do {
      double worst = 0.0;
      for (int i = 0; i < k; ++i) worst = std::max(worst, ratio(i, perm[i]));
      if (worst < best) {
        best = worst;
        assignment = perm;
      }
    } while (std::next_permutation(perm.begin(), perm.end()));
  } else {
    std::vector<std::vector<double>> cost(k, std::vector<double>(k, 0.0));
    for (int i = 0; i < k; ++i)
      for (int j = 0; j < k; ++j)
        cost[i][j] = pred_vol[i] + truth_vol[j] - 2.0 * joint[i][j];
    assignment = min_cost_assignment(cost);
  }

  VolMisclassification out;
  out.assignment = assignment;
  out.ratios.resize(k);
  for (int i = 0; i < k; ++i) {
    out.ratios[i] = ratio(i, assignment[i]);
    out.max_ratio = std::max(out.max_ratio, out.ratios[i]);
  }
  return out;
}

double err_rate(const std::vector<int>& u, const std::vector<int>& v) {
  if (u.empty() || u.size() != v.size())
    throw InvalidInput("err_rate: vectors must be nonempty and equal length");
  long long dot = 0;
  for (size_t i = 0; i < u.size(); ++i) {
    if ((u[i] != 1 && u[i] != -1) || (v[i] != 1 && v[i] != -1))
      throw InvalidInput("err_rate: entries must be +-1");
    dot += static_cast<long long>(u[i]) * v[i];
  }
  double n = static_cast<double>(u.size());
  return (n - std::max<double>(static_cast<double>(dot),
                               static_cast<double>(-dot))) /
         (2.0 * n);
}

}  // namespace dpc
