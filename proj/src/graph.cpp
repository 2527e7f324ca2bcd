#include "dpc/graph.hpp"

#include <algorithm>
#include <cmath>
#include <queue>
#include <set>
#include <string>

#include "dpc/errors.hpp"
#include "dpc/rng.hpp"

namespace dpc {

Graph Graph::from_edges(int n, const std::vector<std::pair<int, int>>& edges) {
  if (n <= 0) throw InvalidInput("graph needs at least one vertex");
  Graph g;
  g.n_ = n;
  g.adj_.assign(n, {});
  g.self_loops_.assign(n, 0);
  std::set<std::pair<int, int>> seen;
  for (auto [u, v] : edges) {
    if (u < 0 || u >= n || v < 0 || v >= n)
      throw InvalidInput("edge endpoint out of range: " + std::to_string(u) +
                         " " + std::to_string(v));
    if (u == v) throw InvalidInput("self-loops are not allowed in edge input");
    auto key = std::minmax(u, v);
    if (!seen.insert(key).second)
      throw InvalidInput("duplicate edge: " + std::to_string(key.first) + " " +
                         std::to_string(key.second));
    g.adj_[u].push_back(v);
    g.adj_[v].push_back(u);
  }
  for (auto& nb : g.adj_) std::sort(nb.begin(), nb.end());
  g.m_ = static_cast<long long>(seen.size());
  return g;
}

bool Graph::has_edge(int u, int v) const {
  const auto& nb = adj_[u];
  return std::binary_search(nb.begin(), nb.end(), v);
}

long long Graph::volume() const {
  long long vol = 0;
  for (int u = 0; u < n_; ++u) vol += degree(u);
  return vol;
}

long long Graph::volume(const std::vector<int>& vertices) const {
  long long vol = 0;
  for (int u : vertices) vol += degree(u);
  return vol;
}

std::vector<std::pair<int, int>> Graph::edges() const {
  std::vector<std::pair<int, int>> out;
  out.reserve(static_cast<size_t>(m_));
  for (int u = 0; u < n_; ++u)
    for (int v : adj_[u])
      if (u < v) out.emplace_back(u, v);
  return out;
}

bool Graph::has_self_loops() const {
  for (int c : self_loops_)
    if (c > 0) return true;
  return false;
}

Clustering Clustering::from_labels(std::vector<int> labels, int k) {
  if (k <= 0) throw InvalidInput("clustering needs k >= 1");
  if (labels.empty()) throw InvalidInput("clustering needs at least one vertex");
  for (int l : labels)
    if (l < 0 || l >= k)
      throw InvalidInput("label " + std::to_string(l) + " outside [0, " +
                         std::to_string(k) + ")");
  Clustering c;
  c.k = k;
  c.labels = std::move(labels);
  return c;
}

std::vector<std::vector<int>> Clustering::members() const {
  std::vector<std::vector<int>> out(k);
  for (int u = 0; u < n(); ++u) out[labels[u]].push_back(u);
  return out;
}

Clustering sbm_truth(int n, int k) {
  if (k <= 0 || n <= 0 || n % k != 0)
    throw InvalidInput("block model truth needs k | n");
  std::vector<int> labels(n);
  int block = n / k;
  for (int v = 0; v < n; ++v) labels[v] = v / block;
  return Clustering::from_labels(std::move(labels), k);
}

Eigen::MatrixXd laplacian(const Graph& g) {
  int n = g.n();
  Eigen::MatrixXd l = Eigen::MatrixXd::Zero(n, n);
  for (int u = 0; u < n; ++u) {
    l(u, u) = static_cast<double>(g.neighbors(u).size());
    for (int v : g.neighbors(u)) l(u, v) -= 1.0;
  }
  return l;
}

Eigen::MatrixXd normalized_laplacian(const Graph& g) {
  int n = g.n();
  Eigen::VectorXd dinv(n);
  for (int u = 0; u < n; ++u) {
    int d = g.degree(u);
    if (d == 0) throw InvalidInput("normalized laplacian needs min degree 1");
    dinv(u) = 1.0 / std::sqrt(static_cast<double>(d));
  }
  Eigen::MatrixXd nl = Eigen::MatrixXd::Zero(n, n);
  for (int u = 0; u < n; ++u) {
    nl(u, u) = 1.0 - static_cast<double>(g.self_loop_count(u)) /
                         static_cast<double>(g.degree(u));
    for (int v : g.neighbors(u)) nl(u, v) -= dinv(u) * dinv(v);
  }
  return nl;
}

namespace {

// Validates a vertex subset: in-range, no duplicates.  Returns a sorted copy.
std::vector<int> checked_subset(const Graph& g, const std::vector<int>& s,
                                const char* who) {
  if (s.empty()) throw InvalidInput(std::string(who) + ": empty vertex set");
  std::vector<int> sorted = s;
  std::sort(sorted.begin(), sorted.end());
  for (size_t i = 0; i < sorted.size(); ++i) {
    if (sorted[i] < 0 || sorted[i] >= g.n())
      throw InvalidInput(std::string(who) + ": vertex out of range");
    if (i > 0 && sorted[i] == sorted[i - 1])
      throw InvalidInput(std::string(who) + ": duplicate vertex in set");
  }
  return sorted;
}

}  // namespace

double outer_conductance(const Graph& g, const std::vector<int>& s) {
  std::vector<int> sorted = checked_subset(g, s, "outer_conductance");
  long long vol = g.volume(sorted);
  if (vol == 0) throw InvalidInput("outer_conductance: set has zero volume");
  std::vector<char> in_s(g.n(), 0);
  for (int u : sorted) in_s[u] = 1;
  long long cut = 0;
  for (int u : sorted)
    for (int v : g.neighbors(u))
      if (!in_s[v]) ++cut;
  return static_cast<double>(cut) / static_cast<double>(vol);
}

Graph degree_preserving_subgraph(const Graph& g, const std::vector<int>& s) {
  std::vector<int> sorted = checked_subset(g, s, "degree_preserving_subgraph");
  std::vector<int> index(g.n(), -1);
  for (size_t i = 0; i < sorted.size(); ++i) index[sorted[i]] = static_cast<int>(i);

  Graph sub;
  sub.n_ = static_cast<int>(sorted.size());
  sub.adj_.assign(sub.n_, {});
  sub.self_loops_.assign(sub.n_, 0);
  long long m = 0;
  for (int i = 0; i < sub.n_; ++i) {
    int u = sorted[i];
    sub.self_loops_[i] = g.self_loop_count(u);
    for (int v : g.neighbors(u)) {
      if (index[v] >= 0) {
        sub.adj_[i].push_back(index[v]);
        if (u < v) ++m;
      } else {
        ++sub.self_loops_[i];  // replaces the edge leaving S, keeping degree
      }
    }
  }
  sub.m_ = m;
  return sub;
}

double inner_conductance_exact(const Graph& g, const std::vector<int>& s,
                               int limit) {
  std::vector<int> sorted = checked_subset(g, s, "inner_conductance_exact");
  int sz = static_cast<int>(sorted.size());
  if (limit > 30) throw InvalidInput("inner_conductance_exact: limit above 30");
  if (sz > limit)
    throw InvalidInput("inner_conductance_exact: set larger than limit " +
                       std::to_string(limit));
  Graph sub = degree_preserving_subgraph(g, sorted);
  long long vol_s = sub.volume();
  if (vol_s == 0)
    throw InvalidInput("inner_conductance_exact: set has zero volume");

  auto sub_edges = sub.edges();
  double best = 1.0;
  bool found = false;
  for (std::uint32_t mask = 1; mask < (1u << sz); ++mask) {
    long long vol_t = 0;
    for (int i = 0; i < sz; ++i)
      if (mask & (1u << i)) vol_t += sub.degree(i);
    if (vol_t == 0 || 2 * vol_t > vol_s) continue;
    long long cut = 0;
    for (auto [a, b] : sub_edges) {
      bool ina = mask & (1u << a), inb = mask & (1u << b);
      if (ina != inb) ++cut;
    }
    double phi = static_cast<double>(cut) / static_cast<double>(vol_t);
    if (!found || phi < best) {
      best = phi;
      found = true;
    }
  }
  return found ? best : 1.0;
}

namespace {

bool connected_ignoring_loops(const Graph& g) {
  if (g.n() == 0) return true;
  std::vector<char> seen(g.n(), 0);
  std::queue<int> q;
  q.push(0);
  seen[0] = 1;
  int count = 1;
  while (!q.empty()) {
    int u = q.front();
    q.pop();
    for (int v : g.neighbors(u)) {
      if (!seen[v]) {
        seen[v] = 1;
        ++count;
        q.push(v);
      }
    }
  }
  return count == g.n();
}

}  // namespace

std::pair<double, double> inner_conductance_bounds(const Graph& g,
                                                   const std::vector<int>& s) {
  std::vector<int> sorted = checked_subset(g, s, "inner_conductance_bounds");
  Graph sub = degree_preserving_subgraph(g, sorted);
  for (int u = 0; u < sub.n(); ++u)
    if (sub.degree(u) == 0)
      throw InvalidInput("inner_conductance_bounds: zero-degree vertex");
  if (!connected_ignoring_loops(sub)) return {0.0, 0.0};
  // Convention for a singleton: treat lambda_2 as 2 so the bracket (1, 2)
  // contains the exhaustive convention value 1.
  if (sub.n() == 1) return {1.0, 2.0};

  Eigen::MatrixXd nl = normalized_laplacian(sub);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(nl);
  if (es.info() != Eigen::Success)
    throw NumericalFailure("inner_conductance_bounds: eigensolver failed");
  double lambda2 = std::max(0.0, es.eigenvalues()(1));
  return {lambda2 / 2.0, std::sqrt(2.0 * lambda2)};
}

Graph sample_sbm(const SbmParams& params, std::uint64_t seed) {
  if (params.n <= 0 || params.k <= 0 || params.n % params.k != 0)
    throw InvalidInput("sample_sbm: needs n > 0, k > 0, k | n");
  if (params.p < 0 || params.p > 1 || params.q < 0 || params.q > 1)
    throw InvalidInput("sample_sbm: probabilities must lie in [0, 1]");
  int block = params.n / params.k;
  Rng rng(seed);
  std::vector<std::pair<int, int>> edges;
  for (int u = 0; u < params.n; ++u) {
    for (int v = u + 1; v < params.n; ++v) {
      double prob = (u / block == v / block) ? params.p : params.q;
      if (rng.uniform() < prob) edges.emplace_back(u, v);
    }
  }
  return Graph::from_edges(params.n, edges);
}

std::vector<long long> cluster_volumes(const Graph& g, const Clustering& c) {
  if (c.n() != g.n())
    throw InvalidInput("cluster_volumes: clustering size differs from graph");
  std::vector<long long> vols(c.k, 0);
  for (int u = 0; u < g.n(); ++u) vols[c.labels[u]] += g.degree(u);
  return vols;
}

double balance_b(const Graph& g, const Clustering& c) {
  long long total = g.volume();
  if (total == 0) throw InvalidInput("balance_b: graph has no edges");
  auto vols = cluster_volumes(g, c);
  double sum_sq = 0;
  for (long long v : vols) {
    double dv = static_cast<double>(v);
    sum_sq += dv * dv;
  }
  double tv = static_cast<double>(total);
  return 1.0 - sum_sq / (tv * tv);
}

}  // namespace dpc
