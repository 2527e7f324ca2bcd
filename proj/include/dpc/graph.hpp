#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <utility>
#include <vector>

namespace dpc {

// Simple undirected graph.  Self-loop counts exist only so that
// degree-preserving induced subgraphs can keep original degrees; base graphs
// built from edge lists never carry loops.  Immutable after construction.
class Graph {
 public:
  // Builds a graph from distinct undirected edges on vertices [0, n).
  // Rejects out-of-range endpoints, self-loops and duplicate edges.
  static Graph from_edges(int n, const std::vector<std::pair<int, int>>& edges);

  int n() const { return n_; }
  long long m() const { return m_; }

  // Number of non-loop edges incident to u plus the self-loop count at u.
  int degree(int u) const {
    return static_cast<int>(adj_[u].size()) + self_loops_[u];
  }
  int self_loop_count(int u) const { return self_loops_[u]; }
  const std::vector<int>& neighbors(int u) const { return adj_[u]; }
  bool has_edge(int u, int v) const;

  // Sum of degrees over all vertices (counts each self-loop once).
  long long volume() const;
  long long volume(const std::vector<int>& vertices) const;

  // All non-loop edges as (u, v) with u < v, lexicographically sorted.
  std::vector<std::pair<int, int>> edges() const;

  bool has_self_loops() const;

 private:
  friend Graph degree_preserving_subgraph(const Graph&, const std::vector<int>&);
  Graph() = default;

  int n_ = 0;
  long long m_ = 0;
  std::vector<std::vector<int>> adj_;
  std::vector<int> self_loops_;
};

// Stochastic block model with equal-size contiguous blocks; requires k | n.
struct SbmParams {
  int n = 0;
  int k = 1;
  double p = 0.0;  // intra-block edge probability
  double q = 0.0;  // inter-block edge probability
};

// Partition of [0, n) into k labelled clusters.
struct Clustering {
  int k = 0;
  std::vector<int> labels;

  // Validates that every label lies in [0, k).
  static Clustering from_labels(std::vector<int> labels, int k);
  int n() const { return static_cast<int>(labels.size()); }
  std::vector<std::vector<int>> members() const;
};

// Ground-truth labelling that sample_sbm generates: vertex v is in block
// v / (n / k).
Clustering sbm_truth(int n, int k);

// Combinatorial Laplacian L = D - A.  Self-loops cancel and never appear.
Eigen::MatrixXd laplacian(const Graph& g);

// Normalized Laplacian I - D^{-1/2} A D^{-1/2} with self-loop counts on the
// diagonal of A and full (loop-inclusive) degrees in D.  Rejects graphs with
// isolated vertices.
Eigen::MatrixXd normalized_laplacian(const Graph& g);

// Fraction of the volume of S that leaves S: |E(S, V\S)| / vol(S).
double outer_conductance(const Graph& g, const std::vector<int>& s);

// Induced subgraph on S where each vertex keeps its degree from g: every
// removed incident edge becomes one self-loop.  Vertices are re-indexed by
// ascending original id.
Graph degree_preserving_subgraph(const Graph& g, const std::vector<int>& s);

// Conductance of the degree-preserving subgraph G{S} by exhaustive subset
// enumeration: min over nonempty T with vol(T) <= vol(S)/2 of
// |E_{G{S}}(T, S\T)| / vol(T).  Returns 1 when no subset qualifies
// (singleton S).  Rejects |S| > limit.
double inner_conductance_exact(const Graph& g, const std::vector<int>& s,
                               int limit = 20);

// Cheeger bracket (lambda_2 / 2, sqrt(2 lambda_2)) for the conductance of
// G{S}, from the normalized Laplacian of G{S}.  Disconnected G{S} reports
// (0, 0).
std::pair<double, double> inner_conductance_bounds(const Graph& g,
                                                   const std::vector<int>& s);

// Samples a stochastic block model graph.  One uniform draw per vertex pair
// in lexicographic order, so identical seeds give identical graphs.
Graph sample_sbm(const SbmParams& params, std::uint64_t seed);

std::vector<long long> cluster_volumes(const Graph& g, const Clustering& c);

// Balance statistic b = 1 - sum_i vol(C_i)^2 / vol(V)^2.  Equals (k-1)/k for
// equal-volume clusters and 0 for a single cluster.
double balance_b(const Graph& g, const Clustering& c);

}  // namespace dpc
