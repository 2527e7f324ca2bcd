#pragma once

#include <vector>

#include "dpc/graph.hpp"

namespace dpc {

// Joint label counts between two partitions of the same vertex set.
struct ContingencyTable {
  int n = 0;
  std::vector<std::vector<long long>> counts;  // a.k x b.k
  std::vector<long long> row_sums;
  std::vector<long long> col_sums;

  static ContingencyTable build(const Clustering& a, const Clustering& b);
};

enum class NmiNorm { geometric, arithmetic };

// Shannon entropy (natural log) of a partition's label distribution.
double partition_entropy(const Clustering& a);

// Mutual information (natural log) between two partitions.
double mutual_information(const Clustering& a, const Clustering& b);

// Normalized mutual information.  When both entropies vanish the score is 1
// if both partitions are the single trivial cluster, following the 0/0
// convention; a single vanishing entropy gives 0.
double nmi(const Clustering& a, const Clustering& b,
           NmiNorm norm = NmiNorm::geometric);

// Exact expected mutual information under the permutation null model with
// the observed marginals (hypergeometric sum).
double expected_mutual_information(const ContingencyTable& t);

// Adjusted mutual information:
//   (I - E[I]) / (mean(H(A), H(B)) - E[I])
// with the arithmetic mean.  Two trivial partitions score 1; a vanishing
// denominator otherwise scores 0.
double ami(const Clustering& a, const Clustering& b);

struct VolMisclassification {
  std::vector<int> assignment;  // predicted cluster i matches truth assignment[i]
  std::vector<double> ratios;   // vol(pred_i sym-diff truth_match) / vol(truth_match)
  double max_ratio = 0.0;
};

// Volume-weighted misclassification under the best cluster matching.  For
// k <= 8 the matching minimizes the maximum ratio by exhaustive permutation
// search; larger k falls back to a min-cost assignment on symmetric-difference
// volumes.
VolMisclassification vol_misclassification(const Graph& g,
                                           const Clustering& pred,
                                           const Clustering& truth);

// Sign-agreement error between +-1 vectors, invariant to a global sign flip:
//   (n - max(<u, v>, -<u, v>)) / (2n).
double err_rate(const std::vector<int>& u, const std::vector<int>& v);

}  // namespace dpc
