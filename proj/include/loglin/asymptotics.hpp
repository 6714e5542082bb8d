#pragma once

#include <Eigen/Core>

#include "loglin/graph.hpp"
#include "loglin/jset.hpp"
#include "loglin/model.hpp"

namespace loglin {

// Covariance of the canonical statistics: the J x J matrix with entries
// p_{j u j'} - p_j p_{j'}, where p_{j u j'} is the probability of the
// joint event {j tl i and j' tl i} (zero when j and j' conflict on shared
// support). Equals the Hessian of the cumulant at the matching theta.
struct FisherMatrix {
  Eigen::MatrixXd matrix;
  Eigen::VectorXd event_probabilities;  // p_j per JSet cell
};

FisherMatrix fisher_matrix(const Eigen::VectorXd& p, const JSet& jset);

// K^{-1} / N via a symmetric positive-definite solve.
Eigen::MatrixXd asymptotic_variance(const FisherMatrix& K, std::int64_t n_samples);
Eigen::MatrixXd asymptotic_variance(const Eigen::VectorXd& p, const JSet& jset,
                                    std::int64_t n_samples);

// Block of K^{-1} on `block`, computed as the inverse of the Schur
// complement of the complementary block.
Eigen::MatrixXd schur_block_variance(const Eigen::MatrixXd& K,
                                     const std::vector<int>& block);

// Exact Fisher-based check of the variance ordering
//   var(theta^{1,v}_j) >= var(theta^{2,v}_j) >= var(theta_j)
// for every j in J_{1,v} = {j in J : S(j) subset M_{1,v}, S(j) !subset
// B_{1,v}}. Marginal-model matrices are evaluated at the true marginal
// probabilities induced by theta; inequalities are checked with slack
// -1e-10 to absorb roundoff.
struct VarianceOrderingRow {
  Cell cell;  // full-space
  double var_one_hop = 0.0;
  double var_two_hop = 0.0;
  double var_global = 0.0;
  bool pass = false;
};

struct VarianceOrderingReport {
  int vertex = 0;
  std::vector<VarianceOrderingRow> rows;
  bool all_pass = false;
};

VarianceOrderingReport verify_variance_ordering(
    const Eigen::VectorXd& theta, const JSet& jset_full, const Graph& g, int v,
    std::uint64_t guard = kDefaultEnumerationGuard);

}  // namespace loglin
