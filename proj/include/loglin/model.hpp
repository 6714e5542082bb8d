#pragma once

#include <Eigen/Core>

#include "loglin/contingency_table.hpp"
#include "loglin/jset.hpp"
#include "loglin/theta.hpp"

namespace loglin {

// Stable log(sum(exp(x))) with max shift.
double log_sum_exp(const Eigen::VectorXd& x);

// Applies f(lexicographic index) to every cell i with m triangleleft i.
// The visited set is the sub-box fixing the coordinates on S(m).
template <class F>
void for_each_upper_index(const CellSpace& space, const Cell& m, F&& f) {
  check_cell(space, m);
  const int p = space.vertex_count();
  std::vector<std::uint64_t> stride(static_cast<std::size_t>(p));
  std::uint64_t s = 1;
  for (int v = p; v-- > 0;) {
    stride[static_cast<std::size_t>(v)] = s;
    s *= static_cast<std::uint64_t>(space.level_count(v));
  }
  std::vector<int> free_v;
  std::uint64_t base = 0;
  for (int v = 0; v < p; ++v) {
    base += static_cast<std::uint64_t>(m[static_cast<std::size_t>(v)]) *
            stride[static_cast<std::size_t>(v)];
    if (m[static_cast<std::size_t>(v)] == 0) free_v.push_back(v);
  }
  std::vector<int> level(free_v.size(), 0);
  std::uint64_t index = base;
  for (;;) {
    f(index);
    std::size_t k = free_v.size();
    while (k-- > 0) {
      const int v = free_v[k];
      if (++level[k] < space.level_count(v)) {
        index += stride[static_cast<std::size_t>(v)];
        break;
      }
      index -= static_cast<std::uint64_t>(level[k] - 1) * stride[static_cast<std::size_t>(v)];
      level[k] = 0;
      if (k == 0) return;
    }
    if (free_v.empty()) return;
  }
}

// Log-potentials s(i) = sum_{j in J, j triangleleft i} theta_j for every
// cell of the (enumerable) space, in lexicographic order.
Eigen::VectorXd log_potentials(const Eigen::VectorXd& theta, const JSet& jset,
                               std::uint64_t guard = kDefaultEnumerationGuard);

// Cumulant k(theta) = log sum_i exp s(i), via max-shifted log-sum-exp.
double cumulant(const Eigen::VectorXd& theta, const JSet& jset,
                std::uint64_t guard = kDefaultEnumerationGuard);

// Cell probabilities log p(i) = s(i) - k(theta); strictly positive and
// normalized by construction.
Eigen::VectorXd p_from_theta(const Eigen::VectorXd& theta, const JSet& jset,
                             std::uint64_t guard = kDefaultEnumerationGuard);

// Moebius transform of log probabilities:
//   theta_j = sum_{j' in J, j' tl0 j} (-1)^{|S(j)|-|S(j')|} log(p(j')/p(0)),
// with p(j') the full-table probability of the padded cell j'. Since J-sets
// come from downward-closed classes, the sum runs over all restrictions of
// j to subsets of its support. theta0 = log p(0).
ThetaVector theta_from_p(const Eigen::VectorXd& p, const JSet& jset);

// Marginal event probabilities p_j = P(j triangleleft i) under p, one per
// JSet cell. Equals the gradient of the cumulant at matching theta.
Eigen::VectorXd event_probabilities(const Eigen::VectorXd& p, const JSet& jset);

// Canonical statistics t_j = n(j_{S(j)}) (marginal counts), one per JSet
// cell. Dense tables only.
Eigen::VectorXd canonical_statistics(const ContingencyTable& table, const JSet& jset);

// Multinomial log likelihood <t, theta> - N k(theta).
double loglik(const Eigen::VectorXd& theta, const ContingencyTable& table,
              const JSet& jset, std::uint64_t guard = kDefaultEnumerationGuard);

}  // namespace loglin
