#pragma once

#include <map>
#include <optional>
#include <string>

#include "loglin/contingency_table.hpp"
#include "loglin/graph.hpp"
#include "loglin/marginalization.hpp"
#include "loglin/theta.hpp"

namespace loglin {

struct SolverConfig {
  // IPF stops when every fitted marginal over every maximal generating set
  // matches the data marginal within this (probability-scale) tolerance.
  double ipf_tolerance = 1e-10;
  int ipf_max_cycles = 10000;
  // Newton stops when the mean-loglikelihood gradient infinity-norm drops
  // below this.
  double newton_tolerance = 1e-10;
  int newton_max_iter = 100;
  // Additive constant on each cell count before fitting (0 = off). The
  // working value for desk-scale tables is 2^-30.
  double epsilon_smoothing = 0.0;
  // |theta_j| beyond this flags a nonexistent MLE.
  double divergence_threshold = 30.0;
  // Fit local relaxed models by Newton instead of IPF (cross-validation).
  bool local_use_newton = false;
  std::uint64_t enumeration_guard = kDefaultEnumerationGuard;
};

// Classical iterative proportional fitting over the maximal sets of `gen`,
// starting from the uniform distribution. Returns fitted cell
// probabilities. Zero data marginals (with smoothing off) flag a
// nonexistent MLE; hitting the cycle limit raises NonconvergenceError
// carrying the residual.
struct IpfResult {
  Eigen::VectorXd p;
  int cycles = 0;
  double residual = 0.0;
};
IpfResult ipf_fit(const ContingencyTable& table, const GeneratingClass& gen,
                  const SolverConfig& cfg = {});

// Damped Newton ascent of the multinomial log likelihood from theta = 0.
ThetaVector newton_mle(const ContingencyTable& table, const JSet& jset,
                       const SolverConfig& cfg = {});

// One local relaxed-marginal fit: marginal table over M_v, IPF (or Newton)
// on the relaxed generating class, Moebius back to theta, keeping only the
// exempt components (S(j) subset M_v, S(j) !subset B_v). Buffer estimates
// are discarded.
struct LocalEstimate {
  int vertex = 0;
  int hop = 1;
  std::map<Cell, double> components;  // full-space exempt cells
  int cycles = 0;
  double residual = 0.0;
};
LocalEstimate local_marginal_estimate(const ContingencyTable& table, const Graph& g,
                                      const JSet& jset_full, int v, int hop,
                                      const SolverConfig& cfg = {});

// Combined estimate over the full J-set.
struct EstimateReport {
  std::string method;
  bool existence = true;
  std::optional<Eigen::VectorXd> theta;  // aligned with the full JSet
  std::optional<double> theta0;
  std::vector<std::vector<int>> sources;  // per component: contributing vertices
  int iterations = 0;
  double residual = 0.0;
  std::string note;
};

// theta_j = mean of the contributions from the eligible vertices
// v in S(j) with j exempt at v. A component no vertex covers raises
// CoverageError naming the cell.
EstimateReport combine_local_estimates(const JSet& jset_full,
                                       const std::vector<LocalEstimate>& locals);

// Maximum pseudo-likelihood: per vertex, Newton on the conditional
// multinomial objective sum_x log p(x_v | x_{N_v}); shared components are
// averaged over v in S(j).
EstimateReport pseudo_likelihood_estimate(const ContingencyTable& table, const Graph& g,
                                          const JSet& jset_full,
                                          const SolverConfig& cfg = {});

// Closed-form MLE for decomposable graphs:
//   theta_j = sum_{C in cliques, S(j) subset C} theta^C_j
//           - sum_{S in separators, S(j) subset S} theta^S_j
// with clique/separator parameters from empirical marginal tables.
ThetaVector decomposable_theta(const ContingencyTable& table, const Graph& g,
                               const JSet& jset_full);

}  // namespace loglin
