#include "loglin/estimators.hpp"

#include <Eigen/Cholesky>
#include <algorithm>
#include <cmath>
#include <sstream>

#include "loglin/asymptotics.hpp"

namespace loglin {

namespace {

// Walks the first n cells in lexicographic order, passing (cell_index,
// marginal_index) where the marginal index is the cell's restriction to
// `members`. Indices are maintained incrementally.
template <class F>
void walk_with_marginal(const CellSpace& space, const VertexSet& members,
                        std::uint64_t n, F&& f) {
  const int p = space.vertex_count();
  std::vector<std::uint64_t> mstride(static_cast<std::size_t>(p), 0);
  std::uint64_t s = 1;
  for (std::size_t k = members.size(); k-- > 0;) {
    mstride[static_cast<std::size_t>(members[k])] = s;
    s *= static_cast<std::uint64_t>(space.level_count(members[k]));
  }
  std::vector<int> level(static_cast<std::size_t>(p), 0);
  std::uint64_t midx = 0;
  for (std::uint64_t i = 0; i < n; ++i) {
    f(i, midx);
    std::size_t v = static_cast<std::size_t>(p);
    while (v-- > 0) {
      if (++level[v] < space.level_count(static_cast<int>(v))) {
        midx += mstride[v];
        break;
      }
      midx -= static_cast<std::uint64_t>(level[v] - 1) * mstride[v];
      level[v] = 0;
    }
  }
}

void check_config(const SolverConfig& cfg) {
  if (cfg.ipf_tolerance <= 0.0 || cfg.newton_tolerance <= 0.0 ||
      cfg.divergence_threshold <= 0.0 || cfg.epsilon_smoothing < 0.0 ||
      cfg.ipf_max_cycles < 1 || cfg.newton_max_iter < 1)
    throw UsageError("SolverConfig: tolerances and limits must be positive");
}

Eigen::VectorXd smoothed_counts(const ContingencyTable& table, double epsilon) {
  const auto& counts = table.dense();
  Eigen::VectorXd out(static_cast<Eigen::Index>(counts.size()));
  for (std::size_t i = 0; i < counts.size(); ++i)
    out[static_cast<Eigen::Index>(i)] = static_cast<double>(counts[i]) + epsilon;
  return out;
}

}  // namespace

IpfResult ipf_fit(const ContingencyTable& table, const GeneratingClass& gen,
                  const SolverConfig& cfg) {
  check_config(cfg);
  const CellSpace& space = table.space();
  const auto n = space.require_enumerable(cfg.enumeration_guard);
  if (gen.vertex_count() != space.vertex_count())
    throw UsageError("ipf_fit: generating class and table disagree on |V|");
  if (table.total() <= 0) throw UsageError("ipf_fit: empty table");

  const Eigen::VectorXd counts = smoothed_counts(table, cfg.epsilon_smoothing);
  const double total = counts.sum();

  // Target marginals per maximal set, on the probability scale.
  const auto& sets = gen.maximal_sets();
  std::vector<Eigen::VectorXd> target(sets.size());
  for (std::size_t d = 0; d < sets.size(); ++d) {
    const auto msize =
        static_cast<Eigen::Index>(*space.restrict_to(sets[d]).cell_count());
    Eigen::VectorXd acc = Eigen::VectorXd::Zero(msize);
    walk_with_marginal(space, sets[d], n, [&](std::uint64_t i, std::uint64_t m) {
      acc[static_cast<Eigen::Index>(m)] += counts[static_cast<Eigen::Index>(i)];
    });
    acc /= total;
    if (cfg.epsilon_smoothing == 0.0 && (acc.array() <= 0.0).any()) {
      std::ostringstream msg;
      msg << "ipf_fit: zero empirical marginal on generating set {";
      for (std::size_t k = 0; k < sets[d].size(); ++k)
        msg << (k ? "," : "") << sets[d][k];
      msg << "}; the MLE does not exist";
      throw NonexistenceError(msg.str());
    }
    target[d] = std::move(acc);
  }

  Eigen::VectorXd p =
      Eigen::VectorXd::Constant(static_cast<Eigen::Index>(n), 1.0 / static_cast<double>(n));
  Eigen::VectorXd marg, ratio;
  double residual = 0.0;
  for (int cycle = 1; cycle <= cfg.ipf_max_cycles; ++cycle) {
    double pre_update_gap = 0.0;
    for (std::size_t d = 0; d < sets.size(); ++d) {
      marg.setZero(target[d].size());
      walk_with_marginal(space, sets[d], n, [&](std::uint64_t i, std::uint64_t m) {
        marg[static_cast<Eigen::Index>(m)] += p[static_cast<Eigen::Index>(i)];
      });
      pre_update_gap = std::max(pre_update_gap, (marg - target[d]).cwiseAbs().maxCoeff());
      ratio = (target[d].array() / marg.array()).matrix();
      walk_with_marginal(space, sets[d], n, [&](std::uint64_t i, std::uint64_t m) {
        p[static_cast<Eigen::Index>(i)] *= ratio[static_cast<Eigen::Index>(m)];
      });
    }
    if (pre_update_gap < cfg.ipf_tolerance) {
      // Verify the final p against every target at once.
      residual = 0.0;
      for (std::size_t d = 0; d < sets.size(); ++d) {
        marg.setZero(target[d].size());
        walk_with_marginal(space, sets[d], n, [&](std::uint64_t i, std::uint64_t m) {
          marg[static_cast<Eigen::Index>(m)] += p[static_cast<Eigen::Index>(i)];
        });
        residual = std::max(residual, (marg - target[d]).cwiseAbs().maxCoeff());
      }
      if (residual < cfg.ipf_tolerance) return IpfResult{std::move(p), cycle, residual};
    } else {
      residual = pre_update_gap;
    }
  }
  throw NonconvergenceError("ipf_fit: marginal gap " + std::to_string(residual) +
                                " after " + std::to_string(cfg.ipf_max_cycles) + " cycles",
                            residual);
}

ThetaVector newton_mle(const ContingencyTable& table, const JSet& jset,
                       const SolverConfig& cfg) {
  check_config(cfg);
  const CellSpace& space = table.space();
  space.require_enumerable(cfg.enumeration_guard);
  if (space != jset.space())
    throw UsageError("newton_mle: table and J-set over different spaces");
  const double total = static_cast<double>(table.total()) +
                       cfg.epsilon_smoothing * static_cast<double>(*space.cell_count());

  // Mean canonical statistics (with optional smoothing).
  const Eigen::VectorXd counts = smoothed_counts(table, cfg.epsilon_smoothing);
  Eigen::VectorXd tbar(jset.size());
  for (int k = 0; k < jset.size(); ++k) {
    double acc = 0.0;
    for_each_upper_index(space, jset.cell(k),
                         [&](std::uint64_t i) { acc += counts[static_cast<Eigen::Index>(i)]; });
    tbar[k] = acc / total;
  }

  Eigen::VectorXd theta = Eigen::VectorXd::Zero(jset.size());
  auto mean_loglik = [&](const Eigen::VectorXd& th) {
    return tbar.dot(th) - cumulant(th, jset, cfg.enumeration_guard);
  };
  double current = mean_loglik(theta);

  for (int iter = 1; iter <= cfg.newton_max_iter; ++iter) {
    const Eigen::VectorXd p = p_from_theta(theta, jset, cfg.enumeration_guard);
    const FisherMatrix fisher = fisher_matrix(p, jset);
    const Eigen::VectorXd grad = tbar - fisher.event_probabilities;
    const double gap = grad.cwiseAbs().maxCoeff();
    if (gap < cfg.newton_tolerance) {
      ThetaVector out;
      out.values = theta;
      out.theta0 = -cumulant(theta, jset, cfg.enumeration_guard);
      return out;
    }

    Eigen::LDLT<Eigen::MatrixXd> ldlt(fisher.matrix);
    if (ldlt.info() != Eigen::Success || ldlt.vectorD().minCoeff() <=
                                             ldlt.vectorD().maxCoeff() * 1e-14) {
      throw NonexistenceError(
          "newton_mle: Hessian numerically singular (degenerate or nonexistent MLE)");
    }
    const Eigen::VectorXd step = ldlt.solve(grad);

    // Halve the step while the objective decreases (beyond rounding).
    const double slack = 1e-14 * (1.0 + std::abs(current));
    double lambda = 1.0;
    Eigen::VectorXd proposal = theta + step;
    double value = mean_loglik(proposal);
    for (int h = 0; h < 50 && value < current - slack; ++h) {
      lambda *= 0.5;
      proposal = theta + lambda * step;
      value = mean_loglik(proposal);
    }
    theta = std::move(proposal);
    current = value;

    if (theta.cwiseAbs().maxCoeff() > cfg.divergence_threshold)
      throw NonexistenceError("newton_mle: theta diverged beyond " +
                              std::to_string(cfg.divergence_threshold));
  }
  throw NonconvergenceError("newton_mle: no convergence after " +
                                std::to_string(cfg.newton_max_iter) + " iterations",
                            0.0);
}

LocalEstimate local_marginal_estimate(const ContingencyTable& table, const Graph& g,
                                      const JSet& jset_full, int v, int hop,
                                      const SolverConfig& cfg) {
  const Neighborhood nb = neighborhood(g, v, hop);
  const MarginalModel mm = relaxed_model(nb, jset_full);
  const ContingencyTable mtab = marginal_table(table, nb.members);

  LocalEstimate out;
  out.vertex = v;
  out.hop = hop;

  ThetaVector theta_rel;
  try {
    if (cfg.local_use_newton) {
      theta_rel = newton_mle(mtab, mm.jset, cfg);
    } else {
      IpfResult fit = ipf_fit(mtab, mm.jset.generating_class(), cfg);
      out.cycles = fit.cycles;
      out.residual = fit.residual;
      theta_rel = theta_from_p(fit.p, mm.jset);
    }
  } catch (const NonexistenceError& e) {
    throw NonexistenceError("vertex " + std::to_string(v) + ": " + e.what());
  } catch (const NonconvergenceError& e) {
    throw NonconvergenceError("vertex " + std::to_string(v) + ": " + e.what(),
                              e.residual());
  }

  for (const Cell& j : classify_buffer(nb, jset_full).exempt) {
    const auto k = mm.jset.find(restrict_cell(j, nb.members));
    if (!k) throw UsageError("local_marginal_estimate: exempt cell missing");
    const double value = theta_rel.values[*k];
    if (std::abs(value) > cfg.divergence_threshold)
      throw NonexistenceError("vertex " + std::to_string(v) +
                              ": local estimate diverged beyond " +
                              std::to_string(cfg.divergence_threshold));
    out.components[j] = value;
  }
  return out;
}

EstimateReport combine_local_estimates(const JSet& jset_full,
                                       const std::vector<LocalEstimate>& locals) {
  EstimateReport report;
  report.method = locals.empty() || locals.front().hop == 1 ? "one-hop" : "two-hop";
  Eigen::VectorXd theta = Eigen::VectorXd::Zero(jset_full.size());
  report.sources.resize(static_cast<std::size_t>(jset_full.size()));
  for (int k = 0; k < jset_full.size(); ++k) {
    const Cell& j = jset_full.cell(k);
    const VertexSet supp = support(j);
    double acc = 0.0;
    int used = 0;
    for (const LocalEstimate& le : locals) {
      if (!std::binary_search(supp.begin(), supp.end(), le.vertex)) continue;
      const auto it = le.components.find(j);
      if (it == le.components.end()) continue;
      acc += it->second;
      ++used;
      report.sources[static_cast<std::size_t>(k)].push_back(le.vertex);
    }
    if (used == 0)
      throw CoverageError("combine_local_estimates: no vertex covers component " +
                          encode_cell(jset_full.space(), j));
    theta[k] = acc / used;
  }
  for (const LocalEstimate& le : locals) {
    report.iterations = std::max(report.iterations, le.cycles);
    report.residual = std::max(report.residual, le.residual);
  }
  report.theta = std::move(theta);
  return report;
}

EstimateReport pseudo_likelihood_estimate(const ContingencyTable& table, const Graph& g,
                                          const JSet& jset_full,
                                          const SolverConfig& cfg) {
  check_config(cfg);
  if (table.total() <= 0) throw UsageError("pseudo_likelihood_estimate: empty table");
  const CellSpace& space = table.space();
  if (g.vertex_count() != space.vertex_count())
    throw UsageError("pseudo_likelihood_estimate: graph and table disagree on |V|");

  EstimateReport report;
  report.method = "pseudo";
  Eigen::VectorXd sum = Eigen::VectorXd::Zero(jset_full.size());
  Eigen::VectorXi hits = Eigen::VectorXi::Zero(jset_full.size());
  report.sources.resize(static_cast<std::size_t>(jset_full.size()));

  for (int v = 0; v < g.vertex_count(); ++v) {
    // Components whose support contains v; all live inside M_{1,v}.
    std::vector<int> local_idx;
    for (int k = 0; k < jset_full.size(); ++k) {
      const Cell& j = jset_full.cell(k);
      if (j[static_cast<std::size_t>(v)] != 0) local_idx.push_back(k);
    }
    if (local_idx.empty()) continue;

    const Neighborhood nb = neighborhood(g, v, 1);
    const ContingencyTable mtab = marginal_table(table, nb.members);
    const CellSpace mspace = mtab.space();
    const auto vpos = static_cast<std::size_t>(
        positions_in(nb.members, VertexSet{v}).front());
    const int vlevels = space.level_count(v);

    // Restricted feature cells.
    std::vector<Cell> feature(local_idx.size());
    for (std::size_t a = 0; a < local_idx.size(); ++a)
      feature[a] = restrict_cell(jset_full.cell(local_idx[a]), nb.members);

    // Group marginal counts by the conditioning configuration x_{N_v}.
    struct Group {
      Eigen::VectorXd counts;                   // per level of X_v
      std::vector<std::vector<int>> features;   // active local indices per level
    };
    std::map<Cell, Group> groups;
    for (const auto& [mcell, count] : mtab.entries()) {
      Cell key = mcell;
      key[vpos] = 0;
      auto [it, fresh] = groups.try_emplace(key);
      if (fresh) {
        it->second.counts = Eigen::VectorXd::Zero(vlevels);
        it->second.features.resize(static_cast<std::size_t>(vlevels));
        Cell candidate = key;
        for (int c = 0; c < vlevels; ++c) {
          candidate[vpos] = c;
          for (std::size_t a = 0; a < feature.size(); ++a)
            if (triangleleft(feature[a], candidate))
              it->second.features[static_cast<std::size_t>(c)].push_back(static_cast<int>(a));
        }
      }
      it->second.counts[mcell[vpos]] += static_cast<double>(count);
    }

    // Damped Newton on the mean conditional loglikelihood.
    const auto d = static_cast<Eigen::Index>(local_idx.size());
    const double total = static_cast<double>(table.total());
    Eigen::VectorXd u = Eigen::VectorXd::Zero(d);

    auto objective = [&](const Eigen::VectorXd& x) {
      double acc = 0.0;
      Eigen::VectorXd logits(vlevels);
      for (const auto& [key, grp] : groups) {
        for (int c = 0; c < vlevels; ++c) {
          double s = 0.0;
          for (int a : grp.features[static_cast<std::size_t>(c)]) s += x[a];
          logits[c] = s;
        }
        const double lse = log_sum_exp(logits);
        for (int c = 0; c < vlevels; ++c)
          acc += grp.counts[c] * (logits[c] - lse);
      }
      return acc / total;
    };

    double current = objective(u);
    bool converged = false;
    for (int iter = 1; iter <= cfg.newton_max_iter; ++iter) {
      Eigen::VectorXd grad = Eigen::VectorXd::Zero(d);
      Eigen::MatrixXd hess = Eigen::MatrixXd::Zero(d, d);
      Eigen::VectorXd logits(vlevels), probs(vlevels);
      for (const auto& [key, grp] : groups) {
        for (int c = 0; c < vlevels; ++c) {
          double s = 0.0;
          for (int a : grp.features[static_cast<std::size_t>(c)]) s += u[a];
          logits[c] = s;
        }
        const double lse = log_sum_exp(logits);
        probs = (logits.array() - lse).exp().matrix();
        const double nq = grp.counts.sum();
        Eigen::VectorXd mean = Eigen::VectorXd::Zero(d);
        for (int c = 0; c < vlevels; ++c) {
          for (int a : grp.features[static_cast<std::size_t>(c)]) {
            grad[a] += grp.counts[c] - nq * probs[c];
            mean[a] += probs[c];
          }
        }
        // E[ff'] - E[f]E[f'], accumulated per level.
        for (int c = 0; c < vlevels; ++c) {
          const auto& act = grp.features[static_cast<std::size_t>(c)];
          for (int a : act)
            for (int b : act) hess(a, b) += nq * probs[c];
        }
        hess.noalias() -= nq * mean * mean.transpose();
      }
      grad /= total;
      hess /= total;

      if (grad.cwiseAbs().maxCoeff() < cfg.newton_tolerance) {
        converged = true;
        report.iterations = std::max(report.iterations, iter);
        break;
      }
      Eigen::LDLT<Eigen::MatrixXd> ldlt(hess);
      if (ldlt.info() != Eigen::Success ||
          ldlt.vectorD().minCoeff() <= ldlt.vectorD().maxCoeff() * 1e-14) {
        throw NonexistenceError("pseudo_likelihood_estimate: separation at vertex " +
                                std::to_string(v));
      }
      const Eigen::VectorXd step = ldlt.solve(grad);
      const double slack = 1e-14 * (1.0 + std::abs(current));
      Eigen::VectorXd proposal = u + step;
      double value = objective(proposal);
      for (int h = 0; h < 50 && value < current - slack; ++h) {
        proposal = u + (proposal - u) * 0.5;
        value = objective(proposal);
      }
      u = std::move(proposal);
      current = value;
      if (u.cwiseAbs().maxCoeff() > cfg.divergence_threshold)
        throw NonexistenceError(
            "pseudo_likelihood_estimate: estimate diverged at vertex " +
            std::to_string(v) + " (separation)");
    }
    if (!converged)
      throw NonconvergenceError("pseudo_likelihood_estimate: vertex " +
                                    std::to_string(v) + " did not converge",
                                0.0);

    for (std::size_t a = 0; a < local_idx.size(); ++a) {
      sum[local_idx[a]] += u[static_cast<Eigen::Index>(a)];
      hits[local_idx[a]] += 1;
      report.sources[static_cast<std::size_t>(local_idx[a])].push_back(v);
    }
  }

  for (int k = 0; k < jset_full.size(); ++k) {
    if (hits[k] == 0)
      throw CoverageError("pseudo_likelihood_estimate: no vertex covers component " +
                          encode_cell(jset_full.space(), jset_full.cell(k)));
    sum[k] /= hits[k];
  }
  report.theta = std::move(sum);
  return report;
}

ThetaVector decomposable_theta(const ContingencyTable& table, const Graph& g,
                               const JSet& jset_full) {
  const JunctionTree jt = junction_tree(g);
  const double total = static_cast<double>(table.total());
  if (total <= 0) throw UsageError("decomposable_theta: empty table");

  struct MarginalFit {
    JSet jset;
    ThetaVector theta;
  };
  auto fit_margin = [&](const VertexSet& members) -> MarginalFit {
    const ContingencyTable mtab = marginal_table(table, members);
    const auto& counts = mtab.dense();
    Eigen::VectorXd phat(static_cast<Eigen::Index>(counts.size()));
    for (std::size_t i = 0; i < counts.size(); ++i) {
      if (counts[i] == 0)
        throw NonexistenceError(
            "decomposable_theta: zero marginal cell; the MLE does not exist");
      phat[static_cast<Eigen::Index>(i)] = static_cast<double>(counts[i]) / total;
    }
    JSet sat = JSet::saturated(mtab.space());
    ThetaVector th = theta_from_p(phat, sat);
    return MarginalFit{std::move(sat), std::move(th)};
  };

  std::map<VertexSet, MarginalFit> cache;
  auto fit_of = [&](const VertexSet& members) -> const MarginalFit& {
    auto it = cache.find(members);
    if (it == cache.end()) it = cache.emplace(members, fit_margin(members)).first;
    return it->second;
  };

  ThetaVector out;
  out.values = Eigen::VectorXd::Zero(jset_full.size());
  out.theta0 = 0.0;
  for (const auto& c : jt.cliques) out.theta0 += fit_of(c).theta.theta0;
  for (const auto& s : jt.separators)
    if (!s.empty()) out.theta0 -= fit_of(s).theta.theta0;

  for (int k = 0; k < jset_full.size(); ++k) {
    const Cell& j = jset_full.cell(k);
    const VertexSet supp = support(j);
    double acc = 0.0;
    for (const auto& c : jt.cliques) {
      if (!is_subset(supp, c)) continue;
      const MarginalFit& fit = fit_of(c);
      acc += fit.theta.values[*fit.jset.find(restrict_cell(j, c))];
    }
    for (const auto& s : jt.separators) {
      if (s.empty() || !is_subset(supp, s)) continue;
      const MarginalFit& fit = fit_of(s);
      acc -= fit.theta.values[*fit.jset.find(restrict_cell(j, s))];
    }
    out.values[k] = acc;
  }
  return out;
}

}  // namespace loglin
