#include "loglin/harness.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <ostream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "loglin/marginalization.hpp"

namespace loglin {

namespace {

using nlohmann::json;

std::vector<int> resolve_levels(const ExperimentSpec& spec, int vertex_count) {
  if (spec.levels.size() == 1)
    return std::vector<int>(static_cast<std::size_t>(vertex_count), spec.levels[0]);
  if (static_cast<int>(spec.levels.size()) != vertex_count)
    throw UsageError("levels list does not match the vertex count");
  return spec.levels;
}

}  // namespace

std::string spec_to_json(const ExperimentSpec& spec) {
  json j;
  j["graph"] = {{"kind", spec.graph_kind},   {"lattice_k", spec.lattice_k},
                {"star_leaves", spec.star_leaves}, {"path_n", spec.path_n},
                {"random_n", spec.random_n}, {"random_p", spec.random_p},
                {"graph_seed", spec.graph_seed}, {"file", spec.graph_file}};
  j["levels"] = spec.levels;
  j["theta_seed"] = spec.theta_seed;
  j["theta_file"] = spec.theta_file;
  j["sample_sizes"] = spec.sample_sizes;
  j["replications"] = spec.replications;
  j["methods"] = spec.methods;
  j["sampler"] = spec.sampler;
  j["gibbs_burn_in"] = spec.gibbs_burn_in;
  j["gibbs_thinning"] = spec.gibbs_thinning;
  j["seed"] = spec.seed;
  j["solver"] = {{"ipf_tolerance", spec.solver.ipf_tolerance},
                 {"ipf_max_cycles", spec.solver.ipf_max_cycles},
                 {"newton_tolerance", spec.solver.newton_tolerance},
                 {"newton_max_iter", spec.solver.newton_max_iter},
                 {"epsilon_smoothing", spec.solver.epsilon_smoothing},
                 {"divergence_threshold", spec.solver.divergence_threshold},
                 {"local_use_newton", spec.solver.local_use_newton},
                 {"enumeration_guard", spec.solver.enumeration_guard}};
  return j.dump();
}

ModelSetup build_setup(const ExperimentSpec& spec) {
  Graph g = [&] {
    if (spec.graph_kind == "lattice" || spec.graph_kind == "cycle")
      return make_lattice(spec.graph_kind == "cycle" ? 2 : spec.lattice_k);
    if (spec.graph_kind == "star") return make_star(spec.star_leaves);
    if (spec.graph_kind == "path") return make_path(spec.path_n);
    if (spec.graph_kind == "random")
      return make_random_graph(spec.random_n, spec.random_p, spec.graph_seed);
    if (spec.graph_kind == "file") return read_graph_file(spec.graph_file);
    throw UsageError("unknown graph kind '" + spec.graph_kind + "'");
  }();
  CellSpace space(resolve_levels(spec, g.vertex_count()));
  JSet jset = JSet::build(space, cliques_generating_class(g));
  return ModelSetup{std::move(g), std::move(space), std::move(jset)};
}

Eigen::VectorXd resolve_theta(const ExperimentSpec& spec, const JSet& jset) {
  if (!spec.theta_file.empty()) return read_theta_file(spec.theta_file, jset).values;
  return random_theta(jset.size(), RngSeed{spec.theta_seed, 0});
}

SampleSet draw_samples(const ExperimentSpec& spec, const ModelSetup& setup,
                       const Eigen::VectorXd& theta, int n, std::uint64_t stream) {
  const RngSeed seed{spec.seed, stream};
  const bool exact_ok = setup.space.enumerable(spec.solver.enumeration_guard);
  if (spec.sampler == "exact" || (spec.sampler == "auto" && exact_ok))
    return exact_sample(theta, setup.jset, n, seed, spec.solver.enumeration_guard);
  if (spec.sampler == "gibbs" || spec.sampler == "auto")
    return gibbs_sample(theta, setup.jset, setup.graph, n, spec.gibbs_burn_in,
                        spec.gibbs_thinning, seed);
  throw UsageError("unknown sampler '" + spec.sampler + "'");
}

EstimateReport estimate_with_method(const std::string& method,
                                    const ContingencyTable& table, const Graph& g,
                                    const JSet& jset_full, const SolverConfig& cfg) {
  auto finish = [&](EstimateReport report) {
    if (report.theta.has_value() && !report.theta0.has_value() &&
        jset_full.space().enumerable(cfg.enumeration_guard))
      report.theta0 = -cumulant(*report.theta, jset_full, cfg.enumeration_guard);
    if (report.sources.empty()) {
      report.sources.resize(static_cast<std::size_t>(jset_full.size()));
      for (int k = 0; k < jset_full.size(); ++k)
        report.sources[static_cast<std::size_t>(k)] = support(jset_full.cell(k));
    }
    return report;
  };

  try {
    if (method == "global") {
      IpfResult fit = ipf_fit(table, jset_full.generating_class(), cfg);
      ThetaVector theta = theta_from_p(fit.p, jset_full);
      EstimateReport report;
      report.method = method;
      report.theta = std::move(theta.values);
      report.theta0 = theta.theta0;
      report.iterations = fit.cycles;
      report.residual = fit.residual;
      if (report.theta->cwiseAbs().maxCoeff() > cfg.divergence_threshold) {
        report.existence = false;
        report.note = "estimate diverged beyond the divergence threshold";
        report.theta.reset();
        report.theta0.reset();
      }
      return finish(std::move(report));
    }
    if (method == "global-newton") {
      ThetaVector theta = newton_mle(table, jset_full, cfg);
      EstimateReport report;
      report.method = method;
      report.theta = std::move(theta.values);
      report.theta0 = theta.theta0;
      return finish(std::move(report));
    }
    if (method == "one-hop" || method == "two-hop") {
      const int hop = method == "one-hop" ? 1 : 2;
      std::vector<LocalEstimate> locals;
      locals.reserve(static_cast<std::size_t>(g.vertex_count()));
      for (int v = 0; v < g.vertex_count(); ++v)
        locals.push_back(local_marginal_estimate(table, g, jset_full, v, hop, cfg));
      return finish(combine_local_estimates(jset_full, locals));
    }
    if (method == "pseudo")
      return finish(pseudo_likelihood_estimate(table, g, jset_full, cfg));
    if (method == "decomposable") {
      ThetaVector theta = decomposable_theta(table, g, jset_full);
      EstimateReport report;
      report.method = method;
      report.theta = std::move(theta.values);
      report.theta0 = theta.theta0;
      return finish(std::move(report));
    }
  } catch (const NonexistenceError& e) {
    EstimateReport report;
    report.method = method;
    report.existence = false;
    report.note = e.what();
    return report;
  } catch (const NonconvergenceError& e) {
    EstimateReport report;
    report.method = method;
    report.existence = false;
    report.note = e.what();
    report.residual = e.residual();
    return report;
  }
  throw UsageError("unknown method '" + method + "'");
}

namespace {

double relative_mse(const Eigen::VectorXd& estimate, const Eigen::VectorXd& truth) {
  const double denom = truth.squaredNorm();
  if (denom == 0.0) throw UsageError("relative MSE undefined for theta = 0");
  return (estimate - truth).squaredNorm() / denom;
}

std::uint64_t sweep_stream(std::size_t size_index, int replication) {
  return (static_cast<std::uint64_t>(size_index) << 32) |
         static_cast<std::uint64_t>(replication);
}

}  // namespace

std::vector<MseRow> run_mse_sweep(const ExperimentSpec& spec, std::ostream* progress) {
  if (spec.replications < 1) throw UsageError("replications must be >= 1");
  if (spec.sample_sizes.empty() ||
      !std::is_sorted(spec.sample_sizes.begin(), spec.sample_sizes.end()) ||
      spec.sample_sizes.front() <= 0)
    throw UsageError("sample sizes must be positive and ascending");

  const ModelSetup setup = build_setup(spec);
  const Eigen::VectorXd theta_true = resolve_theta(spec, setup.jset);

  std::vector<MseRow> rows;
  for (std::size_t ni = 0; ni < spec.sample_sizes.size(); ++ni) {
    const int n = spec.sample_sizes[ni];
    std::map<std::string, std::vector<double>> kept;
    std::map<std::string, int> discarded;
    for (const auto& m : spec.methods) {
      kept[m];
      discarded[m] = 0;
    }
    for (int rep = 0; rep < spec.replications; ++rep) {
      const SampleSet samples =
          draw_samples(spec, setup, theta_true, n, sweep_stream(ni, rep));
      const ContingencyTable table = samples.to_table();
      for (const auto& method : spec.methods) {
        const EstimateReport report =
            estimate_with_method(method, table, setup.graph, setup.jset, spec.solver);
        if (!report.existence) {
          ++discarded[method];
          continue;
        }
        kept[method].push_back(relative_mse(*report.theta, theta_true));
      }
      if (progress && (rep + 1) % 10 == 0)
        *progress << "  n=" << n << " rep " << (rep + 1) << "/" << spec.replications
                  << "\n";
    }
    for (const auto& method : spec.methods) {
      const auto& values = kept[method];
      if (values.empty())
        throw NonexistenceError("mse-sweep: every replication was discarded for method '" +
                                method + "' at n=" + std::to_string(n));
      const double mean =
          std::accumulate(values.begin(), values.end(), 0.0) / values.size();
      double var = 0.0;
      for (double x : values) var += (x - mean) * (x - mean);
      var = values.size() > 1 ? var / (values.size() - 1) : 0.0;
      rows.push_back(MseRow{method, n, mean, std::sqrt(var), discarded[method]});
    }
  }
  return rows;
}

void write_mse_csv(std::ostream& out, const ExperimentSpec& spec,
                   const std::vector<MseRow>& rows) {
  out << "# spec " << spec_to_json(spec) << "\n";
  out << "method,n,mean_rel_mse,sd,discarded_count\n";
  out.precision(17);
  for (const auto& r : rows)
    out << r.method << "," << r.n << "," << r.mean_rel_mse << "," << r.sd << ","
        << r.discarded << "\n";
}

std::vector<VarianceRow> run_variance_sweep(const ExperimentSpec& spec, int target_vertex,
                                            const Cell& target_cell,
                                            std::ostream* progress) {
  if (spec.replications < 1) throw UsageError("replications must be >= 1");
  if (spec.sample_sizes.empty() ||
      !std::is_sorted(spec.sample_sizes.begin(), spec.sample_sizes.end()) ||
      spec.sample_sizes.front() <= 0)
    throw UsageError("sample sizes must be positive and ascending");
  const ModelSetup setup = build_setup(spec);
  const Eigen::VectorXd theta_true = resolve_theta(spec, setup.jset);

  const auto target_index = setup.jset.find(target_cell);
  if (!target_index)
    throw UsageError("variance-sweep: target cell is not in the J-set");
  // The target must be exempt at the target vertex for both hops.
  for (int hop : {1, 2}) {
    const Neighborhood nb = neighborhood(setup.graph, target_vertex, hop);
    const VertexSet supp = support(target_cell);
    if (!is_subset(supp, nb.members) || is_subset(supp, nb.buffer))
      throw UsageError("variance-sweep: target cell is buffered (not exempt) at vertex " +
                       std::to_string(target_vertex) + " for hop " + std::to_string(hop));
  }

  std::vector<VarianceRow> rows;
  for (std::size_t ni = 0; ni < spec.sample_sizes.size(); ++ni) {
    const int n = spec.sample_sizes[ni];
    std::map<std::string, std::vector<double>> values;
    for (const auto& m : spec.methods) values[m];
    for (int rep = 0; rep < spec.replications; ++rep) {
      const SampleSet samples =
          draw_samples(spec, setup, theta_true, n, sweep_stream(ni, rep));
      const ContingencyTable table = samples.to_table();
      for (const auto& method : spec.methods) {
        if (method == "one-hop" || method == "two-hop") {
          const int hop = method == "one-hop" ? 1 : 2;
          try {
            const LocalEstimate le = local_marginal_estimate(
                table, setup.graph, setup.jset, target_vertex, hop, spec.solver);
            values[method].push_back(le.components.at(target_cell));
          } catch (const NonexistenceError&) {
          } catch (const NonconvergenceError&) {
          }
        } else {
          const EstimateReport report = estimate_with_method(
              method, table, setup.graph, setup.jset, spec.solver);
          if (report.existence)
            values[method].push_back((*report.theta)[*target_index]);
        }
      }
      if (progress && (rep + 1) % 25 == 0)
        *progress << "  n=" << n << " rep " << (rep + 1) << "/" << spec.replications
                  << "\n";
    }
    for (const auto& method : spec.methods) {
      const auto& xs = values[method];
      if (xs.size() < 2)
        throw NonexistenceError("variance-sweep: fewer than two usable replications for '" +
                                method + "' at n=" + std::to_string(n));
      const double r = static_cast<double>(xs.size());
      const double mean = std::accumulate(xs.begin(), xs.end(), 0.0) / r;
      double m2 = 0.0, m4 = 0.0;
      for (double x : xs) {
        const double d = x - mean;
        m2 += d * d;
        m4 += d * d * d * d;
      }
      const double s2 = m2 / (r - 1.0);
      m4 /= r;
      // Var(s^2) ~ (m4 - s^4 (r-3)/(r-1)) / r.
      const double var_s2 = std::max(0.0, (m4 - s2 * s2 * (r - 3.0) / (r - 1.0)) / r);
      rows.push_back(VarianceRow{method, n, s2, std::sqrt(var_s2),
                                 static_cast<int>(xs.size())});
    }
  }
  return rows;
}

void write_variance_csv(std::ostream& out, const ExperimentSpec& spec, int target_vertex,
                        const Cell& target_cell, const std::vector<VarianceRow>& rows) {
  const ModelSetup setup = build_setup(spec);
  out << "# spec " << spec_to_json(spec) << "\n";
  out << "# target_vertex " << target_vertex << "\n";
  out << "# target_cell " << encode_cell(setup.space, target_cell) << "\n";
  out << "method,n,variance,mc_se,used\n";
  out.precision(17);
  for (const auto& r : rows)
    out << r.method << "," << r.n << "," << r.variance << "," << r.mc_se << "," << r.used
        << "\n";
}

VerifyResult run_verify(const Graph& g, const std::vector<int>& levels,
                        std::uint64_t seed, int draws, const SolverConfig& cfg) {
  VerifyResult result;
  CellSpace space(levels);
  if (g.vertex_count() != space.vertex_count())
    throw UsageError("run_verify: levels do not match the graph");
  space.require_enumerable(cfg.enumeration_guard);
  const JSet jset = JSet::build(space, cliques_generating_class(g));

  auto record = [&](const std::string& what, bool pass, double measure) {
    std::ostringstream line;
    line << (pass ? "PASS " : "FAIL ") << what << " (measure " << measure << ")";
    result.lines.push_back(line.str());
    result.all_pass = result.all_pass && pass;
  };

  // Marginal-parameter identity against the exact-marginalization oracle,
  // and the buffer exemption equalities, per vertex and hop.
  for (int hop : {1, 2}) {
    double identity_diff = 0.0, exempt_diff = 0.0;
    for (int d = 0; d < draws; ++d) {
      const Eigen::VectorXd theta =
          random_theta(jset.size(), RngSeed{seed, static_cast<std::uint64_t>(d)});
      for (int v = 0; v < g.vertex_count(); ++v) {
        const Neighborhood nb = neighborhood(g, v, hop);
        const MarginalTheta oracle =
            marginal_theta_oracle(theta, jset, nb.members, cfg.enumeration_guard);
        for (int k = 0; k < oracle.jset.size(); ++k) {
          const Cell full = pad_cell(space, nb.members, oracle.jset.cell(k));
          const double direct =
              marginal_theta_identity(theta, jset, nb, full, cfg.enumeration_guard);
          identity_diff = std::max(identity_diff, std::abs(direct - oracle.theta.values[k]));
        }
        for (const Cell& j : classify_buffer(nb, jset).exempt) {
          const auto kj = jset.find(j);
          const auto km = oracle.jset.find(restrict_cell(j, nb.members));
          exempt_diff = std::max(
              exempt_diff, std::abs(theta[*kj] - oracle.theta.values[*km]));
        }
      }
    }
    record("marginal identity, hop " + std::to_string(hop) + ", all vertices, " +
               std::to_string(draws) + " draws: max |direct - oracle|",
           identity_diff < 1e-9, identity_diff);
    record("buffer exemption, hop " + std::to_string(hop) +
               ": max |theta_j - marginal theta_j| over exempt components",
           exempt_diff < 1e-9, exempt_diff);
  }

  // Variance ordering per vertex.
  {
    bool ordering_ok = true;
    double worst = 0.0;
    for (int d = 0; d < draws; ++d) {
      const Eigen::VectorXd theta = random_theta(
          jset.size(), RngSeed{seed, 1000 + static_cast<std::uint64_t>(d)});
      for (int v = 0; v < g.vertex_count(); ++v) {
        VarianceOrderingReport report =
            verify_variance_ordering(theta, jset, g, v, cfg.enumeration_guard);
        ordering_ok = ordering_ok && report.all_pass;
        for (const auto& row : report.rows) {
          worst = std::min(worst, row.var_one_hop - row.var_two_hop);
          worst = std::min(worst, row.var_two_hop - row.var_global);
        }
        result.ordering.push_back(std::move(report));
      }
    }
    record("variance ordering var1 >= var2 >= varG, all vertices, " +
               std::to_string(draws) + " draws: worst slack",
           ordering_ok, worst);
  }

  // Decomposable closed form against Newton, when applicable.
  if (is_decomposable(g)) {
    auto rng = make_rng(RngSeed{seed, 2000});
    std::uniform_int_distribution<int> count_of(1, 30);
    double diff = 0.0;
    for (int d = 0; d < std::min(draws, 5); ++d) {
      ContingencyTable table(space);
      const auto cells = *space.cell_count();
      for (std::uint64_t i = 0; i < cells; ++i)
        table.add(space.cell_at(i), count_of(rng));
      const ThetaVector closed = decomposable_theta(table, g, jset);
      const ThetaVector newton = newton_mle(table, jset, cfg);
      diff = std::max(diff, (closed.values - newton.values).cwiseAbs().maxCoeff());
    }
    record("decomposable closed form vs Newton MLE: max component diff", diff < 1e-8,
           diff);
  }

  return result;
}

void write_variance_ordering_csv(std::ostream& out, const CellSpace& space,
                                 const std::vector<VarianceOrderingReport>& reports) {
  out << "vertex,cell,var1hop,var2hop,varGlobal,pass\n";
  out.precision(17);
  for (const auto& report : reports)
    for (const auto& row : report.rows)
      out << report.vertex << "," << encode_cell(space, row.cell) << ","
          << row.var_one_hop << "," << row.var_two_hop << "," << row.var_global << ","
          << (row.pass ? 1 : 0) << "\n";
}

}  // namespace loglin
