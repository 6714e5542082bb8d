#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "loglin/harness.hpp"
#include "loglin/marginalization.hpp"

namespace {

using namespace loglin;

void add_graph_options(CLI::App* cmd, ExperimentSpec& spec) {
  cmd->add_option("--graph", spec.graph_file, "graph file (edge list with #vertices header)");
  cmd->add_option("--type", spec.graph_kind,
                  "graph generator: lattice|cycle|star|path|random|file");
  cmd->add_option("--k", spec.lattice_k, "lattice side length");
  cmd->add_option("--leaves", spec.star_leaves, "star leaf count");
  cmd->add_option("--path-n", spec.path_n, "path vertex count");
  cmd->add_option("--vertices", spec.random_n, "random graph vertex count");
  cmd->add_option("--edge-prob", spec.random_p, "random graph edge probability");
  cmd->add_option("--graph-seed", spec.graph_seed, "random graph seed");
  cmd->add_option("--levels", spec.levels,
                  "levels per vertex (one value applies to all)")
      ->delimiter(',');
  cmd->callback([cmd, &spec] {
    if (cmd->count("--graph") && !cmd->count("--type")) spec.graph_kind = "file";
  });
}

void add_solver_options(CLI::App* cmd, SolverConfig& solver) {
  cmd->add_option("--ipf-tol", solver.ipf_tolerance, "IPF marginal tolerance");
  cmd->add_option("--ipf-max-cycles", solver.ipf_max_cycles, "IPF cycle limit");
  cmd->add_option("--newton-tol", solver.newton_tolerance, "Newton gradient tolerance");
  cmd->add_option("--newton-max-iter", solver.newton_max_iter, "Newton iteration limit");
  cmd->add_option("--epsilon", solver.epsilon_smoothing,
                  "additive cell-count smoothing constant (0 = off)");
  cmd->add_option("--divergence-threshold", solver.divergence_threshold,
                  "|theta_j| beyond this flags nonexistence");
  cmd->add_flag("--local-newton", solver.local_use_newton,
                "fit local relaxed models by Newton instead of IPF");
  cmd->add_option("--guard", solver.enumeration_guard,
                  "cell-count ceiling for exact enumeration");
}

void add_sampler_options(CLI::App* cmd, ExperimentSpec& spec) {
  cmd->add_option("--sampler", spec.sampler, "exact|gibbs|auto");
  cmd->add_option("--burn-in", spec.gibbs_burn_in, "Gibbs burn-in scans");
  cmd->add_option("--thinning", spec.gibbs_thinning, "Gibbs thinning interval");
}

std::ofstream open_output(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw UsageError("cannot open '" + path + "' for writing");
  return out;
}

// A data file is either a table CSV (header "cell,count") or a raw list
// of per-individual cells; both start with "# levels ...".
ContingencyTable load_data(const std::string& path) {
  std::ifstream probe(path);
  if (!probe) throw UsageError("cannot open '" + path + "' for reading");
  std::string line;
  while (std::getline(probe, line)) {
    if (line.empty() || line[0] == '#') continue;
    if (line == "cell,count") return read_table_file(path);
    return read_samples_file(path).to_table();
  }
  throw UsageError(path + ": no data lines found");
}

int run(int argc, char** argv) {
  CLI::App app{"Estimation of discrete hierarchical log-linear models via "
               "local marginal likelihoods"};
  app.require_subcommand(1);

  ExperimentSpec spec;
  std::string out_path, theta_path, data_path, method = "two-hop", cell_string;
  std::string format = "table";
  int n = 1000, draws = 20, target_vertex = 0;

  auto* gen_graph = app.add_subcommand("gen-graph", "write a generated graph");
  add_graph_options(gen_graph, spec);
  gen_graph->add_option("--out", out_path, "output file")->required();

  auto* gen_data = app.add_subcommand("gen-data", "sample synthetic data from a model");
  add_graph_options(gen_data, spec);
  add_sampler_options(gen_data, spec);
  add_solver_options(gen_data, spec.solver);
  gen_data->add_option("--theta", theta_path, "theta JSON file (default: seeded draw)");
  gen_data->add_option("--theta-seed", spec.theta_seed, "seed for the theta draw");
  gen_data->add_option("--n", n, "sample size")->required();
  gen_data->add_option("--seed", spec.seed, "sampling seed")->required();
  gen_data->add_option("--format", format, "table|samples");
  gen_data->add_option("--out", out_path, "output file")->required();

  auto* estimate = app.add_subcommand("estimate", "fit one model to a data file");
  add_graph_options(estimate, spec);
  add_solver_options(estimate, spec.solver);
  estimate->add_option("--data", data_path, "table CSV or samples file")->required();
  estimate->add_option("--method", method,
                       "global|global-newton|one-hop|two-hop|pseudo|decomposable");
  estimate->add_option("--out", out_path, "report JSON path");

  auto* mse = app.add_subcommand("mse-sweep", "relative MSE versus sample size");
  add_graph_options(mse, spec);
  add_sampler_options(mse, spec);
  add_solver_options(mse, spec.solver);
  mse->add_option("--theta-seed", spec.theta_seed, "seed for the true theta");
  mse->add_option("--theta", spec.theta_file, "theta JSON file");
  mse->add_option("--sizes", spec.sample_sizes, "sample sizes")->delimiter(',');
  mse->add_option("--reps", spec.replications, "replications per size");
  mse->add_option("--methods", spec.methods, "methods to compare")->delimiter(',');
  mse->add_option("--seed", spec.seed, "sampling seed")->required();
  mse->add_option("--out", out_path, "CSV output path")->required();

  auto* var = app.add_subcommand("variance-sweep",
                                 "sample variance of one component at one vertex");
  add_graph_options(var, spec);
  add_sampler_options(var, spec);
  add_solver_options(var, spec.solver);
  var->add_option("--theta-seed", spec.theta_seed, "seed for the true theta");
  var->add_option("--theta", spec.theta_file, "theta JSON file");
  var->add_option("--sizes", spec.sample_sizes, "sample sizes")->delimiter(',');
  var->add_option("--reps", spec.replications, "replications per size");
  var->add_option("--methods", spec.methods, "methods to compare")->delimiter(',');
  var->add_option("--vertex", target_vertex, "target vertex")->required();
  var->add_option("--cell", cell_string, "target cell (encoded)")->required();
  var->add_option("--seed", spec.seed, "sampling seed")->required();
  var->add_option("--out", out_path, "CSV output path")->required();

  auto* verify = app.add_subcommand(
      "verify", "check the marginal identities and the variance ordering");
  add_graph_options(verify, spec);
  add_solver_options(verify, spec.solver);
  verify->add_option("--seed", spec.seed, "seed for the theta draws")->required();
  verify->add_option("--draws", draws, "random theta draws per check");
  verify->add_option("--out", out_path, "variance-ordering CSV path");

  CLI11_PARSE(app, argc, argv);

  if (gen_graph->parsed()) {
    const ModelSetup setup = build_setup(spec);
    write_graph_file(out_path, setup.graph);
    std::cout << "wrote " << out_path << " (" << setup.graph.vertex_count()
              << " vertices, " << setup.graph.edges().size() << " edges)\n";
    return 0;
  }

  if (gen_data->parsed()) {
    const ModelSetup setup = build_setup(spec);
    spec.theta_file = theta_path;
    const Eigen::VectorXd theta = resolve_theta(spec, setup.jset);
    const SampleSet samples = draw_samples(spec, setup, theta, n, 0);
    if (format == "table")
      write_table_file(out_path, samples.to_table());
    else if (format == "samples")
      write_samples_file(out_path, samples);
    else
      throw UsageError("unknown format '" + format + "'");
    std::cout << "wrote " << out_path << " (" << n << " samples)\n";
    return 0;
  }

  if (estimate->parsed()) {
    ExperimentSpec graph_spec = spec;
    const Graph g = build_setup(graph_spec).graph;
    const ContingencyTable table = load_data(data_path);
    if (table.space().vertex_count() != g.vertex_count())
      throw UsageError("data and graph disagree on the number of variables");
    const JSet jset = JSet::build(table.space(), cliques_generating_class(g));
    const EstimateReport report =
        estimate_with_method(method, table, g, jset, spec.solver);
    std::ostringstream provenance;
    provenance << "{\"data\":\"" << data_path << "\",\"spec\":" << spec_to_json(spec)
               << "}";
    const std::string json = report_to_json(report, jset, provenance.str());
    if (out_path.empty())
      std::cout << json << "\n";
    else
      write_report_file(out_path, report, jset, provenance.str());
    return report.existence ? 0 : 2;
  }

  if (mse->parsed()) {
    const auto rows = run_mse_sweep(spec, &std::cerr);
    auto out = open_output(out_path);
    write_mse_csv(out, spec, rows);
    std::cout << "wrote " << out_path << "\n";
    return 0;
  }

  if (var->parsed()) {
    const ModelSetup setup = build_setup(spec);
    const Cell target = decode_cell(setup.space, cell_string);
    const auto rows = run_variance_sweep(spec, target_vertex, target, &std::cerr);
    auto out = open_output(out_path);
    write_variance_csv(out, spec, target_vertex, target, rows);
    std::cout << "wrote " << out_path << "\n";
    return 0;
  }

  if (verify->parsed()) {
    const ModelSetup setup = build_setup(spec);
    std::vector<int> levels(static_cast<std::size_t>(setup.graph.vertex_count()),
                            spec.levels.size() == 1 ? spec.levels[0] : 2);
    if (spec.levels.size() > 1) levels = spec.levels;
    const VerifyResult result =
        run_verify(setup.graph, levels, spec.seed, draws, spec.solver);
    for (const auto& line : result.lines) std::cout << line << "\n";
    if (!out_path.empty()) {
      auto out = open_output(out_path);
      write_variance_ordering_csv(out, CellSpace(levels), result.ordering);
    }
    std::cout << (result.all_pass ? "ALL CHECKS PASSED" : "CHECKS FAILED") << "\n";
    return result.all_pass ? 0 : 3;
  }

  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const CapacityError& e) {
    std::cerr << "capacity error: " << e.what() << "\n";
    return 4;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
