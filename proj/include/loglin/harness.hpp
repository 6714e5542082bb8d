#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "loglin/asymptotics.hpp"
#include "loglin/estimators.hpp"
#include "loglin/io.hpp"
#include "loglin/sampling.hpp"

namespace loglin {

// Fully resolved description of one experimental run; embedded in every
// output file so results are self-describing and replayable.
struct ExperimentSpec {
  // Graph source: one of the generators, or a file.
  std::string graph_kind = "lattice";  // lattice | star | random | path | cycle | file
  int lattice_k = 4;
  int star_leaves = 3;
  int path_n = 3;
  int random_n = 100;
  double random_p = 0.05;
  std::uint64_t graph_seed = 1;
  std::string graph_file;

  // Per-vertex level counts; a single entry applies to every vertex.
  std::vector<int> levels = {2};

  // True-theta source.
  std::uint64_t theta_seed = 1;
  std::string theta_file;

  // Sweep layout.
  std::vector<int> sample_sizes = {100, 400, 1600, 6400};
  int replications = 50;
  std::vector<std::string> methods = {"global", "one-hop", "two-hop", "pseudo"};

  // Sampling.
  std::string sampler = "auto";  // exact | gibbs | auto
  int gibbs_burn_in = 1000;
  int gibbs_thinning = 5;
  std::uint64_t seed = 1;

  SolverConfig solver;
};

std::string spec_to_json(const ExperimentSpec& spec);

// Graph and full model resolved from an ExperimentSpec.
struct ModelSetup {
  Graph graph;
  CellSpace space;
  JSet jset;  // from the clique generating class
};
ModelSetup build_setup(const ExperimentSpec& spec);

Eigen::VectorXd resolve_theta(const ExperimentSpec& spec, const JSet& jset);

// Draws one sample set; sampler "auto" uses exact sampling when the space
// is enumerable and Gibbs otherwise.
SampleSet draw_samples(const ExperimentSpec& spec, const ModelSetup& setup,
                       const Eigen::VectorXd& theta, int n, std::uint64_t stream);

// One estimator run; method is global | global-newton | one-hop | two-hop
// | pseudo | decomposable. Nonexistence comes back as existence=false
// rather than an exception; capacity and usage errors propagate.
EstimateReport estimate_with_method(const std::string& method,
                                    const ContingencyTable& table, const Graph& g,
                                    const JSet& jset_full, const SolverConfig& cfg);

// Relative mean square error sweep: per (method, n), the mean and sd of
// ||theta_hat - theta||^2 / ||theta||^2 over replications, with flagged
// replications discarded and counted.
struct MseRow {
  std::string method;
  int n = 0;
  double mean_rel_mse = 0.0;
  double sd = 0.0;
  int discarded = 0;
};
std::vector<MseRow> run_mse_sweep(const ExperimentSpec& spec, std::ostream* progress = nullptr);
void write_mse_csv(std::ostream& out, const ExperimentSpec& spec,
                   const std::vector<MseRow>& rows);

// Sample variance of the estimates of one component at one vertex. The
// one-hop/two-hop entries are the local estimates at `target_vertex`;
// global and pseudo are the usual combined estimates.
struct VarianceRow {
  std::string method;
  int n = 0;
  double variance = 0.0;
  double mc_se = 0.0;  // standard error of the sample variance
  int used = 0;
};
std::vector<VarianceRow> run_variance_sweep(const ExperimentSpec& spec, int target_vertex,
                                            const Cell& target_cell,
                                            std::ostream* progress = nullptr);
void write_variance_csv(std::ostream& out, const ExperimentSpec& spec, int target_vertex,
                        const Cell& target_cell, const std::vector<VarianceRow>& rows);

// Batch verification: marginal-parameter identity vs the oracle, buffer
// exemption equalities, variance ordering per vertex, and (on
// decomposable graphs) the clique/separator closed form vs Newton.
struct VerifyResult {
  std::vector<std::string> lines;
  std::vector<VarianceOrderingReport> ordering;  // one per (draw, vertex)
  bool all_pass = true;
};
VerifyResult run_verify(const Graph& g, const std::vector<int>& levels,
                        std::uint64_t seed, int draws, const SolverConfig& cfg = {});

// Ordering reports as CSV rows: vertex, cell, var1hop, var2hop, varGlobal,
// pass.
void write_variance_ordering_csv(std::ostream& out, const CellSpace& space,
                                 const std::vector<VarianceOrderingReport>& reports);

}  // namespace loglin
