#pragma once

#include <cstdint>
#include <random>
#include <string>

#include "loglin/contingency_table.hpp"
#include "loglin/graph.hpp"
#include "loglin/jset.hpp"
#include "loglin/model.hpp"

namespace loglin {

// Seed plus stream id; identical pairs reproduce identical draws.
struct RngSeed {
  std::uint64_t seed = 0;
  std::uint64_t stream = 0;
};

std::mt19937_64 make_rng(const RngSeed& s);

// One cell per sampled individual, plus the space they live in. The
// generating theta and the sampler are recorded for provenance when the
// set comes from a sampler (empty otherwise, e.g. when read from a file).
struct SampleSet {
  CellSpace space;
  std::vector<Cell> cells;
  Eigen::VectorXd generating_theta;
  std::string origin;

  ContingencyTable to_table(std::uint64_t dense_threshold = kDefaultEnumerationGuard) const;
};

// n independent draws via inverse CDF on the lexicographic cell order.
// Desk scale only; larger spaces should use gibbs_sample.
SampleSet exact_sample(const Eigen::VectorXd& theta, const JSet& jset, int n,
                       const RngSeed& seed,
                       std::uint64_t guard = kDefaultEnumerationGuard);

// Single-site systematic-scan Gibbs sampler. The conditional at site v
// uses only the theta components with v in S(j). Records every
// `thinning`-th full scan after `burn_in` scans.
SampleSet gibbs_sample(const Eigen::VectorXd& theta, const JSet& jset, const Graph& g,
                       int n, int burn_in, int thinning, const RngSeed& seed);

// I.i.d. uniform [-1, 1] components; the harness's default source of
// "true" parameters.
Eigen::VectorXd random_theta(int size, const RngSeed& seed);

}  // namespace loglin
