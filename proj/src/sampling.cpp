#include "loglin/sampling.hpp"

#include <algorithm>
#include <cmath>

namespace loglin {

std::mt19937_64 make_rng(const RngSeed& s) {
  std::seed_seq seq{s.seed & 0xffffffffu, s.seed >> 32, s.stream & 0xffffffffu,
                    s.stream >> 32};
  return std::mt19937_64(seq);
}

ContingencyTable SampleSet::to_table(std::uint64_t dense_threshold) const {
  ContingencyTable t(space, dense_threshold);
  for (const Cell& c : cells) t.add(c);
  return t;
}

SampleSet exact_sample(const Eigen::VectorXd& theta, const JSet& jset, int n,
                       const RngSeed& seed, std::uint64_t guard) {
  if (n < 0) throw UsageError("exact_sample: n must be nonnegative");
  const CellSpace& space = jset.space();
  space.require_enumerable(guard);
  const Eigen::VectorXd p = p_from_theta(theta, jset, guard);
  std::vector<double> cdf(static_cast<std::size_t>(p.size()));
  double acc = 0.0;
  for (Eigen::Index i = 0; i < p.size(); ++i) {
    acc += p[i];
    cdf[static_cast<std::size_t>(i)] = acc;
  }
  cdf.back() = 1.0;

  auto rng = make_rng(seed);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  SampleSet out{space, {}, theta, "exact"};
  out.cells.reserve(static_cast<std::size_t>(n));
  for (int s = 0; s < n; ++s) {
    const double u = unif(rng);
    const auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
    const auto idx = static_cast<std::uint64_t>(it - cdf.begin());
    out.cells.push_back(space.cell_at(std::min<std::uint64_t>(idx, cdf.size() - 1)));
  }
  return out;
}

SampleSet gibbs_sample(const Eigen::VectorXd& theta, const JSet& jset, const Graph& g,
                       int n, int burn_in, int thinning, const RngSeed& seed) {
  const CellSpace& space = jset.space();
  if (g.vertex_count() != space.vertex_count())
    throw UsageError("gibbs_sample: graph and space disagree on |V|");
  if (theta.size() != jset.size()) throw UsageError("gibbs_sample: theta length mismatch");
  if (n < 0 || burn_in < 0 || thinning < 1)
    throw UsageError("gibbs_sample: bad chain parameters");

  // Components touching each site.
  const int p = space.vertex_count();
  std::vector<std::vector<int>> site_components(static_cast<std::size_t>(p));
  for (int k = 0; k < jset.size(); ++k)
    for (int v : support(jset.cell(k)))
      site_components[static_cast<std::size_t>(v)].push_back(k);

  auto rng = make_rng(seed);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::uniform_int_distribution<int> level_of;

  // Random initial state.
  Cell state(static_cast<std::size_t>(p), 0);
  for (int v = 0; v < p; ++v)
    state[static_cast<std::size_t>(v)] =
        level_of(rng, std::uniform_int_distribution<int>::param_type(0, space.level_count(v) - 1));

  SampleSet out{space, {}, theta, "gibbs"};
  out.cells.reserve(static_cast<std::size_t>(n));
  const long total_scans =
      n == 0 ? 0 : burn_in + static_cast<long>(n - 1) * thinning + 1;
  std::vector<double> logits;
  for (long scan = 0; scan < total_scans; ++scan) {
    for (int v = 0; v < p; ++v) {
      const int levels = space.level_count(v);
      logits.assign(static_cast<std::size_t>(levels), 0.0);
      for (int k : site_components[static_cast<std::size_t>(v)]) {
        const Cell& jcell = jset.cell(k);
        // Match everywhere except at v; the component then contributes to
        // exactly the level j_v.
        bool match = true;
        for (std::size_t w = 0; w < jcell.size(); ++w) {
          if (static_cast<int>(w) == v || jcell[w] == 0) continue;
          if (state[w] != jcell[w]) {
            match = false;
            break;
          }
        }
        if (match) logits[static_cast<std::size_t>(jcell[static_cast<std::size_t>(v)])] += theta[k];
      }
      const double lmax = *std::max_element(logits.begin(), logits.end());
      double z = 0.0;
      for (double& l : logits) {
        l = std::exp(l - lmax);
        z += l;
      }
      const double u = unif(rng) * z;
      double cum = 0.0;
      int chosen = levels - 1;
      for (int c = 0; c < levels; ++c) {
        cum += logits[static_cast<std::size_t>(c)];
        if (u < cum) {
          chosen = c;
          break;
        }
      }
      state[static_cast<std::size_t>(v)] = chosen;
    }
    if (scan >= burn_in && (scan - burn_in) % thinning == 0) out.cells.push_back(state);
  }
  return out;
}

Eigen::VectorXd random_theta(int size, const RngSeed& seed) {
  auto rng = make_rng(seed);
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  Eigen::VectorXd theta(size);
  for (Eigen::Index k = 0; k < theta.size(); ++k) theta[k] = unif(rng);
  return theta;
}

}  // namespace loglin
