#include "loglin/marginalization.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <set>

namespace loglin {

VertexSet positions_in(const VertexSet& members, const VertexSet& subset) {
  VertexSet out;
  out.reserve(subset.size());
  for (int v : subset) {
    auto it = std::lower_bound(members.begin(), members.end(), v);
    if (it == members.end() || *it != v)
      throw UsageError("positions_in: vertex not among the members");
    out.push_back(static_cast<int>(it - members.begin()));
  }
  return out;
}

namespace {

// Applies f(cell) to every full-space cell agreeing with `fixed` on
// `members`; coordinates outside run over all levels.
template <class F>
void for_each_extension(const CellSpace& space, const VertexSet& members,
                        const Cell& fixed, F&& f) {
  Cell cell(static_cast<std::size_t>(space.vertex_count()), 0);
  for (std::size_t k = 0; k < members.size(); ++k)
    cell[static_cast<std::size_t>(members[k])] = fixed[static_cast<std::size_t>(members[k])];
  std::vector<int> outside;
  for (int v = 0; v < space.vertex_count(); ++v)
    if (!std::binary_search(members.begin(), members.end(), v)) outside.push_back(v);
  std::vector<int> level(outside.size(), 0);
  for (;;) {
    f(cell);
    std::size_t k = outside.size();
    while (k-- > 0) {
      const int v = outside[k];
      if (++level[k] < space.level_count(v)) {
        cell[static_cast<std::size_t>(v)] = level[k];
        break;
      }
      level[k] = 0;
      cell[static_cast<std::size_t>(v)] = 0;
      if (k == 0) return;
    }
    if (outside.empty()) return;
  }
}

}  // namespace

Eigen::VectorXd marginalize_probabilities(const Eigen::VectorXd& p,
                                          const CellSpace& space,
                                          const VertexSet& members) {
  const auto count = space.cell_count();
  if (!count.has_value() || p.size() != static_cast<Eigen::Index>(*count))
    throw UsageError("marginalize_probabilities: length mismatch");
  const std::uint64_t n = *count;
  CellSpace sub = space.restrict_to(members);
  Eigen::VectorXd out = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(*sub.cell_count()));
  for (std::uint64_t i = 0; i < n; ++i) {
    const Cell cell = space.cell_at(i);
    out[static_cast<Eigen::Index>(sub.index_of(restrict_cell(cell, members)))] +=
        p[static_cast<Eigen::Index>(i)];
  }
  return out;
}

MarginalTheta marginal_theta_oracle(const Eigen::VectorXd& theta, const JSet& jset_full,
                                    const VertexSet& members, std::uint64_t guard) {
  const CellSpace& space = jset_full.space();
  space.require_enumerable(guard);
  const Eigen::VectorXd p = p_from_theta(theta, jset_full, guard);
  const Eigen::VectorXd p_marg = marginalize_probabilities(p, space, members);

  MarginalTheta out{JSet::saturated(space.restrict_to(members), guard), ThetaVector{}};
  out.theta = theta_from_p(p_marg, out.jset);
  return out;
}

double marginal_theta_identity(const Eigen::VectorXd& theta, const JSet& jset_full,
                               const Neighborhood& nb, const Cell& j,
                               std::uint64_t guard) {
  const CellSpace& space = jset_full.space();
  space.require_enumerable(guard);
  check_cell(space, j);
  if (theta.size() != jset_full.size())
    throw UsageError("marginal_theta_identity: theta length mismatch");

  const VertexSet supp = support(j);
  if (supp.empty())
    throw UsageError("marginal_theta_identity: j must have nonempty support");
  if (!is_subset(supp, nb.members))
    throw UsageError("marginal_theta_identity: S(j) must lie inside M_v");

  double acc = 0.0;
  if (auto k = jset_full.find(j)) acc += theta[*k];

  const std::size_t d = supp.size();
  const Cell zero(static_cast<std::size_t>(space.vertex_count()), 0);
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << d); ++mask) {
    Cell jp = zero;
    int bits = 0;
    for (std::size_t b = 0; b < d; ++b) {
      if (mask & (std::uint64_t{1} << b)) {
        jp[static_cast<std::size_t>(supp[b])] = j[static_cast<std::size_t>(supp[b])];
        ++bits;
      }
    }
    const double sign = ((static_cast<int>(d) - bits) % 2 == 0) ? 1.0 : -1.0;

    // Exponents over the extensions of j' off M_v; the padded extension
    // contributes exponent 0.
    std::vector<double> exponents;
    for_each_extension(space, nb.members, jp, [&](const Cell& i) {
      double s = 0.0;
      for (int k = 0; k < jset_full.size(); ++k) {
        const Cell& cellk = jset_full.cell(k);
        if (triangleleft(cellk, i) && !triangleleft(cellk, jp)) s += theta[k];
      }
      exponents.push_back(s);
    });
    acc += sign * log_sum_exp(Eigen::Map<const Eigen::VectorXd>(
                      exponents.data(), static_cast<Eigen::Index>(exponents.size())));
  }
  return acc;
}

BufferPartition classify_buffer(const Neighborhood& nb, const JSet& jset_full) {
  BufferPartition out;
  for (const Cell& j : jset_full.cells()) {
    const VertexSet s = support(j);
    if (is_subset(s, nb.members) && !is_subset(s, nb.buffer)) out.exempt.push_back(j);
  }
  if (!nb.buffer.empty()) {
    if (nb.buffer.size() > 25)
      throw CapacityError("classify_buffer: buffer too large to saturate");
    const CellSpace& space = jset_full.space();
    CellSpace bspace = space.restrict_to(nb.buffer);
    const JSet sat = JSet::saturated(bspace);
    for (const Cell& sub : sat.cells())
      out.buffered.push_back(pad_cell(space, nb.buffer, sub));
    std::sort(out.buffered.begin(), out.buffered.end());
  }
  return out;
}

namespace {

JSet build_restricted_jset(const Neighborhood& nb, const JSet& jset_full,
                           const std::vector<VertexSet>& supports_full) {
  CellSpace sub = jset_full.space().restrict_to(nb.members);
  std::vector<VertexSet> remapped;
  remapped.reserve(supports_full.size());
  for (const auto& s : supports_full) remapped.push_back(positions_in(nb.members, s));
  return JSet::build(sub, GeneratingClass::from_maximal(std::move(remapped),
                                                        sub.vertex_count()));
}

}  // namespace

JSet relaxed_jset(const Neighborhood& nb, const JSet& jset_full) {
  // D' = {T in D : T subset M_v, T !subset B_v} union {T : T subset B_v};
  // both parts are downward closed together, so the maximal elements are
  // the surviving cliques plus the whole buffer.
  std::vector<VertexSet> candidates;
  for (const auto& t : jset_full.generating_class().closure())
    if (is_subset(t, nb.members) && !is_subset(t, nb.buffer)) candidates.push_back(t);
  if (!nb.buffer.empty()) candidates.push_back(nb.buffer);
  return build_restricted_jset(nb, jset_full, candidates);
}

MarginalModel relaxed_model(const Neighborhood& nb, const JSet& jset_full) {
  JSet jset = relaxed_jset(nb, jset_full);
  CellSpace space = jset.space();
  return MarginalModel{nb, std::move(space), std::move(jset), MarginalModel::Kind::Relaxed};
}

MarginalModel exact_marginal_model(const Neighborhood& nb, const JSet& jset_full,
                                   std::uint64_t seed, int draws, std::uint64_t guard) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(-1.0, 1.0);

  std::set<VertexSet> alive;  // supports surviving every draw
  for (int d = 0; d < draws; ++d) {
    Eigen::VectorXd theta(jset_full.size());
    for (Eigen::Index k = 0; k < theta.size(); ++k) theta[k] = unif(rng);
    const MarginalTheta mt = marginal_theta_oracle(theta, jset_full, nb.members, guard);
    std::set<VertexSet> present;
    for (int k = 0; k < mt.jset.size(); ++k)
      if (std::abs(mt.theta.values[k]) > 1e-8) present.insert(support(mt.jset.cell(k)));
    if (d == 0) {
      alive = std::move(present);
    } else {
      std::set<VertexSet> kept;
      for (const auto& s : alive)
        if (present.count(s)) kept.insert(s);
      alive = std::move(kept);
    }
  }

  // Supports live in restricted coordinates already (oracle space).
  CellSpace sub = jset_full.space().restrict_to(nb.members);
  std::vector<VertexSet> maximal(alive.begin(), alive.end());
  JSet jset = JSet::build(sub, GeneratingClass::from_maximal(std::move(maximal),
                                                             sub.vertex_count()));
  return MarginalModel{nb, std::move(sub), std::move(jset),
                       MarginalModel::Kind::ExactMarginal};
}

}  // namespace loglin
