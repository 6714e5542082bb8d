#include "loglin/asymptotics.hpp"

#include <Eigen/Cholesky>

#include "loglin/marginalization.hpp"

namespace loglin {

namespace {

// Merged cell with support S(j) u S(j'); nullopt when the two conflict on
// shared support (the joint event is empty).
std::optional<Cell> merge_cells(const Cell& a, const Cell& b) {
  Cell out = a;
  for (std::size_t v = 0; v < a.size(); ++v) {
    if (b[v] == 0) continue;
    if (a[v] != 0 && a[v] != b[v]) return std::nullopt;
    out[v] = b[v];
  }
  return out;
}

Eigen::MatrixXd spd_inverse(const Eigen::MatrixXd& m, const char* what) {
  Eigen::LDLT<Eigen::MatrixXd> ldlt(m);
  if (ldlt.info() != Eigen::Success)
    throw DegeneracyError(std::string(what) + ": factorization failed");
  const auto d = ldlt.vectorD();
  const double dmax = d.maxCoeff();
  if (dmax <= 0.0 || d.minCoeff() <= dmax * 1e-14)
    throw DegeneracyError(std::string(what) + ": matrix is numerically singular");
  return ldlt.solve(Eigen::MatrixXd::Identity(m.rows(), m.cols()));
}

}  // namespace

FisherMatrix fisher_matrix(const Eigen::VectorXd& p, const JSet& jset) {
  const auto count = jset.space().cell_count();
  if (!count.has_value() || p.size() != static_cast<Eigen::Index>(*count))
    throw UsageError("fisher_matrix: probability vector length mismatch");

  FisherMatrix out;
  out.event_probabilities = event_probabilities(p, jset);
  const int m = jset.size();
  out.matrix.resize(m, m);
  for (int a = 0; a < m; ++a) {
    for (int b = a; b < m; ++b) {
      double joint = 0.0;
      if (auto merged = merge_cells(jset.cell(a), jset.cell(b))) {
        for_each_upper_index(jset.space(), *merged,
                             [&](std::uint64_t i) { joint += p[static_cast<Eigen::Index>(i)]; });
      }
      const double k = joint - out.event_probabilities[a] * out.event_probabilities[b];
      out.matrix(a, b) = k;
      out.matrix(b, a) = k;
    }
  }
  return out;
}

Eigen::MatrixXd asymptotic_variance(const FisherMatrix& K, std::int64_t n_samples) {
  if (n_samples <= 0) throw UsageError("asymptotic_variance: N must be positive");
  return spd_inverse(K.matrix, "asymptotic_variance") / static_cast<double>(n_samples);
}

Eigen::MatrixXd asymptotic_variance(const Eigen::VectorXd& p, const JSet& jset,
                                    std::int64_t n_samples) {
  return asymptotic_variance(fisher_matrix(p, jset), n_samples);
}

Eigen::MatrixXd schur_block_variance(const Eigen::MatrixXd& K,
                                     const std::vector<int>& block) {
  if (K.rows() != K.cols()) throw UsageError("schur_block_variance: K must be square");
  std::vector<bool> in_block(static_cast<std::size_t>(K.rows()), false);
  for (int i : block) {
    if (i < 0 || i >= K.rows()) throw UsageError("schur_block_variance: index out of range");
    in_block[static_cast<std::size_t>(i)] = true;
  }
  std::vector<int> rest;
  for (int i = 0; i < K.rows(); ++i)
    if (!in_block[static_cast<std::size_t>(i)]) rest.push_back(i);

  const auto nb = static_cast<Eigen::Index>(block.size());
  const auto nr = static_cast<Eigen::Index>(rest.size());
  Eigen::MatrixXd kbb(nb, nb), kbr(nb, nr), krr(nr, nr);
  for (Eigen::Index a = 0; a < nb; ++a) {
    for (Eigen::Index b = 0; b < nb; ++b) kbb(a, b) = K(block[a], block[b]);
    for (Eigen::Index r = 0; r < nr; ++r) kbr(a, r) = K(block[a], rest[r]);
  }
  for (Eigen::Index a = 0; a < nr; ++a)
    for (Eigen::Index b = 0; b < nr; ++b) krr(a, b) = K(rest[a], rest[b]);

  Eigen::MatrixXd schur = kbb;
  if (nr > 0) {
    Eigen::LDLT<Eigen::MatrixXd> ldlt(krr);
    if (ldlt.info() != Eigen::Success || ldlt.vectorD().minCoeff() <= 0.0)
      throw DegeneracyError("schur_block_variance: complementary block singular");
    schur -= kbr * ldlt.solve(kbr.transpose());
  }
  return spd_inverse(schur, "schur_block_variance");
}

VarianceOrderingReport verify_variance_ordering(const Eigen::VectorXd& theta,
                                                const JSet& jset_full, const Graph& g,
                                                int v, std::uint64_t guard) {
  const CellSpace& space = jset_full.space();
  space.require_enumerable(guard);
  const Eigen::VectorXd p = p_from_theta(theta, jset_full, guard);

  const Neighborhood nb1 = neighborhood(g, v, 1);
  const Neighborhood nb2 = neighborhood(g, v, 2);
  const MarginalModel mm1 = relaxed_model(nb1, jset_full);
  const MarginalModel mm2 = relaxed_model(nb2, jset_full);

  const Eigen::MatrixXd var1 = asymptotic_variance(
      marginalize_probabilities(p, space, nb1.members), mm1.jset, 1);
  const Eigen::MatrixXd var2 = asymptotic_variance(
      marginalize_probabilities(p, space, nb2.members), mm2.jset, 1);
  const Eigen::MatrixXd varg = asymptotic_variance(p, jset_full, 1);

  VarianceOrderingReport report;
  report.vertex = v;
  report.all_pass = true;
  constexpr double slack = -1e-10;
  for (const Cell& j : classify_buffer(nb1, jset_full).exempt) {
    VarianceOrderingRow row;
    row.cell = j;
    const auto k1 = mm1.jset.find(restrict_cell(j, nb1.members));
    const auto k2 = mm2.jset.find(restrict_cell(j, nb2.members));
    const auto kg = jset_full.find(j);
    if (!k1 || !k2 || !kg)
      throw UsageError("verify_variance_ordering: exempt cell missing from a model");
    row.var_one_hop = var1(*k1, *k1);
    row.var_two_hop = var2(*k2, *k2);
    row.var_global = varg(*kg, *kg);
    row.pass = (row.var_one_hop - row.var_two_hop >= slack) &&
               (row.var_two_hop - row.var_global >= slack);
    report.all_pass = report.all_pass && row.pass;
    report.rows.push_back(std::move(row));
  }
  return report;
}

}  // namespace loglin
