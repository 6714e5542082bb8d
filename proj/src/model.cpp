#include "loglin/model.hpp"

#include <cmath>

namespace loglin {

double log_sum_exp(const Eigen::VectorXd& x) {
  if (x.size() == 0) throw UsageError("log_sum_exp: empty input");
  const double m = x.maxCoeff();
  return m + std::log((x.array() - m).exp().sum());
}

namespace {

void check_theta(const Eigen::VectorXd& theta, const JSet& jset) {
  if (theta.size() != jset.size())
    throw UsageError("theta length does not match the J-set");
  if (!theta.allFinite()) throw DomainError("theta has non-finite entries");
}

// A dense per-cell vector proves the space was already enumerated; only
// the length needs checking.
void check_cell_vector(const Eigen::VectorXd& x, const CellSpace& space,
                       const char* what) {
  const auto count = space.cell_count();
  if (!count.has_value() || x.size() != static_cast<Eigen::Index>(*count))
    throw UsageError(std::string(what) + ": per-cell vector length mismatch");
}

}  // namespace

Eigen::VectorXd log_potentials(const Eigen::VectorXd& theta, const JSet& jset,
                               std::uint64_t guard) {
  check_theta(theta, jset);
  const auto n = jset.space().require_enumerable(guard);
  Eigen::VectorXd s = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n));
  for (int k = 0; k < jset.size(); ++k) {
    const double tk = theta[k];
    for_each_upper_index(jset.space(), jset.cell(k),
                         [&](std::uint64_t i) { s[static_cast<Eigen::Index>(i)] += tk; });
  }
  return s;
}

double cumulant(const Eigen::VectorXd& theta, const JSet& jset, std::uint64_t guard) {
  return log_sum_exp(log_potentials(theta, jset, guard));
}

Eigen::VectorXd p_from_theta(const Eigen::VectorXd& theta, const JSet& jset,
                             std::uint64_t guard) {
  Eigen::VectorXd s = log_potentials(theta, jset, guard);
  const double logz = log_sum_exp(s);
  return (s.array() - logz).exp().matrix();
}

ThetaVector theta_from_p(const Eigen::VectorXd& p, const JSet& jset) {
  check_cell_vector(p, jset.space(), "theta_from_p");
  if (!(p.array() > 0.0).all())
    throw DomainError("theta_from_p: probabilities must be strictly positive");

  const CellSpace& space = jset.space();
  ThetaVector out;
  out.values.resize(jset.size());
  const Cell zero(static_cast<std::size_t>(space.vertex_count()), 0);
  out.theta0 = std::log(p[static_cast<Eigen::Index>(space.index_of(zero))]);

  for (int k = 0; k < jset.size(); ++k) {
    const Cell& j = jset.cell(k);
    const VertexSet supp = support(j);
    const std::size_t d = supp.size();
    double acc = 0.0;
    for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << d); ++mask) {
      Cell sub = zero;
      int bits = 0;
      for (std::size_t b = 0; b < d; ++b) {
        if (mask & (std::uint64_t{1} << b)) {
          sub[static_cast<std::size_t>(supp[b])] = j[static_cast<std::size_t>(supp[b])];
          ++bits;
        }
      }
      const double sign = ((static_cast<int>(d) - bits) % 2 == 0) ? 1.0 : -1.0;
      acc += sign * std::log(p[static_cast<Eigen::Index>(space.index_of(sub))]);
    }
    out.values[k] = acc;
  }
  return out;
}

Eigen::VectorXd event_probabilities(const Eigen::VectorXd& p, const JSet& jset) {
  check_cell_vector(p, jset.space(), "event_probabilities");
  Eigen::VectorXd out(jset.size());
  for (int k = 0; k < jset.size(); ++k) {
    double acc = 0.0;
    for_each_upper_index(jset.space(), jset.cell(k),
                         [&](std::uint64_t i) { acc += p[static_cast<Eigen::Index>(i)]; });
    out[k] = acc;
  }
  return out;
}

Eigen::VectorXd canonical_statistics(const ContingencyTable& table, const JSet& jset) {
  if (table.space() != jset.space())
    throw UsageError("canonical_statistics: table and J-set over different spaces");
  const auto& counts = table.dense();
  Eigen::VectorXd t(jset.size());
  for (int k = 0; k < jset.size(); ++k) {
    std::int64_t acc = 0;
    for_each_upper_index(jset.space(), jset.cell(k),
                         [&](std::uint64_t i) { acc += counts[static_cast<std::size_t>(i)]; });
    t[k] = static_cast<double>(acc);
  }
  return t;
}

double loglik(const Eigen::VectorXd& theta, const ContingencyTable& table,
              const JSet& jset, std::uint64_t guard) {
  const Eigen::VectorXd t = canonical_statistics(table, jset);
  return t.dot(theta) - static_cast<double>(table.total()) * cumulant(theta, jset, guard);
}

}  // namespace loglin
