#include <doctest.h>

#include <cmath>
#include <random>

#include "loglin/graph.hpp"
#include "loglin/model.hpp"
#include "loglin/sampling.hpp"

using namespace loglin;

namespace {

// The 4-cycle with edges {(0,1),(0,2),(1,3),(2,3)}.
Graph four_cycle() { return make_lattice(2); }

JSet four_cycle_jset() {
  const Graph g = four_cycle();
  return JSet::build(CellSpace({2, 2, 2, 2}), cliques_generating_class(g));
}

Eigen::VectorXd random_positive_p(const CellSpace& space, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(0.1, 1.0);
  Eigen::VectorXd p(static_cast<Eigen::Index>(*space.cell_count()));
  for (Eigen::Index i = 0; i < p.size(); ++i) p[i] = unif(rng);
  p /= p.sum();
  return p;
}

// Independent Moebius oracle: the literal double loop over J x J using the
// extended relation, kept free of the subset-lattice shortcut the
// implementation uses.
Eigen::VectorXd theta_oracle(const Eigen::VectorXd& p, const JSet& jset) {
  const CellSpace& space = jset.space();
  const Cell zero(static_cast<std::size_t>(space.vertex_count()), 0);
  const double logp0 = std::log(p[static_cast<Eigen::Index>(space.index_of(zero))]);
  Eigen::VectorXd theta(jset.size());
  for (int a = 0; a < jset.size(); ++a) {
    const Cell& j = jset.cell(a);
    double acc = 0.0;
    for (int b = 0; b < jset.size(); ++b) {
      const Cell& jp = jset.cell(b);
      if (!triangleleft(jp, j)) continue;
      const auto sj = support(j).size();
      const auto sjp = support(jp).size();
      const double sign = ((sj - sjp) % 2 == 0) ? 1.0 : -1.0;
      acc += sign *
             (std::log(p[static_cast<Eigen::Index>(space.index_of(jp))]) - logp0);
    }
    theta[a] = acc;
  }
  return theta;
}

}  // namespace

TEST_SUITE("model") {

TEST_CASE("J-set of the binary 4-cycle has 8 cells") {
  const JSet jset = four_cycle_jset();
  CHECK(jset.size() == 8);
  CHECK(jset.find(Cell{1, 1, 0, 0}).has_value());   // edge
  CHECK(jset.find(Cell{0, 1, 1, 0}) == std::nullopt);  // non-edge pair
  CHECK(jset.find(Cell{1, 0, 0, 0}).has_value());   // singleton
}

TEST_CASE("J-set of a ternary single vertex") {
  CellSpace space({3});
  const JSet jset = JSet::build(space, GeneratingClass::from_maximal({{0}}, 1));
  REQUIRE(jset.size() == 2);
  CHECK(jset.cell(0) == Cell{1});
  CHECK(jset.cell(1) == Cell{2});
}

TEST_CASE("uniform p gives theta = 0") {
  const JSet jset = four_cycle_jset();
  const Eigen::VectorXd p = Eigen::VectorXd::Constant(16, 1.0 / 16.0);
  const ThetaVector theta = theta_from_p(p, jset);
  CHECK(theta.values.cwiseAbs().maxCoeff() < 1e-14);
  CHECK(theta.theta0 == doctest::Approx(-std::log(16.0)).epsilon(1e-12));
}

TEST_CASE("theta_from_p matches the literal Moebius oracle") {
  // Saturated class on the 4-cycle's space: all 15 nonzero-support cells.
  CellSpace space({2, 2, 2, 2});
  const JSet sat = JSet::saturated(space);
  REQUIRE(sat.size() == 15);
  for (std::uint64_t seed : {11u, 12u, 13u}) {
    const Eigen::VectorXd p = random_positive_p(space, seed);
    const ThetaVector theta = theta_from_p(p, sat);
    const Eigen::VectorXd oracle = theta_oracle(p, sat);
    CHECK((theta.values - oracle).cwiseAbs().maxCoeff() < 1e-10);
  }
  // Same check on the model J-set; restrictions of J cells stay in J.
  const JSet jset = four_cycle_jset();
  const Eigen::VectorXd p = random_positive_p(space, 14);
  CHECK((theta_from_p(p, jset).values - theta_oracle(p, jset)).cwiseAbs().maxCoeff() <
        1e-10);
}

TEST_CASE("Moebius round trips") {
  // p -> theta -> p on the saturated model, spaces up to 2^12 cells.
  for (const auto& levels :
       {std::vector<int>{2, 2, 2, 2}, std::vector<int>{3, 3, 2},
        std::vector<int>{2, 2, 2, 2, 2, 2, 2, 2, 2, 2, 2, 2}}) {
    CellSpace space(levels);
    const JSet sat = JSet::saturated(space);
    const Eigen::VectorXd p = random_positive_p(space, 7);
    const ThetaVector theta = theta_from_p(p, sat);
    const Eigen::VectorXd back = p_from_theta(theta.values, sat);
    CHECK((back - p).cwiseAbs().maxCoeff() < 1e-12);
  }
  // theta -> p -> theta on the 4-cycle model.
  const JSet jset = four_cycle_jset();
  const Eigen::VectorXd theta = random_theta(jset.size(), RngSeed{21, 0});
  const Eigen::VectorXd p = p_from_theta(theta, jset);
  const ThetaVector back = theta_from_p(p, jset);
  CHECK((back.values - theta).cwiseAbs().maxCoeff() < 1e-12);
  CHECK(back.theta0 == doctest::Approx(-cumulant(theta, jset)).epsilon(1e-12));
}

TEST_CASE("p_from_theta basics") {
  const JSet jset = four_cycle_jset();
  const Eigen::VectorXd uniform = p_from_theta(Eigen::VectorXd::Zero(8), jset);
  CHECK((uniform.array() - 1.0 / 16.0).abs().maxCoeff() < 1e-15);

  // Single binary vertex with theta = log 3: p = (1/4, 3/4).
  CellSpace one({2});
  const JSet j1 = JSet::saturated(one);
  Eigen::VectorXd t(1);
  t << std::log(3.0);
  const Eigen::VectorXd p = p_from_theta(t, j1);
  CHECK(p[0] == doctest::Approx(0.25).epsilon(1e-12));
  CHECK(p[1] == doctest::Approx(0.75).epsilon(1e-12));
}

TEST_CASE("rejects nonpositive probabilities") {
  const JSet jset = four_cycle_jset();
  Eigen::VectorXd p = Eigen::VectorXd::Constant(16, 1.0 / 16.0);
  p[3] = 0.0;
  CHECK_THROWS_AS(theta_from_p(p, jset), DomainError);
}

TEST_CASE("cumulant values and gradient") {
  const JSet jset = four_cycle_jset();
  CHECK(cumulant(Eigen::VectorXd::Zero(8), jset) ==
        doctest::Approx(std::log(16.0)).epsilon(1e-12));

  CellSpace one({2});
  const JSet j1 = JSet::saturated(one);
  Eigen::VectorXd t(1);
  t << 0.7;
  CHECK(cumulant(t, j1) == doctest::Approx(std::log(1.0 + std::exp(0.7))).epsilon(1e-12));

  // dk/dtheta_j equals the marginal event probability; check against
  // central finite differences.
  const Eigen::VectorXd theta = random_theta(jset.size(), RngSeed{5, 0});
  const Eigen::VectorXd pj = event_probabilities(p_from_theta(theta, jset), jset);
  const double h = 1e-5;
  for (int k = 0; k < jset.size(); ++k) {
    Eigen::VectorXd up = theta, dn = theta;
    up[k] += h;
    dn[k] -= h;
    const double fd = (cumulant(up, jset) - cumulant(dn, jset)) / (2.0 * h);
    CHECK(std::abs(fd - pj[k]) < 1e-6);
  }
}

TEST_CASE("log likelihood") {
  const Graph g = four_cycle();
  const JSet jset = four_cycle_jset();
  const CellSpace& space = jset.space();

  ContingencyTable table(space);
  std::mt19937_64 rng(99);
  std::uniform_int_distribution<int> count_of(0, 12);
  for (std::uint64_t i = 0; i < *space.cell_count(); ++i)
    table.add(space.cell_at(i), count_of(rng));
  const double n = static_cast<double>(table.total());

  CHECK(loglik(Eigen::VectorXd::Zero(8), table, jset) ==
        doctest::Approx(-n * std::log(16.0)).epsilon(1e-12));

  // Concavity at the midpoint of two random points.
  const Eigen::VectorXd a = random_theta(8, RngSeed{31, 0});
  const Eigen::VectorXd b = random_theta(8, RngSeed{32, 0});
  CHECK(loglik(((a + b) / 2).eval(), table, jset) >=
        0.5 * (loglik(a, table, jset) + loglik(b, table, jset)) - 1e-12);

  // Matches the exhaustive per-cell sum n(i) log p(i).
  const Eigen::VectorXd theta = random_theta(8, RngSeed{33, 0});
  const Eigen::VectorXd p = p_from_theta(theta, jset);
  double direct = 0.0;
  for (std::uint64_t i = 0; i < *space.cell_count(); ++i)
    direct += static_cast<double>(table.count(space.cell_at(i))) *
              std::log(p[static_cast<Eigen::Index>(i)]);
  CHECK(std::abs(loglik(theta, table, jset) - direct) < 1e-10);
}

TEST_CASE("zero padding: sub-generating-class equals padded full model") {
  // 4-cycle theta inside the saturated model with the extra components
  // forced to zero gives the same distribution.
  const JSet jset = four_cycle_jset();
  const JSet sat = JSet::saturated(jset.space());
  const Eigen::VectorXd theta = random_theta(jset.size(), RngSeed{41, 0});
  Eigen::VectorXd padded = Eigen::VectorXd::Zero(sat.size());
  for (int k = 0; k < jset.size(); ++k) padded[*sat.find(jset.cell(k))] = theta[k];
  const Eigen::VectorXd p1 = p_from_theta(theta, jset);
  const Eigen::VectorXd p2 = p_from_theta(padded, sat);
  CHECK((p1 - p2).cwiseAbs().maxCoeff() < 1e-14);
}

}  // TEST_SUITE
