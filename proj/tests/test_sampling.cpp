#include <doctest.h>

#include <cmath>

#include "loglin/sampling.hpp"

using namespace loglin;

namespace {

struct FourCycle {
  Graph g = make_lattice(2);
  CellSpace space{std::vector<int>{2, 2, 2, 2}};
  JSet jset = JSet::build(space, cliques_generating_class(g));
};

double total_variation(const ContingencyTable& table, const Eigen::VectorXd& p) {
  const double n = static_cast<double>(table.total());
  double tv = 0.0;
  for (std::uint64_t i = 0; i < *table.space().cell_count(); ++i)
    tv += std::abs(static_cast<double>(table.count(table.space().cell_at(i))) / n -
                   p[static_cast<Eigen::Index>(i)]);
  return tv / 2.0;
}

}  // namespace

TEST_SUITE("sampling") {

TEST_CASE("exact sampling at theta = 0 is uniform") {
  FourCycle fc;
  const int n = 100000;
  const SampleSet samples =
      exact_sample(Eigen::VectorXd::Zero(fc.jset.size()), fc.jset, n, RngSeed{1, 0});
  const ContingencyTable table = samples.to_table();
  const double expected = n / 16.0;
  const double se = std::sqrt(n * (1.0 / 16.0) * (15.0 / 16.0));
  for (std::uint64_t i = 0; i < 16; ++i)
    CHECK(std::abs(table.count(fc.space.cell_at(i)) - expected) < 4.0 * se);
}

TEST_CASE("exact sampling handles n = 0 and is deterministic") {
  FourCycle fc;
  const Eigen::VectorXd theta = random_theta(fc.jset.size(), RngSeed{2, 0});
  CHECK(exact_sample(theta, fc.jset, 0, RngSeed{3, 0}).cells.empty());
  const SampleSet a = exact_sample(theta, fc.jset, 500, RngSeed{3, 1});
  const SampleSet b = exact_sample(theta, fc.jset, 500, RngSeed{3, 1});
  CHECK(a.cells == b.cells);
  const SampleSet c = exact_sample(theta, fc.jset, 500, RngSeed{3, 2});
  CHECK(a.cells != c.cells);
}

TEST_CASE("exact sampling passes a chi-square goodness-of-fit test") {
  FourCycle fc;
  const Eigen::VectorXd theta = random_theta(fc.jset.size(), RngSeed{4, 0});
  const Eigen::VectorXd p = p_from_theta(theta, fc.jset);
  const int n = 50000;
  const ContingencyTable table =
      exact_sample(theta, fc.jset, n, RngSeed{5, 0}).to_table();
  double chi2 = 0.0;
  for (std::uint64_t i = 0; i < 16; ++i) {
    const double expected = n * p[static_cast<Eigen::Index>(i)];
    const double observed = static_cast<double>(table.count(fc.space.cell_at(i)));
    chi2 += (observed - expected) * (observed - expected) / expected;
  }
  // chi-square 0.999 quantile at 15 degrees of freedom.
  CHECK(chi2 < 37.697);
}

TEST_CASE("empirical tables approach p as n grows") {
  FourCycle fc;
  const Eigen::VectorXd theta = random_theta(fc.jset.size(), RngSeed{6, 0});
  const Eigen::VectorXd p = p_from_theta(theta, fc.jset);
  double last = 1.0;
  int n = 1000;
  for (int step = 0; step < 3; ++step, n *= 10) {
    const double tv =
        total_variation(exact_sample(theta, fc.jset, n, RngSeed{7, 0}).to_table(), p);
    CHECK(tv < 2.0 / std::sqrt(static_cast<double>(n)));
    if (step == 2) CHECK(tv < last);
    last = tv;
  }
}

TEST_CASE("Gibbs conditionals match the exact conditional distribution") {
  // Exhaustive per-site check: the sampler's conditional must equal the
  // ratio of joint probabilities for every configuration.
  FourCycle fc;
  const Eigen::VectorXd theta = random_theta(fc.jset.size(), RngSeed{8, 0});
  const Eigen::VectorXd p = p_from_theta(theta, fc.jset);
  for (int v = 0; v < 4; ++v) {
    for (std::uint64_t i = 0; i < 16; ++i) {
      Cell x = fc.space.cell_at(i);
      // Conditional from theta, as the sampler computes it.
      Eigen::VectorXd logits = Eigen::VectorXd::Zero(2);
      for (int k = 0; k < fc.jset.size(); ++k) {
        const Cell& j = fc.jset.cell(k);
        if (j[static_cast<std::size_t>(v)] == 0) continue;
        bool match = true;
        for (std::size_t w = 0; w < 4; ++w)
          if (static_cast<int>(w) != v && j[w] != 0 && x[w] != j[w]) match = false;
        if (match) logits[j[static_cast<std::size_t>(v)]] += theta[k];
      }
      const double cond_theta = std::exp(logits[1]) / (std::exp(logits[0]) + std::exp(logits[1]));
      // Conditional from the joint.
      Cell x1 = x, x0 = x;
      x1[static_cast<std::size_t>(v)] = 1;
      x0[static_cast<std::size_t>(v)] = 0;
      const double p1 = p[static_cast<Eigen::Index>(fc.space.index_of(x1))];
      const double p0 = p[static_cast<Eigen::Index>(fc.space.index_of(x0))];
      CHECK(cond_theta == doctest::Approx(p1 / (p0 + p1)).epsilon(1e-12));
    }
  }
}

TEST_CASE("Gibbs marginals match the logits on an edgeless graph") {
  const Graph g(3, {});
  const CellSpace space({2, 2, 2});
  const JSet jset = JSet::build(space, cliques_generating_class(g));
  Eigen::VectorXd theta(3);
  theta << 0.4, -0.3, 1.1;
  const int n = 40000;
  const SampleSet samples = gibbs_sample(theta, jset, g, n, 200, 2, RngSeed{9, 0});
  const ContingencyTable table = samples.to_table();
  for (int v = 0; v < 3; ++v) {
    const ContingencyTable m = marginal_table(table, {v});
    const double phat = static_cast<double>(m.count({1})) / n;
    Cell singleton(3, 0);
    singleton[static_cast<std::size_t>(v)] = 1;
    const double truth = 1.0 / (1.0 + std::exp(-theta[*jset.find(singleton)]));
    const double se = std::sqrt(truth * (1.0 - truth) / n);
    // Thinned chains are still mildly correlated; allow a wider band.
    CHECK(std::abs(phat - truth) < 6.0 * se);
  }
}

TEST_CASE("Gibbs empirical distribution is close to the exact one") {
  FourCycle fc;
  const Eigen::VectorXd theta = random_theta(fc.jset.size(), RngSeed{10, 0});
  const Eigen::VectorXd p = p_from_theta(theta, fc.jset);
  const SampleSet samples =
      gibbs_sample(theta, fc.jset, fc.g, 100000, 1000, 5, RngSeed{11, 0});
  CHECK(total_variation(samples.to_table(), p) < 0.01);
}

TEST_CASE("Gibbs chains are deterministic given the seed") {
  FourCycle fc;
  const Eigen::VectorXd theta = random_theta(fc.jset.size(), RngSeed{12, 0});
  const SampleSet a = gibbs_sample(theta, fc.jset, fc.g, 200, 50, 3, RngSeed{13, 4});
  const SampleSet b = gibbs_sample(theta, fc.jset, fc.g, 200, 50, 3, RngSeed{13, 4});
  CHECK(a.cells == b.cells);
  CHECK(a.cells.size() == 200);
}

TEST_CASE("capacity guard points to the Gibbs path") {
  const Graph g = make_random_graph(40, 0.1, 3);
  const CellSpace space(std::vector<int>(40, 2));
  const JSet jset = JSet::build(space, cliques_generating_class(g));
  const Eigen::VectorXd theta = Eigen::VectorXd::Zero(jset.size());
  CHECK_THROWS_AS(exact_sample(theta, jset, 10, RngSeed{14, 0}), CapacityError);
  // The Gibbs sampler handles the same model.
  const SampleSet s = gibbs_sample(theta, jset, g, 5, 10, 1, RngSeed{14, 0});
  CHECK(s.cells.size() == 5);
}

}  // TEST_SUITE
