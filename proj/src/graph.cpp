#include "loglin/graph.hpp"

#include <algorithm>
#include <random>
#include <set>

#include "loglin/errors.hpp"

namespace loglin {

Graph::Graph(int vertex_count, std::vector<std::pair<int, int>> edges)
    : vertex_count_(vertex_count) {
  if (vertex_count <= 0) throw UsageError("Graph: vertex_count must be positive");
  adj_.resize(static_cast<std::size_t>(vertex_count));
  std::set<std::pair<int, int>> seen;
  for (auto [u, v] : edges) {
    if (u < 0 || v < 0 || u >= vertex_count || v >= vertex_count)
      throw UsageError("Graph: edge endpoint out of range");
    if (u == v) throw UsageError("Graph: self-loops not allowed");
    if (u > v) std::swap(u, v);
    if (!seen.insert({u, v}).second) throw UsageError("Graph: duplicate edge");
    edges_.emplace_back(u, v);
    adj_[static_cast<std::size_t>(u)].push_back(v);
    adj_[static_cast<std::size_t>(v)].push_back(u);
  }
  std::sort(edges_.begin(), edges_.end());
  for (auto& a : adj_) std::sort(a.begin(), a.end());
}

const std::vector<int>& Graph::neighbors(int v) const {
  if (v < 0 || v >= vertex_count_) throw UsageError("Graph: vertex out of range");
  return adj_[static_cast<std::size_t>(v)];
}

bool Graph::has_edge(int u, int v) const {
  const auto& a = neighbors(u);
  return std::binary_search(a.begin(), a.end(), v);
}

Neighborhood neighborhood(const Graph& g, int v, int hop) {
  if (hop != 1 && hop != 2) throw UsageError("neighborhood: hop must be 1 or 2");
  std::set<int> members{v};
  for (int w : g.neighbors(v)) members.insert(w);
  if (hop == 2) {
    const std::vector<int> first(g.neighbors(v));
    for (int w : first)
      for (int u : g.neighbors(w)) members.insert(u);
  }
  Neighborhood nb;
  nb.center = v;
  nb.hop = hop;
  nb.members.assign(members.begin(), members.end());
  for (int w : nb.members) {
    for (int u : g.neighbors(w)) {
      if (!members.count(u)) {
        nb.buffer.push_back(w);
        break;
      }
    }
  }
  return nb;
}

namespace {

// Bron-Kerbosch with pivoting; appends maximal cliques to `out`.
void bron_kerbosch(const Graph& g, std::vector<int>& R, std::vector<int> P,
                   std::vector<int> X, std::vector<VertexSet>& out,
                   std::uint64_t max_cliques) {
  if (P.empty() && X.empty()) {
    if (out.size() >= max_cliques)
      throw CapacityError("clique enumeration exceeded the configured guard");
    VertexSet c = R;
    std::sort(c.begin(), c.end());
    out.push_back(std::move(c));
    return;
  }
  // Pivot: vertex of P + X with most neighbours in P.
  int pivot = -1;
  std::size_t best = 0;
  for (const auto* side : {&P, &X}) {
    for (int u : *side) {
      std::size_t deg = 0;
      for (int w : P)
        if (g.has_edge(u, w)) ++deg;
      if (pivot < 0 || deg > best) {
        pivot = u;
        best = deg;
      }
    }
  }
  std::vector<int> candidates;
  for (int u : P)
    if (pivot < 0 || !g.has_edge(pivot, u)) candidates.push_back(u);
  for (int u : candidates) {
    std::vector<int> P2, X2;
    for (int w : P)
      if (g.has_edge(u, w)) P2.push_back(w);
    for (int w : X)
      if (g.has_edge(u, w)) X2.push_back(w);
    R.push_back(u);
    bron_kerbosch(g, R, std::move(P2), std::move(X2), out, max_cliques);
    R.pop_back();
    P.erase(std::find(P.begin(), P.end(), u));
    X.push_back(u);
  }
}

}  // namespace

GeneratingClass cliques_generating_class(const Graph& g, std::uint64_t max_cliques) {
  std::vector<VertexSet> cliques;
  std::vector<int> R, P, X;
  for (int v = 0; v < g.vertex_count(); ++v) P.push_back(v);
  bron_kerbosch(g, R, std::move(P), X, cliques, max_cliques);
  return GeneratingClass::from_maximal(std::move(cliques), g.vertex_count());
}

Graph make_lattice(int k) {
  if (k < 2) throw UsageError("make_lattice: k >= 2 required");
  std::vector<std::pair<int, int>> edges;
  auto id = [k](int r, int c) { return r * k + c; };
  for (int r = 0; r < k; ++r) {
    for (int c = 0; c < k; ++c) {
      if (c + 1 < k) edges.emplace_back(id(r, c), id(r, c + 1));
      if (r + 1 < k) edges.emplace_back(id(r, c), id(r + 1, c));
    }
  }
  return Graph(k * k, std::move(edges));
}

Graph make_star(int n_leaves) {
  if (n_leaves < 1) throw UsageError("make_star: at least one leaf required");
  std::vector<std::pair<int, int>> edges;
  for (int l = 1; l <= n_leaves; ++l) edges.emplace_back(0, l);
  return Graph(n_leaves + 1, std::move(edges));
}

Graph make_random_graph(int n, double edge_prob, std::uint64_t seed) {
  if (n <= 0) throw UsageError("make_random_graph: n must be positive");
  if (edge_prob < 0.0 || edge_prob > 1.0)
    throw UsageError("make_random_graph: edge_prob must be in [0, 1]");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::vector<std::pair<int, int>> edges;
  for (int u = 0; u < n; ++u)
    for (int v = u + 1; v < n; ++v)
      if (unif(rng) < edge_prob) edges.emplace_back(u, v);
  return Graph(n, std::move(edges));
}

Graph make_path(int n) {
  if (n < 1) throw UsageError("make_path: n >= 1 required");
  std::vector<std::pair<int, int>> edges;
  for (int v = 0; v + 1 < n; ++v) edges.emplace_back(v, v + 1);
  return Graph(n, std::move(edges));
}

namespace {

// Maximum-cardinality search. Returns the visit order alpha and, per
// vertex, its position in alpha.
void mcs_order(const Graph& g, std::vector<int>& alpha, std::vector<int>& pos) {
  const int n = g.vertex_count();
  std::vector<int> weight(static_cast<std::size_t>(n), 0);
  std::vector<bool> done(static_cast<std::size_t>(n), false);
  alpha.clear();
  pos.assign(static_cast<std::size_t>(n), -1);
  for (int step = 0; step < n; ++step) {
    int best = -1;
    for (int v = 0; v < n; ++v)
      if (!done[static_cast<std::size_t>(v)] &&
          (best < 0 || weight[static_cast<std::size_t>(v)] > weight[static_cast<std::size_t>(best)]))
        best = v;
    done[static_cast<std::size_t>(best)] = true;
    pos[static_cast<std::size_t>(best)] = step;
    alpha.push_back(best);
    for (int w : g.neighbors(best))
      if (!done[static_cast<std::size_t>(w)]) ++weight[static_cast<std::size_t>(w)];
  }
}

// Checks that the reverse of the MCS order is a perfect elimination
// ordering, which holds iff the graph is chordal. Direct pairwise check;
// all graphs here are small and sparse.
bool mcs_is_peo(const Graph& g, const std::vector<int>& alpha, const std::vector<int>& pos) {
  const int n = g.vertex_count();
  for (int k = n; k-- > 0;) {
    const int v = alpha[static_cast<std::size_t>(k)];
    std::vector<int> earlier;
    for (int w : g.neighbors(v))
      if (pos[static_cast<std::size_t>(w)] < k) earlier.push_back(w);
    for (std::size_t a = 0; a < earlier.size(); ++a)
      for (std::size_t b = a + 1; b < earlier.size(); ++b)
        if (!g.has_edge(earlier[a], earlier[b])) return false;
  }
  return true;
}

}  // namespace

bool is_decomposable(const Graph& g) {
  std::vector<int> alpha, pos;
  mcs_order(g, alpha, pos);
  return mcs_is_peo(g, alpha, pos);
}

JunctionTree junction_tree(const Graph& g) {
  std::vector<int> alpha, pos;
  mcs_order(g, alpha, pos);
  if (!mcs_is_peo(g, alpha, pos))
    throw DomainError("junction_tree: graph is not decomposable");

  // Candidate cliques C_v = {v} + earlier-in-alpha neighbours, visited in
  // alpha order; keep a clique when it is not contained in the next one.
  std::vector<VertexSet> cliques;
  for (int k = 0; k < g.vertex_count(); ++k) {
    const int v = alpha[static_cast<std::size_t>(k)];
    VertexSet c{v};
    for (int w : g.neighbors(v))
      if (pos[static_cast<std::size_t>(w)] < k) c.push_back(w);
    std::sort(c.begin(), c.end());
    bool dominated = false;
    for (const auto& prev : cliques)
      if (is_subset(c, prev)) {
        dominated = true;
        break;
      }
    if (!dominated) cliques.push_back(std::move(c));
  }
  // Remove cliques dominated by later ones (can happen across branches).
  std::vector<VertexSet> maximal;
  for (std::size_t a = 0; a < cliques.size(); ++a) {
    bool dominated = false;
    for (std::size_t b = 0; b < cliques.size() && !dominated; ++b)
      if (a != b && cliques[a] != cliques[b] && is_subset(cliques[a], cliques[b]))
        dominated = true;
    if (!dominated) maximal.push_back(cliques[a]);
  }

  JunctionTree jt;
  VertexSet seen;
  for (std::size_t k = 0; k < maximal.size(); ++k) {
    if (k > 0) jt.separators.push_back(set_intersection(maximal[k], seen));
    seen = set_union(seen, maximal[k]);
    jt.cliques.push_back(maximal[k]);
  }
  return jt;
}

}  // namespace loglin
