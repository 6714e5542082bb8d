#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "loglin/generating_class.hpp"

namespace loglin {

// Simple undirected graph on vertices 0..n-1. No self-loops, no duplicate
// edges. Immutable after construction.
class Graph {
public:
  Graph(int vertex_count, std::vector<std::pair<int, int>> edges);

  int vertex_count() const { return vertex_count_; }
  const std::vector<std::pair<int, int>>& edges() const { return edges_; }
  const std::vector<int>& neighbors(int v) const;
  bool has_edge(int u, int v) const;

private:
  int vertex_count_;
  std::vector<std::pair<int, int>> edges_;
  std::vector<std::vector<int>> adj_;
};

// M_v with its buffer: members adjacent to the outside of M_v.
struct Neighborhood {
  int center = 0;
  int hop = 1;              // 1 or 2
  VertexSet members;        // M_v, sorted
  VertexSet buffer;         // B_v = {w in M_v : exists w' not in M_v, (w,w') in E}
};

// hop=1: M_v = {v} + N_v; hop=2: additionally the neighbours of the
// neighbours. The buffer is recomputed against the chosen M_v.
Neighborhood neighborhood(const Graph& g, int v, int hop);

// Generating class of the graphical model: all cliques of g. Maximal
// cliques are enumerated exactly (Bron-Kerbosch with pivoting).
GeneratingClass cliques_generating_class(const Graph& g,
                                         std::uint64_t max_cliques = 1000000);

// k x k four-neighbour lattice, vertices numbered row-major, no wraparound.
Graph make_lattice(int k);

// Star with center 0 and n_leaves leaves.
Graph make_star(int n_leaves);

// Erdos-Renyi G(n, p) from a seeded deterministic generator.
Graph make_random_graph(int n, double edge_prob, std::uint64_t seed);

// Path 0-1-...-(n-1).
Graph make_path(int n);

// Junction tree of a decomposable graph: maximal cliques in an order with
// the running-intersection property, and the separator multiset
// S_k = C_k intersect (C_1 + ... + C_{k-1}).
struct JunctionTree {
  std::vector<VertexSet> cliques;
  std::vector<VertexSet> separators;  // one per clique after the first; may repeat
};

bool is_decomposable(const Graph& g);

// Throws DomainError if g is not decomposable.
JunctionTree junction_tree(const Graph& g);

}  // namespace loglin
