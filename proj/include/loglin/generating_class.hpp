#pragma once

#include <vector>

#include "loglin/cell_space.hpp"

namespace loglin {

// The generating class D of a hierarchical model: a downward-closed family
// of nonempty vertex subsets whose union is V. Only the maximal antichain
// is stored; membership of an arbitrary set is "subset of some maximal set".
class GeneratingClass {
public:
  // Deduplicates, drops dominated sets, and verifies the union covers V.
  static GeneratingClass from_maximal(std::vector<VertexSet> maximal, int vertex_count);

  // Saturated class: the single maximal set V.
  static GeneratingClass saturated(int vertex_count);

  bool contains(const VertexSet& set) const;

  const std::vector<VertexSet>& maximal_sets() const { return maximal_; }
  int vertex_count() const { return vertex_count_; }

  // All members of D (the downward closure), sorted, each set sorted.
  std::vector<VertexSet> closure() const;

private:
  GeneratingClass() = default;
  std::vector<VertexSet> maximal_;
  int vertex_count_ = 0;
};

bool is_subset(const VertexSet& a, const VertexSet& b);
VertexSet set_union(const VertexSet& a, const VertexSet& b);
VertexSet set_intersection(const VertexSet& a, const VertexSet& b);
VertexSet set_difference(const VertexSet& a, const VertexSet& b);

}  // namespace loglin
