#include "loglin/generating_class.hpp"

#include <algorithm>
#include <set>

namespace loglin {

bool is_subset(const VertexSet& a, const VertexSet& b) {
  return std::includes(b.begin(), b.end(), a.begin(), a.end());
}

VertexSet set_union(const VertexSet& a, const VertexSet& b) {
  VertexSet out;
  std::set_union(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

VertexSet set_intersection(const VertexSet& a, const VertexSet& b) {
  VertexSet out;
  std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

VertexSet set_difference(const VertexSet& a, const VertexSet& b) {
  VertexSet out;
  std::set_difference(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

GeneratingClass GeneratingClass::from_maximal(std::vector<VertexSet> maximal,
                                              int vertex_count) {
  if (vertex_count <= 0) throw UsageError("GeneratingClass: vertex_count must be positive");
  for (auto& s : maximal) {
    if (s.empty()) throw UsageError("GeneratingClass: empty set not allowed");
    std::sort(s.begin(), s.end());
    s.erase(std::unique(s.begin(), s.end()), s.end());
    if (s.front() < 0 || s.back() >= vertex_count)
      throw UsageError("GeneratingClass: vertex out of range");
  }
  std::sort(maximal.begin(), maximal.end());
  maximal.erase(std::unique(maximal.begin(), maximal.end()), maximal.end());

  // Keep only the antichain of maximal sets.
  std::vector<VertexSet> kept;
  for (std::size_t a = 0; a < maximal.size(); ++a) {
    bool dominated = false;
    for (std::size_t b = 0; b < maximal.size() && !dominated; ++b)
      if (a != b && maximal[a] != maximal[b] && is_subset(maximal[a], maximal[b]))
        dominated = true;
    if (!dominated) kept.push_back(maximal[a]);
  }

  std::vector<bool> covered(static_cast<std::size_t>(vertex_count), false);
  for (const auto& s : kept)
    for (int v : s) covered[static_cast<std::size_t>(v)] = true;
  for (int v = 0; v < vertex_count; ++v)
    if (!covered[static_cast<std::size_t>(v)])
      throw UsageError("GeneratingClass: union of members must cover V (vertex " +
                       std::to_string(v) + " missing)");

  GeneratingClass g;
  g.maximal_ = std::move(kept);
  g.vertex_count_ = vertex_count;
  return g;
}

GeneratingClass GeneratingClass::saturated(int vertex_count) {
  VertexSet all;
  for (int v = 0; v < vertex_count; ++v) all.push_back(v);
  return from_maximal({all}, vertex_count);
}

bool GeneratingClass::contains(const VertexSet& set) const {
  if (set.empty()) return false;
  for (const auto& m : maximal_)
    if (is_subset(set, m)) return true;
  return false;
}

std::vector<VertexSet> GeneratingClass::closure() const {
  std::set<VertexSet> out;
  for (const auto& m : maximal_) {
    // Enumerate nonempty subsets of each maximal set.
    const std::size_t k = m.size();
    for (std::uint64_t mask = 1; mask < (std::uint64_t{1} << k); ++mask) {
      VertexSet s;
      for (std::size_t b = 0; b < k; ++b)
        if (mask & (std::uint64_t{1} << b)) s.push_back(m[b]);
      out.insert(std::move(s));
    }
  }
  return {out.begin(), out.end()};
}

}  // namespace loglin
