#include "loglin/jset.hpp"

#include <algorithm>

namespace loglin {

JSet::JSet(CellSpace space, GeneratingClass gen, std::vector<Cell> cells)
    : space_(std::move(space)), gen_(std::move(gen)), cells_(std::move(cells)) {
  std::sort(cells_.begin(), cells_.end());
  cells_.erase(std::unique(cells_.begin(), cells_.end()), cells_.end());
  for (std::size_t k = 0; k < cells_.size(); ++k)
    index_.emplace(cells_[k], static_cast<int>(k));
}

namespace {

// All cells with support exactly `members` (nonzero levels there, zero
// elsewhere), appended to `out`.
void emit_cells_with_support(const CellSpace& space, const VertexSet& members,
                             std::vector<Cell>& out) {
  Cell cell(static_cast<std::size_t>(space.vertex_count()), 0);
  std::vector<int> level(members.size(), 1);
  for (;;) {
    for (std::size_t k = 0; k < members.size(); ++k)
      cell[static_cast<std::size_t>(members[k])] = level[k];
    out.push_back(cell);
    // Odometer over nonzero levels.
    std::size_t k = members.size();
    while (k-- > 0) {
      if (++level[k] < space.level_count(members[k])) break;
      level[k] = 1;
      if (k == 0) return;
    }
    if (members.empty()) return;
  }
}

}  // namespace

JSet JSet::build(const CellSpace& space, const GeneratingClass& gen) {
  if (gen.vertex_count() != space.vertex_count())
    throw UsageError("JSet::build: generating class and space disagree on |V|");
  for (const auto& m : gen.maximal_sets())
    if (m.size() > 25)
      throw CapacityError("JSet::build: maximal generating set too large to expand");
  std::vector<Cell> cells;
  for (const auto& s : gen.closure()) emit_cells_with_support(space, s, cells);
  return JSet(space, gen, std::move(cells));
}

JSet JSet::saturated(const CellSpace& space, std::uint64_t guard) {
  space.require_enumerable(guard);
  return build(space, GeneratingClass::saturated(space.vertex_count()));
}

std::optional<int> JSet::find(const Cell& cell) const {
  auto it = index_.find(cell);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

}  // namespace loglin
