#pragma once

#include <map>
#include <optional>
#include <vector>

#include "loglin/cell_space.hpp"
#include "loglin/generating_class.hpp"

namespace loglin {

// J = {j in I : S(j) in D}: the cells indexing the free canonical
// parameters. Cells are stored full-length (zeros off their support) in
// lexicographic order, so parameter vectors align across runs.
class JSet {
public:
  static JSet build(const CellSpace& space, const GeneratingClass& gen);

  // J-set of the saturated model: every cell with nonempty support.
  // Requires the space to be enumerable under `guard`.
  static JSet saturated(const CellSpace& space,
                        std::uint64_t guard = kDefaultEnumerationGuard);

  const CellSpace& space() const { return space_; }
  const GeneratingClass& generating_class() const { return gen_; }

  int size() const { return static_cast<int>(cells_.size()); }
  const Cell& cell(int k) const { return cells_[static_cast<std::size_t>(k)]; }
  const std::vector<Cell>& cells() const { return cells_; }

  // Position of `cell` in the enumeration, or nullopt if not a member.
  std::optional<int> find(const Cell& cell) const;

private:
  JSet(CellSpace space, GeneratingClass gen, std::vector<Cell> cells);
  CellSpace space_;
  GeneratingClass gen_;
  std::vector<Cell> cells_;
  std::map<Cell, int> index_;
};

}  // namespace loglin
