#pragma once

#include <cstdint>
#include <map>
#include <vector>

#include "loglin/cell_space.hpp"

namespace loglin {

// Cell counts n = (n(i), i in I) with total N. Dense storage up to a
// configurable cell-count threshold, sparse keyed storage above it.
// Exact-enumeration consumers must call dense(); sparse tables serve the
// marginal/local paths only.
class ContingencyTable {
public:
  explicit ContingencyTable(CellSpace space,
                            std::uint64_t dense_threshold = kDefaultEnumerationGuard);

  static ContingencyTable from_dense(CellSpace space, std::vector<std::int64_t> counts);

  const CellSpace& space() const { return space_; }
  bool is_dense() const { return dense_mode_; }
  std::int64_t total() const { return total_; }

  void add(const Cell& cell, std::int64_t count = 1);

  std::int64_t count(const Cell& cell) const;

  // Dense counts in lexicographic cell order; throws CapacityError in
  // sparse mode.
  const std::vector<std::int64_t>& dense() const;

  // Nonzero entries, cell -> count, in lexicographic order (both modes).
  std::vector<std::pair<Cell, std::int64_t>> entries() const;

private:
  CellSpace space_;
  bool dense_mode_;
  std::vector<std::int64_t> dense_;
  std::map<Cell, std::int64_t> sparse_;
  std::int64_t total_ = 0;
};

// Counts summed over the coordinates outside `members`; the total is
// preserved. Works in both dense and sparse modes.
ContingencyTable marginal_table(const ContingencyTable& table, const VertexSet& members);

}  // namespace loglin
