#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "loglin/errors.hpp"

namespace loglin {

// A cell of the table: one level index per vertex. Level 0 is the
// distinguished reference level.
using Cell = std::vector<int>;

// A subset of vertices, kept sorted ascending.
using VertexSet = std::vector<int>;

// Default ceiling on exact cell enumeration (number of cells).
inline constexpr std::uint64_t kDefaultEnumerationGuard = std::uint64_t{1} << 22;

// The product space I = prod_v I_v with I_v = {0, ..., levels[v]-1}.
//
// Cells are ordered lexicographically over coordinates (last coordinate
// fastest); every dense vector or matrix in the library inherits this
// order. Spaces whose cell count overflows 64 bits are still
// constructible (local and sampling paths never enumerate them), but any
// exact-enumeration operation on them throws CapacityError.
class CellSpace {
public:
  explicit CellSpace(std::vector<int> levels);

  int vertex_count() const { return static_cast<int>(levels_.size()); }
  int level_count(int v) const { return levels_[static_cast<std::size_t>(v)]; }
  const std::vector<int>& levels() const { return levels_; }

  // Total number of cells, or nullopt if it overflows 64 bits.
  std::optional<std::uint64_t> cell_count() const { return cell_count_; }

  bool enumerable(std::uint64_t guard = kDefaultEnumerationGuard) const {
    return cell_count_.has_value() && *cell_count_ <= guard;
  }

  // Cell count if enumerable under `guard`; throws CapacityError otherwise.
  std::uint64_t require_enumerable(std::uint64_t guard = kDefaultEnumerationGuard) const;

  std::uint64_t index_of(const Cell& cell) const;
  Cell cell_at(std::uint64_t index) const;

  // Space restricted to `members` (sorted ascending).
  CellSpace restrict_to(const VertexSet& members) const;

  bool operator==(const CellSpace& other) const { return levels_ == other.levels_; }
  bool operator!=(const CellSpace& other) const { return !(*this == other); }

private:
  std::vector<int> levels_;
  std::optional<std::uint64_t> cell_count_;
};

// S(i) = {v : i_v != 0}.
VertexSet support(const Cell& cell);

// j "triangleleft" i: S(j) is contained in S(i) and the two cells agree on
// S(j). Equivalently, every nonzero coordinate of j is matched by i.
bool triangleleft(const Cell& j, const Cell& i);

// Extended relation: j triangleleft i, or j is the zero cell.
bool triangleleft0(const Cell& j, const Cell& i);

// Coordinates of `cell` at `members`, as a cell of the restricted space.
Cell restrict_cell(const Cell& cell, const VertexSet& members);

// Full-length cell equal to `sub` on `members` and zero elsewhere.
Cell pad_cell(const CellSpace& space, const VertexSet& members, const Cell& sub);

// Throws UsageError unless `cell` has one in-range coordinate per vertex.
void check_cell(const CellSpace& space, const Cell& cell);

// Cell <-> string. Digit string when every |I_v| <= 10, colon-separated
// integers otherwise (the file-format convention).
std::string encode_cell(const CellSpace& space, const Cell& cell);
Cell decode_cell(const CellSpace& space, const std::string& text);

}  // namespace loglin
