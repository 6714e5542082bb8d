#include "loglin/cell_space.hpp"

#include <algorithm>
#include <limits>
#include <sstream>

namespace loglin {

CellSpace::CellSpace(std::vector<int> levels) : levels_(std::move(levels)) {
  if (levels_.empty()) throw UsageError("CellSpace: at least one vertex required");
  for (std::size_t v = 0; v < levels_.size(); ++v) {
    if (levels_[v] < 2)
      throw UsageError("CellSpace: |I_v| >= 2 required at vertex " + std::to_string(v));
  }
  std::uint64_t count = 1;
  bool overflow = false;
  for (int l : levels_) {
    const auto ul = static_cast<std::uint64_t>(l);
    if (count > std::numeric_limits<std::uint64_t>::max() / ul) {
      overflow = true;
      break;
    }
    count *= ul;
  }
  cell_count_ = overflow ? std::nullopt : std::optional<std::uint64_t>(count);
}

std::uint64_t CellSpace::require_enumerable(std::uint64_t guard) const {
  if (!cell_count_.has_value() || *cell_count_ > guard) {
    throw CapacityError(
        "cell space too large for exact enumeration (guard " + std::to_string(guard) +
        " cells); use a marginal or local model instead");
  }
  return *cell_count_;
}

std::uint64_t CellSpace::index_of(const Cell& cell) const {
  check_cell(*this, cell);
  std::uint64_t index = 0;
  for (std::size_t v = 0; v < levels_.size(); ++v)
    index = index * static_cast<std::uint64_t>(levels_[v]) + static_cast<std::uint64_t>(cell[v]);
  return index;
}

Cell CellSpace::cell_at(std::uint64_t index) const {
  Cell cell(levels_.size(), 0);
  for (std::size_t v = levels_.size(); v-- > 0;) {
    const auto l = static_cast<std::uint64_t>(levels_[v]);
    cell[v] = static_cast<int>(index % l);
    index /= l;
  }
  if (index != 0) throw UsageError("cell index out of range");
  return cell;
}

CellSpace CellSpace::restrict_to(const VertexSet& members) const {
  std::vector<int> sub;
  sub.reserve(members.size());
  for (int v : members) {
    if (v < 0 || v >= vertex_count()) throw UsageError("restrict_to: vertex out of range");
    sub.push_back(levels_[static_cast<std::size_t>(v)]);
  }
  return CellSpace(std::move(sub));
}

VertexSet support(const Cell& cell) {
  VertexSet s;
  for (std::size_t v = 0; v < cell.size(); ++v)
    if (cell[v] != 0) s.push_back(static_cast<int>(v));
  return s;
}

bool triangleleft(const Cell& j, const Cell& i) {
  if (j.size() != i.size())
    throw UsageError("triangleleft: cells from different spaces");
  for (std::size_t v = 0; v < j.size(); ++v)
    if (j[v] != 0 && i[v] != j[v]) return false;
  return true;
}

bool triangleleft0(const Cell& j, const Cell& i) {
  // triangleleft already treats the zero cell as below everything.
  return triangleleft(j, i);
}

Cell restrict_cell(const Cell& cell, const VertexSet& members) {
  Cell sub;
  sub.reserve(members.size());
  for (int v : members) sub.push_back(cell[static_cast<std::size_t>(v)]);
  return sub;
}

Cell pad_cell(const CellSpace& space, const VertexSet& members, const Cell& sub) {
  if (members.size() != sub.size()) throw UsageError("pad_cell: size mismatch");
  Cell cell(static_cast<std::size_t>(space.vertex_count()), 0);
  for (std::size_t k = 0; k < members.size(); ++k)
    cell[static_cast<std::size_t>(members[k])] = sub[k];
  check_cell(space, cell);
  return cell;
}

void check_cell(const CellSpace& space, const Cell& cell) {
  if (static_cast<int>(cell.size()) != space.vertex_count())
    throw UsageError("cell has wrong number of coordinates");
  for (std::size_t v = 0; v < cell.size(); ++v) {
    if (cell[v] < 0 || cell[v] >= space.level_count(static_cast<int>(v)))
      throw UsageError("cell coordinate out of range at vertex " + std::to_string(v));
  }
}

std::string encode_cell(const CellSpace& space, const Cell& cell) {
  check_cell(space, cell);
  const bool digits =
      *std::max_element(space.levels().begin(), space.levels().end()) <= 10;
  std::ostringstream out;
  for (std::size_t v = 0; v < cell.size(); ++v) {
    if (!digits && v > 0) out << ':';
    out << cell[v];
  }
  return out.str();
}

Cell decode_cell(const CellSpace& space, const std::string& text) {
  const bool digits =
      *std::max_element(space.levels().begin(), space.levels().end()) <= 10;
  Cell cell;
  if (digits) {
    if (static_cast<int>(text.size()) != space.vertex_count())
      throw UsageError("cell string '" + text + "' has wrong length");
    for (char c : text) {
      if (c < '0' || c > '9') throw UsageError("bad digit in cell string '" + text + "'");
      cell.push_back(c - '0');
    }
  } else {
    std::istringstream in(text);
    std::string tok;
    while (std::getline(in, tok, ':')) cell.push_back(std::stoi(tok));
  }
  check_cell(space, cell);
  return cell;
}

}  // namespace loglin
