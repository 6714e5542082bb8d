#include "loglin/contingency_table.hpp"

#include <algorithm>

namespace loglin {

ContingencyTable::ContingencyTable(CellSpace space, std::uint64_t dense_threshold)
    : space_(std::move(space)) {
  dense_mode_ = space_.enumerable(dense_threshold);
  if (dense_mode_) dense_.assign(static_cast<std::size_t>(*space_.cell_count()), 0);
}

ContingencyTable ContingencyTable::from_dense(CellSpace space,
                                              std::vector<std::int64_t> counts) {
  const auto count = space.cell_count();
  if (!count.has_value() || *count != counts.size())
    throw UsageError("from_dense: counts length must equal the cell count");
  ContingencyTable t(std::move(space), counts.size());
  for (std::int64_t c : counts) {
    if (c < 0) throw UsageError("from_dense: negative count");
    t.total_ += c;
  }
  t.dense_ = std::move(counts);
  return t;
}

void ContingencyTable::add(const Cell& cell, std::int64_t count) {
  check_cell(space_, cell);
  if (count < 0) throw UsageError("ContingencyTable::add: negative count");
  if (dense_mode_) {
    dense_[static_cast<std::size_t>(space_.index_of(cell))] += count;
  } else {
    sparse_[cell] += count;
  }
  total_ += count;
}

std::int64_t ContingencyTable::count(const Cell& cell) const {
  check_cell(space_, cell);
  if (dense_mode_) return dense_[static_cast<std::size_t>(space_.index_of(cell))];
  auto it = sparse_.find(cell);
  return it == sparse_.end() ? 0 : it->second;
}

const std::vector<std::int64_t>& ContingencyTable::dense() const {
  if (!dense_mode_)
    throw CapacityError("table is in sparse mode; exact enumeration refused");
  return dense_;
}

std::vector<std::pair<Cell, std::int64_t>> ContingencyTable::entries() const {
  std::vector<std::pair<Cell, std::int64_t>> out;
  if (dense_mode_) {
    for (std::size_t k = 0; k < dense_.size(); ++k)
      if (dense_[k] != 0) out.emplace_back(space_.cell_at(k), dense_[k]);
  } else {
    out.assign(sparse_.begin(), sparse_.end());
  }
  return out;
}

ContingencyTable marginal_table(const ContingencyTable& table, const VertexSet& members) {
  for (int v : members)
    if (v < 0 || v >= table.space().vertex_count())
      throw UsageError("marginal_table: vertex out of range");
  CellSpace sub = table.space().restrict_to(members);
  ContingencyTable out(sub);
  if (table.is_dense()) {
    const auto& counts = table.dense();
    // Accumulate by walking all cells once; restriction indices are cheap.
    const auto n = counts.size();
    std::vector<std::int64_t> acc(static_cast<std::size_t>(*sub.cell_count()), 0);
    for (std::size_t k = 0; k < n; ++k) {
      if (counts[k] == 0) continue;
      const Cell cell = table.space().cell_at(k);
      acc[static_cast<std::size_t>(sub.index_of(restrict_cell(cell, members)))] += counts[k];
    }
    return ContingencyTable::from_dense(std::move(sub), std::move(acc));
  }
  for (const auto& [cell, c] : table.entries()) out.add(restrict_cell(cell, members), c);
  return out;
}

}  // namespace loglin
