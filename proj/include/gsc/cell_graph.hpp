#pragma once

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "gsc/carpet.hpp"

namespace gsc {

inline constexpr std::int64_t kDefaultCellBudget = std::int64_t{1} << 22;

struct GraphOptions {
  std::int64_t cell_budget = kDefaultCellBudget;
  bool with_touch_edges = false;
};

/// Cells of one face of the cube: index k-th origin coordinate equal to 0
/// (side 0) or l^level - 1 (side 1).
struct FaceSet {
  int axis = 0;
  int side = 0;
  std::vector<std::int32_t> cells;
};

/// The level-n cell graph of a carpet. Vertices are the (#S)^n level-n
/// cells, ordered by the mixed-radix encoding of their origin tuples at
/// resolution l^n. Edges join cells sharing a (d-1)-dimensional facet
/// (origins differing by exactly 1 in exactly one coordinate); the optional
/// touch edges join any two cells whose closed cubes intersect.
struct CellGraph {
  CarpetSpec spec;
  int level = 0;
  std::int64_t side = 0;                   // l^level
  std::vector<std::int32_t> coords;        // cell i coordinate k at [i*d + k]
  std::vector<std::int64_t> codes;         // sorted origin encodings, base `side`
  std::vector<std::pair<std::int32_t, std::int32_t>> face_edges;   // a < b, sorted
  std::vector<std::pair<std::int32_t, std::int32_t>> touch_edges;  // optional, a < b, sorted

  int d() const { return spec.d; }
  std::int64_t cell_count() const { return static_cast<std::int64_t>(codes.size()); }
  std::span<const std::int32_t> origin(std::int32_t i) const {
    return {coords.data() + static_cast<std::size_t>(i) * spec.d,
            static_cast<std::size_t>(spec.d)};
  }
  /// Index of the cell with the given origin encoding, or -1.
  std::int32_t index_of_code(std::int64_t code) const;
};

/// Builds the level-n graph. Throws BudgetError when (#S)^n exceeds the
/// cell budget (the message names the offending count).
CellGraph build_cell_graph(const CarpetSpec& spec, int level, const GraphOptions& opt = {});

FaceSet face_cells(const CellGraph& graph, int axis, int side);

/// Injection of inner-level cell indices into a graph `m = full.level -
/// inner.level` levels finer, given by address concatenation behind the
/// outer word w (|w| must equal m): origin(w.v) = side_inner * origin(w) +
/// origin(v).
std::vector<std::int32_t> subcell_embedding(const CellGraph& inner, const Word& w,
                                            const CellGraph& full);

/// The cell-index permutation induced by a cube symmetry. Throws SpecError
/// with the violating cell when g does not preserve the cell set.
std::vector<std::int32_t> symmetry_permutation(const CellGraph& graph, const CubeSymmetry& g);

/// Compressed adjacency over face edges (both directions).
struct Csr {
  std::vector<std::int64_t> offsets;
  std::vector<std::int32_t> neighbors;
  std::span<const std::int32_t> row(std::int32_t i) const {
    return {neighbors.data() + offsets[i],
            static_cast<std::size_t>(offsets[i + 1] - offsets[i])};
  }
};
Csr face_adjacency_csr(const CellGraph& graph);

}  // namespace gsc
