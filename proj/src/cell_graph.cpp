#include "gsc/cell_graph.hpp"

#include <algorithm>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "gsc/errors.hpp"

namespace gsc {

namespace {

// l^level cells per axis; errors out when the per-axis or total encoding
// range would overflow the index types.
std::int64_t side_length(const CarpetSpec& spec, int level) {
  std::int64_t side = 1;
  for (int t = 0; t < level; ++t) {
    if (side > (std::int64_t{1} << 31) / spec.l) {
      throw BudgetError("graph side length l^n exceeds the supported range");
    }
    side *= spec.l;
  }
  std::int64_t full = 1;
  for (int k = 0; k < spec.d; ++k) {
    if (full > std::numeric_limits<std::int64_t>::max() / side) {
      throw BudgetError("cell encoding range side^d exceeds 64 bits");
    }
    full *= side;
  }
  return side;
}

}  // namespace

std::int32_t CellGraph::index_of_code(std::int64_t code) const {
  const auto it = std::lower_bound(codes.begin(), codes.end(), code);
  if (it == codes.end() || *it != code) return -1;
  return static_cast<std::int32_t>(it - codes.begin());
}

CellGraph build_cell_graph(const CarpetSpec& spec, int level, const GraphOptions& opt) {
  if (level < 1) throw std::invalid_argument("build_cell_graph: level must be >= 1");
  // Budget check before any allocation.
  std::int64_t count = 1;
  for (int t = 0; t < level; ++t) {
    if (count > opt.cell_budget / spec.count()) {
      throw BudgetError("cell count (#S)^" + std::to_string(level) + " = " +
                        std::to_string(spec.count()) + "^" + std::to_string(level) +
                        " exceeds the cell budget of " + std::to_string(opt.cell_budget));
    }
    count *= spec.count();
  }

  CellGraph graph;
  graph.spec = spec;
  graph.level = level;
  graph.side = side_length(spec, level);

  const int d = spec.d;
  // Expand addresses digit by digit: origins at level t+1 are l*o + s.
  std::vector<std::int32_t> coords;
  for (const Tuple& cell : spec.cells) coords.insert(coords.end(), cell.begin(), cell.end());
  for (int t = 1; t < level; ++t) {
    std::vector<std::int32_t> next;
    next.reserve(coords.size() * spec.cells.size());
    const std::int64_t n_prev = static_cast<std::int64_t>(coords.size()) / d;
    for (std::int64_t i = 0; i < n_prev; ++i) {
      for (const Tuple& cell : spec.cells) {
        for (int k = 0; k < d; ++k) next.push_back(coords[i * d + k] * spec.l + cell[k]);
      }
    }
    coords = std::move(next);
  }

  const std::int64_t n = static_cast<std::int64_t>(coords.size()) / d;
  std::vector<std::int64_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::vector<std::int64_t> raw_codes(n);
  for (std::int64_t i = 0; i < n; ++i) {
    raw_codes[i] = encode_tuple({coords.data() + i * d, static_cast<std::size_t>(d)},
                                graph.side);
  }
  std::sort(order.begin(), order.end(),
            [&](std::int64_t a, std::int64_t b) { return raw_codes[a] < raw_codes[b]; });
  graph.codes.resize(n);
  graph.coords.resize(coords.size());
  for (std::int64_t i = 0; i < n; ++i) {
    graph.codes[i] = raw_codes[order[i]];
    for (int k = 0; k < d; ++k) graph.coords[i * d + k] = coords[order[i] * d + k];
  }

  // Face edges: +1 step per coordinate, no carries in the mixed-radix code.
  std::int64_t place = 1;
  for (int k = 0; k < d; ++k) {
    for (std::int64_t i = 0; i < n; ++i) {
      if (graph.coords[i * d + k] == graph.side - 1) continue;
      const std::int32_t j = graph.index_of_code(graph.codes[i] + place);
      if (j >= 0) {
        graph.face_edges.emplace_back(static_cast<std::int32_t>(i), j);
      }
    }
    place *= graph.side;
  }
  std::sort(graph.face_edges.begin(), graph.face_edges.end());

  if (opt.with_touch_edges) {
    // All offsets in {-1,0,1}^d with positive encoding, so each unordered
    // pair appears once.
    std::vector<Tuple> offsets;
    Tuple off(d, -1);
    for (;;) {
      std::int64_t code_delta = 0;
      std::int64_t p = 1;
      for (int k = 0; k < d; ++k) {
        code_delta += off[k] * p;
        p *= graph.side;
      }
      if (code_delta > 0) offsets.push_back(off);
      int k = 0;
      while (k < d && off[k] == 1) off[k++] = -1;
      if (k == d) break;
      ++off[k];
    }
    Tuple nb(d);
    for (std::int64_t i = 0; i < n; ++i) {
      for (const Tuple& o : offsets) {
        bool in_range = true;
        for (int k = 0; k < d; ++k) {
          nb[k] = graph.coords[i * d + k] + o[k];
          if (nb[k] < 0 || nb[k] >= graph.side) {
            in_range = false;
            break;
          }
        }
        if (!in_range) continue;
        const std::int32_t j = graph.index_of_code(encode_tuple(nb, graph.side));
        if (j >= 0) graph.touch_edges.emplace_back(static_cast<std::int32_t>(i), j);
      }
    }
    std::sort(graph.touch_edges.begin(), graph.touch_edges.end());
  }
  return graph;
}

FaceSet face_cells(const CellGraph& graph, int axis, int side) {
  if (axis < 0 || axis >= graph.d()) throw std::invalid_argument("face_cells: bad axis");
  if (side != 0 && side != 1) throw std::invalid_argument("face_cells: side must be 0 or 1");
  const std::int32_t wanted = side == 0 ? 0 : static_cast<std::int32_t>(graph.side - 1);
  FaceSet face;
  face.axis = axis;
  face.side = side;
  const std::int64_t n = graph.cell_count();
  for (std::int64_t i = 0; i < n; ++i) {
    if (graph.coords[i * graph.d() + axis] == wanted) {
      face.cells.push_back(static_cast<std::int32_t>(i));
    }
  }
  return face;
}

std::vector<std::int32_t> subcell_embedding(const CellGraph& inner, const Word& w,
                                            const CellGraph& full) {
  if (inner.spec.codes != full.spec.codes || inner.spec.l != full.spec.l) {
    throw std::invalid_argument("subcell_embedding: graphs built from different specs");
  }
  const int m = full.level - inner.level;
  if (w.level() != m) {
    throw std::invalid_argument("subcell_embedding: outer word length must equal level gap");
  }
  Tuple outer(inner.d(), 0);
  if (m > 0) outer = cell_origin(w, inner.spec);
  const int d = inner.d();
  std::vector<std::int32_t> map(inner.cell_count());
  Tuple t(d);
  for (std::int64_t v = 0; v < inner.cell_count(); ++v) {
    for (int k = 0; k < d; ++k) {
      t[k] = static_cast<std::int32_t>(outer[k] * inner.side + inner.coords[v * d + k]);
    }
    const std::int32_t idx = full.index_of_code(encode_tuple(t, full.side));
    if (idx < 0) throw Error("subcell_embedding: concatenated address missing from graph");
    map[v] = idx;
  }
  return map;
}

std::vector<std::int32_t> symmetry_permutation(const CellGraph& graph, const CubeSymmetry& g) {
  if (g.dim() != graph.d()) throw std::invalid_argument("symmetry_permutation: bad dimension");
  const int d = graph.d();
  const std::int64_t n = graph.cell_count();
  std::vector<std::int32_t> perm(n);
  Tuple image(d);
  for (std::int64_t i = 0; i < n; ++i) {
    g.apply(graph.origin(static_cast<std::int32_t>(i)), image, graph.side);
    const std::int32_t j = graph.index_of_code(encode_tuple(image, graph.side));
    if (j < 0) {
      std::string msg = "symmetry does not preserve the cell set: cell (";
      for (int k = 0; k < d; ++k) {
        if (k) msg += ',';
        msg += std::to_string(graph.origin(static_cast<std::int32_t>(i))[k]);
      }
      msg += ") maps outside it";
      throw SpecError(msg);
    }
    perm[i] = j;
  }
  return perm;
}

Csr face_adjacency_csr(const CellGraph& graph) {
  const std::int64_t n = graph.cell_count();
  Csr csr;
  csr.offsets.assign(n + 1, 0);
  for (const auto& [a, b] : graph.face_edges) {
    ++csr.offsets[a + 1];
    ++csr.offsets[b + 1];
  }
  for (std::int64_t i = 0; i < n; ++i) csr.offsets[i + 1] += csr.offsets[i];
  csr.neighbors.resize(csr.offsets[n]);
  std::vector<std::int64_t> cursor(csr.offsets.begin(), csr.offsets.end() - 1);
  for (const auto& [a, b] : graph.face_edges) {
    csr.neighbors[cursor[a]++] = b;
    csr.neighbors[cursor[b]++] = a;
  }
  return csr;
}

}  // namespace gsc
