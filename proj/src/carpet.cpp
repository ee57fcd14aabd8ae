#include "gsc/carpet.hpp"

#include <algorithm>
#include <bit>
#include <cstdlib>
#include <queue>
#include <sstream>
#include <stdexcept>

#include "gsc/errors.hpp"

namespace gsc {

namespace {

std::string format_tuple(std::span<const std::int32_t> t) {
  std::ostringstream os;
  os << '(';
  for (std::size_t k = 0; k < t.size(); ++k) {
    if (k) os << ',';
    os << t[k];
  }
  os << ')';
  return os.str();
}

// Index-cube size l^d with an overflow / practicality guard.
std::int64_t index_cube_size(int d, std::int64_t l) {
  constexpr std::int64_t kCap = std::int64_t{1} << 27;
  std::int64_t n = 1;
  for (int k = 0; k < d; ++k) {
    if (n > kCap / l) throw SpecError("index cube l^d exceeds the supported range");
    n *= l;
  }
  return n;
}

// All 3^d - 1 offsets with entries in {-1, 0, 1}.
std::vector<Tuple> touch_offsets(int d) {
  std::vector<Tuple> offsets;
  Tuple cur(d, -1);
  for (;;) {
    bool zero = std::all_of(cur.begin(), cur.end(), [](int v) { return v == 0; });
    if (!zero) offsets.push_back(cur);
    int k = 0;
    while (k < d && cur[k] == 1) cur[k++] = -1;
    if (k == d) break;
    ++cur[k];
  }
  return offsets;
}

// Connectivity of a corner subset of the {0,1}^dims hypercube under
// Hamming-distance-1 adjacency. Empty sets count as connected.
bool corner_subset_connected(std::uint64_t mask, int dims) {
  if (mask == 0) return true;
  const std::uint64_t start = mask & (~mask + 1);
  std::uint64_t reached = start;
  std::uint64_t frontier = start;
  while (frontier) {
    const int node = std::countr_zero(frontier);
    frontier &= frontier - 1;
    for (int k = 0; k < dims; ++k) {
      const std::uint64_t nb = std::uint64_t{1} << (node ^ (1 << k));
      if ((mask & nb) && !(reached & nb)) {
        reached |= nb;
        frontier |= nb;
      }
    }
  }
  return reached == mask;
}

}  // namespace

std::int64_t encode_tuple(std::span<const std::int32_t> t, std::int64_t radix) {
  std::int64_t code = 0;
  std::int64_t place = 1;
  for (std::size_t k = 0; k < t.size(); ++k) {
    code += t[k] * place;
    if (k + 1 < t.size()) place *= radix;
  }
  return code;
}

Tuple decode_tuple(std::int64_t code, std::int64_t radix, int d) {
  Tuple t(d);
  for (int k = 0; k < d; ++k) {
    t[k] = static_cast<std::int32_t>(code % radix);
    code /= radix;
  }
  return t;
}

CarpetSpec CarpetSpec::create(int d, int l, std::vector<Tuple> cells) {
  if (d < 2) throw SpecError("dimension d must be >= 2");
  if (l < 3) throw SpecError("subdivision factor l must be >= 3");
  if (cells.empty()) throw SpecError("cell set must be non-empty");
  const std::int64_t full = index_cube_size(d, l);
  for (const Tuple& t : cells) {
    if (static_cast<int>(t.size()) != d) {
      throw SpecError("cell tuple " + format_tuple(t) + " has wrong arity (expected " +
                      std::to_string(d) + ")");
    }
    for (int v : t) {
      if (v < 0 || v >= l) {
        throw SpecError("cell tuple " + format_tuple(t) + " has an entry outside [0, " +
                        std::to_string(l - 1) + "]");
      }
    }
  }
  std::sort(cells.begin(), cells.end(), [l](const Tuple& a, const Tuple& b) {
    return encode_tuple(a, l) < encode_tuple(b, l);
  });
  for (std::size_t i = 1; i < cells.size(); ++i) {
    if (cells[i] == cells[i - 1]) {
      throw SpecError("duplicate cell tuple " + format_tuple(cells[i]));
    }
  }
  if (static_cast<std::int64_t>(cells.size()) >= full) {
    throw SpecError("cell set must be a proper subset of the full index cube");
  }
  CarpetSpec spec;
  spec.d = d;
  spec.l = l;
  spec.cells = std::move(cells);
  spec.codes.reserve(spec.cells.size());
  for (const Tuple& t : spec.cells) spec.codes.push_back(encode_tuple(t, l));
  return spec;
}

bool CarpetSpec::contains(std::span<const std::int32_t> t) const {
  for (int v : t) {
    if (v < 0 || v >= l) return false;
  }
  return contains_code(encode_tuple(t, l));
}

bool CarpetSpec::contains_code(std::int64_t code) const {
  return std::binary_search(codes.begin(), codes.end(), code);
}

Tuple cell_origin(const Word& w, const CarpetSpec& spec) {
  if (w.letters.empty()) throw std::invalid_argument("cell_origin: empty word");
  Tuple origin(spec.d, 0);
  for (const Tuple& letter : w.letters) {
    if (!spec.contains(letter)) {
      throw SpecError("word letter " + format_tuple(letter) + " is not a cell of the spec");
    }
    for (int k = 0; k < spec.d; ++k) origin[k] = origin[k] * spec.l + letter[k];
  }
  return origin;
}

const char* nd_method_name(NdMethod m) {
  switch (m) {
    case NdMethod::nd_m1: return "nd_m1";
    case NdMethod::nd_2: return "nd_2";
    case NdMethod::ndf: return "ndf";
  }
  return "?";
}

NdMethod nd_method_from_name(const std::string& name) {
  if (name == "nd_m1") return NdMethod::nd_m1;
  if (name == "nd_2") return NdMethod::nd_2;
  if (name == "ndf") return NdMethod::ndf;
  throw std::invalid_argument("unknown non-diagonality method: " + name);
}

SymmetryCheck check_symmetry(const CarpetSpec& spec) {
  SymmetryCheck result;
  const auto group = enumerate_cube_group(spec.d);
  Tuple image(spec.d);
  for (const CubeSymmetry& g : group) {
    for (const Tuple& cell : spec.cells) {
      g.apply(cell, image, spec.l);
      if (!spec.contains_code(encode_tuple(image, spec.l))) {
        result.pass = false;
        result.witness = SymmetryWitness{g, cell, image};
        return result;
      }
    }
  }
  result.pass = true;
  return result;
}

ConnectednessCheck check_connectedness(const CarpetSpec& spec) {
  ConnectednessCheck result;
  const std::int64_t n = spec.count();
  const auto offsets = touch_offsets(spec.d);
  std::vector<std::int32_t> label(n, -1);
  std::int32_t components = 0;
  Tuple nb(spec.d);
  for (std::int64_t root = 0; root < n; ++root) {
    if (label[root] >= 0) continue;
    label[root] = components;
    std::queue<std::int64_t> queue;
    queue.push(root);
    while (!queue.empty()) {
      const std::int64_t a = queue.front();
      queue.pop();
      const Tuple& cell = spec.cells[a];
      for (const Tuple& off : offsets) {
        bool in_range = true;
        for (int k = 0; k < spec.d; ++k) {
          nb[k] = cell[k] + off[k];
          if (nb[k] < 0 || nb[k] >= spec.l) {
            in_range = false;
            break;
          }
        }
        if (!in_range) continue;
        const std::int64_t nb_code = encode_tuple(nb, spec.l);
        const auto it = std::lower_bound(spec.codes.begin(), spec.codes.end(), nb_code);
        if (it == spec.codes.end() || *it != nb_code) continue;
        const std::int64_t b = it - spec.codes.begin();
        if (label[b] < 0) {
          label[b] = components;
          queue.push(b);
        }
      }
    }
    ++components;
  }
  result.components = components;
  result.pass = components == 1;
  if (!result.pass) {
    const auto other = std::find_if(label.begin(), label.end(),
                                    [](std::int32_t c) { return c != 0; });
    result.witness = ConnectivityWitness{spec.cells.front(),
                                         spec.cells[other - label.begin()]};
  }
  return result;
}

namespace {

// Unit-step lattice path from `from` to `to` inside the cell set, of length
// exactly |from - to|_1. Every step must move one coordinate toward the
// target, so the search tree has depth <= d here (callers only pass touching
// cells).
bool monotone_path_exists(const CarpetSpec& spec, const Tuple& from, const Tuple& to) {
  if (from == to) return true;
  Tuple cur = from;
  auto step = [&](auto&& self) -> bool {
    if (cur == to) return true;
    for (int k = 0; k < spec.d; ++k) {
      const int delta = to[k] > cur[k] ? 1 : (to[k] < cur[k] ? -1 : 0);
      if (delta == 0) continue;
      cur[k] += delta;
      const bool ok = spec.contains(cur) && self(self);
      cur[k] -= delta;
      if (ok) return true;
    }
    return false;
  };
  return step(step);
}

NdCheck check_ndf(const CarpetSpec& spec) {
  NdCheck result;
  result.method = NdMethod::ndf;
  const auto offsets = touch_offsets(spec.d);
  Tuple nb(spec.d);
  for (const Tuple& cell : spec.cells) {
    const std::int64_t cell_code = encode_tuple(cell, spec.l);
    for (const Tuple& off : offsets) {
      bool in_range = true;
      for (int k = 0; k < spec.d; ++k) {
        nb[k] = cell[k] + off[k];
        if (nb[k] < 0 || nb[k] >= spec.l) {
          in_range = false;
          break;
        }
      }
      if (!in_range) continue;
      const std::int64_t nb_code = encode_tuple(nb, spec.l);
      if (nb_code <= cell_code) continue;  // each unordered pair once
      if (!spec.contains_code(nb_code)) continue;
      if (!monotone_path_exists(spec, cell, nb)) {
        result.pass = false;
        result.witness = NdWitness{{}, std::make_pair(cell, nb)};
        return result;
      }
    }
  }
  result.pass = true;
  return result;
}

NdCheck check_nd_m1(const CarpetSpec& spec) {
  NdCheck result;
  result.method = NdMethod::nd_m1;
  if (spec.d > 6) throw SpecError("block non-diagonality checks support d <= 6");
  Tuple block(spec.d, 1);  // indices in {1..l-1}^d
  Tuple corner(spec.d);
  for (;;) {
    std::uint64_t mask = 0;
    for (std::uint32_t c = 0; c < (1u << spec.d); ++c) {
      for (int k = 0; k < spec.d; ++k) corner[k] = block[k] - 1 + ((c >> k) & 1);
      if (spec.contains(corner)) mask |= std::uint64_t{1} << c;
    }
    if (!corner_subset_connected(mask, spec.d)) {
      result.pass = false;
      result.witness = NdWitness{block, std::nullopt};
      return result;
    }
    int k = 0;
    while (k < spec.d && block[k] == spec.l - 1) block[k++] = 1;
    if (k == spec.d) break;
    ++block[k];
  }
  result.pass = true;
  return result;
}

// Level-2 block condition. A block is a product of per-axis index pairs
// {i_k - 1, i_k} with i_k in {1..l^2-1}; the level-2 grid cubes of the
// carpet it contains are determined by their level-1 digits alone, so per
// axis the pair either straddles a level-1 wall (digits a, a+1) or sits
// inside one level-1 cell (digit a twice). Enumerating those signatures
// covers every block; blocks with no straddling axis are automatically a
// single full-or-empty clump. Connectivity of the straddling pattern is
// checked on the corner hypercube restricted to the straddling axes
// (corners tied across a non-straddling axis are always mutually adjacent).
NdCheck check_nd_2(const CarpetSpec& spec) {
  NdCheck result;
  result.method = NdMethod::nd_2;
  if (spec.d > 6) throw SpecError("block non-diagonality checks support d <= 6");
  const int d = spec.d;
  const int l = spec.l;
  // Per-axis signature v in [0, 2l-1): v < l fixes digit v, otherwise the
  // axis straddles digits (v - l, v - l + 1).
  Tuple sig(d, 0);
  Tuple corner(d);
  for (;;) {
    int straddle_axes[6];
    int n_straddle = 0;
    for (int k = 0; k < d; ++k) {
      if (sig[k] >= l) straddle_axes[n_straddle++] = k;
    }
    if (n_straddle > 0) {
      std::uint64_t mask = 0;
      for (std::uint32_t c = 0; c < (1u << n_straddle); ++c) {
        for (int k = 0; k < d; ++k) corner[k] = sig[k] < l ? sig[k] : sig[k] - l;
        for (int t = 0; t < n_straddle; ++t) corner[straddle_axes[t]] += (c >> t) & 1;
        if (spec.contains(corner)) mask |= std::uint64_t{1} << c;
      }
      if (!corner_subset_connected(mask, n_straddle)) {
        // Reconstruct a concrete failing block index in {1..l^2-1}^d.
        Tuple block(d);
        for (int k = 0; k < d; ++k) {
          block[k] = sig[k] < l ? sig[k] * l + 1 : (sig[k] - l + 1) * l;
        }
        result.pass = false;
        result.witness = NdWitness{block, std::nullopt};
        return result;
      }
    }
    int k = 0;
    while (k < d && sig[k] == 2 * l - 2) sig[k++] = 0;
    if (k == d) break;
    ++sig[k];
  }
  result.pass = true;
  return result;
}

}  // namespace

NdCheck check_nondiagonality(const CarpetSpec& spec, NdMethod method) {
  switch (method) {
    case NdMethod::ndf: return check_ndf(spec);
    case NdMethod::nd_m1: return check_nd_m1(spec);
    case NdMethod::nd_2: return check_nd_2(spec);
  }
  throw std::invalid_argument("unknown non-diagonality method tag");
}

BorderCheck check_border(const CarpetSpec& spec) {
  BorderCheck result;
  Tuple cell(spec.d, 0);
  for (int k = 0; k < spec.l; ++k) {
    cell[0] = k;
    if (!spec.contains(cell)) {
      result.pass = false;
      result.witness = BorderWitness{k};
      return result;
    }
  }
  result.pass = true;
  return result;
}

std::vector<std::int64_t> slab_counts(const CarpetSpec& spec, int axis) {
  if (axis < 0 || axis >= spec.d) throw std::invalid_argument("slab_counts: bad axis");
  std::vector<std::int64_t> counts(spec.l, 0);
  for (const Tuple& cell : spec.cells) ++counts[cell[axis]];
  return counts;
}

Bb99Check bb99_condition(const CarpetSpec& spec) {
  Bb99Check result;
  result.slab_counts = slab_counts(spec, 0);
  result.holds = false;
  for (int j = 1; j < spec.l; ++j) {
    if (result.slab_counts[j] != result.slab_counts[0]) {
      result.holds = true;
      break;
    }
  }
  return result;
}

ValidationReport validate_spec(const CarpetSpec& spec, NdMethod method) {
  ValidationReport report;
  report.symmetry = check_symmetry(spec);
  report.connectedness = check_connectedness(spec);
  report.nondiagonality = check_nondiagonality(spec, method);
  report.border = check_border(spec);
  report.bb99 = bb99_condition(spec);
  return report;
}

CarpetSpec gen_counterexample(int d, int l_param) {
  if (d < 3) throw SpecError("counterexample family requires d >= 3");
  if (l_param < 2) throw SpecError("counterexample family requires l_param >= 2");
  const int side = 2 * l_param * d;
  index_cube_size(d, side);  // range guard
  // Excluded value sets {j, j + 2*l_param, ..., j + 2*l_param*(d-1)} for each
  // odd j below 2*l_param.
  std::vector<std::vector<std::int32_t>> targets;
  for (int j = 1; j < 2 * l_param; j += 2) {
    std::vector<std::int32_t> target(d);
    for (int t = 0; t < d; ++t) target[t] = j + 2 * l_param * t;
    targets.push_back(std::move(target));
  }
  std::vector<Tuple> cells;
  Tuple cell(d, 0);
  std::vector<std::int32_t> values(d);
  for (;;) {
    for (int k = 0; k < d; ++k) values[k] = std::abs(2 * cell[k] - side + 1);
    std::sort(values.begin(), values.end());
    bool excluded = false;
    for (const auto& target : targets) {
      if (values == target) {
        excluded = true;
        break;
      }
    }
    if (!excluded) cells.push_back(cell);
    int k = 0;
    while (k < d && cell[k] == side - 1) cell[k++] = 0;
    if (k == d) break;
    ++cell[k];
  }
  return CarpetSpec::create(d, side, std::move(cells));
}

CarpetSpec builtin_sierpinski_carpet() {
  std::vector<Tuple> cells;
  for (int y = 0; y < 3; ++y) {
    for (int x = 0; x < 3; ++x) {
      if (x == 1 && y == 1) continue;
      cells.push_back({x, y});
    }
  }
  return CarpetSpec::create(2, 3, std::move(cells));
}

CarpetSpec builtin_menger_sponge() {
  std::vector<Tuple> cells;
  for (int z = 0; z < 3; ++z) {
    for (int y = 0; y < 3; ++y) {
      for (int x = 0; x < 3; ++x) {
        const int ones = (x == 1) + (y == 1) + (z == 1);
        if (ones <= 1) cells.push_back({x, y, z});
      }
    }
  }
  return CarpetSpec::create(3, 3, std::move(cells));
}

CarpetSpec builtin_spec(const std::string& name) {
  if (name == "sc") return builtin_sierpinski_carpet();
  if (name == "menger") return builtin_menger_sponge();
  const std::string prefix = "counterexample:";
  if (name.rfind(prefix, 0) == 0) {
    const std::string args = name.substr(prefix.size());
    const auto comma = args.find(',');
    if (comma == std::string::npos) {
      throw SpecError("builtin counterexample expects \"counterexample:D,L\"");
    }
    try {
      const int d = std::stoi(args.substr(0, comma));
      const int l_param = std::stoi(args.substr(comma + 1));
      return gen_counterexample(d, l_param);
    } catch (const std::invalid_argument&) {
      throw SpecError("builtin counterexample expects integer arguments \"D,L\"");
    } catch (const std::out_of_range&) {
      throw SpecError("builtin counterexample arguments out of range");
    }
  }
  throw SpecError("unknown builtin spec: " + name +
                  " (expected sc, menger or counterexample:D,L)");
}

}  // namespace gsc
