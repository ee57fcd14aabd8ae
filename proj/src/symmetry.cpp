#include "gsc/symmetry.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

namespace gsc {

bool CubeSymmetry::is_identity() const {
  for (int k = 0; k < dim(); ++k) {
    if (perm[k] != k || flips[k]) return false;
  }
  return true;
}

void CubeSymmetry::apply(std::span<const std::int32_t> in, std::span<std::int32_t> out,
                         std::int64_t side) const {
  const int d = dim();
  for (int k = 0; k < d; ++k) {
    const std::int32_t v = in[perm[k]];
    out[k] = flips[k] ? static_cast<std::int32_t>(side - 1 - v) : v;
  }
}

std::vector<std::int32_t> CubeSymmetry::apply(std::span<const std::int32_t> in,
                                              std::int64_t side) const {
  std::vector<std::int32_t> out(dim());
  apply(in, out, side);
  return out;
}

CubeSymmetry operator*(const CubeSymmetry& a, const CubeSymmetry& b) {
  const int d = a.dim();
  if (d != b.dim()) throw std::invalid_argument("cube symmetry dimension mismatch");
  CubeSymmetry c;
  c.perm.resize(d);
  c.flips.resize(d);
  // a(b(x))[k] = flip_a[k] applied to b(x)[perm_a[k]], and
  // b(x)[j] reads x[perm_b[j]] with flip_b[j].
  for (int k = 0; k < d; ++k) {
    const int j = a.perm[k];
    c.perm[k] = b.perm[j];
    c.flips[k] = static_cast<std::uint8_t>(a.flips[k] ^ b.flips[j]);
  }
  return c;
}

CubeSymmetry CubeSymmetry::inverse() const {
  // From out[k] = +/- in[perm[k]] it follows that the inverse reads slot k of
  // its input for output coordinate perm[k], with the same flip.
  const int d = dim();
  CubeSymmetry inv;
  inv.perm.resize(d);
  inv.flips.resize(d);
  for (int k = 0; k < d; ++k) {
    inv.perm[perm[k]] = static_cast<std::uint8_t>(k);
    inv.flips[perm[k]] = flips[k];
  }
  return inv;
}

CubeSymmetry identity_symmetry(int d) {
  CubeSymmetry g;
  g.perm.resize(d);
  std::iota(g.perm.begin(), g.perm.end(), std::uint8_t{0});
  g.flips.assign(d, 0);
  return g;
}

std::vector<CubeSymmetry> enumerate_cube_group(int d) {
  if (d < 1) throw std::invalid_argument("enumerate_cube_group: dimension must be >= 1");
  std::vector<std::uint8_t> perm(d);
  std::iota(perm.begin(), perm.end(), std::uint8_t{0});
  std::vector<CubeSymmetry> group;
  do {
    for (std::uint32_t mask = 0; mask < (1u << d); ++mask) {
      CubeSymmetry g;
      g.perm = perm;
      g.flips.resize(d);
      for (int k = 0; k < d; ++k) g.flips[k] = static_cast<std::uint8_t>((mask >> k) & 1u);
      group.push_back(std::move(g));
    }
  } while (std::next_permutation(perm.begin(), perm.end()));
  return group;
}

std::vector<CubeSymmetry> axis_fixing_reflections(int d, int axis) {
  if (d < 1 || axis < 0 || axis >= d) {
    throw std::invalid_argument("axis_fixing_reflections: bad axis");
  }
  std::vector<CubeSymmetry> subgroup;
  for (std::uint32_t mask = 0; mask < (1u << d); ++mask) {
    if ((mask >> axis) & 1u) continue;
    CubeSymmetry g = identity_symmetry(d);
    for (int k = 0; k < d; ++k) g.flips[k] = static_cast<std::uint8_t>((mask >> k) & 1u);
    subgroup.push_back(std::move(g));
  }
  return subgroup;
}

}  // namespace gsc
