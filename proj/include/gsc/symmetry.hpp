#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace gsc {

/// Isometry of the discrete d-cube: a coordinate permutation followed by
/// per-coordinate reflections. Acting on an index tuple with entries in
/// [0, side):
///
///   out[k] = flips[k] ? side - 1 - in[perm[k]] : in[perm[k]]
///
/// The set of all such maps is the hyperoctahedral group of order 2^d * d!.
struct CubeSymmetry {
  std::vector<std::uint8_t> perm;
  std::vector<std::uint8_t> flips;

  int dim() const { return static_cast<int>(perm.size()); }
  bool is_identity() const;

  void apply(std::span<const std::int32_t> in, std::span<std::int32_t> out,
             std::int64_t side) const;
  std::vector<std::int32_t> apply(std::span<const std::int32_t> in, std::int64_t side) const;

  /// Composition: (a * b)(x) == a(b(x)).
  friend CubeSymmetry operator*(const CubeSymmetry& a, const CubeSymmetry& b);
  CubeSymmetry inverse() const;

  bool operator==(const CubeSymmetry&) const = default;
};

CubeSymmetry identity_symmetry(int d);

/// All 2^d * d! cube symmetries, identity first, in a fixed deterministic
/// order. Rejects d < 1.
std::vector<CubeSymmetry> enumerate_cube_group(int d);

/// The 2^(d-1) reflections that fix the given axis (no coordinate
/// permutation, no flip of `axis`). Includes the identity. This is the
/// subgroup used to symmetrize face-to-face harmonic solutions.
std::vector<CubeSymmetry> axis_fixing_reflections(int d, int axis);

}  // namespace gsc
