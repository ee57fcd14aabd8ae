#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "gsc/symmetry.hpp"

namespace gsc {

using Tuple = std::vector<std::int32_t>;

/// Mixed-radix encoding with coordinate 0 least significant:
/// code = sum_k t[k] * radix^k.
std::int64_t encode_tuple(std::span<const std::int32_t> t, std::int64_t radix);
Tuple decode_tuple(std::int64_t code, std::int64_t radix, int d);

/// A candidate carpet: d-dimensional unit cube, subdivided l-fold per axis,
/// keeping the cells listed in `cells`. Always a proper non-empty subset of
/// the full index cube, canonically ordered by integer encoding, duplicate
/// free. Construct through create(); the invariants hold for every live
/// instance.
struct CarpetSpec {
  int d = 0;
  int l = 0;
  std::vector<Tuple> cells;        // sorted by encode_tuple(., l)
  std::vector<std::int64_t> codes; // the matching sorted encodings

  static CarpetSpec create(int d, int l, std::vector<Tuple> cells);

  std::int64_t count() const { return static_cast<std::int64_t>(cells.size()); }
  bool contains(std::span<const std::int32_t> t) const;
  bool contains_code(std::int64_t code) const;
};

/// Address of one level-|letters| cell: a string of subdivision indices,
/// outermost first.
struct Word {
  std::vector<Tuple> letters;
  int level() const { return static_cast<int>(letters.size()); }
};

/// Integer corner coordinates of the cell addressed by w, at resolution
/// l^level: sum_t l^(m-t) * w_t. Dividing by l^level gives the geometric
/// lower corner of the cell exactly.
Tuple cell_origin(const Word& w, const CarpetSpec& spec);

// ---------------------------------------------------------------------------
// Axiom checks. Each verdict carries a concrete witness on failure.

struct SymmetryWitness {
  CubeSymmetry g;
  Tuple cell;
  Tuple image;  // g(cell), not a member of the cell set
};
struct SymmetryCheck {
  bool pass = false;
  std::optional<SymmetryWitness> witness;
};

struct ConnectivityWitness {
  Tuple cell_a;  // in one component
  Tuple cell_b;  // in another
};
struct ConnectednessCheck {
  bool pass = false;
  int components = 0;
  std::optional<ConnectivityWitness> witness;
};

enum class NdMethod { nd_m1, nd_2, ndf };
const char* nd_method_name(NdMethod m);
NdMethod nd_method_from_name(const std::string& name);

struct NdWitness {
  // For the block formulations: the failing block index (level-1 indices in
  // {1..l-1}^d or level-2 indices in {1..l^2-1}^d). For the path
  // formulation: the touching pair with no unit-step lattice path.
  Tuple block;
  std::optional<std::pair<Tuple, Tuple>> pair;
};
struct NdCheck {
  bool pass = false;
  NdMethod method = NdMethod::nd_2;
  std::optional<NdWitness> witness;
};

struct BorderWitness {
  int missing_index = -1;  // k with (k, 0, ..., 0) absent
};
struct BorderCheck {
  bool pass = false;
  std::optional<BorderWitness> witness;
};

struct Bb99Check {
  bool holds = false;                    // some slab count differs from slab 0
  std::vector<std::int64_t> slab_counts; // #cells with first coordinate == j
};

/// Cell set invariant under the full cube symmetry group.
SymmetryCheck check_symmetry(const CarpetSpec& spec);

/// Union of closed cells connected; adjacency means the closed cubes
/// intersect (max-norm distance of index tuples <= 1).
ConnectednessCheck check_connectedness(const CarpetSpec& spec);

/// Non-diagonality in one of its three equivalent formulations.
NdCheck check_nondiagonality(const CarpetSpec& spec, NdMethod method);

/// Bottom border row (k, 0, ..., 0), k in {0..l-1}, fully present.
BorderCheck check_border(const CarpetSpec& spec);

/// Slab-count criterion along the first coordinate: holds iff some slab
/// j in {1..l-1} has a cell count different from slab 0.
Bb99Check bb99_condition(const CarpetSpec& spec);

/// Slab counts along an arbitrary axis (symmetry property tests).
std::vector<std::int64_t> slab_counts(const CarpetSpec& spec, int axis);

struct ValidationReport {
  SymmetryCheck symmetry;
  ConnectednessCheck connectedness;
  NdCheck nondiagonality;
  BorderCheck border;
  Bb99Check bb99;  // informational, not part of the overall verdict

  bool all_pass() const {
    return symmetry.pass && connectedness.pass && nondiagonality.pass && border.pass;
  }
};

ValidationReport validate_spec(const CarpetSpec& spec, NdMethod method = NdMethod::nd_2);

/// The family that satisfies all four carpet axioms but has equal slab
/// counts in every coordinate. Requires d >= 3 and l_param >= 2; the
/// resulting subdivision factor is 2 * l_param * d.
CarpetSpec gen_counterexample(int d, int l_param);

CarpetSpec builtin_sierpinski_carpet();
CarpetSpec builtin_menger_sponge();

/// Resolve "sc", "menger" or "counterexample:D,L".
CarpetSpec builtin_spec(const std::string& name);

}  // namespace gsc
