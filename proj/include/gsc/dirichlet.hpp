#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "gsc/cell_graph.hpp"

namespace gsc {

/// Quadratic energy E(u) = sum over edges (u_a - u_b)^2. The edge list
/// defaults to the graph's facet edges; tests may substitute a modified
/// list (the view must outlive the form).
struct EnergyForm {
  const CellGraph* graph = nullptr;
  std::span<const std::pair<std::int32_t, std::int32_t>> edges;
};

EnergyForm face_energy_form(const CellGraph& graph);

/// Energy with a deterministic pairwise reduction over the edge list.
double energy(const EnergyForm& form, std::span<const double> u);

/// Bilinear pairing sum over edges (u_a - u_b)(v_a - v_b).
double energy_pairing(const EnergyForm& form, std::span<const double> u,
                      std::span<const double> v);

struct SolveOptions {
  double tol = 1e-10;             // max-norm residual target on free cells
  std::int64_t max_iterations = 0;  // 0: 50 * sqrt(#free), rounded up
};

struct HarmonicSolution {
  std::vector<double> values;
  FaceSet boundary0;  // pinned to 0
  FaceSet boundary1;  // pinned to 1
  double energy = 0.0;
  double residual = 0.0;  // max-norm Laplacian residual over free cells
  std::int64_t iterations = 0;
  double tol = 0.0;
  int level = 0;
  int free_components = 0;
  /// Max |u(a) - u(g a)| over the axis-fixing reflections, measured on the
  /// raw solve before symmetrization. Filled by solve_face_problem.
  double presym_asymmetry = 0.0;
  bool symmetrized = false;
};

/// Minimizes the energy subject to u = 0 on pin0 and u = 1 on pin1 by a
/// Jacobi-preconditioned conjugate gradient iteration on the free-cell
/// Laplacian. Free values are clamped to [0,1] afterwards (the exact
/// solution satisfies the maximum principle; clamping removes rounding
/// spill only). Deterministic for fixed inputs.
///
/// Throws ConvergenceError when the iteration cap is reached, and Error
/// when some free component has no pinned attachment at all.
HarmonicSolution solve_harmonic(const EnergyForm& form, const FaceSet& pin0,
                                const FaceSet& pin1, const SolveOptions& opt = {});

/// Clamp to [0,1], then average over the orbit of each cell under the
/// subgroup. The result is bitwise invariant under every induced
/// permutation. Throws SpecError when an element is not a graph
/// automorphism.
std::vector<double> symmetrize(const CellGraph& graph, std::span<const double> u,
                               const std::vector<CubeSymmetry>& subgroup);

/// Full face-to-face pipeline on one axis: solve between the two faces,
/// record the pre-symmetrization asymmetry, symmetrize under the
/// axis-fixing reflections, recompute energy and residual.
HarmonicSolution solve_face_problem(const CellGraph& graph, int axis,
                                    const SolveOptions& opt = {});

/// Self-similar extension of a base face solution to a finer graph of the
/// same carpet: the cell with address w.v (outer word w of length
/// m = fine.level - coarse.level) takes the value
///
///   (h0(v) + origin_0(w)) / l^m
///
/// i.e. a copy of h0 compressed into each outer cell and offset by the
/// cell's first-coordinate position. Requires h0 to be an axis-0 face
/// solution with exact 0/1 boundary values and exact reflection symmetry;
/// under those conditions every edge between copies carries zero energy and
/// the total energy scales by exactly (#S / l^2) per level.
std::vector<double> glue_harmonic(const HarmonicSolution& h0, const CellGraph& coarse,
                                  const CellGraph& fine);

/// Reciprocal of the minimal energy; +infinity when the faces decouple.
double effective_resistance(const EnergyForm& form, const FaceSet& pin0, const FaceSet& pin1,
                            const SolveOptions& opt = {});
double effective_resistance(const CellGraph& graph, int axis, const SolveOptions& opt = {});

}  // namespace gsc
