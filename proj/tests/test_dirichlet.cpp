#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>

#include "gsc/dirichlet.hpp"
#include "gsc/errors.hpp"
#include "gsc/rng.hpp"
#include "frozen.hpp"
#include "oracles.hpp"

using namespace gsc;
using frozen::kScLevel2Energy;

namespace {

double rel_diff(double a, double b) {
  const double scale = std::max(std::abs(a), std::abs(b));
  return scale == 0.0 ? 0.0 : std::abs(a - b) / scale;
}

std::int32_t cell_at(const CellGraph& g, const Tuple& origin) {
  const std::int32_t idx = g.index_of_code(encode_tuple(origin, g.side));
  REQUIRE(idx >= 0);
  return idx;
}

}  // namespace

TEST_CASE("energy basics on the 8-ring") {
  const CellGraph g = build_cell_graph(builtin_sierpinski_carpet(), 1);
  const EnergyForm form = face_energy_form(g);

  std::vector<double> constant(8, 0.37);
  CHECK(energy(form, constant) == 0.0);

  // indicator of the right column: exactly the two cross edges contribute
  std::vector<double> indicator(8, 0.0);
  for (const std::int32_t c : face_cells(g, 0, 1).cells) indicator[c] = 1.0;
  CHECK(energy(form, indicator) == 2.0);

  // invariance under any automorphism
  for (const CubeSymmetry& sym : enumerate_cube_group(2)) {
    const auto perm = symmetry_permutation(g, sym);
    std::vector<double> permuted(8);
    for (std::int32_t i = 0; i < 8; ++i) permuted[perm[i]] = indicator[i];
    CHECK(energy(form, permuted) == 2.0);
  }
}

TEST_CASE("series-parallel base case: unit energy and unit resistance") {
  const CellGraph g = build_cell_graph(builtin_sierpinski_carpet(), 1);
  const HarmonicSolution sol = solve_face_problem(g, 0);
  CHECK(std::abs(sol.energy - 1.0) < 1e-12);
  CHECK(std::abs(effective_resistance(g, 0) - 1.0) < 1e-12);
  // the two free cells sit exactly in the middle
  CHECK(std::abs(sol.values[cell_at(g, {1, 0})] - 0.5) < 1e-12);
  CHECK(std::abs(sol.values[cell_at(g, {1, 2})] - 0.5) < 1e-12);
  CHECK(sol.residual <= sol.tol);
}

TEST_CASE("fully pinned system has no free variables") {
  const CellGraph g = build_cell_graph(builtin_sierpinski_carpet(), 1);
  const EnergyForm form = face_energy_form(g);
  const FaceSet right = face_cells(g, 0, 1);
  FaceSet rest;
  rest.axis = 0;
  rest.side = 0;
  for (std::int32_t i = 0; i < g.cell_count(); ++i) {
    if (!std::binary_search(right.cells.begin(), right.cells.end(), i)) {
      rest.cells.push_back(i);
    }
  }
  const HarmonicSolution sol = solve_harmonic(form, rest, right);
  CHECK(sol.iterations == 0);
  CHECK(sol.residual == 0.0);
  std::vector<double> indicator(8, 0.0);
  for (const std::int32_t c : right.cells) indicator[c] = 1.0;
  CHECK(sol.energy == energy(form, indicator));
}

TEST_CASE("iterative solve matches the dense oracle") {
  struct Case {
    CarpetSpec spec;
    int max_level;
  };
  const Case cases[] = {
      {builtin_sierpinski_carpet(), 3},
      {builtin_menger_sponge(), 2},
      {gen_counterexample(3, 2), 1},
  };
  for (const auto& [spec, max_level] : cases) {
    for (int level = 1; level <= max_level; ++level) {
      const CellGraph g = build_cell_graph(spec, level);
      const auto dense =
          oracles::dense_harmonic_oracle(g, face_cells(g, 0, 0).cells, face_cells(g, 0, 1).cells);
      const HarmonicSolution sol = solve_face_problem(g, 0);
      CHECK(rel_diff(sol.energy, dense.energy) < 1e-8);
      for (std::int64_t i = 0; i < g.cell_count(); ++i) {
        CHECK(std::abs(sol.values[i] - dense.values[i]) < 1e-7);
      }
    }
  }
}

TEST_CASE("frozen oracle energies for the carpet") {
  // Dense-solve values, frozen after the first verified run.
  const CarpetSpec sc = builtin_sierpinski_carpet();
  const CellGraph g2 = build_cell_graph(sc, 2);
  const auto dense =
      oracles::dense_harmonic_oracle(g2, face_cells(g2, 0, 0).cells, face_cells(g2, 0, 1).cells);
  CHECK(rel_diff(dense.energy, kScLevel2Energy) < 1e-12);
  const HarmonicSolution sol = solve_face_problem(g2, 0);
  CHECK(rel_diff(sol.energy, kScLevel2Energy) < 1e-8);
}

TEST_CASE("maximum principle and interior extrema") {
  for (const CarpetSpec& spec : {builtin_sierpinski_carpet(), builtin_menger_sponge()}) {
    const int max_level = spec.d == 2 ? 3 : 2;
    for (int level = 1; level <= max_level; ++level) {
      const CellGraph g = build_cell_graph(spec, level);
      const HarmonicSolution sol = solve_face_problem(g, 0);
      std::vector<std::uint8_t> pinned(g.cell_count(), 0);
      for (const std::int32_t c : sol.boundary0.cells) pinned[c] = 1;
      for (const std::int32_t c : sol.boundary1.cells) pinned[c] = 1;
      const Csr csr = face_adjacency_csr(g);
      for (std::int64_t i = 0; i < g.cell_count(); ++i) {
        CHECK(sol.values[i] >= 0.0);
        CHECK(sol.values[i] <= 1.0);
        if (pinned[i]) continue;
        double lo = 1.0, hi = 0.0;
        for (const std::int32_t nb : csr.row(static_cast<std::int32_t>(i))) {
          lo = std::min(lo, sol.values[nb]);
          hi = std::max(hi, sol.values[nb]);
        }
        CHECK(sol.values[i] >= lo - 1e-8);
        CHECK(sol.values[i] <= hi + 1e-8);
      }
    }
  }
}

TEST_CASE("weak harmonicity against sparse test functions") {
  const CellGraph g = build_cell_graph(builtin_sierpinski_carpet(), 3);
  const EnergyForm form = face_energy_form(g);
  const HarmonicSolution sol = solve_face_problem(g, 0);
  std::vector<std::uint8_t> pinned(g.cell_count(), 0);
  for (const std::int32_t c : sol.boundary0.cells) pinned[c] = 1;
  for (const std::int32_t c : sol.boundary1.cells) pinned[c] = 1;

  SplitMix64 rng(2024);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<double> v(g.cell_count(), 0.0);
    double l1 = 0.0;
    for (std::int64_t i = 0; i < g.cell_count(); ++i) {
      if (pinned[i] || rng.bounded(10) != 0) continue;
      v[i] = static_cast<double>(rng.bounded(2001)) / 1000.0 - 1.0;
      l1 += std::abs(v[i]);
    }
    const double pairing = energy_pairing(form, sol.values, v);
    CHECK(std::abs(pairing) <= sol.residual * l1 + 1e-12);
  }
}

TEST_CASE("symmetrization") {
  const CellGraph g = build_cell_graph(builtin_sierpinski_carpet(), 1);
  const auto g1 = axis_fixing_reflections(2, 0);

  // an already invariant function only gets clamped
  std::vector<double> invariant(8, 0.25);
  invariant[cell_at(g, {1, 0})] = 1.75;
  invariant[cell_at(g, {1, 2})] = 1.75;
  const auto sym = symmetrize(g, invariant, g1);
  CHECK(sym[cell_at(g, {1, 0})] == 1.0);
  CHECK(sym[cell_at(g, {1, 2})] == 1.0);
  CHECK(sym[cell_at(g, {0, 1})] == 0.25);

  // identity subgroup: clamping only
  std::vector<double> wild(8, -0.5);
  wild[0] = 2.0;
  const auto clamped = symmetrize(g, wild, {identity_symmetry(2)});
  CHECK(clamped[0] == 1.0);
  CHECK(clamped[1] == 0.0);

  // two-element orbit average of an indicator
  std::vector<double> indicator(8, 0.0);
  indicator[cell_at(g, {1, 0})] = 1.0;
  const auto averaged = symmetrize(g, indicator, g1);
  CHECK(averaged[cell_at(g, {1, 0})] == 0.5);
  CHECK(averaged[cell_at(g, {1, 2})] == 0.5);
  for (const Tuple& t : {Tuple{0, 0}, Tuple{0, 1}, Tuple{0, 2}, Tuple{2, 0}}) {
    CHECK(averaged[cell_at(g, t)] == 0.0);
  }

  // energy does not increase, invariance is bitwise
  const CellGraph g2 = build_cell_graph(builtin_sierpinski_carpet(), 2);
  const EnergyForm form2 = face_energy_form(g2);
  SplitMix64 rng(5);
  std::vector<double> random(g2.cell_count());
  for (double& x : random) x = static_cast<double>(rng.bounded(3000)) / 1000.0 - 1.0;
  std::vector<double> random_clamped = random;
  for (double& x : random_clamped) x = std::clamp(x, 0.0, 1.0);
  const auto subgroup = axis_fixing_reflections(2, 0);
  const auto symmetrized = symmetrize(g2, random, subgroup);
  CHECK(energy(form2, symmetrized) <= energy(form2, random_clamped) + 1e-12);
  for (const CubeSymmetry& s : subgroup) {
    const auto perm = symmetry_permutation(g2, s);
    for (std::int64_t i = 0; i < g2.cell_count(); ++i) {
      CHECK(symmetrized[i] == symmetrized[perm[i]]);
    }
  }

  // a non-automorphism is rejected with a witness error
  const CarpetSpec row = CarpetSpec::create(2, 3, {{0, 0}, {1, 0}, {2, 0}});
  const CellGraph row_graph = build_cell_graph(row, 1);
  CubeSymmetry flip_y = identity_symmetry(2);
  flip_y.flips[1] = 1;
  std::vector<double> u(row_graph.cell_count(), 0.0);
  CHECK_THROWS_AS(symmetrize(row_graph, u, {flip_y}), SpecError);
}

TEST_CASE("face pipeline produces exactly invariant solutions") {
  for (const CarpetSpec& spec : {builtin_sierpinski_carpet(), builtin_menger_sponge()}) {
    const CellGraph g = build_cell_graph(spec, 2);
    const HarmonicSolution sol = solve_face_problem(g, 0);
    CHECK(sol.symmetrized);
    CHECK(sol.presym_asymmetry <= 1e-8);
    CHECK(sol.residual <= sol.tol);
    for (const std::int32_t c : sol.boundary0.cells) CHECK(sol.values[c] == 0.0);
    for (const std::int32_t c : sol.boundary1.cells) CHECK(sol.values[c] == 1.0);
    for (const CubeSymmetry& s : axis_fixing_reflections(spec.d, 0)) {
      const auto perm = symmetry_permutation(g, s);
      for (std::int64_t i = 0; i < g.cell_count(); ++i) {
        CHECK(sol.values[i] == sol.values[perm[i]]);
      }
    }
  }
}

TEST_CASE("gluing: formula, exact scaling, and failure modes") {
  const CarpetSpec sc = builtin_sierpinski_carpet();
  const CellGraph g1 = build_cell_graph(sc, 1);
  const CellGraph g2 = build_cell_graph(sc, 2);
  const HarmonicSolution h0 = solve_face_problem(g1, 0);

  // m = 0 returns the base values
  CHECK(glue_harmonic(h0, g1, g1) == h0.values);

  // direct formula check at m = 1: value = (h0(v) + first outer digit) / 3
  const auto glued = glue_harmonic(h0, g1, g2);
  for (std::int64_t i = 0; i < g2.cell_count(); ++i) {
    const auto o = g2.origin(static_cast<std::int32_t>(i));
    const Tuple inner{o[0] % 3, o[1] % 3};
    const Tuple outer{o[0] / 3, o[1] / 3};
    const double expected =
        (h0.values[g1.index_of_code(encode_tuple(inner, 3))] + outer[0]) / 3.0;
    CHECK(glued[i] == doctest::Approx(expected).epsilon(1e-14));
  }

  // exact scaling: E_2(glued) = (#S / l^2) E_1
  const double e_glued = energy(face_energy_form(g2), glued);
  CHECK(rel_diff(e_glued, (8.0 / 9.0) * h0.energy) < 1e-12);

  // glued boundary values are exact, so it competes in the level-2 problem
  const HarmonicSolution h2 = solve_face_problem(g2, 0);
  CHECK(h2.energy <= e_glued);
  CHECK(h2.energy < e_glued);  // strict: the glued function is not harmonic

  // two-level glue mirrors the repeated one-level identity, and the fresh
  // solve strictly beats the two-level glued competitor as well
  const CellGraph g3 = build_cell_graph(sc, 3);
  const auto glued3 = glue_harmonic(h0, g1, g3);
  const double e_glued3 = energy(face_energy_form(g3), glued3);
  CHECK(rel_diff(e_glued3, (8.0 / 9.0) * (8.0 / 9.0) * h0.energy) < 1e-12);
  const HarmonicSolution h3 = solve_face_problem(g3, 0);
  CHECK(h3.energy < e_glued3);

  // menger: one level
  const CarpetSpec ms = builtin_menger_sponge();
  const CellGraph m1 = build_cell_graph(ms, 1);
  const CellGraph m2 = build_cell_graph(ms, 2);
  const HarmonicSolution mh0 = solve_face_problem(m1, 0);
  const double me_glued = energy(face_energy_form(m2), glue_harmonic(mh0, m1, m2));
  CHECK(rel_diff(me_glued, (20.0 / 9.0) * mh0.energy) < 1e-12);

  // wrong boundary orientation is rejected
  const HarmonicSolution sideways = solve_face_problem(g1, 1);
  CHECK_THROWS_AS(glue_harmonic(sideways, g1, g2), Error);

  // broken boundary pinning is rejected
  HarmonicSolution tampered = h0;
  tampered.values[tampered.boundary0.cells[0]] = 0.25;
  CHECK_THROWS_AS(glue_harmonic(tampered, g1, g2), Error);

  // broken reflection symmetry is rejected
  HarmonicSolution skewed = h0;
  skewed.values[cell_at(g1, {1, 0})] = 0.4;
  skewed.values[cell_at(g1, {1, 2})] = 0.6;
  CHECK_THROWS_AS(glue_harmonic(skewed, g1, g2), Error);
}

TEST_CASE("resistance is monotone under edge deletion") {
  const CellGraph g = build_cell_graph(builtin_sierpinski_carpet(), 1);
  const double base = effective_resistance(g, 0);
  // delete one cross edge of the lower path
  const std::pair<std::int32_t, std::int32_t> removed{cell_at(g, {1, 0}), cell_at(g, {2, 0})};
  std::vector<std::pair<std::int32_t, std::int32_t>> edges;
  for (const auto& e : g.face_edges) {
    if (e != removed && e != std::make_pair(removed.second, removed.first)) edges.push_back(e);
  }
  REQUIRE(edges.size() == g.face_edges.size() - 1);
  const EnergyForm pruned{&g, edges};
  const double r =
      effective_resistance(pruned, face_cells(g, 0, 0), face_cells(g, 0, 1), SolveOptions{});
  CHECK(r >= base - 1e-12);
  CHECK(std::abs(r - 2.0) < 1e-10);  // single two-edge path remains
}

TEST_CASE("resistance agrees across axes by symmetry") {
  const CellGraph g = build_cell_graph(builtin_sierpinski_carpet(), 2);
  const double r0 = effective_resistance(g, 0);
  const double r1 = effective_resistance(g, 1);
  CHECK(rel_diff(r0, r1) < 1e-9);

  const CellGraph m = build_cell_graph(builtin_menger_sponge(), 2);
  const double m0 = effective_resistance(m, 0);
  for (int axis = 1; axis < 3; ++axis) {
    CHECK(rel_diff(effective_resistance(m, axis), m0) < 1e-9);
  }
}

TEST_CASE("decoupled faces give the infinite-resistance signal") {
  const CellGraph g = build_cell_graph(builtin_sierpinski_carpet(), 1);
  // cut both cross edges to the right column
  const std::pair<std::int32_t, std::int32_t> cut1{cell_at(g, {1, 0}), cell_at(g, {2, 0})};
  const std::pair<std::int32_t, std::int32_t> cut2{cell_at(g, {1, 2}), cell_at(g, {2, 2})};
  std::vector<std::pair<std::int32_t, std::int32_t>> edges;
  for (const auto& e : g.face_edges) {
    if (e != cut1 && e != cut2) edges.push_back(e);
  }
  REQUIRE(edges.size() == g.face_edges.size() - 2);
  const EnergyForm pruned{&g, edges};
  const double r =
      effective_resistance(pruned, face_cells(g, 0, 0), face_cells(g, 0, 1), SolveOptions{});
  CHECK(std::isinf(r));
}

TEST_CASE("solver error paths") {
  const CellGraph g = build_cell_graph(builtin_sierpinski_carpet(), 3);
  const EnergyForm form = face_energy_form(g);
  const FaceSet b0 = face_cells(g, 0, 0);
  const FaceSet b1 = face_cells(g, 0, 1);

  CHECK_THROWS_AS(solve_harmonic(form, b0, b0, SolveOptions{}), std::invalid_argument);
  CHECK_THROWS_AS(solve_harmonic(form, FaceSet{}, b1, SolveOptions{}), std::invalid_argument);

  try {
    solve_harmonic(form, b0, b1, SolveOptions{1e-10, 2});
    FAIL("expected ConvergenceError");
  } catch (const ConvergenceError& e) {
    CHECK(e.best_residual > 0.0);
    CHECK(e.iterations == 2);
  }
}
