#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "gsc/dirichlet.hpp"

namespace gsc {

struct LevelEntry {
  int level = 0;
  std::int64_t cells = 0;
  double energy = 0.0;    // face-to-face energy of the symmetrized solution
  double residual = 0.0;
  std::int64_t iterations = 0;
  double presym_asymmetry = 0.0;
};

/// Quantities tied to one consecutive level pair (n, n+1).
struct RatioEntry {
  int from_level = 0;
  double ratio = 0.0;        // E_{n+1} / E_n, the conductance ratio estimate
  double dw_estimate = 0.0;  // log_l(#S / ratio)
  double margin = 0.0;       // #S / l^2 - ratio; positive iff dw_estimate > 2
  double glue_energy = 0.0;  // energy of the level-n solution glued to level n+1
  double glue_gap_abs = 0.0; // glue_energy - E_{n+1}
  double glue_gap_rel = 0.0;
  double scaling_identity_rel_err = 0.0;  // |glue - (#S/l^2) E_n| / glue
};

enum class IncompleteKind { none, budget, numerical };

struct ScalingReport {
  int d = 0;
  int l = 0;
  std::int64_t s_count = 0;
  double conductance_bound = 0.0;  // #S / l^2
  double tol = 0.0;
  std::int64_t cell_budget = 0;
  std::vector<LevelEntry> levels;
  std::vector<RatioEntry> ratios;
  bool complete = true;
  IncompleteKind incomplete_kind = IncompleteKind::none;
  std::string incomplete_reason;
};

struct ScalingOptions {
  double tol = 1e-10;
  std::int64_t cell_budget = kDefaultCellBudget;
};

/// Solves the axis-0 face problem at levels 1..n_max, forming conductance
/// ratios, walk-dimension estimates, margins against #S/l^2, and the gaps
/// between glued and freshly solved energies. Budget or convergence
/// failures stop the sequence and flag the report incomplete instead of
/// throwing.
ScalingReport resistance_sequence(const CarpetSpec& spec, int n_max,
                                  const ScalingOptions& opt = {});

struct WitnessVerdict {
  bool pass = false;
  double min_margin = 0.0;
  double min_glue_gap_abs = 0.0;
  double min_glue_gap_rel = 0.0;
  std::string detail;
};

/// Strict inequality witness: every ratio below #S/l^2 AND every glued
/// energy strictly above the fresh solve. Requires a complete report with
/// at least two levels.
WitnessVerdict dw_witness(const ScalingReport& report);

struct WalkStats {
  int level = 0;
  std::int64_t trials = 0;
  std::uint64_t seed = 0;
  double mean_steps = 0.0;
  double std_error = 0.0;
  std::int64_t max_steps = 0;
};

struct WalkOptions {
  int threads = 0;  // 0: hardware concurrency
  std::int64_t cell_budget = kDefaultCellBudget;
  std::int64_t step_guard = 1'000'000'000;
};

/// Simple random walk on the level-n cell graph, started uniformly on the
/// axis-0 lower face, absorbed on first contact with the upper face.
/// Byte-reproducible for a fixed seed regardless of thread count.
WalkStats random_walk_crossing(const CarpetSpec& spec, int level, std::int64_t trials,
                               std::uint64_t seed, const WalkOptions& opt = {});

class SplitMix64;

/// Steps of one walk until first contact with an absorbing cell; 0 when the
/// start is already absorbing. Throws after step_guard steps.
std::int64_t single_walk_steps(const Csr& adjacency, std::span<const std::uint8_t> absorbing,
                               std::int32_t start, SplitMix64& rng,
                               std::int64_t step_guard);

struct ConcentrationPoint {
  double fraction = 0.0;     // energy share
  std::int64_t cells = 0;    // minimal number of coarse cells carrying it
  double mu_mass = 0.0;      // cells * (#S)^-m
};

struct EnergyProfile {
  int coarsen_level = 0;
  bool empty = false;  // zero total energy: no attribution possible
  double total_energy = 0.0;
  std::vector<std::int64_t> cell_codes;  // level-m origins (base l^m encoding)
  std::vector<double> masses;            // normalized energy share per cell
  std::array<ConcentrationPoint, 3> curve;  // q = 0.5, 0.9, 0.99
};

/// Attributes each edge's energy to the level-m ancestors of its endpoints,
/// split half/half across a cell boundary. This matches the discrete
/// product-rule pairing E(u v, u) - E(v, u^2)/2 with v the indicator of a
/// coarse cell.
EnergyProfile energy_profile(const CellGraph& graph, std::span<const double> values,
                             int coarsen_level);

}  // namespace gsc
