#include "gsc/scaling.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <numeric>
#include <stdexcept>
#include <thread>

#include "gsc/errors.hpp"
#include "gsc/rng.hpp"

namespace gsc {

namespace {

double pairwise_sum(std::span<const double> v, std::size_t lo, std::size_t hi) {
  if (hi - lo <= 128) {
    double s = 0.0;
    for (std::size_t i = lo; i < hi; ++i) s += v[i];
    return s;
  }
  const std::size_t mid = lo + (hi - lo) / 2;
  return pairwise_sum(v, lo, mid) + pairwise_sum(v, mid, hi);
}

double pairwise_sum(std::span<const double> v) { return pairwise_sum(v, 0, v.size()); }

}  // namespace

ScalingReport resistance_sequence(const CarpetSpec& spec, int n_max, const ScalingOptions& opt) {
  if (n_max < 1) throw std::invalid_argument("resistance_sequence: n_max must be >= 1");
  ScalingReport report;
  report.d = spec.d;
  report.l = spec.l;
  report.s_count = spec.count();
  report.conductance_bound =
      static_cast<double>(spec.count()) / (static_cast<double>(spec.l) * spec.l);
  report.tol = opt.tol;
  report.cell_budget = opt.cell_budget;

  std::unique_ptr<CellGraph> prev_graph;
  std::unique_ptr<HarmonicSolution> prev_sol;
  const double log_l = std::log(static_cast<double>(spec.l));

  for (int n = 1; n <= n_max; ++n) {
    std::unique_ptr<CellGraph> graph;
    std::unique_ptr<HarmonicSolution> sol;
    try {
      graph = std::make_unique<CellGraph>(
          build_cell_graph(spec, n, GraphOptions{opt.cell_budget, false}));
      sol = std::make_unique<HarmonicSolution>(
          solve_face_problem(*graph, 0, SolveOptions{opt.tol, 0}));
    } catch (const BudgetError& e) {
      report.complete = false;
      report.incomplete_kind = IncompleteKind::budget;
      report.incomplete_reason = std::string("level ") + std::to_string(n) + ": " + e.what();
      return report;
    } catch (const ConvergenceError& e) {
      report.complete = false;
      report.incomplete_kind = IncompleteKind::numerical;
      report.incomplete_reason = std::string("level ") + std::to_string(n) + ": " + e.what();
      return report;
    }

    report.levels.push_back(LevelEntry{n, graph->cell_count(), sol->energy, sol->residual,
                                       sol->iterations, sol->presym_asymmetry});

    if (prev_graph) {
      const std::vector<double> glued = glue_harmonic(*prev_sol, *prev_graph, *graph);
      const double glue_energy = energy(face_energy_form(*graph), glued);
      RatioEntry entry;
      entry.from_level = n - 1;
      const double e_prev = prev_sol->energy;
      entry.ratio = sol->energy / e_prev;
      entry.dw_estimate =
          std::log(static_cast<double>(spec.count()) / entry.ratio) / log_l;
      entry.margin = report.conductance_bound - entry.ratio;
      entry.glue_energy = glue_energy;
      entry.glue_gap_abs = glue_energy - sol->energy;
      entry.glue_gap_rel = glue_energy > 0.0 ? entry.glue_gap_abs / glue_energy : 0.0;
      const double predicted = report.conductance_bound * e_prev;
      entry.scaling_identity_rel_err =
          glue_energy > 0.0 ? std::abs(glue_energy - predicted) / glue_energy : 0.0;
      report.ratios.push_back(entry);
    }
    prev_graph = std::move(graph);
    prev_sol = std::move(sol);
  }
  return report;
}

WitnessVerdict dw_witness(const ScalingReport& report) {
  if (!report.complete) {
    throw std::invalid_argument("dw_witness: report is incomplete (" +
                                report.incomplete_reason + ")");
  }
  if (report.levels.size() < 2) {
    throw std::invalid_argument("dw_witness: need at least two levels for a ratio");
  }
  WitnessVerdict verdict;
  verdict.pass = true;
  verdict.min_margin = std::numeric_limits<double>::infinity();
  verdict.min_glue_gap_abs = std::numeric_limits<double>::infinity();
  verdict.min_glue_gap_rel = std::numeric_limits<double>::infinity();
  for (const RatioEntry& e : report.ratios) {
    verdict.min_margin = std::min(verdict.min_margin, e.margin);
    verdict.min_glue_gap_abs = std::min(verdict.min_glue_gap_abs, e.glue_gap_abs);
    verdict.min_glue_gap_rel = std::min(verdict.min_glue_gap_rel, e.glue_gap_rel);
    if (!(e.margin > 0.0)) {
      verdict.pass = false;
      verdict.detail = "ratio at level " + std::to_string(e.from_level) +
                       " does not stay strictly below #S/l^2";
    } else if (!(e.glue_gap_abs > 0.0)) {
      verdict.pass = false;
      verdict.detail = "glued energy at level " + std::to_string(e.from_level + 1) +
                       " is not strictly above the harmonic energy";
    }
  }
  return verdict;
}

std::int64_t single_walk_steps(const Csr& adjacency, std::span<const std::uint8_t> absorbing,
                               std::int32_t start, SplitMix64& rng,
                               std::int64_t step_guard) {
  std::int32_t cell = start;
  std::int64_t count = 0;
  while (!absorbing[cell]) {
    const auto row = adjacency.row(cell);
    cell = row[rng.bounded(row.size())];
    ++count;
    if (count >= step_guard) {
      throw Error("random walk: step guard of " + std::to_string(step_guard) + " reached");
    }
  }
  return count;
}

WalkStats random_walk_crossing(const CarpetSpec& spec, int level, std::int64_t trials,
                               std::uint64_t seed, const WalkOptions& opt) {
  if (trials < 1) throw std::invalid_argument("random_walk_crossing: trials must be >= 1");
  const CellGraph graph = build_cell_graph(spec, level, GraphOptions{opt.cell_budget, false});
  const Csr csr = face_adjacency_csr(graph);
  const FaceSet start_face = face_cells(graph, 0, 0);
  const FaceSet absorb_face = face_cells(graph, 0, 1);
  if (start_face.cells.empty() || absorb_face.cells.empty()) {
    throw std::invalid_argument("random_walk_crossing: empty face");
  }
  std::vector<std::uint8_t> absorbing(graph.cell_count(), 0);
  for (const std::int32_t c : absorb_face.cells) absorbing[c] = 1;

  std::vector<double> steps(trials, 0.0);
  const std::uint64_t n_start = start_face.cells.size();

  auto run_range = [&](std::int64_t lo, std::int64_t hi) {
    for (std::int64_t t = lo; t < hi; ++t) {
      SplitMix64 rng = trial_rng(seed, static_cast<std::uint64_t>(t));
      const std::int32_t start = start_face.cells[rng.bounded(n_start)];
      steps[t] =
          static_cast<double>(single_walk_steps(csr, absorbing, start, rng, opt.step_guard));
    }
  };

  int threads = opt.threads > 0 ? opt.threads
                                : static_cast<int>(std::thread::hardware_concurrency());
  if (threads < 1) threads = 1;
  threads = static_cast<int>(std::min<std::int64_t>(threads, trials));
  if (threads == 1) {
    run_range(0, trials);
  } else {
    const std::int64_t chunk = (trials + threads - 1) / threads;
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errors(threads);
    for (int w = 0; w < threads; ++w) {
      const std::int64_t lo = w * chunk;
      const std::int64_t hi = std::min<std::int64_t>(trials, lo + chunk);
      if (lo >= hi) break;
      pool.emplace_back([&, w, lo, hi] {
        try {
          run_range(lo, hi);
        } catch (...) {
          errors[w] = std::current_exception();
        }
      });
    }
    for (auto& th : pool) th.join();
    for (const auto& err : errors) {
      if (err) std::rethrow_exception(err);
    }
  }

  WalkStats stats;
  stats.level = level;
  stats.trials = trials;
  stats.seed = seed;
  stats.mean_steps = pairwise_sum(steps) / static_cast<double>(trials);
  std::vector<double> sq(trials);
  for (std::int64_t t = 0; t < trials; ++t) {
    const double dev = steps[t] - stats.mean_steps;
    sq[t] = dev * dev;
  }
  const double variance =
      trials > 1 ? pairwise_sum(sq) / static_cast<double>(trials - 1) : 0.0;
  stats.std_error = std::sqrt(variance / static_cast<double>(trials));
  stats.max_steps = static_cast<std::int64_t>(*std::max_element(steps.begin(), steps.end()));
  return stats;
}

EnergyProfile energy_profile(const CellGraph& graph, std::span<const double> values,
                             int coarsen_level) {
  const int m = coarsen_level;
  if (m < 0 || m >= graph.level) {
    throw std::invalid_argument("energy_profile: coarsening level must satisfy 0 <= m < level");
  }
  EnergyProfile profile;
  profile.coarsen_level = m;

  const EnergyForm form = face_energy_form(graph);
  profile.total_energy = energy(form, values);

  // Level-m cell codes. m = 0 is the single root cell.
  std::int64_t coarse_side = 1;
  for (int t = 0; t < m; ++t) coarse_side *= graph.spec.l;
  std::vector<std::int64_t> codes;
  if (m == 0) {
    codes.push_back(0);
  } else {
    const CellGraph coarse = build_cell_graph(graph.spec, m);
    codes = coarse.codes;
  }
  profile.cell_codes = codes;

  const std::array<double, 3> fractions{0.5, 0.9, 0.99};
  if (profile.total_energy <= 0.0) {
    profile.empty = true;
    profile.masses.assign(codes.size(), 0.0);
    for (std::size_t qi = 0; qi < fractions.size(); ++qi) {
      profile.curve[qi] = ConcentrationPoint{fractions[qi], 0, 0.0};
    }
    return profile;
  }

  const int d = graph.d();
  const std::int64_t fine_per_coarse = graph.side / coarse_side;
  std::vector<double> mass(codes.size(), 0.0);
  Tuple anc(d);
  auto ancestor_slot = [&](std::int32_t cell) {
    const auto origin = graph.origin(cell);
    for (int k = 0; k < d; ++k) {
      anc[k] = static_cast<std::int32_t>(origin[k] / fine_per_coarse);
    }
    const std::int64_t code = encode_tuple(anc, coarse_side);
    const auto it = std::lower_bound(codes.begin(), codes.end(), code);
    return static_cast<std::size_t>(it - codes.begin());
  };
  for (const auto& [a, b] : form.edges) {
    const double diff = values[a] - values[b];
    const double e = diff * diff;
    const std::size_t wa = ancestor_slot(a);
    const std::size_t wb = ancestor_slot(b);
    if (wa == wb) {
      mass[wa] += e;
    } else {
      mass[wa] += 0.5 * e;
      mass[wb] += 0.5 * e;
    }
  }
  const double total_mass = pairwise_sum(mass);
  profile.masses.resize(mass.size());
  for (std::size_t i = 0; i < mass.size(); ++i) profile.masses[i] = mass[i] / total_mass;

  // Greedy concentration: heaviest cells first.
  std::vector<std::size_t> order(mass.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (profile.masses[a] != profile.masses[b]) return profile.masses[a] > profile.masses[b];
    return a < b;
  });
  double mu_per_cell = 1.0;
  for (int t = 0; t < m; ++t) mu_per_cell /= static_cast<double>(graph.spec.count());
  for (std::size_t qi = 0; qi < fractions.size(); ++qi) {
    const double q = fractions[qi];
    double acc = 0.0;
    std::int64_t taken = 0;
    for (const std::size_t idx : order) {
      acc += profile.masses[idx];
      ++taken;
      if (acc >= q * (1.0 - 1e-12)) break;
    }
    profile.curve[qi] =
        ConcentrationPoint{q, taken, static_cast<double>(taken) * mu_per_cell};
  }
  return profile;
}

}  // namespace gsc
