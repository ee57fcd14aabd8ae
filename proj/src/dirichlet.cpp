#include "gsc/dirichlet.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "gsc/errors.hpp"

namespace gsc {

namespace {

constexpr std::size_t kLeafChunk = 128;

template <typename Term>
double pairwise_reduce(std::size_t lo, std::size_t hi, const Term& term) {
  if (hi - lo <= kLeafChunk) {
    double s = 0.0;
    for (std::size_t i = lo; i < hi; ++i) s += term(i);
    return s;
  }
  const std::size_t mid = lo + (hi - lo) / 2;
  return pairwise_reduce(lo, mid, term) + pairwise_reduce(mid, hi, term);
}

}  // namespace

EnergyForm face_energy_form(const CellGraph& graph) {
  return EnergyForm{&graph, graph.face_edges};
}

double energy(const EnergyForm& form, std::span<const double> u) {
  const auto& edges = form.edges;
  return pairwise_reduce(0, edges.size(), [&](std::size_t i) {
    const double diff = u[edges[i].first] - u[edges[i].second];
    return diff * diff;
  });
}

double energy_pairing(const EnergyForm& form, std::span<const double> u,
                      std::span<const double> v) {
  const auto& edges = form.edges;
  return pairwise_reduce(0, edges.size(), [&](std::size_t i) {
    return (u[edges[i].first] - u[edges[i].second]) *
           (v[edges[i].first] - v[edges[i].second]);
  });
}

namespace {

struct PinnedSystem {
  std::vector<std::int64_t> offsets;   // adjacency over form edges
  std::vector<std::int32_t> neighbors;
  std::vector<double> diag;            // degree of each cell
  std::vector<std::int32_t> free_index;  // cell -> free slot, -1 pinned
  std::vector<std::int32_t> free_cells;  // free slot -> cell
  std::vector<double> rhs;               // over free slots
};

PinnedSystem build_system(const EnergyForm& form, const FaceSet& pin0, const FaceSet& pin1) {
  const std::int64_t n = form.graph->cell_count();
  PinnedSystem sys;
  sys.offsets.assign(n + 1, 0);
  for (const auto& [a, b] : form.edges) {
    ++sys.offsets[a + 1];
    ++sys.offsets[b + 1];
  }
  for (std::int64_t i = 0; i < n; ++i) sys.offsets[i + 1] += sys.offsets[i];
  sys.neighbors.resize(sys.offsets[n]);
  std::vector<std::int64_t> cursor(sys.offsets.begin(), sys.offsets.end() - 1);
  for (const auto& [a, b] : form.edges) {
    sys.neighbors[cursor[a]++] = b;
    sys.neighbors[cursor[b]++] = a;
  }
  sys.diag.assign(n, 0.0);
  for (std::int64_t i = 0; i < n; ++i) {
    sys.diag[i] = static_cast<double>(sys.offsets[i + 1] - sys.offsets[i]);
  }

  sys.free_index.assign(n, 0);
  for (const std::int32_t c : pin0.cells) sys.free_index[c] = -1;
  for (const std::int32_t c : pin1.cells) sys.free_index[c] = -2;
  for (std::int64_t i = 0; i < n; ++i) {
    if (sys.free_index[i] >= 0) {
      sys.free_index[i] = static_cast<std::int32_t>(sys.free_cells.size());
      sys.free_cells.push_back(static_cast<std::int32_t>(i));
    }
  }
  // rhs[a] = number of pinned-to-1 neighbors of a.
  sys.rhs.assign(sys.free_cells.size(), 0.0);
  for (std::size_t f = 0; f < sys.free_cells.size(); ++f) {
    const std::int32_t cell = sys.free_cells[f];
    double b = 0.0;
    for (const std::int32_t nb : std::span(sys.neighbors)
                                     .subspan(sys.offsets[cell],
                                              sys.offsets[cell + 1] - sys.offsets[cell])) {
      if (sys.free_index[nb] == -2) b += 1.0;
    }
    sys.rhs[f] = b;
  }
  return sys;
}

}  // namespace

HarmonicSolution solve_harmonic(const EnergyForm& form, const FaceSet& pin0,
                                const FaceSet& pin1, const SolveOptions& opt) {
  if (pin0.cells.empty() || pin1.cells.empty()) {
    throw std::invalid_argument("solve_harmonic: boundary sets must be non-empty");
  }
  {
    std::vector<std::int32_t> inter;
    std::set_intersection(pin0.cells.begin(), pin0.cells.end(), pin1.cells.begin(),
                          pin1.cells.end(), std::back_inserter(inter));
    if (!inter.empty()) {
      throw std::invalid_argument("solve_harmonic: boundary sets must be disjoint");
    }
  }

  const CellGraph& graph = *form.graph;
  const std::int64_t n = graph.cell_count();
  PinnedSystem sys = build_system(form, pin0, pin1);
  const std::int64_t nfree = static_cast<std::int64_t>(sys.free_cells.size());

  HarmonicSolution sol;
  sol.boundary0 = pin0;
  sol.boundary1 = pin1;
  sol.tol = opt.tol;
  sol.level = graph.level;

  auto neighbor_span = [&](std::int32_t cell) {
    return std::span(sys.neighbors)
        .subspan(sys.offsets[cell], sys.offsets[cell + 1] - sys.offsets[cell]);
  };

  // Free components and their pinned attachments.
  {
    std::vector<std::uint8_t> seen(n, 0);
    std::vector<std::int32_t> stack;
    for (std::int64_t i = 0; i < n; ++i) {
      if (sys.free_index[i] < 0 || seen[i]) continue;
      ++sol.free_components;
      bool attached = false;
      stack.push_back(static_cast<std::int32_t>(i));
      seen[i] = 1;
      while (!stack.empty()) {
        const std::int32_t a = stack.back();
        stack.pop_back();
        for (const std::int32_t nb : neighbor_span(a)) {
          if (sys.free_index[nb] < 0) {
            attached = true;
          } else if (!seen[nb]) {
            seen[nb] = 1;
            stack.push_back(nb);
          }
        }
      }
      if (!attached) {
        throw Error("solve_harmonic: a free component has no boundary attachment "
                    "(isolated cell " + std::to_string(i) + ")");
      }
    }
  }

  std::vector<double> x(nfree, 0.0);
  std::int64_t iterations = 0;
  double best_residual = std::numeric_limits<double>::infinity();

  if (nfree > 0) {
    const std::int64_t cap =
        opt.max_iterations > 0
            ? opt.max_iterations
            : 50 * static_cast<std::int64_t>(std::ceil(std::sqrt(static_cast<double>(nfree))));

    std::vector<double> r = sys.rhs;
    std::vector<double> z(nfree), p(nfree), q(nfree);

    auto apply = [&](const std::vector<double>& in, std::vector<double>& out) {
      for (std::int64_t f = 0; f < nfree; ++f) {
        const std::int32_t cell = sys.free_cells[f];
        double acc = sys.diag[cell] * in[f];
        for (const std::int32_t nb : neighbor_span(cell)) {
          const std::int32_t fj = sys.free_index[nb];
          if (fj >= 0) acc -= in[fj];
        }
        out[f] = acc;
      }
    };
    auto dot = [&](const std::vector<double>& a, const std::vector<double>& b) {
      double s = 0.0;
      for (std::int64_t f = 0; f < nfree; ++f) s += a[f] * b[f];
      return s;
    };
    auto max_abs = [&](const std::vector<double>& a) {
      double m = 0.0;
      for (const double v : a) m = std::max(m, std::abs(v));
      return m;
    };
    auto true_residual_inf = [&]() {
      apply(x, q);
      double m = 0.0;
      for (std::int64_t f = 0; f < nfree; ++f) m = std::max(m, std::abs(sys.rhs[f] - q[f]));
      return m;
    };

    for (std::int64_t f = 0; f < nfree; ++f) {
      z[f] = r[f] / sys.diag[sys.free_cells[f]];
    }
    p = z;
    double rz = dot(r, z);
    bool converged = max_abs(r) <= 0.5 * opt.tol;

    while (!converged) {
      if (iterations >= cap) {
        throw ConvergenceError(
            "solve_harmonic: no convergence within " + std::to_string(cap) +
                " iterations (best residual " + std::to_string(best_residual) + ")",
            best_residual, iterations);
      }
      apply(p, q);
      const double pq = dot(p, q);
      if (pq <= 0.0) break;  // numerically exhausted; validated below
      const double alpha = rz / pq;
      for (std::int64_t f = 0; f < nfree; ++f) {
        x[f] += alpha * p[f];
        r[f] -= alpha * q[f];
      }
      ++iterations;
      const double rinf = max_abs(r);
      best_residual = std::min(best_residual, rinf);
      if (rinf <= 0.5 * opt.tol) {
        // Recurrence residual can drift; accept only the true residual.
        const double true_inf = true_residual_inf();
        best_residual = std::min(best_residual, true_inf);
        if (true_inf <= 0.5 * opt.tol) {
          converged = true;
          break;
        }
        apply(x, q);
        for (std::int64_t f = 0; f < nfree; ++f) r[f] = sys.rhs[f] - q[f];
      }
      for (std::int64_t f = 0; f < nfree; ++f) {
        z[f] = r[f] / sys.diag[sys.free_cells[f]];
      }
      const double rz_next = dot(r, z);
      if (rz_next <= 0.0) break;
      const double beta = rz_next / rz;
      rz = rz_next;
      for (std::int64_t f = 0; f < nfree; ++f) p[f] = z[f] + beta * p[f];
    }
    if (!converged) {
      const double true_inf = true_residual_inf();
      if (true_inf > opt.tol) {
        throw ConvergenceError("solve_harmonic: stagnated at residual " +
                                   std::to_string(true_inf),
                               true_inf, iterations);
      }
    }
  }

  // Assemble: exact boundary values, clamped free values.
  sol.values.assign(n, 0.0);
  for (const std::int32_t c : pin1.cells) sol.values[c] = 1.0;
  for (std::int64_t f = 0; f < nfree; ++f) {
    sol.values[sys.free_cells[f]] = std::clamp(x[f], 0.0, 1.0);
  }
  sol.iterations = iterations;
  sol.energy = energy(form, sol.values);

  double residual = 0.0;
  for (std::int64_t f = 0; f < nfree; ++f) {
    const std::int32_t cell = sys.free_cells[f];
    double acc = sys.diag[cell] * sol.values[cell];
    for (const std::int32_t nb : neighbor_span(cell)) acc -= sol.values[nb];
    residual = std::max(residual, std::abs(acc));
  }
  sol.residual = residual;
  if (nfree > 0 && residual > opt.tol) {
    throw ConvergenceError("solve_harmonic: assembled residual " + std::to_string(residual) +
                               " exceeds tolerance",
                           residual, iterations);
  }
  return sol;
}

std::vector<double> symmetrize(const CellGraph& graph, std::span<const double> u,
                               const std::vector<CubeSymmetry>& subgroup) {
  const std::int64_t n = graph.cell_count();
  std::vector<std::vector<std::int32_t>> perms;
  perms.reserve(subgroup.size());
  for (const CubeSymmetry& g : subgroup) perms.push_back(symmetry_permutation(graph, g));

  std::vector<double> clamped(u.begin(), u.end());
  for (double& v : clamped) v = std::clamp(v, 0.0, 1.0);

  std::vector<double> out(n, 0.0);
  std::vector<std::uint8_t> done(n, 0);
  std::vector<std::int32_t> orbit;
  for (std::int64_t i = 0; i < n; ++i) {
    if (done[i]) continue;
    orbit.clear();
    orbit.push_back(static_cast<std::int32_t>(i));
    done[i] = 1;
    for (std::size_t head = 0; head < orbit.size(); ++head) {
      for (const auto& perm : perms) {
        const std::int32_t img = perm[orbit[head]];
        if (!done[img]) {
          done[img] = 1;
          orbit.push_back(img);
        }
      }
    }
    std::sort(orbit.begin(), orbit.end());
    double sum = 0.0;
    for (const std::int32_t c : orbit) sum += clamped[c];
    const double avg = sum / static_cast<double>(orbit.size());
    for (const std::int32_t c : orbit) out[c] = avg;
  }
  return out;
}

HarmonicSolution solve_face_problem(const CellGraph& graph, int axis, const SolveOptions& opt) {
  const FaceSet b0 = face_cells(graph, axis, 0);
  const FaceSet b1 = face_cells(graph, axis, 1);
  const EnergyForm form = face_energy_form(graph);
  HarmonicSolution sol = solve_harmonic(form, b0, b1, opt);

  const auto subgroup = axis_fixing_reflections(graph.d(), axis);
  double asym = 0.0;
  for (const CubeSymmetry& g : subgroup) {
    if (g.is_identity()) continue;
    const auto perm = symmetry_permutation(graph, g);
    for (std::int64_t i = 0; i < graph.cell_count(); ++i) {
      asym = std::max(asym, std::abs(sol.values[i] - sol.values[perm[i]]));
    }
  }
  sol.presym_asymmetry = asym;
  sol.values = symmetrize(graph, sol.values, subgroup);
  sol.energy = energy(form, sol.values);

  // Orbit averaging cannot worsen the residual bound: the Laplacian
  // commutes with automorphisms, so re-measure and keep the guarantee.
  const Csr csr = face_adjacency_csr(graph);
  std::vector<std::uint8_t> pinned(graph.cell_count(), 0);
  for (const std::int32_t c : b0.cells) pinned[c] = 1;
  for (const std::int32_t c : b1.cells) pinned[c] = 1;
  double residual = 0.0;
  for (std::int64_t i = 0; i < graph.cell_count(); ++i) {
    if (pinned[i]) continue;
    const auto row = csr.row(static_cast<std::int32_t>(i));
    double acc = static_cast<double>(row.size()) * sol.values[i];
    for (const std::int32_t nb : row) acc -= sol.values[nb];
    residual = std::max(residual, std::abs(acc));
  }
  sol.residual = residual;
  sol.symmetrized = true;
  return sol;
}

namespace {

bool exactly_pinned(const HarmonicSolution& h, const CellGraph& graph) {
  for (const std::int32_t c : h.boundary0.cells) {
    if (h.values[c] != 0.0) return false;
  }
  for (const std::int32_t c : h.boundary1.cells) {
    if (h.values[c] != 1.0) return false;
  }
  return h.boundary0.axis == 0 && h.boundary1.axis == 0 && h.boundary0.side == 0 &&
         h.boundary1.side == 1 && static_cast<std::int64_t>(h.values.size()) == graph.cell_count();
}

bool exactly_reflection_invariant(const HarmonicSolution& h, const CellGraph& graph) {
  for (const CubeSymmetry& g : axis_fixing_reflections(graph.d(), 0)) {
    if (g.is_identity()) continue;
    const auto perm = symmetry_permutation(graph, g);
    for (std::int64_t i = 0; i < graph.cell_count(); ++i) {
      if (h.values[i] != h.values[perm[i]]) return false;
    }
  }
  return true;
}

}  // namespace

std::vector<double> glue_harmonic(const HarmonicSolution& h0, const CellGraph& coarse,
                                  const CellGraph& fine) {
  if (coarse.spec.codes != fine.spec.codes || coarse.spec.l != fine.spec.l) {
    throw std::invalid_argument("glue_harmonic: graphs built from different specs");
  }
  const int m = fine.level - coarse.level;
  if (m < 0) throw std::invalid_argument("glue_harmonic: fine graph is coarser than base");
  if (!exactly_pinned(h0, coarse)) {
    throw Error("glue_harmonic: base solution must pin the axis-0 faces to exact 0/1");
  }
  if (!exactly_reflection_invariant(h0, coarse)) {
    throw Error("glue_harmonic: base solution must be exactly reflection-symmetric "
                "(symmetrize it first)");
  }
  if (m == 0) return h0.values;

  const int d = fine.d();
  const std::int64_t inner_side = coarse.side;
  const double scale = static_cast<double>(fine.side / coarse.side);  // l^m, exact
  std::vector<double> out(fine.cell_count());
  Tuple rem(d);
  for (std::int64_t i = 0; i < fine.cell_count(); ++i) {
    const auto origin = fine.origin(static_cast<std::int32_t>(i));
    const std::int64_t q1 = origin[0] / inner_side;
    for (int k = 0; k < d; ++k) rem[k] = static_cast<std::int32_t>(origin[k] % inner_side);
    const std::int32_t v = coarse.index_of_code(encode_tuple(rem, inner_side));
    if (v < 0) throw Error("glue_harmonic: inner address missing from base graph");
    out[i] = (h0.values[v] + static_cast<double>(q1)) / scale;
  }
  return out;
}

double effective_resistance(const EnergyForm& form, const FaceSet& pin0, const FaceSet& pin1,
                            const SolveOptions& opt) {
  const HarmonicSolution sol = solve_harmonic(form, pin0, pin1, opt);
  if (sol.energy <= 0.0) return std::numeric_limits<double>::infinity();
  return 1.0 / sol.energy;
}

double effective_resistance(const CellGraph& graph, int axis, const SolveOptions& opt) {
  const EnergyForm form = face_energy_form(graph);
  return effective_resistance(form, face_cells(graph, axis, 0), face_cells(graph, axis, 1), opt);
}

}  // namespace gsc
