#pragma once

// Discrete p-energy and the elementary transformations on graph functions:
// clamping, symmetry pullback, self-similar pullback, block coarsening and
// point-to-cell averaging.

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "carpet/geometry.hpp"
#include "carpet/graph.hpp"
#include "carpet/graphs.hpp"
#include "carpet/numeric.hpp"

namespace carpet {

// E_p value together with the rescaling rho^n * E_p used throughout.
struct EnergyValue {
  double p = 2.0;
  double raw = 0.0;
  int rescale_exponent = 0;
  double rho = 1.0;
  double rescaled = 0.0;
};

inline double p_energy_raw(const Graph& g, const std::vector<double>& f, double p,
                           double eps = 0.0) {
  if (static_cast<std::int32_t>(f.size()) != g.vertex_count)
    throw std::invalid_argument("function not aligned to graph");
  CompensatedSum acc;
  for (const auto& e : g.edges)
    acc.add(power_abs(f[static_cast<size_t>(e[0])] - f[static_cast<size_t>(e[1])], p, eps));
  return acc.value();
}

inline EnergyValue p_energy(const Graph& g, const std::vector<double>& f, double p,
                            int rescale_exponent = 0, double rho = 1.0) {
  if (p <= 1.0) throw std::invalid_argument("p must exceed 1");
  EnergyValue ev;
  ev.p = p;
  ev.raw = p_energy_raw(g, f, p);
  ev.rescale_exponent = rescale_exponent;
  ev.rho = rho;
  ev.rescaled = std::pow(rho, rescale_exponent) * ev.raw;
  return ev;
}

inline std::vector<double> p_energy_gradient(const Graph& g, const std::vector<double>& f,
                                             double p, double eps = 0.0) {
  if (static_cast<std::int32_t>(f.size()) != g.vertex_count)
    throw std::invalid_argument("function not aligned to graph");
  std::vector<double> grad(f.size(), 0.0);
  for (const auto& e : g.edges) {
    const double d = power_abs_deriv(f[static_cast<size_t>(e[0])] - f[static_cast<size_t>(e[1])],
                                     p, eps);
    grad[static_cast<size_t>(e[0])] += d;
    grad[static_cast<size_t>(e[1])] -= d;
  }
  return grad;
}

inline std::vector<double> clamp_unit(std::vector<double> f) {
  for (auto& v : f) v = std::min(1.0, std::max(0.0, v));
  return f;
}

// f ∘ T through a precomputed vertex permutation (perm[v] = index of T(v))
inline std::vector<double> pullback_permutation(const std::vector<double>& f,
                                                const std::vector<std::int32_t>& perm) {
  std::vector<double> out(f.size());
  for (size_t v = 0; v < f.size(); ++v) out[v] = f[static_cast<size_t>(perm[v])];
  return out;
}

inline std::vector<double> pullback_symmetry(const PointGraph& pg, const std::vector<double>& f,
                                             const SymmetryElement& t) {
  return pullback_permutation(f, point_graph_symmetry(pg, t));
}

inline std::vector<double> pullback_symmetry(const CellGraph& cg, const std::vector<double>& f,
                                             const SymmetryElement& t) {
  return pullback_permutation(f, cell_graph_symmetry(cg, t));
}

// F_i^* f on the level-n point graph from f on the level-(n+1) graph; exact
// coordinate lookup, and by construction F_i(V_n) ⊆ V_{n+1}.
inline std::vector<double> pullback_cell(const PointGraph& fine, const PointGraph& coarse,
                                         int symbol, const std::vector<double>& f) {
  if (fine.level != coarse.level + 1) throw std::invalid_argument("levels must differ by one");
  if (static_cast<std::int32_t>(f.size()) != fine.g.vertex_count)
    throw std::invalid_argument("function not aligned to fine graph");
  std::vector<double> out(static_cast<size_t>(coarse.g.vertex_count));
  const std::int64_t c = 4 * pow3(coarse.level);
  const auto& a = kAnchor2[static_cast<size_t>(symbol - 1)];
  for (std::int32_t v = 0; v < coarse.g.vertex_count; ++v) {
    const auto& pt = coarse.pts[static_cast<size_t>(v)];
    out[static_cast<size_t>(v)] =
        f[static_cast<size_t>(fine.vertex_of(pt[0] + c * a[0], pt[1] + c * a[1]))];
  }
  return out;
}

// P_{n+m,n}: block average of a cell function down `m` levels (weight 8^{-m}
// per child, i.e. a plain mean over each block of 8^m children).
inline std::vector<double> coarsen(const std::vector<double>& f, int source_level,
                                   int target_level) {
  if (target_level > source_level) throw std::invalid_argument("coarsen: target above source");
  const int m = source_level - target_level;
  const std::int64_t block = pow8(m);
  const std::int64_t nout = pow8(target_level);
  if (static_cast<std::int64_t>(f.size()) != nout * block)
    throw std::invalid_argument("coarsen: function is not a full level function");
  std::vector<double> out(static_cast<size_t>(nout));
  for (std::int64_t w = 0; w < nout; ++w) {
    CompensatedSum acc;
    for (std::int64_t j = 0; j < block; ++j) acc.add(f[static_cast<size_t>(w * block + j)]);
    out[static_cast<size_t>(w)] = acc.value() / static_cast<double>(block);
  }
  return out;
}

// Discrete stand-in for M_n: mean of a point-sampled function over the
// vertices inside each level-n cell. Vertices on shared cell boundaries
// contribute to every containing cell.
inline std::vector<double> average_points_to_cells(const PointGraph& pg,
                                                   const std::vector<double>& f, int cell_level) {
  if (cell_level >= pg.level)
    throw std::invalid_argument("average_points_to_cells: need cell_level < graph level");
  if (static_cast<std::int32_t>(f.size()) != pg.g.vertex_count)
    throw std::invalid_argument("function not aligned to graph");
  const std::int64_t ncells = pow8(cell_level);
  std::vector<CompensatedSum> acc(static_cast<size_t>(ncells));
  std::vector<std::int64_t> cnt(static_cast<size_t>(ncells), 0);
  for (std::int32_t v = 0; v < pg.g.vertex_count; ++v) {
    const LatticePoint pt = pg.point_at(v);
    for (auto w : cells_containing(pt, cell_level)) {
      acc[static_cast<size_t>(w)].add(f[static_cast<size_t>(v)]);
      ++cnt[static_cast<size_t>(w)];
    }
  }
  std::vector<double> out(static_cast<size_t>(ncells));
  for (std::int64_t w = 0; w < ncells; ++w) {
    if (cnt[static_cast<size_t>(w)] == 0)
      throw std::logic_error("cell without sample points");
    out[static_cast<size_t>(w)] =
        acc[static_cast<size_t>(w)].value() / static_cast<double>(cnt[static_cast<size_t>(w)]);
  }
  return out;
}

// per-cell sample counts used by the averaging proxy (shared points counted
// for every containing cell)
inline std::vector<std::int64_t> cell_sample_counts(const PointGraph& pg, int cell_level) {
  const std::int64_t ncells = pow8(cell_level);
  std::vector<std::int64_t> cnt(static_cast<size_t>(ncells), 0);
  for (std::int32_t v = 0; v < pg.g.vertex_count; ++v)
    for (auto w : cells_containing(pg.point_at(v), cell_level)) ++cnt[static_cast<size_t>(w)];
  return cnt;
}

}  // namespace carpet
