#pragma once

// Conductance families across levels, estimation of the resistance scaling
// factor rho_p and the walk dimension beta_p, the pasted-copy h_n functions
// on the point graphs, and the strictness-gap experiment.

#include <chrono>
#include <cmath>
#include <cstdint>
#include <limits>
#include <set>
#include <string>
#include <vector>

#include "carpet/energy.hpp"
#include "carpet/graphs.hpp"
#include "carpet/solver.hpp"

namespace carpet {

inline double beta_from_rho(double rho) { return std::log(8.0 * rho) / std::log(3.0); }

// C_p between the left and right designated sets of G_n, or of the modified
// point graph. A warm start (prolonged coarser minimizer) may be supplied
// for the cell family.
inline double conductance_lr_cell(int n, double p, const SolverOptions& opts = {},
                                  const std::vector<double>* warm = nullptr,
                                  SolveReport* report = nullptr,
                                  std::int64_t budget = kDefaultVertexBudget) {
  const CellGraph g = build_cell_graph(n, CellAdjacency::kFull, budget);
  return conductance(g.g, g.left, g.right, p, opts, warm, report);
}

inline double conductance_lr_point(int n, double p, const SolverOptions& opts = {},
                                   SolveReport* report = nullptr,
                                   std::int64_t budget = kDefaultVertexBudget) {
  const PointGraph g = build_point_graph(n, PointKind::kModified, budget);
  return conductance(g.g, g.left, g.right, p, opts, nullptr, report);
}

// Representatives of the symmetry orbits of W_m (minimal word index each).
inline std::vector<std::int64_t> symmetry_orbit_representatives(int m) {
  std::vector<std::array<std::uint8_t, 8>> perms;
  for (const auto& t : symmetry_group()) perms.push_back(symbol_permutation(t));
  std::vector<std::int64_t> reps;
  const std::int64_t total = pow8(m);
  for (std::int64_t w = 0; w < total; ++w) {
    std::int64_t best = w;
    for (const auto& perm : perms) {
      std::int64_t img = 0, idx = w, mult = 1;
      for (int k = 0; k < m; ++k) {
        img += static_cast<std::int64_t>(perm[static_cast<size_t>(idx % 8)] - 1) * mult;
        idx /= 8;
        mult *= 8;
      }
      best = std::min(best, img);
    }
    if (best == w) reps.push_back(w);
  }
  return reps;
}

struct NeighborhoodConductance {
  double value = 0.0;   // lower bound for the sup over W_#
  Word witness;
  int ambient_depth = 0;
};

// sup_w C_p(w.W_n, W_{n+m} \ B_n(w,1)) over w in W_m, scanned over symmetry
// orbit representatives. A certified lower bound for the paper's supremum.
inline NeighborhoodConductance conductance_neighborhood(int n, double p, int ambient_depth,
                                                        const SolverOptions& opts = {},
                                                        std::int64_t budget = kDefaultVertexBudget) {
  if (ambient_depth < 1 || ambient_depth > 2)
    throw std::invalid_argument("ambient depth must be 1 or 2");
  const int m = ambient_depth;
  const CellGraph amb = build_cell_graph(n + m, CellAdjacency::kFull, budget);
  NeighborhoodConductance best;
  best.ambient_depth = m;
  for (std::int64_t wi : symmetry_orbit_representatives(m)) {
    const Word w = Word::from_index(wi, m);
    const auto block = block_neighborhood(w, 0, n, budget);
    const auto hood = block_neighborhood(w, 1, n, budget);
    std::vector<char> in_hood(static_cast<size_t>(pow8(n + m)), 0);
    for (auto idx : hood) in_hood[static_cast<size_t>(idx)] = 1;
    std::vector<std::int32_t> a, b;
    for (auto idx : block) a.push_back(static_cast<std::int32_t>(idx));
    for (std::int64_t idx = 0; idx < pow8(n + m); ++idx)
      if (!in_hood[static_cast<size_t>(idx)]) b.push_back(static_cast<std::int32_t>(idx));
    const double c = conductance(amb.g, a, b, p, opts);
    if (c > best.value) {
      best.value = c;
      best.witness = w;
    }
  }
  return best;
}

inline double conductance_chain(int n, int M, double p, const SolverOptions& opts = {},
                                SolveReport* report = nullptr,
                                std::int64_t budget = kDefaultVertexBudget) {
  const ChainGraph ch = build_chain_graph(n, M, budget);
  return conductance(ch.cells.g, ch.left, ch.right, p, opts, nullptr, report);
}

// R_p on the modified point graph between two of its vertices.
inline double point_resistance(int n, const LatticePoint& x, const LatticePoint& y, double p,
                               const SolverOptions& opts = {},
                               std::int64_t budget = kDefaultVertexBudget) {
  const PointGraph g = build_point_graph(n, PointKind::kModified, budget);
  const std::int32_t vx = g.vertex_of(x), vy = g.vertex_of(y);
  if (vx == vy) throw std::invalid_argument("point_resistance: identical vertices");
  return 1.0 / conductance(g.g, {vx}, {vy}, p, opts);
}

enum class ScalingFamily { kCellLR, kPointLR, kNeighborhood, kChain, kPointPair };

inline std::string family_name(ScalingFamily f) {
  switch (f) {
    case ScalingFamily::kCellLR: return "lr";
    case ScalingFamily::kPointLR: return "lr-point";
    case ScalingFamily::kNeighborhood: return "nbhd";
    case ScalingFamily::kChain: return "chain";
    case ScalingFamily::kPointPair: return "point-pair";
  }
  return "?";
}

inline ScalingFamily family_from_name(const std::string& s) {
  if (s == "lr") return ScalingFamily::kCellLR;
  if (s == "lr-point") return ScalingFamily::kPointLR;
  if (s == "nbhd") return ScalingFamily::kNeighborhood;
  if (s == "chain") return ScalingFamily::kChain;
  if (s == "point-pair") return ScalingFamily::kPointPair;
  throw std::invalid_argument("unknown scaling family: " + s);
}

struct ScalingRow {
  int n = 0;
  double value = 0.0;
  bool ok = false;
  long wall_ms = 0;
};

struct ScalingTable {
  double p = 2.0;
  std::string family;
  std::vector<ScalingRow> rows;
  std::vector<double> ratios;      // value_n / value_{n+1} per consecutive pair
  double rho_hat_ratio = 0.0;      // last-ratio estimate
  double rho_hat_fit = 0.0;        // regression estimate
  double beta_hat_ratio = 0.0;
  double beta_hat_fit = 0.0;
  double submult_hat = 0.0;        // max over pairs of C_{n+m} / (C_n C_m)
};

// Per-level conductances with both rho estimators. The cell LR family is
// solved coarse-to-fine with prolonged warm starts.
inline ScalingTable estimate_rho(double p, ScalingFamily family, int n_min, int n_max,
                                 const SolverOptions& opts = {}, int ambient_depth = 1,
                                 int chain_M = 3, std::int64_t budget = kDefaultVertexBudget) {
  if (n_max < n_min + 2) throw std::invalid_argument("need n_max >= n_min + 2");
  ScalingTable t;
  t.p = p;
  t.family = family_name(family);

  std::vector<double> prev_minimizer;
  for (int n = n_min; n <= n_max; ++n) {
    ScalingRow row;
    row.n = n;
    const auto t0 = std::chrono::steady_clock::now();
    try {
      switch (family) {
        case ScalingFamily::kCellLR: {
          std::vector<double> warm;
          if (!prev_minimizer.empty()) {
            warm.resize(prev_minimizer.size() * 8);
            for (size_t v = 0; v < warm.size(); ++v) warm[v] = prev_minimizer[v / 8];
          }
          SolveReport rep;
          row.value = conductance_lr_cell(n, p, opts, warm.empty() ? nullptr : &warm, &rep, budget);
          prev_minimizer = std::move(rep.minimizer);
          break;
        }
        case ScalingFamily::kPointLR:
          row.value = conductance_lr_point(n, p, opts, nullptr, budget);
          break;
        case ScalingFamily::kNeighborhood:
          row.value = conductance_neighborhood(n, p, ambient_depth, opts, budget).value;
          break;
        case ScalingFamily::kChain:
          row.value = conductance_chain(n, chain_M, p, opts, nullptr, budget);
          break;
        case ScalingFamily::kPointPair: {
          const PointGraph g = build_point_graph(n, PointKind::kModified, budget);
          row.value = conductance(g.g, {g.vertex_of(fixed_point(2))},
                                  {g.vertex_of(diagonal_midpoint(0))}, p, opts);
          break;
        }
      }
      row.ok = true;
    } catch (const std::exception&) {
      row.ok = false;
    }
    row.wall_ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                      std::chrono::steady_clock::now() - t0)
                      .count();
    t.rows.push_back(row);
  }

  // successive ratios and the two estimators
  for (size_t i = 0; i + 1 < t.rows.size(); ++i) {
    if (t.rows[i].ok && t.rows[i + 1].ok && t.rows[i + 1].value > 0.0)
      t.ratios.push_back(t.rows[i].value / t.rows[i + 1].value);
    else
      t.ratios.push_back(std::numeric_limits<double>::quiet_NaN());
  }
  if (!t.ratios.empty() && std::isfinite(t.ratios.back())) t.rho_hat_ratio = t.ratios.back();

  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int cnt = 0;
  for (const auto& r : t.rows) {
    if (!r.ok || r.value <= 0.0) continue;
    sx += r.n;
    sy += std::log(r.value);
    sxx += static_cast<double>(r.n) * r.n;
    sxy += r.n * std::log(r.value);
    ++cnt;
  }
  if (cnt >= 2) {
    const double slope = (cnt * sxy - sx * sy) / (cnt * sxx - sx * sx);
    t.rho_hat_fit = std::exp(-slope);
  }
  if (t.rho_hat_ratio > 0.0) t.beta_hat_ratio = beta_from_rho(t.rho_hat_ratio);
  if (t.rho_hat_fit > 0.0) t.beta_hat_fit = beta_from_rho(t.rho_hat_fit);

  for (const auto& rn : t.rows)
    for (const auto& rm : t.rows) {
      if (!rn.ok || !rm.ok) continue;
      const int nm = rn.n + rm.n;
      for (const auto& rs : t.rows)
        if (rs.ok && rs.n == nm && rn.value * rm.value > 0.0)
          t.submult_hat = std::max(t.submult_hat, rs.value / (rn.value * rm.value));
    }
  return t;
}

struct HnFunction {
  int level = 0;           // n: the graph the function lives on
  int depth = 0;           // k: pasting steps above the solved base
  double p = 2.0;
  std::vector<double> values;
  double base_energy = 0.0;    // E_p of the level-(n-k) minimizer
  double glue_residual = 0.0;  // max disagreement at shared vertices
};

// Recursively pasted h_k on the modified point graph: the base is the
// discrete left-right minimizer at level n-k (T_h-symmetrized), and each
// pasting step maps value v to (v + shift_i)/3 per column, with shifts
// chosen so that the left trace stays 1 and the right trace stays 0.
inline HnFunction build_hn(int n, int k, double p, const SolverOptions& opts = {},
                           std::int64_t budget = kDefaultVertexBudget) {
  if (k > n - 1) throw std::invalid_argument("build_hn: need k <= n - 1");
  HnFunction out;
  out.level = n;
  out.depth = k;
  out.p = p;

  const int base_level = n - k;
  PointGraph base = build_point_graph(base_level, PointKind::kModified, budget);
  SolveReport rep;
  conductance(base.g, base.left, base.right, p, opts, nullptr, &rep);
  out.base_energy = rep.energy;

  // exact horizontal-mirror symmetrization of the base minimizer
  {
    const auto mirrored = pullback_symmetry(base, rep.minimizer, symmetry("T_h"));
    for (size_t i = 0; i < rep.minimizer.size(); ++i)
      rep.minimizer[i] = 0.5 * (rep.minimizer[i] + mirrored[i]);
  }

  std::vector<double> cur = std::move(rep.minimizer);
  PointGraph cur_graph = std::move(base);
  for (int level = base_level + 1; level <= n; ++level) {
    PointGraph next = build_point_graph(level, PointKind::kModified, budget);
    std::vector<double> vals(static_cast<size_t>(next.g.vertex_count),
                             std::numeric_limits<double>::quiet_NaN());
    // columns: {3,4,5} shift 0, {2,6} shift 1, {1,7,8} shift 2
    static constexpr std::array<int, 8> shift{2, 1, 0, 0, 0, 1, 2, 2};
    const std::int64_t c = 4 * pow3(level - 1);
    for (int i = 1; i <= 8; ++i) {
      const auto& a = kAnchor2[static_cast<size_t>(i - 1)];
      for (std::int32_t v = 0; v < cur_graph.g.vertex_count; ++v) {
        const auto& pt = cur_graph.pts[static_cast<size_t>(v)];
        const std::int32_t tv = next.vertex_of(pt[0] + c * a[0], pt[1] + c * a[1]);
        const double val =
            (cur[static_cast<size_t>(v)] + shift[static_cast<size_t>(i - 1)]) / 3.0;
        double& slot = vals[static_cast<size_t>(tv)];
        if (std::isnan(slot)) {
          slot = val;
        } else {
          out.glue_residual = std::max(out.glue_residual, std::abs(slot - val));
        }
      }
    }
    for (double v : vals)
      if (std::isnan(v)) throw std::logic_error("build_hn: uncovered vertex");
    if (out.glue_residual > 1e-7) throw std::logic_error("build_hn: inconsistent glue values");
    cur = std::move(vals);
    cur_graph = std::move(next);
  }
  out.values = std::move(cur);
  return out;
}

// 1 - C_p(G_n L,R) / (64 * 3^{-2p} * C_p(G_{n-2} L,R)): positive when the
// two-step pasted function is strictly worse than harmonic.
inline double strictness_gap(int n, double p, const SolverOptions& opts = {},
                             std::int64_t budget = kDefaultVertexBudget) {
  if (n < 3) throw std::invalid_argument("strictness_gap: need n >= 3");
  const double c_fine = conductance_lr_point(n, p, opts, nullptr, budget);
  const double c_coarse = conductance_lr_point(n - 2, p, opts, nullptr, budget);
  const double pasted = 64.0 * std::pow(3.0, -2.0 * p) * c_coarse;
  return 1.0 - c_fine / pasted;
}

}  // namespace carpet
