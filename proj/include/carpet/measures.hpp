#pragma once

// Discrete approximation measures on the simple point graphs, finite-level
// p-energy measures with their exact self-similar decomposition, chain-rule
// discrepancy reports, Besov-type seminorms and Holder-ratio diagnostics.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <random>
#include <stdexcept>
#include <unordered_map>
#include <vector>

#include "carpet/energy.hpp"
#include "carpet/graphs.hpp"
#include "carpet/numeric.hpp"

namespace carpet {

// Nonnegative masses indexed by the canonical word order of W_level.
struct CellMeasure {
  int level = 0;
  double rho = 1.0;
  std::vector<double> masses;
  double total = 0.0;
};

// sample counts per level-m cell with closed membership: points on a shared
// boundary are counted for every containing cell, so count(K_w) equals the
// full vertex count of the sub-copy inside K_w
inline std::vector<std::int64_t> closed_cell_counts(const PointGraph& star, int cell_level) {
  return cell_sample_counts(star, cell_level);
}

// uniform probability measure on V(G*_n), aggregated to level-m cells with
// each vertex assigned to its lowest-index containing cell, so the masses
// form a partition and sum to one
inline CellMeasure discrete_measure(const PointGraph& star, int cell_level) {
  if (star.kind != PointKind::kSimple)
    throw std::invalid_argument("discrete_measure lives on the simple point graphs");
  if (cell_level >= star.level) throw std::invalid_argument("cell level too deep");
  CellMeasure out;
  out.level = cell_level;
  out.masses.assign(static_cast<size_t>(pow8(cell_level)), 0.0);
  const double w = 1.0 / static_cast<double>(star.g.vertex_count);
  for (std::int32_t v = 0; v < star.g.vertex_count; ++v) {
    const auto cells = cells_containing(star.point_at(v), cell_level);
    const std::int64_t owner = *std::min_element(cells.begin(), cells.end());
    out.masses[static_cast<size_t>(owner)] += w;
  }
  CompensatedSum tot;
  for (double m : out.masses) tot.add(m);
  out.total = tot.value();
  return out;
}

// finite-level p-energy measure of f on the modified graph of level n+m:
// mass(w) = rho^{n+m} * (raw energy of the edges inside K_w), w in W_n.
// Edges partition by owner cell, so the total equals the rescaled energy
// of f exactly.
inline CellMeasure energy_measure(const PointGraph& g, const std::vector<double>& f,
                                  int cell_level, double p, double rho = 1.0) {
  if (g.kind != PointKind::kModified)
    throw std::invalid_argument("energy measures use the modified point graphs");
  if (cell_level >= g.level)
    throw std::invalid_argument("cell level must be shallower than the graph");
  if (static_cast<std::int32_t>(f.size()) != g.g.vertex_count)
    throw std::invalid_argument("function not aligned to graph");
  const int owner_level = g.level - 1;
  const std::int64_t divisor = pow8(owner_level - cell_level);
  const double scale = std::pow(rho, g.level);

  CellMeasure out;
  out.level = cell_level;
  out.rho = rho;
  std::vector<CompensatedSum> acc(static_cast<size_t>(pow8(cell_level)));
  for (size_t e = 0; e < g.g.edges.size(); ++e) {
    const auto& edge = g.g.edges[e];
    const double term = power_abs(f[static_cast<size_t>(edge[0])] - f[static_cast<size_t>(edge[1])], p);
    acc[static_cast<size_t>(g.owner[e] / divisor)].add(term);
  }
  out.masses.resize(acc.size());
  CompensatedSum tot;
  for (size_t i = 0; i < acc.size(); ++i) {
    out.masses[i] = scale * acc[i].value();
    tot.add(out.masses[i]);
  }
  out.total = tot.value();
  return out;
}

// aggregate a level-(k+1) measure to level k by summing over children
inline CellMeasure aggregate_to_parent(const CellMeasure& fine) {
  if (fine.level < 1) throw std::invalid_argument("no parent level");
  CellMeasure out;
  out.level = fine.level - 1;
  out.rho = fine.rho;
  out.masses.assign(fine.masses.size() / 8, 0.0);
  for (size_t w = 0; w < out.masses.size(); ++w) {
    CompensatedSum s;
    for (int i = 0; i < 8; ++i) s.add(fine.masses[w * 8 + static_cast<size_t>(i)]);
    out.masses[w] = s.value();
  }
  CompensatedSum tot;
  for (double m : out.masses) tot.add(m);
  out.total = tot.value();
  return out;
}

struct ChainRuleRow {
  int cell_level = 0;
  double max_rel = 0.0;   // max per-cell relative discrepancy
  double mean_rel = 0.0;  // mass-weighted mean discrepancy
  double band_lo = 0.0;   // discrepancy with Phi' at the cell min / max of f
  double band_hi = 0.0;
};

// per-cell comparison of mass_{Phi(f)}(w) against |Phi'(mean_w f)|^p mass_f(w)
inline std::vector<ChainRuleRow> chain_rule_check(const PointGraph& g,
                                                  const std::vector<double>& f,
                                                  const std::function<double(double)>& phi,
                                                  const std::function<double(double)>& dphi,
                                                  double p, const std::vector<int>& cell_levels,
                                                  double rho = 1.0) {
  std::vector<double> phif(f.size());
  for (size_t i = 0; i < f.size(); ++i) phif[i] = phi(f[i]);

  // per-vertex owner cells are not needed: collect per-cell value ranges
  // from the vertices incident to owned edges
  std::vector<ChainRuleRow> rows;
  for (int lvl : cell_levels) {
    const CellMeasure mf = energy_measure(g, f, lvl, p, rho);
    const CellMeasure mphi = energy_measure(g, phif, lvl, p, rho);
    const std::int64_t divisor = pow8(g.level - 1 - lvl);
    const size_t ncells = mf.masses.size();
    std::vector<double> vmin(ncells, std::numeric_limits<double>::infinity());
    std::vector<double> vmax(ncells, -std::numeric_limits<double>::infinity());
    std::vector<CompensatedSum> vsum(ncells);
    std::vector<std::int64_t> vcnt(ncells, 0);
    for (size_t e = 0; e < g.g.edges.size(); ++e) {
      const size_t w = static_cast<size_t>(g.owner[e] / divisor);
      for (int side = 0; side < 2; ++side) {
        const double val = f[static_cast<size_t>(g.g.edges[e][side])];
        vmin[w] = std::min(vmin[w], val);
        vmax[w] = std::max(vmax[w], val);
        vsum[w].add(val);
        ++vcnt[w];
      }
    }
    ChainRuleRow row;
    row.cell_level = lvl;
    CompensatedSum weighted, mass_total;
    double band_lo = 0.0, band_hi = 0.0;
    for (size_t w = 0; w < ncells; ++w) {
      if (mf.masses[w] <= 0.0) continue;
      const double mean = vsum[w].value() / static_cast<double>(vcnt[w]);
      auto rel = [&](double at) {
        const double predicted = std::pow(std::abs(dphi(at)), p) * mf.masses[w];
        return std::abs(mphi.masses[w] - predicted) /
               std::max(std::max(mphi.masses[w], predicted), 1e-300);
      };
      const double r_mean = rel(mean);
      row.max_rel = std::max(row.max_rel, r_mean);
      weighted.add(r_mean * mf.masses[w]);
      mass_total.add(mf.masses[w]);
      band_lo = std::max(band_lo, rel(vmin[w]));
      band_hi = std::max(band_hi, rel(vmax[w]));
    }
    row.mean_rel = mass_total.value() > 0.0 ? weighted.value() / mass_total.value() : 0.0;
    row.band_lo = std::min({band_lo, band_hi, row.max_rel});
    row.band_hi = std::max({band_lo, band_hi, row.max_rel});
    rows.push_back(row);
  }
  return rows;
}

struct BesovReport {
  double p = 2.0;
  double beta = 2.0;
  int n = 0;            // scale index: ball radius c * 3^{-n}
  int m = 0;            // discretization level of mu_m
  double value = 0.0;   // A_{p,beta}^{(n)}(f) discretized with mu_m
  double c_radius = 0.0;  // the radius constant (3 * sqrt 2)
};

// A_{p,beta}^{(n)}(f) = 3^{beta n} int avg_{B(x, c 3^{-n})} |f(x)-f(y)|^p,
// both integrals discretized with the uniform measure on V(G*_m); exact
// integer ball tests, open balls.
inline BesovReport besov_seminorm(const PointGraph& star, const std::vector<double>& f, double p,
                                  double beta, int n, int* pair_count_out = nullptr) {
  if (star.kind != PointKind::kSimple)
    throw std::invalid_argument("besov seminorm is discretized on the simple graphs");
  const int m = star.level;
  if (m <= n) throw std::invalid_argument("need discretization level m > n");
  if (static_cast<std::int32_t>(f.size()) != star.g.vertex_count)
    throw std::invalid_argument("function not aligned to graph");

  // radius c*3^{-n} with c = 3 sqrt 2; scaled to denom 4*3^m the squared
  // radius is 18 * (4*3^{m-n})^2, an exact integer
  const std::int64_t unit = 4 * pow3(m - n);
  const std::int64_t r2 = 18 * unit * unit;
  const std::int64_t bucket = 12 * pow3(m - n);  // > r / 2, scan +-2 buckets
  const std::int64_t shift = 2 * pow3(m);

  std::unordered_map<std::int64_t, std::vector<std::int32_t>> buckets;
  buckets.reserve(static_cast<size_t>(star.g.vertex_count) / 4 + 8);
  auto key_of = [&](std::int64_t bx, std::int64_t by) { return bx * (1 << 20) + by; };
  for (std::int32_t v = 0; v < star.g.vertex_count; ++v) {
    const auto& pt = star.pts[static_cast<size_t>(v)];
    buckets[key_of((pt[0] + shift) / bucket, (pt[1] + shift) / bucket)].push_back(v);
  }

  CompensatedSum outer;
  long pairs = 0;
  for (std::int32_t v = 0; v < star.g.vertex_count; ++v) {
    const auto& pv = star.pts[static_cast<size_t>(v)];
    const std::int64_t bx = (pv[0] + shift) / bucket, by = (pv[1] + shift) / bucket;
    CompensatedSum inner;
    std::int64_t in_ball = 0;
    for (std::int64_t dx = -2; dx <= 2; ++dx)
      for (std::int64_t dy = -2; dy <= 2; ++dy) {
        const auto it = buckets.find(key_of(bx + dx, by + dy));
        if (it == buckets.end()) continue;
        for (const auto u : it->second) {
          const auto& pu = star.pts[static_cast<size_t>(u)];
          const std::int64_t ddx = pu[0] - pv[0], ddy = pu[1] - pv[1];
          if (ddx * ddx + ddy * ddy < r2) {
            inner.add(power_abs(f[static_cast<size_t>(v)] - f[static_cast<size_t>(u)], p));
            ++in_ball;
          }
        }
      }
    if (in_ball > 0) outer.add(inner.value() / static_cast<double>(in_ball));
    pairs += in_ball;
  }

  BesovReport rep;
  rep.p = p;
  rep.beta = beta;
  rep.n = n;
  rep.m = m;
  rep.c_radius = 3.0 * std::sqrt(2.0);
  rep.value = std::pow(3.0, beta * n) * outer.value() /
              static_cast<double>(star.g.vertex_count);
  if (pair_count_out) *pair_count_out = static_cast<int>(std::min<long>(pairs, INT32_MAX));
  return rep;
}

// max over sampled vertex pairs of |f(x)-f(y)|^p / (energy d(x,y)^{beta-alpha})
inline double holder_check(const PointGraph& g, const std::vector<double>& f, double p,
                           double beta_hat, double energy, std::uint64_t seed = 1,
                           int samples = 20000) {
  const double alpha = std::log(8.0) / std::log(3.0);
  if (beta_hat <= alpha) throw std::invalid_argument("holder exponent must exceed alpha");
  if (energy <= 0.0) throw std::invalid_argument("energy must be positive");
  const double expnt = beta_hat - alpha;
  const double den = static_cast<double>(carpet::denom(g.level));
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::int32_t> pick(0, g.g.vertex_count - 1);
  double best = 0.0;
  auto ratio = [&](std::int32_t a, std::int32_t b) {
    const auto& pa = g.pts[static_cast<size_t>(a)];
    const auto& pb = g.pts[static_cast<size_t>(b)];
    const double dx = static_cast<double>(pa[0] - pb[0]) / den;
    const double dy = static_cast<double>(pa[1] - pb[1]) / den;
    const double d = std::sqrt(dx * dx + dy * dy);
    if (d == 0.0) return 0.0;
    return power_abs(f[static_cast<size_t>(a)] - f[static_cast<size_t>(b)], p) /
           (energy * std::pow(d, expnt));
  };
  for (int s = 0; s < samples; ++s) best = std::max(best, ratio(pick(rng), pick(rng)));
  // adjacent pairs probe the smallest scales
  for (size_t e = 0; e < g.g.edges.size();
       e += std::max<size_t>(1, g.g.edges.size() / 4000))
    best = std::max(best, ratio(g.g.edges[e][0], g.g.edges[e][1]));
  return best;
}

}  // namespace carpet
