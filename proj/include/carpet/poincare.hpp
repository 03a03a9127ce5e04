#pragma once

// The three (p,p)-Poincare constants on carpet graphs through their
// minimizer characterizations, and the relation diagnostics between them.

#include <chrono>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "carpet/graphs.hpp"
#include "carpet/scaling.hpp"
#include "carpet/solver.hpp"

namespace carpet {

struct PoincareResult {
  std::string kind;  // "lambda" | "lambda_star" | "sigma"
  int n = 0;
  double p = 2.0;
  double value = 0.0;
  std::vector<double> certificate;  // minimizer or best ascent iterate
  bool is_lower_bound = false;      // true for lambda (sup by ascent)
  bool converged = true;
  long wall_ms = 0;
};

// lambda_*: reciprocal energy of the minimizer with zero boundary trace and
// unit mean (uniform weights).
inline PoincareResult lambda_star(int n, double p, const SolverOptions& opts = {},
                                  std::int64_t budget = kDefaultVertexBudget) {
  if (n < 2) throw std::invalid_argument("boundary exhausts vertex set below level 2");
  const auto t0 = std::chrono::steady_clock::now();
  const CellGraph g = build_cell_graph(n, CellAdjacency::kFull, budget);
  ConstraintSpec spec;
  MeanConstraint all;
  for (std::int32_t v = 0; v < g.g.vertex_count; ++v) all.subset.push_back(v);
  all.target = 1.0;
  spec.means.push_back(all);
  spec.zero_set.assign(g.boundary.begin(), g.boundary.end());
  SolveReport rep = solve_mean_constrained(g.g, spec, p, opts);

  PoincareResult res;
  res.kind = "lambda_star";
  res.n = n;
  res.p = p;
  res.value = 1.0 / rep.energy;
  res.certificate = std::move(rep.minimizer);
  res.is_lower_bound = false;
  res.converged = rep.converged;
  res.wall_ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                    std::chrono::steady_clock::now() - t0)
                    .count();
  return res;
}

// sigma through its single symmetric instance: the induced subgraph on
// {1,8}.W_n inside G_{n+1} with unit mean gap between the two blocks.
inline PoincareResult sigma(int n, double p, const SolverOptions& opts = {},
                            std::int64_t budget = kDefaultVertexBudget) {
  const auto t0 = std::chrono::steady_clock::now();
  const std::int64_t block = pow8(n);
  std::vector<std::int64_t> words;
  words.reserve(static_cast<size_t>(2 * block));
  for (std::int64_t j = 0; j < block; ++j) words.push_back(j);              // 1.W_n
  for (std::int64_t j = 0; j < block; ++j) words.push_back(7 * block + j);  // 8.W_n
  const CellGraph sub = build_cell_graph_on(std::move(words), n + 1, CellAdjacency::kFull, budget);

  ConstraintSpec spec;
  MeanConstraint ma, mb;
  for (std::int32_t v = 0; v < static_cast<std::int32_t>(block); ++v) ma.subset.push_back(v);
  for (std::int32_t v = static_cast<std::int32_t>(block); v < sub.g.vertex_count; ++v)
    mb.subset.push_back(v);
  ma.target = 1.0;
  mb.target = 0.0;
  spec.means = {ma, mb};
  SolveReport rep = solve_mean_constrained(sub.g, spec, p, opts);

  PoincareResult res;
  res.kind = "sigma";
  res.n = n;
  res.p = p;
  res.value = 1.0 / rep.energy;
  res.certificate = std::move(rep.minimizer);
  res.is_lower_bound = false;
  res.converged = rep.converged;
  res.wall_ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                    std::chrono::steady_clock::now() - t0)
                    .count();
  return res;
}

// lambda by Rayleigh-quotient ascent with uniform weights; a certified lower
// bound (the sup is nonconvex for p != 2).
inline PoincareResult lambda(int n, double p, const SolverOptions& opts = {},
                             std::int64_t budget = kDefaultVertexBudget) {
  const auto t0 = std::chrono::steady_clock::now();
  const CellGraph g = build_cell_graph(n, CellAdjacency::kFull, budget);
  const std::vector<double> nu(static_cast<size_t>(g.g.vertex_count),
                               1.0 / static_cast<double>(pow8(n)));
  RayleighReport rr = rayleigh_max(g.g, nu, p, opts);

  PoincareResult res;
  res.kind = "lambda";
  res.n = n;
  res.p = p;
  res.value = rr.value;
  res.certificate = std::move(rr.maximizer);
  res.is_lower_bound = true;
  res.wall_ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                    std::chrono::steady_clock::now() - t0)
                    .count();
  return res;
}

struct PoincareRelationRow {
  int n = 0;
  double lambda = 0.0;
  double lambda_star = 0.0;
  double sigma = 0.0;
  double c_lr = 0.0;                 // C_p^{(n)}(L<->R)
  double ratio_lambda_sigma = 0.0;   // lambda / sigma
  double ratio_lstar_lambda = 0.0;   // lambda_* / lambda
  double product_lambda_clr = 0.0;   // lambda * C (Knight-Move diagnostic)
  bool ok = false;
};

struct PoincareRelationTable {
  double p = 2.0;
  std::vector<PoincareRelationRow> rows;
  double spread_lambda_sigma = 0.0;  // max/min over rows
  double spread_lstar_lambda = 0.0;
  double spread_lambda_clr = 0.0;
  // witness ratios sigma^{(n)} / lambda_*^{(n+2)} where both are in range
  std::vector<std::pair<int, double>> sigma_vs_lambda_star_shift2;
};

inline PoincareRelationTable relation_table(int n_min, int n_max, double p,
                                            const SolverOptions& opts = {},
                                            std::int64_t budget = kDefaultVertexBudget) {
  if (n_min < 2) throw std::invalid_argument("relation table needs n >= 2");
  PoincareRelationTable t;
  t.p = p;
  std::vector<double> lstar_by_n(static_cast<size_t>(n_max + 3), 0.0);
  for (int n = n_min; n <= n_max; ++n) {
    PoincareRelationRow row;
    row.n = n;
    try {
      row.lambda = lambda(n, p, opts, budget).value;
      row.lambda_star = lambda_star(n, p, opts, budget).value;
      row.sigma = carpet::sigma(n, p, opts, budget).value;
      row.c_lr = conductance_lr_cell(n, p, opts, nullptr, nullptr, budget);
      row.ratio_lambda_sigma = row.lambda / row.sigma;
      row.ratio_lstar_lambda = row.lambda_star / row.lambda;
      row.product_lambda_clr = row.lambda * row.c_lr;
      row.ok = true;
      lstar_by_n[static_cast<size_t>(n)] = row.lambda_star;
    } catch (const std::exception&) {
      row.ok = false;
    }
    t.rows.push_back(row);
  }
  auto spread = [&](auto proj) {
    double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
    for (const auto& r : t.rows) {
      if (!r.ok) continue;
      lo = std::min(lo, proj(r));
      hi = std::max(hi, proj(r));
    }
    return lo > 0.0 && std::isfinite(lo) ? hi / lo : 0.0;
  };
  t.spread_lambda_sigma = spread([](const PoincareRelationRow& r) { return r.ratio_lambda_sigma; });
  t.spread_lstar_lambda = spread([](const PoincareRelationRow& r) { return r.ratio_lstar_lambda; });
  t.spread_lambda_clr = spread([](const PoincareRelationRow& r) { return r.product_lambda_clr; });
  for (const auto& r : t.rows) {
    if (!r.ok || r.n + 2 > n_max) continue;
    const double denom_val = lstar_by_n[static_cast<size_t>(r.n + 2)];
    if (denom_val > 0.0) t.sigma_vs_lambda_star_shift2.emplace_back(r.n, r.sigma / denom_val);
  }
  return t;
}

}  // namespace carpet
