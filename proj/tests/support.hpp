#pragma once

// shared test helpers: seeded random functions and independent oracles that
// never touch the production solve paths

#include <cstdint>
#include <random>
#include <vector>

#include "carpet/energy.hpp"
#include "carpet/graph.hpp"

namespace test_support {

inline std::vector<double> random_function(std::int32_t n, std::uint64_t seed, double lo = -1.0,
                                           double hi = 1.0) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(lo, hi);
  std::vector<double> f(static_cast<size_t>(n));
  for (auto& x : f) x = u(rng);
  return f;
}

// central finite differences of the p-energy
inline std::vector<double> fd_energy_gradient(const carpet::Graph& g,
                                              const std::vector<double>& f, double p,
                                              double h = 1e-6) {
  std::vector<double> grad(f.size());
  std::vector<double> work = f;
  for (size_t i = 0; i < f.size(); ++i) {
    work[i] = f[i] + h;
    const double ep = carpet::p_energy_raw(g, work, p);
    work[i] = f[i] - h;
    const double em = carpet::p_energy_raw(g, work, p);
    work[i] = f[i];
    grad[i] = (ep - em) / (2.0 * h);
  }
  return grad;
}

// tiny path graph: n vertices in a line
inline carpet::Graph path_graph(std::int32_t n) {
  carpet::Graph g;
  g.vertex_count = n;
  for (std::int32_t i = 0; i + 1 < n; ++i) g.add_edge(i, i + 1);
  g.finalize();
  return g;
}

}  // namespace test_support
