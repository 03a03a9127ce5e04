#pragma once

// Independent p = 2 oracles (dense linear algebra, eigensolver, CG) used to
// verify the production solver. These deliberately share no code with the
// solve paths in include/carpet.

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <vector>

#include "carpet/graph.hpp"
#include "carpet/solver.hpp"

namespace test_oracles {

inline Eigen::MatrixXd dense_laplacian(const carpet::Graph& g) {
  Eigen::MatrixXd L = Eigen::MatrixXd::Zero(g.vertex_count, g.vertex_count);
  for (const auto& e : g.edges) {
    L(e[0], e[0]) += 1.0;
    L(e[1], e[1]) += 1.0;
    L(e[0], e[1]) -= 1.0;
    L(e[1], e[0]) -= 1.0;
  }
  return L;
}

// exact 2-harmonic extension of Dirichlet data by a dense solve
inline std::vector<double> dense_dirichlet_p2(const carpet::Graph& g,
                                              const carpet::ConstraintSpec& spec) {
  const Eigen::MatrixXd L = dense_laplacian(g);
  std::vector<char> fixed(static_cast<size_t>(g.vertex_count), 0);
  std::vector<double> value(static_cast<size_t>(g.vertex_count), 0.0);
  for (const auto& [v, val] : spec.dirichlet) {
    fixed[static_cast<size_t>(v)] = 1;
    value[static_cast<size_t>(v)] = val;
  }
  for (auto v : spec.zero_set) fixed[static_cast<size_t>(v)] = 1;

  std::vector<int> free_ids;
  for (int v = 0; v < g.vertex_count; ++v)
    if (!fixed[static_cast<size_t>(v)]) free_ids.push_back(v);
  const int nf = static_cast<int>(free_ids.size());
  Eigen::MatrixXd A(nf, nf);
  Eigen::VectorXd b = Eigen::VectorXd::Zero(nf);
  for (int i = 0; i < nf; ++i) {
    for (int j = 0; j < nf; ++j) A(i, j) = L(free_ids[static_cast<size_t>(i)], free_ids[static_cast<size_t>(j)]);
  }
  for (int i = 0; i < nf; ++i) {
    for (int v = 0; v < g.vertex_count; ++v)
      if (fixed[static_cast<size_t>(v)])
        b(i) -= L(free_ids[static_cast<size_t>(i)], v) * value[static_cast<size_t>(v)];
  }
  const Eigen::VectorXd x = A.ldlt().solve(b);
  std::vector<double> out = value;
  for (int i = 0; i < nf; ++i) out[static_cast<size_t>(free_ids[static_cast<size_t>(i)])] = x(i);
  return out;
}

// same extension through an iterative CG solve on the sparse system
inline std::vector<double> cg_dirichlet_p2(const carpet::Graph& g,
                                           const carpet::ConstraintSpec& spec,
                                           double tol = 1e-13) {
  std::vector<char> fixed(static_cast<size_t>(g.vertex_count), 0);
  std::vector<double> value(static_cast<size_t>(g.vertex_count), 0.0);
  for (const auto& [v, val] : spec.dirichlet) {
    fixed[static_cast<size_t>(v)] = 1;
    value[static_cast<size_t>(v)] = val;
  }
  for (auto v : spec.zero_set) fixed[static_cast<size_t>(v)] = 1;
  std::vector<int> local(static_cast<size_t>(g.vertex_count), -1);
  std::vector<int> free_ids;
  for (int v = 0; v < g.vertex_count; ++v)
    if (!fixed[static_cast<size_t>(v)]) {
      local[static_cast<size_t>(v)] = static_cast<int>(free_ids.size());
      free_ids.push_back(v);
    }
  const int nf = static_cast<int>(free_ids.size());
  std::vector<Eigen::Triplet<double>> trips;
  Eigen::VectorXd b = Eigen::VectorXd::Zero(nf);
  std::vector<double> diag(static_cast<size_t>(nf), 0.0);
  for (const auto& e : g.edges) {
    const int a = e[0], c = e[1];
    const int la = local[static_cast<size_t>(a)], lc = local[static_cast<size_t>(c)];
    if (la >= 0) diag[static_cast<size_t>(la)] += 1.0;
    if (lc >= 0) diag[static_cast<size_t>(lc)] += 1.0;
    if (la >= 0 && lc >= 0) {
      trips.emplace_back(la, lc, -1.0);
      trips.emplace_back(lc, la, -1.0);
    } else if (la >= 0) {
      b(la) += value[static_cast<size_t>(c)];
    } else if (lc >= 0) {
      b(lc) += value[static_cast<size_t>(a)];
    }
  }
  for (int i = 0; i < nf; ++i) trips.emplace_back(i, i, diag[static_cast<size_t>(i)]);
  Eigen::SparseMatrix<double> A(nf, nf);
  A.setFromTriplets(trips.begin(), trips.end());
  Eigen::ConjugateGradient<Eigen::SparseMatrix<double>, Eigen::Lower | Eigen::Upper> cg;
  cg.setTolerance(tol);
  cg.setMaxIterations(200000);
  cg.compute(A);
  const Eigen::VectorXd x = cg.solve(b);
  std::vector<double> out = value;
  for (int i = 0; i < nf; ++i) out[static_cast<size_t>(free_ids[static_cast<size_t>(i)])] = x(i);
  return out;
}

inline double energy_p2(const carpet::Graph& g, const std::vector<double>& f) {
  return carpet::p_energy_raw(g, f, 2.0);
}

// minimize f^T L f subject to mean constraints (and zero set) by the dense
// KKT saddle system
inline std::vector<double> dense_mean_constrained_p2(const carpet::Graph& g,
                                                     const carpet::ConstraintSpec& spec) {
  const Eigen::MatrixXd L = dense_laplacian(g);
  std::vector<char> fixed(static_cast<size_t>(g.vertex_count), 0);
  for (auto v : spec.zero_set) fixed[static_cast<size_t>(v)] = 1;
  std::vector<int> local(static_cast<size_t>(g.vertex_count), -1);
  std::vector<int> free_ids;
  for (int v = 0; v < g.vertex_count; ++v)
    if (!fixed[static_cast<size_t>(v)]) {
      local[static_cast<size_t>(v)] = static_cast<int>(free_ids.size());
      free_ids.push_back(v);
    }
  const int nf = static_cast<int>(free_ids.size());
  const int m = static_cast<int>(spec.means.size());
  Eigen::MatrixXd K = Eigen::MatrixXd::Zero(nf + m, nf + m);
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(nf + m);
  for (int i = 0; i < nf; ++i)
    for (int j = 0; j < nf; ++j)
      K(i, j) = 2.0 * L(free_ids[static_cast<size_t>(i)], free_ids[static_cast<size_t>(j)]);
  for (int c = 0; c < m; ++c) {
    const auto& mc = spec.means[static_cast<size_t>(c)];
    double wsum = 0.0;
    for (size_t k = 0; k < mc.subset.size(); ++k)
      wsum += mc.weights.empty() ? 1.0 : mc.weights[k];
    for (size_t k = 0; k < mc.subset.size(); ++k) {
      const int lv = local[static_cast<size_t>(mc.subset[k])];
      if (lv < 0) continue;  // pinned to zero
      const double w = (mc.weights.empty() ? 1.0 : mc.weights[k]) / wsum;
      K(nf + c, lv) = w;
      K(lv, nf + c) = w;
    }
    rhs(nf + c) = mc.target;
  }
  const Eigen::VectorXd sol = K.fullPivLu().solve(rhs);
  std::vector<double> out(static_cast<size_t>(g.vertex_count), 0.0);
  for (int i = 0; i < nf; ++i) out[static_cast<size_t>(free_ids[static_cast<size_t>(i)])] = sol(i);
  return out;
}

// second-smallest eigenvalue of the unweighted Laplacian
inline double lambda2_laplacian(const carpet::Graph& g) {
  const Eigen::MatrixXd L = dense_laplacian(g);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(L);
  return es.eigenvalues()(1);
}

}  // namespace test_oracles
