#pragma once

// Constrained minimization of discrete p-energy: Dirichlet problems,
// affine mean-constrained problems, and Rayleigh-quotient ascent.
//
// The main iteration is limited-memory BFGS over the free coordinates with a
// strong-Wolfe line search; Dirichlet data and zero sets enter as fixed
// coordinates, mean constraints through an exact affine-tangent projector.
// Nonlinear Gauss-Seidel sweeps polish Dirichlet solutions to the KKT
// tolerance. For p < 2 the energy is smoothed by (d^2+eps^2)^{p/2} with an
// eps-continuation down to a floor. Everything is deterministic for a fixed
// seed.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <deque>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "carpet/energy.hpp"
#include "carpet/graph.hpp"
#include "carpet/numeric.hpp"

namespace carpet {

struct SolverOptions {
  double tol_energy_rel = 1e-10;
  double tol_kkt = 1e-8;
  int max_sweeps = 100000;
  double smoothing_eps = 1e-3;        // p < 2 only; halved on stall
  double smoothing_eps_floor = 1e-12;
  std::uint64_t seed = 0;
  int restarts = 8;                   // rayleigh_max only
  bool random_init = false;           // uniqueness probes
  int lbfgs_memory = 10;
};

struct MeanConstraint {
  std::vector<std::int32_t> subset;
  std::vector<double> weights;  // empty = uniform
  double target = 0.0;
};

struct ConstraintSpec {
  std::vector<std::pair<std::int32_t, double>> dirichlet;
  std::vector<MeanConstraint> means;
  std::vector<std::int32_t> zero_set;
};

struct SolveReport {
  std::vector<double> minimizer;
  double energy = 0.0;  // true p-energy of the minimizer (no smoothing)
  long iterations = 0;
  double kkt_residual = 0.0;
  bool converged = false;
  long wall_ms = 0;
  SolverOptions options_echo;
};

struct SolverError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

namespace detail {

class ConstrainedProblem {
 public:
  ConstrainedProblem(const Graph& g, double p) : g_(g), p_(p) {
    fixed_.assign(static_cast<size_t>(g.vertex_count), 0);
  }

  void fix(std::int32_t v, double value) {
    fixed_[static_cast<size_t>(v)] = 1;
    fixed_value_.emplace_back(v, value);
  }

  void add_mean(const MeanConstraint& c) { means_.push_back(c); }

  const Graph& graph() const { return g_; }
  double p() const { return p_; }
  bool is_fixed(std::int32_t v) const { return fixed_[static_cast<size_t>(v)] != 0; }

  // assemble constraint rows over free coordinates and the Gram inverse
  void prepare() {
    rows_.clear();
    for (const auto& c : means_) {
      Row r;
      double wsum = 0.0;
      for (size_t k = 0; k < c.subset.size(); ++k) {
        const double w = c.weights.empty() ? 1.0 : c.weights[k];
        wsum += w;
      }
      for (size_t k = 0; k < c.subset.size(); ++k) {
        const double w = (c.weights.empty() ? 1.0 : c.weights[k]) / wsum;
        // fixed vertices only ever carry value 0 here (zero sets), so they
        // drop out of the constraint row without shifting the target
        if (!is_fixed(c.subset[k])) {
          r.idx.push_back(c.subset[k]);
          r.w.push_back(w);
        }
      }
      // row_dot merges two sorted supports
      std::vector<size_t> order(r.idx.size());
      for (size_t k = 0; k < order.size(); ++k) order[k] = k;
      std::sort(order.begin(), order.end(),
                [&](size_t a, size_t b) { return r.idx[a] < r.idx[b]; });
      Row sorted;
      sorted.target = c.target;
      for (size_t k : order) {
        sorted.idx.push_back(r.idx[k]);
        sorted.w.push_back(r.w[k]);
      }
      rows_.push_back(std::move(sorted));
    }
    const size_t m = rows_.size();
    gram_.assign(m * m, 0.0);
    for (size_t i = 0; i < m; ++i)
      for (size_t j = 0; j < m; ++j) gram_[i * m + j] = row_dot(rows_[i], rows_[j]);
    gram_inv_ = invert(gram_, m);
  }

  void apply_fixed(std::vector<double>* f) const {
    for (const auto& [v, val] : fixed_value_) (*f)[static_cast<size_t>(v)] = val;
  }

  // exact projection of a point onto the affine feasible set (free coords)
  void project_point(std::vector<double>* f) const {
    apply_fixed(f);
    if (rows_.empty()) return;
    const size_t m = rows_.size();
    std::vector<double> resid(m);
    for (size_t i = 0; i < m; ++i) resid[i] = rows_[i].target - row_apply(rows_[i], *f);
    const std::vector<double> coef = mat_vec(gram_inv_, resid, m);
    for (size_t i = 0; i < m; ++i)
      for (size_t k = 0; k < rows_[i].idx.size(); ++k)
        (*f)[static_cast<size_t>(rows_[i].idx[k])] += coef[i] * rows_[i].w[k];
  }

  // tangent-space projection of a gradient (zero at fixed, orthogonal to rows)
  void project_gradient(std::vector<double>* grad) const {
    for (std::int32_t v = 0; v < g_.vertex_count; ++v)
      if (is_fixed(v)) (*grad)[static_cast<size_t>(v)] = 0.0;
    if (rows_.empty()) return;
    const size_t m = rows_.size();
    std::vector<double> dots(m);
    for (size_t i = 0; i < m; ++i) dots[i] = row_apply(rows_[i], *grad);
    const std::vector<double> coef = mat_vec(gram_inv_, dots, m);
    for (size_t i = 0; i < m; ++i)
      for (size_t k = 0; k < rows_[i].idx.size(); ++k)
        (*grad)[static_cast<size_t>(rows_[i].idx[k])] -= coef[i] * rows_[i].w[k];
  }

  double feasibility_error(const std::vector<double>& f) const {
    double e = 0.0;
    for (const auto& r : rows_) e = std::max(e, std::abs(row_apply(r, f) - r.target));
    for (const auto& [v, val] : fixed_value_)
      e = std::max(e, std::abs(f[static_cast<size_t>(v)] - val));
    return e;
  }

  bool has_means() const { return !rows_.empty(); }

 private:
  struct Row {
    std::vector<std::int32_t> idx;
    std::vector<double> w;
    double target = 0.0;
  };

  static double row_dot(const Row& a, const Row& b) {
    // rows are short; quadratic scan only for distinct rows of small support
    double s = 0.0;
    size_t i = 0, j = 0;
    // assumes idx sorted ascending (true for our constraint builders)
    while (i < a.idx.size() && j < b.idx.size()) {
      if (a.idx[i] < b.idx[j])
        ++i;
      else if (a.idx[i] > b.idx[j])
        ++j;
      else {
        s += a.w[i] * b.w[j];
        ++i;
        ++j;
      }
    }
    return s;
  }

  static double row_apply(const Row& r, const std::vector<double>& f) {
    CompensatedSum s;
    for (size_t k = 0; k < r.idx.size(); ++k)
      s.add(r.w[k] * f[static_cast<size_t>(r.idx[k])]);
    return s.value();
  }

  static std::vector<double> invert(const std::vector<double>& a, size_t m) {
    // tiny dense inverse by Gauss-Jordan; m is 0, 1 or 2 in practice
    std::vector<double> aug(m * 2 * m, 0.0);
    for (size_t i = 0; i < m; ++i) {
      for (size_t j = 0; j < m; ++j) aug[i * 2 * m + j] = a[i * m + j];
      aug[i * 2 * m + m + i] = 1.0;
    }
    for (size_t c = 0; c < m; ++c) {
      size_t piv = c;
      for (size_t r = c + 1; r < m; ++r)
        if (std::abs(aug[r * 2 * m + c]) > std::abs(aug[piv * 2 * m + c])) piv = r;
      if (std::abs(aug[piv * 2 * m + c]) < 1e-14)
        throw SolverError("infeasible or dependent mean constraints");
      if (piv != c)
        for (size_t j = 0; j < 2 * m; ++j) std::swap(aug[piv * 2 * m + j], aug[c * 2 * m + j]);
      const double d = aug[c * 2 * m + c];
      for (size_t j = 0; j < 2 * m; ++j) aug[c * 2 * m + j] /= d;
      for (size_t r = 0; r < m; ++r) {
        if (r == c) continue;
        const double mult = aug[r * 2 * m + c];
        for (size_t j = 0; j < 2 * m; ++j) aug[r * 2 * m + j] -= mult * aug[c * 2 * m + j];
      }
    }
    std::vector<double> inv(m * m);
    for (size_t i = 0; i < m; ++i)
      for (size_t j = 0; j < m; ++j) inv[i * m + j] = aug[i * 2 * m + m + j];
    return inv;
  }

  static std::vector<double> mat_vec(const std::vector<double>& a, const std::vector<double>& x,
                                     size_t m) {
    std::vector<double> y(m, 0.0);
    for (size_t i = 0; i < m; ++i)
      for (size_t j = 0; j < m; ++j) y[i] += a[i * m + j] * x[j];
    return y;
  }

  const Graph& g_;
  double p_;
  std::vector<char> fixed_;
  std::vector<std::pair<std::int32_t, double>> fixed_value_;
  std::vector<MeanConstraint> means_;
  std::vector<Row> rows_;
  std::vector<double> gram_, gram_inv_;
};

inline double dot(const std::vector<double>& a, const std::vector<double>& b) {
  CompensatedSum s;
  for (size_t i = 0; i < a.size(); ++i) s.add(a[i] * b[i]);
  return s.value();
}

inline double max_abs(const std::vector<double>& a) {
  double m = 0.0;
  for (double v : a) m = std::max(m, std::abs(v));
  return m;
}

struct MinimizeResult {
  double energy_smoothed = 0.0;
  double kkt = 0.0;
  long iterations = 0;
  bool converged = false;
};

// L-BFGS with projected gradients; every iterate stays on the affine
// feasible set because directions live in its tangent space.
inline MinimizeResult lbfgs_minimize(const ConstrainedProblem& prob, std::vector<double>* f,
                                     double eps, double tol_energy_rel, double tol_kkt,
                                     int max_iters, int memory) {
  const Graph& g = prob.graph();
  const double p = prob.p();
  MinimizeResult res;

  auto eval = [&](const std::vector<double>& x, std::vector<double>* grad) {
    if (grad) {
      *grad = p_energy_gradient(g, x, p, eps);
      prob.project_gradient(grad);
    }
    return p_energy_raw(g, x, p, eps);
  };

  std::vector<double> grad;
  double fx = eval(*f, &grad);
  double kkt = max_abs(grad);

  std::deque<std::vector<double>> s_hist, y_hist;
  std::deque<double> rho_hist;
  std::vector<double> dir(f->size());
  double prev_gamma = 1.0;

  for (int it = 0; it < max_iters; ++it) {
    if (kkt <= tol_kkt && it > 0) {
      res.converged = true;
      break;
    }
    if (kkt == 0.0) {  // already stationary (e.g. constant data)
      res.converged = true;
      break;
    }

    // two-loop recursion
    dir = grad;
    std::vector<double> alpha(s_hist.size());
    for (size_t i = s_hist.size(); i-- > 0;) {
      alpha[i] = rho_hist[i] * dot(s_hist[i], dir);
      for (size_t k = 0; k < dir.size(); ++k) dir[k] -= alpha[i] * y_hist[i][k];
    }
    const double gamma = s_hist.empty() ? prev_gamma : dot(s_hist.back(), y_hist.back()) /
                                                           dot(y_hist.back(), y_hist.back());
    for (auto& v : dir) v *= gamma;
    for (size_t i = 0; i < s_hist.size(); ++i) {
      const double beta = rho_hist[i] * dot(y_hist[i], dir);
      for (size_t k = 0; k < dir.size(); ++k) dir[k] += (alpha[i] - beta) * s_hist[i][k];
    }
    for (auto& v : dir) v = -v;

    double dg = dot(dir, grad);
    if (dg >= 0.0) {  // not a descent direction; reset
      s_hist.clear();
      y_hist.clear();
      rho_hist.clear();
      for (size_t k = 0; k < dir.size(); ++k) dir[k] = -grad[k];
      dg = -dot(grad, grad);
    }

    // strong Wolfe line search (bracket + zoom)
    const double c1 = 1e-4, c2 = 0.9;
    double t = 1.0, t_prev = 0.0;
    double fx_prev = fx;
    std::vector<double> x_try(f->size());
    std::vector<double> g_try;
    double fx_try = fx, dg_try = dg;
    bool found = false;
    double lo = 0.0, hi = -1.0;  // hi < 0 means no bracket yet
    double f_lo = fx;

    auto probe = [&](double step) {
      for (size_t k = 0; k < x_try.size(); ++k) x_try[k] = (*f)[k] + step * dir[k];
      fx_try = eval(x_try, &g_try);
      dg_try = dot(g_try, dir);
    };

    for (int ls = 0; ls < 60 && !found; ++ls) {
      probe(t);
      if (fx_try > fx + c1 * t * dg || (ls > 0 && fx_try >= fx_prev)) {
        lo = t_prev;
        f_lo = fx_prev;
        hi = t;
        break;
      }
      if (std::abs(dg_try) <= -c2 * dg) {
        found = true;
        break;
      }
      if (dg_try >= 0.0) {
        lo = t;
        f_lo = fx_try;
        hi = t_prev;
        break;
      }
      t_prev = t;
      fx_prev = fx_try;
      t *= 2.0;
    }
    if (!found && hi >= 0.0) {
      for (int z = 0; z < 60 && !found; ++z) {
        t = 0.5 * (lo + hi);
        probe(t);
        if (fx_try > fx + c1 * t * dg || fx_try >= f_lo) {
          hi = t;
        } else {
          if (std::abs(dg_try) <= -c2 * dg) {
            found = true;
            break;
          }
          if (dg_try * (hi - lo) >= 0.0) hi = lo;
          lo = t;
          f_lo = fx_try;
        }
        if (std::abs(hi - lo) <= 1e-18 * std::max(1.0, std::abs(lo))) break;
      }
    }
    if (!found && !(fx_try < fx)) {
      // no progress possible along this direction at double precision
      res.converged = kkt <= tol_kkt * 16 || kkt == 0.0;
      break;
    }

    const double fx_new = fx_try;
    ++res.iterations;

    std::vector<double> s(f->size()), y(f->size());
    for (size_t k = 0; k < s.size(); ++k) {
      s[k] = x_try[k] - (*f)[k];
      y[k] = g_try[k] - grad[k];
    }
    const double sy = dot(s, y);
    if (sy > 1e-300) {
      if (static_cast<int>(s_hist.size()) == memory) {
        s_hist.pop_front();
        y_hist.pop_front();
        rho_hist.pop_front();
      }
      prev_gamma = sy / dot(y, y);
      s_hist.push_back(std::move(s));
      y_hist.push_back(std::move(y));
      rho_hist.push_back(1.0 / sy);
    }

    f->swap(x_try);
    grad.swap(g_try);
    const double decrease = fx - fx_new;
    fx = fx_new;
    kkt = max_abs(grad);

    if (kkt <= tol_kkt &&
        decrease <= tol_energy_rel * std::max(std::abs(fx), 1e-300)) {
      res.converged = true;
      break;
    }
  }

  res.energy_smoothed = fx;
  res.kkt = kkt;
  return res;
}

// exact 1D convex minimization at a vertex: min_t sum_y phi(t - f_y)
inline double gauss_seidel_vertex(const Graph& g, const std::vector<double>& f, std::int32_t v,
                                  double p, double eps) {
  const auto* b = g.nbr_begin(v);
  const auto* e = g.nbr_end(v);
  if (b == e) return f[static_cast<size_t>(v)];
  if (p == 2.0 && eps == 0.0) {
    CompensatedSum s;
    for (auto it = b; it != e; ++it) s.add(f[static_cast<size_t>(*it)]);
    return s.value() / static_cast<double>(e - b);
  }
  double lo = f[static_cast<size_t>(*b)], hi = lo;
  for (auto it = b; it != e; ++it) {
    lo = std::min(lo, f[static_cast<size_t>(*it)]);
    hi = std::max(hi, f[static_cast<size_t>(*it)]);
  }
  if (lo == hi) return lo;
  auto deriv = [&](double t) {
    double d = 0.0;
    for (auto it = b; it != e; ++it) d += power_abs_deriv(t - f[static_cast<size_t>(*it)], p, eps);
    return d;
  };
  double t = std::min(hi, std::max(lo, f[static_cast<size_t>(v)]));
  // safeguarded Newton on the monotone derivative
  for (int k = 0; k < 100; ++k) {
    const double d = deriv(t);
    if (d > 0)
      hi = t;
    else if (d < 0)
      lo = t;
    else
      return t;
    const double h = 1e-7 * (hi - lo) + 1e-300;
    const double d2 = (deriv(t + h) - d) / h;
    double t_new = d2 > 0 ? t - d / d2 : t;
    if (!(t_new > lo && t_new < hi)) t_new = 0.5 * (lo + hi);
    if (std::abs(t_new - t) <= 1e-16 * std::max(1.0, std::abs(t))) return t_new;
    t = t_new;
  }
  return t;
}

inline long gauss_seidel_polish(const ConstrainedProblem& prob, std::vector<double>* f,
                                double eps, double tol_kkt, int max_sweeps, double* kkt_out) {
  const Graph& g = prob.graph();
  long sweeps = 0;
  for (; sweeps < max_sweeps; ++sweeps) {
    for (std::int32_t v = 0; v < g.vertex_count; ++v) {
      if (prob.is_fixed(v)) continue;
      (*f)[static_cast<size_t>(v)] = gauss_seidel_vertex(g, *f, v, prob.p(), eps);
    }
    std::vector<double> grad = p_energy_gradient(g, *f, prob.p(), eps);
    prob.project_gradient(&grad);
    *kkt_out = max_abs(grad);
    if (*kkt_out <= tol_kkt) {
      ++sweeps;
      break;
    }
  }
  return sweeps;
}

inline std::vector<double> eps_schedule(double p, double eps0, double floor) {
  std::vector<double> sched;
  if (p >= 2.0) {
    sched.push_back(0.0);
    return sched;
  }
  for (double e = eps0; e > floor; e *= 0.5) sched.push_back(e);
  sched.push_back(floor);
  return sched;
}

}  // namespace detail

// p-harmonic extension of Dirichlet data: the unique minimizer of E_p among
// functions agreeing with the fixed values.
inline SolveReport solve_dirichlet(const Graph& g, const ConstraintSpec& spec, double p,
                                   const SolverOptions& opts = {},
                                   const std::vector<double>* warm_start = nullptr) {
  if (p <= 1.0) throw std::invalid_argument("p must exceed 1");
  if (spec.dirichlet.empty() && spec.zero_set.empty())
    throw std::invalid_argument("dirichlet data required");
  if (!spec.means.empty())
    throw std::invalid_argument("solve_dirichlet does not take mean constraints");
  const auto t0 = std::chrono::steady_clock::now();

  detail::ConstrainedProblem prob(g, p);
  for (const auto& [v, val] : spec.dirichlet) prob.fix(v, val);
  for (auto v : spec.zero_set) prob.fix(v, 0.0);
  prob.prepare();

  // every free vertex must see some fixed vertex through the graph
  std::vector<std::int32_t> seeds;
  for (std::int32_t v = 0; v < g.vertex_count; ++v)
    if (prob.is_fixed(v)) seeds.push_back(v);
  const auto dist = bfs_distances(g, seeds);
  for (std::int32_t v = 0; v < g.vertex_count; ++v)
    if (dist[static_cast<size_t>(v)] == kUnreached)
      throw SolverError("underdetermined component: free vertices see no boundary data");

  std::vector<double> f(static_cast<size_t>(g.vertex_count), 0.0);
  if (warm_start != nullptr) {
    f = *warm_start;
    prob.apply_fixed(&f);
  } else if (opts.random_init) {
    std::mt19937_64 rng(opts.seed);
    double lo = spec.dirichlet.empty() ? 0.0 : spec.dirichlet.front().second, hi = lo;
    for (const auto& [v, val] : spec.dirichlet) {
      lo = std::min(lo, val);
      hi = std::max(hi, val);
    }
    if (!spec.zero_set.empty()) {
      lo = std::min(lo, 0.0);
      hi = std::max(hi, 0.0);
    }
    std::uniform_real_distribution<double> u(lo, hi == lo ? lo + 1.0 : hi);
    for (auto& x : f) x = u(rng);
    prob.apply_fixed(&f);
  } else {
    // interpolate boundary classes by inverse BFS distance
    std::vector<std::pair<double, std::vector<std::int32_t>>> classes;
    for (const auto& [v, val] : spec.dirichlet) {
      bool hit = false;
      for (auto& c : classes)
        if (c.first == val) {
          c.second.push_back(v);
          hit = true;
          break;
        }
      if (!hit) classes.push_back({val, {v}});
    }
    if (!spec.zero_set.empty()) {
      bool hit = false;
      for (auto& c : classes)
        if (c.first == 0.0) {
          for (auto v : spec.zero_set) c.second.push_back(v);
          hit = true;
          break;
        }
      if (!hit) classes.push_back({0.0, spec.zero_set});
    }
    if (classes.size() == 1) {
      for (auto& x : f) x = classes.front().first;
    } else {
      std::vector<std::vector<std::int32_t>> dists;
      for (const auto& c : classes) dists.push_back(bfs_distances(g, c.second));
      for (std::int32_t v = 0; v < g.vertex_count; ++v) {
        double num = 0.0, den = 0.0;
        for (size_t c = 0; c < classes.size(); ++c) {
          const double w = 1.0 / (1.0 + static_cast<double>(dists[c][static_cast<size_t>(v)]));
          num += classes[c].first * w;
          den += w;
        }
        f[static_cast<size_t>(v)] = num / den;
      }
    }
    prob.apply_fixed(&f);
  }

  SolveReport rep;
  rep.options_echo = opts;
  const auto sched = detail::eps_schedule(p, opts.smoothing_eps, opts.smoothing_eps_floor);
  long iters = 0;
  detail::MinimizeResult last;
  for (size_t si = 0; si < sched.size(); ++si) {
    const bool final_stage = si + 1 == sched.size();
    const double stage_tol = final_stage ? opts.tol_energy_rel : 1e-6;
    const long remaining = opts.max_sweeps - iters;
    if (remaining <= 0) break;
    const int stage_iters = static_cast<int>(
        final_stage ? remaining : std::min(remaining, std::max<long>(50, opts.max_sweeps / 50)));
    last = detail::lbfgs_minimize(prob, &f, sched[si], stage_tol, opts.tol_kkt,
                                  stage_iters, opts.lbfgs_memory);
    iters += last.iterations;
  }
  double kkt = last.kkt;
  if (kkt > opts.tol_kkt) {
    iters += detail::gauss_seidel_polish(prob, &f, sched.back(), opts.tol_kkt,
                                         std::min(200, opts.max_sweeps), &kkt);
  }

  rep.minimizer = std::move(f);
  rep.energy = p_energy_raw(g, rep.minimizer, p);
  rep.iterations = iters;
  rep.kkt_residual = kkt;
  rep.converged = last.converged && kkt <= opts.tol_kkt;
  rep.wall_ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                    std::chrono::steady_clock::now() - t0)
                    .count();
  return rep;
}

// C_p(A, B): energy of the minimizer with f = 1 on A, f = 0 on B.
inline double conductance(const Graph& g, const std::vector<std::int32_t>& a,
                          const std::vector<std::int32_t>& b, double p,
                          const SolverOptions& opts = {},
                          const std::vector<double>* warm_start = nullptr,
                          SolveReport* report_out = nullptr) {
  if (a.empty() || b.empty()) throw std::invalid_argument("conductance: empty terminal set");
  ConstraintSpec spec;
  for (auto v : a) spec.dirichlet.emplace_back(v, 1.0);
  for (auto v : b) spec.dirichlet.emplace_back(v, 0.0);
  for (auto v : a)
    for (auto w : b)
      if (v == w) throw std::invalid_argument("conductance: terminal sets intersect");
  SolveReport rep = solve_dirichlet(g, spec, p, opts, warm_start);
  const double e = rep.energy;
  if (report_out) *report_out = std::move(rep);
  return e;
}

// Minimizer of E_p over an affine set of mean constraints (optionally with a
// pinned zero set).
inline SolveReport solve_mean_constrained(const Graph& g, const ConstraintSpec& spec, double p,
                                          const SolverOptions& opts = {}) {
  if (p <= 1.0) throw std::invalid_argument("p must exceed 1");
  if (spec.means.empty()) throw std::invalid_argument("mean constraints required");
  if (!spec.dirichlet.empty())
    throw std::invalid_argument("use solve_dirichlet for pure Dirichlet data");
  const auto t0 = std::chrono::steady_clock::now();

  detail::ConstrainedProblem prob(g, p);
  for (auto v : spec.zero_set) prob.fix(v, 0.0);
  for (const auto& c : spec.means) {
    if (c.subset.empty()) throw std::invalid_argument("mean constraint over empty set");
    if (!c.weights.empty() && c.weights.size() != c.subset.size())
      throw std::invalid_argument("weights misaligned");
    prob.add_mean(c);
  }
  prob.prepare();

  std::vector<double> f(static_cast<size_t>(g.vertex_count), 0.0);
  if (opts.random_init) {
    std::mt19937_64 rng(opts.seed);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (auto& x : f) x = u(rng);
  }
  prob.project_point(&f);
  if (prob.feasibility_error(f) > 1e-9)
    throw SolverError("infeasible constraints");

  SolveReport rep;
  rep.options_echo = opts;
  const auto sched = detail::eps_schedule(p, opts.smoothing_eps, opts.smoothing_eps_floor);
  long iters = 0;
  detail::MinimizeResult last;
  for (size_t si = 0; si < sched.size(); ++si) {
    const bool final_stage = si + 1 == sched.size();
    const long remaining = opts.max_sweeps - iters;
    if (remaining <= 0) break;
    const int stage_iters = static_cast<int>(
        final_stage ? remaining : std::min(remaining, std::max<long>(50, opts.max_sweeps / 50)));
    last = detail::lbfgs_minimize(prob, &f, sched[si],
                                  final_stage ? opts.tol_energy_rel : 1e-6, opts.tol_kkt,
                                  stage_iters, opts.lbfgs_memory);
    iters += last.iterations;
    prob.project_point(&f);  // kill accumulated drift
  }

  std::vector<double> grad = p_energy_gradient(g, f, p, sched.back());
  prob.project_gradient(&grad);

  rep.minimizer = std::move(f);
  rep.energy = p_energy_raw(g, rep.minimizer, p);
  rep.iterations = iters;
  rep.kkt_residual = detail::max_abs(grad);
  rep.converged = last.converged && rep.kkt_residual <= opts.tol_kkt;
  rep.wall_ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                    std::chrono::steady_clock::now() - t0)
                    .count();
  return rep;
}

struct RayleighReport {
  double value = 0.0;  // best quotient found; a certified lower bound
  std::vector<double> maximizer;
  long iterations = 0;
  int restarts = 0;
  long wall_ms = 0;
};

// Best-found value of sup sum nu|f - <f>|^p / E_p(f) by normalized gradient
// ascent from several random seeds. A lower bound for p != 2.
inline RayleighReport rayleigh_max(const Graph& g, const std::vector<double>& nu, double p,
                                   const SolverOptions& opts = {}) {
  if (static_cast<std::int32_t>(nu.size()) != g.vertex_count)
    throw std::invalid_argument("weights misaligned");
  const auto t0 = std::chrono::steady_clock::now();
  double nu_total = 0.0;
  for (double w : nu) {
    if (w <= 0.0) throw std::invalid_argument("weights must be positive");
    nu_total += w;
  }

  RayleighReport best;
  best.restarts = std::max(1, opts.restarts);

  auto mean_nu = [&](const std::vector<double>& f) {
    CompensatedSum s;
    for (size_t i = 0; i < f.size(); ++i) s.add(nu[i] * f[i]);
    return s.value() / nu_total;
  };
  auto numerator = [&](const std::vector<double>& f, double m) {
    CompensatedSum s;
    for (size_t i = 0; i < f.size(); ++i) s.add(nu[i] * power_abs(f[i] - m, p));
    return s.value();
  };

  for (int r = 0; r < best.restarts; ++r) {
    std::mt19937_64 rng(opts.seed + static_cast<std::uint64_t>(r) * 0x9e3779b97f4a7c15ull);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::vector<double> f(static_cast<size_t>(g.vertex_count));
    for (auto& x : f) x = u(rng);

    // center and normalize E_p = 1
    auto renorm = [&](std::vector<double>* v) {
      const double m = mean_nu(*v);
      for (auto& x : *v) x -= m;
      const double e = p_energy_raw(g, *v, p);
      if (e <= 0.0) return false;
      const double s = std::pow(e, -1.0 / p);
      for (auto& x : *v) x *= s;
      return true;
    };
    if (!renorm(&f)) continue;

    double q = numerator(f, 0.0);
    double step = 1.0;
    int stall = 0;
    for (int it = 0; it < opts.max_sweeps && stall < 8; ++it) {
      // gradient of the quotient at E_p(f) = 1, mean already projected out
      const double m = mean_nu(f);
      std::vector<double> gn(f.size());
      CompensatedSum phi_sum;
      for (size_t i = 0; i < f.size(); ++i)
        phi_sum.add(nu[i] * power_abs_deriv(f[i] - m, p));
      const double correction = phi_sum.value() / nu_total;
      for (size_t i = 0; i < f.size(); ++i)
        gn[i] = nu[i] * power_abs_deriv(f[i] - m, p) - nu[i] * correction;
      const std::vector<double> gd = p_energy_gradient(g, f, p);
      std::vector<double> dir(f.size());
      for (size_t i = 0; i < f.size(); ++i) dir[i] = gn[i] - q * gd[i];
      const double dn = detail::max_abs(dir);
      if (dn == 0.0) break;

      bool improved = false;
      for (int bt = 0; bt < 50; ++bt) {
        std::vector<double> cand(f.size());
        for (size_t i = 0; i < f.size(); ++i) cand[i] = f[i] + step * dir[i];
        if (!renorm(&cand)) {
          step *= 0.5;
          continue;
        }
        const double qc = numerator(cand, 0.0);
        if (qc > q) {
          improved = true;
          const double rel = (qc - q) / std::max(qc, 1e-300);
          f.swap(cand);
          q = qc;
          step *= 2.0;
          ++best.iterations;
          if (rel < 1e-13)
            ++stall;
          else
            stall = 0;
          break;
        }
        step *= 0.5;
        if (step < 1e-280) break;
      }
      if (!improved) break;
    }
    if (q > best.value) {
      best.value = q;
      best.maximizer = f;
    }
  }
  best.wall_ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                     std::chrono::steady_clock::now() - t0)
                     .count();
  return best;
}

}  // namespace carpet
