// Command-line front end: graph construction, p-harmonic solves, conductance
// and scaling sweeps, Poincare constants, energy measures and the pasted-
// function experiments, with a content-addressed run cache.
//
// Exit codes: 0 ok, 2 usage error, 3 vertex budget exceeded, 4 every sweep
// row failed, 5 solver did not converge (partial report still written).

#include <cstdio>
#include <functional>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "carpet/cache.hpp"
#include "carpet/io.hpp"
#include "carpet/measures.hpp"
#include "carpet/poincare.hpp"
#include "carpet/scaling.hpp"

namespace {

using namespace carpet;

constexpr int kExitUsage = 2;
constexpr int kExitBudget = 3;
constexpr int kExitAllRowsFailed = 4;
constexpr int kExitNoConvergence = 5;

struct Common {
  double p = 2.0;
  int n = 1;
  int m = 1;
  int M = 3;
  double tol = 0.0;  // 0 = solver default
  std::uint64_t seed = 0;
  std::string out;
  std::string cache_dir = RunCache::default_dir();
  std::int64_t budget = kDefaultVertexBudget;

  SolverOptions solver() const {
    SolverOptions o;
    if (tol > 0.0) {
      o.tol_energy_rel = tol;
      o.tol_kkt = tol;
    }
    o.seed = seed;
    return o;
  }
};

void add_common(CLI::App* cmd, Common* c, bool with_p = true) {
  if (with_p) cmd->add_option("--p", c->p, "energy exponent p > 1");
  cmd->add_option("--seed", c->seed, "RNG seed");
  cmd->add_option("--tol", c->tol, "solver tolerance override");
  cmd->add_option("--out", c->out, "output file");
  cmd->add_option("--cache-dir", c->cache_dir, "cache directory (or CARPET_CACHE_DIR)");
  cmd->add_option("--budget", c->budget, "vertex budget");
}

void emit(const Common& c, const json& j) {
  const std::string text = j.dump(2) + "\n";
  if (!c.out.empty()) {
    write_text_file(c.out, text);
  } else {
    std::cout << text;
  }
}

// run `compute` through the cache keyed by the canonical instance encoding
json cached_run(const Common& c, const json& canonical_obj,
                const std::function<json()>& compute) {
  const std::string canonical = canonical_obj.dump();
  RunCache cache(c.cache_dir);
  bool corrupt = false;
  if (auto hit = cache.lookup(canonical, &corrupt)) return *hit;
  if (corrupt) std::cerr << "warning: corrupted cache entry, recomputing\n";

  const auto t0 = std::chrono::steady_clock::now();
  RunRecord rec;
  rec.command = canonical;
  rec.instance_hash = content_hash(canonical);
  rec.result = compute();
  rec.versions = version_string();
  rec.seed = c.seed;
  rec.wall_ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                    std::chrono::steady_clock::now() - t0)
                    .count();
  const json out = to_json(rec);
  cache.store(canonical, out);
  return out;
}

json instance(const std::string& cmd, std::initializer_list<std::pair<std::string, json>> kv) {
  json j{{"cmd", cmd}, {"versions", version_string()}};
  for (const auto& [k, v] : kv) j[k] = v;
  return j;
}

// built-in function specs on a point graph
std::vector<double> make_point_function(const PointGraph& g, const std::string& spec, double p,
                                        const SolverOptions& opts, std::int64_t budget) {
  if (spec == "harmonic-lr") {
    SolveReport rep;
    conductance(g.g, g.left, g.right, p, opts, nullptr, &rep);
    return rep.minimizer;
  }
  if (spec == "coordinate-x" || spec == "coordinate-y") {
    std::vector<double> f(static_cast<size_t>(g.g.vertex_count));
    for (std::int32_t v = 0; v < g.g.vertex_count; ++v)
      f[static_cast<size_t>(v)] = spec == "coordinate-x" ? g.point_at(v).fx() : g.point_at(v).fy();
    return f;
  }
  if (spec == "h0" || spec == "h2") {
    const int k = spec == "h0" ? 0 : 2;
    return build_hn(g.level, k, p, opts, budget).values;
  }
  if (spec.rfind("random:", 0) == 0) {
    std::mt19937_64 rng(std::stoull(spec.substr(7)));
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<double> f(static_cast<size_t>(g.g.vertex_count));
    for (auto& x : f) x = u(rng);
    return f;
  }
  throw CLI::ValidationError("--f", "unknown function spec: " + spec);
}

int run_graph_build(const Common& c, const std::string& kind) {
  json j;
  std::int64_t nv = 0, ne = 0;
  if (kind == "cell" || kind == "cell-segment") {
    const CellGraph g = build_cell_graph(
        c.n, kind == "cell" ? CellAdjacency::kFull : CellAdjacency::kSegment, c.budget);
    nv = g.g.vertex_count;
    ne = static_cast<std::int64_t>(g.g.edges.size());
    j = to_json(g);
  } else if (kind == "point" || kind == "point-simple") {
    const PointGraph g = build_point_graph(
        c.n, kind == "point" ? PointKind::kModified : PointKind::kSimple, c.budget);
    nv = g.g.vertex_count;
    ne = static_cast<std::int64_t>(g.g.edges.size());
    j = to_json(g);
  } else if (kind == "chain") {
    const ChainGraph g = build_chain_graph(c.n, c.M, c.budget);
    nv = g.cells.g.vertex_count;
    ne = static_cast<std::int64_t>(g.cells.g.edges.size());
    j = to_json(g);
  } else {
    throw CLI::ValidationError("--kind", "unknown graph kind: " + kind);
  }
  if (!c.out.empty()) write_text_file(c.out, j.dump(2) + "\n");
  std::printf("vertices=%lld edges=%lld\n", static_cast<long long>(nv),
              static_cast<long long>(ne));
  return 0;
}

int run_solve_dirichlet(const Common& c, const std::string& kind) {
  const json key = instance("solve-dirichlet", {{"kind", kind},
                                                {"n", c.n},
                                                {"p", c.p},
                                                {"tol", c.tol},
                                                {"seed", c.seed}});
  const json rec = cached_run(c, key, [&]() {
    SolveReport rep;
    if (kind == "cell") {
      const CellGraph g = build_cell_graph(c.n, CellAdjacency::kFull, c.budget);
      conductance(g.g, g.left, g.right, c.p, c.solver(), nullptr, &rep);
    } else if (kind == "point") {
      const PointGraph g = build_point_graph(c.n, PointKind::kModified, c.budget);
      conductance(g.g, g.left, g.right, c.p, c.solver(), nullptr, &rep);
    } else {
      throw CLI::ValidationError("--kind", "solve dirichlet expects cell or point");
    }
    return to_json(rep, true);
  });
  emit(c, rec);
  return rec["result"].value("converged", true) ? 0 : kExitNoConvergence;
}

int run_conductance(const Common& c, const std::string& family) {
  const json key = instance("conductance", {{"family", family},
                                            {"n", c.n},
                                            {"m", c.m},
                                            {"M", c.M},
                                            {"p", c.p},
                                            {"tol", c.tol},
                                            {"seed", c.seed}});
  const json rec = cached_run(c, key, [&]() {
    json result;
    const SolverOptions opts = c.solver();
    switch (family_from_name(family)) {
      case ScalingFamily::kCellLR:
        result["value"] = conductance_lr_cell(c.n, c.p, opts, nullptr, nullptr, c.budget);
        break;
      case ScalingFamily::kPointLR:
        result["value"] = conductance_lr_point(c.n, c.p, opts, nullptr, c.budget);
        break;
      case ScalingFamily::kNeighborhood: {
        const auto nb = conductance_neighborhood(c.n, c.p, c.m, opts, c.budget);
        result["value"] = nb.value;
        result["witness"] = nb.witness.str();
        result["lower_bound"] = true;
        break;
      }
      case ScalingFamily::kChain:
        result["value"] = conductance_chain(c.n, c.M, c.p, opts, nullptr, c.budget);
        break;
      case ScalingFamily::kPointPair: {
        const PointGraph g = build_point_graph(c.n, PointKind::kModified, c.budget);
        result["value"] = conductance(g.g, {g.vertex_of(fixed_point(2))},
                                      {g.vertex_of(diagonal_midpoint(0))}, c.p, opts);
        break;
      }
    }
    result["family"] = family;
    result["n"] = c.n;
    result["p"] = c.p;
    return result;
  });
  emit(c, rec);
  return 0;
}

int run_scaling(const Common& c, std::vector<double> ps, const std::string& family, int n_min,
                int n_max, const std::string& json_out) {
  std::vector<ScalingTable> tables;
  bool any_ok = false;
  for (double p : ps) {
    Common cp = c;
    cp.p = p;
    // the whole table is one cached instance
    const json key = instance("scaling-rho", {{"family", family},
                                              {"p", p},
                                              {"n_min", n_min},
                                              {"n_max", n_max},
                                              {"m", c.m},
                                              {"M", c.M},
                                              {"tol", c.tol},
                                              {"seed", c.seed}});
    const json rec = cached_run(cp, key, [&]() {
      const ScalingTable t = estimate_rho(p, family_from_name(family), n_min, n_max,
                                          cp.solver(), c.m, c.M, c.budget);
      json j = to_json(t);
      j["options_echo"] = to_json(cp.solver());
      return j;
    });
    // rebuild the table from the (possibly cached) record for CSV emission
    const json& tj = rec["result"];
    ScalingTable t;
    t.p = tj["p"].get<double>();
    t.family = tj["family"].get<std::string>();
    for (const auto& row : tj["rows"]) {
      ScalingRow r;
      r.n = row["n"].get<int>();
      r.ok = row["ok"].get<bool>();
      r.value = row.contains("value") ? row["value"].get<double>() : 0.0;
      r.wall_ms = row["wall_ms"].get<long>();
      t.rows.push_back(r);
      if (row.contains("ratio"))
        t.ratios.push_back(row["ratio"].get<double>());
      else if (t.rows.size() > 1)
        t.ratios.push_back(std::numeric_limits<double>::quiet_NaN());
    }
    t.rho_hat_ratio = tj["rho_hat_ratio"].get<double>();
    t.rho_hat_fit = tj["rho_hat_fit"].get<double>();
    t.beta_hat_ratio = tj["beta_hat_ratio"].get<double>();
    t.beta_hat_fit = tj["beta_hat_fit"].get<double>();
    tables.push_back(t);
    for (const auto& r : t.rows) any_ok = any_ok || r.ok;
    std::printf("family=%s p=%g rho_ratio=%.6g rho_fit=%.6g beta_fit=%.6g\n", t.family.c_str(),
                t.p, t.rho_hat_ratio, t.rho_hat_fit, t.beta_hat_fit);
  }
  const std::string csv = scaling_table_csv(tables);
  if (!c.out.empty())
    write_text_file(c.out, csv);
  else
    std::cout << csv;
  if (!json_out.empty()) {
    json all = json::array();
    for (const auto& t : tables) all.push_back(to_json(t));
    write_text_file(json_out, all.dump(2) + "\n");
  }
  return any_ok ? 0 : kExitAllRowsFailed;
}

int run_poincare(const Common& c, const std::string& kind, int n_min, int n_max) {
  const json key = instance("poincare", {{"kind", kind},
                                         {"n", c.n},
                                         {"n_min", n_min},
                                         {"n_max", n_max},
                                         {"p", c.p},
                                         {"tol", c.tol},
                                         {"seed", c.seed}});
  const json rec = cached_run(c, key, [&]() {
    const SolverOptions opts = c.solver();
    if (kind == "relation") return to_json(relation_table(n_min, n_max, c.p, opts, c.budget));
    PoincareResult r;
    if (kind == "lambda")
      r = lambda(c.n, c.p, opts, c.budget);
    else if (kind == "lambda-star")
      r = lambda_star(c.n, c.p, opts, c.budget);
    else if (kind == "sigma")
      r = sigma(c.n, c.p, opts, c.budget);
    else
      throw CLI::ValidationError("--kind", "unknown poincare kind: " + kind);
    const std::string ref = (kind == "sigma")
                                ? "sigma-block-G" + std::to_string(c.n + 1)
                                : "cell-G" + std::to_string(c.n);
    return to_json(r, ref);
  });
  emit(c, rec);
  return 0;
}

int run_measure_energy(const Common& c, const std::string& fspec, double rho) {
  const json key = instance("measure-energy", {{"f", fspec},
                                               {"n", c.n},
                                               {"m", c.m},
                                               {"p", c.p},
                                               {"rho", rho},
                                               {"tol", c.tol},
                                               {"seed", c.seed}});
  const json rec = cached_run(c, key, [&]() {
    const PointGraph g = build_point_graph(c.n + c.m, PointKind::kModified, c.budget);
    const auto f = make_point_function(g, fspec, c.p, c.solver(), c.budget);
    const CellMeasure m = energy_measure(g, f, c.n, c.p, rho);
    json result = to_json(m);
    result["rescaled_energy"] =
        std::pow(rho, g.level) * p_energy_raw(g.g, f, c.p);
    result["f"] = fspec;
    return result;
  });
  emit(c, rec);
  return 0;
}

int run_measure_besov(const Common& c, const std::string& fspec, std::vector<double> betas,
                      std::vector<int> scales) {
  const json key = instance("measure-besov", {{"f", fspec},
                                              {"m", c.m},
                                              {"p", c.p},
                                              {"beta", betas},
                                              {"n", scales},
                                              {"tol", c.tol},
                                              {"seed", c.seed}});
  const json rec = cached_run(c, key, [&]() {
    const PointGraph star = build_point_graph(c.m, PointKind::kSimple, c.budget);
    std::vector<double> f;
    if (fspec == "harmonic-lr") {
      // solve on the modified graph, restrict to the simple vertex set
      const PointGraph g = build_point_graph(c.m, PointKind::kModified, c.budget);
      const auto full = make_point_function(g, fspec, c.p, c.solver(), c.budget);
      f.resize(static_cast<size_t>(star.g.vertex_count));
      for (std::int32_t v = 0; v < star.g.vertex_count; ++v)
        f[static_cast<size_t>(v)] =
            full[static_cast<size_t>(g.vertex_of(star.point_at(v)))];
    } else {
      f = make_point_function(star, fspec, c.p, c.solver(), c.budget);
    }
    json rows = json::array();
    for (double beta : betas)
      for (int n : scales)
        if (n < c.m) rows.push_back(to_json(besov_seminorm(star, f, c.p, beta, n)));
    return json{{"f", fspec}, {"reports", rows}};
  });
  emit(c, rec);
  return 0;
}

int run_measure_chainrule(const Common& c, const std::string& fspec, const std::string& phi_name,
                          std::vector<int> levels) {
  const json key = instance("measure-chainrule", {{"f", fspec},
                                                  {"n", c.n},
                                                  {"p", c.p},
                                                  {"phi", phi_name},
                                                  {"levels", levels},
                                                  {"tol", c.tol},
                                                  {"seed", c.seed}});
  const json rec = cached_run(c, key, [&]() {
    const PointGraph g = build_point_graph(c.n, PointKind::kModified, c.budget);
    const auto f = make_point_function(g, fspec, c.p, c.solver(), c.budget);
    std::function<double(double)> phi, dphi;
    if (phi_name == "square") {
      phi = [](double t) { return t * t; };
      dphi = [](double t) { return 2.0 * t; };
    } else if (phi_name == "sin") {
      phi = [](double t) { return std::sin(t); };
      dphi = [](double t) { return std::cos(t); };
    } else if (phi_name == "identity") {
      phi = [](double t) { return t; };
      dphi = [](double) { return 1.0; };
    } else {
      throw CLI::ValidationError("--phi", "unknown map: " + phi_name);
    }
    const auto rows = chain_rule_check(g, f, phi, dphi, c.p, levels);
    json out = json::array();
    for (const auto& r : rows)
      out.push_back(json{{"cell_level", r.cell_level},
                         {"max_rel", r.max_rel},
                         {"mean_rel", r.mean_rel},
                         {"band_lo", r.band_lo},
                         {"band_hi", r.band_hi}});
    return json{{"f", fspec}, {"phi", phi_name}, {"rows", out}};
  });
  emit(c, rec);
  return 0;
}

int run_experiment(const Common& c, const std::string& which, int k) {
  const json key = instance("experiment", {{"which", which},
                                           {"n", c.n},
                                           {"k", k},
                                           {"p", c.p},
                                           {"tol", c.tol},
                                           {"seed", c.seed}});
  const json rec = cached_run(c, key, [&]() {
    const SolverOptions opts = c.solver();
    if (which == "strictness") {
      const double gap = strictness_gap(c.n, c.p, opts, c.budget);
      return json{{"gap", gap}, {"n", c.n}, {"p", c.p}};
    }
    if (which == "hn") {
      const HnFunction h = build_hn(c.n, k, c.p, opts, c.budget);
      const PointGraph g = build_point_graph(c.n, PointKind::kModified, c.budget);
      json j = to_json(h);
      const double e = p_energy_raw(g.g, h.values, c.p);
      j["energy"] = e;
      j["energy_identity_rel_err"] =
          std::abs(e - std::pow(8.0, h.depth) * std::pow(3.0, -h.depth * c.p) * h.base_energy) /
          std::max(e, 1e-300);
      return j;
    }
    throw CLI::ValidationError("experiment", "unknown experiment: " + which);
  });
  emit(c, rec);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"discrete p-energies, conductances and energy measures on Sierpinski carpet graphs"};
  app.require_subcommand(1);

  Common c;
  std::function<int()> action;

  // graph build
  auto* graph = app.add_subcommand("graph", "graph construction");
  auto* gbuild = graph->add_subcommand("build", "build and serialize a graph");
  std::string gkind = "cell";
  gbuild->add_option("--kind", gkind, "cell|cell-segment|point|point-simple|chain");
  gbuild->add_option("--n", c.n, "level")->required();
  gbuild->add_option("--M", c.M, "chain copies");
  add_common(gbuild, &c, false);
  gbuild->callback([&]() { action = [&, gkind]() { return run_graph_build(c, gkind); }; });

  // solve dirichlet
  auto* solve = app.add_subcommand("solve", "p-harmonic solves");
  auto* sdir = solve->add_subcommand("dirichlet", "left-right Dirichlet problem");
  std::string skind = "cell";
  sdir->add_option("--kind", skind, "cell|point");
  sdir->add_option("--n", c.n, "level")->required();
  add_common(sdir, &c);
  sdir->callback([&]() { action = [&, skind]() { return run_solve_dirichlet(c, skind); }; });

  // conductance
  auto* cond = app.add_subcommand("conductance", "conductance families");
  std::string cfamily = "lr";
  cond->add_option("--family", cfamily, "lr|lr-point|nbhd|chain|point-pair");
  cond->add_option("--n", c.n, "level")->required();
  cond->add_option("--m", c.m, "ambient depth for nbhd");
  cond->add_option("--M", c.M, "chain copies");
  add_common(cond, &c);
  cond->callback([&]() { action = [&, cfamily]() { return run_conductance(c, cfamily); }; });

  // scaling rho
  auto* scaling = app.add_subcommand("scaling", "scaling estimation");
  auto* srho = scaling->add_subcommand("rho", "estimate the resistance scaling factor");
  std::vector<double> ps;
  std::string sfamily = "lr";
  int n_min = 1, n_max = 4;
  std::string json_out;
  srho->add_option("--p", ps, "exponents")->required();
  srho->add_option("--family", sfamily, "lr|lr-point|nbhd|chain|point-pair");
  srho->add_option("--n-min", n_min, "first level");
  srho->add_option("--n-max", n_max, "last level");
  srho->add_option("--m", c.m, "ambient depth for nbhd");
  srho->add_option("--M", c.M, "chain copies");
  srho->add_option("--json", json_out, "also write tables as JSON");
  add_common(srho, &c, false);
  srho->callback([&]() {
    action = [&, ps, sfamily, n_min, n_max, json_out]() {
      return run_scaling(c, ps, sfamily, n_min, n_max, json_out);
    };
  });

  // poincare
  auto* poin = app.add_subcommand("poincare", "Poincare constants");
  std::string pkind = "lambda";
  int pn_min = 2, pn_max = 4;
  poin->add_option("--kind", pkind, "lambda|lambda-star|sigma|relation");
  poin->add_option("--n", c.n, "level");
  poin->add_option("--n-min", pn_min, "relation table first level");
  poin->add_option("--n-max", pn_max, "relation table last level");
  add_common(poin, &c);
  poin->callback([&]() {
    action = [&, pkind, pn_min, pn_max]() { return run_poincare(c, pkind, pn_min, pn_max); };
  });

  // measure energy|besov|chainrule
  auto* meas = app.add_subcommand("measure", "finite-level measures");
  auto* men = meas->add_subcommand("energy", "p-energy measure by cells");
  std::string fspec = "harmonic-lr";
  double rho = 1.0;
  men->add_option("--f", fspec, "harmonic-lr|coordinate-x|coordinate-y|h0|h2|random:SEED");
  men->add_option("--n", c.n, "cell level")->required();
  men->add_option("--m", c.m, "sub-cell depth (graph level = n+m)")->required();
  men->add_option("--rho", rho, "rescaling factor");
  add_common(men, &c);
  men->callback([&]() { action = [&, fspec, rho]() { return run_measure_energy(c, fspec, rho); }; });

  auto* mbe = meas->add_subcommand("besov", "discretized Besov seminorms");
  std::vector<double> betas{2.0};
  std::vector<int> scales{1, 2};
  std::string bfspec = "harmonic-lr";
  mbe->add_option("--f", bfspec, "function spec");
  mbe->add_option("--m", c.m, "discretization level")->required();
  mbe->add_option("--beta", betas, "exponents to sweep");
  mbe->add_option("--n", scales, "scale indices");
  add_common(mbe, &c);
  mbe->callback([&]() {
    action = [&, bfspec, betas, scales]() { return run_measure_besov(c, bfspec, betas, scales); };
  });

  auto* mcr = meas->add_subcommand("chainrule", "chain-rule discrepancy");
  std::string crfspec = "harmonic-lr";
  std::string phi_name = "square";
  std::vector<int> levels{1, 2};
  mcr->add_option("--f", crfspec, "function spec");
  mcr->add_option("--n", c.n, "graph level")->required();
  mcr->add_option("--phi", phi_name, "square|sin|identity");
  mcr->add_option("--levels", levels, "cell levels");
  add_common(mcr, &c);
  mcr->callback([&]() {
    action = [&, crfspec, phi_name, levels]() {
      return run_measure_chainrule(c, crfspec, phi_name, levels);
    };
  });

  // experiment strictness|hn
  auto* exp = app.add_subcommand("experiment", "paper-backed experiments");
  auto* estr = exp->add_subcommand("strictness", "strictness gap");
  estr->add_option("--n", c.n, "level")->required();
  add_common(estr, &c);
  estr->callback([&]() { action = [&]() { return run_experiment(c, "strictness", 0); }; });
  auto* ehn = exp->add_subcommand("hn", "pasted h_n function");
  int hk = 2;
  ehn->add_option("--n", c.n, "level")->required();
  ehn->add_option("--k", hk, "pasting depth");
  add_common(ehn, &c);
  ehn->callback([&]() { action = [&, hk]() { return run_experiment(c, "hn", hk); }; });

  // cache gc
  auto* cache = app.add_subcommand("cache", "run cache maintenance");
  auto* gc = cache->add_subcommand("gc", "drop all cache entries");
  gc->add_option("--cache-dir", c.cache_dir, "cache directory");
  gc->callback([&]() {
    action = [&]() {
      const std::size_t n = RunCache(c.cache_dir).clear();
      std::printf("removed %zu cache entries\n", n);
      return 0;
    };
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  try {
    return action ? action() : kExitUsage;
  } catch (const BudgetExceeded& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitBudget;
  } catch (const CLI::ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
