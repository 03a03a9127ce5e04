#pragma once

// JSON and CSV emission for graphs, functions, reports and tables. JSON
// objects are key-sorted by the library, so identical inputs serialize to
// identical bytes.

#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "carpet/graphs.hpp"
#include "carpet/measures.hpp"
#include "carpet/poincare.hpp"
#include "carpet/scaling.hpp"
#include "carpet/solver.hpp"

namespace carpet {

using json = nlohmann::json;

inline const char* version_string() { return "carpet 0.1.0"; }

inline json to_json(const LatticePoint& pt) {
  return json{{"x", pt.x}, {"y", pt.y}, {"denom_level", pt.denom_level}};
}

inline json to_json(const SolverOptions& o) {
  return json{{"tol_energy_rel", o.tol_energy_rel},
              {"tol_kkt", o.tol_kkt},
              {"max_sweeps", o.max_sweeps},
              {"smoothing_eps", o.smoothing_eps},
              {"smoothing_eps_floor", o.smoothing_eps_floor},
              {"seed", o.seed},
              {"restarts", o.restarts},
              {"random_init", o.random_init},
              {"lbfgs_memory", o.lbfgs_memory}};
}

inline json to_json(const CellGraph& g) {
  json edges = json::array();
  for (size_t e = 0; e < g.g.edges.size(); ++e)
    edges.push_back({g.g.edges[e][0], g.g.edges[e][1],
                     g.contact[e] == ContactKind::kSegment ? "segment" : "point"});
  json vertices = json::array();
  for (std::int32_t v = 0; v < g.g.vertex_count; ++v) vertices.push_back(g.word_at(v).str());
  return json{{"kind", g.adjacency == CellAdjacency::kFull ? "cell" : "cell-segment"},
              {"level", g.level},
              {"vertex_count", g.g.vertex_count},
              {"vertices", vertices},
              {"edges", edges},
              {"subsets",
               {{"boundary", g.boundary}, {"left", g.left}, {"right", g.right}}}};
}

inline json to_json(const PointGraph& g) {
  json edges = json::array();
  for (size_t e = 0; e < g.g.edges.size(); ++e)
    edges.push_back({g.g.edges[e][0], g.g.edges[e][1],
                     Word::from_index(g.owner[e], g.level - 1).str()});
  json vertices = json::array();
  for (const auto& pt : g.pts) vertices.push_back({pt[0], pt[1]});
  return json{{"kind", g.kind == PointKind::kModified ? "point" : "point-simple"},
              {"level", g.level},
              {"denom_level", g.level},
              {"vertex_count", g.g.vertex_count},
              {"vertices", vertices},
              {"edges", edges},
              {"subsets", {{"left", g.left}, {"right", g.right}}}};
}

inline json to_json(const ChainGraph& ch) {
  json edges = json::array();
  for (const auto& e : ch.cells.g.edges) edges.push_back({e[0], e[1], "segment-or-point"});
  json vertices = json::array();
  for (std::int32_t v = 0; v < ch.cells.g.vertex_count; ++v)
    vertices.push_back(ch.cells.word_at(v).str());
  return json{{"kind", "chain"},
              {"level", ch.ambient_level},
              {"base_level", ch.base_level},
              {"copies", ch.copies},
              {"vertex_count", ch.cells.g.vertex_count},
              {"vertices", vertices},
              {"edges", edges},
              {"subsets", {{"left", ch.left}, {"right", ch.right}}}};
}

inline json graph_function_json(const std::string& graph_ref, const std::vector<double>& values) {
  return json{{"graph_ref", graph_ref}, {"values", values}};
}

inline json to_json(const SolveReport& r, bool include_minimizer = true) {
  json j{{"energy", r.energy},
         {"iterations", r.iterations},
         {"kkt_residual", r.kkt_residual},
         {"converged", r.converged},
         {"wall_ms", r.wall_ms},
         {"seed", r.options_echo.seed},
         {"options_echo", to_json(r.options_echo)}};
  if (include_minimizer) j["minimizer"] = r.minimizer;
  return j;
}

inline json to_json(const ScalingTable& t) {
  json rows = json::array();
  for (size_t i = 0; i < t.rows.size(); ++i) {
    json row{{"n", t.rows[i].n},
             {"value", t.rows[i].value},
             {"ok", t.rows[i].ok},
             {"wall_ms", t.rows[i].wall_ms}};
    if (i < t.ratios.size() && std::isfinite(t.ratios[i])) row["ratio"] = t.ratios[i];
    rows.push_back(row);
  }
  return json{{"family", t.family},
              {"p", t.p},
              {"rows", rows},
              {"rho_hat_ratio", t.rho_hat_ratio},
              {"rho_hat_fit", t.rho_hat_fit},
              {"beta_hat_ratio", t.beta_hat_ratio},
              {"beta_hat_fit", t.beta_hat_fit},
              {"submult_hat", t.submult_hat}};
}

inline std::string scaling_table_csv(const std::vector<ScalingTable>& tables) {
  std::ostringstream out;
  out << "family,p,n,value,ratio,rho_ratio,rho_fit,beta_ratio,beta_fit,wall_ms\n";
  out.precision(12);
  for (const auto& t : tables) {
    for (size_t i = 0; i < t.rows.size(); ++i) {
      const auto& r = t.rows[i];
      out << t.family << ',' << t.p << ',' << r.n << ',';
      if (r.ok) out << r.value;
      out << ',';
      if (i < t.ratios.size() && std::isfinite(t.ratios[i])) out << t.ratios[i];
      out << ',' << t.rho_hat_ratio << ',' << t.rho_hat_fit << ',' << t.beta_hat_ratio << ','
          << t.beta_hat_fit << ',' << r.wall_ms << '\n';
    }
  }
  return out.str();
}

inline json to_json(const PoincareResult& r, const std::string& graph_ref) {
  return json{{"kind", r.kind},
              {"n", r.n},
              {"p", r.p},
              {"value", r.value},
              {"is_lower_bound", r.is_lower_bound},
              {"converged", r.converged},
              {"wall_ms", r.wall_ms},
              {"certificate", graph_function_json(graph_ref, r.certificate)}};
}

inline json to_json(const PoincareRelationTable& t) {
  json rows = json::array();
  for (const auto& r : t.rows)
    rows.push_back(json{{"n", r.n},
                        {"ok", r.ok},
                        {"lambda", r.lambda},
                        {"lambda_star", r.lambda_star},
                        {"sigma", r.sigma},
                        {"c_lr", r.c_lr},
                        {"ratio_lambda_sigma", r.ratio_lambda_sigma},
                        {"ratio_lstar_lambda", r.ratio_lstar_lambda},
                        {"product_lambda_clr", r.product_lambda_clr}});
  json shift2 = json::array();
  for (const auto& [n, v] : t.sigma_vs_lambda_star_shift2) shift2.push_back({n, v});
  return json{{"p", t.p},
              {"rows", rows},
              {"spread_lambda_sigma", t.spread_lambda_sigma},
              {"spread_lstar_lambda", t.spread_lstar_lambda},
              {"spread_lambda_clr", t.spread_lambda_clr},
              {"sigma_vs_lambda_star_shift2", shift2}};
}

inline json to_json(const CellMeasure& m) {
  json entries = json::array();
  for (size_t w = 0; w < m.masses.size(); ++w)
    entries.push_back({Word::from_index(static_cast<std::int64_t>(w), m.level).str(), m.masses[w]});
  return json{{"level", m.level}, {"rho", m.rho}, {"entries", entries}, {"total", m.total}};
}

inline json to_json(const BesovReport& r) {
  return json{{"p", r.p},         {"beta", r.beta},        {"n", r.n},
              {"m", r.m},         {"value", r.value},      {"c_radius", r.c_radius}};
}

inline json to_json(const HnFunction& h) {
  return json{{"level", h.level},
              {"depth", h.depth},
              {"p", h.p},
              {"base_energy", h.base_energy},
              {"glue_residual", h.glue_residual},
              {"values", h.values}};
}

inline void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  out << content;
}

// remove wall-clock fields so byte comparisons see only computed content
inline void strip_timing(json& j) {
  if (j.is_object()) {
    j.erase("wall_ms");
    for (auto& [k, v] : j.items()) strip_timing(v);
  } else if (j.is_array()) {
    for (auto& v : j) strip_timing(v);
  }
}

}  // namespace carpet
