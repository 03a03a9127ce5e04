#pragma once

// Builders for the graph families on the carpet: cell graphs G_n (full and
// segment-only adjacency), horizontal chain graphs G_{n,M}, the modified
// point graphs and their simple variant, and the rough-isometry map from
// point vertices to words.

#include <algorithm>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include "carpet/geometry.hpp"
#include "carpet/graph.hpp"

namespace carpet {

inline constexpr std::int64_t kDefaultVertexBudget = 10'000'000;

struct BudgetExceeded : std::runtime_error {
  using std::runtime_error::runtime_error;
};

inline void check_budget(std::int64_t vertices, std::int64_t budget) {
  if (vertices > budget) {
    throw BudgetExceeded("vertex budget exceeded: need " + std::to_string(vertices) +
                         ", budget " + std::to_string(budget));
  }
}

enum class CellAdjacency { kFull, kSegment };
enum class ContactKind : std::uint8_t { kSegment = 0, kPoint = 1 };

// Graph on a set of level-n words; edges join words whose closed cells
// intersect (full) or share a line segment (segment).
struct CellGraph {
  int level = 0;
  CellAdjacency adjacency = CellAdjacency::kFull;
  // global word indices (lexicographic rank in W_n), sorted ascending;
  // empty means "all of W_n" and vertex i has word index i
  std::vector<std::int64_t> words;
  Graph g;
  std::vector<ContactKind> contact;        // parallel to g.edges
  std::vector<std::int32_t> boundary;      // vertex ids, sorted
  std::vector<std::int32_t> left, right;   // W_n^L, W_n^R as vertex ids

  bool all_words() const { return words.empty(); }
  std::int64_t word_index(std::int32_t v) const {
    return all_words() ? v : words[static_cast<size_t>(v)];
  }
  Word word_at(std::int32_t v) const { return Word::from_index(word_index(v), level); }

  std::int32_t vertex_of_word_index(std::int64_t idx) const {
    if (all_words()) return static_cast<std::int32_t>(idx);
    const auto it = std::lower_bound(words.begin(), words.end(), idx);
    if (it == words.end() || *it != idx) throw std::invalid_argument("word not in graph");
    return static_cast<std::int32_t>(it - words.begin());
  }
};

namespace detail {

struct PairHash {
  size_t operator()(const std::pair<std::int64_t, std::int64_t>& p) const {
    return std::hash<std::int64_t>()(p.first * 1000003601ll ^ (p.second + 0x9e3779b97f4a7c15ll));
  }
};

// Adjacency among side-4 boxes: offsets of +-4 in either axis; exactly one
// nonzero axis is a shared edge, both nonzero a shared corner.
inline void connect_cells(const std::vector<std::array<std::int64_t, 2>>& mins,
                          CellAdjacency adjacency, Graph* g, std::vector<ContactKind>* contact) {
  std::unordered_map<std::pair<std::int64_t, std::int64_t>, std::int32_t, PairHash> at;
  at.reserve(mins.size() * 2);
  for (std::int32_t i = 0; i < static_cast<std::int32_t>(mins.size()); ++i)
    at.emplace(std::make_pair(mins[static_cast<size_t>(i)][0], mins[static_cast<size_t>(i)][1]), i);
  // half of the 8 neighbor offsets so each pair is generated once
  static constexpr std::array<std::array<int, 2>, 4> offs{{{4, 0}, {4, 4}, {0, 4}, {-4, 4}}};
  for (std::int32_t i = 0; i < static_cast<std::int32_t>(mins.size()); ++i) {
    for (const auto& o : offs) {
      const bool corner = o[0] != 0 && o[1] != 0;
      if (corner && adjacency == CellAdjacency::kSegment) continue;
      const auto it = at.find({mins[static_cast<size_t>(i)][0] + o[0],
                               mins[static_cast<size_t>(i)][1] + o[1]});
      if (it == at.end()) continue;
      g->add_edge(i, it->second);
      contact->push_back(corner ? ContactKind::kPoint : ContactKind::kSegment);
    }
  }
}

}  // namespace detail

// Graph on an arbitrary set of level-n word indices (sorted, deduplicated by
// the caller or here). Used for G_n itself, chains, and sigma-type blocks.
inline CellGraph build_cell_graph_on(std::vector<std::int64_t> word_indices, int level,
                                     CellAdjacency adjacency,
                                     std::int64_t budget = kDefaultVertexBudget) {
  if (level < 1) throw std::invalid_argument("cell graphs need level >= 1");
  std::sort(word_indices.begin(), word_indices.end());
  word_indices.erase(std::unique(word_indices.begin(), word_indices.end()), word_indices.end());
  check_budget(static_cast<std::int64_t>(word_indices.size()), budget);

  CellGraph cg;
  cg.level = level;
  cg.adjacency = adjacency;
  cg.words = std::move(word_indices);

  std::vector<std::array<std::int64_t, 2>> mins(cg.words.size());
  for (size_t i = 0; i < cg.words.size(); ++i) mins[i] = cell_min_from_index(cg.words[i], level);

  cg.g.vertex_count = static_cast<std::int32_t>(cg.words.size());
  // edge contacts are collected in insertion order, then remapped to the
  // canonical sorted edge order finalize() establishes
  std::vector<ContactKind> raw;
  detail::connect_cells(mins, adjacency, &cg.g, &raw);
  std::vector<std::array<std::int32_t, 2>> raw_edges = cg.g.edges;
  for (auto& e : raw_edges)
    if (e[0] > e[1]) std::swap(e[0], e[1]);
  cg.g.finalize();
  cg.contact.assign(cg.g.edges.size(), ContactKind::kSegment);
  for (size_t k = 0; k < raw_edges.size(); ++k) {
    const auto it = std::lower_bound(cg.g.edges.begin(), cg.g.edges.end(), raw_edges[k]);
    cg.contact[static_cast<size_t>(it - cg.g.edges.begin())] = raw[k];
  }

  const std::int64_t lo = -2 * pow3(level), hi = 2 * pow3(level) - 4;
  for (std::int32_t v = 0; v < cg.g.vertex_count; ++v) {
    const auto& m = mins[static_cast<size_t>(v)];
    if (m[0] == lo) cg.left.push_back(v);
    if (m[0] == hi) cg.right.push_back(v);
    if (m[0] == lo || m[0] == hi || m[1] == lo || m[1] == hi) cg.boundary.push_back(v);
  }
  return cg;
}

// G_n on all of W_n.
inline CellGraph build_cell_graph(int level, CellAdjacency adjacency,
                                  std::int64_t budget = kDefaultVertexBudget) {
  if (level < 1) throw std::invalid_argument("G_0 has no edges; level must be >= 1");
  check_budget(pow8(level), budget);
  std::vector<std::int64_t> all(static_cast<size_t>(pow8(level)));
  for (std::int64_t i = 0; i < static_cast<std::int64_t>(all.size()); ++i)
    all[static_cast<size_t>(i)] = i;
  CellGraph cg = build_cell_graph_on(std::move(all), level, adjacency, budget);
  cg.words.clear();  // implicit identity indexing
  if (adjacency == CellAdjacency::kFull && cg.g.max_degree() > 7)
    throw std::logic_error("cell graph degree exceeds 7");
  return cg;
}

// B_n(w, k): words within G_{|w|} distance k of w, each expanded by W_n.
// Returned as sorted global indices into W_{|w|+n}.
inline std::vector<std::int64_t> block_neighborhood(const Word& w, int k, int n,
                                                    std::int64_t budget = kDefaultVertexBudget) {
  const int m = w.level();
  if (m < 1) throw std::invalid_argument("block_neighborhood: need |w| >= 1");
  const CellGraph gm = build_cell_graph(m, CellAdjacency::kFull, budget);
  const auto dist = bfs_distances(gm.g, {static_cast<std::int32_t>(w.index())});
  const std::int64_t block = pow8(n);
  std::vector<std::int64_t> out;
  for (std::int32_t v = 0; v < gm.g.vertex_count; ++v) {
    if (dist[static_cast<size_t>(v)] <= k) {
      const std::int64_t base = static_cast<std::int64_t>(v) * block;
      for (std::int64_t j = 0; j < block; ++j) out.push_back(base + j);
    }
  }
  check_budget(static_cast<std::int64_t>(out.size()), budget);
  return out;
}

// Horizontal chain of M copies of G_n along the bottom row of level-m cells,
// m minimal with 3^m >= M.
struct ChainGraph {
  int base_level = 0;   // n
  int copies = 0;       // M
  int ambient_level = 0;  // n + m
  CellGraph cells;      // the induced cell graph (words at ambient level)
  std::vector<std::int32_t> left, right;  // V^L = first copy, V^R = last copy
};

// i-th (0-based) bottom-row word of level m, left to right: digits over
// {1,2,3} by base-3 expansion.
inline Word bottom_row_word(std::int64_t i, int m) {
  std::vector<std::uint8_t> s(static_cast<size_t>(m));
  for (int k = m - 1; k >= 0; --k) {
    s[static_cast<size_t>(k)] = static_cast<std::uint8_t>(i % 3 + 1);
    i /= 3;
  }
  return Word(std::move(s));
}

inline ChainGraph build_chain_graph(int n, int M, std::int64_t budget = kDefaultVertexBudget) {
  if (M < 2) throw std::invalid_argument("chain needs M >= 2");
  int m = 0;
  while (pow3(m) < M) ++m;
  check_budget(static_cast<std::int64_t>(M) * pow8(n), budget);

  ChainGraph ch;
  ch.base_level = n;
  ch.copies = M;
  ch.ambient_level = n + m;
  const std::int64_t block = pow8(n);
  std::vector<std::int64_t> words;
  words.reserve(static_cast<size_t>(M) * static_cast<size_t>(block));
  for (int i = 0; i < M; ++i) {
    const std::int64_t base = bottom_row_word(i, m).index() * block;
    for (std::int64_t j = 0; j < block; ++j) words.push_back(base + j);
  }
  ch.cells = build_cell_graph_on(std::move(words), n + m, CellAdjacency::kFull, budget);
  const std::int64_t first = bottom_row_word(0, m).index() * block;
  const std::int64_t last = bottom_row_word(M - 1, m).index() * block;
  for (std::int32_t v = 0; v < ch.cells.g.vertex_count; ++v) {
    const std::int64_t w = ch.cells.word_index(v);
    if (w >= first && w < first + block) ch.left.push_back(v);
    if (w >= last && w < last + block) ch.right.push_back(v);
  }
  return ch;
}

enum class PointKind { kModified, kSimple };  // modified graphs vs their 4-point variant

// Point graphs: vertices are exact lattice points at denominator 4*3^level,
// all edges lie inside a single level-(level-1) cell, recorded per edge.
struct PointGraph {
  int level = 0;
  PointKind kind = PointKind::kModified;
  std::vector<std::array<std::int64_t, 2>> pts;  // sorted lex (x, y)
  Graph g;
  std::vector<std::int64_t> owner;               // per edge: word index in W_{level-1}
  std::vector<std::int32_t> left, right;         // vertices on K^L / K^R

  std::int32_t vertex_of(std::int64_t x, std::int64_t y) const {
    const std::array<std::int64_t, 2> key{x, y};
    const auto it = std::lower_bound(pts.begin(), pts.end(), key);
    if (it == pts.end() || (*it)[0] != x || (*it)[1] != y)
      throw std::invalid_argument("point is not a vertex");
    return static_cast<std::int32_t>(it - pts.begin());
  }

  std::int32_t vertex_of(const LatticePoint& p) const {
    const LatticePoint q = p.at_level(level);
    return vertex_of(q.x, q.y);
  }

  LatticePoint point_at(std::int32_t v) const {
    return {pts[static_cast<size_t>(v)][0], pts[static_cast<size_t>(v)][1], level};
  }
};

namespace detail {

// local vertex offsets inside a side-12 cell box: side midpoints B, R, T, L
// and the quarter-diagonal points d0..d3
inline constexpr std::array<std::array<int, 2>, 4> kSideMid{{{6, 0}, {12, 6}, {6, 12}, {0, 6}}};
inline constexpr std::array<std::array<int, 2>, 4> kDiag{{{3, 3}, {9, 3}, {9, 9}, {3, 9}}};

}  // namespace detail

inline PointGraph build_point_graph(int level, PointKind kind,
                                    std::int64_t budget = kDefaultVertexBudget) {
  if (level < 1) throw std::invalid_argument("point graphs need level >= 1");
  const std::int64_t ncells = pow8(level - 1);
  const int per_cell = kind == PointKind::kModified ? 8 : 4;
  check_budget(ncells * per_cell, budget);

  PointGraph pg;
  pg.level = level;
  pg.kind = kind;

  // collect candidate points cell by cell, then dedupe shared side midpoints
  std::vector<std::array<std::int64_t, 2>> cand;
  cand.reserve(static_cast<size_t>(ncells * per_cell));
  for (std::int64_t w = 0; w < ncells; ++w) {
    const auto mn = cell_min_from_index(w, level - 1);
    const std::int64_t bx = 3 * mn[0], by = 3 * mn[1];  // rescale to denom 4*3^level
    for (const auto& o : detail::kSideMid) cand.push_back({bx + o[0], by + o[1]});
    if (kind == PointKind::kModified)
      for (const auto& o : detail::kDiag) cand.push_back({bx + o[0], by + o[1]});
  }
  pg.pts = cand;
  std::sort(pg.pts.begin(), pg.pts.end());
  pg.pts.erase(std::unique(pg.pts.begin(), pg.pts.end()), pg.pts.end());
  pg.g.vertex_count = static_cast<std::int32_t>(pg.pts.size());

  auto vid = [&pg](std::int64_t x, std::int64_t y) { return pg.vertex_of(x, y); };

  std::vector<std::array<std::int32_t, 2>> raw_edges;
  std::vector<std::int64_t> raw_owner;
  for (std::int64_t w = 0; w < ncells; ++w) {
    const auto mn = cell_min_from_index(w, level - 1);
    const std::int64_t bx = 3 * mn[0], by = 3 * mn[1];
    std::array<std::int32_t, 8> ring{};
    int ring_len = 0;
    if (kind == PointKind::kSimple) {
      for (int i = 0; i < 4; ++i)
        ring[static_cast<size_t>(ring_len++)] =
            vid(bx + detail::kSideMid[static_cast<size_t>(i)][0],
                by + detail::kSideMid[static_cast<size_t>(i)][1]);
    } else {
      // cycle L, d0, B, d1, R, d2, T, d3 (matches the definitional edge list)
      static constexpr std::array<std::array<int, 2>, 8> cyc{
          {{0, 6}, {3, 3}, {6, 0}, {9, 3}, {12, 6}, {9, 9}, {6, 12}, {3, 9}}};
      for (const auto& o : cyc)
        ring[static_cast<size_t>(ring_len++)] = vid(bx + o[0], by + o[1]);
    }
    for (int i = 0; i < ring_len; ++i) {
      std::int32_t a = ring[static_cast<size_t>(i)];
      std::int32_t b = ring[static_cast<size_t>((i + 1) % ring_len)];
      if (a > b) std::swap(a, b);
      raw_edges.push_back({a, b});
      raw_owner.push_back(w);
    }
  }
  pg.g.edges = raw_edges;
  pg.g.finalize();
  pg.owner.assign(pg.g.edges.size(), -1);
  for (size_t k = 0; k < raw_edges.size(); ++k) {
    const auto it = std::lower_bound(pg.g.edges.begin(), pg.g.edges.end(), raw_edges[k]);
    pg.owner[static_cast<size_t>(it - pg.g.edges.begin())] = raw_owner[k];
  }

  const std::int64_t lo = -2 * pow3(level), hi = 2 * pow3(level);
  for (std::int32_t v = 0; v < pg.g.vertex_count; ++v) {
    if (pg.pts[static_cast<size_t>(v)][0] == lo) pg.left.push_back(v);
    if (pg.pts[static_cast<size_t>(v)][0] == hi) pg.right.push_back(v);
  }
  return pg;
}

// phi_n: V(G_n point graph) -> W_n. Diagonal vertices go to the odd child of
// their unique cell; side midpoints to the even child of the first cell (in
// word order) that reaches them, with the convention 0 := 8.
inline std::vector<std::int64_t> rough_isometry_points_to_cells(const PointGraph& pg) {
  if (pg.kind != PointKind::kModified)
    throw std::invalid_argument("rough isometry is defined on the modified graphs");
  std::vector<std::int64_t> phi(static_cast<size_t>(pg.g.vertex_count), -1);
  const std::int64_t ncells = pow8(pg.level - 1);
  static constexpr std::array<int, 4> mid_symbol{2, 4, 6, 8};   // B, R, T, L -> p_2, p_4, p_6, p_8
  static constexpr std::array<int, 4> diag_symbol{1, 3, 5, 7};  // d0..d3 -> odd symbols
  for (std::int64_t w = 0; w < ncells; ++w) {
    const auto mn = cell_min_from_index(w, pg.level - 1);
    const std::int64_t bx = 3 * mn[0], by = 3 * mn[1];
    for (int m = 0; m < 4; ++m) {
      const auto dv = pg.vertex_of(bx + detail::kDiag[static_cast<size_t>(m)][0],
                                   by + detail::kDiag[static_cast<size_t>(m)][1]);
      phi[static_cast<size_t>(dv)] = w * 8 + (diag_symbol[static_cast<size_t>(m)] - 1);
      const auto sv = pg.vertex_of(bx + detail::kSideMid[static_cast<size_t>(m)][0],
                                   by + detail::kSideMid[static_cast<size_t>(m)][1]);
      // mid_symbol order B,R,T,L corresponds to p_2, p_4, p_6, p_8
      if (phi[static_cast<size_t>(sv)] == -1)
        phi[static_cast<size_t>(sv)] = w * 8 + (mid_symbol[static_cast<size_t>(m)] - 1);
    }
  }
  return phi;
}

// vertex permutation of a point graph induced by a symmetry of the square
inline std::vector<std::int32_t> point_graph_symmetry(const PointGraph& pg,
                                                      const SymmetryElement& t) {
  std::vector<std::int32_t> perm(static_cast<size_t>(pg.g.vertex_count));
  for (std::int32_t v = 0; v < pg.g.vertex_count; ++v) {
    const auto img = t.apply(pg.pts[static_cast<size_t>(v)][0], pg.pts[static_cast<size_t>(v)][1]);
    perm[static_cast<size_t>(v)] = pg.vertex_of(img[0], img[1]);
  }
  return perm;
}

// word permutation of a full cell graph induced by a symmetry (vertex ids
// are word indices)
inline std::vector<std::int32_t> cell_graph_symmetry(const CellGraph& cg,
                                                     const SymmetryElement& t) {
  if (!cg.all_words()) throw std::invalid_argument("symmetry permutation needs the full graph");
  const auto perm8 = symbol_permutation(t);
  std::vector<std::int32_t> perm(static_cast<size_t>(cg.g.vertex_count));
  for (std::int32_t v = 0; v < cg.g.vertex_count; ++v) {
    std::int64_t idx = v, out = 0, mult = 1;
    for (int k = 0; k < cg.level; ++k) {
      out += static_cast<std::int64_t>(perm8[static_cast<size_t>(idx % 8)] - 1) * mult;
      idx /= 8;
      mult *= 8;
    }
    perm[static_cast<size_t>(v)] = static_cast<std::int32_t>(out);
  }
  return perm;
}

// closed-form #V of the simple point graph: (12/5) 8^{n-1} + (8/5) 3^{n-1}
inline std::int64_t simple_point_vertex_count(int n) {
  return (12 * pow8(n - 1) + 8 * pow3(n - 1)) / 5;
}

// vertex count of the simple point graph by generate-sort-unique, without
// building edges (checks the closed form at depths where a full build would
// be wasteful)
inline std::int64_t count_simple_point_vertices(int n) {
  const std::int64_t ncells = pow8(n - 1);
  std::vector<std::int64_t> keys;
  keys.reserve(static_cast<size_t>(ncells * 4));
  const std::int64_t shift = 2 * pow3(n);  // make coordinates nonnegative
  const std::int64_t stride = 4 * pow3(n) + 1;
  for (std::int64_t w = 0; w < ncells; ++w) {
    const auto mn = cell_min_from_index(w, n - 1);
    const std::int64_t bx = 3 * mn[0] + shift, by = 3 * mn[1] + shift;
    for (const auto& o : detail::kSideMid)
      keys.push_back((bx + o[0]) * stride + (by + o[1]));
  }
  std::sort(keys.begin(), keys.end());
  keys.erase(std::unique(keys.begin(), keys.end()), keys.end());
  return static_cast<std::int64_t>(keys.size());
}

}  // namespace carpet
