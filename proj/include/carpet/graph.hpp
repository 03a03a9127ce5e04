#pragma once

// Core undirected graph with CSR adjacency, plus the small amount of graph
// machinery the carpet modules need (BFS, connectivity, induced subgraphs).

#include <algorithm>
#include <array>
#include <cstdint>
#include <limits>
#include <queue>
#include <stdexcept>
#include <vector>

namespace carpet {

struct Graph {
  std::int32_t vertex_count = 0;
  std::vector<std::array<std::int32_t, 2>> edges;  // canonical i<j, sorted

  // CSR adjacency, built by finalize()
  std::vector<std::int32_t> adj_off;
  std::vector<std::int32_t> adj_nbr;

  void add_edge(std::int32_t a, std::int32_t b) {
    if (a == b) throw std::invalid_argument("self loop");
    if (a > b) std::swap(a, b);
    edges.push_back({a, b});
  }

  void finalize() {
    std::sort(edges.begin(), edges.end());
    edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
    adj_off.assign(static_cast<size_t>(vertex_count) + 1, 0);
    for (const auto& e : edges) {
      ++adj_off[static_cast<size_t>(e[0]) + 1];
      ++adj_off[static_cast<size_t>(e[1]) + 1];
    }
    for (size_t i = 1; i < adj_off.size(); ++i) adj_off[i] += adj_off[i - 1];
    adj_nbr.assign(static_cast<size_t>(adj_off.back()), 0);
    std::vector<std::int32_t> cur(adj_off.begin(), adj_off.end() - 1);
    for (const auto& e : edges) {
      adj_nbr[static_cast<size_t>(cur[static_cast<size_t>(e[0])]++)] = e[1];
      adj_nbr[static_cast<size_t>(cur[static_cast<size_t>(e[1])]++)] = e[0];
    }
  }

  std::int32_t degree(std::int32_t v) const {
    return adj_off[static_cast<size_t>(v) + 1] - adj_off[static_cast<size_t>(v)];
  }

  std::int32_t max_degree() const {
    std::int32_t d = 0;
    for (std::int32_t v = 0; v < vertex_count; ++v) d = std::max(d, degree(v));
    return d;
  }

  // neighbors of v as a [begin, end) range into adj_nbr
  const std::int32_t* nbr_begin(std::int32_t v) const {
    return adj_nbr.data() + adj_off[static_cast<size_t>(v)];
  }
  const std::int32_t* nbr_end(std::int32_t v) const {
    return adj_nbr.data() + adj_off[static_cast<size_t>(v) + 1];
  }
};

inline constexpr std::int32_t kUnreached = std::numeric_limits<std::int32_t>::max();

inline std::vector<std::int32_t> bfs_distances(const Graph& g,
                                               const std::vector<std::int32_t>& sources) {
  std::vector<std::int32_t> dist(static_cast<size_t>(g.vertex_count), kUnreached);
  std::queue<std::int32_t> q;
  for (auto s : sources) {
    if (dist[static_cast<size_t>(s)] == kUnreached) {
      dist[static_cast<size_t>(s)] = 0;
      q.push(s);
    }
  }
  while (!q.empty()) {
    const auto v = q.front();
    q.pop();
    const auto dv = dist[static_cast<size_t>(v)];
    for (auto it = g.nbr_begin(v); it != g.nbr_end(v); ++it) {
      if (dist[static_cast<size_t>(*it)] == kUnreached) {
        dist[static_cast<size_t>(*it)] = dv + 1;
        q.push(*it);
      }
    }
  }
  return dist;
}

inline bool is_connected(const Graph& g) {
  if (g.vertex_count == 0) return true;
  const auto d = bfs_distances(g, {0});
  for (auto x : d)
    if (x == kUnreached) return false;
  return true;
}

// Induced subgraph on a sorted vertex subset; returns the subgraph and keeps
// the order of `subset` as the new vertex order.
inline Graph induced_subgraph(const Graph& g, const std::vector<std::int32_t>& subset) {
  std::vector<std::int32_t> local(static_cast<size_t>(g.vertex_count), -1);
  for (std::int32_t i = 0; i < static_cast<std::int32_t>(subset.size()); ++i) {
    const auto v = subset[static_cast<size_t>(i)];
    if (v < 0 || v >= g.vertex_count) throw std::invalid_argument("subset vertex out of range");
    if (local[static_cast<size_t>(v)] != -1) throw std::invalid_argument("duplicate subset vertex");
    local[static_cast<size_t>(v)] = i;
  }
  Graph out;
  out.vertex_count = static_cast<std::int32_t>(subset.size());
  for (const auto& e : g.edges) {
    const auto a = local[static_cast<size_t>(e[0])], b = local[static_cast<size_t>(e[1])];
    if (a != -1 && b != -1) out.add_edge(a, b);
  }
  out.finalize();
  return out;
}

}  // namespace carpet
