#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace dpmis {

using VertexId = std::int32_t;
using Edge = std::pair<VertexId, VertexId>;

class GraphError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Immutable undirected simple graph on vertices 0..n-1 with sorted adjacency lists.
class Graph {
 public:
  Graph() = default;

  /// Builds a graph from an edge list. Parallel edges (in either orientation)
  /// are merged; self-loops and out-of-range ids throw GraphError naming the pair.
  Graph(std::size_t n, const std::vector<Edge>& edges) : adj_(n) {
    for (const auto& [u, v] : edges) {
      if (u < 0 || v < 0 || static_cast<std::size_t>(u) >= n ||
          static_cast<std::size_t>(v) >= n) {
        throw GraphError("edge (" + std::to_string(u) + "," + std::to_string(v) +
                         ") references a vertex outside 0.." +
                         std::to_string(static_cast<long long>(n) - 1));
      }
      if (u == v) {
        throw GraphError("self-loop (" + std::to_string(u) + "," + std::to_string(v) + ")");
      }
      adj_[u].push_back(v);
      adj_[v].push_back(u);
    }
    finalize();
  }

  std::size_t num_vertices() const noexcept { return adj_.size(); }
  std::size_t num_edges() const noexcept { return m_; }
  bool empty() const noexcept { return adj_.empty(); }

  const std::vector<VertexId>& neighbors(VertexId v) const { return adj_[check(v)]; }
  std::size_t degree(VertexId v) const { return adj_[check(v)].size(); }

  bool has_edge(VertexId u, VertexId v) const {
    const auto& nu = adj_[check(u)];
    check(v);
    return std::binary_search(nu.begin(), nu.end(), v);
  }

  std::size_t max_degree() const noexcept {
    std::size_t best = 0;
    for (const auto& a : adj_) best = std::max(best, a.size());
    return best;
  }

  /// Edges with u < v, lexicographically sorted.
  std::vector<Edge> edges() const {
    std::vector<Edge> out;
    out.reserve(m_);
    for (std::size_t u = 0; u < adj_.size(); ++u) {
      for (VertexId v : adj_[u]) {
        if (static_cast<VertexId>(u) < v) out.emplace_back(static_cast<VertexId>(u), v);
      }
    }
    return out;
  }

  bool operator==(const Graph& other) const = default;

  VertexId check(VertexId v) const {
    if (v < 0 || static_cast<std::size_t>(v) >= adj_.size()) {
      throw GraphError("vertex id " + std::to_string(v) + " out of range for graph with " +
                       std::to_string(adj_.size()) + " vertices");
    }
    return v;
  }

 private:
  void finalize() {
    m_ = 0;
    for (auto& a : adj_) {
      std::sort(a.begin(), a.end());
      a.erase(std::unique(a.begin(), a.end()), a.end());
      m_ += a.size();
    }
    m_ /= 2;
  }

  std::vector<std::vector<VertexId>> adj_;
  std::size_t m_ = 0;
};

/// A graph produced by deleting vertices from a parent; `to_parent[i]` is the
/// parent id of vertex i in `graph`.
struct Subgraph {
  Graph graph;
  std::vector<VertexId> to_parent;
};

/// Induced subgraph on the vertices flagged in `keep`, ids compacted in increasing order.
inline Subgraph induced_subgraph(const Graph& g, const std::vector<bool>& keep) {
  const std::size_t n = g.num_vertices();
  std::vector<VertexId> remap(n, -1);
  Subgraph out;
  for (std::size_t v = 0; v < n; ++v) {
    if (keep[v]) {
      remap[v] = static_cast<VertexId>(out.to_parent.size());
      out.to_parent.push_back(static_cast<VertexId>(v));
    }
  }
  std::vector<Edge> edges;
  for (std::size_t u = 0; u < n; ++u) {
    if (!keep[u]) continue;
    for (VertexId v : g.neighbors(static_cast<VertexId>(u))) {
      if (static_cast<VertexId>(u) < v && keep[v]) edges.emplace_back(remap[u], remap[v]);
    }
  }
  out.graph = Graph(out.to_parent.size(), edges);
  return out;
}

/// G / {v}: v and its incident edges removed.
inline Subgraph remove_vertex(const Graph& g, VertexId v) {
  g.check(v);
  std::vector<bool> keep(g.num_vertices(), true);
  keep[v] = false;
  return induced_subgraph(g, keep);
}

/// G / N(v): every neighbor of v removed; v stays, now isolated.
inline Subgraph remove_neighbors(const Graph& g, VertexId v) {
  std::vector<bool> keep(g.num_vertices(), true);
  for (VertexId u : g.neighbors(v)) keep[u] = false;
  return induced_subgraph(g, keep);
}

/// Relabels vertices: vertex v of `g` becomes `perm[v]`.
inline Graph permute(const Graph& g, const std::vector<VertexId>& perm) {
  if (perm.size() != g.num_vertices()) throw GraphError("permutation size mismatch");
  std::vector<Edge> edges;
  for (const auto& [u, v] : g.edges()) edges.emplace_back(perm[u], perm[v]);
  return Graph(g.num_vertices(), edges);
}

enum class SetKind { kIndependentSet, kVertexCover, kGeneric };

/// Sorted, duplicate-free vertex ids tagged with the property they claim.
struct VertexSet {
  std::vector<VertexId> members;
  SetKind kind = SetKind::kGeneric;

  VertexSet() = default;
  VertexSet(std::vector<VertexId> ids, SetKind k) : members(std::move(ids)), kind(k) {
    std::sort(members.begin(), members.end());
    members.erase(std::unique(members.begin(), members.end()), members.end());
  }

  std::size_t size() const noexcept { return members.size(); }
  bool contains(VertexId v) const {
    return std::binary_search(members.begin(), members.end(), v);
  }
};

inline bool in_range(const Graph& g, const std::vector<VertexId>& ids) {
  return std::all_of(ids.begin(), ids.end(), [&](VertexId v) {
    return v >= 0 && static_cast<std::size_t>(v) < g.num_vertices();
  });
}

inline bool is_independent_set(const Graph& g, const std::vector<VertexId>& ids) {
  if (!in_range(g, ids)) return false;
  std::vector<bool> member(g.num_vertices(), false);
  for (VertexId v : ids) member[v] = true;
  for (const auto& [u, v] : g.edges()) {
    if (member[u] && member[v]) return false;
  }
  return true;
}

inline bool is_vertex_cover(const Graph& g, const std::vector<VertexId>& ids) {
  if (!in_range(g, ids)) return false;
  std::vector<bool> member(g.num_vertices(), false);
  for (VertexId v : ids) member[v] = true;
  for (const auto& [u, v] : g.edges()) {
    if (!member[u] && !member[v]) return false;
  }
  return true;
}

/// Checks the set against the property its tag claims.
inline bool is_valid(const Graph& g, const VertexSet& s) {
  switch (s.kind) {
    case SetKind::kIndependentSet: return is_independent_set(g, s.members);
    case SetKind::kVertexCover: return is_vertex_cover(g, s.members);
    case SetKind::kGeneric: return in_range(g, s.members);
  }
  return false;
}

/// V \ S, tagged `kind`.
inline VertexSet complement(const Graph& g, const VertexSet& s, SetKind kind) {
  std::vector<bool> member(g.num_vertices(), false);
  for (VertexId v : s.members) member[v] = true;
  std::vector<VertexId> out;
  for (std::size_t v = 0; v < g.num_vertices(); ++v) {
    if (!member[v]) out.push_back(static_cast<VertexId>(v));
  }
  return VertexSet(std::move(out), kind);
}

}  // namespace dpmis
