#pragma once

#include <cstdint>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "dpmis/graph.hpp"
#include "dpmis/rng.hpp"

namespace dpmis {

enum class GraphModel { kErdosRenyi, kBarabasiAlbert, kWattsStrogatz, kSpecial };

/// Parameters of one synthetic graph. Field meaning depends on `model`:
///   ER:      n, probability
///   BA:      n, attach (edges per new vertex)
///   WS:      n, ring_degree (even), probability (rewiring)
///   SPECIAL: n (independent-set size |I|), surplus (clique has n + surplus nodes)
struct GenSpec {
  GraphModel model = GraphModel::kErdosRenyi;
  int n = 0;
  double probability = 0.0;
  int attach = 1;
  int ring_degree = 2;
  int surplus = 0;
  std::uint64_t seed = 0;

  static GenSpec erdos_renyi(int n, double p, std::uint64_t seed) {
    return {GraphModel::kErdosRenyi, n, p, 1, 2, 0, seed};
  }
  static GenSpec barabasi_albert(int n, int attach, std::uint64_t seed) {
    return {GraphModel::kBarabasiAlbert, n, 0.0, attach, 2, 0, seed};
  }
  static GenSpec watts_strogatz(int n, int ring_degree, double rewire, std::uint64_t seed) {
    return {GraphModel::kWattsStrogatz, n, rewire, 1, ring_degree, 0, seed};
  }
  static GenSpec special(int n, int surplus) {
    return {GraphModel::kSpecial, n, 0.0, 1, 2, surplus, 0};
  }
};

inline std::string model_name(GraphModel m) {
  switch (m) {
    case GraphModel::kErdosRenyi: return "er";
    case GraphModel::kBarabasiAlbert: return "ba";
    case GraphModel::kWattsStrogatz: return "ws";
    case GraphModel::kSpecial: return "special";
  }
  return "?";
}

inline GraphModel parse_model(const std::string& s) {
  if (s == "er") return GraphModel::kErdosRenyi;
  if (s == "ba") return GraphModel::kBarabasiAlbert;
  if (s == "ws") return GraphModel::kWattsStrogatz;
  if (s == "special") return GraphModel::kSpecial;
  throw GraphError("unknown graph model '" + s + "' (expected er, ba, ws or special)");
}

namespace detail {

inline void require(bool ok, const std::string& what) {
  if (!ok) throw GraphError("invalid generator parameters: " + what);
}

inline Graph gen_erdos_renyi(const GenSpec& s) {
  require(s.n > 0, "n must be positive");
  require(s.probability >= 0.0 && s.probability <= 1.0, "p must lie in [0,1]");
  Rng rng = make_rng(s.seed);
  std::bernoulli_distribution coin(s.probability);
  std::vector<Edge> edges;
  for (VertexId u = 0; u < s.n; ++u) {
    for (VertexId v = u + 1; v < s.n; ++v) {
      if (coin(rng)) edges.emplace_back(u, v);
    }
  }
  return Graph(static_cast<std::size_t>(s.n), edges);
}

// Seed clique on attach+1 vertices, then each new vertex links to `attach`
// distinct targets drawn proportionally to degree.
inline Graph gen_barabasi_albert(const GenSpec& s) {
  require(s.attach > 0, "attach must be positive");
  require(s.n > s.attach, "n must exceed attach");
  Rng rng = make_rng(s.seed);
  std::vector<Edge> edges;
  std::vector<VertexId> endpoints;
  const int core = s.attach + 1;
  for (VertexId u = 0; u < core; ++u) {
    for (VertexId v = u + 1; v < core; ++v) {
      edges.emplace_back(u, v);
      endpoints.push_back(u);
      endpoints.push_back(v);
    }
  }
  for (VertexId v = core; v < s.n; ++v) {
    std::set<VertexId> targets;
    std::uniform_int_distribution<std::size_t> pick(0, endpoints.size() - 1);
    while (static_cast<int>(targets.size()) < s.attach) targets.insert(endpoints[pick(rng)]);
    for (VertexId t : targets) {
      edges.emplace_back(v, t);
      endpoints.push_back(v);
      endpoints.push_back(t);
    }
  }
  return Graph(static_cast<std::size_t>(s.n), edges);
}

// Ring lattice with ring_degree/2 neighbours per side; each lattice edge is
// rewired with probability p to a uniform non-adjacent endpoint.
inline Graph gen_watts_strogatz(const GenSpec& s) {
  require(s.n > 0, "n must be positive");
  require(s.ring_degree >= 0 && s.ring_degree % 2 == 0, "ring degree must be even");
  require(s.ring_degree < s.n, "ring degree must be below n");
  require(s.probability >= 0.0 && s.probability <= 1.0, "rewire probability must lie in [0,1]");
  Rng rng = make_rng(s.seed);
  const int n = s.n;
  std::vector<std::set<VertexId>> adj(n);
  for (VertexId u = 0; u < n; ++u) {
    for (int j = 1; j <= s.ring_degree / 2; ++j) {
      VertexId v = (u + j) % n;
      adj[u].insert(v);
      adj[v].insert(u);
    }
  }
  std::bernoulli_distribution rewire(s.probability);
  std::uniform_int_distribution<VertexId> any(0, n - 1);
  for (int j = 1; j <= s.ring_degree / 2; ++j) {
    for (VertexId u = 0; u < n; ++u) {
      VertexId v = (u + j) % n;
      if (!rewire(rng)) continue;
      if (static_cast<int>(adj[u].size()) >= n - 1) continue;
      VertexId w = any(rng);
      while (w == u || adj[u].count(w)) w = any(rng);
      adj[u].erase(v);
      adj[v].erase(u);
      adj[u].insert(w);
      adj[w].insert(u);
    }
  }
  std::vector<Edge> edges;
  for (VertexId u = 0; u < n; ++u) {
    for (VertexId v : adj[u]) {
      if (u < v) edges.emplace_back(u, v);
    }
  }
  return Graph(static_cast<std::size_t>(n), edges);
}

// Layout: u = 0, v = 1, I = 2..n+1, C = n+2..2n+surplus+1.
inline Graph gen_special(const GenSpec& s) {
  require(s.n > 0, "independent-set size must be positive");
  require(s.surplus >= 0, "clique surplus must be non-negative");
  const int n = s.n;
  const VertexId first_i = 2;
  const VertexId first_c = 2 + n;
  const VertexId end_c = first_c + n + s.surplus;
  std::vector<Edge> edges;
  for (VertexId i = first_i; i < first_c; ++i) {
    edges.emplace_back(0, i);
    edges.emplace_back(1, i);
    for (VertexId c = first_c; c < end_c; ++c) edges.emplace_back(i, c);
  }
  for (VertexId c = first_c; c < end_c; ++c) {
    for (VertexId d = c + 1; d < end_c; ++d) edges.emplace_back(c, d);
  }
  return Graph(static_cast<std::size_t>(end_c), edges);
}

}  // namespace detail

/// Deterministic in `spec` (including its seed).
inline Graph generate(const GenSpec& spec) {
  switch (spec.model) {
    case GraphModel::kErdosRenyi: return detail::gen_erdos_renyi(spec);
    case GraphModel::kBarabasiAlbert: return detail::gen_barabasi_albert(spec);
    case GraphModel::kWattsStrogatz: return detail::gen_watts_strogatz(spec);
    case GraphModel::kSpecial: return detail::gen_special(spec);
  }
  throw GraphError("unknown graph model");
}

/// Vertex ids of the independent block I of a SPECIAL graph with |I| = n.
inline std::vector<VertexId> special_independent_block(int n) {
  std::vector<VertexId> ids;
  for (VertexId i = 2; i < 2 + n; ++i) ids.push_back(i);
  return ids;
}

}  // namespace dpmis
