#pragma once

#include <algorithm>
#include <concepts>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "dpmis/classic.hpp"
#include "dpmis/comparator_net.hpp"
#include "dpmis/graph.hpp"
#include "dpmis/rng.hpp"

namespace dpmis {

/// A comparator decides between the two branch graphs of a recursion step:
/// 0 keeps the first (G0), 1 the second (G1). The solver's RNG is passed so
/// randomised comparators stay reproducible under the solve seed.
template <class C>
concept GraphComparator = requires(const C& c, const Graph& g, Rng& rng) {
  { c(g, g, rng) } -> std::convertible_to<int>;
};

struct LearnedComparator {
  const CmpParams* params;
  int operator()(const Graph& a, const Graph& b, Rng&) const { return cmp(*params, a, b); }
};

/// Decides with exact optimum sizes: MIS picks G1 iff |MIS(G0)| < |MIS(G1)|,
/// MVC picks G1 iff |MVC(G0)| > |MVC(G1)|.
struct OracleComparator {
  Problem problem = Problem::kMis;
  int operator()(const Graph& a, const Graph& b, Rng&) const {
    if (problem == Problem::kMis) return exact_mis(a).set.size() < exact_mis(b).set.size() ? 1 : 0;
    return exact_mvc(a).set.size() > exact_mvc(b).set.size() ? 1 : 0;
  }
};

struct RandomComparator {
  int operator()(const Graph&, const Graph&, Rng& rng) const {
    return std::bernoulli_distribution(0.5)(rng) ? 1 : 0;
  }
};

/// Type-erased comparator for run-time selection.
class Comparator {
 public:
  using Fn = std::function<int(const Graph&, const Graph&, Rng&)>;

  Comparator(std::string name, Fn fn) : name_(std::move(name)), fn_(std::move(fn)) {}

  static Comparator learned(std::shared_ptr<const CmpParams> params) {
    return Comparator("learned", [params](const Graph& a, const Graph& b, Rng& r) {
      return LearnedComparator{params.get()}(a, b, r);
    });
  }
  static Comparator oracle(Problem problem) {
    return Comparator("oracle", OracleComparator{problem});
  }
  static Comparator random() { return Comparator("random", RandomComparator{}); }

  int operator()(const Graph& a, const Graph& b, Rng& rng) const { return fn_(a, b, rng); }
  const std::string& name() const { return name_; }

 private:
  std::string name_;
  Fn fn_;
};

/// One recursion step: the graph at that point, the branching vertex (as an
/// original id), both branch graphs and the comparator's decision.
struct TrajectoryStep {
  Graph current;
  VertexId vertex = -1;
  Graph g0, g1;
  int choice = 0;
};

struct Trajectory {
  std::vector<TrajectoryStep> steps;
  VertexSet result;
};

/// One line per step: `step <i> n=<n> m=<m> v=<id> g0=<n>/<m> g1=<n>/<m> choice=<0|1>`,
/// then `result <size> : <ids...>`. Ids are 1-based.
inline std::string to_debug_string(const Trajectory& t) {
  std::ostringstream out;
  for (std::size_t i = 0; i < t.steps.size(); ++i) {
    const auto& s = t.steps[i];
    out << "step " << i << " n=" << s.current.num_vertices() << " m=" << s.current.num_edges()
        << " v=" << s.vertex + 1 << " g0=" << s.g0.num_vertices() << '/' << s.g0.num_edges()
        << " g1=" << s.g1.num_vertices() << '/' << s.g1.num_edges() << " choice=" << s.choice << '\n';
  }
  out << "result " << t.result.size() << " :";
  for (VertexId v : t.result.members) out << ' ' << v + 1;
  out << '\n';
  return out.str();
}

struct SolveOptions {
  bool record = true;  // keep per-step graphs in the trajectory
};

struct SolveResult {
  VertexSet set;
  Trajectory trajectory;
  std::size_t steps = 0;
  std::size_t base_edges = 0;  // MVC only: edges of the base-case graph
};

namespace detail {

template <class Pred>
VertexId pick_uniform(const Graph& g, Rng& rng, Pred&& eligible) {
  std::vector<VertexId> pool;
  for (std::size_t v = 0; v < g.num_vertices(); ++v) {
    if (eligible(static_cast<VertexId>(v))) pool.push_back(static_cast<VertexId>(v));
  }
  std::uniform_int_distribution<std::size_t> d(0, pool.size() - 1);
  return pool[d(rng)];
}

}  // namespace detail

/// Comparator-induced MIS recursion. While edges remain, picks a vertex of
/// positive degree uniformly, forms G0 = G/{v} and G1 = G/N(v), and continues in
/// the branch the comparator selects. The surviving vertices form an independent
/// set of `g` for every comparator; ids refer to `g`.
template <GraphComparator C>
SolveResult solve_mis(const Graph& g, const C& comparator, std::uint64_t seed,
                      SolveOptions opt = {}) {
  Rng rng = make_rng(seed);
  Graph cur = g;
  std::vector<VertexId> origin(g.num_vertices());
  for (std::size_t v = 0; v < origin.size(); ++v) origin[v] = static_cast<VertexId>(v);
  SolveResult out;
  while (cur.num_edges() > 0) {
    const VertexId v = detail::pick_uniform(cur, rng, [&](VertexId x) { return cur.degree(x) > 0; });
    Subgraph s0 = remove_vertex(cur, v);
    Subgraph s1 = remove_neighbors(cur, v);
    const int choice = comparator(s0.graph, s1.graph, rng) ? 1 : 0;
    if (opt.record) out.trajectory.steps.push_back({cur, origin[v], s0.graph, s1.graph, choice});
    Subgraph& next = choice == 0 ? s0 : s1;
    std::vector<VertexId> next_origin(next.to_parent.size());
    for (std::size_t i = 0; i < next_origin.size(); ++i) next_origin[i] = origin[next.to_parent[i]];
    origin = std::move(next_origin);
    cur = std::move(next.graph);
    ++out.steps;
  }
  out.set = VertexSet(origin, SetKind::kIndependentSet);
  out.trajectory.result = out.set;
  return out;
}

/// The two branch graphs of a vertex-cover recursion step on `v`. `*_shadow[i]`
/// is the vertex of the input graph that node i stands for; copy nodes shadow
/// the node they were copied from. `*_copy[i]` marks copy nodes.
struct MvcGadgets {
  Graph g0, g1;
  std::vector<VertexId> g0_shadow, g1_shadow;
  std::vector<bool> g0_copy, g1_copy;
};

/// G0: v deleted, every edge touching N(v) deleted, and a pendant copy u' - u
/// added for each u in N(v) (v out of the cover, its neighbours in).
/// G1: every edge at v deleted and a pendant copy v' - v added (v in the cover).
/// Copies are appended after the original nodes in increasing order of the node copied.
inline MvcGadgets build_mvc_gadgets(const Graph& g, VertexId v) {
  g.check(v);
  const auto& nbrs = g.neighbors(v);
  if (nbrs.empty()) {
    throw GraphError("build_mvc_gadgets: vertex " + std::to_string(v) + " is isolated");
  }
  const std::size_t n = g.num_vertices();
  MvcGadgets out;

  std::vector<bool> in_nbr(n, false);
  for (VertexId u : nbrs) in_nbr[u] = true;
  std::vector<VertexId> remap(n, -1);
  for (std::size_t x = 0; x < n; ++x) {
    if (static_cast<VertexId>(x) == v) continue;
    remap[x] = static_cast<VertexId>(out.g0_shadow.size());
    out.g0_shadow.push_back(static_cast<VertexId>(x));
    out.g0_copy.push_back(false);
  }
  std::vector<Edge> e0;
  for (const auto& [a, b] : g.edges()) {
    if (a == v || b == v || in_nbr[a] || in_nbr[b]) continue;
    e0.emplace_back(remap[a], remap[b]);
  }
  for (VertexId u : nbrs) {
    const auto copy = static_cast<VertexId>(out.g0_shadow.size());
    out.g0_shadow.push_back(u);
    out.g0_copy.push_back(true);
    e0.emplace_back(copy, remap[u]);
  }
  out.g0 = Graph(out.g0_shadow.size(), e0);

  std::vector<Edge> e1;
  for (const auto& [a, b] : g.edges()) {
    if (a != v && b != v) e1.emplace_back(a, b);
  }
  e1.emplace_back(static_cast<VertexId>(n), v);
  out.g1 = Graph(n + 1, e1);
  out.g1_shadow.resize(n + 1);
  out.g1_copy.assign(n + 1, false);
  for (std::size_t x = 0; x < n; ++x) out.g1_shadow[x] = static_cast<VertexId>(x);
  out.g1_shadow[n] = v;
  out.g1_copy[n] = true;
  return out;
}

/// Comparator-induced MVC recursion on gadget graphs. Stops once every degree is
/// at most 1 and takes one endpoint per remaining edge (the non-copy endpoint
/// when there is one, else the lower id), mapped back to ids of `g`.
template <GraphComparator C>
SolveResult solve_mvc(const Graph& g, const C& comparator, std::uint64_t seed,
                      SolveOptions opt = {}) {
  Rng rng = make_rng(seed);
  Graph cur = g;
  std::vector<VertexId> shadow(g.num_vertices());
  for (std::size_t v = 0; v < shadow.size(); ++v) shadow[v] = static_cast<VertexId>(v);
  std::vector<bool> is_copy(g.num_vertices(), false);
  SolveResult out;
  while (cur.max_degree() > 1) {
    const VertexId v = detail::pick_uniform(cur, rng, [&](VertexId x) { return cur.degree(x) >= 1; });
    MvcGadgets gad = build_mvc_gadgets(cur, v);
    const int choice = comparator(gad.g0, gad.g1, rng) ? 1 : 0;
    if (opt.record) out.trajectory.steps.push_back({cur, shadow[v], gad.g0, gad.g1, choice});
    const auto& local_shadow = choice == 0 ? gad.g0_shadow : gad.g1_shadow;
    const auto& local_copy = choice == 0 ? gad.g0_copy : gad.g1_copy;
    std::vector<VertexId> next_shadow(local_shadow.size());
    std::vector<bool> next_copy(local_shadow.size());
    for (std::size_t i = 0; i < local_shadow.size(); ++i) {
      next_shadow[i] = shadow[local_shadow[i]];
      next_copy[i] = local_copy[i] || is_copy[local_shadow[i]];
    }
    shadow = std::move(next_shadow);
    is_copy = std::move(next_copy);
    cur = choice == 0 ? std::move(gad.g0) : std::move(gad.g1);
    ++out.steps;
  }
  std::vector<VertexId> cover;
  out.base_edges = cur.num_edges();
  for (const auto& [a, b] : cur.edges()) {
    const VertexId pick = (is_copy[a] && !is_copy[b]) ? b : a;
    cover.push_back(shadow[pick]);
  }
  out.set = VertexSet(std::move(cover), SetKind::kVertexCover);
  out.trajectory.result = out.set;
  return out;
}

template <GraphComparator C>
SolveResult solve(Problem problem, const Graph& g, const C& comparator, std::uint64_t seed,
                  SolveOptions opt = {}) {
  return problem == Problem::kMis ? solve_mis(g, comparator, seed, opt)
                                  : solve_mvc(g, comparator, seed, opt);
}

/// Best set over m independent runs; run i is seeded with derive_seed(seed, i).
/// With m = 0 the result is empty for MIS and the whole vertex set for MVC.
template <GraphComparator C>
VertexSet best_of_rollouts(Problem problem, const Graph& g, const C& comparator, std::size_t m,
                           std::uint64_t seed) {
  std::optional<VertexSet> best;
  for (std::size_t i = 0; i < m; ++i) {
    VertexSet s = solve(problem, g, comparator, derive_seed(seed, i), {.record = false}).set;
    const bool better = !best || (problem == Problem::kMis ? s.size() > best->size()
                                                           : s.size() < best->size());
    if (better) best = std::move(s);
  }
  if (best) return *best;
  if (problem == Problem::kMis) return VertexSet({}, SetKind::kIndependentSet);
  return complement(g, VertexSet({}, SetKind::kGeneric), SetKind::kVertexCover);
}

/// max |ISS_i| over m roll-outs of the MIS recursion.
template <GraphComparator C>
std::size_t rollout_estimate(const Graph& g, const C& comparator, std::size_t m, std::uint64_t seed) {
  return best_of_rollouts(Problem::kMis, g, comparator, m, seed).size();
}

/// Roll-out estimate floored by the greedy heuristic.
template <GraphComparator C>
std::size_t mixed_estimate(const Graph& g, const C& comparator, std::size_t m, std::uint64_t seed) {
  return std::max(greedy_mis(g).size(), rollout_estimate(g, comparator, m, seed));
}

/// Problem-generic estimate: best roll-out size, optionally combined with the
/// greedy result (max for MIS, min for MVC).
template <GraphComparator C>
std::size_t estimate(Problem problem, const Graph& g, const C& comparator, std::size_t m,
                     std::uint64_t seed, bool mixed) {
  std::size_t best = best_of_rollouts(problem, g, comparator, m, seed).size();
  if (!mixed) return best;
  if (problem == Problem::kMis) return std::max(best, greedy_mis(g).size());
  return std::min(best, greedy_mvc(g).size());
}

}  // namespace dpmis
