#pragma once

#include <bit>
#include <chrono>
#include <cstdint>
#include <optional>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "dpmis/graph.hpp"
#include "dpmis/rng.hpp"

namespace dpmis {

enum class Problem { kMis, kMvc };

inline std::string problem_name(Problem p) { return p == Problem::kMis ? "mis" : "mvc"; }

inline Problem parse_problem(const std::string& s) {
  if (s == "mis") return Problem::kMis;
  if (s == "mvc") return Problem::kMvc;
  throw std::invalid_argument("unknown problem '" + s + "' (expected mis or mvc)");
}

/// Largest graph the exact solvers accept without an explicit expansion budget.
inline constexpr std::size_t kExactVertexLimit = 256;

/// Outcome of an exact solve. When `optimal` is false the expansion budget ran
/// out: `set` is the best solution found and `bound` the proven bound on the
/// optimum (upper for MIS, lower for MVC).
struct ExactResult {
  VertexSet set;
  bool optimal = true;
  std::size_t bound = 0;
  std::uint64_t expansions = 0;
};

namespace detail {

class Bits {
 public:
  Bits() = default;
  explicit Bits(std::size_t n) : w_((n + 63) / 64, 0) {}

  void set(std::size_t i) { w_[i >> 6] |= 1ULL << (i & 63); }
  void reset(std::size_t i) { w_[i >> 6] &= ~(1ULL << (i & 63)); }
  bool test(std::size_t i) const { return (w_[i >> 6] >> (i & 63)) & 1ULL; }
  bool none() const {
    for (auto x : w_) {
      if (x) return false;
    }
    return true;
  }
  std::size_t count() const {
    std::size_t c = 0;
    for (auto x : w_) c += std::popcount(x);
    return c;
  }
  std::size_t count_and(const Bits& o) const {
    std::size_t c = 0;
    for (std::size_t i = 0; i < w_.size(); ++i) c += std::popcount(w_[i] & o.w_[i]);
    return c;
  }
  Bits& and_not(const Bits& o) {
    for (std::size_t i = 0; i < w_.size(); ++i) w_[i] &= ~o.w_[i];
    return *this;
  }
  Bits& operator&=(const Bits& o) {
    for (std::size_t i = 0; i < w_.size(); ++i) w_[i] &= o.w_[i];
    return *this;
  }
  template <class F>
  void for_each(F&& f) const {
    for (std::size_t i = 0; i < w_.size(); ++i) {
      for (std::uint64_t x = w_[i]; x; x &= x - 1) f(i * 64 + std::countr_zero(x));
    }
  }

 private:
  std::vector<std::uint64_t> w_;
};

// Branch and bound over candidate sets. Vertices of degree <= 1 inside the
// candidate set are always taken; otherwise branch on a maximum-degree vertex.
// The bound is a greedy clique cover of the candidates.
class MisSearch {
 public:
  MisSearch(const Graph& g, std::optional<std::uint64_t> budget)
      : n_(g.num_vertices()), adj_(n_, Bits(n_)), budget_(budget) {
    for (std::size_t v = 0; v < n_; ++v) {
      for (VertexId u : g.neighbors(static_cast<VertexId>(v))) adj_[v].set(u);
    }
  }

  ExactResult run() {
    Bits all(n_);
    for (std::size_t v = 0; v < n_; ++v) all.set(v);
    root_bound_ = clique_cover(all);
    search(all);
    ExactResult r;
    r.set = VertexSet(best_, SetKind::kIndependentSet);
    r.optimal = !exhausted_;
    r.bound = exhausted_ ? root_bound_ : best_.size();
    r.expansions = expansions_;
    return r;
  }

 private:
  std::size_t clique_cover(const Bits& p) const {
    std::vector<Bits> common;
    p.for_each([&](std::size_t v) {
      for (auto& c : common) {
        if (c.test(v)) {
          c &= adj_[v];
          return;
        }
      }
      common.push_back(adj_[v]);
    });
    return common.size();
  }

  void search(Bits p) {
    if (exhausted_) return;
    if (budget_ && expansions_ >= *budget_) {
      exhausted_ = true;
      return;
    }
    ++expansions_;
    const std::size_t mark = cur_.size();

    bool changed = true;
    while (changed) {
      changed = false;
      p.for_each([&](std::size_t v) {
        if (changed || !p.test(v)) return;
        std::size_t d = adj_[v].count_and(p);
        if (d <= 1) {
          cur_.push_back(static_cast<VertexId>(v));
          p.reset(v);
          if (d == 1) p.and_not(adj_[v]);
          changed = true;
        }
      });
    }

    if (p.none()) {
      if (cur_.size() > best_.size()) best_ = cur_;
      cur_.resize(mark);
      return;
    }
    if (cur_.size() + clique_cover(p) <= best_.size()) {
      cur_.resize(mark);
      return;
    }

    std::size_t pivot = 0, pivot_deg = 0;
    p.for_each([&](std::size_t v) {
      std::size_t d = adj_[v].count_and(p);
      if (d > pivot_deg) {
        pivot_deg = d;
        pivot = v;
      }
    });

    Bits with = p;
    with.reset(pivot);
    with.and_not(adj_[pivot]);
    cur_.push_back(static_cast<VertexId>(pivot));
    search(with);
    cur_.pop_back();

    p.reset(pivot);
    search(p);
    cur_.resize(mark);
  }

  std::size_t n_;
  std::vector<Bits> adj_;
  std::optional<std::uint64_t> budget_;
  std::uint64_t expansions_ = 0;
  bool exhausted_ = false;
  std::size_t root_bound_ = 0;
  std::vector<VertexId> cur_;
  std::vector<VertexId> best_;
};

}  // namespace detail

/// Maximum independent set by branch and bound. Without a budget the graph must
/// have at most kExactVertexLimit vertices; with one, the search may stop early
/// and report `optimal = false`.
inline ExactResult exact_mis(const Graph& g, std::optional<std::uint64_t> budget = std::nullopt) {
  if (!budget && g.num_vertices() > kExactVertexLimit) {
    throw std::length_error("exact_mis: " + std::to_string(g.num_vertices()) +
                            " vertices exceeds the unbudgeted limit of " +
                            std::to_string(kExactVertexLimit));
  }
  return detail::MisSearch(g, budget).run();
}

/// Minimum vertex cover as the complement of a maximum independent set.
inline ExactResult exact_mvc(const Graph& g, std::optional<std::uint64_t> budget = std::nullopt) {
  ExactResult r = exact_mis(g, budget);
  r.set = complement(g, r.set, SetKind::kVertexCover);
  r.bound = g.num_vertices() - r.bound;
  return r;
}

/// Repeatedly takes the minimum-degree vertex (smallest id on ties) and deletes
/// it together with its neighbours.
inline VertexSet greedy_mis(const Graph& g) {
  const std::size_t n = g.num_vertices();
  std::vector<bool> alive(n, true);
  std::vector<std::size_t> deg(n);
  for (std::size_t v = 0; v < n; ++v) deg[v] = g.degree(static_cast<VertexId>(v));
  std::vector<VertexId> chosen;
  auto kill = [&](VertexId x) {
    alive[x] = false;
    for (VertexId y : g.neighbors(x)) {
      if (alive[y]) --deg[y];
    }
  };
  for (;;) {
    std::optional<VertexId> pick;
    for (std::size_t v = 0; v < n; ++v) {
      if (alive[v] && (!pick || deg[v] < deg[*pick])) pick = static_cast<VertexId>(v);
    }
    if (!pick) break;
    chosen.push_back(*pick);
    std::vector<VertexId> doomed;
    for (VertexId u : g.neighbors(*pick)) {
      if (alive[u]) doomed.push_back(u);
    }
    kill(*pick);
    for (VertexId u : doomed) kill(u);
  }
  return VertexSet(std::move(chosen), SetKind::kIndependentSet);
}

/// Repeatedly moves the maximum-degree vertex (smallest id on ties) into the
/// cover and deletes it, until no edge remains.
inline VertexSet greedy_mvc(const Graph& g) {
  const std::size_t n = g.num_vertices();
  std::vector<bool> alive(n, true);
  std::vector<std::size_t> deg(n);
  std::size_t remaining = g.num_edges();
  for (std::size_t v = 0; v < n; ++v) deg[v] = g.degree(static_cast<VertexId>(v));
  std::vector<VertexId> cover;
  while (remaining > 0) {
    VertexId pick = -1;
    for (std::size_t v = 0; v < n; ++v) {
      if (alive[v] && (pick < 0 || deg[v] > deg[pick])) pick = static_cast<VertexId>(v);
    }
    cover.push_back(pick);
    alive[pick] = false;
    remaining -= deg[pick];
    for (VertexId u : g.neighbors(pick)) {
      if (alive[u]) --deg[u];
    }
  }
  return VertexSet(std::move(cover), SetKind::kVertexCover);
}

/// Randomised insert-and-evict search. Each move inserts a uniformly chosen
/// non-member and evicts its neighbours from the set; the largest set seen is
/// returned. Runs at least |V| moves, then until `time_limit_seconds` elapses or
/// `max_moves` (when non-zero) is reached.
inline VertexSet local_search_mis(const Graph& g, double time_limit_seconds, std::uint64_t seed,
                                  std::uint64_t max_moves = 0) {
  using Clock = std::chrono::steady_clock;
  const std::size_t n = g.num_vertices();
  const auto deadline =
      Clock::now() + std::chrono::duration_cast<Clock::duration>(
                         std::chrono::duration<double>(std::max(0.0, time_limit_seconds)));
  Rng rng = make_rng(seed);
  std::vector<bool> member(n, false);
  std::vector<VertexId> outside(n);
  std::vector<std::size_t> pos(n);
  for (std::size_t v = 0; v < n; ++v) {
    outside[v] = static_cast<VertexId>(v);
    pos[v] = v;
  }
  auto take_out = [&](VertexId v) {
    std::size_t i = pos[v];
    VertexId last = outside.back();
    outside[i] = last;
    pos[last] = i;
    outside.pop_back();
  };
  auto put_back = [&](VertexId v) {
    pos[v] = outside.size();
    outside.push_back(v);
  };

  std::size_t size = 0;
  std::vector<bool> best(n, false);
  std::size_t best_size = 0;
  for (std::uint64_t move = 0; !outside.empty(); ++move) {
    if (max_moves && move >= max_moves) break;
    if (move >= n && (move & 255) == 0 && Clock::now() >= deadline) break;
    std::uniform_int_distribution<std::size_t> pick(0, outside.size() - 1);
    VertexId v = outside[pick(rng)];
    take_out(v);
    member[v] = true;
    ++size;
    for (VertexId u : g.neighbors(v)) {
      if (member[u]) {
        member[u] = false;
        --size;
        put_back(u);
      }
    }
    if (size > best_size) {
      best_size = size;
      best = member;
    }
  }
  std::vector<VertexId> ids;
  for (std::size_t v = 0; v < n; ++v) {
    if (best[v]) ids.push_back(static_cast<VertexId>(v));
  }
  return VertexSet(std::move(ids), SetKind::kIndependentSet);
}

/// CPLEX LP text for the 0/1 program: maximise sum x_i with x_i + x_j <= 1 per
/// edge (MIS), or minimise with x_i + x_j >= 1 (MVC). Variables x1..xn are 1-based.
inline std::string emit_lp(const Graph& g, Problem problem) {
  const std::size_t n = g.num_vertices();
  std::ostringstream out;
  out << "\\ " << (problem == Problem::kMis ? "Maximum independent set" : "Minimum vertex cover")
      << ", " << n << " vertices, " << g.num_edges() << " edges\n";
  out << (problem == Problem::kMis ? "Maximize\n" : "Minimize\n");
  out << " obj:";
  for (std::size_t i = 1; i <= n; ++i) out << (i == 1 ? " " : " + ") << 'x' << i;
  out << "\nSubject To\n";
  std::size_t k = 0;
  const char* sense = problem == Problem::kMis ? " <= 1\n" : " >= 1\n";
  for (const auto& [u, v] : g.edges()) {
    out << " e" << ++k << ": x" << u + 1 << " + x" << v + 1 << sense;
  }
  out << "Binary\n";
  for (std::size_t i = 1; i <= n; ++i) out << " x" << i << '\n';
  out << "End\n";
  return out.str();
}

}  // namespace dpmis
