#include <gtest/gtest.h>

#include <random>
#include <set>

#include "dpmis/classic.hpp"
#include "dpmis/generators.hpp"
#include "oracles.hpp"

using namespace dpmis;

namespace {

Graph cycle(int n) {
  std::vector<Edge> e;
  for (int i = 0; i < n; ++i) e.emplace_back(i, (i + 1) % n);
  return Graph(static_cast<std::size_t>(n), e);
}
Graph complete(int n) {
  std::vector<Edge> e;
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) e.emplace_back(i, j);
  }
  return Graph(static_cast<std::size_t>(n), e);
}
Graph path(int n) {
  std::vector<Edge> e;
  for (int i = 0; i + 1 < n; ++i) e.emplace_back(i, i + 1);
  return Graph(static_cast<std::size_t>(n), e);
}

}  // namespace

TEST(ExactMis, SmallExamples) {
  EXPECT_EQ(exact_mis(complete(3)).set.size(), 1u);
  EXPECT_EQ(exact_mis(cycle(5)).set.size(), 2u);
  auto special = exact_mis(generate(GenSpec::special(5, 2)));
  EXPECT_TRUE(special.optimal);
  EXPECT_EQ(special.set.members, special_independent_block(5));
  EXPECT_EQ(exact_mis(Graph()).set.size(), 0u);
}

TEST(ExactMis, MatchesSubsetEnumeration) {
  std::mt19937_64 rng(21);
  for (int trial = 0; trial < 150; ++trial) {
    Graph g = oracle::random_graph(rng, 1, 12, std::uniform_real_distribution<>(0.05, 0.8)(rng));
    auto r = exact_mis(g);
    ASSERT_TRUE(r.optimal);
    EXPECT_TRUE(is_valid(g, r.set));
    EXPECT_EQ(r.set.size(), oracle::brute_force_mis(g));
  }
}

TEST(ExactMis, BranchingIdentityHoldsAtEveryVertex) {
  std::mt19937_64 rng(22);
  for (int trial = 0; trial < 40; ++trial) {
    Graph g = oracle::random_graph(rng, 4, 14, 0.35);
    const std::size_t whole = exact_mis(g).set.size();
    for (VertexId v = 0; v < static_cast<VertexId>(g.num_vertices()); ++v) {
      if (g.degree(v) == 0) continue;
      const std::size_t take = exact_mis(remove_neighbors(g, v).graph).set.size();
      const std::size_t skip = exact_mis(remove_vertex(g, v).graph).set.size();
      EXPECT_EQ(whole, std::max(take, skip));
    }
  }
}

TEST(ExactMis, BudgetExhaustionIsReported) {
  Graph g = generate(GenSpec::erdos_renyi(60, 0.1, 3));
  auto r = exact_mis(g, 5);
  EXPECT_FALSE(r.optimal);
  EXPECT_TRUE(is_valid(g, r.set));
  EXPECT_GE(r.bound, r.set.size());
  auto full = exact_mis(g);
  EXPECT_TRUE(full.optimal);
  EXPECT_GE(r.bound, full.set.size());
}

TEST(ExactMis, UnbudgetedLimit) {
  EXPECT_THROW(exact_mis(Graph(kExactVertexLimit + 1, {})), std::length_error);
  EXPECT_EQ(exact_mis(Graph(kExactVertexLimit + 1, {}), 1000).set.size(), kExactVertexLimit + 1);
}

TEST(ExactMis, HandlesThirtyPlusVertices) {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    Graph g = generate(GenSpec::erdos_renyi(45, 0.15, seed));
    auto r = exact_mis(g);
    EXPECT_TRUE(r.optimal);
    EXPECT_TRUE(is_valid(g, r.set));
    EXPECT_GE(r.set.size(), greedy_mis(g).size());
  }
}

TEST(ExactMvc, ExamplesAndComplementation) {
  EXPECT_EQ(exact_mvc(complete(3)).set.size(), 2u);
  auto p3 = exact_mvc(path(3));
  EXPECT_EQ(p3.set.members, std::vector<VertexId>{1});
  std::mt19937_64 rng(23);
  for (int trial = 0; trial < 60; ++trial) {
    Graph g = oracle::random_graph(rng, 0, 16, 0.3);
    auto cover = exact_mvc(g);
    EXPECT_TRUE(is_valid(g, cover.set));
    EXPECT_EQ(cover.set.size() + exact_mis(g).set.size(), g.num_vertices());
  }
}

TEST(GreedyMis, Examples) {
  EXPECT_EQ(greedy_mis(path(3)).members, (std::vector<VertexId>{0, 2}));
  EXPECT_EQ(greedy_mis(Graph(4, {})).size(), 4u);
  for (int n : {3, 5, 20}) {
    for (int a : {0, 2, 3}) {
      auto s = greedy_mis(generate(GenSpec::special(n, a)));
      ASSERT_EQ(s.size(), 3u);
      EXPECT_TRUE(s.contains(0));
      EXPECT_TRUE(s.contains(1));
      EXPECT_GE(s.members[2], 2 + n);
    }
  }
}

TEST(GreedyMvc, Examples) {
  EXPECT_EQ(greedy_mvc(Graph(5, {{0, 1}, {0, 2}, {0, 3}, {0, 4}})).members, std::vector<VertexId>{0});
  EXPECT_EQ(greedy_mvc(complete(3)).size(), 2u);
  EXPECT_EQ(greedy_mvc(path(4)).members, (std::vector<VertexId>{1, 2}));
  EXPECT_EQ(greedy_mvc(Graph(3, {})).size(), 0u);
}

TEST(Greedy, ValidAndDeterministic) {
  std::mt19937_64 rng(24);
  for (int trial = 0; trial < 50; ++trial) {
    Graph g = oracle::random_graph(rng, 0, 30, 0.2);
    auto a = greedy_mis(g);
    auto c = greedy_mvc(g);
    EXPECT_TRUE(is_valid(g, a));
    EXPECT_TRUE(is_valid(g, c));
    EXPECT_EQ(a.members, greedy_mis(g).members);
    EXPECT_EQ(c.members, greedy_mvc(g).members);
  }
}

TEST(LocalSearch, Examples) {
  EXPECT_EQ(local_search_mis(Graph(6, {}), 0.0, 1).size(), 6u);
  EXPECT_EQ(local_search_mis(complete(3), 0.05, 1).size(), 1u);
  int twos = 0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    auto s = local_search_mis(path(3), 0.0, seed, 50);
    EXPECT_GE(s.size(), 1u);
    EXPECT_TRUE(is_valid(path(3), s));
    twos += s.size() == 2;
  }
  EXPECT_EQ(twos, 20);
  EXPECT_EQ(local_search_mis(Graph(), 0.1, 1).size(), 0u);
}

TEST(LocalSearch, AlwaysIndependent) {
  std::mt19937_64 rng(25);
  for (int trial = 0; trial < 20; ++trial) {
    Graph g = oracle::random_graph(rng, 1, 40, 0.25);
    auto s = local_search_mis(g, 0.0, trial, 500);
    EXPECT_TRUE(is_valid(g, s));
    EXPECT_EQ(s.members, local_search_mis(g, 0.0, trial, 500).members);
  }
}

TEST(EmitLp, SingleEdge) {
  Graph e(2, {{0, 1}});
  const std::string mis = emit_lp(e, Problem::kMis);
  EXPECT_NE(mis.find("Maximize\n obj: x1 + x2\n"), std::string::npos);
  EXPECT_NE(mis.find("x1 + x2 <= 1"), std::string::npos);
  const std::string mvc = emit_lp(e, Problem::kMvc);
  EXPECT_NE(mvc.find("Minimize"), std::string::npos);
  EXPECT_NE(mvc.find("x1 + x2 >= 1"), std::string::npos);
}

TEST(EmitLp, EdgelessHasNoConstraints) {
  auto m = oracle::parse_lp(emit_lp(Graph(3, {}), Problem::kMis));
  EXPECT_TRUE(m.constraints.empty());
  EXPECT_EQ(m.objective, (std::vector<std::string>{"x1", "x2", "x3"}));
  EXPECT_TRUE(m.ended);
}

TEST(EmitLp, OneConstraintPerEdgeWithCorrectSense) {
  std::mt19937_64 rng(26);
  for (int trial = 0; trial < 20; ++trial) {
    Graph g = oracle::random_graph(rng, 1, 25, 0.3);
    for (Problem prob : {Problem::kMis, Problem::kMvc}) {
      auto m = oracle::parse_lp(emit_lp(g, prob));
      EXPECT_EQ(m.sense, prob == Problem::kMis ? "Maximize" : "Minimize");
      ASSERT_EQ(m.constraints.size(), g.num_edges());
      std::set<std::pair<std::string, std::string>> seen;
      for (const auto& c : m.constraints) {
        ASSERT_EQ(c.vars.size(), 2u);
        EXPECT_EQ(c.sense, prob == Problem::kMis ? "<=" : ">=");
        EXPECT_EQ(c.rhs, 1.0);
        seen.emplace(c.vars[0], c.vars[1]);
      }
      for (const auto& [u, v] : g.edges()) {
        EXPECT_TRUE(seen.count({"x" + std::to_string(u + 1), "x" + std::to_string(v + 1)}));
      }
      EXPECT_EQ(m.binaries.size(), g.num_vertices());
    }
  }
}
