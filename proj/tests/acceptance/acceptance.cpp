// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fail.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numeric>
#include <set>
#include <sstream>
#include <string>

#include "dpmis/classic.hpp"
#include "dpmis/comparator_net.hpp"
#include "dpmis/dp_engine.hpp"
#include "dpmis/generators.hpp"
#include "dpmis/graph_io.hpp"
#include "dpmis/param_io.hpp"
#include "dpmis/self_training.hpp"
#include "oracles.hpp"

using namespace dpmis;

namespace {

struct Outcome {
  bool pass;
  std::string detail;
};

using Clock = std::chrono::steady_clock;

double since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::string fmt(const char* f, double a, double b = 0, double c = 0, double d = 0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c, d);
  return buf;
}

Outcome branching_identity() {
  std::mt19937_64 rng(101);
  const double ps[] = {0.2, 0.4, 0.6};
  std::size_t checks = 0, bad = 0;
  const auto t0 = Clock::now();
  for (int i = 0; i < 200; ++i) {
    Graph g = oracle::random_graph(rng, 4, 14, ps[i % 3]);
    const std::size_t whole = exact_mis(g).set.size();
    for (VertexId v = 0; v < static_cast<VertexId>(g.num_vertices()); ++v) {
      if (g.degree(v) == 0) continue;
      ++checks;
      const std::size_t take = exact_mis(remove_neighbors(g, v).graph).set.size();
      const std::size_t skip = exact_mis(remove_vertex(g, v).graph).set.size();
      if (whole != std::max(take, skip)) ++bad;
    }
  }
  const double t = since(t0);
  return {bad == 0 && t < 60.0, fmt("%.0f vertex checks, %.0f mismatches, %.1fs", double(checks), double(bad), t)};
}

Outcome oracle_optimality() {
  std::mt19937_64 rng(102);
  std::size_t mis_ok = 0, mvc_ok = 0;
  const auto t0 = Clock::now();
  for (int i = 0; i < 300; ++i) {
    Graph g = oracle::random_graph(rng, 1, 18, 0.3);
    const std::size_t opt = exact_mis(g).set.size();
    for (std::uint64_t s = 0; s < 5; ++s) {
      auto r = solve_mis(g, OracleComparator{Problem::kMis}, s);
      if (is_valid(g, r.set) && r.set.size() == opt) ++mis_ok;
    }
  }
  for (int i = 0; i < 200; ++i) {
    Graph g = oracle::random_graph(rng, 1, 14, 0.3);
    const std::size_t opt = exact_mvc(g).set.size();
    for (std::uint64_t s = 0; s < 5; ++s) {
      auto r = solve_mvc(g, OracleComparator{Problem::kMvc}, s);
      if (is_valid(g, r.set) && r.set.size() == opt) ++mvc_ok;
    }
  }
  const double t = since(t0);
  return {mis_ok == 1500 && mvc_ok == 1000 && t < 300.0,
          fmt("mis %.0f/1500, mvc %.0f/1000, %.1fs", double(mis_ok), double(mvc_ok), t)};
}

Outcome validity_fuzz() {
  std::mt19937_64 rng(103);
  std::size_t ok = 0;
  for (int i = 0; i < 1000; ++i) {
    Graph g = oracle::random_graph(rng, 0, 30, std::uniform_real_distribution<double>(0.0, 0.8)(rng));
    if (is_valid(g, solve_mis(g, RandomComparator{}, i).set) && is_valid(g, solve_mvc(g, RandomComparator{}, i).set))
      ++ok;
  }
  return {ok == 1000, fmt("%.0f/1000 runs valid for both problems", double(ok))};
}

Outcome gallai() {
  std::mt19937_64 rng(104);
  std::size_t ok = 0;
  for (int i = 0; i < 200; ++i) {
    Graph g = oracle::random_graph(rng, 0, 30, 0.25);
    if (exact_mis(g).set.size() + exact_mvc(g).set.size() == g.num_vertices()) ++ok;
  }
  return {ok == 200, fmt("%.0f/200", double(ok))};
}

Outcome brute_force() {
  std::mt19937_64 rng(105);
  std::size_t ok = 0;
  for (int i = 0; i < 100; ++i) {
    Graph g = oracle::random_graph(rng, 0, 12, 0.35);
    if (exact_mis(g).set.size() == oracle::brute_force_mis(g)) ++ok;
  }
  return {ok == 100, fmt("%.0f/100", double(ok))};
}

Outcome gradient_check() {
  std::mt19937_64 rng(106);
  const double h = 1e-5;
  std::size_t total = 0, good = 0;
  for (int trial = 0; trial < 20; ++trial) {
    CmpParams p = init_params(Geometry{3, 4, 4}, 200 + trial);
    Graph a = oracle::random_graph(rng, 1, 8, 0.4);
    Graph b = oracle::random_graph(rng, 1, 8, 0.4);
    const int label = static_cast<int>(rng() % 2);
    auto analytic = flatten(pair_loss_and_grad(p, a, b, label).grads);
    std::vector<double> w = flatten(p);
    CmpParams q = p;
    for (std::size_t i = 0; i < w.size(); ++i) {
      const double keep = w[i];
      w[i] = keep + h;
      unflatten(w, q);
      const double up = pair_loss(q, a, b, label);
      w[i] = keep - h;
      unflatten(w, q);
      const double down = pair_loss(q, a, b, label);
      w[i] = keep;
      const double numeric = (up - down) / (2 * h);
      const double diff = std::abs(numeric - analytic[i]);
      ++total;
      if (diff <= 1e-4 * std::max(std::abs(numeric), std::abs(analytic[i])) || diff < 1e-9) ++good;
    }
  }
  const double frac = double(good) / double(total);
  return {frac >= 0.99, fmt("%.0f/%.0f components (%.4f)", double(good), double(total), frac)};
}

Outcome permutation_invariance() {
  std::mt19937_64 rng(107);
  std::size_t ok = 0;
  double worst = 0.0;
  for (int i = 0; i < 100; ++i) {
    CmpParams p = init_params(Geometry{}, 300 + i);
    Graph g = oracle::random_graph(rng, 1, 30, 0.3);
    std::vector<VertexId> perm(g.num_vertices());
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), rng);
    const double a = score_graph(p, g);
    const double d = std::abs(a - score_graph(p, permute(g, perm)));
    worst = std::max(worst, d / (1.0 + std::abs(a)));
    if (d <= 1e-6 * (1.0 + std::abs(a))) ++ok;
  }
  return {ok == 100, fmt("%.0f/100, worst scaled gap %.2e", double(ok), worst)};
}

std::vector<Graph> er_set(std::uint64_t seed, std::size_t count) {
  std::vector<Graph> out;
  Rng r = make_rng(seed);
  for (std::size_t i = 0; i < count; ++i) {
    const int n = std::uniform_int_distribution<int>(15, 35)(r);
    out.push_back(generate(GenSpec::erdos_renyi(n, 0.15, r())));
  }
  return out;
}

// Criteria 8 and 10 share one training run.
std::pair<Outcome, Outcome> er_training() {
  const auto t0 = Clock::now();
  auto train_set = er_set(1, 50), test_set = er_set(2, 50);
  TrainConfig cfg;
  cfg.total_epochs = 100;
  cfg.mixed = true;
  cfg.seed = 3;
  TrainResult res = train(train_set, cfg);
  double learned = 0.0, random = 0.0;
  for (std::size_t i = 0; i < test_set.size(); ++i) {
    const double opt = static_cast<double>(exact_mis(test_set[i]).set.size());
    learned += rollout_estimate(test_set[i], LearnedComparator{&res.params}, 3, i) / opt;
    random += rollout_estimate(test_set[i], RandomComparator{}, 3, i) / opt;
  }
  learned /= static_cast<double>(test_set.size());
  random /= static_cast<double>(test_set.size());
  const double t = since(t0);
  Outcome c8{learned >= 0.92 && learned >= random + 0.05 && t < 1800.0,
             fmt("learned %.4f, random %.4f, %.1fs", learned, random, t)};

  std::ostringstream csv;
  write_metrics_csv(csv, res.log);
  std::istringstream in(csv.str());
  std::string line;
  std::getline(in, line);
  std::vector<double> logged;
  while (std::getline(in, line)) {
    std::vector<std::string> cols;
    std::stringstream ss(line);
    for (std::string c; std::getline(ss, c, ',');) cols.push_back(c);
    if (cols.size() == 7) logged.push_back(std::stod(cols[5]));
  }
  bool ok = res.consistency.size() >= 2 && logged.size() == cfg.total_epochs;
  double first = 0.0, last = 0.0;
  if (ok) {
    first = res.consistency.front();
    last = res.consistency.back();
    ok = last > first && std::abs(logged.front() - first) < 1e-9 && std::abs(logged.back() - last) < 1e-9;
  }
  return {c8, {ok, fmt("iteration 0 %.3f, final %.3f, %.0f measurements", first, last, double(res.consistency.size()))}};
}

Outcome special() {
  const Graph test = generate(GenSpec::special(20, 3));
  const double greedy = static_cast<double>(greedy_mis(test).size()) / 20.0;
  std::vector<Graph> train_set;
  Rng r = make_rng(5);
  for (int i = 0; i < 40; ++i) {
    const int n = std::uniform_int_distribution<int>(10, 25)(r);
    const int a = std::uniform_int_distribution<int>(1, 5)(r);
    train_set.push_back(generate(GenSpec::special(n, a)));
  }
  TrainConfig cfg;
  cfg.total_epochs = 100;
  cfg.seed = 4;
  TrainResult res = train(train_set, cfg);
  double model = 0.0;
  for (int i = 0; i < 20; ++i) {
    model += rollout_estimate(test, LearnedComparator{&res.params}, 3, 100 + i) / 20.0;
  }
  model /= 20.0;
  return {greedy == 0.15 && model >= 0.90, fmt("greedy %.4f, model %.4f", greedy, model)};
}

Outcome round_trips() {
  std::mt19937_64 rng(111);
  std::size_t ok = 0, total = 0;
  for (std::uint64_t s = 0; s < 50; ++s) {
    CmpParams p = init_params(Geometry{1 + int(s % 4), 2 + int(s % 9), 2 + int(s % 3)}, s);
    std::stringstream a;
    save_params(a, p);
    const std::string bytes = a.str();
    CmpParams back = load_params(a);
    std::stringstream b;
    save_params(b, back);
    ++total;
    if (back == p && b.str() == bytes) ++ok;
  }
  for (int i = 0; i < 100; ++i) {
    Graph g = oracle::random_graph(rng, 0, 40, 0.2);
    const std::string text = write_graph(g);
    Graph back = parse_graph(text);
    ++total;
    if (back == g && write_graph(back) == text) ++ok;
    VertexSet s = greedy_mis(g);
    std::stringstream buf;
    write_solution(buf, s);
    VertexSet sb = read_solution(buf, SetKind::kIndependentSet);
    ++total;
    if (sb.members == s.members && is_valid(g, sb)) ++ok;
  }
  return {ok == total, fmt("%.0f/%.0f", double(ok), double(total))};
}

Outcome lp_files() {
  std::mt19937_64 rng(112);
  std::size_t ok = 0;
  for (int i = 0; i < 20; ++i) {
    Graph g = oracle::random_graph(rng, 2, 25, 0.3);
    bool good = true;
    for (Problem prob : {Problem::kMis, Problem::kMvc}) {
      auto m = oracle::parse_lp(emit_lp(g, prob));
      const std::string sense = prob == Problem::kMis ? "<=" : ">=";
      good = good && m.constraints.size() == g.num_edges();
      std::set<std::pair<std::string, std::string>> seen;
      for (const auto& c : m.constraints) {
        good = good && c.vars.size() == 2 && c.sense == sense && c.rhs == 1.0;
        if (c.vars.size() == 2) seen.emplace(c.vars[0], c.vars[1]);
      }
      for (const auto& [u, v] : g.edges()) {
        good = good && seen.count({"x" + std::to_string(u + 1), "x" + std::to_string(v + 1)});
      }
    }
    if (good) ++ok;
  }
  return {ok == 20, fmt("%.0f/20 graphs", double(ok))};
}

}  // namespace

int main() {
  int failures = 0;
  auto report = [&](int id, const Outcome& o, double secs) {
    std::printf("criterion %2d: %s  %s [%.1fs]\n", id, o.pass ? "PASS" : "FAIL", o.detail.c_str(), secs);
    std::fflush(stdout);
    if (!o.pass) ++failures;
  };
  auto run = [&](int id, const std::function<Outcome()>& f) {
    const auto t0 = Clock::now();
    Outcome o;
    try {
      o = f();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    report(id, o, since(t0));
  };
  run(1, branching_identity);
  run(2, oracle_optimality);
  run(3, validity_fuzz);
  run(4, gallai);
  run(5, brute_force);
  run(6, gradient_check);
  run(7, permutation_invariance);
  {
    const auto t0 = Clock::now();
    std::pair<Outcome, Outcome> r;
    try {
      r = er_training();
    } catch (const std::exception& e) {
      r.first = r.second = {false, std::string("exception: ") + e.what()};
    }
    const double t = since(t0);
    report(8, r.first, t);
    run(9, special);
    report(10, r.second, t);
  }
  run(11, round_trips);
  run(12, lp_files);
  std::printf("%d of 12 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
