#pragma once

// Test-only reference implementations, kept independent of the library code
// paths they check.

#include <cmath>
#include <cstdint>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "dpmis/comparator_net.hpp"
#include "dpmis/graph.hpp"

namespace dpmis::oracle {

/// Random G(n, p) built with its own RNG, independent of the library generators.
inline Graph random_graph(std::mt19937_64& rng, int n_min, int n_max, double p) {
  std::uniform_int_distribution<int> nd(n_min, n_max);
  std::bernoulli_distribution coin(p);
  const int n = nd(rng);
  std::vector<Edge> edges;
  for (int u = 0; u < n; ++u) {
    for (int v = u + 1; v < n; ++v) {
      if (coin(rng)) edges.emplace_back(u, v);
    }
  }
  return Graph(static_cast<std::size_t>(n), edges);
}

/// |MIS| by enumerating all 2^n subsets.
inline std::size_t brute_force_mis(const Graph& g) {
  const std::size_t n = g.num_vertices();
  std::vector<std::uint32_t> nbr_mask(n, 0);
  for (const auto& [u, v] : g.edges()) {
    nbr_mask[u] |= 1u << v;
    nbr_mask[v] |= 1u << u;
  }
  std::size_t best = 0;
  for (std::uint32_t s = 0; s < (1u << n); ++s) {
    bool ok = true;
    for (std::size_t v = 0; v < n && ok; ++v) {
      if ((s >> v & 1u) && (nbr_mask[v] & s)) ok = false;
    }
    if (ok) best = std::max<std::size_t>(best, static_cast<std::size_t>(__builtin_popcount(s)));
  }
  return best;
}

// ---------------------------------------------------------------------------
// Straight-line forward pass with explicit loops: anti-neighbour sums are taken
// over the literal non-neighbour list rather than by subtraction from a total.

inline double ref_gelu(double x) { return 0.5 * x * (1.0 + std::erf(x / std::sqrt(2.0))); }

inline std::vector<double> ref_layer_norm(const std::vector<double>& a, const Vec& scale,
                                          const Vec& shift) {
  double mean = 0.0;
  for (double x : a) mean += x;
  mean /= static_cast<double>(a.size());
  double var = 0.0;
  for (double x : a) var += (x - mean) * (x - mean);
  var /= static_cast<double>(a.size());
  std::vector<double> out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    out[i] = (a[i] - mean) / std::sqrt(var + 1e-5) * scale[i] + shift[i];
  }
  return out;
}

inline std::vector<double> ref_affine(const Mat& w, const Vec& b, const std::vector<double>& x) {
  std::vector<double> out(static_cast<std::size_t>(w.rows()));
  for (Eigen::Index r = 0; r < w.rows(); ++r) {
    double acc = b[r];
    for (Eigen::Index c = 0; c < w.cols(); ++c) acc += w(r, c) * x[c];
    out[r] = acc;
  }
  return out;
}

inline double reference_score(const CmpParams& P, const Graph& g) {
  const std::size_t n = g.num_vertices();
  if (n == 0) return 0.0;
  const int p = P.geometry.width;
  const std::size_t e = 3 * static_cast<std::size_t>(p);
  std::vector<std::vector<double>> mu(n, std::vector<double>(e, 0.0));
  for (const auto& L : P.gem) {
    std::vector<std::vector<double>> next(n);
    for (std::size_t v = 0; v < n; ++v) {
      std::vector<double> nsum(e, 0.0), asum(e, 0.0);
      for (std::size_t u = 0; u < n; ++u) {
        if (u == v) continue;
        auto& dst = g.has_edge(static_cast<VertexId>(v), static_cast<VertexId>(u)) ? nsum : asum;
        for (std::size_t i = 0; i < e; ++i) dst[i] += mu[u][i];
      }
      auto a = ref_affine(L.self_w, L.self_b, mu[v]);
      auto b = ref_affine(L.nbr_w, L.nbr_b, nsum);
      auto c = ref_affine(L.anti_w, L.anti_b, asum);
      std::vector<double> cat;
      cat.insert(cat.end(), a.begin(), a.end());
      cat.insert(cat.end(), b.begin(), b.end());
      cat.insert(cat.end(), c.begin(), c.end());
      for (double& x : cat) x = ref_gelu(x);
      next[v] = ref_layer_norm(cat, L.norm_scale, L.norm_shift);
    }
    mu = std::move(next);
  }
  std::vector<double> pooled(e, 0.0);
  for (const auto& row : mu) {
    for (std::size_t i = 0; i < e; ++i) pooled[i] += row[i] / static_cast<double>(n);
  }
  std::vector<double> h = pooled, first;
  for (std::size_t l = 0; l + 1 < P.head.size(); ++l) {
    auto z = ref_affine(P.head[l].w, P.head[l].b, h);
    for (double& x : z) x = ref_gelu(x);
    h = ref_layer_norm(z, P.head[l].norm_scale, P.head[l].norm_shift);
    if (l == 0) first = h;
  }
  std::vector<double> cat = h;
  cat.insert(cat.end(), first.begin(), first.end());
  return ref_affine(P.head.back().w, P.head.back().b, cat)[0];
}

// ---------------------------------------------------------------------------
// Minimal LP-format reader: objective sense, objective variables, constraints
// (lhs variables, sense, rhs) and binaries.

struct LpConstraint {
  std::vector<std::string> vars;
  std::string sense;
  double rhs = 0.0;
};

struct LpModel {
  std::string sense;
  std::vector<std::string> objective;
  std::vector<LpConstraint> constraints;
  std::vector<std::string> binaries;
  bool ended = false;
};

inline LpModel parse_lp(const std::string& text) {
  LpModel m;
  std::istringstream in(text);
  std::string line, section;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '\\') continue;
    if (line == "Maximize" || line == "Minimize") {
      m.sense = line;
      section = "obj";
      continue;
    }
    if (line == "Subject To") {
      section = "st";
      continue;
    }
    if (line == "Binary") {
      section = "bin";
      continue;
    }
    if (line == "End") {
      m.ended = true;
      break;
    }
    std::istringstream ls(line);
    std::vector<std::string> tok;
    for (std::string t; ls >> t;) tok.push_back(t);
    if (section == "obj") {
      for (std::size_t i = 1; i < tok.size(); ++i) {
        if (tok[i] != "+") m.objective.push_back(tok[i]);
      }
    } else if (section == "st") {
      LpConstraint c;
      for (std::size_t i = 1; i < tok.size(); ++i) {
        if (tok[i] == "+") continue;
        if (tok[i] == "<=" || tok[i] == ">=" || tok[i] == "=") {
          c.sense = tok[i];
          c.rhs = std::stod(tok[i + 1]);
          break;
        }
        c.vars.push_back(tok[i]);
      }
      m.constraints.push_back(c);
    } else if (section == "bin") {
      for (auto& t : tok) m.binaries.push_back(t);
    }
  }
  return m;
}

}  // namespace dpmis::oracle
