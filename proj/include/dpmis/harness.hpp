#pragma once

#include <algorithm>
#include <cctype>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <istream>
#include <limits>
#include <map>
#include <memory>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "dpmis/classic.hpp"
#include "dpmis/dp_engine.hpp"
#include "dpmis/graph_io.hpp"
#include "dpmis/self_training.hpp"

namespace dpmis {

// ---------------------------------------------------------------------------
// Configuration

/// Everything a run needs: the training hyperparameters plus evaluation knobs.
struct RunConfig {
  TrainConfig train;
  std::uint64_t exact_budget = 20'000'000;  // node expansions per exact solve
  double local_search_seconds = 1.0;
};

class ConfigError : public std::invalid_argument {
 public:
  ConfigError(std::string key, const std::string& what)
      : std::invalid_argument(key.empty() ? what : key + ": " + what), key_(std::move(key)) {}
  const std::string& key() const noexcept { return key_; }

 private:
  std::string key_;
};

namespace detail {

inline std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

inline long long parse_int(const std::string& key, const std::string& v) {
  std::size_t used = 0;
  long long out = 0;
  try {
    out = std::stoll(v, &used);
  } catch (const std::exception&) {
    throw ConfigError(key, "expected an integer, got '" + v + "'");
  }
  if (used != v.size()) throw ConfigError(key, "expected an integer, got '" + v + "'");
  return out;
}

inline std::size_t parse_count(const std::string& key, const std::string& v, bool allow_zero) {
  const long long x = parse_int(key, v);
  if (x < 0 || (!allow_zero && x == 0)) {
    throw ConfigError(key, std::string("must be ") + (allow_zero ? "non-negative" : "positive") +
                               ", got " + v);
  }
  return static_cast<std::size_t>(x);
}

inline double parse_real(const std::string& key, const std::string& v) {
  std::size_t used = 0;
  double out = 0;
  try {
    out = std::stod(v, &used);
  } catch (const std::exception&) {
    throw ConfigError(key, "expected a number, got '" + v + "'");
  }
  if (used != v.size() || !std::isfinite(out)) throw ConfigError(key, "expected a number, got '" + v + "'");
  return out;
}

inline bool parse_bool(const std::string& key, const std::string& v) {
  if (v == "1" || v == "true" || v == "yes" || v == "on") return true;
  if (v == "0" || v == "false" || v == "no" || v == "off") return false;
  throw ConfigError(key, "expected true/false, got '" + v + "'");
}

}  // namespace detail

/// Keys accepted by set_config_key, in documentation order.
inline const std::vector<std::string>& config_keys() {
  static const std::vector<std::string> keys = {
      "epochs", "batch_size", "lr", "m", "mixed", "graphs_per_refresh", "pairs_per_graph",
      "epochs_per_refresh", "val_fraction", "drop_ties", "cross_pairs", "consistency_pairs",
      "seed", "K", "D", "L", "problem", "threads", "deterministic", "exact_budget",
      "local_search_seconds"};
  return keys;
}

/// Applies one `key=value` setting; throws ConfigError naming the key.
inline void set_config_key(RunConfig& cfg, const std::string& key, const std::string& raw) {
  using namespace detail;
  const std::string v = trim(raw);
  TrainConfig& t = cfg.train;
  auto geometry_field = [&](int& field) {
    const long long x = parse_int(key, v);
    const long long lo = key == "L" ? 2 : 1;
    if (x < lo || x > 4096) throw ConfigError(key, "must be in [" + std::to_string(lo) + ", 4096], got " + v);
    field = static_cast<int>(x);
  };
  if (key == "epochs") {
    t.total_epochs = parse_count(key, v, true);
  } else if (key == "batch_size") {
    t.batch_size = parse_count(key, v, false);
  } else if (key == "lr") {
    t.lr = parse_real(key, v);
    if (!(t.lr > 0.0)) throw ConfigError(key, "must be positive, got " + v);
  } else if (key == "m") {
    t.m = parse_count(key, v, false);
  } else if (key == "mixed") {
    t.mixed = parse_bool(key, v);
  } else if (key == "graphs_per_refresh") {
    t.graphs_per_refresh = parse_count(key, v, false);
  } else if (key == "pairs_per_graph") {
    t.pairs_per_graph = parse_count(key, v, false);
  } else if (key == "epochs_per_refresh") {
    t.epochs_per_refresh = parse_count(key, v, false);
  } else if (key == "val_fraction") {
    t.val_fraction = parse_real(key, v);
    if (!(t.val_fraction >= 0.0 && t.val_fraction < 1.0)) throw ConfigError(key, "must be in [0,1), got " + v);
  } else if (key == "drop_ties") {
    t.drop_ties = parse_bool(key, v);
  } else if (key == "cross_pairs") {
    t.cross_pairs = parse_bool(key, v);
  } else if (key == "consistency_pairs") {
    t.consistency_pairs = parse_count(key, v, true);
  } else if (key == "seed") {
    const long long x = parse_int(key, v);
    if (x < 0) throw ConfigError(key, "must be non-negative, got " + v);
    t.seed = static_cast<std::uint64_t>(x);
  } else if (key == "K") {
    geometry_field(t.geometry.iterations);
  } else if (key == "D") {
    geometry_field(t.geometry.width);
  } else if (key == "L") {
    geometry_field(t.geometry.layers);
  } else if (key == "problem") {
    try {
      t.problem = parse_problem(v);
    } catch (const std::invalid_argument& e) {
      throw ConfigError(key, e.what());
    }
  } else if (key == "threads") {
    t.threads = static_cast<unsigned>(parse_count(key, v, false));
  } else if (key == "deterministic") {
    t.deterministic = parse_bool(key, v);
  } else if (key == "exact_budget") {
    cfg.exact_budget = parse_count(key, v, false);
  } else if (key == "local_search_seconds") {
    cfg.local_search_seconds = parse_real(key, v);
    if (cfg.local_search_seconds < 0.0) throw ConfigError(key, "must be non-negative, got " + v);
  } else {
    throw ConfigError(key, "unknown configuration key");
  }
}

/// `key=value` lines; `#` starts a comment; blank lines ignored.
inline RunConfig parse_config(std::istream& in, RunConfig cfg = {}) {
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = detail::trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("", "line " + std::to_string(lineno) + ": expected key=value");
    }
    set_config_key(cfg, detail::trim(line.substr(0, eq)), line.substr(eq + 1));
  }
  return cfg;
}

inline RunConfig load_config(const std::string& path, RunConfig cfg = {}) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config '" + path + "'");
  return parse_config(in, std::move(cfg));
}

inline constexpr const char* kEnvPrefix = "DPMIS_";

/// Applies DPMIS_<KEY> environment overrides (key as spelled, e.g. DPMIS_lr or
/// DPMIS_LR; the exact spelling wins when both exist).
inline void apply_env(RunConfig& cfg, const std::function<const char*(const char*)>& getenv_fn = std::getenv) {
  for (const auto& key : config_keys()) {
    std::string upper = key;
    std::transform(upper.begin(), upper.end(), upper.begin(), [](unsigned char c) { return std::toupper(c); });
    const char* v = getenv_fn((kEnvPrefix + key).c_str());
    if (!v) v = getenv_fn((kEnvPrefix + upper).c_str());
    if (v) set_config_key(cfg, key, v);
  }
}

// ---------------------------------------------------------------------------
// Datasets

inline bool is_graph_file(const std::filesystem::path& p) {
  const auto ext = p.extension().string();
  return ext == ".col" || ext == ".dimacs" || ext == ".graph";
}

struct NamedGraph {
  std::string name;
  Graph graph;
};

/// Every graph file directly inside `dir`, in file-name order.
inline std::vector<NamedGraph> load_dataset(const std::string& dir) {
  namespace fs = std::filesystem;
  if (!fs::is_directory(dir)) throw std::runtime_error("not a directory: '" + dir + "'");
  std::vector<fs::path> files;
  for (const auto& e : fs::directory_iterator(dir)) {
    if (e.is_regular_file() && is_graph_file(e.path())) files.push_back(e.path());
  }
  std::sort(files.begin(), files.end());
  std::vector<NamedGraph> out;
  for (const auto& f : files) {
    try {
      out.push_back({f.filename().string(), load_graph(f.string())});
    } catch (const FormatError& e) {
      throw std::runtime_error(f.string() + ": " + e.what());
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Methods

enum class Method { kCmp, kCmpMixed, kGreedy, kRandom, kLocalSearch, kExact };

inline std::string method_name(Method m) {
  switch (m) {
    case Method::kCmp: return "cmp";
    case Method::kCmpMixed: return "cmp-mixed";
    case Method::kGreedy: return "greedy";
    case Method::kRandom: return "random";
    case Method::kLocalSearch: return "local-search";
    case Method::kExact: return "exact";
  }
  return "?";
}

inline Method parse_method(const std::string& s) {
  for (Method m : {Method::kCmp, Method::kCmpMixed, Method::kGreedy, Method::kRandom,
                   Method::kLocalSearch, Method::kExact}) {
    if (method_name(m) == s) return m;
  }
  throw std::invalid_argument("unknown method '" + s +
                              "' (expected cmp, cmp-mixed, greedy, random, local-search or exact)");
}

inline bool needs_weights(Method m) { return m == Method::kCmp || m == Method::kCmpMixed; }

struct MethodResult {
  VertexSet set;
  bool optimal = true;  // false only for an exact solve that ran out of budget
};

/// Solves `g` with one method. Learned and random comparators report the best
/// of cfg.train.m roll-outs; cmp-mixed also considers the greedy solution.
inline MethodResult run_method(Method method, Problem problem, const Graph& g,
                               const std::shared_ptr<const CmpParams>& params, const RunConfig& cfg,
                               std::uint64_t seed) {
  const std::size_t m = cfg.train.m;
  auto better = [&](const VertexSet& a, const VertexSet& b) {
    return problem == Problem::kMis ? a.size() > b.size() : a.size() < b.size();
  };
  auto greedy = [&] { return problem == Problem::kMis ? greedy_mis(g) : greedy_mvc(g); };
  switch (method) {
    case Method::kCmp:
    case Method::kCmpMixed: {
      if (!params) throw std::invalid_argument("method " + method_name(method) + " needs a weights file");
      VertexSet best = best_of_rollouts(problem, g, LearnedComparator{params.get()}, m, seed);
      if (method == Method::kCmpMixed) {
        VertexSet gs = greedy();
        if (better(gs, best)) best = gs;
      }
      return {best, true};
    }
    case Method::kGreedy:
      return {greedy(), true};
    case Method::kRandom:
      return {best_of_rollouts(problem, g, RandomComparator{}, m, seed), true};
    case Method::kLocalSearch: {
      VertexSet is = local_search_mis(g, cfg.local_search_seconds, seed);
      if (problem == Problem::kMis) return {is, true};
      return {complement(g, is, SetKind::kVertexCover), true};
    }
    case Method::kExact: {
      ExactResult r = problem == Problem::kMis ? exact_mis(g, cfg.exact_budget) : exact_mvc(g, cfg.exact_budget);
      return {r.set, r.optimal};
    }
  }
  throw std::logic_error("unreachable");
}

// ---------------------------------------------------------------------------
// Evaluation

struct EvalRow {
  std::string graph_id;
  std::size_t n = 0, m = 0;
  std::string method;
  std::size_t size = 0;
  std::size_t optimum = 0;  // proven bound when `bound` is set
  double ratio = 0.0;
  double seconds = 0.0;
  bool bound = false;       // exact oracle ran out of budget: row excluded from aggregates
};

struct Aggregate {
  double mean = 0.0;
  double std = 0.0;  // population standard deviation
  std::size_t count = 0;
  std::size_t excluded = 0;
};

struct EvalReport {
  std::vector<EvalRow> rows;
  std::map<std::string, Aggregate> aggregates;
};

/// found/optimum for MIS, found/optimum for MVC too (>= 1 there); 0/0 counts as 1.
inline double approximation_ratio(std::size_t found, std::size_t optimum) {
  if (optimum == 0) return found == 0 ? 1.0 : std::numeric_limits<double>::infinity();
  return static_cast<double>(found) / static_cast<double>(optimum);
}

inline std::map<std::string, Aggregate> aggregate_rows(const std::vector<EvalRow>& rows) {
  std::map<std::string, std::vector<double>> by_method;
  std::map<std::string, Aggregate> out;
  for (const auto& r : rows) {
    auto& a = out[r.method];
    if (r.bound) {
      ++a.excluded;
      continue;
    }
    by_method[r.method].push_back(r.ratio);
  }
  for (auto& [name, xs] : by_method) {
    auto& a = out[name];
    a.count = xs.size();
    double sum = 0.0;
    for (double x : xs) sum += x;
    a.mean = sum / static_cast<double>(xs.size());
    double ss = 0.0;
    for (double x : xs) ss += (x - a.mean) * (x - a.mean);
    a.std = std::sqrt(ss / static_cast<double>(xs.size()));
  }
  return out;
}

/// Solves every graph with every method and rates each solution against the
/// exact optimum. Graph i uses seed derive_seed(seed, i) for every method.
inline EvalReport eval_dataset(const std::vector<NamedGraph>& graphs, const std::vector<Method>& methods,
                               Problem problem, const std::shared_ptr<const CmpParams>& params,
                               const RunConfig& cfg, std::uint64_t seed) {
  EvalReport rep;
  for (std::size_t i = 0; i < graphs.size(); ++i) {
    const Graph& g = graphs[i].graph;
    const ExactResult opt = problem == Problem::kMis ? exact_mis(g, cfg.exact_budget) : exact_mvc(g, cfg.exact_budget);
    const std::uint64_t gseed = derive_seed(seed, i);
    for (Method method : methods) {
      const auto t0 = std::chrono::steady_clock::now();
      MethodResult res = run_method(method, problem, g, params, cfg, gseed);
      const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
      if (!is_valid(g, res.set)) {
        throw std::logic_error(method_name(method) + " produced an invalid set on " + graphs[i].name);
      }
      EvalRow row;
      row.graph_id = graphs[i].name;
      row.n = g.num_vertices();
      row.m = g.num_edges();
      row.method = method_name(method);
      row.size = res.set.size();
      row.bound = !opt.optimal;
      row.optimum = opt.optimal ? opt.set.size() : opt.bound;
      row.ratio = approximation_ratio(row.size, row.optimum);
      row.seconds = secs;
      rep.rows.push_back(row);
    }
  }
  rep.aggregates = aggregate_rows(rep.rows);
  return rep;
}

inline void write_eval_csv(std::ostream& out, const EvalReport& rep) {
  out << "graph_id,n,m,method,size,optimum,ratio,seconds,status\n";
  out.precision(10);
  for (const auto& r : rep.rows) {
    out << r.graph_id << ',' << r.n << ',' << r.m << ',' << r.method << ',' << r.size << ','
        << r.optimum << ',' << r.ratio << ',' << r.seconds << ',' << (r.bound ? "bound" : "exact") << '\n';
  }
}

inline void write_summary_csv(std::ostream& out, const EvalReport& rep) {
  out << "method,mean_ratio,std_ratio,count,excluded\n";
  out.precision(10);
  for (const auto& [name, a] : rep.aggregates) {
    out << name << ',' << a.mean << ',' << a.std << ',' << a.count << ',' << a.excluded << '\n';
  }
}

}  // namespace dpmis
