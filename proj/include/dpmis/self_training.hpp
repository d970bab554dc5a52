#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <exception>
#include <functional>
#include <limits>
#include <numeric>
#include <ostream>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "dpmis/adam.hpp"
#include "dpmis/classic.hpp"
#include "dpmis/comparator_net.hpp"
#include "dpmis/dp_engine.hpp"
#include "dpmis/rng.hpp"

namespace dpmis {

/// A self-annotated training pair. For MIS, label 1 means G' has the larger
/// estimate; for MVC, that G' has the smaller one. Ties are label 0.
struct PairSample {
  Graph g, g_prime;
  int label = 0;
  std::size_t est_g = 0, est_gp = 0;
  std::size_t source = 0;  // index of the dataset graph the trajectory started from
  std::size_t step = 0;    // recursion step the pair came from
};

struct Buffer {
  std::vector<PairSample> train, validation;
  std::size_t capacity = 0;  // graphs_per_refresh * pairs_per_graph
  std::size_t size() const { return train.size() + validation.size(); }
};

struct TrainConfig {
  std::size_t total_epochs = 300;
  std::size_t batch_size = 32;
  double lr = 1e-3;
  std::size_t m = 3;
  bool mixed = false;
  std::size_t graphs_per_refresh = 32;
  std::size_t pairs_per_graph = 8;
  std::size_t epochs_per_refresh = 10;
  double val_fraction = 0.2;
  bool drop_ties = false;
  bool cross_pairs = false;
  std::size_t consistency_pairs = 64;  // 0 disables the measurement
  std::uint64_t seed = 0;
  Geometry geometry;
  Problem problem = Problem::kMis;
  unsigned threads = 1;
  bool deterministic = true;

  void validate() const {
    auto positive = [](std::size_t v, const char* key) {
      if (v == 0) throw std::invalid_argument(std::string(key) + " must be positive");
    };
    positive(batch_size, "batch_size");
    positive(m, "m");
    positive(graphs_per_refresh, "graphs_per_refresh");
    positive(pairs_per_graph, "pairs_per_graph");
    positive(epochs_per_refresh, "epochs_per_refresh");
    if (!(lr > 0.0) || !std::isfinite(lr)) throw std::invalid_argument("lr must be positive");
    if (!(val_fraction >= 0.0 && val_fraction < 1.0)) {
      throw std::invalid_argument("val_fraction must be in [0,1)");
    }
    if (threads == 0) throw std::invalid_argument("threads must be positive");
    geometry.validate();
  }
  unsigned workers() const { return deterministic ? 1u : threads; }
};

namespace detail {

/// Runs f(i) for i in [0, n) on up to `workers` threads. Each index writes only
/// its own output slot, so results do not depend on scheduling.
template <class F>
void parallel_for(std::size_t n, unsigned workers, F&& f) {
  if (workers <= 1 || n <= 1) {
    for (std::size_t i = 0; i < n; ++i) f(i);
    return;
  }
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> errors(workers);
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      try {
        for (std::size_t i = w; i < n; i += workers) f(i);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

inline int label_for(Problem problem, std::size_t est_g, std::size_t est_gp) {
  return problem == Problem::kMis ? (est_g < est_gp ? 1 : 0) : (est_g > est_gp ? 1 : 0);
}

}  // namespace detail

/// Runs the learned recursion on `g_init`, samples up to pairs_per_graph of its
/// steps and labels each sibling pair (G0, G1) by comparing roll-out estimates.
inline std::vector<PairSample> harvest_pairs(const Graph& g_init, const CmpParams& params,
                                             const TrainConfig& cfg, std::uint64_t seed,
                                             std::size_t source = 0) {
  LearnedComparator learned{&params};
  SolveResult run = solve(cfg.problem, g_init, learned, derive_seed(seed, 0));
  const auto& steps = run.trajectory.steps;
  std::vector<std::size_t> idx(steps.size());
  std::iota(idx.begin(), idx.end(), 0);
  Rng rng = make_rng(derive_seed(seed, 1));
  std::shuffle(idx.begin(), idx.end(), rng);
  idx.resize(std::min(idx.size(), cfg.pairs_per_graph));
  std::sort(idx.begin(), idx.end());

  std::vector<PairSample> out;
  for (std::size_t k = 0; k < idx.size(); ++k) {
    const auto& s = steps[idx[k]];
    PairSample p;
    p.g = s.g0;
    p.g_prime = s.g1;
    p.est_g = estimate(cfg.problem, s.g0, learned, cfg.m, derive_seed(seed, 2 + 2 * idx[k]), cfg.mixed);
    p.est_gp = estimate(cfg.problem, s.g1, learned, cfg.m, derive_seed(seed, 3 + 2 * idx[k]), cfg.mixed);
    p.label = detail::label_for(cfg.problem, p.est_g, p.est_gp);
    p.source = source;
    p.step = idx[k];
    if (cfg.drop_ties && p.est_g == p.est_gp) continue;
    out.push_back(std::move(p));
  }
  return out;
}

/// Builds a fresh buffer from graphs_per_refresh dataset graphs (drawn without
/// replacement while the dataset lasts) and splits it train/validation.
inline Buffer refresh_buffer(const std::vector<Graph>& dataset, const CmpParams& params,
                             const TrainConfig& cfg, std::uint64_t seed) {
  if (dataset.empty()) throw std::invalid_argument("refresh_buffer: empty dataset");
  Rng rng = make_rng(derive_seed(seed, 0));
  std::vector<std::size_t> chosen;
  std::vector<std::size_t> order(dataset.size());
  while (chosen.size() < cfg.graphs_per_refresh) {
    std::iota(order.begin(), order.end(), 0);
    std::shuffle(order.begin(), order.end(), rng);
    for (std::size_t i : order) {
      if (chosen.size() == cfg.graphs_per_refresh) break;
      chosen.push_back(i);
    }
  }
  std::vector<std::vector<PairSample>> per_graph(chosen.size());
  detail::parallel_for(chosen.size(), cfg.workers(), [&](std::size_t k) {
    per_graph[k] = harvest_pairs(dataset[chosen[k]], params, cfg, derive_seed(seed, 100 + k), chosen[k]);
  });
  std::vector<PairSample> all;
  for (auto& v : per_graph) {
    for (auto& p : v) all.push_back(std::move(p));
  }

  if (cfg.cross_pairs && all.size() > 1) {
    // Pair each G with the G' of a sample from another trajectory; both
    // estimates are already known, so only the label is recomputed.
    const std::size_t base = all.size();
    std::uniform_int_distribution<std::size_t> pick(0, base - 1);
    for (std::size_t i = 0; i < base; ++i) {
      const std::size_t j = pick(rng);
      if (all[j].source == all[i].source) continue;
      PairSample p;
      p.g = all[i].g;
      p.g_prime = all[j].g_prime;
      p.est_g = all[i].est_g;
      p.est_gp = all[j].est_gp;
      p.label = detail::label_for(cfg.problem, p.est_g, p.est_gp);
      p.source = all[i].source;
      p.step = all[i].step;
      if (cfg.drop_ties && p.est_g == p.est_gp) continue;
      all.push_back(std::move(p));
    }
  }

  std::shuffle(all.begin(), all.end(), rng);
  const auto n_val = static_cast<std::size_t>(
      std::llround(cfg.val_fraction * static_cast<double>(all.size())));
  Buffer b;
  b.capacity = cfg.graphs_per_refresh * cfg.pairs_per_graph;
  b.validation.assign(std::make_move_iterator(all.begin()),
                      std::make_move_iterator(all.begin() + static_cast<std::ptrdiff_t>(n_val)));
  b.train.assign(std::make_move_iterator(all.begin() + static_cast<std::ptrdiff_t>(n_val)),
                 std::make_move_iterator(all.end()));
  return b;
}

/// Fraction of pairs on which the comparator agrees with the estimator:
/// comparator 0 exactly when est(G) >= est(G') (MIS) or est(G) <= est(G') (MVC).
template <class CmpFn, class EstFn>
double measure_consistency(const std::vector<PairSample>& pairs, CmpFn&& compare, EstFn&& est,
                           Problem problem = Problem::kMis) {
  if (pairs.empty()) return 1.0;
  std::size_t ok = 0;
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    const int c = compare(pairs[i].g, pairs[i].g_prime, i);
    // Both sides share a seed index, so identical graphs get identical estimates.
    const std::size_t a = est(pairs[i].g, i);
    const std::size_t b = est(pairs[i].g_prime, i);
    const bool keep = problem == Problem::kMis ? a >= b : a <= b;
    ok += (c == 0) == keep;
  }
  return static_cast<double>(ok) / static_cast<double>(pairs.size());
}

/// Consistency of the learned comparator with its own m-roll-out estimates.
inline double measure_consistency(const CmpParams& params, const std::vector<PairSample>& pairs,
                                  std::size_t m, std::uint64_t seed, Problem problem = Problem::kMis) {
  LearnedComparator learned{&params};
  return measure_consistency(
      pairs, [&](const Graph& a, const Graph& b, std::size_t) { return cmp(params, a, b); },
      [&](const Graph& g, std::size_t i) {
        return estimate(problem, g, learned, m, derive_seed(seed, i), false);
      },
      problem);
}

struct MetricsRow {
  std::size_t epoch = 0;
  std::size_t refresh_index = 0;
  double train_loss = 0.0;
  double val_loss = 0.0;
  double val_pair_accuracy = 0.0;
  double consistency = 0.0;
  double wall_seconds = 0.0;
};

inline void write_metrics_csv(std::ostream& out, const std::vector<MetricsRow>& rows) {
  out << "epoch,refresh_index,train_loss,val_loss,val_pair_accuracy,consistency,wall_seconds\n";
  out.precision(10);
  for (const auto& r : rows) {
    out << r.epoch << ',' << r.refresh_index << ',' << r.train_loss << ',' << r.val_loss << ','
        << r.val_pair_accuracy << ',' << r.consistency << ',' << r.wall_seconds << '\n';
  }
}

struct TrainResult {
  CmpParams params;                // lowest validation loss seen
  CmpParams final_params;          // after the last epoch
  std::vector<MetricsRow> log;
  std::vector<double> consistency;  // [0] before any update, then one per refresh
  std::size_t best_epoch = 0;
  std::vector<std::string> warnings;
};

/// Mean loss and summed gradient of a batch. Per-sample work may fan out;
/// the reduction always runs in sample order.
inline double batch_loss_and_grad(const CmpParams& params, const std::vector<const PairSample*>& batch,
                                  CmpParams& grad_sum, unsigned workers) {
  std::vector<LossAndGrad> parts(batch.size());
  detail::parallel_for(batch.size(), workers, [&](std::size_t i) {
    parts[i] = pair_loss_and_grad(params, batch[i]->g, batch[i]->g_prime, batch[i]->label);
  });
  grad_sum = CmpParams::zeros(params.geometry);
  double loss = 0.0;
  const double w = 1.0 / static_cast<double>(batch.size());
  for (const auto& p : parts) {
    loss += p.loss;
    grad_sum.add_scaled(p.grads, w);
  }
  return loss * w;
}

/// Mean pair loss and the fraction of pairs whose comparator output equals the label.
inline std::pair<double, double> evaluate_pairs(const CmpParams& params,
                                                const std::vector<PairSample>& pairs) {
  if (pairs.empty()) return {0.0, 0.0};
  double loss = 0.0;
  std::size_t hits = 0;
  for (const auto& p : pairs) {
    const double s = score_graph(params, p.g);
    const double t = score_graph(params, p.g_prime);
    loss += pair_loss_from_logits(s, t, p.label);
    hits += (s < t ? 1 : 0) == p.label;
  }
  const double n = static_cast<double>(pairs.size());
  return {loss / n, static_cast<double>(hits) / n};
}

/// Observer called after every epoch with the row just logged.
using EpochHook = std::function<void(const MetricsRow&)>;

/// Self-training loop: refresh the buffer with the current model, run
/// epochs_per_refresh epochs of mini-batch Adam on it, repeat until
/// total_epochs. Returns the parameters with the lowest validation loss.
inline TrainResult train(const std::vector<Graph>& dataset, const TrainConfig& cfg,
                         const EpochHook& hook = {}) {
  cfg.validate();
  if (dataset.empty()) throw std::invalid_argument("train: empty dataset");
  const auto t0 = std::chrono::steady_clock::now();
  auto elapsed = [&] {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  };

  TrainResult out;
  CmpParams params = init_params(cfg.geometry, derive_seed(cfg.seed, 1));
  out.params = params;
  out.final_params = params;
  if (cfg.total_epochs == 0) return out;

  AdamState adam;
  AdamConfig adam_cfg;
  adam_cfg.lr = cfg.lr;
  Rng shuffle_rng = make_rng(derive_seed(cfg.seed, 2));
  double best_val = std::numeric_limits<double>::infinity();
  double latest_consistency = 0.0;

  auto consistency_of = [&](const Buffer& b, std::size_t refresh) {
    std::vector<PairSample> probe;
    for (const auto* split : {&b.validation, &b.train}) {
      for (const auto& p : *split) {
        if (probe.size() < cfg.consistency_pairs) probe.push_back(p);
      }
    }
    return measure_consistency(params, probe, cfg.m, derive_seed(cfg.seed, 1000 + refresh), cfg.problem);
  };

  std::size_t epoch = 0;
  for (std::size_t refresh = 0; epoch < cfg.total_epochs; ++refresh) {
    Buffer buf = refresh_buffer(dataset, params, cfg, derive_seed(cfg.seed, 10000 + refresh));
    if (refresh == 0 && cfg.consistency_pairs > 0) {
      latest_consistency = consistency_of(buf, 0);
      out.consistency.push_back(latest_consistency);
    }
    const bool degenerate =
        std::all_of(buf.train.begin(), buf.train.end(), [&](const PairSample& p) { return p.label == buf.train.front().label; });
    if (buf.train.empty() || degenerate) {
      out.warnings.push_back("refresh " + std::to_string(refresh) + ": " +
                             (buf.train.empty() ? "empty training split" : "all training labels equal"));
    }
    const auto& val = buf.validation.empty() ? buf.train : buf.validation;

    for (std::size_t e = 0; e < cfg.epochs_per_refresh && epoch < cfg.total_epochs; ++e, ++epoch) {
      std::vector<const PairSample*> order;
      for (const auto& p : buf.train) order.push_back(&p);
      std::shuffle(order.begin(), order.end(), shuffle_rng);
      double loss_sum = 0.0;
      std::size_t batches = 0;
      for (std::size_t i = 0; i < order.size(); i += cfg.batch_size) {
        std::vector<const PairSample*> batch(order.begin() + static_cast<std::ptrdiff_t>(i),
                                             order.begin() + static_cast<std::ptrdiff_t>(std::min(order.size(), i + cfg.batch_size)));
        CmpParams grads;
        loss_sum += batch_loss_and_grad(params, batch, grads, cfg.workers());
        adam_step(params, grads, adam, adam_cfg);
        ++batches;
      }
      if (!params.all_finite()) throw NumericError("training diverged: non-finite parameters");
      const bool last_of_refresh = e + 1 == cfg.epochs_per_refresh || epoch + 1 == cfg.total_epochs;
      if (last_of_refresh && cfg.consistency_pairs > 0) {
        latest_consistency = consistency_of(buf, refresh + 1);
        out.consistency.push_back(latest_consistency);
      }
      auto [vloss, vacc] = evaluate_pairs(params, val);
      MetricsRow row;
      row.epoch = epoch;
      row.refresh_index = refresh;
      row.train_loss = batches ? loss_sum / static_cast<double>(batches) : vloss;
      row.val_loss = vloss;
      row.val_pair_accuracy = vacc;
      row.consistency = latest_consistency;
      row.wall_seconds = elapsed();
      out.log.push_back(row);
      if (hook) hook(row);
      if (vloss < best_val) {
        best_val = vloss;
        out.params = params;
        out.best_epoch = epoch;
      }
    }
  }
  out.final_params = params;
  return out;
}

}  // namespace dpmis
