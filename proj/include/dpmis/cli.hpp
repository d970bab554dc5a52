#pragma once

// Command-line front end. Exit codes: 0 success, 1 usage error, 2 runtime error.
// Settings are layered: built-in defaults, then --config file, then DPMIS_<key>
// environment variables, then --set key=value flags.

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "dpmis/classic.hpp"
#include "dpmis/generators.hpp"
#include "dpmis/graph_io.hpp"
#include "dpmis/harness.hpp"
#include "dpmis/param_io.hpp"
#include "dpmis/self_training.hpp"

namespace dpmis {

class UsageError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

namespace detail {

struct ConfigFlags {
  std::string config_path;
  std::vector<std::string> sets;

  void attach(CLI::App* cmd) {
    cmd->add_option("--config", config_path, "key=value configuration file");
    cmd->add_option("--set", sets, "override one configuration key (key=value), repeatable");
  }

  RunConfig build() const {
    RunConfig cfg;
    if (!config_path.empty()) cfg = load_config(config_path);
    apply_env(cfg);
    for (const auto& s : sets) {
      const auto eq = s.find('=');
      if (eq == std::string::npos) throw UsageError("--set expects key=value, got '" + s + "'");
      set_config_key(cfg, trim(s.substr(0, eq)), s.substr(eq + 1));
    }
    return cfg;
  }
};

inline std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream in(s);
  for (std::string item; std::getline(in, item, ',');) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

inline std::ofstream open_out(const std::string& path) {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot write '" + path + "'");
  return f;
}

inline std::vector<Graph> graphs_only(const std::vector<NamedGraph>& named) {
  std::vector<Graph> out;
  for (const auto& g : named) out.push_back(g.graph);
  return out;
}

inline std::vector<NamedGraph> require_dataset(const std::string& dir) {
  auto data = load_dataset(dir);
  if (data.empty()) throw UsageError("no graph files (.col, .dimacs, .graph) in '" + dir + "'");
  return data;
}

inline void write_consistency_csv(std::ostream& out, const std::vector<double>& curve) {
  out << "iteration,consistency\n";
  out.precision(10);
  for (std::size_t i = 0; i < curve.size(); ++i) out << i << ',' << curve[i] << '\n';
}

}  // namespace detail

inline int run_cli(int argc, const char* const* argv, std::ostream& out = std::cout,
                   std::ostream& err = std::cerr) {
  CLI::App app{"Comparator-driven DP solver for maximum independent set and minimum vertex cover"};
  app.require_subcommand(1);

  // gen
  auto* gen = app.add_subcommand("gen", "write a synthetic dataset");
  std::string gen_model, gen_out;
  int gen_count = 1, gen_n = 20, gen_n_min = 0, gen_n_max = 0, gen_attach = 2, gen_ring = 4, gen_surplus = 3;
  double gen_p = 0.15;
  std::uint64_t gen_seed = 0;
  gen->add_option("--model", gen_model, "er, ba, ws or special")->required();
  gen->add_option("--count", gen_count, "number of graphs")->check(CLI::PositiveNumber);
  gen->add_option("--n", gen_n, "vertex count (independent-set size for special)");
  gen->add_option("--n-min", gen_n_min, "draw n uniformly from [n-min, n-max]");
  gen->add_option("--n-max", gen_n_max);
  gen->add_option("--p", gen_p, "edge probability (er) or rewiring probability (ws)");
  gen->add_option("--attach", gen_attach, "edges per new vertex (ba)");
  gen->add_option("--ring-degree", gen_ring, "lattice degree (ws)");
  gen->add_option("--surplus", gen_surplus, "clique surplus a (special)");
  gen->add_option("--seed", gen_seed);
  gen->add_option("--out", gen_out, "output directory")->required();

  // train
  auto* trn = app.add_subcommand("train", "self-train a comparator");
  detail::ConfigFlags trn_cfg;
  trn_cfg.attach(trn);
  std::string trn_data, trn_weights, trn_metrics;
  trn->add_option("--data", trn_data, "directory of training graphs")->required();
  trn->add_option("--weights", trn_weights, "output weight file")->required();
  trn->add_option("--metrics", trn_metrics, "per-epoch metrics CSV");

  // solve
  auto* slv = app.add_subcommand("solve", "solve one graph with one method");
  std::string slv_graph, slv_method = "greedy", slv_problem = "mis", slv_weights, slv_out, slv_traj;
  detail::ConfigFlags slv_cfg;
  slv_cfg.attach(slv);
  slv->add_option("--graph", slv_graph, "graph file")->required();
  slv->add_option("--method", slv_method, "cmp, cmp-mixed, greedy, random, local-search or exact");
  slv->add_option("--problem", slv_problem, "mis or mvc");
  slv->add_option("--weights", slv_weights, "weight file for cmp methods");
  slv->add_option("--out", slv_out, "solution file (default: <graph>.sol)");
  slv->add_option("--trajectory", slv_traj, "write one recorded recursion (cmp/random methods)");

  // eval
  auto* evl = app.add_subcommand("eval", "approximation ratios over a dataset");
  detail::ConfigFlags evl_cfg;
  evl_cfg.attach(evl);
  std::string evl_data, evl_methods, evl_problem, evl_weights, evl_out, evl_summary;
  evl->add_option("--data", evl_data, "directory of graphs")->required();
  evl->add_option("--methods", evl_methods, "comma-separated methods");
  evl->add_option("--problem", evl_problem, "mis or mvc (default: config)");
  evl->add_option("--weights", evl_weights, "weight file for cmp methods");
  evl->add_option("--out", evl_out, "per-graph CSV")->required();
  evl->add_option("--summary", evl_summary, "per-method mean/std CSV");

  // consistency
  auto* cons = app.add_subcommand("consistency", "consistency curve over training, or of one model");
  detail::ConfigFlags cons_cfg;
  cons_cfg.attach(cons);
  std::string cons_data, cons_weights, cons_out, cons_weights_out;
  cons->add_option("--data", cons_data, "directory of graphs")->required();
  cons->add_option("--weights", cons_weights, "measure this model instead of training");
  cons->add_option("--weights-out", cons_weights_out, "save the trained model");
  cons->add_option("--out", cons_out, "CSV (iteration,consistency)")->required();

  // emit-lp
  auto* lp = app.add_subcommand("emit-lp", "write the integer program in LP format");
  std::string lp_graph, lp_problem = "mis", lp_out;
  lp->add_option("--graph", lp_graph, "graph file")->required();
  lp->add_option("--problem", lp_problem, "mis or mvc");
  lp->add_option("--out", lp_out, "LP file (default: stdout)");

  // ablate
  auto* abl = app.add_subcommand("ablate", "train once per value of K, D or L");
  detail::ConfigFlags abl_cfg;
  abl_cfg.attach(abl);
  std::string abl_data, abl_param, abl_values, abl_dir, abl_eval;
  abl->add_option("--data", abl_data, "directory of training graphs")->required();
  abl->add_option("--param", abl_param, "K, D or L")->required();
  abl->add_option("--values", abl_values, "comma-separated values")->required();
  abl->add_option("--out-dir", abl_dir, "output directory")->required();
  abl->add_option("--eval-data", abl_eval, "also evaluate each model (cmp method) on these graphs");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 1;
  }

  try {
    if (*gen) {
      const GraphModel model = parse_model(gen_model);
      if ((gen_n_min > 0) != (gen_n_max > 0) || gen_n_min > gen_n_max) {
        throw UsageError("--n-min and --n-max must be given together with n-min <= n-max");
      }
      std::filesystem::create_directories(gen_out);
      Rng rng = make_rng(gen_seed);
      for (int i = 0; i < gen_count; ++i) {
        const int n = gen_n_min > 0 ? std::uniform_int_distribution<int>(gen_n_min, gen_n_max)(rng) : gen_n;
        GenSpec spec;
        spec.model = model;
        spec.n = n;
        spec.probability = gen_p;
        spec.attach = gen_attach;
        spec.ring_degree = gen_ring;
        spec.surplus = gen_surplus;
        spec.seed = derive_seed(gen_seed, static_cast<std::uint64_t>(i));
        std::ostringstream name;
        name << model_name(model) << '_' << std::setw(4) << std::setfill('0') << i << ".col";
        save_graph((std::filesystem::path(gen_out) / name.str()).string(), generate(spec));
      }
      out << "wrote " << gen_count << " graphs to " << gen_out << '\n';
      return 0;
    }

    if (*trn) {
      RunConfig cfg = trn_cfg.build();
      auto data = detail::require_dataset(trn_data);
      std::unique_ptr<std::ofstream> metrics;
      if (!trn_metrics.empty()) {
        metrics = std::make_unique<std::ofstream>(detail::open_out(trn_metrics));
      }
      TrainResult res = train(detail::graphs_only(data), cfg.train);
      if (metrics) write_metrics_csv(*metrics, res.log);
      save_params(trn_weights, res.params);
      for (const auto& w : res.warnings) err << "warning: " << w << '\n';
      out << "epochs " << res.log.size() << " best_epoch " << res.best_epoch;
      if (!res.log.empty()) out << " val_loss " << res.log[res.best_epoch].val_loss;
      if (!res.consistency.empty()) {
        out << " consistency " << res.consistency.front() << " -> " << res.consistency.back();
      }
      out << '\n';
      return 0;
    }

    if (*slv) {
      RunConfig cfg = slv_cfg.build();
      const Method method = parse_method(slv_method);
      const Problem problem = parse_problem(slv_problem);
      if (needs_weights(method) && slv_weights.empty()) {
        throw UsageError("method " + slv_method + " needs --weights");
      }
      const Graph g = load_graph(slv_graph);
      std::shared_ptr<const CmpParams> params;
      if (!slv_weights.empty()) params = std::make_shared<const CmpParams>(load_params(slv_weights));
      MethodResult res = run_method(method, problem, g, params, cfg, cfg.train.seed);
      const std::string path = slv_out.empty() ? slv_graph + ".sol" : slv_out;
      {
        auto f = detail::open_out(path);
        write_solution(f, res.set);
      }
      std::ifstream back(path);
      const SetKind kind = problem == Problem::kMis ? SetKind::kIndependentSet : SetKind::kVertexCover;
      if (!is_valid(g, read_solution(back, kind))) {
        throw std::runtime_error("solution file failed re-validation: " + path);
      }
      if (!slv_traj.empty()) {
        if (method != Method::kCmp && method != Method::kRandom) {
          throw UsageError("--trajectory needs method cmp or random");
        }
        SolveResult run = method == Method::kCmp
                              ? solve(problem, g, LearnedComparator{params.get()}, cfg.train.seed)
                              : solve(problem, g, RandomComparator{}, cfg.train.seed);
        auto f = detail::open_out(slv_traj);
        f << to_debug_string(run.trajectory);
      }
      out << "size " << res.set.size() << (res.optimal ? "" : " (budget exhausted, not proven optimal)")
          << '\n';
      return 0;
    }

    if (*evl) {
      RunConfig cfg = evl_cfg.build();
      const Problem problem = evl_problem.empty() ? cfg.train.problem : parse_problem(evl_problem);
      auto data = detail::require_dataset(evl_data);
      std::vector<std::string> names = detail::split_list(
          !evl_methods.empty() ? evl_methods : (evl_weights.empty() ? "greedy,random" : "cmp,cmp-mixed,greedy,random"));
      std::vector<Method> methods;
      for (const auto& n : names) methods.push_back(parse_method(n));
      std::shared_ptr<const CmpParams> params;
      for (Method m : methods) {
        if (needs_weights(m) && evl_weights.empty()) throw UsageError("method " + method_name(m) + " needs --weights");
      }
      if (!evl_weights.empty()) params = std::make_shared<const CmpParams>(load_params(evl_weights));
      EvalReport rep = eval_dataset(data, methods, problem, params, cfg, cfg.train.seed);
      {
        auto f = detail::open_out(evl_out);
        write_eval_csv(f, rep);
      }
      if (!evl_summary.empty()) {
        auto f = detail::open_out(evl_summary);
        write_summary_csv(f, rep);
      }
      for (const auto& [name, a] : rep.aggregates) {
        out << name << ' ' << std::fixed << std::setprecision(4) << a.mean << " +- " << a.std << " (n="
            << a.count;
        if (a.excluded) out << ", " << a.excluded << " over budget";
        out << ")\n";
      }
      return 0;
    }

    if (*cons) {
      RunConfig cfg = cons_cfg.build();
      auto data = detail::graphs_only(detail::require_dataset(cons_data));
      std::vector<double> curve;
      if (!cons_weights.empty()) {
        CmpParams params = load_params(cons_weights);
        Buffer buf = refresh_buffer(data, params, cfg.train, cfg.train.seed);
        std::vector<PairSample> pairs = buf.train;
        pairs.insert(pairs.end(), buf.validation.begin(), buf.validation.end());
        curve.push_back(measure_consistency(params, pairs, cfg.train.m, cfg.train.seed, cfg.train.problem));
      } else {
        if (cfg.train.consistency_pairs == 0) throw UsageError("consistency_pairs must be positive");
        TrainResult res = train(data, cfg.train);
        curve = res.consistency;
        if (!cons_weights_out.empty()) save_params(cons_weights_out, res.final_params);
      }
      auto f = detail::open_out(cons_out);
      detail::write_consistency_csv(f, curve);
      out << "consistency";
      for (double c : curve) out << ' ' << c;
      out << '\n';
      return 0;
    }

    if (*lp) {
      const Problem problem = parse_problem(lp_problem);
      const std::string text = emit_lp(load_graph(lp_graph), problem);
      if (lp_out.empty()) {
        out << text;
      } else {
        auto f = detail::open_out(lp_out);
        f << text;
      }
      return 0;
    }

    if (*abl) {
      if (abl_param != "K" && abl_param != "D" && abl_param != "L") throw UsageError("--param must be K, D or L");
      RunConfig base = abl_cfg.build();
      auto data = detail::require_dataset(abl_data);
      std::vector<NamedGraph> eval_data;
      if (!abl_eval.empty()) eval_data = detail::require_dataset(abl_eval);
      const auto values = detail::split_list(abl_values);
      if (values.empty()) throw UsageError("--values is empty");
      std::filesystem::create_directories(abl_dir);
      const std::filesystem::path dir(abl_dir);
      auto summary = detail::open_out((dir / ("ablate_" + abl_param + ".csv")).string());
      summary << "param,value,best_epoch,best_val_loss,final_consistency" << (eval_data.empty() ? "" : ",mean_ratio")
              << '\n';
      for (const auto& v : values) {
        RunConfig cfg = base;
        set_config_key(cfg, abl_param, v);
        TrainResult res = train(detail::graphs_only(data), cfg.train);
        const std::string tag = abl_param + v;
        {
          auto f = detail::open_out((dir / ("metrics_" + tag + ".csv")).string());
          write_metrics_csv(f, res.log);
        }
        save_params((dir / ("weights_" + tag + ".bin")).string(), res.params);
        summary << abl_param << ',' << v << ',' << res.best_epoch << ','
                << (res.log.empty() ? 0.0 : res.log[res.best_epoch].val_loss) << ','
                << (res.consistency.empty() ? 0.0 : res.consistency.back());
        if (!eval_data.empty()) {
          auto params = std::make_shared<const CmpParams>(res.params);
          EvalReport rep = eval_dataset(eval_data, {Method::kCmp}, cfg.train.problem, params, cfg, cfg.train.seed);
          summary << ',' << rep.aggregates["cmp"].mean;
        }
        summary << '\n';
        out << abl_param << '=' << v << " done\n";
      }
      out << values.size() << " runs written to " << abl_dir << '\n';
      return 0;
    }
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << '\n';
    return 1;
  } catch (const ConfigError& e) {
    err << "configuration error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  }
  return 1;
}

}  // namespace dpmis
