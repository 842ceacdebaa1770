// tomolab: command-line front end for local tomography experiments.
//
// Every subcommand takes an optional JSON config (--config); individual flags
// override config fields. Exit status: 0 success, 2 configuration error,
// 3 numeric failure.

#include <CLI11.hpp>
#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>
#include <string>

#include "tomolab/config.hpp"
#include "tomolab/dynamics.hpp"
#include "tomolab/errors.hpp"
#include "tomolab/inference.hpp"
#include "tomolab/lab.hpp"
#include "tomolab/seeding.hpp"
#include "tomolab/weights.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace tomolab;

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitNumeric = 3;

struct Common {
  std::string config;
  std::string out = ".";
  int threads = 0;
  json overrides = json::object();
};

void add_common(CLI::App* app, Common& c) {
  app->add_option("--config", c.config, "JSON config file");
  app->add_option("--out", c.out, "Output directory")->capture_default_str();
  app->add_option("--threads", c.threads, "Worker threads (0 = all cores; TOMOLAB_THREADS caps)");
}

template <typename T>
void add_field(CLI::App* app, Common& c, const std::string& flag, const std::string& key, const std::string& help) {
  app->add_option_function<T>(flag, [&c, key](const T& v) { c.overrides[key] = v; }, help);
}

void add_path_field(CLI::App* app, Common& c, const std::string& flag, const std::string& key,
                    const std::string& help) {
  app->add_option_function<std::string>(
      flag, [&c, key](const std::string& v) { c.overrides[key] = fs::absolute(v).string(); }, help);
}

// Config file contents with command-line overrides applied on top.
json merged(const Common& c, fs::path& base_dir) {
  json j = json::object();
  base_dir = fs::current_path();
  if (!c.config.empty()) {
    j = load_config_file(c.config);
    if (!j.is_object()) throw ConfigError(c.config + ": top level must be a JSON object");
    base_dir = fs::absolute(c.config).parent_path();
  }
  for (const auto& item : c.overrides.items()) j[item.key()] = item.value();
  return j;
}

fs::path prepare_out(const Common& c) {
  fs::path out(c.out);
  std::error_code ec;
  fs::create_directories(out, ec);
  if (ec) throw ConfigError("cannot create output directory " + out.string() + ": " + ec.message());
  return out;
}

std::ofstream open_out(const fs::path& path) {
  std::ofstream f(path);
  if (!f) throw ConfigError("cannot write " + path.string());
  return f;
}

void write_json(const fs::path& path, const json& j) { open_out(path) << j.dump(2) << '\n'; }

Graph load_graph(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open graph file " + path.string());
  try {
    return read_edge_list(in);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
}

std::string rule_name(WeightRule r) { return r == WeightRule::Laplacian ? "laplacian" : "metropolis"; }

int run_generate(const Common& c) {
  fs::path base;
  json j = merged(c, base);
  j["trials"] = 1;
  if (!j.contains("n") && !j.contains("n_grid")) throw ConfigError("field 'n': required");
  const ExperimentConfig cfg = experiment_config_from_json(j, base);
  if (cfg.regime.n_grid.size() != 1) throw ConfigError("field 'n_grid': generate takes a single network size");
  const long n = cfg.regime.n_grid.front();
  std::mt19937_64 rng(derive_seed(cfg.base_seed, {static_cast<std::uint64_t>(n), 0, 0}));
  const Instance inst = draw_instance(cfg, n, rng);

  const fs::path out = prepare_out(c);
  {
    auto f = open_out(out / "graph.edges");
    write_edge_list(f, inst.graph);
  }
  {
    auto f = open_out(out / "observed.edges");
    write_edge_list(f, inst.truth);
  }
  {
    auto f = open_out(out / "A.csv");
    write_matrix_csv(f, inst.a.entries());
  }
  write_json(out / "generate.json", {{"schema", 1},
                                     {"command", "generate"},
                                     {"N", n},
                                     {"p", inst.p},
                                     {"s_size", cfg.s_size},
                                     {"edges", inst.graph.edge_count()},
                                     {"observed_edges", inst.truth.edge_count()},
                                     {"policy", rule_name(cfg.policy.rule)},
                                     {"rho", cfg.policy.rho},
                                     {"seed", cfg.base_seed}});
  std::cout << "generate: N=" << n << " p=" << inst.p << " edges=" << inst.graph.edge_count()
            << " observed_edges=" << inst.truth.edge_count() << " -> " << (out / "graph.edges").string() << '\n';
  return 0;
}

struct SingleRun {
  SingleRunConfig cfg;
  Graph graph{1};
  CombinationMatrix a;
  CorrelationSet corr;
};

SingleRun prepare_single(const Common& c, std::ostream* raw) {
  fs::path base;
  const SingleRunConfig cfg = single_run_config_from_json(merged(c, base), base);
  Graph g = load_graph(cfg.graph);
  try {
    cfg.observed.check_within(g.size());
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("observed: ") + e.what());
  }
  CombinationMatrix a = combination_matrix(g, cfg.policy);
  CorrelationSet corr = cfg.analytic ? analytic_correlations(a, cfg.sim.beta, cfg.observed)
                                     : simulate_and_accumulate(a, cfg.sim, cfg.observed, raw);
  return {cfg, std::move(g), std::move(a), std::move(corr)};
}

int run_simulate(const Common& c, bool dump_raw) {
  const fs::path out = prepare_out(c);
  std::ofstream raw;
  if (dump_raw) {
    raw = open_out(out / "samples.csv");
    raw << "n,node,y\n";
  }
  const SingleRun run = prepare_single(c, dump_raw ? &raw : nullptr);
  {
    auto f = open_out(out / "R0.csv");
    write_matrix_csv(f, run.corr.r0);
  }
  {
    auto f = open_out(out / "R1.csv");
    write_matrix_csv(f, run.corr.r1);
  }
  write_json(out / "simulate.json", {{"schema", 1},
                                     {"command", "simulate"},
                                     {"nodes", run.cfg.observed.members()},
                                     {"mode", run.cfg.analytic ? "analytic" : "empirical"},
                                     {"n_max", run.cfg.analytic ? 0 : run.cfg.sim.n_max},
                                     {"beta", run.cfg.sim.beta},
                                     {"seed", run.cfg.sim.seed}});
  std::cout << "simulate: " << run.cfg.observed.size() << " observed nodes, "
            << (run.cfg.analytic ? std::string("analytic") : "n_max=" + std::to_string(run.cfg.sim.n_max))
            << " -> " << (out / "R0.csv").string() << '\n';
  return 0;
}

int run_estimate(const Common& c) {
  const SingleRun run = prepare_single(c, nullptr);
  SolveReport solve;
  const Eigen::MatrixXd a_hat = granger_truncated(run.corr, &solve);
  const Classifier cls = run.cfg.classifier.kind == ClassifierChoice::Kind::Threshold
                             ? Classifier::threshold(run.cfg.classifier.eta)
                             : Classifier::kmeans2();
  const Graph decision = classify(a_hat, cls);

  const fs::path out = prepare_out(c);
  {
    auto f = open_out(out / "A_hat.csv");
    write_matrix_csv(f, a_hat);
  }
  json pairs = json::array();
  std::size_t connected = 0;
  for (const PairDecision& d : pair_decisions(a_hat, run.cfg.observed, decision)) {
    pairs.push_back({{"i", d.i}, {"j", d.j}, {"score", d.score}, {"decision", d.connected ? "connected" : "disconnected"}});
    connected += d.connected;
  }
  write_json(out / "classification.json",
             {{"schema", 1},
              {"command", "estimate"},
              {"nodes", run.cfg.observed.members()},
              {"mode", run.cfg.analytic ? "analytic" : "empirical"},
              {"classifier", cls.method == Classifier::Method::KMeans2 ? "kmeans" : "threshold"},
              {"condition_number", solve.condition},
              {"ill_conditioned", solve.ill_conditioned},
              {"pairs", pairs}});
  if (solve.ill_conditioned) {
    std::cerr << "warning: zero-lag correlation matrix is ill-conditioned (condition ~ " << solve.condition << ")\n";
  }
  std::cout << "estimate: " << run.cfg.observed.size() << " nodes, " << connected << " of " << pairs.size()
            << " pairs connected -> " << (out / "classification.json").string() << '\n';
  return 0;
}

int run_recovery(const Common& c) {
  fs::path base;
  const ExperimentConfig cfg = experiment_config_from_json(merged(c, base), base);
  const std::vector<RecoveryRow> rows = recovery_probability_experiment(cfg, {c.threads, &std::cerr});
  const fs::path out = prepare_out(c);
  {
    auto f = open_out(out / "recovery.csv");
    write_recovery_csv(f, rows);
  }
  json jr = json::array();
  for (const RecoveryRow& r : rows) {
    jr.push_back({{"N", r.n},
                  {"trials", r.trials},
                  {"perfect", r.perfect},
                  {"numeric_failures", r.failures},
                  {"fraction", r.fraction},
                  {"ci_lo", r.ci_lo},
                  {"ci_hi", r.ci_hi}});
  }
  write_json(out / "recovery.json", {{"schema", 1}, {"command", "recovery-prob"}, {"seed", cfg.base_seed}, {"rows", jr}});
  std::cout << "recovery-prob: " << rows.size() << " network sizes x " << cfg.trials << " trials";
  for (const RecoveryRow& r : rows) std::cout << "; N=" << r.n << " fraction=" << r.fraction;
  std::cout << " -> " << (out / "recovery.csv").string() << '\n';
  return 0;
}

int run_patch_catch_cmd(const Common& c) {
  fs::path base;
  const PatchCatchConfig cfg = patch_catch_config_from_json(merged(c, base), base);
  const std::vector<PatchCatchTrial> trials = patch_catch_experiment(cfg, {c.threads, &std::cerr});
  const fs::path out = prepare_out(c);
  {
    auto f = open_out(out / "patch_catch.csv");
    write_patch_catch_summary(f, trials);
  }
  const fs::path traces = out / "traces";
  fs::create_directories(traces);
  std::size_t perfect = 0, ok = 0;
  double mean = 0.0;
  for (const PatchCatchTrial& t : trials) {
    auto f = open_out(traces / ("trace_N" + std::to_string(t.n) + "_trial" + std::to_string(t.trial) + ".csv"));
    write_patch_catch_trace(f, t);
    if (t.failed) continue;
    ++ok;
    perfect += t.misclassified == 0;
    mean += t.final_distance;
  }
  if (ok) mean /= static_cast<double>(ok);
  write_json(out / "patch_catch.json", {{"schema", 1},
                                        {"command", "patch-catch"},
                                        {"seed", cfg.base.base_seed},
                                        {"trials", trials.size()},
                                        {"completed", ok},
                                        {"perfect", perfect},
                                        {"mean_final_distance", mean},
                                        {"trace_nonincreasing_share", trace_nonincreasing_share(trials)}});
  std::cout << "patch-catch: " << perfect << " of " << trials.size() << " trials perfect, mean distance " << mean
            << " -> " << (out / "patch_catch.csv").string() << '\n';
  return 0;
}

int run_theory(const Common& c) {
  fs::path base;
  const TheoryCheckConfig cfg = theory_config_from_json(merged(c, base));
  const TheoryReport report = theory_check(cfg);
  const fs::path out = prepare_out(c);
  {
    auto f = open_out(out / "theory.csv");
    write_theory_csv(f, report);
  }
  json rows = json::array();
  for (const TheoryRow& r : report.rows) {
    rows.push_back({{"log10_N", r.log10_n}, {"r_N", r.r_n}, {"Np", r.np}, {"log_q1", r.log_q1}, {"log_q2", r.log_q2}});
  }
  write_json(out / "theory.json", {{"schema", 1},
                                   {"command", "theory-check"},
                                   {"rho", cfg.rho},
                                   {"q1_decreasing", report.q1_decreasing},
                                   {"q2_decreasing", report.q2_decreasing},
                                   {"rows", rows}});
  std::cout << "theory-check: " << report.rows.size() << " grid points, N p rho^(r+4) "
            << (report.q1_decreasing ? "decreasing" : "not decreasing") << ", p~(N p~)^(r+2) "
            << (report.q2_decreasing ? "decreasing" : "not decreasing") << " -> " << (out / "theory.csv").string()
            << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Local tomography of diffusion networks from partial observations"};
  app.require_subcommand(1);

  Common gen, sim, est, rec, pc, th;
  bool dump_raw = false;

  auto* g = app.add_subcommand("generate", "Sample a partial Erdős–Rényi network and its combination matrix");
  add_common(g, gen);
  add_field<long>(g, gen, "--n", "n", "Network size");
  add_field<std::string>(g, gen, "--p-rule", "p_rule", "loglog | multiple | explicit");
  add_field<double>(g, gen, "--p-multiple", "p_multiple", "k in p = k log N / N");
  add_field<double>(g, gen, "--p", "p", "Explicit connection probability");
  add_field<int>(g, gen, "--s-size", "s_size", "Number of observable nodes (0..s-1)");
  add_field<std::string>(g, gen, "--embedded", "embedded", "er-like | ring | explicit | same-as-unobserved");
  add_path_field(g, gen, "--embedded-file", "embedded_file", "Edge list for the observable block");
  add_field<std::string>(g, gen, "--policy", "policy", "laplacian | metropolis");
  add_field<double>(g, gen, "--rho", "rho", "Row-sum bound");
  add_field<double>(g, gen, "--lambda", "lambda", "Laplacian step");
  add_field<std::uint64_t>(g, gen, "--seed", "seed", "Random seed");

  for (auto [name, help, common] : {std::tuple{"simulate", "Correlations of an observed subset", &sim},
                                    std::tuple{"estimate", "Truncated Granger estimate and classification", &est}}) {
    auto* sc = app.add_subcommand(name, help);
    add_common(sc, *common);
    add_path_field(sc, *common, "--graph", "graph", "Edge-list file of the full network");
    add_field<std::string>(sc, *common, "--s", "observed", "Observed nodes, e.g. 0-9 or 0,2,5-7");
    add_field<std::string>(sc, *common, "--policy", "policy", "laplacian | metropolis");
    add_field<double>(sc, *common, "--rho", "rho", "Row-sum bound");
    add_field<double>(sc, *common, "--lambda", "lambda", "Laplacian step");
    add_field<std::string>(sc, *common, "--mode", "mode", "analytic | empirical");
    add_field<long>(sc, *common, "--n-max", "n_max", "Samples per trajectory");
    add_field<long>(sc, *common, "--burn-in", "burn_in", "Discarded initial steps");
    add_field<double>(sc, *common, "--beta", "beta", "Input scale (default 1 - rho)");
    add_field<std::string>(sc, *common, "--noise", "noise", "gaussian | rademacher | uniform");
    add_field<std::uint64_t>(sc, *common, "--seed", "seed", "Random seed");
    if (common == &sim) {
      sc->add_flag("--raw", dump_raw, "Also write every observed sample to samples.csv");
    } else {
      add_field<std::string>(sc, *common, "--classifier", "classifier", "kmeans | threshold");
      add_field<double>(sc, *common, "--eta", "eta", "Fixed threshold");
    }
  }

  for (auto [name, help, common] :
       {std::tuple{"recovery-prob", "Recovery probability versus network size", &rec},
        std::tuple{"patch-catch", "Sequential reconstruction from pairs of patches", &pc}}) {
    auto* sc = app.add_subcommand(name, help);
    add_common(sc, *common);
    add_field<std::vector<long>>(sc, *common, "--n-grid", "n_grid", "Network sizes");
    add_field<int>(sc, *common, "--trials", "trials", "Trials per network size");
    add_field<std::string>(sc, *common, "--policy", "policy", "laplacian | metropolis");
    add_field<double>(sc, *common, "--rho", "rho", "Row-sum bound");
    add_field<std::string>(sc, *common, "--correlations", "correlations", "analytic | empirical");
    add_field<long>(sc, *common, "--n-max", "n_max", "Samples per trajectory");
    add_field<std::uint64_t>(sc, *common, "--seed", "seed", "Base seed");
    if (common == &pc) add_field<int>(sc, *common, "--probe-limit", "probe_limit", "Nodes per experiment (M)");
  }

  auto* t = app.add_subcommand("theory-check", "Distance schedule and the decay quantities q1, q2 over a grid of N");
  add_common(t, th);
  add_field<double>(t, th, "--rho", "rho", "Row-sum bound");
  add_field<std::vector<double>>(t, th, "--log10-n", "log10_n_grid", "Grid of log10 N values");
  add_field<int>(t, th, "--s-size", "s_size", "Observable set size");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfig;
  }

  try {
    const std::string cmd = app.get_subcommands().front()->get_name();
    if (cmd == "generate") return run_generate(gen);
    if (cmd == "simulate") return run_simulate(sim, dump_raw);
    if (cmd == "estimate") return run_estimate(est);
    if (cmd == "recovery-prob") return run_recovery(rec);
    if (cmd == "patch-catch") return run_patch_catch_cmd(pc);
    if (cmd == "theory-check") return run_theory(th);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const UnsupportedMethod& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const NumericError& e) {
    std::cerr << "numeric error: " << e.what() << '\n';
    return kExitNumeric;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 1;
}
