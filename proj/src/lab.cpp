#include "tomolab/lab.hpp"

#include <cmath>
#include <cstdlib>
#include <deque>
#include <iomanip>
#include <numbers>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "tomolab/errors.hpp"
#include "tomolab/parallel.hpp"
#include "tomolab/seeding.hpp"

namespace tomolab {

int worker_count(int requested) {
  int n = requested > 0 ? requested : static_cast<int>(std::thread::hardware_concurrency());
  if (n < 1) n = 1;
  if (const char* env = std::getenv("TOMOLAB_THREADS")) {
    char* end = nullptr;
    const long cap = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && cap >= 1) n = std::min<long>(n, cap);
  }
  return n;
}

double loglog_probability(double n) {
  const double ln = std::log(n);
  return (ln + std::log(ln)) / n;
}

double RegimeSpec::p_for(long n) const {
  const double nd = static_cast<double>(n);
  switch (rule) {
    case Rule::LogLog:
      return loglog_probability(nd);
    case Rule::Multiple:
      return k * std::log(nd) / nd;
    case Rule::Explicit:
      return p;
  }
  return p;
}

void RegimeSpec::validate() const {
  if (n_grid.empty()) throw ConfigError("n_grid: at least one network size is required");
  for (long n : n_grid) {
    if (n < 3) throw ConfigError("n_grid: network size " + std::to_string(n) + " is below 3");
    const double pn = p_for(n);
    if (!(pn > 0.0 && pn <= 1.0)) {
      throw ConfigError("p: connection probability " + std::to_string(pn) + " at N=" + std::to_string(n) +
                        " is outside (0,1]");
    }
  }
}

Graph EmbeddedSource::draw(int s_size, double p, std::mt19937_64& rng) const {
  switch (kind) {
    case Kind::ErdosRenyiLike: {
      const double qq = q.value_or(std::min(1.0, 2.0 * std::log(double(s_size)) / s_size));
      return sample_er(s_size, qq, rng);
    }
    case Kind::Ring:
      return Graph::ring(s_size);
    case Kind::Explicit:
      if (!graph || graph->size() != s_size) throw ConfigError("embedded: explicit graph must have s_size nodes");
      return *graph;
    case Kind::SameAsUnobserved:
      return sample_er(s_size, p, rng);
  }
  throw ConfigError("embedded: unknown source");
}

Classifier ClassifierChoice::resolve(const PolicyParams& policy, long n, double p) const {
  switch (kind) {
    case Kind::KMeans2:
      return Classifier::kmeans2();
    case Kind::ThresholdAuto:
      return Classifier::threshold(class_tau(policy) / (static_cast<double>(n) * p));
    case Kind::Threshold:
      return Classifier::threshold(eta);
  }
  return Classifier::kmeans2();
}

void ExperimentConfig::validate() const {
  regime.validate();
  if (s_size < 2) throw ConfigError("s_size: at least two observable nodes are required");
  for (long n : regime.n_grid) {
    if (n < s_size) throw ConfigError("n_grid: N=" + std::to_string(n) + " is smaller than s_size");
  }
  if (trials < 1) throw ConfigError("trials: must be at least 1");
  try {
    policy.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("policy: ") + e.what());
  }
  if (classifier.kind == ClassifierChoice::Kind::KMeans2 && s_size < 3) {
    throw ConfigError("classifier: 2-means needs s_size >= 3");
  }
  if (classifier.kind == ClassifierChoice::Kind::Threshold && !(classifier.eta > 0.0)) {
    throw ConfigError("eta: fixed threshold must be positive");
  }
  if (embedded.q && !(*embedded.q >= 0.0 && *embedded.q <= 1.0)) {
    throw ConfigError("embedded_q: must lie in [0,1]");
  }
  if (embedded.kind == EmbeddedSource::Kind::Explicit && (!embedded.graph || embedded.graph->size() != s_size)) {
    throw ConfigError("embedded: explicit graph must have s_size nodes");
  }
  const double beta = correlation.beta_for(policy);
  if (!(beta > 0.0) || !std::isfinite(beta)) throw ConfigError("beta: must be positive");
  if (correlation.kind == CorrelationMode::Kind::Empirical) {
    SimConfig sim = correlation.sim;
    sim.beta = beta;
    try {
      sim.validate();
    } catch (const std::invalid_argument& e) {
      throw ConfigError(std::string("simulation: ") + e.what());
    }
  }
}

Instance draw_instance(const ExperimentConfig& cfg, long n, std::mt19937_64& rng) {
  const double p = cfg.regime.p_for(n);
  const NodeSet s = NodeSet::range(cfg.s_size);
  Graph truth = cfg.embedded.draw(cfg.s_size, p, rng);
  Graph g = sample_partial_er({static_cast<NodeId>(n), p, s, truth}, rng);
  CombinationMatrix a = combination_matrix(g, cfg.policy);
  return Instance{n, p, s, std::move(g), std::move(truth), std::move(a)};
}

CorrelationSet instance_correlations(const ExperimentConfig& cfg, const Instance& inst, std::uint64_t sim_seed) {
  const double beta = cfg.correlation.beta_for(cfg.policy);
  if (cfg.correlation.kind == CorrelationMode::Kind::Analytic) {
    return analytic_correlations(inst.a, beta, inst.observed);
  }
  SimConfig sim = cfg.correlation.sim;
  sim.beta = beta;
  sim.seed = sim_seed;
  return simulate_and_accumulate(inst.a, sim, inst.observed);
}

BinomialInterval binomial_ci(long successes, long trials) {
  if (trials <= 0 || successes < 0 || successes > trials) {
    throw std::invalid_argument("binomial_ci: need 0 <= successes <= trials, trials > 0");
  }
  const double f = static_cast<double>(successes) / static_cast<double>(trials);
  const double half = 1.96 * std::sqrt(f * (1.0 - f) / static_cast<double>(trials));
  return {std::max(0.0, f - half), std::min(1.0, f + half)};
}

namespace {

// Three independent streams per (N, trial): graph drawing and simulation.
std::uint64_t graph_seed(std::uint64_t base, long n, long trial) {
  return derive_seed(base, {static_cast<std::uint64_t>(n), static_cast<std::uint64_t>(trial), 0});
}
std::uint64_t sim_seed(std::uint64_t base, long n, long trial) {
  return derive_seed(base, {static_cast<std::uint64_t>(n), static_cast<std::uint64_t>(trial), 1});
}

void write_double(std::ostream& out, double v) { out << std::setprecision(17) << v; }

}  // namespace

std::vector<RecoveryRow> recovery_probability_experiment(const ExperimentConfig& cfg, const RunOptions& options) {
  cfg.validate();
  const int threads = worker_count(options.threads);
  std::vector<RecoveryRow> rows;
  for (long n : cfg.regime.n_grid) {
    struct Outcome {
      bool perfect = false;
      std::string error;
    };
    std::vector<Outcome> outcomes(static_cast<std::size_t>(cfg.trials));
    parallel_for(outcomes.size(), threads, [&](std::size_t t) {
      std::mt19937_64 rng(graph_seed(cfg.base_seed, n, static_cast<long>(t)));
      try {
        const Instance inst = draw_instance(cfg, n, rng);
        const CorrelationSet corr = instance_correlations(cfg, inst, sim_seed(cfg.base_seed, n, static_cast<long>(t)));
        const Eigen::MatrixXd a_hat = granger_truncated(corr);
        outcomes[t].perfect = classify(a_hat, cfg.classifier.resolve(cfg.policy, n, inst.p)) == inst.truth;
      } catch (const NumericError& e) {
        outcomes[t].error = e.what();
      }
    });

    RecoveryRow row;
    row.n = n;
    row.trials = cfg.trials;
    for (std::size_t t = 0; t < outcomes.size(); ++t) {
      row.perfect += outcomes[t].perfect;
      if (!outcomes[t].error.empty()) {
        ++row.failures;
        if (options.log) *options.log << "N=" << n << " trial " << t << ": " << outcomes[t].error << '\n';
      }
    }
    row.fraction = static_cast<double>(row.perfect) / row.trials;
    const BinomialInterval ci = binomial_ci(row.perfect, row.trials);
    row.ci_lo = ci.lo;
    row.ci_hi = ci.hi;
    rows.push_back(row);
  }
  return rows;
}

void write_recovery_csv(std::ostream& out, std::span<const RecoveryRow> rows) {
  out << "N,trials,perfect,fraction,ci_lo,ci_hi\n";
  for (const RecoveryRow& r : rows) {
    out << r.n << ',' << r.trials << ',' << r.perfect << ',';
    write_double(out, r.fraction);
    out << ',';
    write_double(out, r.ci_lo);
    out << ',';
    write_double(out, r.ci_hi);
    out << '\n';
  }
}

void PatchCatchConfig::validate() const {
  base.validate();
  if (probe_limit < 4) throw ConfigError("probe_limit: must be at least 4");
  if (base.correlation.kind == CorrelationMode::Kind::Empirical && base.correlation.sim.n_max < 10) {
    throw ConfigError("n_max: patch-catch needs at least 10 samples per trajectory");
  }
  const PatchPlan plan = make_patches(NodeSet::range(base.s_size), probe_limit);
  const std::size_t smallest = plan.patches.size() == 1
                                   ? plan.patches[0].size()
                                   : plan.patches[plan.patches.size() - 1].size() + plan.patches[0].size();
  if (smallest < 3) throw ConfigError("probe_limit: some patch union has fewer than 3 nodes");
}

std::vector<PatchCatchTrial> patch_catch_experiment(const PatchCatchConfig& cfg, const RunOptions& options) {
  cfg.validate();
  const int threads = worker_count(options.threads);
  const auto per_n = static_cast<std::size_t>(cfg.base.trials);
  std::vector<PatchCatchTrial> out(per_n * cfg.base.regime.n_grid.size());
  parallel_for(out.size(), threads, [&](std::size_t k) {
    const long n = cfg.base.regime.n_grid[k / per_n];
    const auto t = static_cast<long>(k % per_n);
    PatchCatchTrial& trial = out[k];
    trial.n = n;
    trial.trial = static_cast<int>(t);
    std::mt19937_64 rng(graph_seed(cfg.base.base_seed, n, t));
    try {
      const Instance inst = draw_instance(cfg.base, n, rng);
      PatchCatchOptions opt;
      opt.sim = cfg.base.correlation.sim;
      opt.sim.beta = cfg.base.correlation.beta_for(cfg.base.policy);
      opt.sim.seed = sim_seed(cfg.base.base_seed, n, t);
      opt.analytic = cfg.base.correlation.kind == CorrelationMode::Kind::Analytic;
      opt.tiebreak = cfg.tiebreak;
      opt.shared_trajectory = cfg.shared_trajectory;
      opt.classifier = cfg.base.classifier.resolve(cfg.base.policy, n, inst.p);
      opt.truth = inst.truth;
      const ReconstructionState state = run_patch_catch(inst.a, make_patches(inst.observed, cfg.probe_limit), opt);
      const Graph estimate = state.estimated_graph();
      trial.initial_distance = graph_distance(inst.truth, Graph(inst.truth.size()));
      trial.final_distance = graph_distance(inst.truth, estimate);
      for (NodeId i = 0; i < estimate.size(); ++i)
        for (NodeId j = i + 1; j < estimate.size(); ++j)
          trial.misclassified += estimate.connected(i, j) != inst.truth.connected(i, j);
      trial.log = state.experiment_log;
    } catch (const NumericError& e) {
      trial.failed = true;
      trial.error = e.what();
    }
  });
  if (options.log) {
    for (const PatchCatchTrial& t : out)
      if (t.failed) *options.log << "N=" << t.n << " trial " << t.trial << ": " << t.error << '\n';
  }
  return out;
}

void write_patch_catch_summary(std::ostream& out, std::span<const PatchCatchTrial> trials) {
  out << "N,trial,status,experiments,misclassified_pairs,final_distance\n";
  for (const PatchCatchTrial& t : trials) {
    out << t.n << ',' << t.trial << ',' << (t.failed ? "numeric_error" : "ok") << ',' << t.log.size() << ','
        << t.misclassified << ',';
    if (!t.failed) write_double(out, t.final_distance);
    out << '\n';
  }
}

void write_patch_catch_trace(std::ostream& out, const PatchCatchTrial& trial) {
  out << "experiment_index,patch_a,patch_b,pairs_decided,distance\n";
  for (const ExperimentRecord& r : trial.log) {
    out << r.index << ',' << r.patch_a << ',' << r.patch_b << ',' << r.pairs_decided << ',';
    if (r.distance) write_double(out, *r.distance);
    out << '\n';
  }
}

double trace_nonincreasing_share(std::span<const PatchCatchTrial> trials) {
  double total = 0.0;
  std::size_t counted = 0;
  for (const PatchCatchTrial& t : trials) {
    if (t.failed || t.log.empty()) continue;
    std::size_t good = 0;
    double prev = t.initial_distance;
    for (const ExperimentRecord& r : t.log) {
      const double d = r.distance.value_or(prev);
      good += d <= prev;
      prev = d;
    }
    total += static_cast<double>(good) / static_cast<double>(t.log.size());
    ++counted;
  }
  return counted ? total / static_cast<double>(counted) : 0.0;
}

double small_distance_bound(double n, double p, int r) {
  const double np = n * p;
  if (!(np > 1.0)) throw std::invalid_argument("small_distance_bound: requires N p > 1");
  if (r < 1) throw std::invalid_argument("small_distance_bound: r must be at least 1");
  return p * std::pow(np, r - 1) / (1.0 - 1.0 / np);
}

long distance_schedule(double log_n, double log_np) {
  if (!(log_np > 0.0)) throw std::invalid_argument("distance_schedule: requires N p > 1");
  return static_cast<long>(std::floor(0.5 * log_n / log_np));
}

bool RarityReport::ok() const {
  for (const RarityRow& r : rows)
    if (!r.within) return false;
  return !rows.empty();
}

namespace {

// Hop distance from `src` to `dst`, explored only up to `limit` hops.
std::optional<int> bounded_distance(const Graph& g, NodeId src, NodeId dst, int limit) {
  if (src == dst) return 0;
  const NodeId n = g.size();
  std::vector<int> dist(static_cast<std::size_t>(n), -1);
  std::vector<NodeId> frontier{src}, next;
  dist[src] = 0;
  for (int d = 1; d <= limit && !frontier.empty(); ++d) {
    next.clear();
    for (NodeId u : frontier)
      for (NodeId v = 0; v < n; ++v)
        if (dist[v] < 0 && g.connected(u, v)) {
          if (v == dst) return d;
          dist[v] = d;
          next.push_back(v);
        }
    frontier.swap(next);
  }
  return std::nullopt;
}

// Whether some active pair (l, m) of the observed pair (i, j) lies within
// `limit` hops on g with the observed block disconnected.
bool has_small_active_pair(const Graph& g, const NodeSet& s, NodeId i, NodeId j, long limit) {
  const Graph reference = local_disconnect(g, s, s);
  std::vector<NodeId> sources;
  for (NodeId l : g.neighbors(i))
    if (!s.contains(l)) sources.push_back(l);
  if (sources.empty()) return false;
  std::vector<bool> target(static_cast<std::size_t>(g.size()), false);
  bool any_target = false;
  for (NodeId m : neighborhood(g, j, 2))
    if (!s.contains(m)) target[m] = any_target = true;
  if (!any_target) return false;

  // Multi-source BFS over the reference graph.
  std::vector<long> dist(static_cast<std::size_t>(g.size()), -1);
  std::deque<NodeId> queue;
  for (NodeId l : sources) {
    if (target[l]) return true;
    dist[l] = 0;
    queue.push_back(l);
  }
  while (!queue.empty()) {
    const NodeId u = queue.front();
    queue.pop_front();
    if (dist[u] >= limit) continue;
    for (NodeId v = 0; v < g.size(); ++v) {
      if (dist[v] < 0 && reference.connected(u, v)) {
        if (target[v]) return true;
        dist[v] = dist[u] + 1;
        queue.push_back(v);
      }
    }
  }
  return false;
}

}  // namespace

RarityReport check_small_distance_rarity(long n, double p, int s_size, long trials, std::uint64_t seed,
                                         const RunOptions& options) {
  if (n < 3 || !(p > 0.0 && p <= 1.0)) throw std::invalid_argument("check_small_distance_rarity: bad N or p");
  if (!(static_cast<double>(n) * p > 1.0)) throw std::invalid_argument("check_small_distance_rarity: requires N p > 1");
  if (s_size < 2 || s_size > n) throw std::invalid_argument("check_small_distance_rarity: bad s_size");
  if (trials < 1) throw std::invalid_argument("check_small_distance_rarity: trials must be positive");
  const int threads = worker_count(options.threads);
  constexpr int kMaxR = 3;

  RarityReport report;
  report.n = n;
  report.p = p;
  report.trials = trials;
  report.r_n = std::max(1L, distance_schedule(std::log(double(n)), std::log(double(n) * p)));

  std::vector<int> pure_distance(static_cast<std::size_t>(trials));
  std::vector<char> small(static_cast<std::size_t>(trials));
  const NodeSet s = NodeSet::range(s_size);
  parallel_for(static_cast<std::size_t>(trials), threads, [&](std::size_t t) {
    std::mt19937_64 rng(derive_seed(seed, {static_cast<std::uint64_t>(t), 0}));
    const Graph pure = sample_er(static_cast<NodeId>(n), p, rng);
    pure_distance[t] = bounded_distance(pure, 0, 1, kMaxR).value_or(kMaxR + 1);

    std::mt19937_64 rng2(derive_seed(seed, {static_cast<std::uint64_t>(t), 1}));
    const Graph partial = sample_partial_er({static_cast<NodeId>(n), p, s, Graph(s_size)}, rng2);
    small[t] = has_small_active_pair(partial, s, 0, 1, report.r_n);
  });

  for (int r = 1; r <= kMaxR; ++r) {
    RarityRow row;
    row.r = r;
    for (int d : pure_distance) row.hits += d <= r;
    row.empirical = static_cast<double>(row.hits) / static_cast<double>(trials);
    row.bound = small_distance_bound(double(n), p, r);
    const double b = std::min(row.bound, 1.0);
    row.sigma = std::sqrt(b * (1.0 - b) / static_cast<double>(trials));
    row.within = row.empirical <= row.bound + 3.0 * row.sigma;
    report.rows.push_back(row);
  }
  for (char c : small) report.d_small_hits += c;
  report.d_small_frequency = static_cast<double>(report.d_small_hits) / static_cast<double>(trials);
  return report;
}

Property2Report property2_frequency(long n, double p, const PolicyParams& policy, int s_size, long trials,
                                    std::uint64_t seed, const RunOptions& options) {
  policy.validate();
  if (trials < 1 || s_size < 1 || s_size > n) throw std::invalid_argument("property2_frequency: bad arguments");
  const double tau = class_tau(policy);
  const double np = static_cast<double>(n) * p;
  struct Counts {
    long pairs = 0, hits = 0;
    bool dmax_ok = false;
  };
  std::vector<Counts> counts(static_cast<std::size_t>(trials));
  EmbeddedSource source;
  parallel_for(counts.size(), worker_count(options.threads), [&](std::size_t t) {
    std::mt19937_64 rng(derive_seed(seed, {static_cast<std::uint64_t>(t)}));
    const NodeSet s = NodeSet::range(s_size);
    const Graph g = sample_partial_er({static_cast<NodeId>(n), p, s, source.draw(s_size, p, rng)}, rng);
    const CombinationMatrix a = combination_matrix(g, policy);
    Counts& c = counts[t];
    for (NodeId i = 0; i < g.size(); ++i)
      for (NodeId j = i + 1; j < g.size(); ++j)
        if (g.connected(i, j)) {
          ++c.pairs;
          c.hits += np * a(i, j) > tau;
        }
    c.dmax_ok = g.max_degree() < std::numbers::e * np;
  });
  Property2Report rep;
  rep.trials = trials;
  for (const Counts& c : counts) {
    rep.edge_pairs += c.pairs;
    rep.edge_hits += c.hits;
    rep.dmax_hits += c.dmax_ok;
  }
  rep.edge_frequency = rep.edge_pairs ? static_cast<double>(rep.edge_hits) / rep.edge_pairs : 1.0;
  rep.dmax_frequency = static_cast<double>(rep.dmax_hits) / static_cast<double>(trials);
  return rep;
}

void TheoryCheckConfig::validate() const {
  if (!(rho > 0.0 && rho < 1.0)) throw ConfigError("rho: must lie in (0,1)");
  if (log10_n_grid.empty()) throw ConfigError("log10_n_grid: at least one entry is required");
  for (double x : log10_n_grid)
    if (!(x >= 1.0) || !std::isfinite(x)) throw ConfigError("log10_n_grid: entries must be finite and >= 1");
  if (rule == RegimeSpec::Rule::Explicit) throw ConfigError("p_rule: theory-check needs p to follow N");
  if (rule == RegimeSpec::Rule::Multiple && !(k > 1.0)) throw ConfigError("p_multiple: must exceed 1");
  if (s_size < 1) throw ConfigError("s_size: must be positive");
}

TheoryReport theory_check(const TheoryCheckConfig& cfg) {
  cfg.validate();
  TheoryReport report;
  const double log_rho = std::log(cfg.rho);
  const double log_s = std::log(double(cfg.s_size));
  for (double x : cfg.log10_n_grid) {
    TheoryRow row;
    row.log10_n = x;
    const double log_n = x * std::numbers::ln10;
    row.np = cfg.rule == RegimeSpec::Rule::LogLog ? log_n + std::log(log_n) : cfg.k * log_n;
    row.omega = std::log(row.np);
    row.r_n = distance_schedule(log_n, row.omega);
    if (row.r_n < 1) {
      std::ostringstream msg;
      msg << "log10_n_grid: r_N is below 1 at log10 N = " << x;
      throw ConfigError(msg.str());
    }
    row.log_q1 = row.omega + static_cast<double>(row.r_n + 4) * log_rho;
    const double log_p_tilde = log_s + row.omega - log_n;
    row.log_q2 = log_p_tilde + static_cast<double>(row.r_n + 2) * (log_n + log_p_tilde);
    report.rows.push_back(row);
  }
  report.q1_decreasing = report.q2_decreasing = true;
  for (std::size_t k = 1; k < report.rows.size(); ++k) {
    report.q1_decreasing = report.q1_decreasing && report.rows[k].log_q1 < report.rows[k - 1].log_q1;
    report.q2_decreasing = report.q2_decreasing && report.rows[k].log_q2 < report.rows[k - 1].log_q2;
  }
  return report;
}

void write_theory_csv(std::ostream& out, const TheoryReport& report) {
  out << "log10_N,r_N,Np,q1,q2,log_q1,log_q2\n";
  for (const TheoryRow& r : report.rows) {
    write_double(out, r.log10_n);
    out << ',' << r.r_n << ',';
    write_double(out, r.np);
    out << ',';
    write_double(out, std::exp(r.log_q1));
    out << ',';
    write_double(out, std::exp(r.log_q2));
    out << ',';
    write_double(out, r.log_q1);
    out << ',';
    write_double(out, r.log_q2);
    out << '\n';
  }
}

}  // namespace tomolab
