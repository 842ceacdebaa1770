#ifndef TOMOLAB_LAB_HPP
#define TOMOLAB_LAB_HPP

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "tomolab/dynamics.hpp"
#include "tomolab/graph.hpp"
#include "tomolab/inference.hpp"
#include "tomolab/patchwork.hpp"
#include "tomolab/weights.hpp"

namespace tomolab {

/// (log N + log log N) / N
double loglog_probability(double n);

/// How the connection probability p_N follows from N.
struct RegimeSpec {
  enum class Rule {
    LogLog,    ///< c_N = log log N
    Multiple,  ///< p = k log N / N
    Explicit   ///< p fixed
  };
  std::vector<long> n_grid;
  Rule rule = Rule::LogLog;
  double k = 5.0;
  double p = 0.0;

  double p_for(long n) const;
  /// Throws ConfigError unless p_for(n) lies in (0, 1] on the whole grid.
  void validate() const;
};

/// Where the fixed graph among the observable nodes comes from in each trial.
struct EmbeddedSource {
  enum class Kind {
    ErdosRenyiLike,   ///< independent Bernoulli(q); q defaults to 2 log s / s
    Ring,
    Explicit,
    SameAsUnobserved  ///< Bernoulli(p_N), i.e. a pure Erdős–Rényi network
  };
  Kind kind = Kind::ErdosRenyiLike;
  std::optional<double> q;
  std::optional<Graph> graph;

  Graph draw(int s_size, double p, std::mt19937_64& rng) const;
};

struct ClassifierChoice {
  enum class Kind {
    KMeans2,
    ThresholdAuto,  ///< eta = class_tau / (N p)
    Threshold       ///< fixed eta
  };
  Kind kind = Kind::KMeans2;
  double eta = 0.0;

  Classifier resolve(const PolicyParams& policy, long n, double p) const;
};

struct CorrelationMode {
  enum class Kind { Analytic, Empirical };
  Kind kind = Kind::Analytic;
  /// Seed and beta inside are ignored: seeds are derived per trial and beta
  /// comes from `beta` below.
  SimConfig sim;
  /// Input scale; defaults to 1 - rho.
  std::optional<double> beta;

  double beta_for(const PolicyParams& policy) const { return beta.value_or(1.0 - policy.rho); }
};

struct ExperimentConfig {
  RegimeSpec regime;
  int s_size = 10;
  EmbeddedSource embedded;
  PolicyParams policy;
  ClassifierChoice classifier;
  CorrelationMode correlation;
  int trials = 100;
  std::uint64_t base_seed = 1;

  /// Throws ConfigError describing the first offending field.
  void validate() const;
};

/// One drawn network: partial ER graph over N nodes with S = {0..s-1}.
struct Instance {
  long n = 0;
  double p = 0.0;
  NodeSet observed;
  Graph graph{1};
  /// True graph on S, indexed 0..s-1.
  Graph truth{1};
  CombinationMatrix a;
};

Instance draw_instance(const ExperimentConfig& cfg, long n, std::mt19937_64& rng);

/// Correlations on the observed nodes according to cfg.correlation.
CorrelationSet instance_correlations(const ExperimentConfig& cfg, const Instance& inst, std::uint64_t sim_seed);

struct RunOptions {
  /// Worker threads; 0 picks the hardware concurrency. TOMOLAB_THREADS caps it.
  int threads = 0;
  /// Receives one line per failed trial, in trial order.
  std::ostream* log = nullptr;
};

struct BinomialInterval {
  double lo;
  double hi;
};

/// Normal-approximation 95% interval, clipped to [0, 1].
BinomialInterval binomial_ci(long successes, long trials);

struct RecoveryRow {
  long n = 0;
  int trials = 0;
  int perfect = 0;
  /// Trials that raised a numeric error (counted as not perfect).
  int failures = 0;
  double fraction = 0.0;
  double ci_lo = 0.0;
  double ci_hi = 0.0;
};

/// Per N: draws `trials` instances, classifies the observed pairs and counts
/// exact recoveries of the true graph on S.
std::vector<RecoveryRow> recovery_probability_experiment(const ExperimentConfig& cfg,
                                                         const RunOptions& options = {});

/// Columns N,trials,perfect,fraction,ci_lo,ci_hi.
void write_recovery_csv(std::ostream& out, std::span<const RecoveryRow> rows);

struct PatchCatchConfig {
  ExperimentConfig base;
  int probe_limit = 10;
  TieBreak tiebreak = TieBreak::First;
  bool shared_trajectory = true;

  void validate() const;
};

struct PatchCatchTrial {
  long n = 0;
  int trial = 0;
  bool failed = false;
  std::string error;
  /// Distance of the edgeless starting estimate.
  double initial_distance = 0.0;
  double final_distance = 0.0;
  std::size_t misclassified = 0;
  std::vector<ExperimentRecord> log;
};

std::vector<PatchCatchTrial> patch_catch_experiment(const PatchCatchConfig& cfg, const RunOptions& options = {});

/// Columns N,trial,status,experiments,misclassified_pairs,final_distance.
void write_patch_catch_summary(std::ostream& out, std::span<const PatchCatchTrial> trials);

/// Experiment log of one trial (same columns as write_experiment_log).
void write_patch_catch_trace(std::ostream& out, const PatchCatchTrial& trial);

/// Mean over successful trials of the share of experiment steps (including the
/// first, measured from the edgeless start) whose distance did not increase.
double trace_nonincreasing_share(std::span<const PatchCatchTrial> trials);

/// P[delta(G, i, j) <= r] <= p (Np)^{r-1} / (1 - 1/(Np)) on pure ER graphs.
double small_distance_bound(double n, double p, int r);

/// floor(log N / (2 omega_N)) with omega_N = log(N p).
long distance_schedule(double log_n, double log_np);

struct RarityRow {
  int r = 0;
  long hits = 0;
  double empirical = 0.0;
  double bound = 0.0;
  /// sqrt(b(1-b)/trials) with b = min(bound, 1).
  double sigma = 0.0;
  bool within = false;
};

struct RarityReport {
  long n = 0;
  double p = 0.0;
  long trials = 0;
  std::vector<RarityRow> rows;
  long r_n = 0;
  long d_small_hits = 0;
  double d_small_frequency = 0.0;

  bool ok() const;
};

/// Monte Carlo of P[delta(0,1) <= r] for r = 1, 2, 3 on pure ER graphs, plus
/// the frequency of a small distance (<= r_N) over the active pairs of the
/// observed pair (0, 1) on partial ER graphs with an edgeless observed block.
RarityReport check_small_distance_rarity(long n, double p, int s_size, long trials, std::uint64_t seed,
                                         const RunOptions& options = {});

struct Property2Report {
  long trials = 0;
  long edge_pairs = 0;
  long edge_hits = 0;
  long dmax_hits = 0;
  double edge_frequency = 0.0;
  double dmax_frequency = 0.0;
};

/// Frequency of N p a_ij > class_tau over connected pairs, and of
/// d_max < e N p over trials, on partial ER graphs.
Property2Report property2_frequency(long n, double p, const PolicyParams& policy, int s_size, long trials,
                                    std::uint64_t seed, const RunOptions& options = {});

struct TheoryCheckConfig {
  double rho = 0.8;
  /// Grid in log10 N, so astronomically large networks can be evaluated.
  std::vector<double> log10_n_grid{3, 4, 5, 6, 7, 8};
  RegimeSpec::Rule rule = RegimeSpec::Rule::LogLog;
  double k = 5.0;
  int s_size = 10;

  void validate() const;
};

struct TheoryRow {
  double log10_n = 0.0;
  double np = 0.0;
  double omega = 0.0;
  long r_n = 0;
  /// log of N p rho^{r_N + 4}
  double log_q1 = 0.0;
  /// log of p~ (N p~)^{r_N + 2}, p~ = S p
  double log_q2 = 0.0;
};

struct TheoryReport {
  std::vector<TheoryRow> rows;
  bool q1_decreasing = false;
  bool q2_decreasing = false;
};

TheoryReport theory_check(const TheoryCheckConfig& cfg);

/// Columns log10_N,r_N,Np,q1,q2,log_q1,log_q2.
void write_theory_csv(std::ostream& out, const TheoryReport& report);

}  // namespace tomolab

#endif  // TOMOLAB_LAB_HPP
