#ifndef TOMOLAB_CONFIG_HPP
#define TOMOLAB_CONFIG_HPP

#include <filesystem>
#include <string>

#include <json.hpp>

#include "tomolab/graph.hpp"
#include "tomolab/lab.hpp"

namespace tomolab {

/// "0-9", "0,3,5-7", ... Throws ConfigError on malformed input.
NodeSet parse_node_list(const std::string& text);

/// Reads a JSON object from disk. Syntax errors become ConfigError with the
/// line and column of the problem.
nlohmann::json load_config_file(const std::filesystem::path& path);

/// Experiment keys (all optional):
///   n_grid | n, p_rule ("loglog" | "multiple" | "explicit"), p_multiple, p,
///   s_size, embedded ("er-like" | "ring" | "explicit" | "same-as-unobserved"),
///   embedded_q, embedded_file, policy ("laplacian" | "metropolis"), rho,
///   lambda, classifier ("kmeans" | "threshold-auto" | "threshold"), eta,
///   correlations ("analytic" | "empirical"), n_max, burn_in, beta,
///   noise ("gaussian" | "rademacher" | "uniform"), trials, seed.
/// Unknown keys are rejected. Relative embedded_file paths resolve against
/// `base_dir`.
ExperimentConfig experiment_config_from_json(const nlohmann::json& j, const std::filesystem::path& base_dir = {});

/// Experiment keys plus probe_limit, tiebreak ("first" | "and") and
/// shared_trajectory. Defaults follow the 20-node, N = 300 setting with
/// p = 5 log N / N and simulated correlations.
PatchCatchConfig patch_catch_config_from_json(const nlohmann::json& j, const std::filesystem::path& base_dir = {});

/// rho, log10_n_grid, p_rule, p_multiple, s_size.
TheoryCheckConfig theory_config_from_json(const nlohmann::json& j);

/// Inputs of the single-network commands (simulate, estimate).
struct SingleRunConfig {
  std::filesystem::path graph;
  NodeSet observed;
  PolicyParams policy;
  bool analytic = true;
  SimConfig sim;
  /// Defaults to 1 - rho.
  std::optional<double> beta;
  ClassifierChoice classifier;
};

/// Keys: graph, observed (node list such as "0-9"), policy, rho, lambda,
/// mode ("analytic" | "empirical"), n_max, burn_in, beta, noise, seed,
/// classifier, eta. `graph` and `observed` are required.
SingleRunConfig single_run_config_from_json(const nlohmann::json& j, const std::filesystem::path& base_dir = {});

WeightRule parse_weight_rule(const std::string& name);
Noise parse_noise(const std::string& name);

}  // namespace tomolab

#endif  // TOMOLAB_CONFIG_HPP
