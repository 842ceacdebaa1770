#include "tomolab/config.hpp"

#include <cctype>
#include <charconv>
#include <fstream>
#include <set>
#include <sstream>

#include "tomolab/errors.hpp"

namespace tomolab {

namespace {

using nlohmann::json;

// Typed access to a flat JSON object that remembers which keys were read, so
// leftovers can be reported as unknown.
class Fields {
 public:
  explicit Fields(const json& j) : j_(j) {
    if (!j_.is_object()) throw ConfigError("config: top level must be a JSON object");
  }

  bool has(const std::string& key) {
    seen_.insert(key);
    return j_.contains(key);
  }

  double number(const std::string& key, double fallback) {
    if (!has(key)) return fallback;
    const json& v = j_.at(key);
    if (!v.is_number()) throw ConfigError("field '" + key + "': expected a number");
    return v.get<double>();
  }

  long integer(const std::string& key, long fallback) {
    if (!has(key)) return fallback;
    const json& v = j_.at(key);
    if (!v.is_number_integer()) throw ConfigError("field '" + key + "': expected an integer");
    return v.get<long>();
  }

  std::uint64_t unsigned_integer(const std::string& key, std::uint64_t fallback) {
    if (!has(key)) return fallback;
    const json& v = j_.at(key);
    if (!v.is_number_unsigned()) throw ConfigError("field '" + key + "': expected a nonnegative integer");
    return v.get<std::uint64_t>();
  }

  bool boolean(const std::string& key, bool fallback) {
    if (!has(key)) return fallback;
    const json& v = j_.at(key);
    if (!v.is_boolean()) throw ConfigError("field '" + key + "': expected true or false");
    return v.get<bool>();
  }

  std::string text(const std::string& key, const std::string& fallback) {
    if (!has(key)) return fallback;
    const json& v = j_.at(key);
    if (!v.is_string()) throw ConfigError("field '" + key + "': expected a string");
    return v.get<std::string>();
  }

  template <typename T>
  std::vector<T> list(const std::string& key, std::vector<T> fallback) {
    if (!has(key)) return fallback;
    const json& v = j_.at(key);
    if (!v.is_array() || v.empty()) throw ConfigError("field '" + key + "': expected a nonempty array");
    std::vector<T> out;
    for (std::size_t k = 0; k < v.size(); ++k) {
      const bool ok = std::is_integral_v<T> ? v[k].is_number_integer() : v[k].is_number();
      if (!ok) throw ConfigError("field '" + key + "[" + std::to_string(k) + "]': expected a number");
      out.push_back(v[k].get<T>());
    }
    return out;
  }

  void reject_unknown() const {
    for (const auto& item : j_.items()) {
      if (!seen_.count(item.key())) throw ConfigError("unknown field '" + item.key() + "'");
    }
  }

 private:
  const json& j_;
  std::set<std::string> seen_;
};

[[noreturn]] void bad_choice(const std::string& key, const std::string& value, const std::string& allowed) {
  throw ConfigError("field '" + key + "': unknown value '" + value + "' (expected " + allowed + ")");
}

RegimeSpec::Rule parse_rule(const std::string& s) {
  if (s == "loglog") return RegimeSpec::Rule::LogLog;
  if (s == "multiple") return RegimeSpec::Rule::Multiple;
  if (s == "explicit") return RegimeSpec::Rule::Explicit;
  bad_choice("p_rule", s, "loglog, multiple or explicit");
}

// Shared by recovery-prob and patch-catch; `cfg` carries the defaults.
void read_experiment(Fields& f, ExperimentConfig& cfg, const std::filesystem::path& base_dir) {
  if (f.has("n") && f.has("n_grid")) throw ConfigError("fields 'n' and 'n_grid' are mutually exclusive");
  if (f.has("n")) {
    cfg.regime.n_grid = {f.integer("n", 0)};
  } else {
    cfg.regime.n_grid = f.list<long>("n_grid", cfg.regime.n_grid);
  }
  const std::string rule_default = cfg.regime.rule == RegimeSpec::Rule::LogLog     ? "loglog"
                                   : cfg.regime.rule == RegimeSpec::Rule::Multiple ? "multiple"
                                                                                   : "explicit";
  cfg.regime.rule = parse_rule(f.text("p_rule", rule_default));
  cfg.regime.k = f.number("p_multiple", cfg.regime.k);
  cfg.regime.p = f.number("p", cfg.regime.p);
  if (cfg.regime.rule == RegimeSpec::Rule::Explicit && !f.has("p")) {
    throw ConfigError("field 'p': required when p_rule is explicit");
  }
  cfg.s_size = static_cast<int>(f.integer("s_size", cfg.s_size));

  const std::string emb = f.text("embedded", "");
  if (emb == "er-like") {
    cfg.embedded.kind = EmbeddedSource::Kind::ErdosRenyiLike;
  } else if (emb == "ring") {
    cfg.embedded.kind = EmbeddedSource::Kind::Ring;
  } else if (emb == "explicit") {
    cfg.embedded.kind = EmbeddedSource::Kind::Explicit;
  } else if (emb == "same-as-unobserved") {
    cfg.embedded.kind = EmbeddedSource::Kind::SameAsUnobserved;
  } else if (!emb.empty()) {
    bad_choice("embedded", emb, "er-like, ring, explicit or same-as-unobserved");
  }
  if (f.has("embedded_q")) cfg.embedded.q = f.number("embedded_q", 0.0);
  if (f.has("embedded_file")) {
    std::filesystem::path path = f.text("embedded_file", "");
    if (path.is_relative()) path = base_dir / path;
    std::ifstream in(path);
    if (!in) throw ConfigError("field 'embedded_file': cannot open " + path.string());
    try {
      cfg.embedded.graph = read_edge_list(in);
    } catch (const std::invalid_argument& e) {
      throw ConfigError("field 'embedded_file': " + std::string(e.what()));
    }
  }
  if (cfg.embedded.kind == EmbeddedSource::Kind::Explicit && !cfg.embedded.graph) {
    throw ConfigError("field 'embedded_file': required when embedded is explicit");
  }

  cfg.policy.rule = parse_weight_rule(f.text("policy", cfg.policy.rule == WeightRule::Laplacian ? "laplacian"
                                                                                                  : "metropolis"));
  cfg.policy.rho = f.number("rho", cfg.policy.rho);
  cfg.policy.lambda = f.number("lambda", cfg.policy.lambda);

  const std::string cls = f.text("classifier", "");
  if (cls == "kmeans") {
    cfg.classifier.kind = ClassifierChoice::Kind::KMeans2;
  } else if (cls == "threshold-auto") {
    cfg.classifier.kind = ClassifierChoice::Kind::ThresholdAuto;
  } else if (cls == "threshold") {
    cfg.classifier.kind = ClassifierChoice::Kind::Threshold;
    if (!f.has("eta")) throw ConfigError("field 'eta': required when classifier is threshold");
  } else if (!cls.empty()) {
    bad_choice("classifier", cls, "kmeans, threshold-auto or threshold");
  }
  cfg.classifier.eta = f.number("eta", cfg.classifier.eta);

  const std::string mode = f.text("correlations", "");
  if (mode == "analytic") {
    cfg.correlation.kind = CorrelationMode::Kind::Analytic;
  } else if (mode == "empirical") {
    cfg.correlation.kind = CorrelationMode::Kind::Empirical;
  } else if (!mode.empty()) {
    bad_choice("correlations", mode, "analytic or empirical");
  }
  cfg.correlation.sim.n_max = f.integer("n_max", cfg.correlation.sim.n_max);
  cfg.correlation.sim.burn_in = f.integer("burn_in", cfg.correlation.sim.burn_in);
  if (f.has("beta")) cfg.correlation.beta = f.number("beta", 0.0);
  if (f.has("noise")) cfg.correlation.sim.noise = parse_noise(f.text("noise", ""));

  cfg.trials = static_cast<int>(f.integer("trials", cfg.trials));
  cfg.base_seed = f.unsigned_integer("seed", cfg.base_seed);
}

}  // namespace

WeightRule parse_weight_rule(const std::string& name) {
  if (name == "laplacian") return WeightRule::Laplacian;
  if (name == "metropolis") return WeightRule::Metropolis;
  bad_choice("policy", name, "laplacian or metropolis");
}

Noise parse_noise(const std::string& name) {
  if (name == "gaussian") return Noise::Gaussian;
  if (name == "rademacher") return Noise::Rademacher;
  if (name == "uniform") return Noise::UniformCentered;
  bad_choice("noise", name, "gaussian, rademacher or uniform");
}

NodeSet parse_node_list(const std::string& text) {
  std::vector<NodeId> ids;
  std::stringstream in(text);
  std::string item;
  auto number = [&](std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    int v = 0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size() || s.empty() || v < 0) {
      throw ConfigError("node list '" + text + "': bad node id '" + std::string(s) + "'");
    }
    return v;
  };
  while (std::getline(in, item, ',')) {
    const auto dash = item.find('-');
    if (dash == std::string::npos) {
      ids.push_back(number(item));
      continue;
    }
    const int lo = number(std::string_view(item).substr(0, dash));
    const int hi = number(std::string_view(item).substr(dash + 1));
    if (hi < lo) throw ConfigError("node list '" + text + "': empty range '" + item + "'");
    for (int v = lo; v <= hi; ++v) ids.push_back(v);
  }
  if (ids.empty()) throw ConfigError("node list is empty");
  try {
    return NodeSet(std::move(ids));
  } catch (const std::invalid_argument& e) {
    throw ConfigError("node list '" + text + "': " + e.what());
  }
}

nlohmann::json load_config_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
}

ExperimentConfig experiment_config_from_json(const nlohmann::json& j, const std::filesystem::path& base_dir) {
  Fields f(j);
  ExperimentConfig cfg;
  cfg.regime.n_grid = {200};
  read_experiment(f, cfg, base_dir);
  f.reject_unknown();
  cfg.validate();
  return cfg;
}

PatchCatchConfig patch_catch_config_from_json(const nlohmann::json& j, const std::filesystem::path& base_dir) {
  Fields f(j);
  PatchCatchConfig cfg;
  cfg.base.regime.n_grid = {300};
  cfg.base.regime.rule = RegimeSpec::Rule::Multiple;
  cfg.base.regime.k = 5.0;
  cfg.base.s_size = 20;
  cfg.base.embedded.kind = EmbeddedSource::Kind::SameAsUnobserved;
  cfg.base.correlation.kind = CorrelationMode::Kind::Empirical;
  cfg.base.trials = 20;
  read_experiment(f, cfg.base, base_dir);
  cfg.probe_limit = static_cast<int>(f.integer("probe_limit", cfg.probe_limit));
  const std::string tb = f.text("tiebreak", "first");
  if (tb == "first") {
    cfg.tiebreak = TieBreak::First;
  } else if (tb == "and") {
    cfg.tiebreak = TieBreak::And;
  } else {
    bad_choice("tiebreak", tb, "first or and");
  }
  cfg.shared_trajectory = f.boolean("shared_trajectory", cfg.shared_trajectory);
  f.reject_unknown();
  cfg.validate();
  return cfg;
}

SingleRunConfig single_run_config_from_json(const nlohmann::json& j, const std::filesystem::path& base_dir) {
  Fields f(j);
  SingleRunConfig cfg;
  if (!f.has("graph")) throw ConfigError("field 'graph': required");
  cfg.graph = f.text("graph", "");
  if (cfg.graph.is_relative()) cfg.graph = base_dir / cfg.graph;
  if (!f.has("observed")) throw ConfigError("field 'observed': required");
  cfg.observed = parse_node_list(f.text("observed", ""));
  cfg.policy.rule = parse_weight_rule(f.text("policy", "metropolis"));
  cfg.policy.rho = f.number("rho", cfg.policy.rho);
  cfg.policy.lambda = f.number("lambda", cfg.policy.lambda);
  const std::string mode = f.text("mode", "analytic");
  if (mode != "analytic" && mode != "empirical") bad_choice("mode", mode, "analytic or empirical");
  cfg.analytic = mode == "analytic";
  cfg.sim.n_max = f.integer("n_max", cfg.sim.n_max);
  cfg.sim.burn_in = f.integer("burn_in", cfg.sim.burn_in);
  if (f.has("beta")) cfg.beta = f.number("beta", 0.0);
  if (f.has("noise")) cfg.sim.noise = parse_noise(f.text("noise", ""));
  cfg.sim.seed = f.unsigned_integer("seed", cfg.sim.seed);
  const std::string cls = f.text("classifier", "kmeans");
  if (cls == "kmeans") {
    cfg.classifier.kind = ClassifierChoice::Kind::KMeans2;
  } else if (cls == "threshold") {
    cfg.classifier.kind = ClassifierChoice::Kind::Threshold;
    if (!f.has("eta")) throw ConfigError("field 'eta': required when classifier is threshold");
  } else {
    bad_choice("classifier", cls, "kmeans or threshold");
  }
  cfg.classifier.eta = f.number("eta", 0.0);
  f.reject_unknown();

  try {
    cfg.policy.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("policy: ") + e.what());
  }
  cfg.sim.beta = cfg.beta.value_or(1.0 - cfg.policy.rho);
  try {
    cfg.sim.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("simulation: ") + e.what());
  }
  if (cfg.classifier.kind == ClassifierChoice::Kind::Threshold && !(cfg.classifier.eta > 0.0)) {
    throw ConfigError("field 'eta': must be positive");
  }
  return cfg;
}

TheoryCheckConfig theory_config_from_json(const nlohmann::json& j) {
  Fields f(j);
  TheoryCheckConfig cfg;
  cfg.rho = f.number("rho", cfg.rho);
  cfg.log10_n_grid = f.list<double>("log10_n_grid", cfg.log10_n_grid);
  cfg.rule = parse_rule(f.text("p_rule", "loglog"));
  cfg.k = f.number("p_multiple", cfg.k);
  cfg.s_size = static_cast<int>(f.integer("s_size", cfg.s_size));
  f.reject_unknown();
  cfg.validate();
  return cfg;
}

}  // namespace tomolab
