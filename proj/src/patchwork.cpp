#include "tomolab/patchwork.hpp"

#include <iomanip>
#include <ostream>
#include <stdexcept>
#include <string>

#include "tomolab/errors.hpp"
#include "tomolab/seeding.hpp"

namespace tomolab {

NodeSet PatchPlan::covered() const {
  NodeSet all;
  for (const NodeSet& p : patches) all = all.set_union(p);
  return all;
}

std::size_t PatchPlan::experiment_count() const {
  const std::size_t p = patches.size();
  return p < 2 ? p : p * (p - 1) / 2;
}

void PatchPlan::validate() const {
  if (probe_limit < 4) throw std::invalid_argument("PatchPlan: probe limit must be at least 4");
  if (patches.empty()) throw std::invalid_argument("PatchPlan: no patches");
  const std::size_t cap = static_cast<std::size_t>(probe_limit / 2);
  std::size_t total = 0;
  for (const NodeSet& p : patches) {
    if (p.empty()) throw std::invalid_argument("PatchPlan: empty patch");
    if (p.size() > cap) {
      throw std::invalid_argument("PatchPlan: patch of " + std::to_string(p.size()) + " nodes exceeds " +
                                  std::to_string(cap));
    }
    total += p.size();
  }
  if (covered().size() != total) throw std::invalid_argument("PatchPlan: patches overlap");
}

PatchPlan make_patches(const NodeSet& s, int m) {
  if (m < 4) throw std::invalid_argument("make_patches: probe limit must be at least 4");
  if (s.size() < 2) throw std::invalid_argument("make_patches: need at least two observable nodes");
  const std::size_t block = static_cast<std::size_t>(m / 2);
  PatchPlan plan;
  plan.probe_limit = m;
  const auto& ids = s.members();
  for (std::size_t first = 0; first < ids.size(); first += block) {
    const std::size_t last = std::min(ids.size(), first + block);
    plan.patches.emplace_back(std::vector<NodeId>(ids.begin() + static_cast<std::ptrdiff_t>(first),
                                                  ids.begin() + static_cast<std::ptrdiff_t>(last)));
  }
  return plan;
}

ReconstructionState::ReconstructionState(NodeSet s) : s_(std::move(s)) {
  const std::size_t k = s_.size();
  states_.assign(k * (k - (k > 0 ? 1 : 0)) / 2, PairState::Undecided);
}

std::size_t ReconstructionState::slot(std::size_t a, std::size_t b) const {
  if (a == b) throw std::invalid_argument("ReconstructionState: pair needs two distinct nodes");
  if (a > b) std::swap(a, b);
  // Row-major upper triangle without the diagonal.
  const std::size_t k = s_.size();
  return a * (2 * k - a - 1) / 2 + (b - a - 1);
}

PairState ReconstructionState::state(NodeId i, NodeId j) const {
  const auto a = s_.index_of(i);
  const auto b = s_.index_of(j);
  if (!a || !b) throw std::invalid_argument("ReconstructionState: node outside the observable set");
  return states_[slot(*a, *b)];
}

std::size_t ReconstructionState::decided_count() const {
  std::size_t n = 0;
  for (PairState st : states_) n += st != PairState::Undecided;
  return n;
}

void ReconstructionState::merge(const NodeSet& subset, const Graph& estimate, TieBreak tiebreak) {
  if (estimate.size() != static_cast<NodeId>(subset.size())) {
    throw std::invalid_argument("ReconstructionState::merge: estimate size differs from subset");
  }
  std::vector<std::size_t> pos(subset.size());
  for (std::size_t q = 0; q < subset.size(); ++q) {
    const auto p = s_.index_of(subset[q]);
    if (!p) throw std::invalid_argument("ReconstructionState::merge: node outside the observable set");
    pos[q] = *p;
  }
  for (std::size_t x = 0; x < subset.size(); ++x) {
    for (std::size_t y = x + 1; y < subset.size(); ++y) {
      PairState& st = states_[slot(pos[x], pos[y])];
      const bool edge = estimate.connected(static_cast<NodeId>(x), static_cast<NodeId>(y));
      if (st == PairState::Undecided) {
        st = edge ? PairState::Connected : PairState::Disconnected;
      } else if (tiebreak == TieBreak::And && !edge) {
        st = PairState::Disconnected;
      }
    }
  }
}

Graph ReconstructionState::estimated_graph() const {
  const auto k = static_cast<NodeId>(s_.size());
  Graph g(std::max<NodeId>(k, 1));
  for (NodeId a = 0; a < k; ++a)
    for (NodeId b = a + 1; b < k; ++b)
      if (states_[slot(static_cast<std::size_t>(a), static_cast<std::size_t>(b))] == PairState::Connected)
        g.set_edge(a, b, true);
  return g;
}

double graph_distance(const Graph& truth, const Graph& estimate) {
  if (truth.size() != estimate.size()) throw std::invalid_argument("graph_distance: size mismatch");
  const NodeId s = truth.size();
  if (s < 2) return 0.0;
  std::size_t differ = 0;
  for (NodeId i = 0; i < s; ++i)
    for (NodeId j = i + 1; j < s; ++j) differ += truth.connected(i, j) != estimate.connected(i, j);
  return 2.0 * static_cast<double>(differ) / (static_cast<double>(s) * (s - 1));
}

ReconstructionState run_patch_catch(const CombinationMatrix& a, const PatchPlan& plan,
                                    const PatchCatchOptions& options) {
  plan.validate();
  const NodeSet s = plan.covered();
  s.check_within(static_cast<NodeId>(a.size()));
  if (options.truth && options.truth->size() != static_cast<NodeId>(s.size())) {
    throw std::invalid_argument("run_patch_catch: true graph size differs from the observable set");
  }
  if (!options.analytic) options.sim.validate();

  // Experiment list in probing order.
  struct Probe {
    std::size_t a, b;
    NodeSet nodes;
  };
  std::vector<Probe> probes;
  if (plan.patches.size() == 1) {
    probes.push_back({0, 0, plan.patches[0]});
  } else {
    for (std::size_t i = 1; i < plan.patches.size(); ++i)
      for (std::size_t j = 0; j < i; ++j) probes.push_back({i, j, plan.patches[i].set_union(plan.patches[j])});
  }
  for (const Probe& pr : probes) {
    if (pr.nodes.size() < 3) {
      throw ConfigError("patch union of " + std::to_string(pr.nodes.size()) +
                        " nodes is too small to classify (need at least 3)");
    }
  }

  std::optional<CorrelationSet> shared;
  if (options.analytic) {
    shared = analytic_correlations(a, options.sim.beta, s);
  } else if (options.shared_trajectory) {
    shared = simulate_and_accumulate(a, options.sim, s);
  }

  ReconstructionState state(s);
  for (std::size_t e = 0; e < probes.size(); ++e) {
    const Probe& pr = probes[e];
    CorrelationSet corr;
    if (shared) {
      corr = restrict_to(*shared, pr.nodes);
    } else {
      SimConfig own = options.sim;
      own.seed = derive_seed(options.sim.seed, {e});
      corr = simulate_and_accumulate(a, own, pr.nodes);
    }
    const Eigen::MatrixXd a_hat = granger_truncated(corr);
    Graph estimate = classify(a_hat, options.classifier);
    state.merge(pr.nodes, estimate, options.tiebreak);

    ExperimentRecord rec;
    rec.index = e;
    rec.patch_a = pr.a;
    rec.patch_b = pr.b;
    rec.pairs_decided = state.decided_count();
    if (options.truth) rec.distance = graph_distance(*options.truth, state.estimated_graph());
    rec.nodes = pr.nodes;
    rec.estimate = std::move(estimate);
    state.experiment_log.push_back(std::move(rec));
  }
  return state;
}

void write_experiment_log(std::ostream& out, const ReconstructionState& state) {
  const auto prec = out.precision();
  out << "experiment_index,patch_a,patch_b,pairs_decided,distance\n" << std::setprecision(17);
  for (const ExperimentRecord& r : state.experiment_log) {
    out << r.index << ',' << r.patch_a << ',' << r.patch_b << ',' << r.pairs_decided << ',';
    if (r.distance) out << *r.distance;
    out << '\n';
  }
  out.precision(prec);
}

}  // namespace tomolab
