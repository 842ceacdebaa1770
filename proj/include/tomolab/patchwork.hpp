#ifndef TOMOLAB_PATCHWORK_HPP
#define TOMOLAB_PATCHWORK_HPP

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <vector>

#include "tomolab/dynamics.hpp"
#include "tomolab/graph.hpp"
#include "tomolab/inference.hpp"
#include "tomolab/weights.hpp"

namespace tomolab {

/// Disjoint patches of the observable set; any two of them fit in one probe.
struct PatchPlan {
  std::vector<NodeSet> patches;
  int probe_limit = 0;

  /// Union of all patches.
  NodeSet covered() const;
  /// P(P-1)/2, or 1 for a single patch.
  std::size_t experiment_count() const;
  /// Throws std::invalid_argument on overlap, empty or oversized patches.
  void validate() const;
};

/// Consecutive blocks of floor(m/2) nodes in set order, the last one possibly
/// shorter. Requires m >= 4 and |s| >= 2.
PatchPlan make_patches(const NodeSet& s, int m);

enum class PairState : std::uint8_t { Undecided, Connected, Disconnected };

/// How a pair seen in more than one experiment is resolved.
enum class TieBreak {
  First,  ///< keep the first classification
  And     ///< connected only if every experiment says so
};

struct ExperimentRecord {
  std::size_t index = 0;
  std::size_t patch_a = 0;
  std::size_t patch_b = 0;
  /// Decided pairs after merging this experiment (cumulative).
  std::size_t pairs_decided = 0;
  /// Distance to the true graph after this experiment, if known.
  std::optional<double> distance;
  NodeSet nodes;
  Graph estimate{1};
};

/// Pairwise decisions over the observable set S, indexed by S's ordering.
class ReconstructionState {
 public:
  explicit ReconstructionState(NodeSet s);

  const NodeSet& nodes() const { return s_; }
  /// i, j are node ids in S.
  PairState state(NodeId i, NodeId j) const;
  std::size_t decided_count() const;
  std::size_t pair_count() const { return states_.size(); }

  /// Folds a graph estimated on `subset` (indexed by subset's ordering).
  void merge(const NodeSet& subset, const Graph& estimate, TieBreak tiebreak);

  /// Current estimate on S; undecided pairs count as disconnected.
  Graph estimated_graph() const;

  std::vector<ExperimentRecord> experiment_log;

 private:
  std::size_t slot(std::size_t a, std::size_t b) const;

  NodeSet s_;
  std::vector<PairState> states_;
};

struct PatchCatchOptions {
  SimConfig sim;
  TieBreak tiebreak = TieBreak::First;
  Classifier classifier = Classifier::kmeans2();
  /// One simulation over all of S, restricted per experiment. When false each
  /// experiment runs its own trajectory with a seed derived from sim.seed.
  bool shared_trajectory = true;
  /// Exact correlations instead of simulation (sim is then ignored).
  bool analytic = false;
  /// True graph on S, indexed by S's ordering; enables the distance trace.
  std::optional<Graph> truth;
};

/// Probes every pair of patches (i ascending, j < i), estimates the
/// truncated Granger matrix on the union, classifies it, and merges the result.
/// A plan with a single patch runs one experiment on that patch.
/// Throws ConfigError when a probed union has fewer than three nodes.
ReconstructionState run_patch_catch(const CombinationMatrix& a, const PatchPlan& plan,
                                    const PatchCatchOptions& options);

/// 2/(S(S-1)) * sum_{i<j} |g_ij - ĝ_ij|.
double graph_distance(const Graph& truth, const Graph& estimate);

/// CSV with header experiment_index,patch_a,patch_b,pairs_decided,distance.
/// The distance column is empty when no truth was supplied.
void write_experiment_log(std::ostream& out, const ReconstructionState& state);

}  // namespace tomolab

#endif  // TOMOLAB_PATCHWORK_HPP
