#ifndef TOMOLAB_GRAPH_HPP
#define TOMOLAB_GRAPH_HPP

#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <iosfwd>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace tomolab {

using NodeId = int;

/// Strictly increasing list of node ids.
///
/// The member order defines the row/column order of every matrix indexed by
/// the set (correlations, estimators, classification graphs): row k of an
/// S-indexed matrix refers to node `members()[k]`.
class NodeSet {
 public:
  NodeSet() = default;
  /// Sorts and validates; throws std::invalid_argument on duplicates or
  /// negative ids.
  explicit NodeSet(std::vector<NodeId> ids);
  NodeSet(std::initializer_list<NodeId> ids) : NodeSet(std::vector<NodeId>(ids)) {}

  /// {0, 1, ..., n-1}
  static NodeSet range(NodeId n);
  static NodeSet range(NodeId first, NodeId last_exclusive);

  const std::vector<NodeId>& members() const { return ids_; }
  std::size_t size() const { return ids_.size(); }
  bool empty() const { return ids_.empty(); }
  NodeId operator[](std::size_t k) const { return ids_[k]; }
  auto begin() const { return ids_.begin(); }
  auto end() const { return ids_.end(); }

  bool contains(NodeId id) const;
  /// Position of `id` in the ordering, or nullopt.
  std::optional<std::size_t> index_of(NodeId id) const;

  /// Throws std::invalid_argument unless every member is < n.
  void check_within(NodeId n) const;

  /// Nodes of {0..n-1} not in this set.
  NodeSet complement(NodeId n) const;
  NodeSet set_union(const NodeSet& other) const;
  NodeSet set_difference(const NodeSet& other) const;
  bool disjoint_with(const NodeSet& other) const;

  friend bool operator==(const NodeSet&, const NodeSet&) = default;

 private:
  std::vector<NodeId> ids_;
};

/// Hop count between two nodes; std::nullopt means unreachable.
using Hops = std::optional<int>;
inline constexpr std::nullopt_t kUnreachable = std::nullopt;

/// Undirected graph with mandatory self-loops, stored as a dense symmetric
/// boolean adjacency matrix.
class Graph {
 public:
  /// n nodes, only self-loops. Throws std::invalid_argument for n == 0.
  explicit Graph(NodeId n);

  static Graph complete(NodeId n);
  static Graph from_edges(NodeId n, std::span<const std::pair<NodeId, NodeId>> edges);
  static Graph from_edges(NodeId n, std::initializer_list<std::pair<NodeId, NodeId>> edges) {
    return from_edges(n, std::span<const std::pair<NodeId, NodeId>>(edges.begin(), edges.size()));
  }
  static Graph ring(NodeId n);
  static Graph path(NodeId n);
  static Graph star(NodeId n);

  NodeId size() const { return n_; }

  bool connected(NodeId i, NodeId j) const {
    return adj_[static_cast<std::size_t>(i) * n_ + j] != 0;
  }

  /// Sets g_ij = g_ji. Self-loops are not editable.
  void set_edge(NodeId i, NodeId j, bool present);

  /// |N_i(G)|, which counts node i itself.
  int degree(NodeId i) const;
  int max_degree() const;

  /// Off-diagonal unordered pairs (i < j) that are connected.
  std::vector<std::pair<NodeId, NodeId>> edges() const;
  std::size_t edge_count() const;

  /// Neighbors of i excluding i itself.
  std::vector<NodeId> neighbors(NodeId i) const;

  /// Subgraph induced on `s`, reindexed through the set ordering.
  Graph induced(const NodeSet& s) const;

  friend bool operator==(const Graph&, const Graph&) = default;

 private:
  NodeId n_;
  std::vector<std::uint8_t> adj_;
};

/// Observable set S carries a fixed graph; every other pair is Bernoulli(p).
struct PartialErSpec {
  NodeId n_total;
  double p;
  NodeSet observable;
  Graph embedded;

  void validate() const;
};

Graph sample_er(NodeId n, double p, std::mt19937_64& rng);
Graph sample_partial_er(const PartialErSpec& spec, std::mt19937_64& rng);

/// Outer graph with its internal-s edges replaced by those of `inner`
/// (inner is indexed through the ordering of s).
Graph embed(const Graph& inner, const Graph& outer, const NodeSet& s);
/// Removes every edge with one end in u1 and the other in u2.
Graph local_disconnect(const Graph& g, const NodeSet& u1, const NodeSet& u2);
/// Strips all edges of the members of u; node j takes over their edges
/// towards nodes outside u.
Graph inherit(const Graph& g, NodeId j, const NodeSet& u);
/// inherit(local_disconnect(g, s, s), j, s \ {i, j}) for i, j in s.
Graph homogenize(const Graph& g, const NodeSet& s, NodeId i, NodeId j);

Hops distance(const Graph& g, NodeId i, NodeId j);
/// BFS hop counts from `source` to every node.
std::vector<Hops> distances_from(const Graph& g, NodeId source);
NodeSet neighborhood(const Graph& g, NodeId i, int radius);
bool is_connected(const Graph& g);

// Edge-list text format: header "n=<N>", then one "i j" line per edge (i < j),
// self-loops implied. Blank lines and lines starting with '#' are ignored.
void write_edge_list(std::ostream& out, const Graph& g);
Graph read_edge_list(std::istream& in);

}  // namespace tomolab

#endif  // TOMOLAB_GRAPH_HPP
