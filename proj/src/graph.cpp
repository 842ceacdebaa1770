#include "tomolab/graph.hpp"

#include <algorithm>
#include <deque>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>

namespace tomolab {

NodeSet::NodeSet(std::vector<NodeId> ids) : ids_(std::move(ids)) {
  std::sort(ids_.begin(), ids_.end());
  if (std::adjacent_find(ids_.begin(), ids_.end()) != ids_.end()) {
    throw std::invalid_argument("NodeSet: duplicate node id");
  }
  if (!ids_.empty() && ids_.front() < 0) {
    throw std::invalid_argument("NodeSet: negative node id");
  }
}

NodeSet NodeSet::range(NodeId n) { return range(0, n); }

NodeSet NodeSet::range(NodeId first, NodeId last_exclusive) {
  std::vector<NodeId> ids;
  for (NodeId k = first; k < last_exclusive; ++k) ids.push_back(k);
  return NodeSet(std::move(ids));
}

bool NodeSet::contains(NodeId id) const {
  return std::binary_search(ids_.begin(), ids_.end(), id);
}

std::optional<std::size_t> NodeSet::index_of(NodeId id) const {
  auto it = std::lower_bound(ids_.begin(), ids_.end(), id);
  if (it == ids_.end() || *it != id) return std::nullopt;
  return static_cast<std::size_t>(it - ids_.begin());
}

void NodeSet::check_within(NodeId n) const {
  if (!ids_.empty() && ids_.back() >= n) {
    throw std::invalid_argument("NodeSet: node id " + std::to_string(ids_.back()) +
                                " out of range for graph of size " + std::to_string(n));
  }
}

NodeSet NodeSet::complement(NodeId n) const {
  std::vector<NodeId> out;
  out.reserve(n > static_cast<NodeId>(ids_.size()) ? n - ids_.size() : 0);
  for (NodeId k = 0; k < n; ++k) {
    if (!contains(k)) out.push_back(k);
  }
  return NodeSet(std::move(out));
}

NodeSet NodeSet::set_union(const NodeSet& other) const {
  std::vector<NodeId> out;
  std::set_union(ids_.begin(), ids_.end(), other.ids_.begin(), other.ids_.end(),
                 std::back_inserter(out));
  return NodeSet(std::move(out));
}

NodeSet NodeSet::set_difference(const NodeSet& other) const {
  std::vector<NodeId> out;
  std::set_difference(ids_.begin(), ids_.end(), other.ids_.begin(), other.ids_.end(),
                      std::back_inserter(out));
  return NodeSet(std::move(out));
}

bool NodeSet::disjoint_with(const NodeSet& other) const {
  std::vector<NodeId> out;
  std::set_intersection(ids_.begin(), ids_.end(), other.ids_.begin(), other.ids_.end(),
                        std::back_inserter(out));
  return out.empty();
}

Graph::Graph(NodeId n) : n_(n) {
  if (n <= 0) throw std::invalid_argument("Graph: node count must be positive");
  adj_.assign(static_cast<std::size_t>(n) * n, 0);
  for (NodeId i = 0; i < n; ++i) adj_[static_cast<std::size_t>(i) * n + i] = 1;
}

Graph Graph::complete(NodeId n) {
  Graph g(n);
  std::fill(g.adj_.begin(), g.adj_.end(), 1);
  return g;
}

Graph Graph::from_edges(NodeId n, std::span<const std::pair<NodeId, NodeId>> edges) {
  Graph g(n);
  for (auto [i, j] : edges) g.set_edge(i, j, true);
  return g;
}

Graph Graph::ring(NodeId n) {
  Graph g(n);
  if (n < 2) return g;
  for (NodeId i = 0; i < n; ++i) g.set_edge(i, (i + 1) % n, true);
  return g;
}

Graph Graph::path(NodeId n) {
  Graph g(n);
  for (NodeId i = 0; i + 1 < n; ++i) g.set_edge(i, i + 1, true);
  return g;
}

Graph Graph::star(NodeId n) {
  Graph g(n);
  for (NodeId i = 1; i < n; ++i) g.set_edge(0, i, true);
  return g;
}

void Graph::set_edge(NodeId i, NodeId j, bool present) {
  if (i < 0 || j < 0 || i >= n_ || j >= n_) {
    throw std::invalid_argument("Graph::set_edge: node id out of range");
  }
  if (i == j) return;
  adj_[static_cast<std::size_t>(i) * n_ + j] = present;
  adj_[static_cast<std::size_t>(j) * n_ + i] = present;
}

int Graph::degree(NodeId i) const {
  const auto* row = adj_.data() + static_cast<std::size_t>(i) * n_;
  return static_cast<int>(std::count(row, row + n_, std::uint8_t{1}));
}

int Graph::max_degree() const {
  int best = 0;
  for (NodeId i = 0; i < n_; ++i) best = std::max(best, degree(i));
  return best;
}

std::vector<std::pair<NodeId, NodeId>> Graph::edges() const {
  std::vector<std::pair<NodeId, NodeId>> out;
  for (NodeId i = 0; i < n_; ++i)
    for (NodeId j = i + 1; j < n_; ++j)
      if (connected(i, j)) out.emplace_back(i, j);
  return out;
}

std::size_t Graph::edge_count() const {
  std::size_t total = std::count(adj_.begin(), adj_.end(), std::uint8_t{1});
  return (total - static_cast<std::size_t>(n_)) / 2;
}

std::vector<NodeId> Graph::neighbors(NodeId i) const {
  std::vector<NodeId> out;
  const auto* row = adj_.data() + static_cast<std::size_t>(i) * n_;
  for (NodeId j = 0; j < n_; ++j)
    if (j != i && row[j]) out.push_back(j);
  return out;
}

Graph Graph::induced(const NodeSet& s) const {
  s.check_within(n_);
  if (s.empty()) throw std::invalid_argument("Graph::induced: empty node set");
  const auto k = static_cast<NodeId>(s.size());
  Graph out(k);
  for (NodeId a = 0; a < k; ++a)
    for (NodeId b = a + 1; b < k; ++b)
      if (connected(s[a], s[b])) out.set_edge(a, b, true);
  return out;
}

void PartialErSpec::validate() const {
  if (n_total <= 0) throw std::invalid_argument("PartialErSpec: n_total must be positive");
  if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("PartialErSpec: p must lie in [0,1]");
  observable.check_within(n_total);
  if (static_cast<std::size_t>(embedded.size()) != observable.size()) {
    throw std::invalid_argument("PartialErSpec: embedded graph size differs from |observable|");
  }
}

Graph sample_er(NodeId n, double p, std::mt19937_64& rng) {
  if (n <= 0) throw std::invalid_argument("sample_er: node count must be positive");
  if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("sample_er: p must lie in [0,1]");
  Graph g(n);
  std::bernoulli_distribution coin(p);
  for (NodeId i = 0; i < n; ++i)
    for (NodeId j = i + 1; j < n; ++j)
      if (coin(rng)) g.set_edge(i, j, true);
  return g;
}

Graph sample_partial_er(const PartialErSpec& spec, std::mt19937_64& rng) {
  spec.validate();
  return embed(spec.embedded, sample_er(spec.n_total, spec.p, rng), spec.observable);
}

Graph embed(const Graph& inner, const Graph& outer, const NodeSet& s) {
  s.check_within(outer.size());
  if (static_cast<std::size_t>(inner.size()) != s.size()) {
    throw std::invalid_argument("embed: inner graph size differs from |s|");
  }
  Graph g = outer;
  const auto k = static_cast<NodeId>(s.size());
  for (NodeId a = 0; a < k; ++a)
    for (NodeId b = a + 1; b < k; ++b) g.set_edge(s[a], s[b], inner.connected(a, b));
  return g;
}

Graph local_disconnect(const Graph& g, const NodeSet& u1, const NodeSet& u2) {
  u1.check_within(g.size());
  u2.check_within(g.size());
  Graph out = g;
  for (NodeId a : u1)
    for (NodeId b : u2)
      if (a != b) out.set_edge(a, b, false);
  return out;
}

Graph inherit(const Graph& g, NodeId j, const NodeSet& u) {
  u.check_within(g.size());
  if (j < 0 || j >= g.size()) throw std::invalid_argument("inherit: node id out of range");
  if (u.contains(j)) throw std::invalid_argument("inherit: receiving node belongs to the set");
  Graph out = g;
  for (NodeId k : u) {
    for (NodeId v : g.neighbors(k)) {
      out.set_edge(k, v, false);
      if (!u.contains(v)) out.set_edge(j, v, true);
    }
  }
  return out;
}

Graph homogenize(const Graph& g, const NodeSet& s, NodeId i, NodeId j) {
  if (i == j || !s.contains(i) || !s.contains(j)) {
    throw std::invalid_argument("homogenize: i and j must be distinct members of s");
  }
  return inherit(local_disconnect(g, s, s), j, s.set_difference(NodeSet{i, j}));
}

std::vector<Hops> distances_from(const Graph& g, NodeId source) {
  const NodeId n = g.size();
  std::vector<Hops> dist(static_cast<std::size_t>(n), kUnreachable);
  std::deque<NodeId> frontier{source};
  dist[source] = 0;
  while (!frontier.empty()) {
    const NodeId u = frontier.front();
    frontier.pop_front();
    for (NodeId v = 0; v < n; ++v) {
      if (!dist[v] && g.connected(u, v)) {
        dist[v] = *dist[u] + 1;
        frontier.push_back(v);
      }
    }
  }
  return dist;
}

Hops distance(const Graph& g, NodeId i, NodeId j) {
  if (i < 0 || j < 0 || i >= g.size() || j >= g.size()) {
    throw std::invalid_argument("distance: node id out of range");
  }
  if (i == j) return 0;
  // Stop the search as soon as j is labelled.
  const NodeId n = g.size();
  std::vector<int> dist(static_cast<std::size_t>(n), -1);
  std::deque<NodeId> frontier{i};
  dist[i] = 0;
  while (!frontier.empty()) {
    const NodeId u = frontier.front();
    frontier.pop_front();
    for (NodeId v = 0; v < n; ++v) {
      if (dist[v] < 0 && g.connected(u, v)) {
        dist[v] = dist[u] + 1;
        if (v == j) return dist[v];
        frontier.push_back(v);
      }
    }
  }
  return kUnreachable;
}

NodeSet neighborhood(const Graph& g, NodeId i, int radius) {
  if (radius < 0) throw std::invalid_argument("neighborhood: negative radius");
  const auto dist = distances_from(g, i);
  std::vector<NodeId> out;
  for (NodeId v = 0; v < g.size(); ++v)
    if (dist[v] && *dist[v] <= radius) out.push_back(v);
  return NodeSet(std::move(out));
}

bool is_connected(const Graph& g) {
  const auto dist = distances_from(g, 0);
  return std::all_of(dist.begin(), dist.end(), [](const Hops& h) { return h.has_value(); });
}

void write_edge_list(std::ostream& out, const Graph& g) {
  out << "n=" << g.size() << '\n';
  for (auto [i, j] : g.edges()) out << i << ' ' << j << '\n';
}

Graph read_edge_list(std::istream& in) {
  std::string line;
  int line_no = 0;
  auto fail = [&](const std::string& what) {
    throw std::invalid_argument("edge list line " + std::to_string(line_no) + ": " + what);
  };
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!line.empty() && line[0] != '#') break;
  }
  if (line.rfind("n=", 0) != 0) fail("expected header 'n=<N>'");
  NodeId n = 0;
  std::size_t used = 0;
  try {
    n = std::stoi(line.substr(2), &used);
  } catch (const std::logic_error&) {
    fail("malformed node count");
  }
  if (used != line.size() - 2) fail("trailing characters in header");
  if (n <= 0) fail("node count must be positive");
  Graph g(n);
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    std::istringstream fields(line);
    NodeId i = -1, j = -1;
    std::string extra;
    if (!(fields >> i >> j) || (fields >> extra)) fail("expected 'i j'");
    if (i < 0 || j < 0 || i >= n || j >= n) fail("node id out of range");
    g.set_edge(i, j, true);
  }
  return g;
}

}  // namespace tomolab
