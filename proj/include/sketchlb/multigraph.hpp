#pragma once

#include <cstdint>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "errors.hpp"

namespace sketchlb {

/// Node identifiers are 1-based.
using NodeId = int;

struct Edge {
  NodeId u;  // u < v
  NodeId v;
  long multiplicity;
  friend bool operator==(const Edge&, const Edge&) = default;
};

/// (neighbor id, multiplicity), sorted by id.
using Neighborhood = std::vector<std::pair<NodeId, long>>;

/// Undirected multigraph on nodes 1..n without self-loops. Parallel edges are
/// stored as a positive multiplicity per unordered pair.
class MultiGraph {
 public:
  explicit MultiGraph(int node_count) : adj_(static_cast<std::size_t>(node_count) + 1) {
    if (node_count < 1) throw GraphError("a graph needs at least one node");
  }

  int node_count() const noexcept { return static_cast<int>(adj_.size()) - 1; }

  bool contains(NodeId id) const noexcept { return id >= 1 && id <= node_count(); }

  /// Adds `count` parallel copies of {u, v}.
  void add_edge(NodeId u, NodeId v, long count = 1) {
    check_pair(u, v);
    if (count < 1) throw GraphError("edge multiplicity must be positive");
    adj_[u][v] += count;
    adj_[v][u] += count;
  }

  /// Removes `count` copies of {u, v}; the pair disappears when none remain.
  void remove_edge(NodeId u, NodeId v, long count = 1) {
    check_pair(u, v);
    auto it = adj_[u].find(v);
    if (it == adj_[u].end() || it->second < count) throw GraphError("removing a missing edge");
    it->second -= count;
    adj_[v][u] -= count;
    if (it->second == 0) {
      adj_[u].erase(v);
      adj_[v].erase(u);
    }
  }

  long multiplicity(NodeId u, NodeId v) const {
    require(u);
    require(v);
    auto it = adj_[u].find(v);
    return it == adj_[u].end() ? 0 : it->second;
  }

  /// Neighbors of `id` with multiplicities in ascending id order.
  Neighborhood neighborhood(NodeId id) const {
    require(id);
    return Neighborhood(adj_[id].begin(), adj_[id].end());
  }

  long degree(NodeId id) const {
    require(id);
    long d = 0;
    for (const auto& [_, m] : adj_[id]) d += m;
    return d;
  }

  /// All edges with u < v, ordered by (u, v).
  std::vector<Edge> edges() const {
    std::vector<Edge> out;
    for (NodeId u = 1; u <= node_count(); ++u) {
      for (auto it = adj_[u].upper_bound(u); it != adj_[u].end(); ++it) out.push_back({u, it->first, it->second});
    }
    return out;
  }

  long total_multiplicity() const {
    long total = 0;
    for (const auto& e : edges()) total += e.multiplicity;
    return total;
  }

  friend bool operator==(const MultiGraph& a, const MultiGraph& b) { return a.adj_ == b.adj_; }

 private:
  void require(NodeId id) const {
    if (!contains(id)) throw UnknownNode(id);
  }

  void check_pair(NodeId u, NodeId v) const {
    require(u);
    require(v);
    if (u == v) throw GraphError("self-loop at node " + std::to_string(u));
  }

  std::vector<std::map<NodeId, long>> adj_;
};

/// Free-function form of MultiGraph::neighborhood.
inline Neighborhood neighborhood(const MultiGraph& graph, NodeId id) { return graph.neighborhood(id); }

/// Text format: `n <count>` then one `u v m` line per edge, u < v, ascending.
inline void write_graph(std::ostream& out, const MultiGraph& graph) {
  out << "n " << graph.node_count() << '\n';
  for (const auto& e : graph.edges()) out << e.u << ' ' << e.v << ' ' << e.multiplicity << '\n';
}

inline std::string graph_to_string(const MultiGraph& graph) {
  std::ostringstream out;
  write_graph(out, graph);
  return out.str();
}

inline MultiGraph read_graph(std::istream& in) {
  std::string line;
  int line_no = 0;
  auto fail = [&](const std::string& why) {
    throw GraphError("graph file line " + std::to_string(line_no) + ": " + why);
  };
  if (!std::getline(in, line)) throw GraphError("graph file is empty");
  ++line_no;
  std::istringstream header(line);
  std::string tag;
  long n = 0;
  if (!(header >> tag >> n) || tag != "n" || n < 1) fail("expected 'n <count>'");
  MultiGraph graph(static_cast<int>(n));
  std::pair<long, long> previous{0, 0};
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') fail("CRLF line endings are not accepted");
    if (line.empty()) continue;
    std::istringstream row(line);
    long u = 0, v = 0, m = 0;
    std::string rest;
    if (!(row >> u >> v >> m) || (row >> rest)) fail("expected 'u v m'");
    if (u >= v) fail("edges must be written with u < v");
    if (m < 1) fail("multiplicity must be at least 1");
    if (u < 1 || v > n) fail("node id out of range");
    if (std::pair{u, v} <= previous) fail("edges must be strictly ascending");
    previous = {u, v};
    graph.add_edge(static_cast<NodeId>(u), static_cast<NodeId>(v), m);
  }
  return graph;
}

inline MultiGraph graph_from_string(const std::string& text) {
  std::istringstream in(text);
  return read_graph(in);
}

}  // namespace sketchlb
