#pragma once

#include <algorithm>
#include <limits>
#include <numeric>
#include <vector>

#include "errors.hpp"
#include "multigraph.hpp"

namespace sketchlb {

struct CutResult {
  long value = 0;
  std::vector<NodeId> side;  // sorted, nonempty, proper
};

/// Total multiplicity of edges with exactly one endpoint in `side`.
inline long crossing_value(const MultiGraph& graph, const std::vector<NodeId>& side) {
  std::vector<char> in(static_cast<std::size_t>(graph.node_count()) + 1, 0);
  for (NodeId v : side) in.at(static_cast<std::size_t>(v)) = 1;
  long total = 0;
  for (const auto& e : graph.edges()) {
    if (in[static_cast<std::size_t>(e.u)] != in[static_cast<std::size_t>(e.v)]) total += e.multiplicity;
  }
  return total;
}

/// Connected components as sorted id lists, ordered by smallest member.
inline std::vector<std::vector<NodeId>> connected_components(const MultiGraph& graph) {
  const int n = graph.node_count();
  std::vector<int> comp(static_cast<std::size_t>(n) + 1, -1);
  std::vector<std::vector<NodeId>> out;
  for (NodeId s = 1; s <= n; ++s) {
    if (comp[static_cast<std::size_t>(s)] >= 0) continue;
    const int c = static_cast<int>(out.size());
    out.emplace_back();
    std::vector<NodeId> stack{s};
    comp[static_cast<std::size_t>(s)] = c;
    while (!stack.empty()) {
      NodeId u = stack.back();
      stack.pop_back();
      out.back().push_back(u);
      for (const auto& [v, _] : graph.neighborhood(u)) {
        if (comp[static_cast<std::size_t>(v)] < 0) {
          comp[static_cast<std::size_t>(v)] = c;
          stack.push_back(v);
        }
      }
    }
    std::sort(out.back().begin(), out.back().end());
  }
  return out;
}

/// Exact global minimum cut (Stoer-Wagner on integer weights). A disconnected
/// graph yields value 0 with the component of node 1 as the side.
inline CutResult global_min_cut(const MultiGraph& graph) {
  const int n = graph.node_count();
  if (n < 2) throw TooSmall();

  auto components = connected_components(graph);
  if (components.size() > 1) return CutResult{0, components.front()};

  const auto N = static_cast<std::size_t>(n);
  std::vector<long> weight(N * N, 0);
  for (const auto& e : graph.edges()) {
    const auto u = static_cast<std::size_t>(e.u - 1), v = static_cast<std::size_t>(e.v - 1);
    weight[u * N + v] = weight[v * N + u] = e.multiplicity;
  }
  // members[i] lists the original nodes merged into super-node i.
  std::vector<std::vector<NodeId>> members(N);
  for (std::size_t i = 0; i < N; ++i) members[i] = {static_cast<NodeId>(i + 1)};
  std::vector<std::size_t> alive(N);
  std::iota(alive.begin(), alive.end(), 0);

  CutResult best{std::numeric_limits<long>::max(), {}};
  std::vector<long> key(N);
  std::vector<char> added(N);
  while (alive.size() > 1) {
    std::fill(key.begin(), key.end(), 0);
    std::fill(added.begin(), added.end(), 0);
    std::size_t prev = alive.front(), last = alive.front();
    for (std::size_t step = 0; step < alive.size(); ++step) {
      std::size_t pick = N;
      for (std::size_t v : alive) {
        if (!added[v] && (pick == N || key[v] > key[pick])) pick = v;
      }
      added[pick] = 1;
      prev = last;
      last = pick;
      if (step + 1 == alive.size()) {
        if (key[pick] < best.value) best = CutResult{key[pick], members[pick]};
      }
      for (std::size_t v : alive) {
        if (!added[v]) key[v] += weight[pick * N + v];
      }
    }
    // Merge `last` into `prev`.
    for (std::size_t v : alive) {
      weight[prev * N + v] += weight[last * N + v];
      weight[v * N + prev] = weight[prev * N + v];
    }
    weight[prev * N + prev] = 0;
    members[prev].insert(members[prev].end(), members[last].begin(), members[last].end());
    alive.erase(std::find(alive.begin(), alive.end(), last));
  }
  std::sort(best.side.begin(), best.side.end());
  return best;
}

inline bool is_k_edge_connected(const MultiGraph& graph, long k) {
  if (k < 1) throw Error("k must be positive");
  return global_min_cut(graph).value >= k;
}

}  // namespace sketchlb
