#pragma once

#include <algorithm>
#include <cmath>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "combinatorics.hpp"
#include "errors.hpp"
#include "json.hpp"
#include "layout.hpp"
#include "mincut.hpp"
#include "model.hpp"

namespace sketchlb {

enum class Condition { C0, C1 };

inline const char* to_string(Condition c) { return c == Condition::C0 ? "C0" : "C1"; }

/// Symbolic description of one member of the lower-bound family: which W-ids
/// form A and B, the determining node sigma, each V-node's role and its
/// W-neighborhood. All id lists are sorted.
struct LBGraphSpec {
  int n = 0;
  int k = 0;
  double gamma = 0.5;
  NodeId sigma = 0;
  std::vector<NodeId> a;
  std::vector<NodeId> b;
  std::vector<Advice> roles;                     // index id - 1, over V
  std::vector<std::vector<NodeId>> w_neighbors;  // index id - 1, over V

  Layout layout() const { return Layout::of(n); }
  const std::vector<NodeId>& sigma_neighbors() const { return w_neighbors.at(static_cast<std::size_t>(sigma - 1)); }
};

struct LBGraph {
  MultiGraph graph;
  AdviceMap advice;
};

// Views a V-node has in a lower-bound graph for each role, given its
// W-neighborhood. These match neighborhood() on the built graph exactly.

inline NodeView role_view(NodeId id, Advice role, const std::vector<NodeId>& w_neighborhood, Params params) {
  const Layout layout = Layout::of(params.n);
  NodeView view{id, {}, role, params};
  for (NodeId w : w_neighborhood) view.neighbors.emplace_back(w, 1);
  const NodeId hub = role == Advice::BRestricted ? layout.u_b() : layout.u_a();
  view.neighbors.emplace_back(hub, params.k);
  return view;
}

inline NodeView sigma_view(NodeId id, const std::vector<NodeId>& s, Params params) {
  return role_view(id, Advice::Sigma, s, params);
}
inline NodeView a_restricted_view(NodeId id, const std::vector<NodeId>& t, Params params) {
  return role_view(id, Advice::ARestricted, t, params);
}
inline NodeView b_restricted_view(NodeId id, const std::vector<NodeId>& t, Params params) {
  return role_view(id, Advice::BRestricted, t, params);
}

namespace detail {

inline bool sorted_unique(const std::vector<NodeId>& ids) {
  return std::adjacent_find(ids.begin(), ids.end(), [](NodeId x, NodeId y) { return x >= y; }) == ids.end();
}

inline bool subset_of(const std::vector<NodeId>& small, const std::vector<NodeId>& big) {
  return std::includes(big.begin(), big.end(), small.begin(), small.end());
}

}  // namespace detail

inline Condition condition_of(const LBGraphSpec& spec) {
  const auto in_b = intersection_size(spec.sigma_neighbors(), spec.b);
  return in_b >= static_cast<std::size_t>(spec.k) ? Condition::C1 : Condition::C0;
}

/// Throws SpecError naming the first violated rule.
inline void validate(const LBGraphSpec& spec) {
  const Layout layout = spec.layout();
  if (!layout.valid()) throw SpecError("sizes", "n = " + std::to_string(spec.n) + " leaves no room for V and W");
  const auto v_count = static_cast<std::size_t>(layout.v_count);
  if (spec.roles.size() != v_count || spec.w_neighbors.size() != v_count)
    throw SpecError("sizes", "roles and W-neighborhoods must cover |V| = " + std::to_string(v_count) + " nodes");
  if (spec.k < 2 || spec.k > spec.gamma * std::sqrt(static_cast<double>(spec.n)) + 1e-9)
    throw SpecError("k-range", "need 2 <= k <= gamma * sqrt(n)");

  if (!detail::sorted_unique(spec.a) || !detail::sorted_unique(spec.b))
    throw SpecError("partition", "A and B must be sorted id lists without repeats");
  std::vector<NodeId> all;
  std::merge(spec.a.begin(), spec.a.end(), spec.b.begin(), spec.b.end(), std::back_inserter(all));
  if (all != layout.w_ids()) throw SpecError("partition", "A and B must partition W");
  if (spec.a.size() < static_cast<std::size_t>(spec.k) || spec.b.size() < static_cast<std::size_t>(spec.k))
    throw SpecError("partition", "|A| and |B| must each be at least k");

  if (!layout.in_v(spec.sigma)) throw SpecError("roles", "sigma must be a V-node");
  for (NodeId id = 1; id <= layout.v_count; ++id) {
    const auto i = static_cast<std::size_t>(id - 1);
    const Advice role = spec.roles[i];
    const auto& nbrs = spec.w_neighbors[i];
    if ((role == Advice::Sigma) != (id == spec.sigma))
      throw SpecError("roles", "node " + std::to_string(id) + " has the wrong sigma role");
    if (role == Advice::None) throw SpecError("roles", "node " + std::to_string(id) + " has no role");
    if (!detail::sorted_unique(nbrs))
      throw SpecError("sizes", "W-neighborhood of node " + std::to_string(id) + " must be sorted without repeats");
    switch (role) {
      case Advice::ARestricted:
        if (!detail::subset_of(nbrs, spec.a))
          throw SpecError("E3", "A-restricted node " + std::to_string(id) + " has neighbors outside A");
        break;
      case Advice::BRestricted:
        if (nbrs.empty() || !detail::subset_of(nbrs, spec.b))
          throw SpecError("E4", "B-restricted node " + std::to_string(id) + " needs a nonempty neighborhood inside B");
        break;
      case Advice::Sigma:
        if (nbrs.size() != static_cast<std::size_t>(2 * spec.k - 1) || !detail::subset_of(nbrs, layout.w_ids()))
          throw SpecError("E5", "sigma needs exactly 2k-1 neighbors in W");
        break;
      case Advice::None: break;
    }
  }
  const auto in_a = intersection_size(spec.sigma_neighbors(), spec.a);
  const auto in_b = intersection_size(spec.sigma_neighbors(), spec.b);
  const auto k = static_cast<std::size_t>(spec.k);
  const bool c0 = in_a >= k && in_b <= k - 1;
  const bool c1 = in_a <= k - 1 && in_b >= k;
  if (c0 == c1) throw SpecError("C0/C1", "exactly one of C0 and C1 must hold");
}

/// Builds the multigraph (rules E1-E5) and the role advice.
inline LBGraph build_lb_graph(const LBGraphSpec& spec) {
  validate(spec);
  const Layout layout = spec.layout();
  LBGraph out{MultiGraph(spec.n), AdviceMap(static_cast<std::size_t>(spec.n), Advice::None)};
  auto& g = out.graph;
  for (const auto* side : {&spec.a, &spec.b}) {
    for (std::size_t i = 0; i < side->size(); ++i)
      for (std::size_t j = i + 1; j < side->size(); ++j) g.add_edge((*side)[i], (*side)[j]);
  }
  for (NodeId w : spec.a) g.add_edge(layout.u_a(), w);
  for (NodeId w : spec.b) g.add_edge(layout.u_b(), w);
  for (NodeId id = 1; id <= layout.v_count; ++id) {
    const auto i = static_cast<std::size_t>(id - 1);
    const Advice role = spec.roles[i];
    out.advice[i] = role;
    g.add_edge(id, role == Advice::BRestricted ? layout.u_b() : layout.u_a(), spec.k);
    for (NodeId w : spec.w_neighbors[i]) g.add_edge(id, w);
  }
  return out;
}

struct LemmaCheck {
  bool holds = false;
  Condition condition = Condition::C0;
  CutResult cut;
};

/// Compares oracle k-edge connectivity of the built graph with (condition == C1).
inline LemmaCheck check_lemma_lb(const LBGraphSpec& spec) {
  const LBGraph built = build_lb_graph(spec);
  LemmaCheck out;
  out.condition = condition_of(spec);
  out.cut = global_min_cut(built.graph);
  out.holds = (out.cut.value >= spec.k) == (out.condition == Condition::C1);
  return out;
}

inline bool verify_lemma_lb(const LBGraphSpec& spec) { return check_lemma_lb(spec).holds; }

/// Uniform partition of W conditioned on both sides having at least k ids.
template <typename Rng>
std::pair<std::vector<NodeId>, std::vector<NodeId>> random_partition(const std::vector<NodeId>& w, int k, Rng& rng) {
  if (w.size() < 2 * static_cast<std::size_t>(k)) throw Error("W is too small to give both sides k ids");
  std::bernoulli_distribution coin(0.5);
  while (true) {
    std::vector<NodeId> a, b;
    for (NodeId id : w) (coin(rng) ? a : b).push_back(id);
    if (a.size() >= static_cast<std::size_t>(k) && b.size() >= static_cast<std::size_t>(k)) return {a, b};
  }
}

/// Canonical split: the first ceil(|W|/2) ids of W form A.
inline std::pair<std::vector<NodeId>, std::vector<NodeId>> canonical_partition(const Layout& layout) {
  auto w = layout.w_ids();
  const auto half = (w.size() + 1) / 2;
  return {std::vector<NodeId>(w.begin(), w.begin() + static_cast<long>(half)),
          std::vector<NodeId>(w.begin() + static_cast<long>(half), w.end())};
}

/// Random member of the family with the given partition: roles are fair
/// coins, A-restricted nodes take a random (possibly empty) subset of A,
/// B-restricted nodes a random nonempty subset of B, sigma a random
/// (2k-1)-subset of W.
template <typename Rng>
LBGraphSpec random_spec(int n, int k, const std::vector<NodeId>& a, const std::vector<NodeId>& b, Rng& rng) {
  LBGraphSpec spec;
  spec.n = n;
  spec.k = k;
  spec.a = a;
  spec.b = b;
  const Layout layout = spec.layout();
  if (!layout.valid()) throw SpecError("sizes", "n too small");
  std::uniform_int_distribution<NodeId> pick_sigma(1, layout.v_count);
  spec.sigma = pick_sigma(rng);
  std::bernoulli_distribution coin(0.5);
  for (NodeId id = 1; id <= layout.v_count; ++id) {
    std::vector<NodeId> nbrs;
    Advice role;
    if (id == spec.sigma) {
      role = Advice::Sigma;
      nbrs = random_subset(layout.w_ids(), static_cast<std::size_t>(2 * k - 1), rng);
    } else if (coin(rng)) {
      role = Advice::ARestricted;
      for (NodeId w : a)
        if (coin(rng)) nbrs.push_back(w);
    } else {
      role = Advice::BRestricted;
      std::uniform_int_distribution<std::size_t> size_dist(1, b.size());
      nbrs = random_subset(b, size_dist(rng), rng);
    }
    spec.roles.push_back(role);
    spec.w_neighbors.push_back(std::move(nbrs));
  }
  return spec;
}

template <typename Rng>
LBGraphSpec random_spec(int n, int k, Rng& rng) {
  const auto [a, b] = random_partition(Layout::of(n).w_ids(), k, rng);
  return random_spec(n, k, a, b, rng);
}

/// Every partition of W with both sides >= k, times every (2k-1)-subset of W
/// as sigma's neighborhood. The rest of each spec is drawn from `seed`, one
/// draw per partition. Needs |W| <= 20.
template <typename Fn>
std::size_t for_each_exhaustive_spec(int n, int k, std::uint64_t seed, Fn&& fn) {
  const auto w = Layout::of(n).w_ids();
  if (w.size() > 20) throw Error("exhaustive sweep needs |W| <= 20");
  std::mt19937_64 rng(seed);
  std::size_t count = 0;
  for (std::uint32_t mask = 0; mask < (1U << w.size()); ++mask) {
    std::vector<NodeId> a, b;
    for (std::size_t i = 0; i < w.size(); ++i) ((mask >> i) & 1U ? a : b).push_back(w[i]);
    if (a.size() < static_cast<std::size_t>(k) || b.size() < static_cast<std::size_t>(k)) continue;
    auto spec = random_spec(n, k, a, b, rng);
    for_each_combination(w, static_cast<std::size_t>(2 * k - 1), [&](const std::vector<NodeId>& s) {
      spec.w_neighbors[static_cast<std::size_t>(spec.sigma - 1)] = s;
      fn(std::as_const(spec));
      ++count;
    });
  }
  return count;
}

template <typename Fn>
std::size_t for_each_random_spec(int n, int k, std::size_t count, std::uint64_t seed, Fn&& fn) {
  std::mt19937_64 rng(seed);
  for (std::size_t i = 0; i < count; ++i) {
    const LBGraphSpec spec = random_spec(n, k, rng);
    fn(spec);
  }
  return count;
}

// JSON with explicit id lists.

inline nlohmann::json spec_to_json(const LBGraphSpec& spec) {
  nlohmann::json roles = nlohmann::json::array();
  for (Advice r : spec.roles) roles.push_back(to_string(r));
  return {{"n", spec.n},          {"k", spec.k}, {"gamma", spec.gamma}, {"sigma", spec.sigma},
          {"A", spec.a},          {"B", spec.b}, {"roles", roles},      {"w_neighbors", spec.w_neighbors}};
}

inline Advice advice_from_string(const std::string& s) {
  for (Advice a : {Advice::None, Advice::Sigma, Advice::ARestricted, Advice::BRestricted})
    if (s == to_string(a)) return a;
  throw Error("unknown role '" + s + "'");
}

inline LBGraphSpec spec_from_json(const nlohmann::json& j) {
  LBGraphSpec spec;
  spec.n = j.at("n").get<int>();
  spec.k = j.at("k").get<int>();
  spec.gamma = j.value("gamma", 0.5);
  spec.sigma = j.at("sigma").get<NodeId>();
  spec.a = j.at("A").get<std::vector<NodeId>>();
  spec.b = j.at("B").get<std::vector<NodeId>>();
  for (const auto& r : j.at("roles")) spec.roles.push_back(advice_from_string(r.get<std::string>()));
  spec.w_neighbors = j.at("w_neighbors").get<std::vector<std::vector<NodeId>>>();
  return spec;
}

}  // namespace sketchlb
