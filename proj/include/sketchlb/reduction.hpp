#pragma once

// Three-party simulation of a sketching protocol on the lower-bound family:
// Alice runs the A*-nodes, Bob the B*-nodes, and Charlie everything else,
// using witness messages fixed in advance for the good V-nodes.

#include <map>
#include <string>
#include <vector>

#include "errors.hpp"
#include "json.hpp"
#include "lbgraph.hpp"
#include "overlap.hpp"
#include "setfam.hpp"

namespace sketchlb {

inline int reduction_n(int m) { return 2 * ceil_div(4 * m, 3); }

enum class FamilyMode { Auto, Sampled, Complete };

struct ReductionOptions {
  FamilyMode family_mode = FamilyMode::Auto;
  double epsilon = 0.8;
  std::size_t family_target = 40;
  std::size_t max_attempts = 20000;
  std::size_t trials = 32;
  unsigned threads = 1;
};

struct ReductionContext {
  int m = 0;
  int s = 0;
  int k = 0;
  int n = 0;
  double gamma = 0.5;
  PartitionContext partition;         // A*, B*, family and the good-node records
  std::vector<NodeId> good_nodes;     // coordinate i <-> good_nodes[i - 1]
  std::string family_source = "sampled";
  bool forced = false;                // records were not produced by choose_partition

  const IdSet& a() const { return partition.a; }
  const IdSet& b() const { return partition.b; }
  NodeId node_of(int i) const { return good_nodes.at(static_cast<std::size_t>(i - 1)); }
  const SeparatedPairRecord& record(int i) const { return partition.good.at(node_of(i)); }
};

namespace detail {

inline void check_reduction_params(const SketchProtocol& protocol, int m, int s, int k) {
  const int n = reduction_n(m);
  if (protocol.params().n != n || protocol.params().k != k)
    throw Error("protocol must be configured for n = " + std::to_string(n) + " and k = " + std::to_string(k));
  if (s < 1 || s > ceil_div(m, 2)) throw InvalidInstance("s-range", "need 1 <= s <= ceil(m/2)");
  if (Layout::of(n).w_count < 2 * k) throw Error("|W| = floor(sqrt n) must be at least 2k");
}

}  // namespace detail

/// Runs the partition search and keeps the first m good nodes by id.
inline ReductionContext build_context(const SketchProtocol& protocol, int m, int s, int k, std::uint64_t seed,
                                     const ReductionOptions& options = {}) {
  if (!protocol.deterministic()) throw DeterminismRequired(protocol.name());
  detail::check_reduction_params(protocol, m, s, k);
  ReductionContext ctx;
  ctx.m = m;
  ctx.s = s;
  ctx.k = k;
  ctx.n = reduction_n(m);
  const IdSet w = Layout::of(ctx.n).w_ids();
  const int d = 2 * k - 1;
  SetFamily family;
  if (options.family_mode == FamilyMode::Complete) {
    family = complete_family(w, d, options.epsilon);
    ctx.family_source = "complete";
  } else {
    try {
      family = sample_family(w, d, options.epsilon, options.family_target, seed, options.max_attempts);
    } catch (const FamilyTooSparse&) {
      if (options.family_mode == FamilyMode::Sampled) throw;
      family = complete_family(w, d, options.epsilon);
      ctx.family_source = "complete";
    }
  }
  try {
    ctx.partition = choose_partition(protocol, family, k, options.trials, seed, options.threads);
  } catch (const NoGoodPartition&) {
    throw NotEnoughGoodNodes(0, static_cast<std::size_t>(m));
  }
  if (ctx.partition.good.size() < static_cast<std::size_t>(m))
    throw NotEnoughGoodNodes(ctx.partition.good.size(), static_cast<std::size_t>(m));
  for (const auto& [node, r] : ctx.partition.good) {
    if (ctx.good_nodes.size() == static_cast<std::size_t>(m)) break;
    ctx.good_nodes.push_back(node);
  }
  return ctx;
}

/// Context with caller-chosen pairs for V-nodes 1..m, witnesses taken from
/// S0. Used to push protocols with no indistinguishable pairs through the
/// pipeline; such contexts are flagged and fidelity is not expected.
inline ReductionContext force_context(const SketchProtocol& protocol, int m, int s, int k, const IdSet& a,
                                      const IdSet& b, const std::vector<std::pair<IdSet, IdSet>>& pairs) {
  detail::check_reduction_params(protocol, m, s, k);
  if (pairs.size() != static_cast<std::size_t>(m)) throw Error("need one pair per coordinate");
  ReductionContext ctx;
  ctx.m = m;
  ctx.s = s;
  ctx.k = k;
  ctx.n = reduction_n(m);
  ctx.forced = true;
  ctx.family_source = "forced";
  ctx.partition.a = a;
  ctx.partition.b = b;
  ctx.partition.n = ctx.n;
  ctx.partition.k = k;
  const Params params{ctx.n, k};
  const auto none = SharedRandomness::none();
  std::set<IdSet> members;
  for (int i = 1; i <= m; ++i) {
    const auto& [s0, s1] = pairs[static_cast<std::size_t>(i - 1)];
    members.insert(s0);
    members.insert(s1);
    SeparatedPairRecord r{i, s0, s1,
                          {protocol.encode(sigma_view(i, s0, params), none),
                           protocol.encode(a_restricted_view(i, sorted_intersection(s0, a), params), none),
                           protocol.encode(b_restricted_view(i, sorted_intersection(s0, b), params), none)}};
    ctx.partition.good.emplace(i, std::move(r));
    ctx.good_nodes.push_back(i);
  }
  ctx.partition.family = SetFamily{Layout::of(ctx.n).w_ids(), 2 * k - 1, 0.8, {members.begin(), members.end()}};
  return ctx;
}

namespace detail {

/// W-part of coordinate i's neighborhood on one side, per the compatibility rules.
inline IdSet side_neighbors(const ReductionContext& ctx, int i, int value, bool alice) {
  const auto& r = ctx.record(i);
  // Alice: 0 -> S1, 1 -> S0. Bob: 0 -> S0, 1 -> S1.
  const bool use_s1 = alice ? value == 0 : value == 1;
  return sorted_intersection(use_s1 ? r.s1 : r.s0, alice ? ctx.a() : ctx.b());
}

inline std::vector<NodeMessage> side_messages(const TernaryVector& v, const ReductionContext& ctx,
                                              const SketchProtocol& protocol, bool alice) {
  const Layout layout = Layout::of(ctx.n);
  const IdSet& side = alice ? ctx.a() : ctx.b();
  const NodeId hub = alice ? layout.u_a() : layout.u_b();
  if (v.length() != ctx.m) throw InvalidInstance("length", "vector length must be m");
  MultiGraph local(ctx.n);
  for (std::size_t x = 0; x < side.size(); ++x) {
    local.add_edge(hub, side[x]);
    for (std::size_t y = x + 1; y < side.size(); ++y) local.add_edge(side[x], side[y]);
  }
  for (int i : v.support())
    for (NodeId w : side_neighbors(ctx, i, v[i], alice)) local.add_edge(ctx.node_of(i), w);
  std::vector<NodeMessage> out;
  for (NodeId w : side)
    out.push_back({w, checked_encode(protocol, NodeView{w, local.neighborhood(w), Advice::None, {ctx.n, ctx.k}},
                                     SharedRandomness::none())});
  return out;
}

}  // namespace detail

inline std::vector<NodeMessage> alice_messages(const TernaryVector& x, const ReductionContext& ctx,
                                               const SketchProtocol& protocol) {
  return detail::side_messages(x, ctx, protocol, true);
}

inline std::vector<NodeMessage> bob_messages(const TernaryVector& y, const ReductionContext& ctx,
                                             const SketchProtocol& protocol) {
  return detail::side_messages(y, ctx, protocol, false);
}

/// Charlie's own messages: u_A, u_B and every V-node. Reads only supports.
inline std::vector<NodeMessage> charlie_messages(const Support& supp_x, const Support& supp_y, const ReductionContext& ctx,
                                                 const SketchProtocol& protocol) {
  const int sigma = shared_index(supp_x, supp_y);
  const Layout layout = Layout::of(ctx.n);
  const Params params{ctx.n, ctx.k};
  const auto none = SharedRandomness::none();
  std::map<NodeId, int> coordinate;
  for (int i = 1; i <= ctx.m; ++i) coordinate.emplace(ctx.node_of(i), i);
  const auto in = [](const Support& s, int i) { return std::binary_search(s.begin(), s.end(), i); };

  std::vector<NodeMessage> out;
  Neighborhood hub_a, hub_b;
  for (NodeId w : ctx.a()) hub_a.emplace_back(w, 1);
  for (NodeId w : ctx.b()) hub_b.emplace_back(w, 1);
  for (NodeId v = 1; v <= layout.v_count; ++v) {
    const auto it = coordinate.find(v);
    BitString msg;
    bool on_b = false;
    if (it == coordinate.end()) {
      msg = checked_encode(protocol, a_restricted_view(v, {}, params), none);
    } else {
      const int i = it->second;
      const auto& r = ctx.record(i);
      if (i == sigma) {
        msg = r.witness.sigma;
      } else if (in(supp_x, i)) {
        msg = r.witness.a;
      } else if (in(supp_y, i)) {
        msg = r.witness.b;
        on_b = true;
      } else {
        msg = checked_encode(protocol, a_restricted_view(v, {}, params), none);
      }
    }
    (on_b ? hub_b : hub_a).emplace_back(v, ctx.k);
    out.push_back({v, std::move(msg)});
  }
  std::sort(hub_a.begin(), hub_a.end());
  std::sort(hub_b.begin(), hub_b.end());
  out.push_back({layout.u_a(), checked_encode(protocol, NodeView{layout.u_a(), hub_a, Advice::None, params}, none)});
  out.push_back({layout.u_b(), checked_encode(protocol, NodeView{layout.u_b(), hub_b, Advice::None, params}, none)});
  return out;
}

inline std::vector<NodeMessage> assemble_messages(std::vector<NodeMessage> alice, const std::vector<NodeMessage>& bob,
                                                  const std::vector<NodeMessage>& charlie) {
  alice.insert(alice.end(), bob.begin(), bob.end());
  alice.insert(alice.end(), charlie.begin(), charlie.end());
  sort_messages(alice);
  return alice;
}

inline Answer charlie_decide(const Support& supp_x, const Support& supp_y, const std::vector<NodeMessage>& msgs_a,
                             const std::vector<NodeMessage>& msgs_b, const ReductionContext& ctx,
                             const SketchProtocol& protocol) {
  const auto all = assemble_messages(msgs_a, msgs_b, charlie_messages(supp_x, supp_y, ctx, protocol));
  return protocol.decode(all, SharedRandomness::none()) == Decision::Connected ? Answer::Yes : Answer::No;
}

/// The member of the family determined by the instance (rules 1-6).
inline LBGraphSpec compatible_spec(const OverlapInstance& inst, const ReductionContext& ctx) {
  if (inst.m != ctx.m || inst.s != ctx.s) throw Error("instance and context disagree on (m, s)");
  const Layout layout = Layout::of(ctx.n);
  LBGraphSpec spec;
  spec.n = ctx.n;
  spec.k = ctx.k;
  spec.gamma = ctx.gamma;
  spec.a = ctx.a();
  spec.b = ctx.b();
  spec.roles.assign(static_cast<std::size_t>(layout.v_count), Advice::ARestricted);
  spec.w_neighbors.assign(static_cast<std::size_t>(layout.v_count), {});
  for (int i = 1; i <= ctx.m; ++i) {
    const auto idx = static_cast<std::size_t>(ctx.node_of(i) - 1);
    IdSet nbrs;
    if (inst.x.defined(i)) {
      const auto part = detail::side_neighbors(ctx, i, inst.x[i], true);
      nbrs.insert(nbrs.end(), part.begin(), part.end());
    }
    if (inst.y.defined(i)) {
      const auto part = detail::side_neighbors(ctx, i, inst.y[i], false);
      nbrs.insert(nbrs.end(), part.begin(), part.end());
    }
    std::sort(nbrs.begin(), nbrs.end());
    spec.w_neighbors[idx] = nbrs;
    if (i == inst.sigma) {
      spec.roles[idx] = Advice::Sigma;
      spec.sigma = ctx.node_of(i);
    } else if (inst.y.defined(i)) {
      spec.roles[idx] = Advice::BRestricted;
    }
  }
  return spec;
}

inline LBGraph build_compatible_graph(const OverlapInstance& inst, const ReductionContext& ctx) {
  return build_lb_graph(compatible_spec(inst, ctx));
}

struct SimulationRun {
  std::vector<NodeMessage> alice, bob, charlie, assembled;
  Decision decision = Decision::NotConnected;
  Answer output = Answer::No;
  std::size_t alice_bits = 0;
  std::size_t bob_bits = 0;
};

inline SimulationRun simulate(const OverlapInstance& inst, const ReductionContext& ctx, const SketchProtocol& protocol) {
  SimulationRun run;
  run.alice = alice_messages(inst.x, ctx, protocol);
  run.bob = bob_messages(inst.y, ctx, protocol);
  run.charlie = charlie_messages(inst.x.support(), inst.y.support(), ctx, protocol);
  run.assembled = assemble_messages(run.alice, run.bob, run.charlie);
  run.decision = protocol.decode(run.assembled, SharedRandomness::none());
  run.output = run.decision == Decision::Connected ? Answer::Yes : Answer::No;
  for (const auto& msg : run.alice) run.alice_bits += msg.bits.size();
  for (const auto& msg : run.bob) run.bob_bits += msg.bits.size();
  return run;
}

struct FidelityReport {
  bool identical = false;
  std::vector<NodeId> differing;  // ids whose simulated message differs
};

inline FidelityReport verify_fidelity(const OverlapInstance& inst, const ReductionContext& ctx,
                                      const SketchProtocol& protocol) {
  if (!protocol.deterministic()) throw DeterminismRequired(protocol.name());
  const auto sim = simulate(inst, ctx, protocol);
  const auto compat = build_compatible_graph(inst, ctx);
  const auto direct = execute(protocol, compat.graph, compat.advice, SharedRandomness::none());
  FidelityReport report;
  if (sim.assembled.size() != direct.messages.size()) throw Error("simulation produced the wrong number of messages");
  for (std::size_t i = 0; i < direct.messages.size(); ++i)
    if (!(sim.assembled[i] == direct.messages[i])) report.differing.push_back(direct.messages[i].id);
  report.identical = report.differing.empty();
  return report;
}

/// Alice + Bob bits against |A* cup B*| * L and floor(sqrt n) * L.
struct CommunicationCheck {
  std::size_t measured = 0;
  std::size_t product = 0;  // |A* cup B*| * max_bits
  std::size_t ceiling = 0;  // floor(sqrt n) * max_bits
  bool exact() const { return measured == product && measured <= ceiling; }
};

inline CommunicationCheck communication_check(const SimulationRun& run, const ReductionContext& ctx,
                                              const SketchProtocol& protocol) {
  const std::size_t parties = ctx.a().size() + ctx.b().size();
  return {run.alice_bits + run.bob_bits, parties * protocol.max_bits(),
          static_cast<std::size_t>(Layout::of(ctx.n).w_count) * protocol.max_bits()};
}

inline nlohmann::json reduction_to_json(const ReductionContext& ctx) {
  return {{"m", ctx.m},
          {"s", ctx.s},
          {"k", ctx.k},
          {"n", ctx.n},
          {"gamma", ctx.gamma},
          {"good_nodes", ctx.good_nodes},
          {"family_source", ctx.family_source},
          {"forced", ctx.forced},
          {"partition", context_to_json(ctx.partition)}};
}

inline ReductionContext reduction_from_json(const nlohmann::json& j) {
  ReductionContext ctx;
  ctx.m = j.at("m").get<int>();
  ctx.s = j.at("s").get<int>();
  ctx.k = j.at("k").get<int>();
  ctx.n = j.at("n").get<int>();
  ctx.gamma = j.value("gamma", 0.5);
  ctx.good_nodes = j.at("good_nodes").get<std::vector<NodeId>>();
  ctx.family_source = j.value("family_source", std::string("sampled"));
  ctx.forced = j.value("forced", false);
  ctx.partition = context_from_json(j.at("partition"));
  if (ctx.n != reduction_n(ctx.m)) throw Error("context n does not match m");
  return ctx;
}

}  // namespace sketchlb
