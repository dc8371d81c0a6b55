#pragma once

// Bounded-intersection set families and the message-partition machinery that
// extracts indistinguishable separated pairs from a deterministic protocol.

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <tuple>
#include <vector>

#include "combinatorics.hpp"
#include "errors.hpp"
#include "json.hpp"
#include "lbgraph.hpp"
#include "model.hpp"
#include "parallel.hpp"

namespace sketchlb {

using IdSet = std::vector<NodeId>;  // sorted, no repeats

struct SetFamily {
  IdSet ground;
  int d = 0;
  double epsilon = 0.8;
  std::vector<IdSet> members;  // sorted lexicographically

  std::size_t overlap_bound() const { return static_cast<std::size_t>(std::floor(epsilon * d / 2.0 + 1e-9)); }
  std::size_t size() const { return members.size(); }
};

/// Largest pairwise intersection, by checking every pair.
inline std::size_t max_pairwise_overlap(const std::vector<IdSet>& members) {
  std::size_t worst = 0;
  for (std::size_t i = 0; i < members.size(); ++i)
    for (std::size_t j = i + 1; j < members.size(); ++j)
      worst = std::max(worst, intersection_size(members[i], members[j]));
  return worst;
}

/// Exhaustive check of every family invariant.
inline bool family_is_valid(const SetFamily& f) {
  std::set<IdSet> seen;
  for (const auto& s : f.members) {
    if (s.size() != static_cast<std::size_t>(f.d)) return false;
    if (!std::is_sorted(s.begin(), s.end()) || std::adjacent_find(s.begin(), s.end()) != s.end()) return false;
    if (!std::includes(f.ground.begin(), f.ground.end(), s.begin(), s.end())) return false;
    if (!seen.insert(s).second) return false;
  }
  return max_pairwise_overlap(f.members) <= f.overlap_bound();
}

/// Rejection sampler: draws uniform d-subsets of `ground` and keeps those that
/// respect the overlap bound against everything kept so far.
inline SetFamily sample_family(const IdSet& ground, int d, double epsilon, std::size_t target, std::uint64_t seed,
                               std::size_t max_attempts = 100000) {
  if (d < 1 || static_cast<std::size_t>(d) > ground.size()) throw Error("member size must lie in [1, |W|]");
  if (!(epsilon > 0.0 && epsilon < 1.0)) throw Error("epsilon must lie in (0, 1)");
  if (target < 2) throw Error("target family size must be at least 2");
  SetFamily f{ground, d, epsilon, {}};
  std::sort(f.ground.begin(), f.ground.end());
  const std::size_t bound = f.overlap_bound();
  std::mt19937_64 rng(seed);
  for (std::size_t attempt = 0; attempt < max_attempts && f.members.size() < target; ++attempt) {
    IdSet s = random_subset(f.ground, static_cast<std::size_t>(d), rng);
    const bool fits = std::all_of(f.members.begin(), f.members.end(), [&](const IdSet& t) {
      return t != s && intersection_size(s, t) <= bound;
    });
    if (fits) f.members.push_back(std::move(s));
  }
  if (f.members.size() < target) throw FamilyTooSparse(f.members.size(), target);
  std::sort(f.members.begin(), f.members.end());
  if (!family_is_valid(f)) throw Error("sampled family failed its own verification");
  return f;
}

/// Every d-subset of `ground`. Satisfies the overlap bound only when
/// floor(eps * d / 2) >= d - 1; used where a sampled family cannot have two members.
inline SetFamily complete_family(const IdSet& ground, int d, double epsilon) {
  SetFamily f{ground, d, epsilon, combinations(ground, static_cast<std::size_t>(d))};
  std::sort(f.ground.begin(), f.ground.end());
  return f;
}

enum class Keyspace { SigmaNeighborhoods, AProjections, BProjections };

inline const char* to_string(Keyspace k) {
  switch (k) {
    case Keyspace::SigmaNeighborhoods: return "sigma";
    case Keyspace::AProjections: return "A";
    case Keyspace::BProjections: return "B";
  }
  return "?";
}

/// Inputs grouped by the message they produce.
struct MessagePartition {
  Keyspace keyspace = Keyspace::SigmaNeighborhoods;
  std::map<BitString, std::vector<IdSet>> blocks;
  std::map<IdSet, BitString> message_of;

  std::size_t input_count() const { return message_of.size(); }
};

struct MessagePartitions {
  MessagePartition sigma, a, b;
};

inline MessagePartition partition_by_message(const SketchProtocol& protocol, NodeId node, Keyspace keyspace,
                                             const std::set<IdSet>& inputs, Params params) {
  MessagePartition p{keyspace, {}, {}};
  const Advice role = keyspace == Keyspace::SigmaNeighborhoods ? Advice::Sigma
                      : keyspace == Keyspace::AProjections     ? Advice::ARestricted
                                                               : Advice::BRestricted;
  for (const auto& input : inputs) {
    BitString msg = protocol.encode(role_view(node, role, input, params), SharedRandomness::none());
    p.blocks[msg].push_back(input);
    p.message_of.emplace(input, std::move(msg));
  }
  return p;
}

inline MessagePartitions message_partitions(const SketchProtocol& protocol, NodeId node, const SetFamily& family,
                                            const IdSet& a, const IdSet& b, int n, int k) {
  if (!protocol.deterministic()) throw DeterminismRequired(protocol.name());
  std::set<IdSet> full(family.members.begin(), family.members.end()), proj_a, proj_b;
  for (const auto& s : family.members) {
    proj_a.insert(sorted_intersection(s, a));
    proj_b.insert(sorted_intersection(s, b));
  }
  const Params params{n, k};
  return {partition_by_message(protocol, node, Keyspace::SigmaNeighborhoods, full, params),
          partition_by_message(protocol, node, Keyspace::AProjections, proj_a, params),
          partition_by_message(protocol, node, Keyspace::BProjections, proj_b, params)};
}

/// Message triple of a family member: its own sigma message and the messages
/// of its A- and B-projections.
struct MessageTriple {
  BitString sigma, a, b;
  friend auto operator<=>(const MessageTriple&, const MessageTriple&) = default;
  friend bool operator==(const MessageTriple&, const MessageTriple&) = default;
};

struct MemberGroup {
  MessageTriple key;
  std::vector<IdSet> members;  // sorted
};

/// Family members grouped by message triple, largest group first, ties by
/// smallest triple.
inline std::vector<MemberGroup> member_groups(const MessagePartitions& p, const SetFamily& family, const IdSet& a,
                                              const IdSet& b) {
  std::map<MessageTriple, std::vector<IdSet>> groups;
  for (const auto& s : family.members) {
    MessageTriple key{p.sigma.message_of.at(s), p.a.message_of.at(sorted_intersection(s, a)),
                      p.b.message_of.at(sorted_intersection(s, b))};
    groups[key].push_back(s);
  }
  std::vector<MemberGroup> out;
  for (auto& [key, members] : groups) out.push_back({key, std::move(members)});
  std::stable_sort(out.begin(), out.end(),
                   [](const MemberGroup& x, const MemberGroup& y) { return x.members.size() > y.members.size(); });
  return out;
}

inline MemberGroup common_block(const MessagePartitions& p, const SetFamily& family, const IdSet& a, const IdSet& b) {
  auto groups = member_groups(p, family, a, b);
  if (groups.empty()) return {};
  return std::move(groups.front());
}

/// |T| * 2^(3L) >= |S| for messages of exactly L bits.
inline bool pigeonhole_floor_holds(std::size_t common_size, std::size_t family_size, std::size_t message_bits) {
  if (3 * message_bits >= 63) return common_size >= 1 || family_size == 0;
  return (common_size << (3 * message_bits)) >= family_size;
}

/// S0 is C0-shaped (|S0 cap A| >= k) with a nonempty B-part so that its
/// B-projection is a legal B-restricted neighborhood; S1 is C1-shaped.
inline std::optional<std::pair<IdSet, IdSet>> find_separated_pair(const std::vector<IdSet>& t, const IdSet& a,
                                                                  const IdSet& b, int k) {
  std::vector<IdSet> sorted = t;
  std::sort(sorted.begin(), sorted.end());
  const auto uk = static_cast<std::size_t>(k);
  std::optional<IdSet> s0, s1;
  for (const auto& s : sorted) {
    const auto in_a = intersection_size(s, a), in_b = intersection_size(s, b);
    if (!s0 && in_a >= uk && in_b >= 1) s0 = s;
    if (!s1 && in_a + 1 <= uk && in_b >= uk) s1 = s;
  }
  if (!s0 || !s1) return std::nullopt;
  if (sorted_intersection(*s0, a) == sorted_intersection(*s1, a) || sorted_intersection(*s0, b) == sorted_intersection(*s1, b))
    throw Error("separated pair with equal projections");
  return std::pair{*s0, *s1};
}

struct SeparatedPairRecord {
  NodeId node = 0;
  IdSet s0, s1;
  MessageTriple witness;
  friend bool operator==(const SeparatedPairRecord&, const SeparatedPairRecord&) = default;
};

/// Re-encodes from scratch and lists every violated property: "i" (sigma
/// messages), "ii" (A-projections), "iii" (B-projections), "iv" (cut sizes),
/// "shape" (sizes, ground, B-part of S0).
inline std::vector<std::string> record_violations(const SketchProtocol& protocol, const SeparatedPairRecord& r,
                                                  const IdSet& a, const IdSet& b, int n, int k) {
  std::vector<std::string> bad;
  const Params params{n, k};
  const auto none = SharedRandomness::none();
  const auto enc = [&](Advice role, const IdSet& s) { return protocol.encode(role_view(r.node, role, s, params), none); };
  const auto d = static_cast<std::size_t>(2 * k - 1);
  IdSet w;
  std::merge(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(w));
  const bool shaped = r.s0.size() == d && r.s1.size() == d && std::includes(w.begin(), w.end(), r.s0.begin(), r.s0.end()) &&
                      std::includes(w.begin(), w.end(), r.s1.begin(), r.s1.end()) && intersection_size(r.s0, b) >= 1;
  if (!shaped) bad.emplace_back("shape");

  const BitString m0 = enc(Advice::Sigma, r.s0), m1 = enc(Advice::Sigma, r.s1);
  if (!(m0 == m1 && m0 == r.witness.sigma)) bad.emplace_back("i");

  const IdSet a0 = sorted_intersection(r.s0, a), a1 = sorted_intersection(r.s1, a);
  const BitString ma0 = enc(Advice::ARestricted, a0), ma1 = enc(Advice::ARestricted, a1);
  if (a0 == a1 || !(ma0 == ma1 && ma0 == r.witness.a)) bad.emplace_back("ii");

  const IdSet b0 = sorted_intersection(r.s0, b), b1 = sorted_intersection(r.s1, b);
  const BitString mb0 = enc(Advice::BRestricted, b0), mb1 = enc(Advice::BRestricted, b1);
  if (b0 == b1 || !(mb0 == mb1 && mb0 == r.witness.b)) bad.emplace_back("iii");

  const auto uk = static_cast<std::size_t>(k);
  if (!(a0.size() >= uk && b0.size() + 1 <= uk && a1.size() + 1 <= uk && b1.size() >= uk)) bad.emplace_back("iv");
  return bad;
}

/// Looks for a pair inside each message-triple group, largest group first.
inline std::optional<SeparatedPairRecord> separated_pair_for_node(const SketchProtocol& protocol, NodeId node,
                                                                  const SetFamily& family, const IdSet& a,
                                                                  const IdSet& b, int n, int k) {
  const auto parts = message_partitions(protocol, node, family, a, b, n, k);
  for (const auto& group : member_groups(parts, family, a, b)) {
    if (auto pair = find_separated_pair(group.members, a, b, k))
      return SeparatedPairRecord{node, pair->first, pair->second, group.key};
  }
  return std::nullopt;
}

struct PartitionContext {
  IdSet a, b;
  SetFamily family;
  int n = 0;
  int k = 0;
  std::size_t trial = 0;                  // index of the chosen trial
  std::vector<std::size_t> good_per_trial;
  std::map<NodeId, SeparatedPairRecord> good;
};

/// Samples `trials` partitions of W (trial t seeded by counter from `seed`),
/// finds every good node of V under each, and keeps the best partition;
/// ties go to the earliest trial.
inline PartitionContext choose_partition(const SketchProtocol& protocol, const SetFamily& family, int k,
                                         std::size_t trials, std::uint64_t seed, unsigned threads = 1) {
  if (!protocol.deterministic()) throw DeterminismRequired(protocol.name());
  const int n = protocol.params().n;
  const Layout layout = Layout::of(n);
  if (family.ground.size() < 2 * static_cast<std::size_t>(k)) throw Error("|W| must be at least 2k");
  PartitionContext best{{}, {}, family, n, k, 0, {}, {}};
  bool have = false;
  for (std::size_t t = 0; t < trials; ++t) {
    std::mt19937_64 rng(splitmix64(seed ^ splitmix64(t + 1)));
    auto [a, b] = random_partition(family.ground, k, rng);
    std::vector<std::optional<SeparatedPairRecord>> found(static_cast<std::size_t>(layout.v_count));
    parallel_for(found.size(), threads, [&](std::size_t i) {
      found[i] = separated_pair_for_node(protocol, static_cast<NodeId>(i + 1), family, a, b, n, k);
    });
    std::map<NodeId, SeparatedPairRecord> good;
    for (auto& r : found)
      if (r) good.emplace(r->node, std::move(*r));
    best.good_per_trial.push_back(good.size());
    if (!have || good.size() > best.good.size()) {
      best.a = a;
      best.b = b;
      best.trial = t;
      best.good = std::move(good);
      have = true;
    }
  }
  if (best.good.empty()) throw NoGoodPartition();
  return best;
}

// JSON export consumed by the reduction stage.

inline nlohmann::json family_to_json(const SetFamily& f) {
  return {{"ground", f.ground}, {"d", f.d}, {"epsilon", f.epsilon}, {"members", f.members}};
}

inline SetFamily family_from_json(const nlohmann::json& j) {
  return {j.at("ground").get<IdSet>(), j.at("d").get<int>(), j.at("epsilon").get<double>(),
          j.at("members").get<std::vector<IdSet>>()};
}

inline nlohmann::json record_to_json(const SeparatedPairRecord& r) {
  return {{"node", r.node},
          {"S0", r.s0},
          {"S1", r.s1},
          {"witness", {{"sigma", r.witness.sigma.to_string()}, {"A", r.witness.a.to_string()}, {"B", r.witness.b.to_string()}}}};
}

inline SeparatedPairRecord record_from_json(const nlohmann::json& j) {
  const auto& w = j.at("witness");
  return {j.at("node").get<NodeId>(), j.at("S0").get<IdSet>(), j.at("S1").get<IdSet>(),
          {BitString::from_string(w.at("sigma").get<std::string>()), BitString::from_string(w.at("A").get<std::string>()),
           BitString::from_string(w.at("B").get<std::string>())}};
}

inline nlohmann::json context_to_json(const PartitionContext& c) {
  nlohmann::json records = nlohmann::json::array();
  for (const auto& [node, r] : c.good) records.push_back(record_to_json(r));
  return {{"n", c.n},       {"k", c.k},         {"A", c.a},
          {"B", c.b},       {"family", family_to_json(c.family)},
          {"trial", c.trial}, {"good_per_trial", c.good_per_trial}, {"records", records}};
}

inline PartitionContext context_from_json(const nlohmann::json& j) {
  PartitionContext c;
  c.n = j.at("n").get<int>();
  c.k = j.at("k").get<int>();
  c.a = j.at("A").get<IdSet>();
  c.b = j.at("B").get<IdSet>();
  c.family = family_from_json(j.at("family"));
  c.trial = j.value("trial", std::size_t{0});
  c.good_per_trial = j.value("good_per_trial", std::vector<std::size_t>{});
  for (const auto& r : j.at("records")) {
    auto rec = record_from_json(r);
    c.good.emplace(rec.node, std::move(rec));
  }
  return c;
}

}  // namespace sketchlb
