#pragma once

#include <algorithm>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "bits.hpp"
#include "errors.hpp"
#include "multigraph.hpp"
#include "parallel.hpp"

namespace sketchlb {

/// Role information revealed to nodes of a lower-bound graph.
enum class Advice { None, Sigma, ARestricted, BRestricted };

inline const char* to_string(Advice a) {
  switch (a) {
    case Advice::None: return "none";
    case Advice::Sigma: return "sigma";
    case Advice::ARestricted: return "a-restricted";
    case Advice::BRestricted: return "b-restricted";
  }
  return "?";
}

struct Params {
  int n = 0;
  int k = 0;
  friend bool operator==(const Params&, const Params&) = default;
};

/// Everything a node may base its message on.
struct NodeView {
  NodeId id = 0;
  Neighborhood neighbors;
  Advice advice = Advice::None;
  Params params;
  friend bool operator==(const NodeView&, const NodeView&) = default;
};

enum class Decision { Connected, NotConnected };

inline const char* to_string(Decision d) { return d == Decision::Connected ? "connected" : "not-connected"; }

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Seed-addressed public randomness. Deterministic protocols receive the
/// empty stream; `derive` maps a tuple of indices to a pseudorandom word.
class SharedRandomness {
 public:
  SharedRandomness() = default;
  static SharedRandomness none() { return {}; }
  static SharedRandomness seeded(std::uint64_t seed) {
    SharedRandomness r;
    r.seed_ = seed;
    return r;
  }

  bool empty() const noexcept { return !seed_.has_value(); }
  std::uint64_t seed() const {
    if (!seed_) throw Error("shared randomness is empty");
    return *seed_;
  }

  std::uint64_t derive(std::initializer_list<std::uint64_t> path) const {
    std::uint64_t h = splitmix64(seed());
    for (auto p : path) h = splitmix64(h ^ splitmix64(p + 0x632be59bd9b4e019ULL));
    return h;
  }

 private:
  std::optional<std::uint64_t> seed_;
};

struct NodeMessage {
  NodeId id = 0;
  BitString bits;
  friend bool operator==(const NodeMessage&, const NodeMessage&) = default;
};

/// A one-shot sketching algorithm: every node encodes its view, the referee
/// decodes the sorted message list. Implementations must be thread-safe.
class SketchProtocol {
 public:
  virtual ~SketchProtocol() = default;
  virtual std::string name() const = 0;
  virtual Params params() const = 0;
  virtual std::size_t max_bits() const = 0;
  virtual bool deterministic() const { return true; }
  virtual BitString encode(const NodeView& view, const SharedRandomness& randomness) const = 0;
  /// `messages` is sorted by id. The referee never sees the graph.
  virtual Decision decode(std::span<const NodeMessage> messages, const SharedRandomness& randomness) const = 0;
};

struct Transcript {
  std::vector<NodeMessage> messages;
  Decision decision = Decision::NotConnected;
  friend bool operator==(const Transcript&, const Transcript&) = default;
};

/// One advice entry per node, index id - 1.
using AdviceMap = std::vector<Advice>;

inline NodeView view_of(const MultiGraph& graph, const AdviceMap& advice, NodeId id, Params params) {
  return NodeView{id, graph.neighborhood(id), advice.at(static_cast<std::size_t>(id - 1)), params};
}

/// Encodes with the budget check applied.
inline BitString checked_encode(const SketchProtocol& protocol, const NodeView& view,
                                const SharedRandomness& randomness) {
  BitString bits = protocol.encode(view, randomness);
  if (bits.size() > protocol.max_bits()) throw EncodingOverflow(view.id, bits.size(), protocol.max_bits());
  return bits;
}

inline void sort_messages(std::vector<NodeMessage>& messages) {
  std::sort(messages.begin(), messages.end(), [](const auto& a, const auto& b) { return a.id < b.id; });
}

inline Transcript execute(const SketchProtocol& protocol, const MultiGraph& graph, const AdviceMap& advice,
                          const SharedRandomness& randomness, unsigned threads = 1) {
  const int n = graph.node_count();
  if (advice.size() != static_cast<std::size_t>(n)) throw Error("advice map must cover every node");
  const Params params{n, protocol.params().k};
  Transcript t;
  t.messages.resize(static_cast<std::size_t>(n));
  parallel_for(static_cast<std::size_t>(n), threads, [&](std::size_t i) {
    const NodeId id = static_cast<NodeId>(i + 1);
    t.messages[i] = NodeMessage{id, checked_encode(protocol, view_of(graph, advice, id, params), randomness)};
  });
  t.decision = protocol.decode(t.messages, randomness);
  return t;
}

inline AdviceMap no_advice(int n) { return AdviceMap(static_cast<std::size_t>(n), Advice::None); }

}  // namespace sketchlb
