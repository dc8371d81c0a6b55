#pragma once

#include <map>
#include <memory>
#include <string>

#include "layout.hpp"
#include "mincut.hpp"
#include "model.hpp"

namespace sketchlb {

/// Sends the entire view. The referee rebuilds the graph, taking each pair's
/// multiplicity from the endpoint with the larger id, and decides exactly.
class FullInformationProtocol final : public SketchProtocol {
 public:
  explicit FullInformationProtocol(Params params) : params_(params), id_width_(bit_width_for(static_cast<std::uint64_t>(params.n))) {}

  std::string name() const override { return "full"; }
  Params params() const override { return params_; }
  std::size_t max_bits() const override {
    return 2 + id_width_ + static_cast<std::size_t>(params_.n - 1) * (id_width_ + kMultiplicityBits);
  }

  BitString encode(const NodeView& view, const SharedRandomness&) const override {
    BitString out;
    out.append(static_cast<std::uint64_t>(view.advice), 2);
    out.append(view.neighbors.size(), id_width_);
    for (const auto& [v, m] : view.neighbors) {
      out.append(static_cast<std::uint64_t>(v), id_width_);
      out.append(static_cast<std::uint64_t>(m), kMultiplicityBits);
    }
    return out;
  }

  /// The graph the referee reconstructs from the messages.
  MultiGraph reconstruct(std::span<const NodeMessage> messages) const {
    const int n = static_cast<int>(messages.size());
    if (n < 1) throw DecodeError("no messages");
    MultiGraph graph(n);
    for (std::size_t i = 0; i < messages.size(); ++i) {
      const auto& msg = messages[i];
      if (msg.id != static_cast<NodeId>(i + 1)) throw DecodeError("messages must carry ids 1..n in order");
      std::size_t pos = 2;
      const auto count = msg.bits.read(pos, id_width_);
      pos += id_width_;
      for (std::uint64_t j = 0; j < count; ++j) {
        const auto v = static_cast<NodeId>(msg.bits.read(pos, id_width_));
        pos += id_width_;
        const auto m = static_cast<long>(msg.bits.read(pos, kMultiplicityBits));
        pos += kMultiplicityBits;
        if (v < 1 || v > n || v == msg.id || m < 1) throw DecodeError("malformed neighbor entry");
        if (v < msg.id) graph.add_edge(v, msg.id, m);
      }
      if (pos != msg.bits.size()) throw DecodeError("trailing bits in message");
    }
    return graph;
  }

  Decision decode(std::span<const NodeMessage> messages, const SharedRandomness&) const override {
    MultiGraph graph = reconstruct(messages);
    if (graph.node_count() < 2) return Decision::Connected;
    return is_k_edge_connected(graph, params_.k) ? Decision::Connected : Decision::NotConnected;
  }

 private:
  static constexpr unsigned kMultiplicityBits = 32;
  Params params_;
  unsigned id_width_;
};

/// Every node sends a single 0 bit; the referee answers a fixed decision.
class ConstantProtocol final : public SketchProtocol {
 public:
  explicit ConstantProtocol(Params params, Decision answer = Decision::Connected)
      : params_(params), answer_(answer) {}
  std::string name() const override { return "constant"; }
  Params params() const override { return params_; }
  std::size_t max_bits() const override { return 1; }
  BitString encode(const NodeView&, const SharedRandomness&) const override {
    BitString out;
    out.push_back(false);
    return out;
  }
  Decision decode(std::span<const NodeMessage>, const SharedRandomness&) const override { return answer_; }

 private:
  Params params_;
  Decision answer_;
};

/// Toy L-bit protocol. A node carrying role advice reports adjacency to the
/// next L ids after its own (cyclically); any other node reports, for each
/// residue j mod L, the parity of its edge multiplicity into V-ids congruent
/// to j. The referee answers by the parity of all received 1-bits.
class WindowProtocol final : public SketchProtocol {
 public:
  WindowProtocol(Params params, unsigned bits) : params_(params), bits_(bits) {
    if (bits == 0) throw Error("window protocol needs at least one bit");
  }

  std::string name() const override { return "window"; }
  Params params() const override { return params_; }
  std::size_t max_bits() const override { return bits_; }

  BitString encode(const NodeView& view, const SharedRandomness&) const override {
    const int n = view.params.n;
    BitString out;
    if (view.advice != Advice::None) {
      for (unsigned j = 0; j < bits_; ++j) {
        const NodeId target = static_cast<NodeId>((view.id + static_cast<int>(j)) % n + 1);
        out.push_back(has_neighbor(view, target));
      }
      return out;
    }
    const Layout layout = Layout::of(n);
    std::vector<long> parity(bits_, 0);
    for (const auto& [v, m] : view.neighbors) {
      if (layout.in_v(v)) parity[static_cast<std::size_t>(v) % bits_] += m;
    }
    for (unsigned j = 0; j < bits_; ++j) out.push_back(parity[j] % 2 != 0);
    return out;
  }

  Decision decode(std::span<const NodeMessage> messages, const SharedRandomness&) const override {
    std::size_t ones = 0;
    for (const auto& m : messages) ones += m.bits.popcount();
    return ones % 2 == 0 ? Decision::Connected : Decision::NotConnected;
  }

 private:
  static bool has_neighbor(const NodeView& view, NodeId target) {
    auto it = std::lower_bound(view.neighbors.begin(), view.neighbors.end(), target,
                               [](const auto& entry, NodeId id) { return entry.first < id; });
    return it != view.neighbors.end() && it->first == target;
  }

  Params params_;
  unsigned bits_;
};

/// One bit: parity of the multiplicity-weighted sum of neighbor ids.
class ParityProtocol final : public SketchProtocol {
 public:
  explicit ParityProtocol(Params params) : params_(params) {}
  std::string name() const override { return "parity"; }
  Params params() const override { return params_; }
  std::size_t max_bits() const override { return 1; }
  BitString encode(const NodeView& view, const SharedRandomness&) const override {
    long sum = 0;
    for (const auto& [v, m] : view.neighbors) sum += static_cast<long>(v) * m;
    BitString out;
    out.push_back(sum % 2 != 0);
    return out;
  }
  Decision decode(std::span<const NodeMessage> messages, const SharedRandomness&) const override {
    bool x = false;
    for (const auto& m : messages) x ^= m.bits[0];
    return x ? Decision::NotConnected : Decision::Connected;
  }

 private:
  Params params_;
};

}  // namespace sketchlb
