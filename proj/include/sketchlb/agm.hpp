#pragma once

// Linear spanning-forest sketches for (k-edge) connectivity.
//
// Every node encodes its signed incidence vector: edge (u, v) with u < v has
// coordinate (u - 1) * n + v, entering u's vector with sign +1 and v's with
// sign -1, scaled by the multiplicity. Summing the vectors of a node set
// cancels internal edges, so an l0-sample of the sum is a crossing edge.

#include <bit>
#include <cmath>
#include <cstdint>
#include <memory>
#include <mutex>
#include <numeric>
#include <optional>
#include <span>
#include <vector>

#include "errors.hpp"
#include "mincut.hpp"
#include "model.hpp"

namespace sketchlb {

namespace field {

inline constexpr std::uint64_t p = (std::uint64_t{1} << 61) - 1;
inline constexpr unsigned bits = 61;

inline std::uint64_t reduce(unsigned __int128 x) {
  std::uint64_t lo = static_cast<std::uint64_t>(x & p) + static_cast<std::uint64_t>(x >> 61);
  lo = (lo & p) + (lo >> 61);
  return lo >= p ? lo - p : lo;
}
inline std::uint64_t add(std::uint64_t a, std::uint64_t b) {
  std::uint64_t s = a + b;
  return s >= p ? s - p : s;
}
inline std::uint64_t sub(std::uint64_t a, std::uint64_t b) { return a >= b ? a - b : a + p - b; }
inline std::uint64_t mul(std::uint64_t a, std::uint64_t b) {
  return reduce(static_cast<unsigned __int128>(a) * b);
}
inline std::uint64_t pow(std::uint64_t base, std::uint64_t e) {
  std::uint64_t out = 1;
  while (e) {
    if (e & 1U) out = mul(out, base);
    base = mul(base, base);
    e >>= 1;
  }
  return out;
}
inline std::uint64_t inverse(std::uint64_t a) { return pow(a, p - 2); }
/// Signed integer mapped into the field.
inline std::uint64_t from_signed(long x) {
  return x >= 0 ? static_cast<std::uint64_t>(x) % p : sub(0, static_cast<std::uint64_t>(-x) % p);
}

}  // namespace field

inline unsigned ceil_log2(std::uint64_t x) { return x <= 1 ? 0 : static_cast<unsigned>(std::bit_width(x - 1)); }

/// Sketch dimensions for a (n, k, delta) configuration.
struct AgmShape {
  int n = 0;
  int k = 0;
  double delta = 0.05;
  unsigned rounds = 0;  // Boruvka rounds per forest
  unsigned reps = 0;    // independent samplers per round
  unsigned levels = 0;  // nested subsampling levels per sampler

  static constexpr unsigned cells = 3;  // sum, index-weighted sum, fingerprint

  static AgmShape of(int n, int k, double delta) {
    if (n < 1 || k < 1) throw Error("agm needs n >= 1 and k >= 1");
    if (!(delta > 0.0 && delta < 0.5)) throw Error("agm failure rate must lie in (0, 1/2)");
    AgmShape s{n, k, delta};
    const auto un = static_cast<std::uint64_t>(n);
    s.rounds = ceil_log2(un) + 1;
    s.levels = ceil_log2(un * un) + 1;
    // Each sampler fails with probability at most 1/2; a union bound over k
    // forests, all rounds and at most n components fixes the repetitions.
    const double events = static_cast<double>(k) * s.rounds * static_cast<double>(n) / delta;
    s.reps = std::max(1U, static_cast<unsigned>(std::ceil(std::log2(events))));
    return s;
  }

  std::size_t sampler_cells() const { return std::size_t{levels} * cells; }
  std::size_t round_cells() const { return reps * sampler_cells(); }
  std::size_t stack_cells() const { return rounds * round_cells(); }
  std::size_t total_cells() const { return static_cast<std::size_t>(k) * stack_cells(); }
  std::uint64_t bits() const { return total_cells() * field::bits; }

  std::size_t offset(unsigned stack, unsigned round, unsigned rep = 0, unsigned level = 0) const {
    return ((static_cast<std::size_t>(stack) * rounds + round) * reps + rep) * sampler_cells() +
           std::size_t{level} * cells;
  }
};

/// Exact sketch length in bits of one node.
inline std::uint64_t agm_budget(int n, int k, double delta) { return AgmShape::of(n, k, delta).bits(); }

/// Closed-form O(k log^3 n) ceiling on agm_budget, valid for k <= 16.
inline double agm_budget_bound(int n, int k, double delta) {
  const double lg = ceil_log2(static_cast<std::uint64_t>(n)) + 1.0;
  const double c = 2.0 * AgmShape::cells * field::bits * (6.0 + std::ceil(std::log2(1.0 / delta)));
  return c * k * lg * lg * lg;
}

using SketchVector = std::vector<std::uint64_t>;

/// Cell-wise field addition.
inline void add_into(SketchVector& into, std::span<const std::uint64_t> other) {
  if (into.size() != other.size()) throw Error("sketch size mismatch");
  for (std::size_t i = 0; i < into.size(); ++i) into[i] = field::add(into[i], other[i]);
}

/// Encoder and sampler state for one seed: per-sampler level hashes and
/// fingerprint bases, with power tables when they fit in memory.
class AgmSketcher {
 public:
  AgmSketcher(AgmShape shape, const SharedRandomness& randomness) : shape_(shape) {
    const std::size_t samplers = static_cast<std::size_t>(shape.k) * shape.rounds * shape.reps;
    keys_.resize(samplers);
    bases_.resize(samplers);
    for (unsigned s = 0; s < static_cast<unsigned>(shape.k); ++s)
      for (unsigned r = 0; r < shape.rounds; ++r)
        for (unsigned t = 0; t < shape.reps; ++t) {
          const std::size_t i = sampler_index(s, r, t);
          keys_[i] = randomness.derive({1, s, r, t});
          bases_[i] = randomness.derive({2, s, r, t}) % (field::p - 1) + 1;
        }
    const std::size_t coords = static_cast<std::size_t>(shape.n) * static_cast<std::size_t>(shape.n) + 1;
    if (coords * samplers <= (std::size_t{1} << 22)) {
      powers_.resize(coords * samplers);
      for (std::size_t i = 0; i < samplers; ++i) {
        std::uint64_t x = 1;
        for (std::size_t e = 0; e < coords; ++e) {
          powers_[i * coords + e] = x;
          x = field::mul(x, bases_[i]);
        }
      }
    }
  }

  const AgmShape& shape() const { return shape_; }

  std::uint64_t edge_index(NodeId u, NodeId v) const {
    if (u > v) std::swap(u, v);
    return static_cast<std::uint64_t>(u - 1) * static_cast<std::uint64_t>(shape_.n) + static_cast<std::uint64_t>(v);
  }

  /// Inverse of edge_index; nullopt if the index names no edge.
  std::optional<std::pair<NodeId, NodeId>> edge_of(std::uint64_t index) const {
    const auto n = static_cast<std::uint64_t>(shape_.n);
    if (index < 1 || index > n * n) return std::nullopt;
    const std::uint64_t u = (index - 1) / n + 1;
    const std::uint64_t v = index - (u - 1) * n;
    if (u >= v) return std::nullopt;
    return std::pair{static_cast<NodeId>(u), static_cast<NodeId>(v)};
  }

  /// Adds x copies of coordinate `index` to the sampler cells of (stack, round).
  void add_coordinate(std::span<std::uint64_t> cells, unsigned stack, unsigned round, std::uint64_t index,
                      std::uint64_t x) const {
    const std::uint64_t xi = field::mul(x, index);
    for (unsigned t = 0; t < shape_.reps; ++t) {
      const std::size_t s = sampler_index(stack, round, t);
      const std::uint64_t xf = field::mul(x, power(s, index));
      const unsigned top = level_of(s, index);
      std::size_t at = shape_.offset(stack, round, t);
      for (unsigned l = 0; l <= top; ++l, at += AgmShape::cells) {
        cells[at] = field::add(cells[at], x);
        cells[at + 1] = field::add(cells[at + 1], xi);
        cells[at + 2] = field::add(cells[at + 2], xf);
      }
    }
  }

  SketchVector sketch_of(const NodeView& view) const {
    SketchVector cells(shape_.total_cells(), 0);
    for (const auto& [other, mult] : view.neighbors) {
      const std::uint64_t index = edge_index(view.id, other);
      const std::uint64_t x = field::from_signed(view.id < other ? mult : -mult);
      for (unsigned s = 0; s < static_cast<unsigned>(shape_.k); ++s)
        for (unsigned r = 0; r < shape_.rounds; ++r) add_coordinate(cells, s, r, index, x);
    }
    return cells;
  }

  /// Tries the first `max_reps` samplers of (stack, round) on a summed sketch
  /// whose cells start at `cells`; returns a coordinate certified 1-sparse.
  std::optional<std::pair<std::uint64_t, std::uint64_t>> recover(std::span<const std::uint64_t> cells, unsigned stack,
                                                                  unsigned round, unsigned max_reps) const {
    for (unsigned t = 0; t < std::min(max_reps, shape_.reps); ++t) {
      const std::size_t s = sampler_index(stack, round, t);
      for (unsigned l = shape_.levels; l-- > 0;) {
        const std::size_t at = shape_.offset(stack, round, t, l);
        const std::uint64_t sum = cells[at];
        if (sum == 0) continue;
        const std::uint64_t index = field::mul(cells[at + 1], field::inverse(sum));
        if (!edge_of(index)) continue;
        if (field::mul(sum, power(s, index)) != cells[at + 2]) continue;
        if (level_of(s, index) < l) continue;
        return std::pair{index, sum};
      }
    }
    return std::nullopt;
  }

 private:
  std::size_t sampler_index(unsigned stack, unsigned round, unsigned rep) const {
    return (static_cast<std::size_t>(stack) * shape_.rounds + round) * shape_.reps + rep;
  }

  unsigned level_of(std::size_t sampler, std::uint64_t index) const {
    const std::uint64_t h = splitmix64(keys_[sampler] ^ (index * 0xd1b54a32d192ed03ULL));
    return std::min<unsigned>(static_cast<unsigned>(std::countr_zero(h)), shape_.levels - 1);
  }

  std::uint64_t power(std::size_t sampler, std::uint64_t index) const {
    if (!powers_.empty()) {
      const std::size_t coords = static_cast<std::size_t>(shape_.n) * static_cast<std::size_t>(shape_.n) + 1;
      return powers_[sampler * coords + index];
    }
    return field::pow(bases_[sampler], index);
  }

  AgmShape shape_;
  std::vector<std::uint64_t> keys_;
  std::vector<std::uint64_t> bases_;
  std::vector<std::uint64_t> powers_;
};

inline BitString pack_sketch(const SketchVector& cells) {
  BitString bits;
  for (std::uint64_t c : cells) bits.append(c, field::bits);
  return bits;
}

inline SketchVector unpack_sketch(const BitString& bits, const AgmShape& shape) {
  if (bits.size() != shape.bits()) throw DecodeError("agm message has " + std::to_string(bits.size()) + " bits, expected " +
                                                     std::to_string(shape.bits()));
  SketchVector cells(shape.total_cells());
  for (std::size_t i = 0; i < cells.size(); ++i) {
    cells[i] = bits.read(i * field::bits, field::bits);
    if (cells[i] >= field::p) throw DecodeError("agm cell outside the field");
  }
  return cells;
}

namespace detail {

struct UnionFind {
  std::vector<int> parent;
  explicit UnionFind(int n) : parent(static_cast<std::size_t>(n)) { std::iota(parent.begin(), parent.end(), 0); }
  int find(int x) {
    while (parent[static_cast<std::size_t>(x)] != x) {
      parent[static_cast<std::size_t>(x)] = parent[static_cast<std::size_t>(parent[static_cast<std::size_t>(x)])];
      x = parent[static_cast<std::size_t>(x)];
    }
    return x;
  }
  bool unite(int a, int b) {
    a = find(a);
    b = find(b);
    if (a == b) return false;
    parent[static_cast<std::size_t>(std::max(a, b))] = std::min(a, b);
    return true;
  }
};

}  // namespace detail

/// Peels k spanning forests: forest i is grown by Boruvka rounds on stack i,
/// with the copies already used by forests 1..i-1 subtracted from the sums.
/// Returns the union certificate (multiplicity = number of forests using the edge).
inline MultiGraph agm_certificate(const AgmSketcher& sketcher, const std::vector<SketchVector>& node_sketches) {
  const AgmShape& shape = sketcher.shape();
  const int n = shape.n;
  MultiGraph certificate(n);
  std::vector<Edge> used;  // one entry per edge with its used copy count
  for (unsigned stack = 0; stack < static_cast<unsigned>(shape.k); ++stack) {
    detail::UnionFind forest(n);
    std::vector<std::pair<NodeId, NodeId>> grown;
    for (unsigned round = 0; round < shape.rounds; ++round) {
      const std::size_t begin = shape.offset(stack, round);
      const std::size_t width = shape.round_cells();
      // Component sums of this round's cells, indexed by root.
      std::vector<SketchVector> sums(static_cast<std::size_t>(n));
      for (int v = 0; v < n; ++v) {
        auto& s = sums[static_cast<std::size_t>(forest.find(v))];
        if (s.empty()) s.assign(shape.total_cells(), 0);
        const auto& mine = node_sketches[static_cast<std::size_t>(v)];
        for (std::size_t i = begin; i < begin + width; ++i) s[i] = field::add(s[i], mine[i]);
      }
      for (const auto& e : used) {
        const int cu = forest.find(e.u - 1), cv = forest.find(e.v - 1);
        if (cu == cv) continue;
        const std::uint64_t index = sketcher.edge_index(e.u, e.v);
        sketcher.add_coordinate(sums[static_cast<std::size_t>(cu)], stack, round, index, field::from_signed(-e.multiplicity));
        sketcher.add_coordinate(sums[static_cast<std::size_t>(cv)], stack, round, index, field::from_signed(e.multiplicity));
      }
      std::vector<std::pair<NodeId, NodeId>> found;
      for (int root = 0; root < n; ++root) {
        if (sums[static_cast<std::size_t>(root)].empty()) continue;
        const auto hit = sketcher.recover(sums[static_cast<std::size_t>(root)], stack, round, shape.reps);
        if (hit) found.push_back(*sketcher.edge_of(hit->first));
      }
      bool merged = false;
      for (const auto& [u, v] : found) {
        if (forest.unite(u - 1, v - 1)) {
          grown.emplace_back(u, v);
          merged = true;
        }
      }
      if (!merged) break;
    }
    for (const auto& [u, v] : grown) {
      certificate.add_edge(u, v);
      auto it = std::find_if(used.begin(), used.end(), [&](const Edge& e) { return e.u == u && e.v == v; });
      if (it == used.end()) {
        used.push_back(Edge{u, v, 1});
      } else {
        ++it->multiplicity;
      }
    }
  }
  return certificate;
}

/// Randomized k-edge-connectivity sketch. One-sided: a failed sampler can only
/// hide edges, so errors are always "not connected" on a k-connected input.
class AgmSketchProtocol final : public SketchProtocol {
 public:
  AgmSketchProtocol(Params params, double delta) : params_(params), shape_(AgmShape::of(params.n, params.k, delta)) {}

  std::string name() const override { return "agm"; }
  Params params() const override { return params_; }
  std::size_t max_bits() const override { return shape_.bits(); }
  bool deterministic() const override { return false; }
  const AgmShape& shape() const { return shape_; }

  BitString encode(const NodeView& view, const SharedRandomness& randomness) const override {
    return pack_sketch(sketcher_for(randomness)->sketch_of(view));
  }

  Decision decode(std::span<const NodeMessage> messages, const SharedRandomness& randomness) const override {
    if (messages.size() != static_cast<std::size_t>(params_.n)) throw DecodeError("agm needs one message per node");
    std::vector<SketchVector> sketches;
    sketches.reserve(messages.size());
    for (std::size_t i = 0; i < messages.size(); ++i) {
      if (messages[i].id != static_cast<NodeId>(i + 1)) throw DecodeError("agm messages must be sorted ids 1..n");
      sketches.push_back(unpack_sketch(messages[i].bits, shape_));
    }
    if (params_.n < 2) return Decision::Connected;
    const MultiGraph certificate = agm_certificate(*sketcher_for(randomness), sketches);
    return is_k_edge_connected(certificate, params_.k) ? Decision::Connected : Decision::NotConnected;
  }

  std::shared_ptr<const AgmSketcher> sketcher_for(const SharedRandomness& randomness) const {
    if (randomness.empty()) throw Error("agm sketches need seeded shared randomness");
    std::lock_guard lock(mutex_);
    if (!cached_ || cached_seed_ != randomness.seed()) {
      cached_ = std::make_shared<const AgmSketcher>(shape_, randomness);
      cached_seed_ = randomness.seed();
    }
    return cached_;
  }

 private:
  Params params_;
  AgmShape shape_;
  mutable std::mutex mutex_;
  mutable std::shared_ptr<const AgmSketcher> cached_;
  mutable std::uint64_t cached_seed_ = 0;
};

inline BitString agm_encode(const NodeView& view, const SharedRandomness& seeds, int k, double delta) {
  return AgmSketchProtocol({view.params.n, k}, delta).encode(view, seeds);
}

inline Decision agm_decide_kconn(std::span<const NodeMessage> messages, const SharedRandomness& seeds, int n, int k,
                                 double delta) {
  return AgmSketchProtocol({n, k}, delta).decode(messages, seeds);
}

}  // namespace sketchlb
