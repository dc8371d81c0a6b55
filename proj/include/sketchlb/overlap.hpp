#pragma once

// UniqueOverlap: Alice holds X, Bob holds Y, both ternary vectors of length m
// with s defined entries. The supports share exactly one index sigma, where
// the entries differ; Charlie sees the supports and one message from each
// party and must say "yes" iff (X_sigma, Y_sigma) = (0, 1).

#include <algorithm>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "bits.hpp"
#include "combinatorics.hpp"
#include "errors.hpp"
#include "json.hpp"
#include "parallel.hpp"

namespace sketchlb {

using Support = std::vector<int>;  // sorted 1-based indices

class TernaryVector {
 public:
  static constexpr std::int8_t bottom = -1;

  TernaryVector() = default;
  explicit TernaryVector(int m) : entries_(static_cast<std::size_t>(m), bottom) {}

  /// Characters '0', '1' and '*' (undefined).
  static TernaryVector from_string(const std::string& s) {
    TernaryVector v(static_cast<int>(s.size()));
    for (std::size_t i = 0; i < s.size(); ++i) {
      if (s[i] == '0' || s[i] == '1') {
        v.entries_[i] = static_cast<std::int8_t>(s[i] - '0');
      } else if (s[i] != '*') {
        throw Error(std::string("ternary vectors use 0, 1 and *, got '") + s[i] + "'");
      }
    }
    return v;
  }

  /// Vector with the given support and bits (bit t of `bits`, MSB first,
  /// for the t-th support index).
  static TernaryVector with_bits(int m, const Support& support, std::uint64_t bits) {
    TernaryVector v(m);
    const auto s = support.size();
    for (std::size_t t = 0; t < s; ++t) v.set(support[t], static_cast<int>((bits >> (s - 1 - t)) & 1U));
    return v;
  }

  int length() const { return static_cast<int>(entries_.size()); }
  bool defined(int i) const { return at(i) != bottom; }
  int operator[](int i) const { return at(i); }  // 0, 1 or bottom
  void set(int i, int value) { entries_.at(static_cast<std::size_t>(i - 1)) = static_cast<std::int8_t>(value); }

  Support support() const {
    Support out;
    for (int i = 1; i <= length(); ++i)
      if (defined(i)) out.push_back(i);
    return out;
  }

  /// Defined entries in ascending index order.
  BitString support_bits() const {
    BitString b;
    for (auto e : entries_)
      if (e != bottom) b.push_back(e == 1);
    return b;
  }

  std::string to_string() const {
    std::string s;
    for (auto e : entries_) s.push_back(e == bottom ? '*' : static_cast<char>('0' + e));
    return s;
  }

  friend bool operator==(const TernaryVector&, const TernaryVector&) = default;

 private:
  std::int8_t at(int i) const { return entries_.at(static_cast<std::size_t>(i - 1)); }
  std::vector<std::int8_t> entries_;
};

enum class Answer { No, Yes };

inline const char* to_string(Answer a) { return a == Answer::Yes ? "yes" : "no"; }

inline int ceil_div(int a, int b) { return (a + b - 1) / b; }

struct OverlapInstance {
  TernaryVector x, y;
  int m = 0;
  int s = 0;
  int sigma = 0;
};

/// Returns sigma or throws InvalidInstance naming "length", "s-range",
/// "support-size", "P1" or "P2".
inline int validate_instance(const TernaryVector& x, const TernaryVector& y, int m, int s) {
  if (x.length() != m || y.length() != m) throw InvalidInstance("length", "vectors must have length m");
  if (s < 1 || s > ceil_div(m, 2)) throw InvalidInstance("s-range", "need 1 <= s <= ceil(m/2)");
  const Support sx = x.support(), sy = y.support();
  if (sx.size() != static_cast<std::size_t>(s) || sy.size() != static_cast<std::size_t>(s))
    throw InvalidInstance("support-size", "both supports must have exactly s indices");
  const auto common = sorted_intersection(sx, sy);
  if (common.size() >= 2) throw InvalidInstance("P2", "supports share more than one index");
  if (common.empty()) throw InvalidInstance("P1", "supports share no index");
  if (x[common[0]] == y[common[0]]) throw InvalidInstance("P1", "entries at the shared index agree");
  return common[0];
}

inline OverlapInstance make_instance(const TernaryVector& x, const TernaryVector& y, int m, int s) {
  const int sigma = validate_instance(x, y, m, s);
  return {x, y, m, s, sigma};
}

inline Answer answer(const OverlapInstance& inst) {
  return inst.x[inst.sigma] == 0 && inst.y[inst.sigma] == 1 ? Answer::Yes : Answer::No;
}

/// The unique shared index of two supports.
inline int shared_index(const Support& x, const Support& y) {
  const auto common = sorted_intersection(x, y);
  if (common.size() != 1) throw InvalidInstance(common.empty() ? "P1" : "P2", "supports must share exactly one index");
  return common[0];
}

/// Calls fn(instance) for every valid instance, ordered by (supp X, supp Y,
/// X bits, Y bits). Returns the number of instances.
template <typename Fn>
std::size_t for_each_valid_instance(int m, int s, Fn&& fn) {
  if (s < 1 || s > ceil_div(m, 2)) throw InvalidInstance("s-range", "need 1 <= s <= ceil(m/2)");
  Support all(static_cast<std::size_t>(m));
  for (int i = 0; i < m; ++i) all[static_cast<std::size_t>(i)] = i + 1;
  const auto supports = combinations(all, static_cast<std::size_t>(s));
  std::size_t count = 0;
  const std::uint64_t patterns = std::uint64_t{1} << s;
  for (const auto& sx : supports) {
    for (const auto& sy : supports) {
      if (intersection_size(sx, sy) != 1) continue;
      const int sigma = sorted_intersection(sx, sy)[0];
      for (std::uint64_t bx = 0; bx < patterns; ++bx) {
        const auto x = TernaryVector::with_bits(m, sx, bx);
        for (std::uint64_t by = 0; by < patterns; ++by) {
          const auto y = TernaryVector::with_bits(m, sy, by);
          if (x[sigma] == y[sigma]) continue;
          fn(OverlapInstance{x, y, m, s, sigma});
          ++count;
        }
      }
    }
  }
  return count;
}

/// Intervals [1..3], [4..6], ... with the last of length 1-3, and the cyclic
/// successor inside each interval. A length-1 tail maps to index 1.
class CyclePartition {
 public:
  explicit CyclePartition(int m) : m_(m) {
    if (m < 2) throw Error("cycle partition needs m >= 2");
  }

  int m() const { return m_; }
  int cycles() const { return ceil_div(m_, 3); }

  int phi(int b) const {
    if (b < 1 || b > m_) throw Error("index outside [1, m]");
    const int start = (b - 1) / 3 * 3 + 1;
    const int len = std::min(3, m_ - start + 1);
    if (len == 1) return 1;
    return start + (b - start + 1) % len;
  }

  std::vector<std::vector<int>> intervals() const {
    std::vector<std::vector<int>> out;
    for (int start = 1; start <= m_; start += 3) {
      std::vector<int> iv;
      for (int b = start; b <= std::min(m_, start + 2); ++b) iv.push_back(b);
      out.push_back(iv);
    }
    return out;
  }

 private:
  int m_;
};

/// Assigns every s-subset I of [m] the smallest i in I with phi(i) in I.
class BlockAssignment {
 public:
  BlockAssignment(int m, int s) : cycles_(m), s_(s) {
    if (s <= ceil_div(m, 3)) throw HypothesisViolated("block assignment needs s > ceil(m/3)");
    if (s > m) throw HypothesisViolated("block assignment needs s <= m");
  }

  int m() const { return cycles_.m(); }
  int s() const { return s_; }
  const CyclePartition& cycles() const { return cycles_; }

  int block_of(const Support& support) const {
    if (support.size() != static_cast<std::size_t>(s_)) throw Error("support must have s indices");
    for (int i : support)
      if (std::binary_search(support.begin(), support.end(), cycles_.phi(i))) return i;
    throw BlockPropertyViolated("support has no index whose successor it also contains");
  }

  std::map<Support, int> materialize() const {
    std::map<Support, int> out;
    Support all;
    for (int i = 1; i <= m(); ++i) all.push_back(i);
    for_each_combination(all, static_cast<std::size_t>(s_), [&](const Support& I) { out.emplace(I, block_of(I)); });
    return out;
  }

 private:
  CyclePartition cycles_;
  int s_;
};

inline BlockAssignment build_blocks(int m, int s) { return BlockAssignment(m, s); }

/// Drops the bit at `dropped` from the support-ordered bits of v.
inline BitString appb_encode(const TernaryVector& v, const BlockAssignment& blocks) {
  const Support supp = v.support();
  const int dropped = blocks.block_of(supp);
  BitString out;
  for (int i : supp)
    if (i != dropped) out.push_back(v[i] == 1);
  return out;
}

namespace detail {

/// Value of index `i` from a message that lists support bits minus `dropped`.
inline int read_kept_bit(const Support& supp, int dropped, int i, const BitString& msg) {
  std::size_t pos = 0;
  for (int j : supp) {
    if (j == i) return msg[pos] ? 1 : 0;
    if (j != dropped) ++pos;
  }
  throw Error("index is not in the support");
}

}  // namespace detail

inline Answer appb_decode(const Support& supp_x, const Support& supp_y, const BitString& msg_a, const BitString& msg_b,
                          const BlockAssignment& blocks) {
  const int sigma = shared_index(supp_x, supp_y);
  const auto len = static_cast<std::size_t>(blocks.s() - 1);
  if (msg_a.size() != len || msg_b.size() != len) throw DecodeError("messages must have s-1 bits");
  const int i = blocks.block_of(supp_x), j = blocks.block_of(supp_y);
  if (i != sigma) return detail::read_kept_bit(supp_x, i, sigma, msg_a) == 0 ? Answer::Yes : Answer::No;
  if (j != sigma) return detail::read_kept_bit(supp_y, j, sigma, msg_b) == 1 ? Answer::Yes : Answer::No;
  throw BlockPropertyViolated("both parties dropped the shared index");
}

/// Simultaneous-message protocol: Charlie only ever receives the two supports
/// and the two messages.
class OneWayProtocol {
 public:
  virtual ~OneWayProtocol() = default;
  virtual std::string name() const = 0;
  virtual int m() const = 0;
  virtual int s() const = 0;
  virtual std::size_t max_bits() const = 0;
  virtual BitString alice_encode(const TernaryVector& x) const = 0;
  virtual BitString bob_encode(const TernaryVector& y) const = 0;
  virtual Answer charlie_decode(const Support& supp_x, const Support& supp_y, const BitString& msg_a,
                                const BitString& msg_b) const = 0;
};

inline Answer run_protocol(const OneWayProtocol& p, const OverlapInstance& inst) {
  return p.charlie_decode(inst.x.support(), inst.y.support(), p.alice_encode(inst.x), p.bob_encode(inst.y));
}

class AppBProtocol final : public OneWayProtocol {
 public:
  AppBProtocol(int m, int s) : blocks_(m, s) {}
  std::string name() const override { return "appb"; }
  int m() const override { return blocks_.m(); }
  int s() const override { return blocks_.s(); }
  std::size_t max_bits() const override { return static_cast<std::size_t>(s() - 1); }
  BitString alice_encode(const TernaryVector& x) const override { return appb_encode(x, blocks_); }
  BitString bob_encode(const TernaryVector& y) const override { return appb_encode(y, blocks_); }
  Answer charlie_decode(const Support& sx, const Support& sy, const BitString& a, const BitString& b) const override {
    return appb_decode(sx, sy, a, b, blocks_);
  }
  const BlockAssignment& blocks() const { return blocks_; }

 private:
  BlockAssignment blocks_;
};

/// Both parties send their first `keep` support bits; Charlie reads sigma
/// from whichever message contains it and otherwise answers "no".
class TruncationProtocol final : public OneWayProtocol {
 public:
  TruncationProtocol(int m, int s, int keep) : m_(m), s_(s), keep_(keep) {
    if (keep < 0 || keep > s) throw Error("truncation length must lie in [0, s]");
  }
  std::string name() const override { return "truncate-" + std::to_string(keep_); }
  int m() const override { return m_; }
  int s() const override { return s_; }
  std::size_t max_bits() const override { return static_cast<std::size_t>(keep_); }
  BitString alice_encode(const TernaryVector& x) const override { return prefix(x); }
  BitString bob_encode(const TernaryVector& y) const override { return prefix(y); }
  Answer charlie_decode(const Support& sx, const Support& sy, const BitString& a, const BitString& b) const override {
    const int sigma = shared_index(sx, sy);
    const auto rx = rank(sx, sigma), ry = rank(sy, sigma);
    if (rx < a.size()) return a[rx] ? Answer::No : Answer::Yes;
    if (ry < b.size()) return b[ry] ? Answer::Yes : Answer::No;
    return Answer::No;
  }

 private:
  BitString prefix(const TernaryVector& v) const {
    const BitString all = v.support_bits();
    BitString out;
    for (std::size_t t = 0; t < static_cast<std::size_t>(keep_) && t < all.size(); ++t) out.push_back(all[t]);
    return out;
  }
  static std::size_t rank(const Support& supp, int i) {
    return static_cast<std::size_t>(std::lower_bound(supp.begin(), supp.end(), i) - supp.begin());
  }
  int m_, s_, keep_;
};

/// Alice sends all s support bits.
class FullSupportProtocol final : public OneWayProtocol {
 public:
  FullSupportProtocol(int m, int s) : m_(m), s_(s) {}
  std::string name() const override { return "full"; }
  int m() const override { return m_; }
  int s() const override { return s_; }
  std::size_t max_bits() const override { return static_cast<std::size_t>(s_); }
  BitString alice_encode(const TernaryVector& x) const override { return x.support_bits(); }
  BitString bob_encode(const TernaryVector& y) const override { return y.support_bits(); }
  Answer charlie_decode(const Support& sx, const Support& sy, const BitString& a, const BitString&) const override {
    const int sigma = shared_index(sx, sy);
    const auto rx = static_cast<std::size_t>(std::lower_bound(sx.begin(), sx.end(), sigma) - sx.begin());
    return a[rx] ? Answer::No : Answer::Yes;
  }

 private:
  int m_, s_;
};

inline std::unique_ptr<OneWayProtocol> make_overlap_protocol(const std::string& name, int m, int s) {
  if (name == "appb") return std::make_unique<AppBProtocol>(m, s);
  if (name == "truncate") return std::make_unique<TruncationProtocol>(m, s, s - 2);
  if (name == "full") return std::make_unique<FullSupportProtocol>(m, s);
  throw Error("unknown overlap protocol '" + name + "' (expected appb, truncate or full)");
}

// Flipped-index attack.

/// Per support: for every index i of the support that is flipped, one pair
/// of same-message inputs (bit patterns) with value 0 and 1 at i.
struct FlipWitnesses {
  std::map<int, std::pair<std::uint64_t, std::uint64_t>> by_index;
};

struct Counterexample {
  int sigma = 0;
  TernaryVector x, x_hat, y, y_hat;  // x[sigma] = 0, x_hat[sigma] = 1, y[sigma] = 1, y_hat[sigma] = 0
  Answer on_yes_instance = Answer::No;  // Charlie's output on (x, y), truth "yes"
  Answer on_no_instance = Answer::No;   // Charlie's output on (x_hat, y_hat), truth "no"

  bool yes_instance_wrong() const { return on_yes_instance != Answer::Yes; }
  bool no_instance_wrong() const { return on_no_instance != Answer::No; }
};

inline std::vector<Support> all_supports(int m, int s) {
  Support all;
  for (int i = 1; i <= m; ++i) all.push_back(i);
  return combinations(all, static_cast<std::size_t>(s));
}

inline FlipWitnesses flipped_indices(const Support& supp, int m,
                                     const std::function<BitString(const TernaryVector&)>& encode) {
  std::map<BitString, std::vector<std::uint64_t>> classes;
  const std::uint64_t patterns = std::uint64_t{1} << supp.size();
  for (std::uint64_t bits = 0; bits < patterns; ++bits)
    classes[encode(TernaryVector::with_bits(m, supp, bits))].push_back(bits);
  FlipWitnesses out;
  const auto s = supp.size();
  for (const auto& [msg, members] : classes) {
    for (std::size_t t = 0; t < s; ++t) {
      if (out.by_index.count(supp[t])) continue;
      const std::uint64_t mask = std::uint64_t{1} << (s - 1 - t);
      std::optional<std::uint64_t> zero, one;
      for (auto b : members) {
        if (b & mask) {
          if (!one) one = b;
        } else if (!zero) {
          zero = b;
        }
      }
      if (zero && one) out.by_index.emplace(supp[t], std::pair{*zero, *one});
    }
  }
  return out;
}

/// Replays a candidate; returns it only if Charlie errs on one of the two
/// valid combinations.
inline std::optional<Counterexample> replay(const OneWayProtocol& p, int sigma, const TernaryVector& x,
                                            const TernaryVector& x_hat, const TernaryVector& y,
                                            const TernaryVector& y_hat) {
  Counterexample c{sigma, x, x_hat, y, y_hat};
  c.on_yes_instance = run_protocol(p, make_instance(x, y, p.m(), p.s()));
  c.on_no_instance = run_protocol(p, make_instance(x_hat, y_hat, p.m(), p.s()));
  if (c.yes_instance_wrong() || c.no_instance_wrong()) return c;
  return std::nullopt;
}

/// Searches supports I1 (Alice), I2 (Bob) with I1 cap I2 = {sigma} and sigma
/// flipped for both; the first hit in (I1, I2) order is replayed and returned.
inline std::optional<Counterexample> attack(const OneWayProtocol& p, unsigned threads = 1) {
  const int m = p.m(), s = p.s();
  const auto supports = all_supports(m, s);
  std::vector<FlipWitnesses> alice(supports.size()), bob(supports.size());
  parallel_for(supports.size(), threads, [&](std::size_t i) {
    alice[i] = flipped_indices(supports[i], m, [&](const TernaryVector& v) { return p.alice_encode(v); });
    bob[i] = flipped_indices(supports[i], m, [&](const TernaryVector& v) { return p.bob_encode(v); });
  });
  for (std::size_t i1 = 0; i1 < supports.size(); ++i1) {
    if (alice[i1].by_index.empty()) continue;
    for (std::size_t i2 = 0; i2 < supports.size(); ++i2) {
      const auto common = sorted_intersection(supports[i1], supports[i2]);
      if (common.size() != 1) continue;
      const int sigma = common[0];
      const auto fa = alice[i1].by_index.find(sigma);
      const auto fb = bob[i2].by_index.find(sigma);
      if (fa == alice[i1].by_index.end() || fb == bob[i2].by_index.end()) continue;
      const auto x = TernaryVector::with_bits(m, supports[i1], fa->second.first);
      const auto x_hat = TernaryVector::with_bits(m, supports[i1], fa->second.second);
      const auto y = TernaryVector::with_bits(m, supports[i2], fb->second.second);
      const auto y_hat = TernaryVector::with_bits(m, supports[i2], fb->second.first);
      if (auto c = replay(p, sigma, x, x_hat, y, y_hat)) return c;
      throw Error("flipped-index candidate did not replay to a wrong answer");
    }
  }
  return std::nullopt;
}

/// Exhaustive correctness: number of valid instances and of wrong answers,
/// plus the longest message seen.
struct SweepResult {
  std::size_t instances = 0;
  std::size_t wrong = 0;
  std::size_t max_message_bits = 0;
  std::size_t min_message_bits = SIZE_MAX;
};

inline SweepResult sweep_protocol(const OneWayProtocol& p) {
  SweepResult r;
  r.instances = for_each_valid_instance(p.m(), p.s(), [&](const OverlapInstance& inst) {
    const BitString a = p.alice_encode(inst.x), b = p.bob_encode(inst.y);
    r.max_message_bits = std::max({r.max_message_bits, a.size(), b.size()});
    r.min_message_bits = std::min({r.min_message_bits, a.size(), b.size()});
    if (p.charlie_decode(inst.x.support(), inst.y.support(), a, b) != answer(inst)) ++r.wrong;
  });
  return r;
}

// JSON instance format: {m, s, X, Y} with '*' for undefined entries.

inline nlohmann::json instance_to_json(const OverlapInstance& inst) {
  return {{"m", inst.m}, {"s", inst.s}, {"X", inst.x.to_string()}, {"Y", inst.y.to_string()}};
}

inline OverlapInstance instance_from_json(const nlohmann::json& j) {
  return make_instance(TernaryVector::from_string(j.at("X").get<std::string>()),
                       TernaryVector::from_string(j.at("Y").get<std::string>()), j.at("m").get<int>(),
                       j.at("s").get<int>());
}

inline nlohmann::json counterexample_to_json(const Counterexample& c) {
  return {{"sigma", c.sigma},
          {"X", c.x.to_string()},
          {"X_hat", c.x_hat.to_string()},
          {"Y", c.y.to_string()},
          {"Y_hat", c.y_hat.to_string()},
          {"yes_instance", {{"X", c.x.to_string()}, {"Y", c.y.to_string()}, {"truth", "yes"}, {"output", to_string(c.on_yes_instance)}}},
          {"no_instance", {{"X", c.x_hat.to_string()}, {"Y", c.y_hat.to_string()}, {"truth", "no"}, {"output", to_string(c.on_no_instance)}}},
          {"wrong", c.yes_instance_wrong() ? "yes_instance" : "no_instance"}};
}

}  // namespace sketchlb
