#pragma once

#include <cstdint>
#include <vector>

#include "errors.hpp"
#include "multigraph.hpp"

namespace sketchlb {

inline long isqrt(long x) {
  if (x < 0) throw Error("isqrt of a negative number");
  long r = 0;
  while ((r + 1) * (r + 1) <= x) ++r;
  return r;
}

/// Canonical id layout of an n-node lower-bound graph: V = 1..|V|, then the
/// |W| = floor(sqrt n) ids of W, then u_A = n - 1 and u_B = n.
struct Layout {
  int n = 0;
  int v_count = 0;
  int w_count = 0;

  static Layout of(int n) {
    Layout l;
    l.n = n;
    l.w_count = static_cast<int>(isqrt(n));
    l.v_count = n - l.w_count - 2;
    return l;
  }

  bool valid() const noexcept { return v_count >= 1 && w_count >= 1; }
  NodeId u_a() const noexcept { return n - 1; }
  NodeId u_b() const noexcept { return n; }
  NodeId first_w() const noexcept { return v_count + 1; }
  bool in_v(NodeId id) const noexcept { return id >= 1 && id <= v_count; }
  bool in_w(NodeId id) const noexcept { return id > v_count && id <= v_count + w_count; }

  std::vector<NodeId> w_ids() const {
    std::vector<NodeId> out;
    for (int i = 0; i < w_count; ++i) out.push_back(first_w() + i);
    return out;
  }
};

}  // namespace sketchlb
