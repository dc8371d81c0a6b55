// Builds one member of the lower-bound family at n = 49, k = 3 and prints
// its condition next to the min cut.

#include <iostream>
#include <random>

#include "sketchlb/lbgraph.hpp"

int main() {
  using namespace sketchlb;
  std::mt19937_64 rng(2024);
  for (int round = 0; round < 5; ++round) {
    const LBGraphSpec spec = random_spec(49, 3, rng);
    const LemmaCheck check = check_lemma_lb(spec);
    const auto& s = spec.w_neighbors[static_cast<std::size_t>(spec.sigma - 1)];
    std::cout << "sigma = v" << spec.sigma << ", |S cap B| = " << intersection_size(s, spec.b)
              << ", condition " << to_string(check.condition) << ", min cut " << check.cut.value
              << (check.holds ? "" : "  <-- mismatch") << "\n";
  }
}
