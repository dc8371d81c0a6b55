// Runs the (s-1)-bit block protocol on a few instances and shows which bit
// each party leaves out.

#include <iostream>

#include "sketchlb/overlap.hpp"

int main() {
  using namespace sketchlb;
  const AppBProtocol p(9, 4);
  const std::pair<const char*, const char*> cases[] = {
      {"101*****1", "0**011***"},
      {"0*0*0*0**", "***1*111*"},
      {"**11*01**", "1*0****01"},
  };
  for (const auto& [xs, ys] : cases) {
    const auto inst = make_instance(TernaryVector::from_string(xs), TernaryVector::from_string(ys), 9, 4);
    const BitString a = p.alice_encode(inst.x), b = p.bob_encode(inst.y);
    std::cout << "X = " << xs << "  Y = " << ys << "  sigma = " << inst.sigma << "\n"
              << "  Alice drops index " << p.blocks().block_of(inst.x.support()) << ", sends " << a.to_string() << "\n"
              << "  Bob drops index " << p.blocks().block_of(inst.y.support()) << ", sends " << b.to_string() << "\n"
              << "  Charlie says " << to_string(p.charlie_decode(inst.x.support(), inst.y.support(), a, b))
              << ", truth " << to_string(answer(inst)) << "\n";
  }
}
