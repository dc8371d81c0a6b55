// Pushes a 2-bit sketching protocol through the three-party simulation at
// (m, s, k) = (6, 3, 2) and reports how often it answers wrongly.

#include <iostream>
#include <optional>

#include "sketchlb/protocols.hpp"
#include "sketchlb/reduction.hpp"

int main() {
  using namespace sketchlb;
  const int m = 6, s = 3, k = 2;
  WindowProtocol toy({reduction_n(m), k}, 2);
  const ReductionContext ctx = build_context(toy, m, s, k, 1);
  std::cout << "n = " << ctx.n << ", A* = " << ctx.a().size() << " ids, B* = " << ctx.b().size()
            << " ids, family: " << ctx.family_source << "\n";

  std::size_t total = 0, wrong = 0, faithful = 0;
  std::optional<OverlapInstance> example;
  for_each_valid_instance(m, s, [&](const OverlapInstance& inst) {
    ++total;
    const auto run = simulate(inst, ctx, toy);
    faithful += verify_fidelity(inst, ctx, toy).identical;
    if (run.output != answer(inst)) {
      ++wrong;
      if (!example) example = inst;
    }
  });
  std::cout << total << " instances, " << faithful << " simulated bit-identically, " << wrong << " answered wrongly\n";
  if (example)
    std::cout << "e.g. X = " << example->x.to_string() << ", Y = " << example->y.to_string()
              << ", truth " << to_string(answer(*example)) << "\n";
}
