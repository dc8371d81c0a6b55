// Acceptance run: one PASS/FAIL line per criterion, exit status 0 iff all pass.

#include <boost/math/distributions/binomial.hpp>
#include <chrono>
#include <cstdio>
#include <functional>
#include <random>
#include <string>

#include "oracles.hpp"
#include "sketchlb/sketchlb.hpp"

using namespace sketchlb;

namespace {

struct Verdict {
  bool pass = false;
  std::string detail;
};

int failures = 0;

void report(int id, const char* name, const std::function<Verdict()>& body) {
  const auto t0 = std::chrono::steady_clock::now();
  Verdict v;
  try {
    v = body();
  } catch (const std::exception& e) {
    v = {false, std::string("exception: ") + e.what()};
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  std::printf("[%s] %d %s: %s (%.2fs)\n", v.pass ? "PASS" : "FAIL", id, name, v.detail.c_str(), secs);
  std::fflush(stdout);
  failures += !v.pass;
}

std::string ratio(std::size_t good, std::size_t total) { return std::to_string(good) + "/" + std::to_string(total); }

// Re-derives the four separated-pair properties by encoding from scratch.
bool record_holds(const SketchProtocol& p, const SeparatedPairRecord& r, const IdSet& a, const IdSet& b, int n, int k) {
  const Params params{n, k};
  const auto none = SharedRandomness::none();
  const auto enc = [&](Advice role, const IdSet& nbrs) { return p.encode(role_view(r.node, role, nbrs, params), none); };
  const auto meet = [](const IdSet& s, const IdSet& side) {
    IdSet out;
    for (NodeId x : s)
      if (std::find(side.begin(), side.end(), x) != side.end()) out.push_back(x);
    return out;
  };
  const bool i = enc(Advice::Sigma, r.s0) == enc(Advice::Sigma, r.s1) && enc(Advice::Sigma, r.s0) == r.witness.sigma;
  const bool ii = enc(Advice::ARestricted, meet(r.s0, a)) == enc(Advice::ARestricted, meet(r.s1, a)) &&
                  enc(Advice::ARestricted, meet(r.s0, a)) == r.witness.a;
  const bool iii = enc(Advice::BRestricted, meet(r.s0, b)) == enc(Advice::BRestricted, meet(r.s1, b)) &&
                   enc(Advice::BRestricted, meet(r.s0, b)) == r.witness.b;
  const bool iv = static_cast<int>(meet(r.s0, b).size()) < k && static_cast<int>(meet(r.s1, b).size()) >= k;
  return i && ii && iii && iv;
}

struct PartitionRun {
  std::unique_ptr<SketchProtocol> protocol;
  SetFamily family;
  PartitionContext ctx;
};

// Contexts reused by criteria 6 and 7.
std::vector<PartitionRun> partition_runs() {
  std::vector<PartitionRun> runs;
  const auto add = [&](const std::string& name, int n, std::size_t target, std::uint64_t seed) {
    PartitionRun run;
    run.protocol = make_sketch_protocol(name, {n, 2});
    run.family = sample_family(Layout::of(n).w_ids(), 3, 0.8, target, seed);
    run.ctx = choose_partition(*run.protocol, run.family, 2, 16, seed, 4);
    runs.push_back(std::move(run));
  };
  add("window", 256, 30, 11);
  add("parity", 256, 30, 12);
  add("window", 1024, 40, 13);
  add("parity", 1024, 40, 14);
  return runs;
}

}  // namespace

int main() {
  report(1, "lower-bound graph equivalence", [] {
    std::size_t ok = 0, total = 0;
    const auto check = [&](const LBGraphSpec& spec) {
      const auto g = build_lb_graph(spec);
      const bool connected = oracle::min_cut_value(g.graph) >= spec.k;
      ok += connected == (condition_of(spec) == Condition::C1);
      ++total;
    };
    const auto exhaustive = for_each_exhaustive_spec(36, 2, 36, check);
    for_each_random_spec(49, 3, 500, 49, check);
    for_each_random_spec(64, 3, 500, 64, check);
    return Verdict{ok == total && exhaustive == 1000,
                   ratio(ok, total) + " agree (" + std::to_string(exhaustive) + " exhaustive at n=36)"};
  });

  report(2, "block protocol exhaustive correctness", [] {
    std::size_t ok = 0, total = 0, bad_length = 0;
    for (auto [m, s] : {std::pair{7, 4}, {8, 4}, {9, 4}}) {
      const AppBProtocol p(m, s);
      const auto count = for_each_valid_instance(m, s, [&](const OverlapInstance& inst) {
        const BitString a = p.alice_encode(inst.x), b = p.bob_encode(inst.y);
        bad_length += a.size() != static_cast<std::size_t>(s - 1) || b.size() != static_cast<std::size_t>(s - 1);
        // Truth from the vectors alone: the unique shared index carries X = 0 for "yes".
        int shared = 0, x_bit = -1;
        for (int i = 1; i <= m; ++i)
          if (inst.x.defined(i) && inst.y.defined(i)) ++shared, x_bit = inst.x[i];
        const Answer truth = shared == 1 && x_bit == 0 ? Answer::Yes : Answer::No;
        ok += p.charlie_decode(inst.x.support(), inst.y.support(), a, b) == truth;
      });
      total += count;
      const auto expected = binomial(m, s) * static_cast<std::uint64_t>(s) * binomial(m - s, s - 1) << (2 * s - 1);
      if (count != expected) return Verdict{false, "instance count " + std::to_string(count) + " != " + std::to_string(expected)};
    }
    return Verdict{ok == total && bad_length == 0,
                   ratio(ok, total) + " correct, " + std::to_string(bad_length) + " messages not s-1 bits"};
  });

  report(3, "attack soundness and discrimination", [] {
    const bool none_for_block = !attack(AppBProtocol(9, 4), 4);
    const TruncationProtocol trunc(9, 4, 2);
    const auto c = attack(trunc, 4);
    bool replayed = false;
    if (c) {
      const auto yes = make_instance(c->x, c->y, 9, 4), no = make_instance(c->x_hat, c->y_hat, 9, 4);
      const bool same_msgs = trunc.alice_encode(c->x) == trunc.alice_encode(c->x_hat) &&
                             trunc.bob_encode(c->y) == trunc.bob_encode(c->y_hat);
      const bool wrong = run_protocol(trunc, yes) != Answer::Yes || run_protocol(trunc, no) != Answer::No;
      replayed = same_msgs && wrong && answer(yes) == Answer::Yes && answer(no) == Answer::No;
    }
    return Verdict{none_for_block && replayed, std::string("block protocol: ") +
                                                   (none_for_block ? "no counterexample" : "counterexample found") +
                                                   "; truncation: " + (replayed ? "replayed counterexample" : "none")};
  });

  WindowProtocol toy({reduction_n(6), 2}, 2);
  const auto toy_ctx = build_context(toy, 6, 3, 2, 1);

  report(4, "simulation fidelity", [&] {
    std::size_t ok = 0, total = 0;
    for_each_valid_instance(6, 3, [&](const OverlapInstance& inst) {
      const auto sim = simulate(inst, toy_ctx, toy);
      const auto g = build_compatible_graph(inst, toy_ctx);
      const auto direct = execute(toy, g.graph, g.advice, SharedRandomness::none());
      ok += sim.assembled == direct.messages;
      ++total;
    });
    return Verdict{ok == total && total == 5760, ratio(ok, total) + " bit-identical"};
  });

  report(5, "semantic correspondence", [&] {
    std::size_t ok = 0, total = 0;
    for_each_valid_instance(6, 3, [&](const OverlapInstance& inst) {
      const auto g = build_compatible_graph(inst, toy_ctx);
      ok += (oracle::min_cut_value(g.graph) >= 2) == (answer(inst) == Answer::Yes);
      ++total;
    });
    return Verdict{ok == total && total == 5760, ratio(ok, total) + " match"};
  });

  const auto runs = partition_runs();

  report(6, "set-family overlap and pigeonhole floor", [&] {
    std::size_t families = 0, families_ok = 0, blocks = 0, blocks_ok = 0;
    const auto pairwise_ok = [](const SetFamily& f) {
      const auto bound = static_cast<std::size_t>(std::floor(f.epsilon * f.d / 2 + 1e-9));
      for (std::size_t i = 0; i < f.members.size(); ++i)
        for (std::size_t j = i + 1; j < f.members.size(); ++j)
          if (intersection_size(f.members[i], f.members[j]) > bound) return false;
      return true;
    };
    std::mt19937_64 rng(6);
    for (int round = 0; round < 300; ++round) {
      const int w = 8 + static_cast<int>(rng() % 40);
      const int d = 1 + static_cast<int>(rng() % 9);
      if (d > w) continue;
      const double eps = 0.2 + 0.75 * static_cast<double>(rng() % 100) / 100.0;
      IdSet ground;
      for (int i = 1; i <= w; ++i) ground.push_back(i);
      try {
        const auto f = sample_family(ground, d, eps, 2 + rng() % 30, rng(), 3000);
        ++families;
        families_ok += pairwise_ok(f);
      } catch (const FamilyTooSparse&) {
      }
    }
    for (const auto& run : runs) {
      ++families;
      families_ok += pairwise_ok(run.family);
      const int n = run.ctx.n;
      for (NodeId v = 1; v <= Layout::of(n).v_count; ++v) {
        const auto parts = message_partitions(*run.protocol, v, run.family, run.ctx.a, run.ctx.b, n, 2);
        const auto t = common_block(parts, run.family, run.ctx.a, run.ctx.b);
        ++blocks;
        blocks_ok += (t.members.size() << (3 * run.protocol->max_bits())) >= run.family.size();
      }
    }
    return Verdict{families_ok == families && blocks_ok == blocks && families > 100,
                   ratio(families_ok, families) + " families valid, " + ratio(blocks_ok, blocks) + " blocks meet the floor"};
  });

  report(7, "separated-pair records re-verify", [&] {
    std::size_t ok = 0, total = 0;
    for (const auto& run : runs) {
      for (const auto& [node, r] : run.ctx.good) {
        ok += r.node == node && record_holds(*run.protocol, r, run.ctx.a, run.ctx.b, run.ctx.n, 2);
        ++total;
      }
    }
    for (int i = 1; i <= toy_ctx.m; ++i) {
      ok += record_holds(toy, toy_ctx.record(i), toy_ctx.a(), toy_ctx.b(), toy_ctx.n, 2);
      ++total;
    }
    return Verdict{ok == total && total > 0, ratio(ok, total) + " records"};
  });

  report(8, "AGM sketches against the oracle", [] {
    constexpr std::size_t trials = 200;
    constexpr double delta = 0.05;
    std::vector<int> agree(trials), within(trials), one_sided(trials);
    parallel_for(trials, 8, [&](std::size_t t) {
      std::mt19937_64 rng(splitmix64(8000 + t));
      const int n = std::uniform_int_distribution<int>(8, 64)(rng);
      const int k = std::uniform_int_distribution<int>(1, 3)(rng);
      const double p = std::uniform_real_distribution<double>(0.05, 0.35)(rng);
      const auto g = oracle::random_multigraph(n, p, 2, rng);
      AgmSketchProtocol agm({n, k}, delta);
      const auto tr = execute(agm, g, no_advice(n), SharedRandomness::seeded(rng()));
      const bool truth = oracle::min_cut_value(g) >= k;
      const bool said = tr.decision == Decision::Connected;
      agree[t] = truth == said;
      one_sided[t] = truth || !said;
      std::size_t longest = 0;
      for (const auto& m : tr.messages) longest = std::max(longest, m.bits.size());
      within[t] = static_cast<double>(longest) <= agm_budget_bound(n, k, delta);
    });
    const auto sum = [](const std::vector<int>& v) { return static_cast<std::size_t>(std::count(v.begin(), v.end(), 1)); };
    const std::size_t a = sum(agree);
    using boost::math::binomial_distribution;
    const double lo = binomial_distribution<>::find_lower_bound_on_p(trials, static_cast<double>(a), 0.005);
    const double hi = binomial_distribution<>::find_upper_bound_on_p(trials, static_cast<double>(a), 0.005);
    char band[96];
    std::snprintf(band, sizeof band, " agree, 99%% band [%.3f, %.3f], ", lo, hi);
    return Verdict{a * 100 >= trials * 95 && sum(within) == trials,
                   ratio(a, trials) + band + ratio(sum(within), trials) + " within budget, " +
                       ratio(sum(one_sided), trials) + " one-sided"};
  });

  report(9, "communication accounting", [] {
    std::size_t ok = 0, total = 0;
    const auto sweep = [&](const SketchProtocol& p, int m, int s, int k) {
      const auto ctx = build_context(p, m, s, k, 9);
      const std::size_t w = ctx.a().size() + ctx.b().size();
      const std::size_t root = static_cast<std::size_t>(Layout::of(ctx.n).w_count);
      for_each_valid_instance(m, s, [&](const OverlapInstance& inst) {
        const auto run = simulate(inst, ctx, p);
        std::set<std::size_t> lengths;
        for (const auto* side : {&run.alice, &run.bob})
          for (const auto& msg : *side) lengths.insert(msg.bits.size());
        const std::size_t l = lengths.size() == 1 ? *lengths.begin() : 0;
        ok += lengths.size() == 1 && run.alice_bits + run.bob_bits == w * l && run.alice_bits + run.bob_bits <= root * l;
        ++total;
      });
    };
    for (int m : {6, 7}) {
      const int n = reduction_n(m);
      for (unsigned bits : {1U, 2U, 3U}) sweep(WindowProtocol({n, 2}, bits), m, 3, 2);
      sweep(ParityProtocol({n, 2}), m, 3, 2);
    }
    return Verdict{ok == total && total > 0, ratio(ok, total) + " runs exact"};
  });

  std::printf("%d of 9 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
