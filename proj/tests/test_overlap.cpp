#include <gtest/gtest.h>

#include <set>

#include "sketchlb/overlap.hpp"

using namespace sketchlb;

namespace {

std::string property_of(const std::string& x, const std::string& y, int m, int s) {
  try {
    validate_instance(TernaryVector::from_string(x), TernaryVector::from_string(y), m, s);
  } catch (const InvalidInstance& e) {
    return e.property();
  }
  return "";
}

// Successor written from the interval listing rather than index arithmetic.
int successor(int m, int b) {
  std::vector<std::vector<int>> intervals;
  for (int i = 1; i <= m; ++i) {
    if (intervals.empty() || intervals.back().size() == 3) intervals.emplace_back();
    intervals.back().push_back(i);
  }
  for (const auto& iv : intervals) {
    for (std::size_t t = 0; t < iv.size(); ++t) {
      if (iv[t] != b) continue;
      if (iv.size() == 1) return 1;
      return iv[(t + 1) % iv.size()];
    }
  }
  return 0;
}

int reference_block(int m, const Support& I) {
  std::vector<int> candidates;
  for (int i : I)
    if (std::find(I.begin(), I.end(), successor(m, i)) != I.end()) candidates.push_back(i);
  return candidates.empty() ? 0 : *std::min_element(candidates.begin(), candidates.end());
}

}  // namespace

TEST(TernaryVector, StringRoundTrip) {
  const auto v = TernaryVector::from_string("1*0**1");
  EXPECT_EQ(v.length(), 6);
  EXPECT_EQ(v.support(), (Support{1, 3, 6}));
  EXPECT_EQ(v.support_bits().to_string(), "101");
  EXPECT_EQ(v.to_string(), "1*0**1");
  EXPECT_FALSE(v.defined(2));
  EXPECT_EQ(TernaryVector::with_bits(6, {1, 3, 6}, 0b101), v);
  EXPECT_THROW(TernaryVector::from_string("10x"), Error);
}

TEST(Instance, ExampleWithAnswerNo) {
  // supp X = {1,2,5}, supp Y = {5,7,8}, X_5 = 1, Y_5 = 0.
  const auto inst = make_instance(TernaryVector::from_string("01**1***"), TernaryVector::from_string("****0*11"), 8, 3);
  EXPECT_EQ(inst.sigma, 5);
  EXPECT_EQ(answer(inst), Answer::No);
  const auto swapped = make_instance(inst.y, inst.x, 8, 3);
  EXPECT_EQ(answer(swapped), Answer::Yes);
}

TEST(Instance, ViolationsAreNamed) {
  EXPECT_EQ(property_of("01**1***", "****0*11", 8, 3), "");
  EXPECT_EQ(property_of("01**1***", "*1**0**1", 8, 3), "P2");
  EXPECT_EQ(property_of("01**1***", "****1*11", 8, 3), "P1");
  EXPECT_EQ(property_of("011*****", "*****011", 8, 3), "P1");
  EXPECT_EQ(property_of("01**1***", "****0**1", 8, 3), "support-size");
  EXPECT_EQ(property_of("01**1***", "****0*11", 7, 3), "length");
  EXPECT_EQ(property_of("0111*", "***11", 5, 4), "s-range");
}

TEST(Cycles, SuccessorMap) {
  const CyclePartition c(8);
  EXPECT_EQ(c.intervals(), (std::vector<std::vector<int>>{{1, 2, 3}, {4, 5, 6}, {7, 8}}));
  EXPECT_EQ(c.phi(1), 2);
  EXPECT_EQ(c.phi(3), 1);
  EXPECT_EQ(c.phi(7), 8);
  EXPECT_EQ(c.phi(8), 7);
  EXPECT_EQ(CyclePartition(7).phi(7), 1);
  for (int m = 2; m <= 30; ++m) {
    const CyclePartition p(m);
    for (int b = 1; b <= m; ++b) {
      ASSERT_NE(p.phi(b), b);
      ASSERT_EQ(p.phi(b), successor(m, b));
      const bool in_triple = (b - 1) / 3 * 3 + 3 <= m;
      if (in_triple) {
        ASSERT_EQ(p.phi(p.phi(p.phi(b))), b);
      }
    }
  }
}

TEST(Blocks, HypothesisIsChecked) {
  EXPECT_THROW(build_blocks(9, 3), HypothesisViolated);
  EXPECT_THROW(build_blocks(8, 3), HypothesisViolated);
  EXPECT_NO_THROW(build_blocks(8, 4));
}

TEST(Blocks, TotalAndSeparatingForSmallParameters) {
  for (auto [m, s] : {std::pair{7, 4}, {8, 4}, {9, 4}, {10, 5}, {11, 5}}) {
    const auto table = build_blocks(m, s).materialize();
    ASSERT_EQ(table.size(), binomial(static_cast<std::uint64_t>(m), static_cast<std::uint64_t>(s)));
    for (const auto& [I, i] : table) {
      ASSERT_EQ(i, reference_block(m, I));
      ASSERT_TRUE(std::binary_search(I.begin(), I.end(), i));  // property (a)
    }
    for (const auto& [I, i] : table) {
      for (const auto& [J, j] : table) {
        const auto common = intersection_size(I, J);
        if (i == j) {
          ASSERT_GE(common, 2U);  // property (b)
        }
        if (common == 1) {
          ASSERT_NE(i, j);
        }
      }
    }
  }
}

TEST(AppB, EncodeExamples) {
  const auto blocks = build_blocks(9, 4);
  const auto x = TernaryVector::from_string("101*****1");
  EXPECT_EQ(blocks.block_of(x.support()), 1);
  EXPECT_EQ(appb_encode(x, blocks).to_string(), "011");
  EXPECT_EQ(appb_encode(TernaryVector::from_string("0*0*0*0**"), blocks).to_string(), "000");
}

TEST(AppB, EachMessageHasTwoPreimagesDifferingAtTheDroppedBit) {
  const auto blocks = build_blocks(9, 4);
  const Support supp{2, 4, 5, 9};
  const int dropped = blocks.block_of(supp);
  std::map<BitString, std::vector<TernaryVector>> classes;
  for (std::uint64_t bits = 0; bits < 16; ++bits) {
    const auto v = TernaryVector::with_bits(9, supp, bits);
    classes[appb_encode(v, blocks)].push_back(v);
  }
  EXPECT_EQ(classes.size(), 8U);
  for (const auto& [msg, members] : classes) {
    ASSERT_EQ(members.size(), 2U);
    for (int i : supp) EXPECT_EQ(members[0][i] != members[1][i], i == dropped);
  }
}

TEST(AppB, ExhaustivelyCorrect) {
  for (auto [m, s] : {std::pair{7, 4}, {8, 4}, {9, 4}}) {
    const AppBProtocol p(m, s);
    std::size_t yes = 0, total = 0;
    for_each_valid_instance(m, s, [&](const OverlapInstance& inst) {
      ++total;
      const bool truth = inst.x[inst.sigma] == 0;  // XOR promise: then Y_sigma = 1
      yes += truth;
      const BitString a = p.alice_encode(inst.x), b = p.bob_encode(inst.y);
      ASSERT_EQ(a.size(), static_cast<std::size_t>(s - 1));
      ASSERT_EQ(b.size(), static_cast<std::size_t>(s - 1));
      ASSERT_EQ(p.charlie_decode(inst.x.support(), inst.y.support(), a, b), truth ? Answer::Yes : Answer::No);
    });
    EXPECT_EQ(yes * 2, total);
    const auto sweep = sweep_protocol(p);
    EXPECT_EQ(sweep.instances, total);
    EXPECT_EQ(sweep.wrong, 0U);
  }
}

TEST(AppB, DecodeRejectsBadInput) {
  const AppBProtocol p(9, 4);
  const BitString three = BitString::from_string("000");
  EXPECT_THROW(p.charlie_decode({1, 2, 3, 4}, {5, 6, 7, 8}, three, three), InvalidInstance);
  EXPECT_THROW(p.charlie_decode({1, 2, 3, 4}, {1, 2, 7, 8}, three, three), InvalidInstance);
  EXPECT_THROW(p.charlie_decode({1, 2, 3, 4}, {4, 6, 7, 8}, BitString::from_string("00"), three), DecodeError);
}

TEST(ValidInstances, CountMatchesFormula) {
  // Ordered support pairs meeting in one index, 2^s X-patterns, 2^(s-1) Y-patterns.
  for (auto [m, s] : {std::pair{7, 4}, {9, 4}, {6, 3}}) {
    std::size_t pairs = static_cast<std::size_t>(binomial(m, s) * s * binomial(m - s, s - 1));
    const auto count = for_each_valid_instance(m, s, [](const OverlapInstance&) {});
    EXPECT_EQ(count, pairs * (std::size_t{1} << s) * (std::size_t{1} << (s - 1)));
  }
}

TEST(Attack, AppBHasNoCounterexample) {
  EXPECT_FALSE(attack(AppBProtocol(9, 4), 4));
  EXPECT_FALSE(attack(AppBProtocol(7, 4)));
}

TEST(Attack, FlippedIndexOfAppBIsTheDroppedIndex) {
  const AppBProtocol p(9, 4);
  for (const auto& supp : all_supports(9, 4)) {
    const auto w = flipped_indices(supp, 9, [&](const TernaryVector& v) { return p.alice_encode(v); });
    ASSERT_EQ(w.by_index.size(), 1U);
    ASSERT_EQ(w.by_index.begin()->first, p.blocks().block_of(supp));
  }
}

TEST(Attack, TruncationIsBrokenAndTheCounterexampleReplays) {
  const TruncationProtocol p(9, 4, 2);
  const auto c = attack(p, 2);
  ASSERT_TRUE(c);
  // Replay here, from scratch.
  EXPECT_EQ(p.alice_encode(c->x), p.alice_encode(c->x_hat));
  EXPECT_EQ(p.bob_encode(c->y), p.bob_encode(c->y_hat));
  const auto yes = make_instance(c->x, c->y, 9, 4);
  const auto no = make_instance(c->x_hat, c->y_hat, 9, 4);
  EXPECT_EQ(yes.sigma, c->sigma);
  EXPECT_EQ(answer(yes), Answer::Yes);
  EXPECT_EQ(answer(no), Answer::No);
  const Answer out_yes = run_protocol(p, yes), out_no = run_protocol(p, no);
  EXPECT_EQ(out_yes, out_no);
  EXPECT_TRUE(out_yes != Answer::Yes || out_no != Answer::No);
  EXPECT_GT(sweep_protocol(p).wrong, 0U);
}

TEST(Attack, FullSupportHasNoCollisions) {
  const FullSupportProtocol p(9, 4);
  EXPECT_FALSE(attack(p));
  EXPECT_EQ(sweep_protocol(p).wrong, 0U);
}

TEST(Instance, JsonRoundTrip) {
  const auto inst = make_instance(TernaryVector::from_string("01**1***"), TernaryVector::from_string("****0*11"), 8, 3);
  const auto back = instance_from_json(instance_to_json(inst));
  EXPECT_EQ(back.x, inst.x);
  EXPECT_EQ(back.y, inst.y);
  EXPECT_EQ(back.sigma, 5);
  EXPECT_THROW(make_overlap_protocol("nope", 9, 4), Error);
}
