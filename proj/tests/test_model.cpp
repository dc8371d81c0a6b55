#include <gtest/gtest.h>

#include <random>

#include "sketchlb/lbgraph.hpp"
#include "sketchlb/model.hpp"
#include "sketchlb/protocols.hpp"

using namespace sketchlb;

TEST(BitString, AppendAndReadAgreeOnRandomFields) {
  std::mt19937_64 rng(11);
  for (int round = 0; round < 200; ++round) {
    BitString bits;
    std::vector<std::pair<std::uint64_t, unsigned>> fields;
    std::string expected;
    const int count = static_cast<int>(rng() % 20);
    for (int i = 0; i < count; ++i) {
      const unsigned width = 1 + static_cast<unsigned>(rng() % 64);
      std::uint64_t value = rng();
      if (width < 64) value &= (std::uint64_t{1} << width) - 1;
      fields.emplace_back(value, width);
      bits.append(value, width);
      for (unsigned b = width; b-- > 0;) expected.push_back(((value >> b) & 1U) ? '1' : '0');
    }
    ASSERT_EQ(bits.to_string(), expected);
    std::size_t pos = 0;
    for (auto [value, width] : fields) {
      ASSERT_EQ(bits.read(pos, width), value);
      pos += width;
    }
    EXPECT_EQ(BitString::from_string(expected), bits);
  }
}

TEST(BitString, MsbFirstAndLexicographicOrder) {
  BitString b;
  b.append(0b101, 3);
  EXPECT_EQ(b.to_string(), "101");
  EXPECT_LT(BitString::from_string("01"), BitString::from_string("1"));
  EXPECT_LT(BitString::from_string("1"), BitString::from_string("10"));
  EXPECT_EQ(BitString::from_string("").size(), 0U);
  EXPECT_THROW(BitString::from_string("102"), DecodeError);
  EXPECT_THROW(b.read(2, 2), DecodeError);
}

TEST(MultiGraph, NeighborhoodOfTriangle) {
  MultiGraph g(3);
  g.add_edge(1, 2);
  g.add_edge(2, 3);
  g.add_edge(1, 3);
  EXPECT_EQ(neighborhood(g, 1), (Neighborhood{{2, 1}, {3, 1}}));
}

TEST(MultiGraph, ParallelEdgesAccumulate) {
  MultiGraph g(2);
  g.add_edge(1, 2, 2);
  g.add_edge(2, 1);
  EXPECT_EQ(neighborhood(g, 1), (Neighborhood{{2, 3}}));
  EXPECT_EQ(g.multiplicity(2, 1), 3);
}

TEST(MultiGraph, Errors) {
  MultiGraph g(3);
  EXPECT_THROW(neighborhood(g, 4), UnknownNode);
  EXPECT_THROW(neighborhood(g, 0), UnknownNode);
  EXPECT_THROW(g.add_edge(2, 2), GraphError);
  EXPECT_THROW(g.add_edge(1, 2, 0), GraphError);
  EXPECT_THROW(MultiGraph(0), GraphError);
}

TEST(GraphFile, RoundTripAndRejects) {
  MultiGraph g(4);
  g.add_edge(3, 1, 2);
  g.add_edge(2, 4);
  const std::string text = graph_to_string(g);
  EXPECT_EQ(text, "n 4\n1 3 2\n2 4 1\n");
  EXPECT_EQ(graph_from_string(text), g);
  EXPECT_THROW(graph_from_string("n 3\n2 1 1\n"), GraphError);          // u > v
  EXPECT_THROW(graph_from_string("n 3\n1 2 0\n"), GraphError);          // zero multiplicity
  EXPECT_THROW(graph_from_string("n 3\n1 3 1\n1 2 1\n"), GraphError);   // descending
  EXPECT_THROW(graph_from_string("n 3\n1 4 1\n"), GraphError);          // out of range
  EXPECT_THROW(graph_from_string("m 3\n"), GraphError);
  EXPECT_THROW(graph_from_string("n 3\r\n1 2 1\r\n"), GraphError);
}

namespace {

class OverlongProtocol final : public SketchProtocol {
 public:
  std::string name() const override { return "overlong"; }
  Params params() const override { return {2, 1}; }
  std::size_t max_bits() const override { return 2; }
  BitString encode(const NodeView&, const SharedRandomness&) const override { return BitString::from_string("101"); }
  Decision decode(std::span<const NodeMessage>, const SharedRandomness&) const override { return Decision::Connected; }
};

LBGraphSpec fixed_spec_36_3() {
  // n = 36: |W| = 6 (ids 29..34), |V| = 28, u_A = 35, u_B = 36.
  std::mt19937_64 rng(3636);
  return random_spec(36, 3, {29, 30, 31}, {32, 33, 34}, rng);
}

}  // namespace

TEST(Execute, FullInformationOnParallelPair) {
  MultiGraph g(2);
  g.add_edge(1, 2, 2);
  FullInformationProtocol full({2, 2});
  const auto t = execute(full, g, no_advice(2), SharedRandomness::none());
  EXPECT_EQ(t.decision, Decision::Connected);
  ASSERT_EQ(t.messages.size(), 2U);
  EXPECT_EQ(t.messages[0].id, 1);

  MultiGraph thin(2);
  thin.add_edge(1, 2, 1);
  EXPECT_EQ(execute(full, thin, no_advice(2), SharedRandomness::none()).decision, Decision::NotConnected);
}

TEST(Execute, SingleNodeGraph) {
  MultiGraph g(1);
  FullInformationProtocol full({1, 2});
  const auto t = execute(full, g, no_advice(1), SharedRandomness::none());
  ASSERT_EQ(t.messages.size(), 1U);
  EXPECT_EQ(t.decision, Decision::Connected);
  ConstantProtocol constant({1, 2}, Decision::NotConnected);
  EXPECT_EQ(execute(constant, g, no_advice(1), SharedRandomness::none()).decision, Decision::NotConnected);
}

TEST(Execute, OverflowIsReported) {
  MultiGraph g(2);
  g.add_edge(1, 2);
  EXPECT_THROW(execute(OverlongProtocol{}, g, no_advice(2), SharedRandomness::none()), EncodingOverflow);
}

TEST(Execute, AdviceMapMustCoverAllNodes) {
  MultiGraph g(3);
  EXPECT_THROW(execute(ConstantProtocol({3, 1}), g, no_advice(2), SharedRandomness::none()), Error);
}

TEST(Execute, WindowTranscriptMatchesStandaloneEncodes) {
  const auto spec = fixed_spec_36_3();
  const auto built = build_lb_graph(spec);
  WindowProtocol window({36, 3}, 2);
  const auto t = execute(window, built.graph, built.advice, SharedRandomness::none());
  ASSERT_EQ(t.messages.size(), 36U);
  std::size_t ones = 0;
  for (NodeId id = 1; id <= 36; ++id) {
    NodeView view{id, built.graph.neighborhood(id), built.advice[static_cast<std::size_t>(id - 1)], {36, 3}};
    const BitString alone = window.encode(view, SharedRandomness::none());
    EXPECT_EQ(t.messages[static_cast<std::size_t>(id - 1)].bits, alone) << "node " << id;
    ones += alone.popcount();
  }
  EXPECT_EQ(t.decision, ones % 2 == 0 ? Decision::Connected : Decision::NotConnected);
}

TEST(Execute, DeterministicAcrossThreadCounts) {
  const auto spec = fixed_spec_36_3();
  const auto built = build_lb_graph(spec);
  FullInformationProtocol full({36, 3});
  const auto once = execute(full, built.graph, built.advice, SharedRandomness::none(), 1);
  for (unsigned threads : {1U, 2U, 4U, 7U}) {
    EXPECT_EQ(execute(full, built.graph, built.advice, SharedRandomness::none(), threads), once);
  }
}

TEST(Execute, RefereeSeesOnlyMessages) {
  // Two different graphs whose parity messages coincide: the referee must
  // decide identically, since it only receives the messages.
  MultiGraph g1(4), g2(4);
  g1.add_edge(1, 3);
  g1.add_edge(2, 4);
  g2.add_edge(1, 3);
  g2.add_edge(2, 4);
  g2.add_edge(1, 2, 2);  // adds 4 to node 1 and 2 to node 2: parities unchanged
  ParityProtocol parity({4, 1});
  const auto t1 = execute(parity, g1, no_advice(4), SharedRandomness::none());
  const auto t2 = execute(parity, g2, no_advice(4), SharedRandomness::none());
  ASSERT_NE(g1, g2);
  ASSERT_EQ(t1.messages, t2.messages);
  EXPECT_EQ(parity.decode(t2.messages, SharedRandomness::none()), t1.decision);
  EXPECT_EQ(t1.decision, t2.decision);
}

TEST(Execute, FullInformationReconstructsTheGraph) {
  const auto spec = fixed_spec_36_3();
  const auto built = build_lb_graph(spec);
  FullInformationProtocol full({36, 3});
  const auto t = execute(full, built.graph, built.advice, SharedRandomness::none());
  EXPECT_EQ(full.reconstruct(t.messages), built.graph);
}

TEST(Neighborhood, HubOfLowerBoundGraph) {
  const auto spec = fixed_spec_36_3();
  const auto built = build_lb_graph(spec);
  const Layout layout = spec.layout();
  // Recompute from the rules: one edge to every A-node, k to every
  // A-restricted node and to sigma.
  std::map<NodeId, long> expected;
  for (NodeId w : spec.a) expected[w] = 1;
  for (NodeId v = 1; v <= layout.v_count; ++v) {
    const Advice role = spec.roles[static_cast<std::size_t>(v - 1)];
    if (role == Advice::ARestricted || role == Advice::Sigma) expected[v] = spec.k;
  }
  EXPECT_EQ(neighborhood(built.graph, layout.u_a()), Neighborhood(expected.begin(), expected.end()));
}

TEST(SharedRandomness, DeriveIsStableAndSeedSensitive) {
  auto r = SharedRandomness::seeded(5);
  EXPECT_EQ(r.derive({1, 2}), SharedRandomness::seeded(5).derive({1, 2}));
  EXPECT_NE(r.derive({1, 2}), r.derive({2, 1}));
  EXPECT_NE(r.derive({1, 2}), SharedRandomness::seeded(6).derive({1, 2}));
  EXPECT_TRUE(SharedRandomness::none().empty());
  EXPECT_THROW(SharedRandomness::none().derive({1}), Error);
}
