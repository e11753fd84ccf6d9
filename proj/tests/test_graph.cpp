#include <gtest/gtest.h>

#include <random>
#include <sstream>

#include "dyncomm/graph.hpp"

using namespace dyncomm;

namespace {

DynamicNetwork parse(const std::string& text) {
  std::istringstream in(text);
  return read_dynamic(in);
}

bool has_kind(const std::vector<Violation>& v, const std::string& kind) {
  for (const auto& x : v)
    if (x.kind == kind) return true;
  return false;
}

}  // namespace

TEST(SnapshotGraph, CanonicalizesEdgesAndNodes) {
  SnapshotGraph g(1, {7}, {{2, 1}, {1, 2}, {3, 1}});
  EXPECT_EQ(g.num_edges(), 2u);
  EXPECT_EQ(g.nodes(), (std::vector<NodeId>{1, 2, 3, 7}));
  EXPECT_EQ(g.edges()[0], (EdgeKey{1, 2}));
  EXPECT_EQ(g.edges()[1], (EdgeKey{1, 3}));
  EXPECT_EQ(degree(g, 1), 2u);
  EXPECT_EQ(degree(g, 7), 0u);
  EXPECT_EQ(g.edge_position({2, 1}), 0);
  EXPECT_EQ(g.edge_position({2, 3}), -1);
}

TEST(SnapshotGraph, RejectsSelfLoop) { EXPECT_THROW(SnapshotGraph(1, {}, {{4, 4}}), Error); }

TEST(SnapshotGraph, UnknownNodeThrows) {
  SnapshotGraph g(1, {}, {{0, 1}});
  EXPECT_THROW(g.index_of(5), Error);
}

TEST(Validate, TriangleIsValid) {
  SnapshotGraph g(1, {}, {{0, 1}, {1, 2}, {0, 2}});
  EXPECT_TRUE(validate(g).empty());
}

TEST(Validate, ReportsSelfLoop) {
  auto g = SnapshotGraph::unchecked(1, {5}, {{5, 5}});
  auto v = validate(g);
  ASSERT_EQ(v.size(), 1u);
  EXPECT_EQ(v[0].kind, "self-loop");
}

TEST(Validate, ReportsDanglingEndpoint) {
  auto g = SnapshotGraph::unchecked(1, {0, 1}, {{0, 1}, {1, 9}});
  EXPECT_TRUE(has_kind(validate(g), "dangling endpoint"));
}

TEST(Validate, ReportsEveryViolation) {
  EdgeKey backwards;
  backwards.u = 2;
  backwards.v = 1;
  auto g = SnapshotGraph::unchecked(1, {1, 2, 3}, {{3, 3}, backwards, {1, 2}, {1, 2}, {1, 8}});
  auto v = validate(g);
  EXPECT_TRUE(has_kind(v, "self-loop"));
  EXPECT_TRUE(has_kind(v, "non-canonical edge"));
  EXPECT_TRUE(has_kind(v, "duplicate edge"));
  EXPECT_TRUE(has_kind(v, "dangling endpoint"));
}

TEST(ReadDynamic, ParsesSnapshotsCommentsAndNodeLines) {
  auto net = parse(
      "# header\n"
      "1 0 1\n"
      "2 1 2  # trailing comment\n"
      "1 1 2\n"
      "\n"
      "2 n 9\n");
  ASSERT_EQ(net.size(), 2u);
  EXPECT_EQ(net.snapshots[0].t(), 1u);
  EXPECT_EQ(net.snapshots[0].num_edges(), 2u);
  EXPECT_EQ(net.snapshots[1].nodes(), (std::vector<NodeId>{1, 2, 9}));
  EXPECT_EQ(degree(net.snapshots[1], 9), 0u);
}

TEST(ReadDynamic, FillsGapsWithEmptySnapshots) {
  auto net = parse("3 0 1\n1 0 1\n");
  ASSERT_EQ(net.size(), 3u);
  EXPECT_EQ(net.snapshots[1].t(), 2u);
  EXPECT_EQ(net.snapshots[1].num_edges(), 0u);
  EXPECT_EQ(net.snapshots[1].num_nodes(), 0u);
}

TEST(ReadDynamic, OrientationDoesNotMatter) {
  auto a = parse("1 2 1\n");
  auto b = parse("1 1 2\n");
  EXPECT_EQ(a.snapshots[0].edges(), b.snapshots[0].edges());
}

TEST(ReadDynamic, ReportsLineOfSelfLoop) {
  try {
    parse("1 0 1\n1 3 3\n");
    FAIL() << "expected a parse error";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 2u);
    EXPECT_NE(std::string(e.what()).find("self-loop"), std::string::npos);
  }
}

TEST(ReadDynamic, RejectsMalformedInput) {
  EXPECT_THROW(parse("1 0\n"), ParseError);
  EXPECT_THROW(parse("1 0 1 0.5\n"), ParseError);  // weights are not accepted
  EXPECT_THROW(parse("1 -1 2\n"), ParseError);
  EXPECT_THROW(parse("0 1 2\n"), ParseError);
  EXPECT_THROW(parse("1 a 2\n"), ParseError);
  EXPECT_THROW(parse("# nothing\n"), Error);
}

TEST(Properties, DegreeSumIsTwiceEdgeCount) {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 50; ++trial) {
    std::uniform_int_distribution<NodeId> node(0, 30);
    std::vector<EdgeKey> edges;
    for (int k = 0; k < 80; ++k) {
      NodeId a = node(rng), b = node(rng);
      if (a != b) edges.emplace_back(a, b);
    }
    SnapshotGraph g(1, {}, edges);
    std::size_t sum = 0;
    for (auto d : g.degrees()) sum += d;
    EXPECT_EQ(sum, 2 * g.num_edges());
    EXPECT_TRUE(validate(g).empty());
  }
}

TEST(Properties, SaveLoadRoundTrip) {
  DynamicNetwork net;
  net.snapshots.emplace_back(1, std::vector<NodeId>{4, 100}, std::vector<EdgeKey>{{1, 2}, {2, 3}});
  net.snapshots.emplace_back(2, std::vector<NodeId>{}, std::vector<EdgeKey>{{3, 1}, {5, 2}});
  net.snapshots.emplace_back(3, std::vector<NodeId>{8}, std::vector<EdgeKey>{});
  std::ostringstream out;
  write_dynamic(out, net);
  auto back = parse(out.str());
  ASSERT_EQ(back.size(), net.size());
  for (std::size_t t = 0; t < net.size(); ++t) {
    EXPECT_EQ(back.snapshots[t].nodes(), net.snapshots[t].nodes());
    EXPECT_EQ(back.snapshots[t].edges(), net.snapshots[t].edges());
  }
}
