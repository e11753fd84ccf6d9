#include <gtest/gtest.h>

#include <sstream>

#include "dyncomm/benchgen.hpp"

using namespace dyncomm;

namespace {

GenConfig table2_static(std::uint64_t seed) {
  GenConfig c = table2_config();
  c.snapshots = 1;
  c.seed = seed;
  return c;
}

// Single-membership nodes whose community changed between two snapshots.
std::size_t moved_singles(const PlantedCover& a, const PlantedCover& b) {
  std::size_t moved = 0;
  for (NodeId i = 0; i < a.num_nodes(); ++i)
    if (a.memberships(i).size() == 1 && a.memberships(i) != b.memberships(i)) ++moved;
  return moved;
}

double intra_fraction(const PlantedCover& p, const SnapshotGraph& g) {
  std::size_t intra = 0;
  for (const auto& e : g.edges()) {
    const auto& a = p.memberships(e.u);
    const auto& b = p.memberships(e.v);
    intra += std::any_of(a.begin(), a.end(), [&](CommunityId r) { return b.count(r) != 0; });
  }
  return static_cast<double>(intra) / static_cast<double>(g.num_edges());
}

}  // namespace

TEST(PlantMemberships, Table2Counts) {
  GenConfig c = table2_config();
  Rng rng(1);
  auto p = plant_memberships(c, rng);
  std::size_t singles = 0, triples = 0, total = 0;
  for (NodeId i = 0; i < c.n; ++i) {
    const auto m = p.memberships(i).size();
    singles += m == 1;
    triples += m == 3;
    total += m;
  }
  EXPECT_EQ(singles, 480u);
  EXPECT_EQ(triples, 20u);
  EXPECT_EQ(total, (c.n - c.overlap_nodes) + c.overlap_nodes * c.memberships_per_overlap);
  EXPECT_EQ(p.k(), c.k);
}

TEST(PlantMemberships, NoOverlapIsPartition) {
  GenConfig c = desk_config();
  c.overlap_nodes = 0;
  Rng rng(2);
  auto p = plant_memberships(c, rng);
  for (NodeId i = 0; i < c.n; ++i) EXPECT_EQ(p.memberships(i).size(), 1u);
  for (const auto& [r, m] : p.communities()) EXPECT_EQ(m.size(), c.n / c.k);
}

TEST(PlantMemberships, TooFewCommunitiesThrows) {
  GenConfig c = desk_config();
  c.k = 2;
  c.memberships_per_overlap = 3;
  Rng rng(1);
  EXPECT_THROW(plant_memberships(c, rng), Error);
}

TEST(GenerateSnapshot, ZeroMixingKeepsEdgesInside) {
  GenConfig c = desk_config();
  c.mixing = 0.0;
  c.snapshots = 1;
  auto b = generate_dynamic(c, {});
  EXPECT_EQ(intra_fraction(b.truth.snapshots[0], b.network.snapshots[0]), 1.0);
}

TEST(GenerateSnapshot, ZeroMixingNoOverlapRefinesCommunities) {
  GenConfig c = desk_config();
  c.mixing = 0.0;
  c.overlap_nodes = 0;
  c.snapshots = 1;
  auto b = generate_dynamic(c, {});
  EXPECT_GE(intra_fraction(b.truth.snapshots[0], b.network.snapshots[0]), 0.95);
}

TEST(GenerateSnapshot, MeanDegreeNearTarget) {
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    auto b = generate_dynamic(table2_static(seed), {});
    const auto& g = b.network.snapshots[0];
    const double mean = 2.0 * static_cast<double>(g.num_edges()) / static_cast<double>(g.num_nodes());
    EXPECT_NEAR(mean, 30.0, 3.0) << "seed " << seed;
    for (auto d : g.degrees()) EXPECT_LE(d, 50u);
  }
}

TEST(GenerateSnapshot, OverlapNodesAreDenser) {
  auto b = generate_dynamic(table2_static(3), {});
  const auto& g = b.network.snapshots[0];
  const auto& p = b.truth.snapshots[0];
  double over = 0, single = 0;
  std::size_t n_over = 0, n_single = 0;
  for (NodeId i = 0; i < p.num_nodes(); ++i) {
    const double d = static_cast<double>(degree(g, i));
    if (p.memberships(i).size() > 1) {
      over += d;
      ++n_over;
    } else {
      single += d;
      ++n_single;
    }
  }
  EXPECT_GT(over / n_over, single / n_single);
}

TEST(GenerateSnapshot, InfeasibleTargetThrows) {
  GenConfig c = desk_config();
  c.k = 50;
  c.avg_degree = 30;
  c.max_degree = 0;
  c.snapshots = 1;
  EXPECT_THROW(generate_dynamic(c, {}), Error);
}

TEST(GenerateSnapshot, EverySnapshotValidates) {
  auto p = make_preset("birthdeath-t2");
  p.config.seed = 4;
  auto b = generate_dynamic(p.config, p.schedule);
  ASSERT_EQ(b.network.size(), 9u);
  for (const auto& g : b.network.snapshots) EXPECT_TRUE(validate(g).empty());
}

TEST(ApplyEvents, ChurnMovesExactlyTenPercent) {
  GenConfig c = table2_config();
  c.overlap_nodes = 0;
  c.snapshots = 3;
  Rng rng(6);
  auto truth = apply_events(plant_memberships(c, rng), {}, c, rng);
  EXPECT_EQ(moved_singles(truth.snapshots[0], truth.snapshots[1]), 50u);
  EXPECT_EQ(moved_singles(truth.snapshots[1], truth.snapshots[2]), 50u);
}

TEST(ApplyEvents, KSeriesMatchesSchedule) {
  for (const auto& name : preset_names()) {
    auto p = make_preset(name);
    Rng rng(9);
    auto truth = apply_events(plant_memberships(p.config, rng), p.schedule, p.config, rng);
    EXPECT_EQ(truth.k_series(), schedule_k_series(p.config.k, p.schedule, p.config.snapshots)) << name;
  }
}

TEST(ApplyEvents, BirthOfFifty) {
  GenConfig c = table2_config();
  c.snapshots = 3;
  GenSchedule s;
  s.events.push_back({3, EventKind::birth, {}, {}, 50});
  Rng rng(2);
  auto truth = apply_events(plant_memberships(c, rng), s, c, rng);
  EXPECT_EQ(truth.k_series(), (std::vector<std::size_t>{10, 10, 11}));
  const auto& before = truth.snapshots[1];
  const auto& after = truth.snapshots[2];
  const CommunityId born = before.next_id();
  ASSERT_TRUE(after.is_live(born));
  EXPECT_EQ(after.communities().at(born).size(), 50u);
  for (NodeId i : after.communities().at(born)) EXPECT_FALSE(before.memberships(i).empty());
}

TEST(ApplyEvents, MergeIsBoundedByUnion) {
  GenConfig c = desk_config();
  c.snapshots = 2;
  c.churn = 0.0;
  GenSchedule s;
  s.events.push_back({2, EventKind::merge, 0, 1, {}});
  Rng rng(5);
  auto truth = apply_events(plant_memberships(c, rng), s, c, rng);
  const auto& a = truth.snapshots[0].communities();
  const auto& merged = truth.snapshots[1].communities().at(0);
  EXPECT_LE(merged.size(), a.at(0).size() + a.at(1).size());
  EXPECT_FALSE(truth.snapshots[1].is_live(1));
  EXPECT_EQ(truth.k_series(), (std::vector<std::size_t>{4, 3}));
}

TEST(ApplyEvents, DeathRehomesMembersAndSplitHalves) {
  GenConfig c = desk_config();
  c.snapshots = 3;
  c.churn = 0.0;
  GenSchedule s;
  s.events.push_back({2, EventKind::death, 2, {}, {}});
  s.events.push_back({3, EventKind::split, 0, {}, {}});
  Rng rng(5);
  auto truth = apply_events(plant_memberships(c, rng), s, c, rng);
  const auto& dead = truth.snapshots[0].communities().at(2);
  for (NodeId i : dead) EXPECT_FALSE(truth.snapshots[1].memberships(i).empty());
  const auto before = truth.snapshots[1].communities().at(0).size();
  const auto& after = truth.snapshots[2];
  EXPECT_EQ(after.communities().at(0).size(), before - before / 2);
  EXPECT_EQ(truth.k_series(), (std::vector<std::size_t>{4, 3, 4}));
}

TEST(ApplyEvents, ExpandAndContractMoveQNodes) {
  GenConfig c = desk_config();
  c.snapshots = 3;
  c.churn = 0.0;
  GenSchedule s;
  s.events.push_back({2, EventKind::expand, 1, {}, 6});
  s.events.push_back({3, EventKind::contract, 1, {}, 4});
  Rng rng(5);
  auto truth = apply_events(plant_memberships(c, rng), s, c, rng);
  const auto size = [&](std::size_t t) { return truth.snapshots[t].communities().at(1).size(); };
  EXPECT_EQ(size(1), size(0) + 6);
  EXPECT_EQ(size(2), size(1) - 4);
}

TEST(ApplyEvents, EventOnDeadCommunityThrows) {
  GenConfig c = desk_config();
  c.snapshots = 3;
  GenSchedule s;
  s.events.push_back({2, EventKind::death, 1, {}, {}});
  s.events.push_back({3, EventKind::expand, 1, {}, {}});
  Rng rng(5);
  EXPECT_THROW(apply_events(plant_memberships(c, rng), s, c, rng), Error);
}

TEST(ApplyEvents, DeathNeverEmptiesLastCommunity) {
  GenConfig c = desk_config();
  c.k = 2;
  c.overlap_nodes = 0;
  c.snapshots = 3;
  GenSchedule s;
  s.events.push_back({2, EventKind::death, {}, {}, {}});
  s.events.push_back({3, EventKind::death, {}, {}, {}});
  Rng rng(5);
  EXPECT_THROW(apply_events(plant_memberships(c, rng), s, c, rng), Error);
}

TEST(Schedule, KSeriesArithmetic) {
  GenSchedule s = alternating_birth_death(6);
  EXPECT_EQ(schedule_k_series(4, s, 6), (std::vector<std::size_t>{4, 5, 4, 4, 5, 4}));
}

TEST(Schedule, FileRoundTrip) {
  std::istringstream in("# events\n3 split target=2\n2 birth size=30\n4 merge target=0 other=1\n5 expand q=7\n");
  auto s = read_schedule(in);
  ASSERT_EQ(s.events.size(), 4u);
  EXPECT_EQ(s.events[0].kind, EventKind::birth);
  EXPECT_EQ(*s.events[0].amount, 30u);
  std::ostringstream out;
  write_schedule(out, s);
  EXPECT_EQ(out.str(), "2 birth size=30\n3 split target=2\n4 merge target=0 other=1\n5 expand q=7\n");
}

TEST(Schedule, RejectsBadLines) {
  for (const char* bad : {"1 birth\n", "2 explode\n", "2 birth size\n", "2 birth colour=3\n", "2\n"}) {
    std::istringstream in(bad);
    EXPECT_THROW(read_schedule(in), ParseError) << bad;
  }
}

TEST(GenerateDynamic, SameSeedSameOutput) {
  auto p = make_preset("desk-birthdeath");
  auto a = generate_dynamic(p.config, p.schedule);
  auto b = generate_dynamic(p.config, p.schedule);
  std::ostringstream sa, sb;
  write_dynamic(sa, a.network);
  write_dynamic(sb, b.network);
  EXPECT_EQ(sa.str(), sb.str());
  EXPECT_EQ(a.truth.k_series(), b.truth.k_series());
}

TEST(GenerateDynamic, StaticBoundary) {
  GenConfig c = desk_config();
  c.snapshots = 1;
  auto b = generate_dynamic(c, {});
  EXPECT_EQ(b.network.size(), 1u);
  EXPECT_EQ(b.truth.k_series(), (std::vector<std::size_t>{4}));
}

TEST(Presets, PaperConfigurations) {
  auto t1 = make_preset("birthdeath-t1").config;
  EXPECT_EQ(t1.n, 1000u);
  EXPECT_EQ(t1.avg_degree, 40.0);
  EXPECT_EQ(t1.max_degree, 60u);
  EXPECT_EQ(t1.overlap_nodes, 40u);
  EXPECT_EQ(t1.memberships_per_overlap, 4u);
  EXPECT_EQ(t1.mixing, 0.3);
  EXPECT_EQ(t1.snapshots, 10u);
  auto t2 = make_preset("birthdeath-t2").config;
  EXPECT_EQ(t2.n, 500u);
  EXPECT_EQ(t2.avg_degree, 30.0);
  EXPECT_EQ(t2.max_degree, 50u);
  EXPECT_EQ(t2.overlap_nodes, 20u);
  EXPECT_EQ(t2.memberships_per_overlap, 3u);
  EXPECT_EQ(t2.mixing, 0.2);
  EXPECT_EQ(t2.snapshots, 9u);
  EXPECT_THROW(make_preset("nope"), Error);
}

TEST(GenConfig, Checks) {
  GenConfig c;
  c.mixing = 1.0;
  EXPECT_THROW(c.check(), Error);
  c = {};
  c.overlap_nodes = 500;
  EXPECT_THROW(c.check(), Error);
  c = {};
  c.avg_degree = 500;
  EXPECT_THROW(c.check(), Error);
}
