#include <gtest/gtest.h>

#include <map>

#include "appc/strategies.hpp"
#include "oracles.hpp"

using namespace appc;

namespace {

Instance make_instance(GridMap map, std::vector<Cell> attackers, std::vector<Cell> targets, std::vector<Cell> defenders) {
  Instance inst;
  inst.map = std::move(map);
  inst.start.attackers = std::move(attackers);
  inst.attacker_targets = std::move(targets);
  inst.start.defenders = std::move(defenders);
  validate_instance(inst);
  return inst;
}

// Two rooms joined by one door at (3,1).
GridMap two_rooms() { return parse_map("7 3\n...#...\n.......\n...#...\n"); }

// Left half and right half separated by a wall at x = 6 with doors at (6,2) and (6,6).
GridMap two_doorways() {
  std::vector<Cell> wall;
  for (int y = 0; y < 9; ++y)
    if (y != 2 && y != 6) wall.push_back({6, y});
  return GridMap(13, 9, wall);
}

void expect_valid(const Instance& inst, const Allocation& a) {
  EXPECT_TRUE(a.is_injective());
  EXPECT_EQ(a.targets.size(), static_cast<std::size_t>(inst.defender_count()));
  for (const auto& t : a.targets)
    if (t) {
      EXPECT_TRUE(inst.map.is_free(*t));
    }
}

}  // namespace

TEST(StrategyIds, NamesRoundTrip) {
  for (StrategyId s : kAllStrategies) EXPECT_EQ(parse_strategy(strategy_name(s)), s);
  EXPECT_EQ(parse_strategy("SIM-C"), StrategyId::SimC);
  EXPECT_THROW(parse_strategy("astar"), ConfigError);
  EXPECT_TRUE(uses_communicators(StrategyId::GrdC));
  EXPECT_FALSE(uses_communicators(StrategyId::Sim));
}

TEST(AllocateRandom, SingleTarget) {
  const auto inst = make_instance(GridMap(3, 1, {}), {{0, 0}}, {{2, 0}}, {{1, 0}});
  const auto a = allocate_random(inst, 5);
  EXPECT_EQ(a.targets[0], (Cell{2, 0}));
}

TEST(AllocateRandom, Deterministic) {
  const auto inst = make_instance(GridMap(6, 2, {}), {{0, 0}, {1, 0}, {2, 0}}, {{3, 1}, {4, 1}, {5, 1}}, {{0, 1}, {1, 1}});
  EXPECT_EQ(allocate_random(inst, 42), allocate_random(inst, 42));
}

TEST(AllocateRandom, UniformCoverageOverSeeds) {
  const auto inst = make_instance(GridMap(5, 3, {}), {{0, 0}, {1, 0}, {2, 0}, {3, 0}, {4, 0}},
                                  {{0, 2}, {1, 2}, {2, 2}, {3, 2}, {4, 2}}, {{0, 1}, {1, 1}});
  std::map<Cell, int> covered;
  const int runs = 10000;
  for (int seed = 0; seed < runs; ++seed) {
    const auto a = allocate_random(inst, static_cast<std::uint64_t>(seed));
    ASSERT_TRUE(a.is_injective());
    ASSERT_EQ(a.assigned_count(), 2u);
    for (const auto& t : a.targets) ++covered[*t];
  }
  ASSERT_EQ(covered.size(), 5u);
  for (const auto& [cell, n] : covered) EXPECT_NEAR(static_cast<double>(n) / runs, 0.4, 0.02) << cell;
}

TEST(AllocateRandom, SurplusDefendersHold) {
  const auto inst = make_instance(GridMap(4, 2, {}), {{0, 0}}, {{3, 0}}, {{0, 1}, {1, 1}, {2, 1}});
  const auto a = allocate_random(inst, 1);
  EXPECT_EQ(a.assigned_count(), 1u);
}

TEST(AllocateGreedy, ClosestTarget) {
  const auto inst = make_instance(GridMap(6, 6, {}), {{0, 5}, {1, 5}}, {{1, 0}, {5, 5}}, {{0, 0}});
  EXPECT_EQ(allocate_greedy(inst, 3).targets[0], (Cell{1, 0}));
}

TEST(AllocateGreedy, EquidistantDefendersSplitByOrder) {
  const auto inst = make_instance(GridMap(7, 2, {}), {{0, 1}, {1, 1}}, {{1, 0}, {6, 0}}, {{0, 0}, {2, 0}});
  bool first_won = false, second_won = false;
  for (std::uint64_t seed = 0; seed < 40; ++seed) {
    const auto a = allocate_greedy(inst, seed);
    ASSERT_TRUE(a.targets[0] && a.targets[1]);
    if (*a.targets[0] == (Cell{1, 0})) {
      EXPECT_EQ(*a.targets[1], (Cell{6, 0}));
      first_won = true;
    } else {
      EXPECT_EQ(*a.targets[0], (Cell{6, 0}));
      EXPECT_EQ(*a.targets[1], (Cell{1, 0}));
      second_won = true;
    }
  }
  EXPECT_TRUE(first_won && second_won);
}

TEST(AllocateGreedy, UnreachableTargetSkipped) {
  const GridMap m = parse_map("5 3\n..#..\n..#..\n..#..\n");
  const auto inst = make_instance(m, {{0, 0}, {4, 2}}, {{1, 2}, {4, 0}}, {{1, 0}, {0, 2}});
  const auto a = allocate_greedy(inst, 0);
  EXPECT_EQ(a.assigned_count(), 1u);
  for (const auto& t : a.targets)
    if (t) {
      EXPECT_EQ(*t, (Cell{1, 2}));
    }
}

TEST(SimulateFrequencies, CorridorPathCountsOnce) {
  const auto inst = make_instance(GridMap(5, 1, {}), {{0, 0}}, {{4, 0}}, {});
  const auto f = simulate_frequencies(inst, CellMask(inst.map), inst.attacker_targets);
  for (int x = 0; x < 5; ++x) EXPECT_EQ(f.at({x, 0}), 1);
}

TEST(SimulateFrequencies, DoorCellCountsBothAttackers) {
  const auto inst = make_instance(two_rooms(), {{0, 0}, {0, 2}}, {{6, 0}, {6, 2}}, {});
  Rng rng(1);
  const auto f = simulate_frequencies(inst, CellMask(inst.map), rng);
  EXPECT_EQ(f.at({3, 1}), 2);
  const auto [hot, count] = f.argmax();
  EXPECT_EQ(count, 2);
  EXPECT_EQ(f.at(hot), 2);
}

TEST(SimulateFrequencies, BlockedRouteLeavesZeros) {
  const auto inst = make_instance(GridMap(5, 1, {}), {{0, 0}}, {{4, 0}}, {});
  const auto f = simulate_frequencies(inst, CellMask(inst.map, {Cell{2, 0}}), inst.attacker_targets);
  for (int x = 0; x < 5; ++x) EXPECT_EQ(f.at({x, 0}), 0);
}

TEST(ExploreVicinity, SingleDoorway) {
  const GridMap m = two_rooms();
  const auto cut = explore_vicinity(m, {3, 1}, 4, {{0, 1}}, {{6, 1}}, 3);
  ASSERT_EQ(cut.size(), 1u);
  // Exactly the doorway and its two approach cells separate the rooms on their own.
  std::vector<Cell> separators;
  for (const Cell& c : m.free_cells()) {
    if (c == (Cell{0, 1}) || c == (Cell{6, 1})) continue;
    auto allowed = m.free_cells();
    allowed.erase(std::find(allowed.begin(), allowed.end(), c));
    if (!oracle::reachable(m, allowed, {{0, 1}}, {{6, 1}})) separators.push_back(c);
  }
  EXPECT_EQ(separators, (std::vector<Cell>{{2, 1}, {3, 1}, {4, 1}}));
  EXPECT_NE(std::find(separators.begin(), separators.end(), cut[0]), separators.end());
}

TEST(ExploreVicinity, OpenFieldExceedsBudget) {
  const GridMap m(5, 5, {});
  std::vector<Cell> left, right;
  for (int y = 0; y < 5; ++y) {
    left.push_back({0, y});
    right.push_back({4, y});
  }
  EXPECT_TRUE(explore_vicinity(m, {2, 2}, 4, left, right, 2).empty());
  std::vector<Cell> middle;
  for (const Cell& c : m.free_cells())
    if (c.x > 0 && c.x < 4) middle.push_back(c);
  for (std::size_t k = 1; k <= 2; ++k) {
    EXPECT_FALSE(oracle::any_subset(middle, k, [&](const std::vector<Cell>& s) {
      auto allowed = m.free_cells();
      for (const Cell& c : s) allowed.erase(std::find(allowed.begin(), allowed.end(), c));
      return !oracle::reachable(m, allowed, left, right);
    }));
  }
}

TEST(ExploreVicinity, TwoWideCorridor) {
  const GridMap m(7, 2, {});
  const std::vector<Cell> a{{0, 0}, {0, 1}}, t{{6, 0}, {6, 1}};
  const auto cut = explore_vicinity(m, {3, 0}, 4, a, t, 2);
  ASSERT_EQ(cut.size(), 2u);
  auto allowed = m.free_cells();
  for (const Cell& c : cut) allowed.erase(std::find(allowed.begin(), allowed.end(), c));
  EXPECT_FALSE(oracle::reachable(m, allowed, a, t));
  EXPECT_TRUE(explore_vicinity(m, {3, 0}, 4, a, t, 1).empty());
}

TEST(ExploreVicinity, DegenerateSides) {
  const GridMap m(5, 1, {});
  EXPECT_TRUE(explore_vicinity(m, {2, 0}, 2, {}, {{4, 0}}, 3).empty());
  EXPECT_TRUE(explore_vicinity(m, {2, 0}, 2, {{1, 0}}, {{2, 0}}, 3).empty());  // adjacent sides
  EXPECT_TRUE(explore_vicinity(m, {2, 0}, 2, {{0, 0}}, {{4, 0}}, 0).empty());
}

TEST(ExploreVicinity, NeverCutsUncuttableOrRemoved) {
  const GridMap m(5, 1, {});
  EXPECT_EQ(explore_vicinity(m, {2, 0}, 2, {{0, 0}}, {{4, 0}}, 3, {}, CellMask(m, {Cell{2, 0}})).size(), 1u);
  EXPECT_TRUE(explore_vicinity(m, {2, 0}, 2, {{0, 0}}, {{4, 0}}, 3, {}, CellMask(m, {Cell{1, 0}, Cell{2, 0}, Cell{3, 0}})).empty());
}

TEST(VicinitySides, DoorSplitsByPotential) {
  const GridMap m = two_rooms();
  const auto s = vicinity_sides(m, {3, 1}, 2, {{0, 1}}, {{6, 1}});
  for (const Cell& c : s.attacker_side) EXPECT_LT(c.x, 3);
  for (const Cell& c : s.target_side) EXPECT_GT(c.x, 3);
  EXPECT_FALSE(s.attacker_side.empty());
  EXPECT_FALSE(s.target_side.empty());
}

TEST(BottleneckSim, TwoDoorwaysBothSealed) {
  std::vector<Cell> attackers, targets;
  for (int y = 0; y < 9; y += 2) {
    attackers.push_back({0, y});
    targets.push_back({12, y});
  }
  const auto inst = make_instance(two_doorways(), attackers, targets, {{9, 4}, {10, 4}, {9, 3}});
  Allocation alloc(3);
  const auto reports = allocate_bottleneck_sim(inst, 7, {0, 1, 2}, alloc, {});
  ASSERT_GE(reports.size(), 2u);
  const auto cells = alloc.cells(Role::Occupier);
  auto allowed = inst.map.free_cells();
  for (const Cell& c : cells) allowed.erase(std::find(allowed.begin(), allowed.end(), c));
  EXPECT_FALSE(oracle::reachable(inst.map, allowed, attackers, targets));
  EXPECT_EQ(reports[0].cut.size(), 1u);
  EXPECT_EQ(reports[1].cut.size(), 1u);
  expect_valid(inst, alloc);
  EXPECT_EQ(alloc.assigned_count(), 3u);
}

TEST(BottleneckSim, OpenMapFallsBackToRandomTargets) {
  const auto inst = make_instance(GridMap(12, 12, {}), {{5, 5}}, {{7, 6}}, {{2, 9}, {9, 2}});
  Allocation alloc(2);
  const auto reports = allocate_bottleneck_sim(inst, 3, {0, 1}, alloc, {});
  EXPECT_TRUE(reports.empty());
  EXPECT_EQ(alloc.assigned_count(), 1u);
  for (const auto& t : alloc.targets)
    if (t) {
      EXPECT_EQ(*t, (Cell{7, 6}));
    }
}

TEST(BottleneckSim, DeterministicAndForbiddenGrows) {
  std::vector<Cell> attackers, targets;
  for (int y = 0; y < 9; ++y) {
    attackers.push_back({1, y});
    targets.push_back({11, y});
  }
  const auto inst = make_instance(two_doorways(), attackers, targets, {{8, 1}, {8, 3}, {8, 5}, {8, 7}});
  EXPECT_EQ(allocate_bottleneck_sim(inst, 11), allocate_bottleneck_sim(inst, 11));
  Allocation alloc(4);
  const auto reports = allocate_bottleneck_sim(inst, 11, {0, 1, 2, 3}, alloc, {});
  std::vector<Cell> seen;
  for (const auto& r : reports) {
    ASSERT_FALSE(r.cut.empty());
    for (const Cell& c : r.cut) {
      EXPECT_EQ(std::find(seen.begin(), seen.end(), c), seen.end());
      seen.push_back(c);
    }
    EXPECT_EQ(r.frequencies.at(r.hot_cell), r.frequencies.argmax().second);
  }
  expect_valid(inst, alloc);
}

TEST(SplitDefenders, FloorAndHighestIndices) {
  Instance inst;
  inst.map = GridMap(10, 1, {});
  for (int x = 0; x < 10; ++x) inst.start.defenders.push_back({x, 0});
  inst.communicator_ratio = 0.0;
  EXPECT_TRUE(split_defenders(inst).second.empty());
  inst.communicator_ratio = 0.3;
  auto [occ, comm] = split_defenders(inst);
  EXPECT_EQ(comm, (std::vector<std::size_t>{7, 8, 9}));
  EXPECT_EQ(occ.size(), 7u);
  inst.start.defenders = {{0, 0}};
  inst.communicator_ratio = 0.5;
  EXPECT_TRUE(split_defenders(inst).second.empty());
}

TEST(Communicators, ConnectedOccupiersNeedNone) {
  const GridMap m(6, 1, {});
  const VisibilityGraph g(m, 2);
  EXPECT_TRUE(allocate_communicators(m, g, {{0, 0}, {2, 0}}, {2}, {{5, 0}, {4, 0}, {3, 0}}).empty());
}

TEST(Communicators, SingleCellSeesBothSingletons) {
  const GridMap m(5, 1, {});
  const VisibilityGraph g(m, 2);
  const auto out = allocate_communicators(m, g, {{0, 0}, {4, 0}}, {2}, {{1, 0}, {3, 0}, {2, 0}});
  ASSERT_EQ(out.size(), 1u);
  EXPECT_EQ(out[0], (std::pair<std::size_t, Cell>{2, {2, 0}}));
  const auto edges = oracle::visibility_edges(m, 2);
  int seeing_both = 0;
  for (const Cell& l : m.free_cells())
    if (edges.count({std::min(l, Cell{0, 0}), std::max(l, Cell{0, 0})}) &&
        edges.count({std::min(l, Cell{4, 0}), std::max(l, Cell{4, 0})}))
      ++seeing_both;
  EXPECT_EQ(seeing_both, 1);
}

TEST(Communicators, TwoRelaysJoinAWalledGroup) {
  // Occupier targets on both sides of a wall: the left pair sees each other, the right one is
  // cut off. Two relays around the wall end merge everything.
  const GridMap m = parse_map("7 4\n...#...\n...#...\n...#...\n.......\n");
  const VisibilityGraph g(m, 3);
  const std::vector<Cell> occupiers{{0, 2}, {1, 3}, {5, 2}};
  ASSERT_EQ(connected_components(g, occupiers).size(), 2u);
  const std::vector<Cell> starts{{0, 0}, {1, 0}, {2, 0}, {4, 0}, {5, 0}};
  const auto out = allocate_communicators(m, g, occupiers, {3, 4}, starts);
  std::vector<Cell> all = occupiers;
  for (const auto& [d, c] : out) all.push_back(c);
  EXPECT_TRUE(is_connected(g, all));
  EXPECT_GE(out.size(), 1u);
}

TEST(Communicators, ClosestCommunicatorTakesRelay) {
  const GridMap m(5, 3, {});
  const VisibilityGraph g(m, 2);
  const auto out = allocate_communicators(m, g, {{0, 0}, {4, 0}}, {0, 1}, {{0, 2}, {2, 2}});
  ASSERT_EQ(out.size(), 1u);
  EXPECT_EQ(out[0].first, 1u);
}

TEST(Communicators, ComponentsStrictlyDecrease) {
  Rng rng(13);
  int checked = 0;
  for (int trial = 0; trial < 200; ++trial) {
    const GridMap m = oracle::random_map(rng, 6, 6, 15);
    const int r = 1 + static_cast<int>(rng.below(3));
    const VisibilityGraph g(m, r);
    auto cells = m.free_cells();
    rng.shuffle(cells);
    if (cells.size() < 8) continue;
    const std::vector<Cell> occupiers(cells.begin(), cells.begin() + 4);
    const std::vector<Cell> starts(cells.begin() + 4, cells.begin() + 8);
    const auto out = allocate_communicators(m, g, occupiers, {0, 1, 2, 3}, starts);
    std::vector<Cell> all = occupiers;
    int before = count_components(g, all);
    for (const auto& [d, c] : out) {
      EXPECT_EQ(std::find(all.begin(), all.end(), c), all.end());
      all.push_back(c);
      const int after = count_components(g, all);
      EXPECT_LT(after, before);
      before = after;
      ++checked;
    }
  }
  EXPECT_GT(checked, 20);
}

TEST(Allocate, RndCWithZeroRatioEqualsRnd) {
  auto inst = make_instance(GridMap(8, 8, {}), {{0, 0}, {1, 0}, {2, 0}, {3, 0}}, {{0, 7}, {3, 7}, {5, 7}, {7, 7}},
                            {{4, 4}, {5, 4}});
  inst.communicator_ratio = 0.0;
  const VisibilityGraph g(inst.map, 2);
  EXPECT_EQ(allocate(StrategyId::RndC, inst, g, 9).targets, allocate(StrategyId::Rnd, inst, g, 9).targets);
}

TEST(Allocate, GrdCConnectedTargetsLeaveCommunicatorsIdle) {
  auto inst = make_instance(GridMap(8, 8, {}), {{0, 0}, {1, 0}}, {{4, 6}, {5, 6}}, {{4, 5}, {5, 5}, {6, 5}});
  inst.communicator_ratio = 0.34;
  const VisibilityGraph g(inst.map, 3);
  const auto a = allocate(StrategyId::GrdC, inst, g, 1);
  EXPECT_EQ(a.roles[2], Role::Communicator);
  EXPECT_FALSE(a.targets[2]);
  EXPECT_TRUE(a.targets[0] && a.targets[1]);
}

TEST(Allocate, SimCDeterministicAndInjective) {
  std::vector<Cell> attackers, targets;
  for (int y = 0; y < 9; ++y) {
    attackers.push_back({1, y});
    targets.push_back({11, y});
  }
  auto inst = make_instance(two_doorways(), attackers, targets, {{8, 1}, {8, 3}, {8, 5}, {8, 7}, {9, 4}});
  inst.communicator_ratio = 0.4;
  const VisibilityGraph g(inst.map, 3);
  const auto a = allocate(StrategyId::SimC, inst, g, 5);
  EXPECT_EQ(a, allocate(StrategyId::SimC, inst, g, 5));
  expect_valid(inst, a);
  for (StrategyId s : kAllStrategies) expect_valid(inst, allocate(s, inst, g, 2));
}
