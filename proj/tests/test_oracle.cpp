#include <gtest/gtest.h>

#include <filesystem>

#include "warehouse/maxspace_env.hpp"
#include "warehouse/nav_env.hpp"
#include "warehouse/oracle.hpp"
#include "warehouse/rng.hpp"

using namespace warehouse;

namespace {
std::filesystem::path map_path(const char* name) {
  return std::filesystem::path(WAREHOUSE_DATA_DIR) / "maps" / name;
}

// Smallest hand-built model: state 0 steps right into a terminal +1.
MdpModel one_step_model(double gamma) {
  MdpModel m;
  m.n_states = 2;
  m.gamma = gamma;
  m.next = {{0, 0, 0, 1}, {1, 1, 1, 1}};
  m.reward = {{-1, -1, -1, 1}, {0, 0, 0, 0}};
  m.ends = {{true, true, true, true}, {true, true, true, true}};
  m.absorbing = {false, true};
  return m;
}
}  // namespace

TEST(Bfs, Examples) {
  const GridMap open3 = parse_world("S..\n...\n..D", MapKind::Nav);
  EXPECT_EQ(bfs_shortest_path(open3, {0, 0}, {2, 2}), 4u);
  EXPECT_EQ(bfs_shortest_path(open3, {1, 1}, {1, 1}), 0u);
  GridMap walled;
  walled.height = 3;
  walled.width = 3;
  walled.cells = {1, 1, 0,
                  1, 1, 0,
                  0, 0, 1};
  EXPECT_FALSE(bfs_shortest_path(walled, {0, 0}, {2, 2}).has_value());
  EXPECT_THROW(bfs_shortest_path(walled, {0, 2}, {0, 0}), MapError);
}

TEST(ValueIteration, OneBackup) {
  const auto r = value_iteration(one_step_model(0.9));
  EXPECT_DOUBLE_EQ(r.q_star.at(0, Action::Right), 1.0);
  EXPECT_EQ(r.policy[0], Action::Right);
}

TEST(ValueIteration, GammaZeroGivesImmediateRewards) {
  NavEnv env(load_world(map_path("nav_4x4.map"), MapKind::Nav));
  const MdpModel m = build_mdp(env, 0.0);
  const auto r = value_iteration(m);
  for (std::size_t s = 0; s < m.n_states; ++s) {
    if (m.absorbing[s]) continue;
    for (std::size_t a = 0; a < 4; ++a) EXPECT_EQ(r.q_star.at(s, action_from_index(a)), m.reward[s][a]);
  }
}

TEST(ValueIteration, RejectsBadInputs) {
  EXPECT_THROW(value_iteration(one_step_model(1.0)), std::invalid_argument);
  EXPECT_THROW(value_iteration(one_step_model(0.9), 0.0), std::invalid_argument);
}

TEST(ValueIteration, ResidualBelowTolerance) {
  MaxSpaceEnv env(load_world(map_path("storage_12x12.csv"), MapKind::MaxSpace));
  const MdpModel m = build_mdp(env, 0.9);
  const auto r = value_iteration(m, 1e-10);
  EXPECT_LT(bellman_residual(m, r.q_star), 1e-10);
}

TEST(MdpModel, AgreesWithEnvironment) {
  NavEnv env(load_world(map_path("nav_8x8.map"), MapKind::Nav));
  const MdpModel m = build_mdp(env, 0.9);
  Rng rng(2);
  for (int ep = 0; ep < 300; ++ep) {
    env.reset();
    while (!env.terminal()) {
      const std::size_t s = env.state_index();
      const Action a = action_from_index(rng.index(4));
      const auto out = env.step(a);
      EXPECT_EQ(m.next[s][index_of(a)], env.map().index(out.next_state));
      EXPECT_EQ(m.reward[s][index_of(a)], out.reward);
      EXPECT_EQ(m.ends[s][index_of(a)], out.ends_task());
    }
  }
}

TEST(ValueIteration, RolloutMatchesBfsOnNavMaps) {
  std::vector<GridMap> maps = {load_world(map_path("nav_4x4.map"), MapKind::Nav),
                               load_world(map_path("nav_8x8.map"), MapKind::Nav)};
  Rng rng(31);
  while (maps.size() < 40) {
    std::string text;
    for (int r = 0; r < 6; ++r) {
      for (int c = 0; c < 6; ++c) text += (r == 0 && c == 0) ? 'S' : (r == 5 && c == 5) ? 'D' : rng.uniform() < 0.35 ? '#' : '.';
      text += '\n';
    }
    try {
      maps.push_back(parse_world(text, MapKind::Nav));
    } catch (const MapError&) {
    }
  }
  for (const auto& map : maps) {
    NavEnv env(map);
    const MdpModel m = build_mdp(env, 0.9);
    const auto vi = value_iteration(m);
    const auto roll = rollout_policy(m, vi.policy, map.index(map.start), map.size());
    ASSERT_TRUE(roll.steps.has_value());
    EXPECT_EQ(*roll.steps, *bfs_shortest_path(map, map.start, map.destination));
    EXPECT_EQ(roll.final_state, map.index(map.destination));
  }
}

TEST(ValueIteration, StorageOptimumIsLargestBay) {
  const GridMap map = load_world(map_path("storage_12x12.csv"), MapKind::MaxSpace);
  MaxSpaceEnv env(map);
  const MdpModel m = build_mdp(env, 0.9);
  const auto vi = value_iteration(m);
  const auto roll = rollout_policy(m, vi.policy, map.index(map.start), map.size());
  ASSERT_TRUE(roll.steps.has_value());
  EXPECT_EQ(map.position_of(roll.final_state), largest_bay(map));
  EXPECT_EQ(roll.last_reward, 100.0);
  EXPECT_EQ(*roll.steps, *bfs_shortest_path(map, map.start, largest_bay(map)));
}
