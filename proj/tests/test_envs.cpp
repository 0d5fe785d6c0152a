#include <gtest/gtest.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <set>

#include "warehouse/maxspace_env.hpp"
#include "warehouse/multi_env.hpp"
#include "warehouse/nav_env.hpp"
#include "warehouse/rng.hpp"

using namespace warehouse;

namespace {

std::filesystem::path map_path(const char* name) {
  return std::filesystem::path(WAREHOUSE_DATA_DIR) / "maps" / name;
}

bool adjacent(Position a, Position b) {
  const auto d = [](std::size_t x, std::size_t y) { return x > y ? x - y : y - x; };
  return d(a.row, b.row) + d(a.col, b.col) == 1;
}

}  // namespace

TEST(NavEnv, ResetAtUpperLeft) {
  NavEnv env(load_world(map_path("nav_8x8.map"), MapKind::Nav));
  EXPECT_EQ(env.reset(), (Position{0, 0}));
  EXPECT_EQ(env.steps_taken(), 0u);
  EXPECT_EQ(env.step_cap(), 128u);
}

TEST(NavEnv, ResetIsIdempotent) {
  NavEnv env(parse_world("S..\n...\n..D", MapKind::Nav));
  env.step(Action::Right);
  const Position a = env.reset();
  const auto obs_a = env.observe();
  const Position b = env.reset();
  EXPECT_EQ(a, b);
  EXPECT_EQ(obs_a, env.observe());
  EXPECT_FALSE(env.terminal());
}

TEST(NavEnv, RewardRules) {
  NavEnv env(parse_world("S.#\n...\n..D", MapKind::Nav));
  auto out = env.step(Action::Right);
  EXPECT_EQ(out.reward, 0.0);
  EXPECT_EQ(out.next_state, (Position{0, 1}));
  EXPECT_FALSE(out.terminal);

  out = env.step(Action::Right);  // obstacle
  EXPECT_EQ(out.reward, -1.0);
  EXPECT_EQ(out.next_state, (Position{0, 1}));
  EXPECT_TRUE(out.terminal);
  EXPECT_EQ(out.reason, EndReason::Collision);
  EXPECT_THROW(env.step(Action::Down), EnvError);

  env.reset();
  out = env.step(Action::Up);  // off the grid counts as a wall
  EXPECT_EQ(out.reason, EndReason::Collision);
  EXPECT_EQ(out.next_state, (Position{0, 0}));

  env.place_agent({2, 1});
  out = env.step(Action::Right);
  EXPECT_EQ(out.reward, 1.0);
  EXPECT_EQ(out.next_state, (Position{2, 2}));
  EXPECT_EQ(out.reason, EndReason::Goal);
}

TEST(NavEnv, StepLimit) {
  NavEnv env(parse_world("S..\n...\n..D", MapKind::Nav), 3);
  env.step(Action::Right);
  env.step(Action::Left);
  const auto out = env.step(Action::Right);
  EXPECT_EQ(out.reason, EndReason::StepLimit);
  EXPECT_EQ(out.reward, 0.0);
  EXPECT_TRUE(out.terminal);
  EXPECT_FALSE(out.ends_task());
}

TEST(NavObservation, Encoding) {
  NavEnv env(parse_world("S.\n.D", MapKind::Nav));
  EXPECT_EQ(env.observe(), (std::vector<double>{0.5, 1.0, 1.0, 1.0}));
  NavEnv big(load_world(map_path("nav_8x8.map"), MapKind::Nav));
  EXPECT_EQ(encode_nav_observation(big).size(), 64u);
}

TEST(NavObservation, AgentMoveChangesTwoEntries) {
  NavEnv a(parse_world("S..\n.#.\n..D", MapKind::Nav));
  NavEnv b = a;
  b.place_agent({1, 2});
  const auto oa = a.observe(), ob = b.observe();
  int diff = 0;
  for (std::size_t i = 0; i < oa.size(); ++i) diff += oa[i] != ob[i];
  EXPECT_EQ(diff, 2);
  EXPECT_EQ(oa[4], 0.0);
  b.place_agent({0, 0});
  EXPECT_EQ(a.observe(), b.observe());
}

// Every state-action on random mazes obeys exactly one rule, with rewards
// in {-1, 0, +1} and adjacency after non-collision moves.
TEST(NavEnv, RulesExhaustiveOnRandomMaps) {
  Rng rng(17);
  int maps = 0;
  while (maps < 30) {
    std::string text;
    for (int r = 0; r < 5; ++r) {
      for (int c = 0; c < 5; ++c) text += (r == 0 && c == 0) ? 'S' : (r == 4 && c == 4) ? 'D' : rng.uniform() < 0.3 ? '#' : '.';
      text += '\n';
    }
    GridMap m;
    try {
      m = parse_world(text, MapKind::Nav);
    } catch (const MapError&) {
      continue;
    }
    ++maps;
    NavEnv env(m);
    for (std::size_t i = 0; i < m.size(); ++i) {
      const Position p = m.position_of(i);
      if (!m.is_open(p) || p == m.destination) continue;
      for (Action a : kAllActions) {
        env.reset();
        env.place_agent(p);
        const auto out = env.step(a);
        const auto n = neighbor(p, a, m.height, m.width);
        const bool wall = !n || !m.is_open(*n);
        const bool goal = !wall && *n == m.destination;
        EXPECT_EQ(out.terminal, out.reason != EndReason::Ongoing);
        if (wall) {
          EXPECT_EQ(out.reason, EndReason::Collision);
          EXPECT_EQ(out.reward, -1.0);
          EXPECT_EQ(out.next_state, p);
        } else if (goal) {
          EXPECT_EQ(out.reason, EndReason::Goal);
          EXPECT_EQ(out.reward, 1.0);
        } else {
          EXPECT_EQ(out.reason, EndReason::Ongoing);
          EXPECT_EQ(out.reward, 0.0);
        }
        if (!wall) EXPECT_TRUE(adjacent(p, out.next_state));
      }
    }
  }
}

TEST(MaxSpaceEnv, ResetAtObject) {
  const GridMap m = load_world(map_path("storage_12x12.csv"), MapKind::MaxSpace);
  MaxSpaceEnv env(m);
  EXPECT_EQ(m.at(env.reset()), storage::kObject);
  EXPECT_EQ(env.step_cap(), 288u);
  EXPECT_FALSE(env.persist_capacity());
}

TEST(MaxSpaceEnv, RewardIsCellValue) {
  MaxSpaceEnv env(parse_world("-100,-1,1,-1,100\n-100,-1,-1,-1,10", MapKind::MaxSpace));
  auto out = env.step(Action::Right);
  EXPECT_EQ(out.reward, -1.0);
  EXPECT_FALSE(out.terminal);
  out = env.step(Action::Right);
  EXPECT_EQ(out.reward, 100.0);
  EXPECT_EQ(out.reason, EndReason::Goal);
  EXPECT_TRUE(env.is_win(out));

  env.reset();
  out = env.step(Action::Up);
  EXPECT_EQ(out.reward, -100.0);
  EXPECT_EQ(out.reason, EndReason::Collision);
  EXPECT_EQ(out.next_state, (Position{0, 2}));

  env.reset();
  env.step(Action::Left);
  out = env.step(Action::Left);
  EXPECT_EQ(out.reward, -100.0);

  env.reset();
  env.step(Action::Down);
  env.step(Action::Right);
  out = env.step(Action::Right);
  EXPECT_EQ(out.reward, 10.0);
  EXPECT_EQ(out.reason, EndReason::Goal);
  EXPECT_FALSE(env.is_win(out));
}

TEST(MaxSpaceEnv, StepLimitKeepsCellReward) {
  MaxSpaceEnv env(parse_world("-100,-1,1,-1,100", MapKind::MaxSpace), 2);
  env.step(Action::Left);
  const auto out = env.step(Action::Right);
  EXPECT_EQ(out.reason, EndReason::StepLimit);
  EXPECT_EQ(out.reward, -1.0);  // re-entering the vacated object cell
}

TEST(MaxSpaceEnv, CommitStorage) {
  MaxSpaceEnv env(parse_world("-100,-1,1,-1,100\n-100,-1,-1,-1,10", MapKind::MaxSpace), 0, true);
  EXPECT_THROW(env.commit_storage(), EnvError);  // no episode yet
  env.step(Action::Right);
  env.step(Action::Right);
  const GridMap before = env.map();
  const GridMap after = env.commit_storage();
  EXPECT_EQ(after.at({0, 4}), 99);
  int changed = 0;
  for (std::size_t i = 0; i < before.size(); ++i) {
    if (before.cells[i] != after.cells[i]) {
      ++changed;
      EXPECT_EQ(before.cells[i] - after.cells[i], 1);
    }
  }
  EXPECT_EQ(changed, 1);
  EXPECT_EQ(env.commit_storage().at({0, 4}), 98);

  env.reset();
  env.step(Action::Down);
  env.step(Action::Right);
  env.step(Action::Right);
  EXPECT_EQ(env.commit_storage().at({1, 4}), 9);

  env.reset();
  env.step(Action::Up);  // wall
  EXPECT_THROW(env.commit_storage(), EnvError);

  MaxSpaceEnv training(parse_world("-100,-1,1,-1,100", MapKind::MaxSpace));
  training.step(Action::Right);
  training.step(Action::Right);
  EXPECT_THROW(training.commit_storage(), EnvError);
}

TEST(MaxSpaceEnv, PersistedGoalRewardDrops) {
  MaxSpaceEnv env(parse_world("-100,-1,1,-1,100", MapKind::MaxSpace), 0, true);
  env.step(Action::Right);
  env.step(Action::Right);
  env.commit_storage();
  env.reset();
  env.step(Action::Right);
  EXPECT_EQ(env.step(Action::Right).reward, 99.0);
}

TEST(MaxSpaceEnv, RewardsWithinTable) {
  const GridMap m = load_world(map_path("storage_12x12.csv"), MapKind::MaxSpace);
  MaxSpaceEnv env(m);
  const std::set<double> allowed{-100.0, -1.0, 100.0, 10.0};
  for (std::size_t i = 0; i < m.size(); ++i) {
    const Position p = m.position_of(i);
    if (m.at(p) != storage::kOpen && m.at(p) != storage::kObject) continue;
    for (Action a : kAllActions) {
      env.reset();
      env.place_agent(p);
      const auto out = env.step(a);
      EXPECT_TRUE(allowed.count(out.reward)) << out.reward;
      if (out.reason != EndReason::Collision) EXPECT_TRUE(adjacent(p, out.next_state));
      else EXPECT_EQ(out.next_state, p);
    }
  }
}

TEST(MultiAgentEnv, ResetPlacesEveryone) {
  const GridMap m = load_world(map_path("lobby.scene"), MapKind::MultiScene);
  MultiAgentEnv env(m);
  Rng rng(1);
  const std::array<Action, 2> acts{Action::Down, Action::Down};
  env.step(acts, rng);
  env.reset();
  EXPECT_EQ(env.steps_taken(), 0u);
  EXPECT_EQ(env.agents()[0].position, m.agent_starts[0]);
  EXPECT_EQ(env.agents()[1].position, m.agent_starts[1]);
  EXPECT_TRUE(env.agents()[0].active && env.agents()[1].active);
  EXPECT_EQ(env.humans(), m.human_starts);
}

TEST(MultiAgentEnv, OpenMoves) {
  MultiAgentEnv env(parse_world("1...A\n2...B\nh###h", MapKind::MultiScene));
  env.set_freeze_humans(true);
  Rng rng(1);
  const std::array<Action, 2> acts{Action::Right, Action::Right};
  const auto out = env.step(acts, rng);
  EXPECT_EQ(out[0].reward, 0.0);
  EXPECT_EQ(out[1].reward, 0.0);
  EXPECT_TRUE(env.agents()[0].active && env.agents()[1].active);
}

// Hand enumeration of the two-agent conflicts under index-ordered resolution.
TEST(MultiAgentEnv, AgentTwoMovesIntoResolvedCell) {
  // Agent 1 moves right into (0,1); agent 2 moves up into (0,1) afterwards.
  MultiAgentEnv env(parse_world("1..A\n.2.B\nh##h", MapKind::MultiScene));
  env.set_freeze_humans(true);
  Rng rng(1);
  const std::array<Action, 2> acts{Action::Right, Action::Up};
  const auto out = env.step(acts, rng);
  EXPECT_EQ(out[0].reward, 0.0);
  EXPECT_EQ(env.agents()[0].position, (Position{0, 1}));
  EXPECT_EQ(out[1].reward, -1.0);
  EXPECT_EQ(out[1].reason, EndReason::Collision);
  EXPECT_FALSE(env.agents()[1].active);
  EXPECT_EQ(env.agents()[1].position, (Position{1, 1}));
}

TEST(MultiAgentEnv, SwapCollidesBoth) {
  MultiAgentEnv env(parse_world("12.A\n...B\nh##h", MapKind::MultiScene));
  env.set_freeze_humans(true);
  Rng rng(1);
  const std::array<Action, 2> acts{Action::Right, Action::Left};
  const auto out = env.step(acts, rng);
  EXPECT_EQ(out[0].reason, EndReason::Collision);
  EXPECT_EQ(out[1].reason, EndReason::Collision);
  EXPECT_EQ(env.agents()[0].position, (Position{0, 0}));
  EXPECT_EQ(env.agents()[1].position, (Position{0, 1}));
  EXPECT_TRUE(env.terminal());
}

TEST(MultiAgentEnv, GoalAndHumanCollision) {
  MultiAgentEnv env(parse_world("1A..\n2h.B\n...h", MapKind::MultiScene));
  env.set_freeze_humans(true);
  Rng rng(1);
  const std::array<Action, 2> acts{Action::Right, Action::Right};
  const auto out = env.step(acts, rng);
  EXPECT_EQ(out[0].reward, 1.0);
  EXPECT_EQ(out[0].reason, EndReason::Goal);
  EXPECT_FALSE(env.agents()[0].active);
  EXPECT_EQ(out[1].reward, -1.0);
  EXPECT_EQ(out[1].reason, EndReason::Collision);
  EXPECT_TRUE(env.terminal());
  EXPECT_THROW(env.step(acts, rng), EnvError);
}

TEST(MultiAgentEnv, InactiveAgentStaysPut) {
  MultiAgentEnv env(parse_world("1A...\n2...B\nh...h", MapKind::MultiScene));
  Rng rng(4);
  std::array<Action, 2> acts{Action::Right, Action::Right};
  env.step(acts, rng);
  const Position parked = env.agents()[0].position;
  for (int i = 0; i < 2 && !env.terminal(); ++i) {
    acts = {Action::Down, Action::Right};
    const auto out = env.step(acts, rng);
    EXPECT_TRUE(out[0].terminal);
    EXPECT_EQ(out[0].reward, 0.0);
    EXPECT_EQ(env.agents()[0].position, parked);
  }
}

TEST(MultiAgentEnv, WrongActionCount) {
  MultiAgentEnv env(load_world(map_path("lobby.scene"), MapKind::MultiScene));
  Rng rng(1);
  const std::array<Action, 1> one{Action::Up};
  EXPECT_THROW(env.step(one, rng), std::invalid_argument);
}

TEST(MultiAgentEnv, StepCap) {
  MultiAgentEnv env(parse_world("1...A\n2...B\nh###h", MapKind::MultiScene), 2);
  env.set_freeze_humans(true);
  Rng rng(1);
  std::array<Action, 2> acts{Action::Right, Action::Right};
  env.step(acts, rng);
  acts = {Action::Left, Action::Left};
  const auto out = env.step(acts, rng);
  EXPECT_EQ(out[0].reason, EndReason::StepLimit);
  EXPECT_EQ(out[1].reason, EndReason::StepLimit);
  EXPECT_TRUE(env.terminal());
}

TEST(Humans, EnclosedHumanStays) {
  // (0,4) is a pocket whose only exit (1,4) holds the other human.
  MultiAgentEnv env(parse_world("1.A#.\n2.B#h\n...#h", MapKind::MultiScene));
  Rng rng(3);
  for (int i = 0; i < 50; ++i) {
    env.place_human(0, {0, 4});
    env.place_human(1, {1, 4});
    EXPECT_EQ(env.advance_humans(rng)[0], (Position{0, 4}));
  }
}

TEST(Humans, OneNeighbourIsFiftyFifty) {
  MultiAgentEnv env(parse_world("1.A#.\n2.B#h\n...#h", MapKind::MultiScene));
  int moved = 0;
  const int n = 10000;
  for (int s = 0; s < n; ++s) {
    Rng rng(static_cast<std::uint64_t>(s));
    env.place_human(0, {0, 4});  // single open neighbour (1,4)
    env.place_human(1, {2, 0});  // far away, does not interfere
    if (env.advance_humans(rng)[0] == (Position{1, 4})) ++moved;
  }
  EXPECT_NEAR(static_cast<double>(moved) / n, 0.5, 0.02);
}

TEST(Humans, SameSeedSameTrajectory) {
  const GridMap m = load_world(map_path("lobby.scene"), MapKind::MultiScene);
  MultiAgentEnv a(m), b(m);
  Rng ra(9), rb(9);
  for (int i = 0; i < 100; ++i) EXPECT_EQ(a.advance_humans(ra), b.advance_humans(rb));
}

TEST(Humans, NeverShareCellsOrEnterDestinations) {
  const GridMap m = load_world(map_path("lobby.scene"), MapKind::MultiScene);
  MultiAgentEnv env(m);
  Rng rng(21);
  for (int i = 0; i < 2000; ++i) {
    const auto& h = env.advance_humans(rng);
    EXPECT_NE(h[0], h[1]);
    for (const auto& p : h) {
      EXPECT_TRUE(m.is_open(p));
      for (const auto& d : m.destinations) EXPECT_NE(p, d);
      for (const auto& ag : env.agents()) EXPECT_NE(p, ag.position);
    }
  }
}

// One agent, no humans: the scene behaves exactly like the maze.
TEST(MultiAgentEnv, ReducesToNavSemantics) {
  const char* text = "S..#\n.#..\n...D";
  const GridMap nav = parse_world(text, MapKind::Nav);
  GridMap scene = nav;
  scene.kind = MapKind::MultiScene;
  scene.agent_starts = {nav.start};
  scene.destinations = {nav.destination};
  Rng picker(8);
  for (int episode = 0; episode < 200; ++episode) {
    NavEnv single(nav, 200);
    MultiAgentEnv multi(scene, 200);
    Rng rng(1);
    while (!single.terminal()) {
      const Action a = action_from_index(picker.index(4));
      const auto o1 = single.step(a);
      const std::array<Action, 1> acts{a};
      const auto o2 = multi.step(acts, rng)[0];
      EXPECT_EQ(o1.reward, o2.reward);
      EXPECT_EQ(o1.next_state, o2.next_state);
      EXPECT_EQ(o1.reason, o2.reason);
      EXPECT_EQ(single.terminal(), multi.terminal());
    }
  }
}
