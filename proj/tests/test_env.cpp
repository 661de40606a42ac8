#include <doctest.h>

#include <cmath>
#include <set>

#include "gridres/environment.hpp"
#include "oracles.hpp"

using namespace gridres;

namespace {

Grid case5() { return Grid::from_json_file(oracle::data_path("case5.json")); }
Grid case14() { return Grid::from_json_file(oracle::data_path("case14.json")); }

Environment make_env(Grid grid, EnvConfig cfg = {}, double load_level = 0.5) {
  Environment env(std::move(grid), cfg);
  SyntheticChronicsParams params;
  params.load_level = load_level;  // light loading keeps the base case safe
  env.set_synthetic_chronics(params);
  return env;
}

std::set<std::tuple<int, int, int>> action_set(const ActionCatalog& catalog) {
  std::set<std::tuple<int, int, int>> s;
  for (const auto& a : catalog.actions)
    s.insert({static_cast<int>(a.kind), a.target, a.value});
  return s;
}

Grid two_node_grid(double limit) {
  Grid grid;
  grid.substations.resize(2);
  Powerline line;
  line.from_substation = 0;
  line.to_substation = 1;
  line.susceptance = 1.0;
  line.thermal_limit = limit;
  grid.lines.push_back(line);
  Generator gen;
  gen.substation = 0;
  gen.p_max = 100.0;
  grid.generators.push_back(gen);
  Load load;
  load.substation = 1;
  load.p_nominal = 60.0;
  grid.loads.push_back(load);
  grid.reset_topology();
  return grid;
}

Chronics constant_chronics(const Grid& grid, double demand_scale, int steps) {
  Chronics ch;
  for (int t = 0; t < steps; ++t) {
    std::vector<double> loads, gens;
    double total = 0.0;
    for (const auto& load : grid.loads) {
      loads.push_back(load.p_nominal * demand_scale);
      total += loads.back();
    }
    double pmax = 0.0;
    for (const auto& gen : grid.generators) pmax += gen.p_max;
    for (const auto& gen : grid.generators)
      gens.push_back(total * gen.p_max / pmax);
    ch.load_p.push_back(loads);
    ch.gen_p.push_back(gens);
  }
  return ch;
}

}  // namespace

TEST_CASE("catalog sizes follow the closed-form counting rules") {
  const Grid grid = case5();
  const std::size_t e = grid.lines.size();      // 8
  const std::size_t t = grid.topo_size();       // 21

  const auto pls = enumerate_actions(grid, ActionSpaceKind::PowerlineSet);
  CHECK(pls.size() == 1 + 2 * e);  // 17 on case5
  CHECK(pls.size() == 17);

  const auto tset = enumerate_actions(grid, ActionSpaceKind::TopologySet);
  CHECK(tset.size() == 1 + 2 * e + 3 * t);

  const auto topo = enumerate_actions(grid, ActionSpaceKind::Topology);
  CHECK(topo.size() == 1 + 3 * e + 4 * t);

  const Grid g14 = case14();
  CHECK(enumerate_actions(g14, ActionSpaceKind::PowerlineSet).size() ==
        1 + 2 * g14.lines.size());
  CHECK(enumerate_actions(g14, ActionSpaceKind::TopologySet).size() ==
        1 + 2 * g14.lines.size() + 3 * g14.topo_size());
}

TEST_CASE("action 0 is DoNothing in every catalog") {
  const Grid grid = case5();
  for (auto kind : {ActionSpaceKind::Topology, ActionSpaceKind::PowerlineSet,
                    ActionSpaceKind::TopologySet}) {
    const auto catalog = enumerate_actions(grid, kind);
    CHECK(catalog.actions[0].kind == ActionKind::DoNothing);
  }
}

TEST_CASE("catalogs nest: PowerlineSet within TopologySet within Topology") {
  const Grid grid = case5();
  const auto pls = action_set(enumerate_actions(grid, ActionSpaceKind::PowerlineSet));
  const auto tset = action_set(enumerate_actions(grid, ActionSpaceKind::TopologySet));
  const auto topo = action_set(enumerate_actions(grid, ActionSpaceKind::Topology));
  CHECK(std::includes(tset.begin(), tset.end(), pls.begin(), pls.end()));
  CHECK(std::includes(topo.begin(), topo.end(), tset.begin(), tset.end()));
  CHECK(tset.size() > pls.size());
  CHECK(topo.size() > tset.size());
}

TEST_CASE("apply_action: line status actions") {
  EnvConfig cfg;
  cfg.action_space = ActionSpaceKind::Topology;
  auto env = make_env(case5(), cfg);
  env.reset(1);

  SUBCASE("set -1 disconnects a connected line") {
    CHECK(env.apply_action({ActionKind::SetLineStatus, 2, -1}));
    CHECK_FALSE(env.grid().lines[2].status);
    CHECK(env.grid().topo_vect[env.grid().line_origin_pos(2)] == kDisconnected);
    CHECK(env.grid().topo_vect[env.grid().line_ext_pos(2)] == kDisconnected);
    CHECK(env.grid().lines[2].cooldown_remaining == cfg.cooldown_steps);
  }

  SUBCASE("reconnect under cooldown is illegal and leaves state unchanged") {
    CHECK(env.apply_action({ActionKind::SetLineStatus, 2, -1}));
    const Grid before = env.grid();
    CHECK_FALSE(env.apply_action({ActionKind::SetLineStatus, 2, +1}));
    CHECK(env.grid().topo_vect == before.topo_vect);
    CHECK(env.grid().lines[2].status == before.lines[2].status);
  }

  SUBCASE("set to the current state is a legal no-op without cooldown") {
    CHECK(env.apply_action({ActionKind::SetLineStatus, 2, +1}));
    CHECK(env.grid().lines[2].cooldown_remaining == 0);
  }

  SUBCASE("out-of-range target is illegal") {
    CHECK_FALSE(env.apply_action({ActionKind::SetLineStatus, 99, -1}));
    CHECK_FALSE(env.apply_action({ActionKind::ChangeBus, -3, 0}));
  }

  SUBCASE("change_line_status toggles and reconnects to busbar 1") {
    CHECK(env.apply_action({ActionKind::ChangeLineStatus, 3, 0}));
    CHECK_FALSE(env.grid().lines[3].status);
    // cooldown blocks the toggle back
    CHECK_FALSE(env.apply_action({ActionKind::ChangeLineStatus, 3, 0}));
  }

  SUBCASE("a line dropped via SetBus(-1) cannot be blindly reconnected") {
    const auto pos = static_cast<int>(env.grid().line_origin_pos(4));
    CHECK(env.apply_action({ActionKind::SetBus, pos, -1}));
    CHECK_FALSE(env.grid().lines[4].status);
    // wait out the cooldown
    for (int i = 0; i < 4; ++i) env.step(std::size_t{0});
    CHECK(env.grid().lines[4].cooldown_remaining == 0);
    CHECK_FALSE(env.apply_action({ActionKind::SetLineStatus, 4, +1}));
    CHECK_FALSE(env.apply_action({ActionKind::ChangeLineStatus, 4, 0}));
  }
}

TEST_CASE("apply_action: bus actions and islanding") {
  EnvConfig cfg;
  cfg.action_space = ActionSpaceKind::Topology;
  auto env = make_env(case5(), cfg);
  env.reset(1);

  SUBCASE("ChangeBus moves an object from busbar 1 to 2") {
    const auto pos = static_cast<int>(env.grid().load_pos(0));
    CHECK(env.apply_action({ActionKind::ChangeBus, pos, 0}));
    CHECK(env.grid().topo_vect[pos] == 2);
  }

  SUBCASE("ChangeBus on a disconnected object is illegal") {
    const auto pos = static_cast<int>(env.grid().load_pos(0));
    CHECK(env.apply_action({ActionKind::SetBus, pos, -1}));
    CHECK_FALSE(env.apply_action({ActionKind::ChangeBus, pos, 0}));
  }

  SUBCASE("SetBus(-1) on a load removes its demand from the balance") {
    const auto pos = static_cast<int>(env.grid().load_pos(1));
    CHECK(env.apply_action({ActionKind::SetBus, pos, -1}));
    const auto sr = env.step(std::size_t{0});
    CHECK(env.grid().loads[1].d_actual == 0.0);
    CHECK(sr.info.load_satisfaction < 1.0);
  }

  SUBCASE("bus split creates a second island, matching the BFS oracle") {
    // Move one line end at substation 2 to busbar 2: that busbar then hosts
    // only the line end, forming its own electrical node.
    const auto pos = static_cast<int>(env.grid().line_ext_pos(1));  // line 0-2
    CHECK(env.apply_action({ActionKind::SetBus, pos, 2}));
    env.step(std::size_t{0});
    const NodeMap nodes = build_electrical_nodes(env.grid());
    const auto expected = oracle::bfs_islands(env.grid(), nodes);
    CHECK(env.last_result().islands.count() == expected.size());
    CHECK(expected.size() == 2);
  }
}

TEST_CASE("step: healthy episode runs to the horizon with positive rewards") {
  EnvConfig cfg;
  cfg.horizon = 25;
  auto env = make_env(case5(), cfg, 0.5);
  env.reset(3);
  int steps = 0;
  while (!env.done()) {
    const auto sr = env.step(std::size_t{0});
    ++steps;
    CHECK(sr.reward > 0.0);
    CHECK(sr.info.legal);
    if (steps < 25) CHECK_FALSE(sr.done);
  }
  CHECK(steps == 25);
  CHECK(env.episode_log().steps_survived() == 25);
}

TEST_CASE("step: severing all generation blacks out and ends at t = 1") {
  EnvConfig cfg;
  cfg.contingency = {0, 1, 2, 3, 4, 5, 6, 7};  // every line
  auto env = make_env(case5(), cfg);
  env.reset(3);
  const auto sr = env.step(std::size_t{0});
  CHECK(sr.done);
  CHECK(sr.reward == -1.0);
  CHECK(env.t() == 1);
  CHECK(env.episode_log().steps_survived() == 1);
}

TEST_CASE("step after done raises") {
  EnvConfig cfg;
  cfg.horizon = 2;
  auto env = make_env(case5(), cfg);
  env.reset(1);
  env.step(std::size_t{0});
  env.step(std::size_t{0});
  CHECK(env.done());
  CHECK_THROWS_AS(env.step(std::size_t{0}), SteppedAfterDone);
}

TEST_CASE("step reward equals the hand formula on the two-node fixture") {
  EnvConfig cfg;
  cfg.horizon = 4;
  Environment env(two_node_grid(100.0), cfg);
  Grid reference = two_node_grid(100.0);
  env.set_chronics(constant_chronics(reference, 1.0, 4));
  env.reset(0);
  const auto sr = env.step(std::size_t{0});

  // expected reward from the oracle power flow: rho = 60/100, LS = 1
  reference.loads[0].d_scheduled = 60.0;
  reference.generators[0].p_scheduled = 60.0;
  const auto oracle_flow = oracle::dense_dc_solve(reference);
  const double rho = std::fabs(oracle_flow.flow_or[0]) / 100.0;
  const double expected = std::max(0.0, 1.0 - rho * rho) * 1.0;
  CHECK(sr.reward == doctest::Approx(expected).epsilon(1e-12));
  CHECK(expected == doctest::Approx(0.64));
}

TEST_CASE("reward formula: maximum, blackout, and mixed loading") {
  // all rho = 0, LS = 1 -> reward 1
  Grid grid = case5();
  for (auto& load : grid.loads) load.d_scheduled = 0.0;
  PowerFlowResult res;
  res.line_loading.assign(8, 0.0);
  res.line_flow_p_or.assign(8, 0.0);
  res.line_flow_p_ex.assign(8, 0.0);
  CHECK(step_reward(grid, res, false) == 1.0);
  CHECK(step_reward(grid, res, true) == -1.0);

  // rho = (0.5, 1.2) on a 2-line grid with LS = 1 -> (0.75 + 0) / 2
  Grid two;
  two.substations.resize(2);
  for (int l = 0; l < 2; ++l) {
    Powerline line;
    line.from_substation = 0;
    line.to_substation = 1;
    two.lines.push_back(line);
  }
  two.reset_topology();
  PowerFlowResult r2;
  r2.line_loading = {0.5, 1.2};
  const double got = step_reward(two, r2, false);
  // independent reimplementation of the formula
  double margin = 0.0;
  for (double rho : {0.5, 1.2}) margin += std::max(0.0, 1.0 - rho * rho);
  CHECK(got == doctest::Approx(margin / 2.0).epsilon(1e-15));
  CHECK(got == doctest::Approx(0.375));
}

TEST_CASE("observation layout and sizes") {
  const Grid grid = case5();
  const std::size_t g = 2, l = 3, e = 8, t = 21;
  CHECK(observation_size(grid, ObservationSpaceKind::Essential) == g + l + 7 * e + t);
  CHECK(observation_size(grid, ObservationSpaceKind::Complete) ==
        2 * g + 2 * l + 9 * e + t);

  EnvConfig cfg;
  auto env = make_env(grid, cfg);
  const auto obs = env.reset(5);
  REQUIRE(obs.values.size() == g + l + 7 * e + t);

  // gen_p block leads, topo_vect block trails
  for (std::size_t k = 0; k < g; ++k)
    CHECK(obs.values[k] == env.grid().generators[k].p_actual);
  for (std::size_t j = 0; j < l; ++j)
    CHECK(obs.values[g + j] == env.grid().loads[j].d_actual);
  for (std::size_t i = 0; i < t; ++i)
    CHECK(obs.values[obs.values.size() - t + i] ==
          static_cast<double>(env.grid().topo_vect[i]));

  // a_or = |p_or| and rho blocks sit where the layout says
  const std::size_t p_or_at = g + l;
  const std::size_t a_or_at = p_or_at + e;
  const std::size_t rho_at = p_or_at + 4 * e;
  const std::size_t status_at = p_or_at + 5 * e;
  for (std::size_t i = 0; i < e; ++i) {
    CHECK(obs.values[a_or_at + i] == std::fabs(obs.values[p_or_at + i]));
    CHECK(obs.values[rho_at + i] == env.last_result().line_loading[i]);
    CHECK(obs.values[status_at + i] == 1.0);
  }
}

TEST_CASE("complete observations add the reactive blocks") {
  EnvConfig cfg;
  cfg.observation_space = ObservationSpaceKind::Complete;
  auto env = make_env(case5(), cfg);
  const auto obs = env.reset(5);
  REQUIRE(obs.values.size() == 2 * 2 + 2 * 3 + 9 * 8 + 21);
  // gen_q block carries the scheduled constants
  CHECK(obs.values[2] == env.grid().generators[0].q_scheduled);
  CHECK(obs.values[3] == env.grid().generators[1].q_scheduled);
}

TEST_CASE("all lines disconnected: zero flow blocks, status all zero") {
  EnvConfig cfg;
  cfg.contingency = {0, 1, 2, 3, 4, 5, 6, 7};
  auto env = make_env(case5(), cfg);
  const auto obs = env.reset(9);
  const std::size_t g = 2, l = 3, e = 8;
  const std::size_t p_or_at = g + l;
  for (std::size_t i = p_or_at; i < p_or_at + 5 * e; ++i) CHECK(obs.values[i] == 0.0);
  const std::size_t status_at = p_or_at + 5 * e;
  for (std::size_t i = 0; i < e; ++i) CHECK(obs.values[status_at + i] == 0.0);
  // topo entries of line ends read -1
  CHECK(obs.values[obs.values.size() - 21] == -1.0);
}

TEST_CASE("observe is deterministic") {
  auto env = make_env(case5());
  env.reset(11);
  env.step(std::size_t{0});
  const auto a = env.observe();
  const auto b = env.observe();
  CHECK(a.values == b.values);
}

TEST_CASE("inject_contingency: empty event leaves the state unchanged") {
  auto env = make_env(case5());
  const auto before = env.reset(2);
  env.inject_contingency({});
  const auto after = env.observe();
  CHECK(before.values == after.values);
}

TEST_CASE("inject_contingency: all case5 lines leave five islands, no service") {
  EnvConfig cfg;
  cfg.contingency = {0, 1, 2, 3, 4, 5, 6, 7};
  auto env = make_env(case5(), cfg);
  env.reset(2);
  CHECK(env.last_result().islands.count() == 5);
  for (double served : env.last_result().served) CHECK(served == 0.0);
}

TEST_CASE("inject_contingency: case14 three-line cut matches the BFS oracle") {
  EnvConfig cfg;
  cfg.contingency = {11, 12, 19};
  auto env = make_env(case14(), cfg);
  env.reset(2);
  const NodeMap nodes = build_electrical_nodes(env.grid());
  const auto expected = oracle::bfs_islands(env.grid(), nodes);
  CHECK(env.last_result().islands.count() == expected.size());
  CHECK(expected.size() == 2);
  // contingency lines carry a cooldown
  for (int l : cfg.contingency)
    CHECK(env.grid().lines[l].cooldown_remaining == cfg.cooldown_steps);
}

TEST_CASE("inject_contingency validates ids and timing") {
  auto env = make_env(case5());
  env.reset(2);
  CHECK_THROWS_AS(env.inject_contingency({42}), InvalidLineId);
  env.step(std::size_t{0});
  CHECK_THROWS_AS(env.inject_contingency({0}), Error);
}

TEST_CASE("episodes keep running while any load is served despite islands") {
  EnvConfig cfg;
  cfg.contingency = {11, 12, 19};  // islands substations 11, 12 (loads only)
  cfg.horizon = 30;
  auto env = make_env(case14(), cfg, 0.5);
  env.reset(4);
  int steps = 0;
  while (!env.done()) {
    const auto sr = env.step(std::size_t{0});
    ++steps;
    CHECK(sr.info.islands >= 2);
    CHECK(sr.info.load_satisfaction > 0.0);
  }
  CHECK(steps == 30);  // islanding alone never terminates the episode
}

TEST_CASE("per-step info stays in range") {
  EnvConfig cfg;
  cfg.contingency = {0, 1};
  cfg.horizon = 40;
  auto env = make_env(case5(), cfg, 1.0);
  env.reset(8);
  while (!env.done()) {
    const auto sr = env.step(std::size_t{0});
    CHECK(sr.info.load_satisfaction >= 0.0);
    CHECK(sr.info.load_satisfaction <= 1.0);
    CHECK(sr.info.line_connectivity >= 0.0);
    CHECK(sr.info.line_connectivity <= 1.0);
    CHECK(sr.info.operational_cost >= 0.0);
    CHECK(sr.reward >= -1.0);
    CHECK(sr.reward <= 1.0);
  }
}

TEST_CASE("illegal actions behave exactly like DoNothing") {
  EnvConfig cfg;
  cfg.horizon = 10;
  cfg.contingency = {0};
  auto env_a = make_env(case5(), cfg);
  auto env_b = make_env(case5(), cfg);
  env_a.reset(6);
  env_b.reset(6);
  // line 0 is under contingency cooldown: reconnecting it is illegal
  const auto catalog = env_a.catalog();
  std::size_t reconnect_idx = 0;
  for (std::size_t i = 0; i < catalog.size(); ++i)
    if (catalog.actions[i].kind == ActionKind::SetLineStatus &&
        catalog.actions[i].target == 0 && catalog.actions[i].value == +1)
      reconnect_idx = i;
  const auto ra = env_a.step(reconnect_idx);
  const auto rb = env_b.step(std::size_t{0});
  CHECK_FALSE(ra.info.legal);
  CHECK(rb.info.legal);
  CHECK(ra.observation.values == rb.observation.values);
  CHECK(ra.reward == rb.reward);
}

TEST_CASE("replaying a logged action sequence reproduces the episode bit-exactly") {
  EnvConfig cfg;
  cfg.action_space = ActionSpaceKind::TopologySet;
  cfg.horizon = 30;
  cfg.contingency = {2};
  auto env_a = make_env(case5(), cfg, 1.0);
  auto env_b = make_env(case5(), cfg, 1.0);

  Rng rng(2718);
  std::vector<std::size_t> actions;
  env_a.reset(17);
  while (!env_a.done()) {
    const std::size_t a = rng.bounded(env_a.catalog().size());
    actions.push_back(a);
    env_a.step(a);
  }
  env_b.reset(17);
  for (std::size_t a : actions) env_b.step(a);

  REQUIRE(env_a.episode_log().steps_survived() == env_b.episode_log().steps_survived());
  for (std::size_t t = 0; t < env_a.episode_log().steps.size(); ++t) {
    const auto& ra = env_a.episode_log().steps[t];
    const auto& rb = env_b.episode_log().steps[t];
    CHECK(ra.d_actual == rb.d_actual);
    CHECK(ra.p_actual == rb.p_actual);
    CHECK(ra.line_status == rb.line_status);
    CHECK(ra.reward == rb.reward);
    CHECK(ra.islands == rb.islands);
  }
}
