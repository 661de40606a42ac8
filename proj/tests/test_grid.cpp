#include <doctest.h>

#include "gridres/grid.hpp"
#include "oracles.hpp"

using namespace gridres;

namespace {

Grid case5() { return Grid::from_json_file(oracle::data_path("case5.json")); }
Grid case14() { return Grid::from_json_file(oracle::data_path("case14.json")); }

void disconnect(Grid& grid, std::size_t l) {
  grid.lines[l].status = false;
  grid.topo_vect[grid.line_origin_pos(l)] = kDisconnected;
  grid.topo_vect[grid.line_ext_pos(l)] = kDisconnected;
}

}  // namespace

TEST_CASE("grid fixtures load with the documented shapes") {
  const Grid g5 = case5();
  CHECK(g5.substations.size() == 5);
  CHECK(g5.lines.size() == 8);
  CHECK(g5.generators.size() == 2);
  CHECK(g5.loads.size() == 3);
  CHECK(g5.topo_vect.size() == 2 * 8 + 2 + 3);

  const Grid g14 = case14();
  CHECK(g14.substations.size() == 14);
  CHECK(g14.lines.size() == 20);
  CHECK(g14.generators.size() == 5);
  CHECK(g14.loads.size() == 11);
}

TEST_CASE("grid json rejects malformed input") {
  CHECK_THROWS_AS(Grid::from_json_file(oracle::data_path("missing.json")),
                  ConfigError);
  CHECK_THROWS_AS(Grid::from_json_text("{not json"), ConfigError);
  CHECK_THROWS_AS(Grid::from_json_text(R"({"substations":[{}],"lines":[
    {"from":0,"to":5,"susceptance":1.0,"thermal_limit":1.0}],
    "generators":[],"loads":[]})"),
                  Error);
}

TEST_CASE("all objects on busbar 1 yield one node per substation") {
  const Grid grid = case5();
  const NodeMap nodes = build_electrical_nodes(grid);
  CHECK(nodes.node_count == 5);
  for (int s = 0; s < 5; ++s) {
    CHECK(nodes.node_of(s, 1) >= 0);
    CHECK(nodes.node_of(s, 2) == -1);
  }
}

TEST_CASE("splitting a substation across busbars adds a node") {
  Grid grid = case5();
  // move load at substation 2 to busbar 2
  grid.topo_vect[grid.load_pos(0)] = 2;
  const NodeMap nodes = build_electrical_nodes(grid);
  CHECK(nodes.node_count == 6);
  CHECK(nodes.node_of(2, 1) >= 0);
  CHECK(nodes.node_of(2, 2) >= 0);
}

TEST_CASE("case14 with one split and one benign line outage has 15 nodes") {
  Grid grid = case14();
  // split substation 3: move the extremity of line 2->3 (line id 5) to bus 2
  grid.topo_vect[grid.line_ext_pos(5)] = 2;
  // drop line 8->9 (line id 15); both ends still host other objects
  disconnect(grid, 15);
  const NodeMap nodes = build_electrical_nodes(grid);
  CHECK(nodes.node_count == 15);
}

TEST_CASE("empty busbars produce no node") {
  Grid grid = case5();
  for (std::size_t l = 0; l < grid.lines.size(); ++l) disconnect(grid, l);
  // substations still host generators/loads on busbar 1
  const NodeMap nodes = build_electrical_nodes(grid);
  CHECK(nodes.node_count == 5);
}

TEST_CASE("fully connected grid is a single island") {
  const Grid grid = case5();
  const NodeMap nodes = build_electrical_nodes(grid);
  const IslandPartition part = find_islands(nodes, grid);
  CHECK(part.count() == 1);
  CHECK(part.islands[0].size() == 5);
}

TEST_CASE("disconnecting every line leaves one island per populated busbar") {
  Grid grid = case5();
  for (std::size_t l = 0; l < grid.lines.size(); ++l) disconnect(grid, l);
  const NodeMap nodes = build_electrical_nodes(grid);
  const IslandPartition part = find_islands(nodes, grid);
  CHECK(part.count() == 5);
}

TEST_CASE("case14 three-line cut splits off substations 11 and 12") {
  Grid grid = case14();
  // lines 5-11, 5-12 and 12-13 form the cut around {11, 12}
  disconnect(grid, 11);
  disconnect(grid, 12);
  disconnect(grid, 19);
  const NodeMap nodes = build_electrical_nodes(grid);
  const IslandPartition part = find_islands(nodes, grid);

  const auto expected = oracle::bfs_islands(grid, nodes);
  REQUIRE(part.count() == expected.size());
  CHECK(part.count() == 2);
  for (std::size_t i = 0; i < expected.size(); ++i)
    CHECK(part.islands[i] == expected[i]);

  // membership: the small island holds exactly the busbars of subs 11 and 12
  const int n11 = nodes.node_of(11, 1);
  const int n12 = nodes.node_of(12, 1);
  const std::vector<int> small = {std::min(n11, n12), std::max(n11, n12)};
  CHECK((part.islands[0] == small || part.islands[1] == small));
}

TEST_CASE("island partition matches the BFS oracle on random topologies") {
  gridres::Rng rng(2024);
  for (int trial = 0; trial < 200; ++trial) {
    Grid grid = oracle::random_connected_grid(rng, 3 + (int)rng.bounded(8));
    // random outages and a few bus moves
    for (std::size_t l = 0; l < grid.lines.size(); ++l)
      if (rng.uniform() < 0.3) disconnect(grid, l);
    for (std::size_t pos = 0; pos < grid.topo_size(); ++pos)
      if (grid.topo_vect[pos] == 1 && rng.uniform() < 0.15) {
        // keep line invariants: only move generator/load objects
        if (pos >= 2 * grid.lines.size()) grid.topo_vect[pos] = 2;
      }
    grid.validate();
    const NodeMap nodes = build_electrical_nodes(grid);
    const IslandPartition part = find_islands(nodes, grid);
    const auto expected = oracle::bfs_islands(grid, nodes);
    REQUIRE(part.count() == expected.size());
    for (std::size_t i = 0; i < expected.size(); ++i) {
      CHECK(part.islands[i] == expected[i]);
      for (int v : expected[i]) CHECK(part.island_of_node[v] == (int)i);
    }
  }
}

TEST_CASE("validate rejects broken line/topology combinations") {
  Grid grid = case5();
  grid.topo_vect[grid.line_origin_pos(0)] = kDisconnected;
  CHECK_THROWS_AS(grid.validate(), Error);

  Grid grid2 = case5();
  grid2.lines[0].status = false;
  CHECK_THROWS_AS(grid2.validate(), Error);

  Grid grid3 = case5();
  grid3.topo_vect[0] = 7;
  CHECK_THROWS_AS(grid3.validate(), Error);
}
