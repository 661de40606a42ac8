#pragma once

#include <string>
#include <vector>

#include "gridres/errors.hpp"

namespace gridres {

/// Busbar codes used in topo_vect: -1 disconnected, 1 busbar one, 2 busbar two.
inline constexpr int kDisconnected = -1;

struct Substation {
  std::string name;
};

struct Powerline {
  int from_substation = 0;
  int to_substation = 0;
  double susceptance = 1.0;     // per-unit
  double thermal_limit = 1.0;   // MW
  bool status = true;           // connected flag
  int timestep_overflow = 0;    // consecutive steps with loading > 1
  int cooldown_remaining = 0;   // steps before the line may be acted on again
  // Set when the line was taken out by a SetBus(-1) on one of its ends;
  // such a line cannot be blindly reconnected by a status action.
  bool setbus_disconnected = false;
};

struct Generator {
  int substation = 0;
  double p_max = 0.0;        // MW
  double p_scheduled = 0.0;  // MW, from chronics
  double p_actual = 0.0;     // MW, after redispatch
  double q_scheduled = 0.0;  // MVar, Complete observation space only
};

struct Load {
  int substation = 0;
  double p_nominal = 10.0;   // MW, scale anchor for synthetic chronics
  double d_scheduled = 0.0;  // MW, from chronics
  double d_actual = 0.0;     // MW, after shedding
  double q_scheduled = 0.0;  // MVar, Complete observation space only
};

/// Static grid description plus mutable dual-busbar topology state.
///
/// topo_vect holds one busbar assignment per grid object, densely indexed:
///   [0, E)        line origins, by line id
///   [E, 2E)       line extremities, by line id
///   [2E, 2E+G)    generators, by generator id
///   [2E+G, 2E+G+L) loads, by load id
struct Grid {
  std::vector<Substation> substations;
  std::vector<Powerline> lines;
  std::vector<Generator> generators;
  std::vector<Load> loads;
  std::vector<int> topo_vect;

  std::size_t line_origin_pos(std::size_t l) const { return l; }
  std::size_t line_ext_pos(std::size_t l) const { return lines.size() + l; }
  std::size_t generator_pos(std::size_t g) const { return 2 * lines.size() + g; }
  std::size_t load_pos(std::size_t d) const {
    return 2 * lines.size() + generators.size() + d;
  }
  std::size_t topo_size() const {
    return 2 * lines.size() + generators.size() + loads.size();
  }

  /// All objects on busbar 1, all lines in service.
  void reset_topology();

  /// Checks the structural invariants; throws Error on violation.
  void validate() const;

  /// Parses the grid description JSON (arrays "substations", "lines",
  /// "generators", "loads").
  static Grid from_json_text(const std::string& text);
  static Grid from_json_file(const std::string& path);
};

/// Mapping from (substation, busbar) slots that host at least one connected
/// object to dense electrical-node indices.
struct NodeMap {
  std::vector<int> node_of_slot;  // size 2 * #substations, -1 when empty
  int node_count = 0;

  int node_of(int substation, int busbar) const {
    return node_of_slot[2 * substation + (busbar - 1)];
  }
  /// Electrical node of a grid object, -1 when disconnected.
  int node_of_object(const Grid& grid, std::size_t topo_pos, int substation) const {
    const int bus = grid.topo_vect[topo_pos];
    return bus == kDisconnected ? -1 : node_of(substation, bus);
  }
};

NodeMap build_electrical_nodes(const Grid& grid);

/// Connected components of the electrical-node graph induced by in-service
/// lines. Components are ordered by their smallest member node index and each
/// member list is sorted.
struct IslandPartition {
  std::vector<int> island_of_node;
  std::vector<std::vector<int>> islands;

  std::size_t count() const { return islands.size(); }
};

IslandPartition find_islands(const NodeMap& nodes, const Grid& grid);

}  // namespace gridres
