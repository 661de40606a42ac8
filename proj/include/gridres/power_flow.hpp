#pragma once

#include <vector>

#include "gridres/grid.hpp"

namespace gridres {

/// DC power-flow solution over all islands of the current topology.
/// For a connected line, line_flow_p_ex[l] == -line_flow_p_or[l] exactly;
/// disconnected lines report zero flow and zero loading.
struct PowerFlowResult {
  std::vector<double> node_angles;    // radians, slack of each island at 0
  std::vector<double> line_flow_p_or; // MW
  std::vector<double> line_flow_p_ex; // MW
  std::vector<double> line_loading;   // rho = |flow| / thermal_limit
  IslandPartition islands;
  std::vector<double> served;         // d_actual per load
  std::vector<double> dispatched;     // p_actual per generator
  std::vector<bool> island_blackout;  // true when the island has no generation

  /// True when no load in the whole grid receives any power.
  bool total_blackout() const {
    for (double d : served)
      if (d > 0.0) return false;
    return !served.empty();
  }
};

/// Solves B.theta = P independently per island and settles generation against
/// demand: islands without generation capacity are blacked out, islands whose
/// demand exceeds total capacity shed load proportionally, and the remaining
/// schedule imbalance is absorbed by proportional generator redispatch clipped
/// to [0, p_max]. Writes d_actual / p_actual back into the grid.
PowerFlowResult solve_dc_power_flow(Grid& grid, const NodeMap& nodes,
                                    const IslandPartition& islands);

/// Increments per-line overflow counters (loading > 1), resets them for lines
/// back at or under the limit, and disconnects lines that stayed overloaded
/// for max_overflow_steps consecutive solves. Returns the ids of the lines
/// disconnected by this call.
std::vector<int> apply_overflow_protection(Grid& grid,
                                           const PowerFlowResult& result,
                                           int max_overflow_steps,
                                           int cooldown_steps);

}  // namespace gridres
