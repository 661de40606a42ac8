#pragma once

#include <string>
#include <vector>

#include "gridres/grid.hpp"
#include "gridres/power_flow.hpp"

namespace gridres {

enum class ObservationSpaceKind { Complete, Essential };

ObservationSpaceKind observation_space_from_name(const std::string& name);
std::string to_string(ObservationSpaceKind kind);

/// Flat numeric encoding of the grid state.
///
/// Essential layout (block sizes in parentheses; G generators, L loads,
/// E lines, T topo objects):
///   gen_p(G) load_p(L) p_or(E) a_or(E) p_ex(E) a_ex(E) rho(E)
///   line_status(E) timestep_overflow(E) topo_vect(T)
/// Complete additionally interleaves the reactive blocks in table order:
///   gen_p gen_q load_p load_q p_or a_or q_or p_ex a_ex q_ex rho
///   line_status timestep_overflow topo_vect
/// Disconnected elements report 0 in the flow blocks and -1 in topo_vect.
struct ObservationVector {
  ObservationSpaceKind space_kind = ObservationSpaceKind::Essential;
  std::vector<double> values;

  std::size_t size() const { return values.size(); }
};

std::size_t observation_size(const Grid& grid, ObservationSpaceKind kind);

ObservationVector encode_observation(const Grid& grid,
                                     const PowerFlowResult& result,
                                     ObservationSpaceKind kind);

}  // namespace gridres
