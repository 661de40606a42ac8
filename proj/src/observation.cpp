#include "gridres/observation.hpp"

#include <cmath>

namespace gridres {

ObservationSpaceKind observation_space_from_name(const std::string& name) {
  if (name == "complete") return ObservationSpaceKind::Complete;
  if (name == "essential") return ObservationSpaceKind::Essential;
  throw ConfigError("unknown observation space: " + name);
}

std::string to_string(ObservationSpaceKind kind) {
  return kind == ObservationSpaceKind::Complete ? "complete" : "essential";
}

std::size_t observation_size(const Grid& grid, ObservationSpaceKind kind) {
  const std::size_t g = grid.generators.size();
  const std::size_t l = grid.loads.size();
  const std::size_t e = grid.lines.size();
  const std::size_t t = grid.topo_size();
  if (kind == ObservationSpaceKind::Essential) return g + l + 7 * e + t;
  return 2 * g + 2 * l + 9 * e + t;
}

ObservationVector encode_observation(const Grid& grid,
                                     const PowerFlowResult& result,
                                     ObservationSpaceKind kind) {
  const bool complete = kind == ObservationSpaceKind::Complete;
  ObservationVector obs;
  obs.space_kind = kind;
  obs.values.reserve(observation_size(grid, kind));
  auto& v = obs.values;

  for (const auto& gen : grid.generators) v.push_back(gen.p_actual);
  if (complete)
    for (const auto& gen : grid.generators) v.push_back(gen.q_scheduled);
  for (const auto& load : grid.loads) v.push_back(load.d_actual);
  if (complete)
    for (const auto& load : grid.loads) v.push_back(load.q_scheduled);

  const std::size_t e = grid.lines.size();
  auto line_block = [&](auto&& per_line) {
    for (std::size_t l = 0; l < e; ++l) v.push_back(per_line(l));
  };
  auto flow_or = [&](std::size_t l) {
    return grid.lines[l].status ? result.line_flow_p_or[l] : 0.0;
  };
  auto flow_ex = [&](std::size_t l) {
    return grid.lines[l].status ? result.line_flow_p_ex[l] : 0.0;
  };

  line_block(flow_or);                                            // p_or
  line_block([&](std::size_t l) { return std::fabs(flow_or(l)); });  // a_or
  if (complete) line_block([](std::size_t) { return 0.0; });      // q_or
  line_block(flow_ex);                                            // p_ex
  line_block([&](std::size_t l) { return std::fabs(flow_ex(l)); });  // a_ex
  if (complete) line_block([](std::size_t) { return 0.0; });      // q_ex
  line_block([&](std::size_t l) {
    return grid.lines[l].status ? result.line_loading[l] : 0.0;
  });                                                             // rho
  line_block([&](std::size_t l) { return grid.lines[l].status ? 1.0 : 0.0; });
  line_block([&](std::size_t l) {
    return static_cast<double>(grid.lines[l].timestep_overflow);
  });

  for (int entry : grid.topo_vect) v.push_back(static_cast<double>(entry));
  return obs;
}

}  // namespace gridres
