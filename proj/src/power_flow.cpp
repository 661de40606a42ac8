#include "gridres/power_flow.hpp"

#include <cmath>

#include "gridres/matrix.hpp"

namespace gridres {

namespace {

struct IslandMembers {
  std::vector<int> gens;
  std::vector<int> loads;
};

}  // namespace

PowerFlowResult solve_dc_power_flow(Grid& grid, const NodeMap& nodes,
                                    const IslandPartition& islands) {
  PowerFlowResult res;
  res.islands = islands;
  res.node_angles.assign(nodes.node_count, 0.0);
  res.line_flow_p_or.assign(grid.lines.size(), 0.0);
  res.line_flow_p_ex.assign(grid.lines.size(), 0.0);
  res.line_loading.assign(grid.lines.size(), 0.0);
  res.served.assign(grid.loads.size(), 0.0);
  res.dispatched.assign(grid.generators.size(), 0.0);
  res.island_blackout.assign(islands.count(), false);

  // Attach connected generators and loads to their island.
  std::vector<int> gen_node(grid.generators.size(), -1);
  std::vector<int> load_node(grid.loads.size(), -1);
  std::vector<IslandMembers> members(islands.count());
  for (std::size_t g = 0; g < grid.generators.size(); ++g) {
    gen_node[g] = nodes.node_of_object(grid, grid.generator_pos(g),
                                       grid.generators[g].substation);
    if (gen_node[g] >= 0)
      members[islands.island_of_node[gen_node[g]]].gens.push_back((int)g);
    grid.generators[g].p_actual = 0.0;
  }
  for (std::size_t d = 0; d < grid.loads.size(); ++d) {
    load_node[d] = nodes.node_of_object(grid, grid.load_pos(d),
                                        grid.loads[d].substation);
    if (load_node[d] >= 0)
      members[islands.island_of_node[load_node[d]]].loads.push_back((int)d);
    grid.loads[d].d_actual = 0.0;
  }

  std::vector<double> injection(nodes.node_count, 0.0);

  for (std::size_t isl = 0; isl < islands.count(); ++isl) {
    const auto& mem = members[isl];
    double p_max_total = 0.0;
    double p_sched_total = 0.0;
    for (int g : mem.gens) {
      p_max_total += grid.generators[g].p_max;
      p_sched_total += grid.generators[g].p_scheduled;
    }
    double demand = 0.0;
    for (int d : mem.loads) demand += grid.loads[d].d_scheduled;

    if (mem.gens.empty() || p_max_total <= 0.0) {
      res.island_blackout[isl] = true;
      continue;  // loads stay at zero, angles stay at zero
    }

    // Shed proportionally when demand exceeds capacity.
    const double target = std::min(demand, p_max_total);
    const double shed_scale = demand > 0.0 ? target / demand : 0.0;
    for (int d : mem.loads) {
      auto& load = grid.loads[d];
      load.d_actual = load.d_scheduled * shed_scale;
    }

    // Proportional redispatch clipped to [0, p_max]; the clip shortfall is
    // refilled proportionally to remaining headroom (one pass is exact since
    // target <= p_max_total).
    if (p_sched_total > 0.0) {
      const double alpha = target / p_sched_total;
      double produced = 0.0;
      for (int g : mem.gens) {
        auto& gen = grid.generators[g];
        gen.p_actual = std::min(gen.p_scheduled * alpha, gen.p_max);
        produced += gen.p_actual;
      }
      const double deficit = target - produced;
      if (deficit > 1e-12) {
        double headroom = 0.0;
        for (int g : mem.gens) headroom += grid.generators[g].p_max - grid.generators[g].p_actual;
        for (int g : mem.gens) {
          auto& gen = grid.generators[g];
          gen.p_actual += deficit * (gen.p_max - gen.p_actual) / headroom;
        }
      }
    } else {
      for (int g : mem.gens) {
        auto& gen = grid.generators[g];
        gen.p_actual = target * gen.p_max / p_max_total;
      }
    }

    for (int g : mem.gens) injection[gen_node[g]] += grid.generators[g].p_actual;
    for (int d : mem.loads) injection[load_node[d]] -= grid.loads[d].d_actual;

    const auto& island_nodes = islands.islands[isl];
    if (island_nodes.size() <= 1) continue;  // single node, no angles to solve

    // Slack: the generator-bearing node with the largest attached p_max,
    // ties broken by lowest node index.
    std::vector<double> node_pmax(island_nodes.size(), 0.0);
    std::vector<int> local_of_node(nodes.node_count, -1);
    for (std::size_t i = 0; i < island_nodes.size(); ++i)
      local_of_node[island_nodes[i]] = static_cast<int>(i);
    for (int g : mem.gens)
      node_pmax[local_of_node[gen_node[g]]] += grid.generators[g].p_max;
    int slack_local = 0;
    for (std::size_t i = 1; i < island_nodes.size(); ++i)
      if (node_pmax[i] > node_pmax[slack_local]) slack_local = static_cast<int>(i);

    // Reduced weighted Laplacian over the island, slack row/column removed.
    const std::size_t n = island_nodes.size();
    std::vector<int> reduced_of_local(n, -1);
    std::size_t next = 0;
    for (std::size_t i = 0; i < n; ++i)
      if (static_cast<int>(i) != slack_local) reduced_of_local[i] = static_cast<int>(next++);

    Matrix laplacian(n - 1, n - 1);
    std::vector<double> rhs(n - 1, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      const int r = reduced_of_local[i];
      if (r >= 0) rhs[r] = injection[island_nodes[i]];
    }
    for (std::size_t l = 0; l < grid.lines.size(); ++l) {
      const auto& line = grid.lines[l];
      if (!line.status) continue;
      const int a = nodes.node_of_object(grid, grid.line_origin_pos(l), line.from_substation);
      const int b = nodes.node_of_object(grid, grid.line_ext_pos(l), line.to_substation);
      if (a < 0 || b < 0) continue;
      if (islands.island_of_node[a] != static_cast<int>(isl)) continue;
      const int la = local_of_node[a];
      const int lb = local_of_node[b];
      if (la == lb) continue;  // both ends on the same electrical node
      const int ra = reduced_of_local[la];
      const int rb = reduced_of_local[lb];
      if (ra >= 0) laplacian(ra, ra) += line.susceptance;
      if (rb >= 0) laplacian(rb, rb) += line.susceptance;
      if (ra >= 0 && rb >= 0) {
        laplacian(ra, rb) -= line.susceptance;
        laplacian(rb, ra) -= line.susceptance;
      }
    }

    std::vector<double> theta;
    try {
      theta = solve_dense(std::move(laplacian), std::move(rhs));
    } catch (const SingularSystem&) {
      throw SingularSystem("dc power flow: reduced Laplacian singular in island " +
                           std::to_string(isl));
    }
    for (std::size_t i = 0; i < n; ++i) {
      const int r = reduced_of_local[i];
      res.node_angles[island_nodes[i]] = r >= 0 ? theta[r] : 0.0;
    }
  }

  for (std::size_t l = 0; l < grid.lines.size(); ++l) {
    const auto& line = grid.lines[l];
    if (!line.status) continue;
    const int a = nodes.node_of_object(grid, grid.line_origin_pos(l), line.from_substation);
    const int b = nodes.node_of_object(grid, grid.line_ext_pos(l), line.to_substation);
    if (a < 0 || b < 0) continue;
    const double flow = line.susceptance * (res.node_angles[a] - res.node_angles[b]);
    res.line_flow_p_or[l] = flow;
    res.line_flow_p_ex[l] = -flow;
    res.line_loading[l] = std::fabs(flow) / line.thermal_limit;
  }

  for (std::size_t d = 0; d < grid.loads.size(); ++d) res.served[d] = grid.loads[d].d_actual;
  for (std::size_t g = 0; g < grid.generators.size(); ++g)
    res.dispatched[g] = grid.generators[g].p_actual;
  return res;
}

std::vector<int> apply_overflow_protection(Grid& grid,
                                           const PowerFlowResult& result,
                                           int max_overflow_steps,
                                           int cooldown_steps) {
  std::vector<int> tripped;
  for (std::size_t l = 0; l < grid.lines.size(); ++l) {
    auto& line = grid.lines[l];
    if (!line.status) continue;
    if (result.line_loading[l] > 1.0) {
      line.timestep_overflow += 1;
      if (line.timestep_overflow >= max_overflow_steps) {
        line.status = false;
        grid.topo_vect[grid.line_origin_pos(l)] = kDisconnected;
        grid.topo_vect[grid.line_ext_pos(l)] = kDisconnected;
        line.timestep_overflow = 0;
        line.cooldown_remaining = cooldown_steps;
        tripped.push_back(static_cast<int>(l));
      }
    } else {
      line.timestep_overflow = 0;
    }
  }
  return tripped;
}

}  // namespace gridres
