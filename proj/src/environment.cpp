#include "gridres/environment.hpp"

#include <algorithm>
#include <cmath>

namespace gridres {

double step_reward(const Grid& grid, const PowerFlowResult& result, bool blackout) {
  if (blackout) return -1.0;
  double margin = 0.0;
  for (std::size_t l = 0; l < grid.lines.size(); ++l) {
    const double rho = grid.lines[l].status ? result.line_loading[l] : 0.0;
    margin += std::max(0.0, 1.0 - rho * rho);
  }
  margin /= static_cast<double>(grid.lines.size());

  double scheduled = 0.0, actual = 0.0;
  for (const auto& load : grid.loads) {
    scheduled += load.d_scheduled;
    actual += load.d_actual;
  }
  const double ls = scheduled > 0.0 ? actual / scheduled : 1.0;
  return margin * ls;
}

Environment::Environment(Grid base_grid, EnvConfig config)
    : base_grid_(std::move(base_grid)),
      config_(std::move(config)),
      catalog_(enumerate_actions(base_grid_, config_.action_space)) {
  base_grid_.validate();
  for (int l : config_.contingency)
    if (l < 0 || static_cast<std::size_t>(l) >= base_grid_.lines.size())
      throw InvalidLineId("contingency line id out of range: " + std::to_string(l));
  synthetic_ = SyntheticChronicsParams{};  // default chronics source
}

void Environment::set_chronics(Chronics chronics) {
  chronics.validate(base_grid_);
  if (chronics.horizon() == 0) throw ConfigError("chronics: no steps");
  fixed_chronics_ = std::move(chronics);
  synthetic_.reset();
}

void Environment::set_synthetic_chronics(SyntheticChronicsParams params) {
  synthetic_ = params;
  fixed_chronics_.reset();
}

std::size_t Environment::observation_width() const {
  return observation_size(base_grid_, config_.observation_space);
}

void Environment::load_schedules(int step_index) {
  const auto& row_loads = chronics_.load_p[step_index];
  const auto& row_gens = chronics_.gen_p[step_index];
  for (std::size_t j = 0; j < grid_.loads.size(); ++j)
    grid_.loads[j].d_scheduled = row_loads[j];
  for (std::size_t k = 0; k < grid_.generators.size(); ++k)
    grid_.generators[k].p_scheduled = row_gens[k];
}

void Environment::refresh_power_flow() {
  const NodeMap nodes = build_electrical_nodes(grid_);
  const IslandPartition islands = find_islands(nodes, grid_);
  last_result_ = solve_dc_power_flow(grid_, nodes, islands);
}

ObservationVector Environment::reset(std::uint64_t episode_seed) {
  grid_ = base_grid_;
  grid_.reset_topology();
  if (fixed_chronics_)
    chronics_ = *fixed_chronics_;
  else
    chronics_ = generate_synthetic_chronics(grid_, *synthetic_, episode_seed);
  horizon_ = std::min<int>(config_.horizon, static_cast<int>(chronics_.horizon()));
  if (horizon_ <= 0) throw ConfigError("environment: empty horizon");

  t_ = 0;
  done_ = false;
  log_ = EpisodeLog{};
  log_.horizon = horizon_;
  for (const auto& load : grid_.loads) log_.load_substation.push_back(load.substation);

  load_schedules(0);
  if (!config_.contingency.empty()) inject_contingency(config_.contingency);
  refresh_power_flow();
  return observe();
}

void Environment::inject_contingency(const std::vector<int>& line_ids) {
  if (t_ != 0) throw Error("inject_contingency: only valid at t = 0");
  for (int l : line_ids) {
    if (l < 0 || static_cast<std::size_t>(l) >= grid_.lines.size())
      throw InvalidLineId("contingency line id out of range: " + std::to_string(l));
    if (grid_.lines[l].status) disconnect_line(static_cast<std::size_t>(l), false);
    grid_.lines[l].cooldown_remaining = config_.cooldown_steps;
  }
  refresh_power_flow();
}

void Environment::disconnect_line(std::size_t l, bool via_setbus) {
  auto& line = grid_.lines[l];
  line.status = false;
  line.timestep_overflow = 0;
  line.setbus_disconnected = via_setbus;
  line.cooldown_remaining = config_.cooldown_steps;
  grid_.topo_vect[grid_.line_origin_pos(l)] = kDisconnected;
  grid_.topo_vect[grid_.line_ext_pos(l)] = kDisconnected;
}

bool Environment::apply_action(const Action& action) {
  const auto n_lines = static_cast<int>(grid_.lines.size());
  const auto n_objects = static_cast<int>(grid_.topo_size());

  auto reconnect_line = [&](std::size_t l) {
    auto& line = grid_.lines[l];
    line.status = true;
    line.timestep_overflow = 0;
    line.setbus_disconnected = false;
    line.cooldown_remaining = config_.cooldown_steps;
    // Both ends return to busbar 1 (the canonical reconnection target).
    grid_.topo_vect[grid_.line_origin_pos(l)] = 1;
    grid_.topo_vect[grid_.line_ext_pos(l)] = 1;
  };

  switch (action.kind) {
    case ActionKind::DoNothing:
      return true;

    case ActionKind::SetLineStatus: {
      if (action.target < 0 || action.target >= n_lines) return false;
      if (action.value == 0) return true;
      const auto l = static_cast<std::size_t>(action.target);
      auto& line = grid_.lines[l];
      if (action.value == -1) {
        if (!line.status) return true;  // already in the requested state
        if (line.cooldown_remaining > 0) return false;
        disconnect_line(l, false);
        return true;
      }
      if (action.value == +1) {
        if (line.status) return true;
        if (line.cooldown_remaining > 0 || line.setbus_disconnected) return false;
        reconnect_line(l);
        return true;
      }
      return false;
    }

    case ActionKind::ChangeLineStatus: {
      if (action.target < 0 || action.target >= n_lines) return false;
      const auto l = static_cast<std::size_t>(action.target);
      auto& line = grid_.lines[l];
      if (line.cooldown_remaining > 0) return false;
      if (line.status) {
        disconnect_line(l, false);
      } else {
        if (line.setbus_disconnected) return false;
        reconnect_line(l);
      }
      return true;
    }

    case ActionKind::SetBus: {
      if (action.target < 0 || action.target >= n_objects) return false;
      if (action.value == 0) return true;
      if (action.value != -1 && action.value != 1 && action.value != 2) return false;
      const auto pos = static_cast<std::size_t>(action.target);
      const int current = grid_.topo_vect[pos];
      if (action.value == current) return true;

      if (pos < 2 * grid_.lines.size()) {
        const std::size_t l = pos % grid_.lines.size();
        auto& line = grid_.lines[l];
        if (line.cooldown_remaining > 0) return false;
        if (action.value == -1) {
          // Dropping one end takes the whole line out and blocks blind
          // status reconnection.
          if (!line.status) return true;
          disconnect_line(l, true);
          return true;
        }
        if (!line.status) return false;  // re-attach goes through status actions
        grid_.topo_vect[pos] = action.value;
        line.cooldown_remaining = config_.cooldown_steps;
        return true;
      }

      // Generator or load: no cooldown bookkeeping.
      grid_.topo_vect[pos] = action.value;
      return true;
    }

    case ActionKind::ChangeBus: {
      if (action.target < 0 || action.target >= n_objects) return false;
      const auto pos = static_cast<std::size_t>(action.target);
      const int current = grid_.topo_vect[pos];
      if (current == kDisconnected) return false;
      const int next = current == 1 ? 2 : 1;
      if (pos < 2 * grid_.lines.size()) {
        const std::size_t l = pos % grid_.lines.size();
        auto& line = grid_.lines[l];
        if (line.cooldown_remaining > 0) return false;
        grid_.topo_vect[pos] = next;
        line.cooldown_remaining = config_.cooldown_steps;
        return true;
      }
      grid_.topo_vect[pos] = next;
      return true;
    }
  }
  return false;
}

Environment::StepResult Environment::step(std::size_t action_index) {
  if (action_index >= catalog_.actions.size()) {
    // Out-of-range index: behaves like an illegal action.
    if (done_) throw SteppedAfterDone("step called on a finished episode");
    StepResult r = step(Action{});
    r.info.legal = false;
    return r;
  }
  return step(catalog_.actions[action_index]);
}

Environment::StepResult Environment::step(const Action& action) {
  if (done_) throw SteppedAfterDone("step called on a finished episode");

  StepResult out;
  out.info.legal = apply_action(action);

  load_schedules(t_);
  refresh_power_flow();
  out.info.tripped =
      apply_overflow_protection(grid_, last_result_, config_.max_overflow_steps,
                                config_.cooldown_steps);
  for (auto& line : grid_.lines)
    if (line.cooldown_remaining > 0) --line.cooldown_remaining;

  const bool blackout = last_result_.total_blackout();
  out.reward = step_reward(grid_, last_result_, blackout);

  StepRecord rec;
  for (const auto& load : grid_.loads) {
    rec.d_scheduled.push_back(load.d_scheduled);
    rec.d_actual.push_back(load.d_actual);
  }
  for (const auto& gen : grid_.generators) {
    rec.p_scheduled.push_back(gen.p_scheduled);
    rec.p_actual.push_back(gen.p_actual);
  }
  for (const auto& line : grid_.lines) rec.line_status.push_back(line.status ? 1 : 0);
  rec.islands = static_cast<int>(last_result_.islands.count());
  rec.reward = out.reward;

  out.info.islands = rec.islands;
  double scheduled = 0.0;
  for (double v : rec.d_scheduled) scheduled += v;
  out.info.load_satisfaction = scheduled > 0.0 ? load_satisfaction(rec) : 1.0;
  out.info.line_connectivity = line_connectivity(rec);
  out.info.operational_cost = operational_cost(rec, config_.c_re);
  log_.steps.push_back(std::move(rec));

  t_ += 1;
  done_ = t_ >= horizon_ || blackout;
  out.done = done_;
  out.observation = observe();
  return out;
}

ObservationVector Environment::observe() const {
  return encode_observation(grid_, last_result_, config_.observation_space);
}

}  // namespace gridres
