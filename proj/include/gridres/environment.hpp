#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "gridres/action.hpp"
#include "gridres/chronics.hpp"
#include "gridres/grid.hpp"
#include "gridres/metrics.hpp"
#include "gridres/observation.hpp"
#include "gridres/power_flow.hpp"

namespace gridres {

struct EnvConfig {
  ActionSpaceKind action_space = ActionSpaceKind::PowerlineSet;
  ObservationSpaceKind observation_space = ObservationSpaceKind::Essential;
  int horizon = 100;                  // H
  int max_overflow_steps = 3;         // consecutive overloads before a trip
  int cooldown_steps = 3;             // line lock after any status/bus change
  double c_re = 1.0;                  // redispatch unit cost for OC
  std::vector<int> contingency;       // lines cut before the first step
};

/// Per-step side information (legality is data, not an error).
struct StepInfo {
  bool legal = true;
  int islands = 1;
  double load_satisfaction = 1.0;
  double line_connectivity = 1.0;
  double operational_cost = 0.0;
  std::vector<int> tripped;  // lines disconnected by overflow protection
};

/// Margin-times-service reward: mean over lines of max(0, 1 - rho^2), scaled
/// by load satisfaction; -1 on total blackout. Range (-1, 1].
double step_reward(const Grid& grid, const PowerFlowResult& result, bool blackout);

/// MDP wrapper over the grid simulator. Keeps simulating after the grid
/// splits into islands; an episode ends only at the horizon or on total
/// blackout.
class Environment {
 public:
  Environment(Grid base_grid, EnvConfig config);

  /// Fixed chronics replayed every episode.
  void set_chronics(Chronics chronics);
  /// Fresh synthetic chronics per episode, seeded from the episode seed.
  void set_synthetic_chronics(SyntheticChronicsParams params);

  const ActionCatalog& catalog() const { return catalog_; }
  std::size_t observation_width() const;
  const EnvConfig& config() const { return config_; }

  ObservationVector reset(std::uint64_t episode_seed);

  /// Disconnects the listed lines (cooldown applied); only valid at t = 0.
  void inject_contingency(const std::vector<int>& line_ids);

  struct StepResult {
    ObservationVector observation;
    double reward = 0.0;
    bool done = false;
    StepInfo info;
  };

  StepResult step(std::size_t action_index);
  StepResult step(const Action& action);

  /// Applies an action to the current topology; returns false (and leaves the
  /// state unchanged) when the action is illegal.
  bool apply_action(const Action& action);

  ObservationVector observe() const;

  int t() const { return t_; }
  bool done() const { return done_; }
  int horizon() const { return horizon_; }
  const Grid& grid() const { return grid_; }
  const PowerFlowResult& last_result() const { return last_result_; }
  const EpisodeLog& episode_log() const { return log_; }
  const Chronics& chronics() const { return chronics_; }

 private:
  void refresh_power_flow();
  void load_schedules(int step_index);
  void disconnect_line(std::size_t l, bool via_setbus);

  Grid base_grid_;
  EnvConfig config_;
  ActionCatalog catalog_;

  std::optional<Chronics> fixed_chronics_;
  std::optional<SyntheticChronicsParams> synthetic_;

  Grid grid_;
  Chronics chronics_;
  PowerFlowResult last_result_;
  EpisodeLog log_;
  int horizon_ = 0;
  int t_ = 0;
  bool done_ = true;  // reset() must run before step()
};

}  // namespace gridres
