#pragma once

#include <string>
#include <vector>

#include "gridres/grid.hpp"

namespace gridres {

enum class ActionKind {
  DoNothing,
  SetLineStatus,     // value in {-1, +1}; 0 is subsumed by DoNothing
  ChangeLineStatus,  // toggle
  SetBus,            // value in {-1, 1, 2}; 0 is subsumed by DoNothing
  ChangeBus,         // toggle busbar 1 <-> 2
};

/// One atomic discrete action. `target` is a line id for line actions and a
/// topo_vect position for bus actions.
struct Action {
  ActionKind kind = ActionKind::DoNothing;
  int target = -1;
  int value = 0;

  friend bool operator==(const Action&, const Action&) = default;
  std::string describe() const;
};

enum class ActionSpaceKind { Topology, PowerlineSet, TopologySet };

ActionSpaceKind action_space_from_name(const std::string& name);
std::string to_string(ActionSpaceKind kind);

/// Ordered action list for one action-space kind; index 0 is always
/// DoNothing, then line actions by line index, then bus actions by
/// topo_vect position.
struct ActionCatalog {
  ActionSpaceKind space_kind = ActionSpaceKind::PowerlineSet;
  std::vector<Action> actions;

  std::size_t size() const { return actions.size(); }
};

ActionCatalog enumerate_actions(const Grid& grid, ActionSpaceKind kind);

}  // namespace gridres
