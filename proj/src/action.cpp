#include "gridres/action.hpp"

namespace gridres {

std::string Action::describe() const {
  switch (kind) {
    case ActionKind::DoNothing:
      return "do_nothing";
    case ActionKind::SetLineStatus:
      return "set_line_status(" + std::to_string(target) + ", " +
             std::to_string(value) + ")";
    case ActionKind::ChangeLineStatus:
      return "change_line_status(" + std::to_string(target) + ")";
    case ActionKind::SetBus:
      return "set_bus(" + std::to_string(target) + ", " + std::to_string(value) + ")";
    case ActionKind::ChangeBus:
      return "change_bus(" + std::to_string(target) + ")";
  }
  return "?";
}

ActionSpaceKind action_space_from_name(const std::string& name) {
  if (name == "topology") return ActionSpaceKind::Topology;
  if (name == "powerline_set") return ActionSpaceKind::PowerlineSet;
  if (name == "topology_set") return ActionSpaceKind::TopologySet;
  throw ConfigError("unknown action space: " + name);
}

std::string to_string(ActionSpaceKind kind) {
  switch (kind) {
    case ActionSpaceKind::Topology: return "topology";
    case ActionSpaceKind::PowerlineSet: return "powerline_set";
    case ActionSpaceKind::TopologySet: return "topology_set";
  }
  return "?";
}

ActionCatalog enumerate_actions(const Grid& grid, ActionSpaceKind kind) {
  const bool with_bus = kind != ActionSpaceKind::PowerlineSet;
  const bool with_change = kind == ActionSpaceKind::Topology;

  ActionCatalog catalog;
  catalog.space_kind = kind;
  catalog.actions.push_back(Action{});  // index 0: DoNothing

  const int n_lines = static_cast<int>(grid.lines.size());
  for (int l = 0; l < n_lines; ++l) {
    catalog.actions.push_back({ActionKind::SetLineStatus, l, -1});
    catalog.actions.push_back({ActionKind::SetLineStatus, l, +1});
    if (with_change) catalog.actions.push_back({ActionKind::ChangeLineStatus, l, 0});
  }
  if (with_bus) {
    const int n_objects = static_cast<int>(grid.topo_size());
    for (int pos = 0; pos < n_objects; ++pos) {
      catalog.actions.push_back({ActionKind::SetBus, pos, 1});
      catalog.actions.push_back({ActionKind::SetBus, pos, 2});
      catalog.actions.push_back({ActionKind::SetBus, pos, -1});
      if (with_change) catalog.actions.push_back({ActionKind::ChangeBus, pos, 0});
    }
  }
  return catalog;
}

}  // namespace gridres
