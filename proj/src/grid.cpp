#include "gridres/grid.hpp"

#include <fstream>
#include <numeric>
#include <sstream>

#include <json.hpp>

namespace gridres {

void Grid::reset_topology() {
  topo_vect.assign(topo_size(), 1);
  for (auto& line : lines) {
    line.status = true;
    line.timestep_overflow = 0;
    line.cooldown_remaining = 0;
    line.setbus_disconnected = false;
  }
}

void Grid::validate() const {
  const int n_sub = static_cast<int>(substations.size());
  if (topo_vect.size() != topo_size())
    throw Error("grid: topo_vect size mismatch");
  for (int v : topo_vect)
    if (v != kDisconnected && v != 1 && v != 2)
      throw Error("grid: topo_vect entry outside {-1, 1, 2}");
  for (std::size_t l = 0; l < lines.size(); ++l) {
    const auto& line = lines[l];
    if (line.from_substation < 0 || line.from_substation >= n_sub ||
        line.to_substation < 0 || line.to_substation >= n_sub)
      throw Error("grid: line endpoint out of range");
    if (line.susceptance <= 0.0) throw Error("grid: susceptance must be > 0");
    if (line.thermal_limit <= 0.0) throw Error("grid: thermal_limit must be > 0");
    const int o = topo_vect[line_origin_pos(l)];
    const int e = topo_vect[line_ext_pos(l)];
    if (line.status && (o == kDisconnected || e == kDisconnected))
      throw Error("grid: connected line with disconnected end");
    if (!line.status && (o != kDisconnected || e != kDisconnected))
      throw Error("grid: disconnected line with attached end");
    if (line.cooldown_remaining < 0) throw Error("grid: negative cooldown");
  }
  for (const auto& g : generators)
    if (g.substation < 0 || g.substation >= n_sub)
      throw Error("grid: generator substation out of range");
  for (const auto& d : loads)
    if (d.substation < 0 || d.substation >= n_sub)
      throw Error("grid: load substation out of range");
}

Grid Grid::from_json_text(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const std::exception& e) {
    throw ConfigError(std::string("grid json: ") + e.what());
  }
  Grid grid;
  for (const auto& s : j.at("substations")) {
    Substation sub;
    if (s.is_object() && s.contains("name")) sub.name = s["name"].get<std::string>();
    grid.substations.push_back(std::move(sub));
  }
  for (const auto& l : j.at("lines")) {
    Powerline line;
    line.from_substation = l.at("from").get<int>();
    line.to_substation = l.at("to").get<int>();
    line.susceptance = l.at("susceptance").get<double>();
    line.thermal_limit = l.at("thermal_limit").get<double>();
    grid.lines.push_back(line);
  }
  for (const auto& g : j.at("generators")) {
    Generator gen;
    gen.substation = g.at("substation").get<int>();
    gen.p_max = g.at("p_max").get<double>();
    if (g.contains("q")) gen.q_scheduled = g["q"].get<double>();
    grid.generators.push_back(gen);
  }
  for (const auto& d : j.at("loads")) {
    Load load;
    load.substation = d.at("substation").get<int>();
    if (d.contains("p_nominal")) load.p_nominal = d["p_nominal"].get<double>();
    if (d.contains("q")) load.q_scheduled = d["q"].get<double>();
    load.d_scheduled = load.p_nominal;
    grid.loads.push_back(load);
  }
  grid.reset_topology();
  grid.validate();
  return grid;
}

Grid Grid::from_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("grid json: cannot open " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return from_json_text(buf.str());
}

NodeMap build_electrical_nodes(const Grid& grid) {
  NodeMap map;
  map.node_of_slot.assign(2 * grid.substations.size(), -1);
  std::vector<bool> occupied(map.node_of_slot.size(), false);

  auto mark = [&](int substation, int bus) {
    if (bus != kDisconnected) occupied[2 * substation + (bus - 1)] = true;
  };
  for (std::size_t l = 0; l < grid.lines.size(); ++l) {
    mark(grid.lines[l].from_substation, grid.topo_vect[grid.line_origin_pos(l)]);
    mark(grid.lines[l].to_substation, grid.topo_vect[grid.line_ext_pos(l)]);
  }
  for (std::size_t g = 0; g < grid.generators.size(); ++g)
    mark(grid.generators[g].substation, grid.topo_vect[grid.generator_pos(g)]);
  for (std::size_t d = 0; d < grid.loads.size(); ++d)
    mark(grid.loads[d].substation, grid.topo_vect[grid.load_pos(d)]);

  for (std::size_t slot = 0; slot < occupied.size(); ++slot)
    if (occupied[slot]) map.node_of_slot[slot] = map.node_count++;
  return map;
}

namespace {

// Path-compressing union-find over electrical nodes.
struct UnionFind {
  std::vector<int> parent;

  explicit UnionFind(int n) : parent(n) {
    std::iota(parent.begin(), parent.end(), 0);
  }
  int find(int x) {
    while (parent[x] != x) {
      parent[x] = parent[parent[x]];
      x = parent[x];
    }
    return x;
  }
  void unite(int a, int b) {
    a = find(a);
    b = find(b);
    if (a == b) return;
    if (a > b) std::swap(a, b);  // keep the smaller index as root
    parent[b] = a;
  }
};

}  // namespace

IslandPartition find_islands(const NodeMap& nodes, const Grid& grid) {
  UnionFind uf(nodes.node_count);
  for (std::size_t l = 0; l < grid.lines.size(); ++l) {
    const auto& line = grid.lines[l];
    if (!line.status) continue;
    const int a = nodes.node_of_object(grid, grid.line_origin_pos(l), line.from_substation);
    const int b = nodes.node_of_object(grid, grid.line_ext_pos(l), line.to_substation);
    if (a >= 0 && b >= 0) uf.unite(a, b);
  }

  IslandPartition part;
  part.island_of_node.assign(nodes.node_count, -1);
  std::vector<int> island_of_root(nodes.node_count, -1);
  // Roots are the smallest member of their component, so scanning nodes in
  // order yields islands ordered by smallest member index.
  for (int v = 0; v < nodes.node_count; ++v) {
    const int root = uf.find(v);
    if (island_of_root[root] < 0) {
      island_of_root[root] = static_cast<int>(part.islands.size());
      part.islands.emplace_back();
    }
    const int island = island_of_root[root];
    part.island_of_node[v] = island;
    part.islands[island].push_back(v);
  }
  return part;
}

}  // namespace gridres
