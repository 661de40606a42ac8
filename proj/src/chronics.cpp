#include "gridres/chronics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "gridres/rng.hpp"

namespace gridres {

void Chronics::validate(const Grid& grid) const {
  if (gen_p.size() != load_p.size())
    throw ConfigError("chronics: load and generator row counts differ");
  for (std::size_t t = 0; t < load_p.size(); ++t) {
    if (load_p[t].size() != grid.loads.size() ||
        gen_p[t].size() != grid.generators.size())
      throw ConfigError("chronics: row " + std::to_string(t) +
                        " does not match grid load/generator counts");
    for (double v : load_p[t])
      if (v < 0.0) throw ConfigError("chronics: negative load demand");
    for (double v : gen_p[t])
      if (v < 0.0) throw ConfigError("chronics: negative generator schedule");
  }
}

Chronics Chronics::from_csv_file(const std::string& path, const Grid& grid) {
  std::ifstream in(path);
  if (!in) throw ConfigError("chronics: cannot open " + path);
  std::string line;
  if (!std::getline(in, line)) throw ConfigError("chronics: empty file " + path);

  const std::size_t n_loads = grid.loads.size();
  const std::size_t n_gens = grid.generators.size();
  Chronics ch;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string cell;
    std::vector<double> row;
    while (std::getline(ss, cell, ',')) row.push_back(std::stod(cell));
    if (row.size() != n_loads + n_gens)
      throw ConfigError("chronics: row width " + std::to_string(row.size()) +
                        " does not match grid (" +
                        std::to_string(n_loads + n_gens) + " columns expected)");
    ch.load_p.emplace_back(row.begin(), row.begin() + n_loads);
    ch.gen_p.emplace_back(row.begin() + n_loads, row.end());
  }
  ch.validate(grid);
  return ch;
}

void Chronics::to_csv_file(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw ConfigError("chronics: cannot write " + path);
  const std::size_t n_loads = load_p.empty() ? 0 : load_p[0].size();
  const std::size_t n_gens = gen_p.empty() ? 0 : gen_p[0].size();
  for (std::size_t j = 0; j < n_loads; ++j) out << (j ? "," : "") << "load_" << j;
  for (std::size_t k = 0; k < n_gens; ++k) out << ",gen_" << k;
  out << "\n";
  char buf[32];
  for (std::size_t t = 0; t < load_p.size(); ++t) {
    bool first = true;
    for (double v : load_p[t]) {
      std::snprintf(buf, sizeof buf, "%.17g", v);
      out << (first ? "" : ",") << buf;
      first = false;
    }
    for (double v : gen_p[t]) {
      std::snprintf(buf, sizeof buf, "%.17g", v);
      out << "," << buf;
    }
    out << "\n";
  }
}

Chronics generate_synthetic_chronics(const Grid& grid,
                                     const SyntheticChronicsParams& params,
                                     std::uint64_t seed) {
  Rng rng(seed);
  const std::size_t n_loads = grid.loads.size();
  const std::size_t n_gens = grid.generators.size();
  const double two_pi = 6.283185307179586477;

  Chronics ch;
  ch.load_p.resize(params.length);
  ch.gen_p.resize(params.length);
  for (std::size_t t = 0; t < params.length; ++t) {
    ch.load_p[t].resize(n_loads);
    double total = 0.0;
    for (std::size_t j = 0; j < n_loads; ++j) {
      const double phase = two_pi * static_cast<double>(j) /
                           static_cast<double>(std::max<std::size_t>(n_loads, 1));
      const double daily =
          1.0 + params.amplitude * std::sin(two_pi * static_cast<double>(t) / params.period + phase);
      const double jitter = 1.0 + params.noise * rng.gaussian();
      const double demand =
          std::max(0.0, grid.loads[j].p_nominal * params.load_level * daily * jitter);
      ch.load_p[t][j] = demand;
      total += demand;
    }
    // Schedules proportional to p_max, balanced to the step's total demand.
    double p_max_total = 0.0;
    for (const auto& gen : grid.generators) p_max_total += gen.p_max;
    ch.gen_p[t].resize(n_gens);
    for (std::size_t k = 0; k < n_gens; ++k) {
      const double share = p_max_total > 0.0 ? grid.generators[k].p_max / p_max_total : 0.0;
      ch.gen_p[t][k] = std::min(total * share, grid.generators[k].p_max);
    }
  }
  return ch;
}

}  // namespace gridres
