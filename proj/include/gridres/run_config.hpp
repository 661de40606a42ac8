#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "gridres/chronics.hpp"
#include "gridres/environment.hpp"
#include "gridres/trainer.hpp"

namespace gridres {

/// Resolved contents of a training/evaluation config file.
struct RunConfig {
  std::string grid_path;
  std::optional<std::string> chronics_csv;  // absent: synthetic
  SyntheticChronicsParams synthetic;
  std::vector<int> contingency;
  EnvConfig env;
  TrainerConfig trainer;
  std::uint64_t seed = 1;

  /// JSON round-trip of the resolved config (for the run manifest).
  std::string to_json_text() const;

  static RunConfig from_json_file(const std::string& path);
  static RunConfig from_json_text(const std::string& text,
                                  const std::string& base_dir);

  /// Loads the grid and builds a factory producing identically configured
  /// environments.
  EnvFactory make_env_factory() const;
  Grid load_grid() const;
};

}  // namespace gridres
