#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "gridres/grid.hpp"

namespace gridres {

/// Exogenous per-step schedule of load demand and generator setpoints (MW).
struct Chronics {
  std::vector<std::vector<double>> load_p;  // [step][load]
  std::vector<std::vector<double>> gen_p;   // [step][generator]

  std::size_t horizon() const { return load_p.size(); }

  void validate(const Grid& grid) const;

  /// CSV with header load_0..load_{n-1},gen_0..gen_{m-1}, one row per step.
  static Chronics from_csv_file(const std::string& path, const Grid& grid);
  void to_csv_file(const std::string& path) const;
};

/// Parameters of the synthetic chronics generator: a sinusoidal daily profile
/// around each load's nominal demand with seeded multiplicative noise.
/// Generator schedules are shared proportionally to p_max and balanced to the
/// total scheduled demand of each step.
struct SyntheticChronicsParams {
  std::size_t length = 100;
  double amplitude = 0.15;     // relative swing of the daily sine
  double noise = 0.02;         // sigma of multiplicative gaussian noise
  double period = 288.0;       // steps per day (5-minute steps)
  double load_level = 1.0;     // global multiplier on nominal demand
};

Chronics generate_synthetic_chronics(const Grid& grid,
                                     const SyntheticChronicsParams& params,
                                     std::uint64_t seed);

}  // namespace gridres
