#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace gridres {

/// Exit codes shared by all subcommands: 0 success, 1 usage/config error,
/// 2 runtime failure.
inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitRuntime = 2;

struct CommonOverrides {
  std::optional<std::uint64_t> seed;
  std::optional<long long> steps;
};

int cmd_train(const std::string& config_path, const std::string& out_dir,
              const CommonOverrides& overrides);

int cmd_eval(const std::string& checkpoint_path, const std::string& config_path,
             int episodes, const std::string& out_dir,
             const CommonOverrides& overrides);

int cmd_baseline(const std::string& config_path, int episodes,
                 const std::string& out_dir, const CommonOverrides& overrides);

int cmd_sweep_lambda(const std::string& config_path,
                     const std::vector<double>& lambdas, int seeds_per_lambda,
                     int eval_episodes, const std::string& out_dir,
                     const CommonOverrides& overrides);

int cmd_sweep_spaces(const std::string& config_path, int seeds_per_cell,
                     int eval_episodes, const std::string& out_dir,
                     const CommonOverrides& overrides);

int cmd_plot(const std::string& curves_csv, const std::string& out_dir);

/// GRIDRES_THREADS (>= 1) caps sweep parallelism; defaults to the hardware
/// concurrency.
unsigned sweep_parallelism();

}  // namespace gridres
