#pragma once

#include <string>
#include <vector>

#include "gridres/trainer.hpp"

namespace gridres {

inline constexpr const char* kToolVersion = "gridres 0.1.0";

/// Training curves CSV: one row per episode, stable schema.
inline constexpr const char* kCurvesHeader =
    "episode,env_steps,steps_survived,total_reward,unsupplied_load,islands,"
    "cost_per_step,broken_lines";

void write_curves_csv(const std::string& path, const std::vector<EpisodeCurve>& curves);
std::vector<EpisodeCurve> read_curves_csv(const std::string& path);

/// Evaluation summary CSV (mean and standard deviation per metric) plus the
/// per-episode detail file.
void write_eval_csv(const std::string& path, const EvalAggregate& agg);
void write_eval_episodes_csv(const std::string& path, const EvalAggregate& agg);

/// Run manifest: resolved config, seeds, artifact paths, tool version and
/// wall-clock timestamps; enough to re-execute the run.
struct RunManifest {
  std::string command;
  std::string config_json;  // resolved RunConfig
  std::vector<std::uint64_t> seeds;
  std::vector<std::string> artifacts;
  std::string started_at;
  std::string finished_at;
};

void write_manifest(const std::string& path, const RunManifest& manifest);

std::string now_iso8601();
std::string format_double(double v);

/// Creates the directory (and parents) if needed; throws ConfigError on
/// failure.
void ensure_directory(const std::string& path);

}  // namespace gridres
