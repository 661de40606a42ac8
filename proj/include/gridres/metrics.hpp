#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "gridres/errors.hpp"

namespace gridres {

/// One step of an episode: everything the resilience metrics consume.
struct StepRecord {
  std::vector<double> d_scheduled;  // per load, MW
  std::vector<double> d_actual;
  std::vector<double> p_scheduled;  // per generator, MW
  std::vector<double> p_actual;
  std::vector<std::uint8_t> line_status;  // c_i, 1 connected
  int islands = 1;
  double reward = 0.0;
};

struct EpisodeLog {
  int horizon = 0;                    // H
  std::vector<int> load_substation;   // maps loads onto recovery subgraphs
  std::vector<StepRecord> steps;      // one record per survived step

  std::size_t steps_survived() const { return steps.size(); }
};

/// LS of one step (fraction of scheduled demand actually served).
double load_satisfaction(const StepRecord& record);

/// LC of one step (fraction of lines in service).
double line_connectivity(const StepRecord& record);

/// OC of one step: c_re * sum_k |p_sc,k - p_ac,k|.
double operational_cost(const StepRecord& record, double c_re);

/// Disjoint cover of the substations; recovery time is measured per subset.
struct RecoveryPartition {
  std::vector<std::vector<int>> groups;  // substation ids

  void validate(std::size_t n_substations) const;
};

RecoveryPartition per_substation_partition(std::size_t n_substations);

/// Sum over subgraphs of the (H-capped) first step from which every load in
/// the subgraph receives its full scheduled demand for the rest of the
/// episode. Steps are counted 1-based; a subgraph that never recovers
/// contributes H.
double recovery_duration(const EpisodeLog& log, const RecoveryPartition& partition,
                         std::size_t n_substations);

struct SummaryRecord {
  double steps_survived = 0.0;
  double total_reward = 0.0;
  double mean_cost = 0.0;         // OC per step
  double mean_islands = 0.0;
  double mean_unsupplied = 0.0;   // 1 - LS, averaged over steps
  double mean_broken = 0.0;       // |E| - sum c_i, averaged over steps
};

SummaryRecord episode_summary(const EpisodeLog& log, double c_re = 1.0);

/// Line-delimited JSON, one record per step.
void save_episode_log(const EpisodeLog& log, const std::string& path);
EpisodeLog load_episode_log(const std::string& path);

}  // namespace gridres
