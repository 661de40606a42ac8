#include "gridres/metrics.hpp"

#include <cmath>
#include <fstream>

#include <json.hpp>

namespace gridres {

double load_satisfaction(const StepRecord& record) {
  double scheduled = 0.0, actual = 0.0;
  for (double v : record.d_scheduled) scheduled += v;
  for (double v : record.d_actual) actual += v;
  if (scheduled <= 0.0)
    throw ZeroScheduledDemand("load_satisfaction: no scheduled demand");
  return actual / scheduled;
}

double line_connectivity(const StepRecord& record) {
  if (record.line_status.empty())
    throw Error("line_connectivity: grid without lines");
  double connected = 0.0;
  for (auto c : record.line_status) connected += c ? 1.0 : 0.0;
  return connected / static_cast<double>(record.line_status.size());
}

double operational_cost(const StepRecord& record, double c_re) {
  if (c_re < 0.0) throw Error("operational_cost: c_re must be >= 0");
  double total = 0.0;
  for (std::size_t k = 0; k < record.p_scheduled.size(); ++k)
    total += std::fabs(record.p_scheduled[k] - record.p_actual[k]);
  return c_re * total;
}

void RecoveryPartition::validate(std::size_t n_substations) const {
  std::vector<int> seen(n_substations, 0);
  for (const auto& group : groups)
    for (int sub : group) {
      if (sub < 0 || static_cast<std::size_t>(sub) >= n_substations)
        throw InvalidPartition("recovery partition: substation out of range");
      if (seen[sub]++)
        throw InvalidPartition("recovery partition: substation appears twice");
    }
  for (int s : seen)
    if (!s) throw InvalidPartition("recovery partition: substation not covered");
}

RecoveryPartition per_substation_partition(std::size_t n_substations) {
  RecoveryPartition p;
  p.groups.resize(n_substations);
  for (std::size_t s = 0; s < n_substations; ++s)
    p.groups[s] = {static_cast<int>(s)};
  return p;
}

double recovery_duration(const EpisodeLog& log, const RecoveryPartition& partition,
                         std::size_t n_substations) {
  partition.validate(n_substations);
  const std::size_t n_steps = log.steps.size();

  double total = 0.0;
  for (const auto& group : partition.groups) {
    std::vector<std::size_t> group_loads;
    for (std::size_t j = 0; j < log.load_substation.size(); ++j)
      for (int sub : group)
        if (log.load_substation[j] == sub) group_loads.push_back(j);

    // tau = first 1-based step from which the whole group stays fully served.
    // Scanning backwards finds the earliest suffix of fully-served steps.
    std::size_t first_good_suffix = n_steps;  // index into steps, n_steps = never
    for (std::size_t t = n_steps; t-- > 0;) {
      const auto& rec = log.steps[t];
      bool fully_served = true;
      for (std::size_t j : group_loads) {
        const double want = rec.d_scheduled[j];
        if (rec.d_actual[j] < want - 1e-9 * (1.0 + want)) {
          fully_served = false;
          break;
        }
      }
      if (!fully_served) break;
      first_good_suffix = t;
    }
    const double tau = first_good_suffix == n_steps
                           ? static_cast<double>(log.horizon)  // never recovers
                           : static_cast<double>(first_good_suffix + 1);
    total += std::min(tau, static_cast<double>(log.horizon));
  }
  return total;
}

SummaryRecord episode_summary(const EpisodeLog& log, double c_re) {
  if (log.steps.empty()) throw Error("episode_summary: empty log");
  SummaryRecord s;
  s.steps_survived = static_cast<double>(log.steps.size());
  const double n = s.steps_survived;
  for (const auto& rec : log.steps) {
    s.total_reward += rec.reward;
    s.mean_cost += operational_cost(rec, c_re);
    s.mean_islands += static_cast<double>(rec.islands);
    double scheduled = 0.0;
    for (double v : rec.d_scheduled) scheduled += v;
    s.mean_unsupplied += scheduled > 0.0 ? 1.0 - load_satisfaction(rec) : 0.0;
    double broken = static_cast<double>(rec.line_status.size());
    for (auto c : rec.line_status) broken -= c ? 1.0 : 0.0;
    s.mean_broken += broken;
  }
  s.mean_cost /= n;
  s.mean_islands /= n;
  s.mean_unsupplied /= n;
  s.mean_broken /= n;
  return s;
}

void save_episode_log(const EpisodeLog& log, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ConfigError("episode log: cannot write " + path);
  nlohmann::json header = {{"horizon", log.horizon},
                           {"load_substation", log.load_substation}};
  out << header.dump() << "\n";
  for (const auto& rec : log.steps) {
    nlohmann::json j = {{"d_scheduled", rec.d_scheduled},
                        {"d_actual", rec.d_actual},
                        {"p_scheduled", rec.p_scheduled},
                        {"p_actual", rec.p_actual},
                        {"line_status", rec.line_status},
                        {"islands", rec.islands},
                        {"reward", rec.reward}};
    out << j.dump() << "\n";
  }
}

EpisodeLog load_episode_log(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("episode log: cannot open " + path);
  EpisodeLog log;
  std::string line;
  if (!std::getline(in, line)) throw ConfigError("episode log: empty " + path);
  auto header = nlohmann::json::parse(line);
  log.horizon = header.at("horizon").get<int>();
  log.load_substation = header.at("load_substation").get<std::vector<int>>();
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    auto j = nlohmann::json::parse(line);
    StepRecord rec;
    rec.d_scheduled = j.at("d_scheduled").get<std::vector<double>>();
    rec.d_actual = j.at("d_actual").get<std::vector<double>>();
    rec.p_scheduled = j.at("p_scheduled").get<std::vector<double>>();
    rec.p_actual = j.at("p_actual").get<std::vector<double>>();
    rec.line_status = j.at("line_status").get<std::vector<std::uint8_t>>();
    rec.islands = j.at("islands").get<int>();
    rec.reward = j.at("reward").get<double>();
    log.steps.push_back(std::move(rec));
  }
  return log;
}

}  // namespace gridres
