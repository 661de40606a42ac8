#include "gridres/run_io.hpp"

#include <chrono>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace gridres {

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_curves_csv(const std::string& path,
                      const std::vector<EpisodeCurve>& curves) {
  std::ofstream out(path);
  if (!out) throw ConfigError("curves: cannot write " + path);
  out << kCurvesHeader << "\n";
  for (const auto& c : curves) {
    out << c.episode << ',' << c.env_steps << ',' << format_double(c.steps_survived)
        << ',' << format_double(c.total_reward) << ',' << format_double(c.mean_unsupplied)
        << ',' << format_double(c.mean_islands) << ',' << format_double(c.mean_cost)
        << ',' << format_double(c.mean_broken) << "\n";
  }
}

std::vector<EpisodeCurve> read_curves_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("curves: cannot open " + path);
  std::string line;
  if (!std::getline(in, line)) throw ConfigError("curves: empty file " + path);
  if (line != kCurvesHeader)
    throw ConfigError("curves: unexpected header in " + path);
  std::vector<EpisodeCurve> curves;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string cell;
    std::vector<std::string> cells;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (cells.size() != 8) throw ConfigError("curves: malformed row in " + path);
    EpisodeCurve c;
    c.episode = std::stoi(cells[0]);
    c.env_steps = std::stoll(cells[1]);
    c.steps_survived = std::stod(cells[2]);
    c.total_reward = std::stod(cells[3]);
    c.mean_unsupplied = std::stod(cells[4]);
    c.mean_islands = std::stod(cells[5]);
    c.mean_cost = std::stod(cells[6]);
    c.mean_broken = std::stod(cells[7]);
    curves.push_back(c);
  }
  return curves;
}

void write_eval_csv(const std::string& path, const EvalAggregate& agg) {
  std::ofstream out(path);
  if (!out) throw ConfigError("eval: cannot write " + path);
  out << "metric,mean,std\n";
  auto row = [&](const char* name, double mean, double sd) {
    out << name << ',' << format_double(mean) << ',' << format_double(sd) << "\n";
  };
  row("steps_survived", agg.steps_mean, agg.steps_std);
  row("cost", agg.cost_mean, agg.cost_std);
  row("islands", agg.islands_mean, agg.islands_std);
  row("unsupplied_load", agg.unsupplied_mean, agg.unsupplied_std);
  row("broken_powerlines", agg.broken_mean, agg.broken_std);
  row("total_reward", agg.reward_mean, agg.reward_std);
}

void write_eval_episodes_csv(const std::string& path, const EvalAggregate& agg) {
  std::ofstream out(path);
  if (!out) throw ConfigError("eval: cannot write " + path);
  out << "episode,steps_survived,total_reward,cost_per_step,islands,"
         "unsupplied_load,broken_lines\n";
  for (std::size_t i = 0; i < agg.per_episode.size(); ++i) {
    const auto& s = agg.per_episode[i];
    out << i << ',' << format_double(s.steps_survived) << ','
        << format_double(s.total_reward) << ',' << format_double(s.mean_cost) << ','
        << format_double(s.mean_islands) << ',' << format_double(s.mean_unsupplied)
        << ',' << format_double(s.mean_broken) << "\n";
  }
}

std::string now_iso8601() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t tt = std::chrono::system_clock::to_time_t(now);
  std::tm tm{};
  gmtime_r(&tt, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

void write_manifest(const std::string& path, const RunManifest& manifest) {
  nlohmann::json j;
  j["tool"] = kToolVersion;
  j["command"] = manifest.command;
  j["config"] = nlohmann::json::parse(manifest.config_json);
  j["seeds"] = manifest.seeds;
  j["artifacts"] = manifest.artifacts;
  j["started_at"] = manifest.started_at;
  j["finished_at"] = manifest.finished_at;
  std::ofstream out(path);
  if (!out) throw ConfigError("manifest: cannot write " + path);
  out << j.dump(2) << "\n";
}

void ensure_directory(const std::string& path) {
  std::error_code ec;
  std::filesystem::create_directories(path, ec);
  if (ec) throw ConfigError("cannot create directory " + path + ": " + ec.message());
}

}  // namespace gridres
