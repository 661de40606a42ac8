#include "gridres/run_config.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace gridres {

namespace {

using nlohmann::json;

std::string resolve(const std::string& base_dir, const std::string& path) {
  std::filesystem::path p(path);
  if (p.is_absolute() || base_dir.empty()) return path;
  return (std::filesystem::path(base_dir) / p).string();
}

RegularizerSpec parse_regularizer(const json& j) {
  RegularizerSpec spec;
  if (j.contains("kind")) spec.kind = reg_kind_from_name(j["kind"].get<std::string>());
  if (j.contains("gamma_en")) spec.gamma_en = j["gamma_en"].get<double>();
  if (j.contains("p")) spec.p = j["p"].get<double>();
  if (j.contains("r")) spec.r = j["r"].get<int>();
  if (j.contains("weights")) spec.weights = j["weights"].get<std::vector<double>>();
  if (j.contains("full_range")) spec.weighted_full_range = j["full_range"].get<bool>();
  return spec;
}

json regularizer_to_json(const RegularizerSpec& spec) {
  json j;
  j["kind"] = to_string(spec.kind);
  j["gamma_en"] = spec.gamma_en;
  j["p"] = spec.p;
  j["r"] = spec.r;
  if (!spec.weights.empty()) j["weights"] = spec.weights;
  j["full_range"] = spec.weighted_full_range;
  return j;
}

}  // namespace

RunConfig RunConfig::from_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config: cannot open " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return from_json_text(buf.str(),
                        std::filesystem::path(path).parent_path().string());
}

RunConfig RunConfig::from_json_text(const std::string& text,
                                    const std::string& base_dir) {
  json j;
  try {
    j = json::parse(text);
  } catch (const std::exception& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }

  RunConfig rc;
  if (!j.contains("grid")) throw ConfigError("config: missing \"grid\" path");
  rc.grid_path = resolve(base_dir, j["grid"].get<std::string>());

  if (j.contains("chronics")) {
    const auto& c = j["chronics"];
    const std::string kind = c.value("kind", "synthetic");
    if (kind == "csv") {
      rc.chronics_csv = resolve(base_dir, c.at("path").get<std::string>());
    } else if (kind == "synthetic") {
      if (c.contains("length")) rc.synthetic.length = c["length"].get<std::size_t>();
      if (c.contains("amplitude")) rc.synthetic.amplitude = c["amplitude"].get<double>();
      if (c.contains("noise")) rc.synthetic.noise = c["noise"].get<double>();
      if (c.contains("period")) rc.synthetic.period = c["period"].get<double>();
      if (c.contains("load_level")) rc.synthetic.load_level = c["load_level"].get<double>();
    } else {
      throw ConfigError("config: unknown chronics kind " + kind);
    }
  }

  if (j.contains("contingency")) {
    const auto& c = j["contingency"];
    if (c.is_array()) {
      rc.contingency = c.get<std::vector<int>>();
    } else if (c.is_string()) {
      const std::string path = resolve(base_dir, c.get<std::string>());
      std::ifstream in(path);
      if (!in) throw ConfigError("config: cannot open contingency file " + path);
      json ids;
      try {
        in >> ids;
      } catch (const std::exception& e) {
        throw ConfigError(std::string("config: contingency file: ") + e.what());
      }
      rc.contingency = ids.get<std::vector<int>>();
    } else {
      throw ConfigError("config: contingency must be a list or a file path");
    }
  }

  if (j.contains("action_space"))
    rc.env.action_space = action_space_from_name(j["action_space"].get<std::string>());
  if (j.contains("observation_space"))
    rc.env.observation_space =
        observation_space_from_name(j["observation_space"].get<std::string>());
  if (j.contains("horizon")) rc.env.horizon = j["horizon"].get<int>();
  if (j.contains("max_overflow_steps"))
    rc.env.max_overflow_steps = j["max_overflow_steps"].get<int>();
  if (j.contains("cooldown_steps")) rc.env.cooldown_steps = j["cooldown_steps"].get<int>();
  if (j.contains("c_re")) rc.env.c_re = j["c_re"].get<double>();
  rc.env.contingency = rc.contingency;

  if (j.contains("trainer")) {
    const auto& t = j["trainer"];
    auto& tc = rc.trainer;
    if (t.contains("gamma")) tc.gamma = t["gamma"].get<double>();
    if (t.contains("lambda")) tc.lambda = t["lambda"].get<double>();
    if (t.contains("batch_size")) tc.batch_size = t["batch_size"].get<std::size_t>();
    if (t.contains("epsilon")) {
      const auto& e = t["epsilon"];
      if (e.contains("start")) tc.epsilon.start = e["start"].get<double>();
      if (e.contains("end")) tc.epsilon.end = e["end"].get<double>();
      if (e.contains("decay_steps")) tc.epsilon.decay_steps = e["decay_steps"].get<long long>();
    }
    if (t.contains("target_sync")) tc.target_sync = t["target_sync"].get<long long>();
    if (t.contains("buffer_capacity"))
      tc.buffer_capacity = t["buffer_capacity"].get<std::size_t>();
    if (t.contains("total_steps")) tc.total_steps = t["total_steps"].get<long long>();
    if (t.contains("warmup_steps")) tc.warmup_steps = t["warmup_steps"].get<long long>();
    if (t.contains("double_dqn")) tc.double_dqn = t["double_dqn"].get<bool>();
    if (t.contains("dueling_mean_center"))
      tc.dueling_mean_center = t["dueling_mean_center"].get<bool>();
    if (t.contains("obs_scale")) tc.obs_scale = t["obs_scale"].get<double>();
    if (t.contains("regularizer")) tc.regularizer = parse_regularizer(t["regularizer"]);
    if (t.contains("learning_rate")) tc.adam.base_lr = t["learning_rate"].get<double>();
    if (t.contains("lr_decay_rate")) tc.adam.decay_rate = t["lr_decay_rate"].get<double>();
    if (t.contains("lr_decay_every")) tc.adam.decay_every = t["lr_decay_every"].get<long long>();
  }

  if (j.contains("seed")) rc.seed = j["seed"].get<std::uint64_t>();
  return rc;
}

std::string RunConfig::to_json_text() const {
  json j;
  j["grid"] = grid_path;
  if (chronics_csv) {
    j["chronics"] = {{"kind", "csv"}, {"path", *chronics_csv}};
  } else {
    j["chronics"] = {{"kind", "synthetic"},
                     {"length", synthetic.length},
                     {"amplitude", synthetic.amplitude},
                     {"noise", synthetic.noise},
                     {"period", synthetic.period},
                     {"load_level", synthetic.load_level}};
  }
  j["contingency"] = contingency;
  j["action_space"] = to_string(env.action_space);
  j["observation_space"] = to_string(env.observation_space);
  j["horizon"] = env.horizon;
  j["max_overflow_steps"] = env.max_overflow_steps;
  j["cooldown_steps"] = env.cooldown_steps;
  j["c_re"] = env.c_re;
  j["trainer"] = {{"gamma", trainer.gamma},
                  {"lambda", trainer.lambda},
                  {"batch_size", trainer.batch_size},
                  {"epsilon",
                   {{"start", trainer.epsilon.start},
                    {"end", trainer.epsilon.end},
                    {"decay_steps", trainer.epsilon.decay_steps}}},
                  {"target_sync", trainer.target_sync},
                  {"buffer_capacity", trainer.buffer_capacity},
                  {"total_steps", trainer.total_steps},
                  {"warmup_steps", trainer.warmup_steps},
                  {"double_dqn", trainer.double_dqn},
                  {"dueling_mean_center", trainer.dueling_mean_center},
                  {"obs_scale", trainer.obs_scale},
                  {"regularizer", regularizer_to_json(trainer.regularizer)},
                  {"learning_rate", trainer.adam.base_lr},
                  {"lr_decay_rate", trainer.adam.decay_rate},
                  {"lr_decay_every", trainer.adam.decay_every}};
  j["seed"] = seed;
  return j.dump(2);
}

Grid RunConfig::load_grid() const { return Grid::from_json_file(grid_path); }

EnvFactory RunConfig::make_env_factory() const {
  const RunConfig copy = *this;
  const Grid grid = load_grid();
  return [copy, grid]() {
    auto env = std::make_unique<Environment>(grid, copy.env);
    if (copy.chronics_csv)
      env->set_chronics(Chronics::from_csv_file(*copy.chronics_csv, grid));
    else
      env->set_synthetic_chronics(copy.synthetic);
    return env;
  };
}

}  // namespace gridres
