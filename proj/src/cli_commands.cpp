#include "gridres/cli_commands.hpp"

#include <atomic>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <thread>

#include "gridres/run_config.hpp"
#include "gridres/run_io.hpp"
#include "gridres/svg_plot.hpp"

namespace gridres {

namespace {

namespace fs = std::filesystem;

int guard(const char* what, const std::function<int()>& body) {
  try {
    return body();
  } catch (const ConfigError& e) {
    std::cerr << what << ": " << e.what() << "\n";
    return kExitUsage;
  } catch (const IncompatibleCheckpoint& e) {
    std::cerr << what << ": " << e.what() << "\n";
    return kExitRuntime;
  } catch (const std::exception& e) {
    std::cerr << what << ": " << e.what() << "\n";
    return kExitRuntime;
  }
}

RunConfig load_config(const std::string& path, const CommonOverrides& overrides) {
  RunConfig rc = RunConfig::from_json_file(path);
  if (overrides.seed) rc.seed = *overrides.seed;
  if (overrides.steps) rc.trainer.total_steps = *overrides.steps;
  return rc;
}

std::string lambda_tag(double lambda) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", lambda);
  return buf;
}

void print_eval(const EvalAggregate& agg) {
  auto row = [](const char* name, double mean, double sd) {
    std::printf("%-18s %14.4f %14.4f\n", name, mean, sd);
  };
  std::printf("%-18s %14s %14s\n", "metric", "mean", "std");
  row("steps_survived", agg.steps_mean, agg.steps_std);
  row("cost", agg.cost_mean, agg.cost_std);
  row("islands", agg.islands_mean, agg.islands_std);
  row("unsupplied_load", agg.unsupplied_mean, agg.unsupplied_std);
  row("broken_powerlines", agg.broken_mean, agg.broken_std);
  row("total_reward", agg.reward_mean, agg.reward_std);
}

/// Moving-average smoothing over up to 100 episodes, then the series maximum
/// (the "highest average smoothed over 100 episodes" statistic).
double best_smoothed(const std::vector<EpisodeCurve>& curves,
                     double EpisodeCurve::* field) {
  if (curves.empty()) return 0.0;
  const std::size_t window = std::min<std::size_t>(100, curves.size());
  double best = -1e300;
  double acc = 0.0;
  for (std::size_t i = 0; i < curves.size(); ++i) {
    acc += curves[i].*field;
    if (i >= window) acc -= curves[i - window].*field;
    if (i + 1 >= window) best = std::max(best, acc / static_cast<double>(window));
  }
  return best;
}

void run_jobs(std::size_t count, const std::function<void(std::size_t)>& job) {
  const unsigned workers =
      std::min<unsigned>(sweep_parallelism(), static_cast<unsigned>(count));
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) job(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> errors(workers);
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      try {
        for (;;) {
          const std::size_t i = next.fetch_add(1);
          if (i >= count) return;
          job(i);
        }
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

}  // namespace

unsigned sweep_parallelism() {
  if (const char* env = std::getenv("GRIDRES_THREADS")) {
    const long v = std::strtol(env, nullptr, 10);
    if (v >= 1) return static_cast<unsigned>(v);
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw ? hw : 1;
}

int cmd_train(const std::string& config_path, const std::string& out_dir,
              const CommonOverrides& overrides) {
  return guard("train", [&] {
    const std::string started = now_iso8601();
    const RunConfig rc = load_config(config_path, overrides);
    ensure_directory(out_dir);

    const TrainResult tr = train(rc.make_env_factory(), rc.trainer, rc.seed);

    const std::string curves_path = (fs::path(out_dir) / "curves.csv").string();
    const std::string ckpt_path = (fs::path(out_dir) / "checkpoint.bin").string();
    write_curves_csv(curves_path, tr.curves);
    tr.checkpoint.save(ckpt_path);

    RunManifest m;
    m.command = "train";
    m.config_json = rc.to_json_text();
    m.seeds = {rc.seed};
    m.artifacts = {curves_path, ckpt_path};
    m.started_at = started;
    m.finished_at = now_iso8601();
    write_manifest((fs::path(out_dir) / "manifest.json").string(), m);

    std::printf("train: %lld steps, %zu episodes, curves -> %s\n",
                rc.trainer.total_steps, tr.curves.size(), curves_path.c_str());
    return kExitOk;
  });
}

int cmd_eval(const std::string& checkpoint_path, const std::string& config_path,
             int episodes, const std::string& out_dir,
             const CommonOverrides& overrides) {
  return guard("eval", [&] {
    const std::string started = now_iso8601();
    if (episodes < 1) throw ConfigError("eval: episodes must be >= 1");
    const RunConfig rc = load_config(config_path, overrides);
    const Checkpoint ckpt = Checkpoint::load(checkpoint_path);
    const EvalAggregate agg =
        evaluate(ckpt, rc.make_env_factory(), episodes, rc.seed);

    print_eval(agg);
    ensure_directory(out_dir);
    const std::string summary_path = (fs::path(out_dir) / "eval_summary.csv").string();
    const std::string episodes_path = (fs::path(out_dir) / "eval_episodes.csv").string();
    write_eval_csv(summary_path, agg);
    write_eval_episodes_csv(episodes_path, agg);

    RunManifest m;
    m.command = "eval";
    m.config_json = rc.to_json_text();
    m.seeds = {rc.seed};
    m.artifacts = {checkpoint_path, summary_path, episodes_path};
    m.started_at = started;
    m.finished_at = now_iso8601();
    write_manifest((fs::path(out_dir) / "manifest.json").string(), m);
    return kExitOk;
  });
}

int cmd_baseline(const std::string& config_path, int episodes,
                 const std::string& out_dir, const CommonOverrides& overrides) {
  return guard("baseline", [&] {
    const std::string started = now_iso8601();
    if (episodes < 1) throw ConfigError("baseline: episodes must be >= 1");
    const RunConfig rc = load_config(config_path, overrides);
    const Policy do_nothing = [](const ObservationVector&) { return std::size_t{0}; };
    const EvalAggregate agg = evaluate_policy(do_nothing, rc.make_env_factory(),
                                              episodes, rc.seed, rc.env.c_re);
    print_eval(agg);
    ensure_directory(out_dir);
    const std::string summary_path =
        (fs::path(out_dir) / "baseline_summary.csv").string();
    const std::string episodes_path =
        (fs::path(out_dir) / "baseline_episodes.csv").string();
    write_eval_csv(summary_path, agg);
    write_eval_episodes_csv(episodes_path, agg);

    RunManifest m;
    m.command = "baseline";
    m.config_json = rc.to_json_text();
    m.seeds = {rc.seed};
    m.artifacts = {summary_path, episodes_path};
    m.started_at = started;
    m.finished_at = now_iso8601();
    write_manifest((fs::path(out_dir) / "manifest.json").string(), m);
    return kExitOk;
  });
}

int cmd_sweep_lambda(const std::string& config_path,
                     const std::vector<double>& lambdas, int seeds_per_lambda,
                     int eval_episodes, const std::string& out_dir,
                     const CommonOverrides& overrides) {
  return guard("sweep-lambda", [&] {
    const std::string started = now_iso8601();
    if (lambdas.empty()) throw ConfigError("sweep-lambda: no lambda values");
    for (double l : lambdas)
      if (l < 0.0) throw ConfigError("sweep-lambda: lambda must be >= 0");
    if (seeds_per_lambda < 1) throw ConfigError("sweep-lambda: seeds must be >= 1");
    const RunConfig base = load_config(config_path, overrides);
    ensure_directory(out_dir);

    struct Job {
      double lambda;
      std::uint64_t seed;
      std::string dir;
      EvalAggregate eval;
    };
    std::vector<Job> jobs;
    for (double lambda : lambdas)
      for (int s = 0; s < seeds_per_lambda; ++s) {
        Job j;
        j.lambda = lambda;
        j.seed = base.seed + static_cast<std::uint64_t>(s);
        j.dir = (fs::path(out_dir) / ("lambda_" + lambda_tag(lambda)) /
                 ("seed_" + std::to_string(j.seed)))
                    .string();
        jobs.push_back(std::move(j));
      }

    run_jobs(jobs.size(), [&](std::size_t i) {
      Job& job = jobs[i];
      RunConfig rc = base;
      rc.trainer.lambda = job.lambda;
      rc.seed = job.seed;
      ensure_directory(job.dir);
      const TrainResult tr = train(rc.make_env_factory(), rc.trainer, rc.seed);
      write_curves_csv((fs::path(job.dir) / "curves.csv").string(), tr.curves);
      tr.checkpoint.save((fs::path(job.dir) / "checkpoint.bin").string());
      job.eval = evaluate(tr.checkpoint, rc.make_env_factory(), eval_episodes,
                          rc.seed);
      write_eval_csv((fs::path(job.dir) / "eval_summary.csv").string(), job.eval);
    });

    // Per-seed detail rows.
    const std::string detail_path =
        (fs::path(out_dir) / "sweep_lambda_seeds.csv").string();
    {
      std::ofstream detail(detail_path);
      detail << "lambda,seed,reward_mean,steps_mean\n";
      for (const auto& job : jobs)
        detail << lambda_tag(job.lambda) << ',' << job.seed << ','
               << format_double(job.eval.reward_mean) << ','
               << format_double(job.eval.steps_mean) << "\n";
    }

    // Table-shaped summary: one row per lambda.
    const std::string summary_path = (fs::path(out_dir) / "sweep_lambda.csv").string();
    {
      std::ofstream summary(summary_path);
      summary << "lambda,reward_mean,reward_std,steps_mean,steps_std,seeds\n";
      for (double lambda : lambdas) {
        std::vector<double> rewards, steps;
        for (const auto& job : jobs)
          if (job.lambda == lambda) {
            rewards.push_back(job.eval.reward_mean);
            steps.push_back(job.eval.steps_mean);
          }
        const double n = static_cast<double>(rewards.size());
        double rm = 0.0, sm = 0.0;
        for (double v : rewards) rm += v;
        for (double v : steps) sm += v;
        rm /= n;
        sm /= n;
        double rv = 0.0, sv = 0.0;
        for (double v : rewards) rv += (v - rm) * (v - rm);
        for (double v : steps) sv += (v - sm) * (v - sm);
        summary << lambda_tag(lambda) << ',' << format_double(rm) << ','
                << format_double(std::sqrt(rv / n)) << ',' << format_double(sm)
                << ',' << format_double(std::sqrt(sv / n)) << ','
                << rewards.size() << "\n";
        std::printf("lambda %-10s reward %12.4f steps %8.2f (%zu seeds)\n",
                    lambda_tag(lambda).c_str(), rm, sm, rewards.size());
      }
    }

    RunManifest m;
    m.command = "sweep-lambda";
    m.config_json = base.to_json_text();
    for (const auto& job : jobs) m.seeds.push_back(job.seed);
    m.artifacts = {summary_path, detail_path};
    m.started_at = started;
    m.finished_at = now_iso8601();
    write_manifest((fs::path(out_dir) / "manifest.json").string(), m);
    return kExitOk;
  });
}

int cmd_sweep_spaces(const std::string& config_path, int seeds_per_cell,
                     int eval_episodes, const std::string& out_dir,
                     const CommonOverrides& overrides) {
  return guard("sweep-spaces", [&] {
    const std::string started = now_iso8601();
    if (seeds_per_cell < 1) throw ConfigError("sweep-spaces: seeds must be >= 1");
    const RunConfig base = load_config(config_path, overrides);
    ensure_directory(out_dir);

    const ObservationSpaceKind obs_kinds[] = {ObservationSpaceKind::Complete,
                                              ObservationSpaceKind::Essential};
    const ActionSpaceKind act_kinds[] = {ActionSpaceKind::PowerlineSet,
                                         ActionSpaceKind::Topology,
                                         ActionSpaceKind::TopologySet};

    struct Job {
      ObservationSpaceKind obs;
      ActionSpaceKind act;
      std::uint64_t seed;
      std::string dir;
      EvalAggregate eval;
      double best_steps = 0.0, best_reward = 0.0;
      std::size_t obs_size = 0, catalog = 0;
    };
    std::vector<Job> jobs;
    for (auto obs : obs_kinds)
      for (auto act : act_kinds)
        for (int s = 0; s < seeds_per_cell; ++s) {
          Job j;
          j.obs = obs;
          j.act = act;
          j.seed = base.seed + static_cast<std::uint64_t>(s);
          j.dir = (fs::path(out_dir) / (to_string(obs) + "_" + to_string(act)) /
                   ("seed_" + std::to_string(j.seed)))
                      .string();
          jobs.push_back(std::move(j));
        }

    run_jobs(jobs.size(), [&](std::size_t i) {
      Job& job = jobs[i];
      RunConfig rc = base;
      rc.env.observation_space = job.obs;
      rc.env.action_space = job.act;
      rc.seed = job.seed;
      ensure_directory(job.dir);
      const auto factory = rc.make_env_factory();
      {
        auto env = factory();
        job.obs_size = env->observation_width();
        job.catalog = env->catalog().size();
      }
      const TrainResult tr = train(factory, rc.trainer, rc.seed);
      write_curves_csv((fs::path(job.dir) / "curves.csv").string(), tr.curves);
      tr.checkpoint.save((fs::path(job.dir) / "checkpoint.bin").string());
      job.best_steps = best_smoothed(tr.curves, &EpisodeCurve::steps_survived);
      job.best_reward = best_smoothed(tr.curves, &EpisodeCurve::total_reward);
      job.eval = evaluate(tr.checkpoint, factory, eval_episodes, rc.seed);
    });

    // Do-nothing reference row under the same protocol.
    const Policy do_nothing = [](const ObservationVector&) { return std::size_t{0}; };
    const EvalAggregate baseline = evaluate_policy(
        do_nothing, base.make_env_factory(), eval_episodes, base.seed, base.env.c_re);

    const std::string summary_path = (fs::path(out_dir) / "sweep_spaces.csv").string();
    {
      std::ofstream summary(summary_path);
      summary << "algorithm,observation_space,action_space,observation_size,"
                 "actions,best_steps_smoothed,best_reward_smoothed,"
                 "eval_steps_mean,eval_reward_mean\n";
      for (auto obs : obs_kinds)
        for (auto act : act_kinds) {
          double bs = 0.0, br = 0.0, es = 0.0, er = 0.0;
          std::size_t osize = 0, cat = 0, n = 0;
          for (const auto& job : jobs)
            if (job.obs == obs && job.act == act) {
              bs += job.best_steps;
              br += job.best_reward;
              es += job.eval.steps_mean;
              er += job.eval.reward_mean;
              osize = job.obs_size;
              cat = job.catalog;
              ++n;
            }
          const double dn = static_cast<double>(n);
          summary << "ddqn," << to_string(obs) << ',' << to_string(act) << ','
                  << osize << ',' << cat << ',' << format_double(bs / dn) << ','
                  << format_double(br / dn) << ',' << format_double(es / dn)
                  << ',' << format_double(er / dn) << "\n";
          std::printf("%-9s %-13s steps %8.2f reward %10.4f\n",
                      to_string(obs).c_str(), to_string(act).c_str(), es / dn,
                      er / dn);
        }
      summary << "do_nothing,-,-,0,1," << format_double(baseline.steps_mean)
              << ',' << format_double(baseline.reward_mean) << ','
              << format_double(baseline.steps_mean) << ','
              << format_double(baseline.reward_mean) << "\n";
      std::printf("%-9s %-13s steps %8.2f reward %10.4f\n", "baseline",
                  "do_nothing", baseline.steps_mean, baseline.reward_mean);
    }

    RunManifest m;
    m.command = "sweep-spaces";
    m.config_json = base.to_json_text();
    for (const auto& job : jobs) m.seeds.push_back(job.seed);
    m.artifacts = {summary_path};
    m.started_at = started;
    m.finished_at = now_iso8601();
    write_manifest((fs::path(out_dir) / "manifest.json").string(), m);
    return kExitOk;
  });
}

int cmd_plot(const std::string& curves_csv, const std::string& out_dir) {
  return guard("plot", [&] {
    const std::vector<EpisodeCurve> curves = read_curves_csv(curves_csv);
    if (curves.empty()) throw ConfigError("plot: no data in " + curves_csv);
    ensure_directory(out_dir);

    std::vector<double> x;
    for (const auto& c : curves) x.push_back(static_cast<double>(c.episode));
    auto series = [&](double EpisodeCurve::* field) {
      std::vector<double> y;
      for (const auto& c : curves) y.push_back(c.*field);
      return y;
    };

    struct Panel {
      const char* file;
      const char* title;
      const char* ylabel;
      double EpisodeCurve::* field;
    };
    const Panel panels[] = {
        {"unsupplied_load.svg", "Average unsupplied load", "unsupplied load",
         &EpisodeCurve::mean_unsupplied},
        {"islands.svg", "Average number of islands", "islands",
         &EpisodeCurve::mean_islands},
        {"cost_per_step.svg", "Average cost per time step", "cost",
         &EpisodeCurve::mean_cost},
        {"broken_lines.svg", "Average disconnected powerlines", "lines",
         &EpisodeCurve::mean_broken},
        {"episode_reward.svg", "Episode reward", "reward",
         &EpisodeCurve::total_reward},
    };
    for (const auto& p : panels)
      write_svg_line_plot((fs::path(out_dir) / p.file).string(), p.title,
                          "episode", p.ylabel, x, series(p.field));
    std::printf("plot: wrote 5 panels to %s\n", out_dir.c_str());
    return kExitOk;
  });
}

}  // namespace gridres
