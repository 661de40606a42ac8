// gridres: resilient power-grid RL experiments.
//
// Subcommands: train, eval, baseline, sweep-lambda, sweep-spaces, plot.
// Every run writes a manifest next to its artifacts; identical seed and
// config reproduce outputs byte-for-byte in single-worker mode.

#include <CLI11.hpp>

#include "gridres/cli_commands.hpp"
#include "gridres/run_io.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Resilient power-grid simulation and low-rank-regularized "
               "deep Q-learning"};
  app.set_version_flag("--version", gridres::kToolVersion);
  app.require_subcommand(1);

  std::string config_path, out_dir = "runs/out", checkpoint_path, curves_path;
  std::uint64_t seed = 0;
  bool seed_set = false;
  long long steps = 0;
  bool steps_set = false;
  int episodes = 20;
  int sweep_seeds = 5;
  std::vector<double> lambdas;

  auto add_common = [&](CLI::App* cmd, bool with_steps = true) {
    cmd->add_option("--out", out_dir, "Output directory");
    cmd->add_option("--seed", seed, "Run seed (overrides config)")
        ->each([&](const std::string&) { seed_set = true; });
    if (with_steps)
      cmd->add_option("--steps", steps, "Training steps (overrides config)")
          ->each([&](const std::string&) { steps_set = true; });
  };
  auto overrides = [&]() {
    gridres::CommonOverrides o;
    if (seed_set) o.seed = seed;
    if (steps_set) o.steps = steps;
    return o;
  };

  auto* train = app.add_subcommand("train", "Train one agent");
  train->add_option("--config", config_path, "Run config JSON")->required();
  add_common(train);

  auto* eval = app.add_subcommand("eval", "Evaluate a checkpoint");
  eval->add_option("--checkpoint", checkpoint_path, "Checkpoint file")->required();
  eval->add_option("--config", config_path, "Run config JSON")->required();
  eval->add_option("--episodes", episodes, "Evaluation episodes");
  add_common(eval, false);

  auto* baseline = app.add_subcommand("baseline", "Evaluate the do-nothing policy");
  baseline->add_option("--config", config_path, "Run config JSON")->required();
  baseline->add_option("--episodes", episodes, "Evaluation episodes");
  add_common(baseline, false);

  auto* sweep_lambda = app.add_subcommand(
      "sweep-lambda", "Train and evaluate across regularization weights");
  sweep_lambda->add_option("--config", config_path, "Run config JSON")->required();
  sweep_lambda->add_option("--lambdas", lambdas, "Lambda values")
      ->required()
      ->delimiter(',');
  sweep_lambda->add_option("--seeds", sweep_seeds, "Seeds per lambda");
  sweep_lambda->add_option("--episodes", episodes, "Evaluation episodes");
  add_common(sweep_lambda);

  auto* sweep_spaces = app.add_subcommand(
      "sweep-spaces", "Train across observation/action space combinations");
  sweep_spaces->add_option("--config", config_path, "Run config JSON")->required();
  sweep_spaces->add_option("--seeds", sweep_seeds, "Seeds per combination");
  sweep_spaces->add_option("--episodes", episodes, "Evaluation episodes");
  add_common(sweep_spaces);

  auto* plot = app.add_subcommand("plot", "Render metric panels from a curves CSV");
  plot->add_option("--curves", curves_path, "curves.csv from a training run")
      ->required();
  plot->add_option("--out", out_dir, "Output directory");

  CLI11_PARSE(app, argc, argv);

  if (train->parsed()) return gridres::cmd_train(config_path, out_dir, overrides());
  if (eval->parsed())
    return gridres::cmd_eval(checkpoint_path, config_path, episodes, out_dir,
                             overrides());
  if (baseline->parsed())
    return gridres::cmd_baseline(config_path, episodes, out_dir, overrides());
  if (sweep_lambda->parsed())
    return gridres::cmd_sweep_lambda(config_path, lambdas, sweep_seeds, episodes,
                                     out_dir, overrides());
  if (sweep_spaces->parsed())
    return gridres::cmd_sweep_spaces(config_path, sweep_seeds, episodes, out_dir,
                                     overrides());
  if (plot->parsed()) return gridres::cmd_plot(curves_path, out_dir);
  return gridres::kExitUsage;
}
