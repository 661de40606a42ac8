#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <vector>

#include "gridres/environment.hpp"
#include "gridres/lowrank.hpp"
#include "gridres/metrics.hpp"
#include "gridres/nn.hpp"
#include "gridres/rng.hpp"

namespace gridres {

/// Replay quadruple with stacked (4-frame) observations.
struct Transition {
  std::vector<double> state;
  int action = 0;
  double reward = 0.0;
  std::vector<double> next_state;
  bool done = false;
};

/// FIFO ring buffer with uniform sampling.
class ReplayBuffer {
 public:
  explicit ReplayBuffer(std::size_t capacity) : capacity_(capacity) {}

  std::size_t size() const { return data_.size(); }
  std::size_t capacity() const { return capacity_; }

  void push(Transition t);
  const Transition& at(std::size_t i) const { return data_[i]; }

  std::vector<const Transition*> sample(std::size_t count, Rng& rng) const;

 private:
  std::size_t capacity_;
  std::size_t next_ = 0;
  std::vector<Transition> data_;
};

/// Keeps the 4 most recent observations; the first 3 frames are padded by
/// repeating the initial observation.
class FrameStack {
 public:
  explicit FrameStack(std::size_t obs_size) : obs_size_(obs_size) {}

  void reset(const std::vector<double>& first);
  void push(const std::vector<double>& obs);
  /// Concatenation oldest-to-newest, width 4 * obs_size.
  const std::vector<double>& stacked() const { return stacked_; }

 private:
  std::size_t obs_size_;
  std::vector<double> stacked_;
};

struct EpsilonSchedule {
  double start = 1.0;
  double end = 0.05;
  long long decay_steps = 1;

  double at(long long step) const {
    if (step >= decay_steps) return end;
    const double f = static_cast<double>(step) / static_cast<double>(decay_steps);
    return start + (end - start) * f;
  }
};

struct TrainerConfig {
  double gamma = 0.99;
  double lambda = 0.0;           // LRR weight
  std::size_t batch_size = 32;
  EpsilonSchedule epsilon;       // defaulted to 20% of total_steps when 0
  long long target_sync = 1000;  // environment steps between target copies
  std::size_t buffer_capacity = 100000;
  long long total_steps = 20000;
  long long warmup_steps = 1000;
  bool double_dqn = true;
  bool dueling_mean_center = false;
  RegularizerSpec regularizer;
  double obs_scale = 0.01;  // agent-side input scaling (raw values are MW)
  AdamConfig adam;

  void validate() const;
};

/// Epsilon-greedy over Q(s, .); argmax ties break toward the lowest index.
int select_action(QNetwork& net, const std::vector<double>& stacked_obs,
                  double epsilon, Rng& rng);

/// TD targets: r + gamma * max_a' Q_target(s', a'), the double variant
/// evaluating the online argmax under the target network; terminal
/// transitions keep y = r.
std::vector<double> td_targets(const std::vector<const Transition*>& batch,
                               QNetwork& online, QNetwork& target, double gamma,
                               bool double_dqn);

struct LossResult {
  double loss = 0.0;       // td_loss + lambda * reg
  double td_loss = 0.0;
  double reg = 0.0;
  Matrix q_batch;          // the Q-matrix the regularizer saw
  bool degenerate_spectrum = false;
};

/// Squared TD error summed over the batch plus lambda * R(Q_B); leaves the
/// full parameter gradient in `online`. Targets are treated as constants.
LossResult loss_with_lrr(const std::vector<const Transition*>& batch,
                         const std::vector<double>& targets, QNetwork& online,
                         double lambda, const RegularizerSpec& spec);

struct EpisodeCurve {
  int episode = 0;
  long long env_steps = 0;  // cumulative steps when the episode ended
  double steps_survived = 0.0;
  double total_reward = 0.0;
  double mean_unsupplied = 0.0;
  double mean_islands = 0.0;
  double mean_cost = 0.0;
  double mean_broken = 0.0;
};

struct TrainResult {
  Checkpoint checkpoint;
  std::vector<EpisodeCurve> curves;
};

using EnvFactory = std::function<std::unique_ptr<Environment>()>;

/// Standard replay DQN loop, fully deterministic given the seed: epsilon
/// annealed per schedule, one gradient step per environment step after
/// warm-up, target copied every target_sync steps.
TrainResult train(const EnvFactory& make_env, const TrainerConfig& config,
                  std::uint64_t seed);

struct EvalAggregate {
  int episodes = 0;
  double reward_mean = 0.0, reward_std = 0.0;
  double steps_mean = 0.0, steps_std = 0.0;
  double cost_mean = 0.0, cost_std = 0.0;
  double islands_mean = 0.0, islands_std = 0.0;
  double unsupplied_mean = 0.0, unsupplied_std = 0.0;
  double broken_mean = 0.0, broken_std = 0.0;
  std::vector<SummaryRecord> per_episode;
};

/// Greedy (epsilon = 0) evaluation of a checkpointed policy.
EvalAggregate evaluate(const Checkpoint& ckpt, const EnvFactory& make_env,
                       int episodes, std::uint64_t seed);

/// Runs a fixed policy (e.g. do-nothing) through the same protocol.
using Policy = std::function<std::size_t(const ObservationVector&)>;
EvalAggregate evaluate_policy(const Policy& policy, const EnvFactory& make_env,
                              int episodes, std::uint64_t seed, double c_re);

}  // namespace gridres
