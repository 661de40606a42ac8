#include "gridres/trainer.hpp"

#include <algorithm>
#include <cmath>

namespace gridres {

void ReplayBuffer::push(Transition t) {
  if (data_.size() < capacity_) {
    data_.push_back(std::move(t));
  } else {
    data_[next_] = std::move(t);  // FIFO eviction
  }
  next_ = (next_ + 1) % capacity_;
}

std::vector<const Transition*> ReplayBuffer::sample(std::size_t count,
                                                    Rng& rng) const {
  if (data_.size() < count)
    throw Error("replay buffer: sampling before enough transitions stored");
  std::vector<const Transition*> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i)
    out.push_back(&data_[rng.bounded(data_.size())]);
  return out;
}

void FrameStack::reset(const std::vector<double>& first) {
  obs_size_ = first.size();
  stacked_.clear();
  for (int i = 0; i < 4; ++i)
    stacked_.insert(stacked_.end(), first.begin(), first.end());
}

void FrameStack::push(const std::vector<double>& obs) {
  if (obs.size() != obs_size_) throw ShapeMismatch("frame stack: width changed");
  std::copy(stacked_.begin() + obs_size_, stacked_.end(), stacked_.begin());
  std::copy(obs.begin(), obs.end(), stacked_.end() - obs_size_);
}

void TrainerConfig::validate() const {
  if (gamma < 0.0 || gamma > 1.0) throw ConfigError("trainer: gamma outside [0, 1]");
  if (lambda < 0.0) throw ConfigError("trainer: lambda must be >= 0");
  if (batch_size == 0) throw ConfigError("trainer: batch_size must be positive");
  if (buffer_capacity < batch_size)
    throw ConfigError("trainer: buffer smaller than one batch");
  if (total_steps < 0) throw ConfigError("trainer: negative step budget");
  if (obs_scale <= 0.0) throw ConfigError("trainer: obs_scale must be > 0");
}

int select_action(QNetwork& net, const std::vector<double>& stacked_obs,
                  double epsilon, Rng& rng) {
  if (epsilon > 0.0 && rng.uniform() < epsilon)
    return static_cast<int>(rng.bounded(net.n_actions()));
  Matrix x(1, stacked_obs.size());
  std::copy(stacked_obs.begin(), stacked_obs.end(), x.data());
  const Matrix q = net.forward(x);
  int best = 0;
  for (std::size_t a = 1; a < q.cols(); ++a)
    if (q(0, a) > q(0, best)) best = static_cast<int>(a);
  return best;
}

namespace {

Matrix stack_states(const std::vector<const Transition*>& batch, bool next) {
  const auto& first = next ? batch[0]->next_state : batch[0]->state;
  Matrix x(batch.size(), first.size());
  for (std::size_t i = 0; i < batch.size(); ++i) {
    const auto& s = next ? batch[i]->next_state : batch[i]->state;
    std::copy(s.begin(), s.end(), x.row(i));
  }
  return x;
}

}  // namespace

std::vector<double> td_targets(const std::vector<const Transition*>& batch,
                               QNetwork& online, QNetwork& target, double gamma,
                               bool double_dqn) {
  std::vector<double> y(batch.size());
  bool any_bootstrap = false;
  for (const auto* t : batch) any_bootstrap |= !t->done;

  Matrix q_target, q_online;
  if (any_bootstrap && gamma != 0.0) {
    const Matrix next = stack_states(batch, true);
    q_target = target.forward(next);
    if (double_dqn) q_online = online.forward(next);
  }

  for (std::size_t i = 0; i < batch.size(); ++i) {
    const auto& t = *batch[i];
    double bootstrap = 0.0;
    if (!t.done && gamma != 0.0) {
      if (double_dqn) {
        std::size_t arg = 0;
        for (std::size_t a = 1; a < q_online.cols(); ++a)
          if (q_online(i, a) > q_online(i, arg)) arg = a;
        bootstrap = q_target(i, arg);
      } else {
        bootstrap = q_target(i, 0);
        for (std::size_t a = 1; a < q_target.cols(); ++a)
          bootstrap = std::max(bootstrap, q_target(i, a));
      }
    }
    y[i] = t.reward + gamma * (t.done ? 0.0 : bootstrap);
  }
  return y;
}

LossResult loss_with_lrr(const std::vector<const Transition*>& batch,
                         const std::vector<double>& targets, QNetwork& online,
                         double lambda, const RegularizerSpec& spec) {
  if (batch.empty()) throw Error("loss: empty batch");
  if (targets.size() != batch.size()) throw ShapeMismatch("loss: target count");

  const Matrix states = stack_states(batch, false);
  LossResult res;
  res.q_batch = online.forward(states, /*record=*/true);

  Matrix dq(res.q_batch.rows(), res.q_batch.cols());
  for (std::size_t i = 0; i < batch.size(); ++i) {
    const int a = batch[i]->action;
    const double err = targets[i] - res.q_batch(i, static_cast<std::size_t>(a));
    res.td_loss += err * err;
    dq(i, static_cast<std::size_t>(a)) = -2.0 * err;
  }

  if (lambda > 0.0) {
    const SvdResult decomposition = svd(res.q_batch);
    res.reg = reg_value(spec, decomposition);
    const RegGradient rg = reg_grad(spec, decomposition);
    res.degenerate_spectrum = rg.degenerate;
    for (std::size_t i = 0; i < dq.size(); ++i)
      dq.data()[i] += lambda * rg.grad.data()[i];
  }

  res.loss = res.td_loss + lambda * res.reg;
  online.zero_grads();
  online.backward(dq);
  return res;
}

namespace {

std::vector<double> scaled(const std::vector<double>& v, double scale) {
  std::vector<double> out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) out[i] = v[i] * scale;
  return out;
}

EpisodeCurve curve_from_log(const EpisodeLog& log, int episode,
                            long long env_steps, double c_re) {
  const SummaryRecord s = episode_summary(log, c_re);
  EpisodeCurve c;
  c.episode = episode;
  c.env_steps = env_steps;
  c.steps_survived = s.steps_survived;
  c.total_reward = s.total_reward;
  c.mean_unsupplied = s.mean_unsupplied;
  c.mean_islands = s.mean_islands;
  c.mean_cost = s.mean_cost;
  c.mean_broken = s.mean_broken;
  return c;
}

}  // namespace

TrainResult train(const EnvFactory& make_env, const TrainerConfig& config,
                  std::uint64_t seed) {
  config.validate();
  auto env = make_env();
  const std::size_t obs_size = env->observation_width();
  const std::size_t n_actions = env->catalog().size();

  EpsilonSchedule eps = config.epsilon;
  if (eps.decay_steps <= 0)
    eps.decay_steps = std::max<long long>(1, config.total_steps / 5);

  QNetwork online(obs_size, n_actions, Rng::derive_seed(seed, 0x6e657400),
                  config.dueling_mean_center);
  QNetwork target(obs_size, n_actions, 0, config.dueling_mean_center);
  target.copy_params_from(online);
  AdamState adam(online.param_count(), config.adam);
  ReplayBuffer buffer(config.buffer_capacity);
  Rng rng(Rng::derive_seed(seed, 0x61637400));

  TrainResult result;
  if (config.total_steps == 0) {
    result.checkpoint = make_checkpoint(online, adam, rng, config.obs_scale, 0);
    return result;
  }

  int episode = 0;
  FrameStack stack(obs_size);
  stack.reset(scaled(env->reset(Rng::derive_seed(seed, episode)).values,
                     config.obs_scale));

  for (long long step = 0; step < config.total_steps; ++step) {
    const double epsilon = eps.at(step);
    const std::vector<double> state = stack.stacked();
    const int action = select_action(online, state, epsilon, rng);

    const auto sr = env->step(static_cast<std::size_t>(action));
    stack.push(scaled(sr.observation.values, config.obs_scale));

    Transition t;
    t.state = state;
    t.action = action;
    t.reward = sr.reward;
    t.next_state = stack.stacked();
    t.done = sr.done;
    buffer.push(std::move(t));

    if (step >= config.warmup_steps && buffer.size() >= config.batch_size) {
      const auto batch = buffer.sample(config.batch_size, rng);
      const auto y = td_targets(batch, online, target, config.gamma,
                                config.double_dqn);
      loss_with_lrr(batch, y, online, config.lambda, config.regularizer);
      adam.apply(online);
    }
    if ((step + 1) % config.target_sync == 0) target.copy_params_from(online);

    if (sr.done) {
      result.curves.push_back(curve_from_log(env->episode_log(), episode,
                                             step + 1, env->config().c_re));
      ++episode;
      stack.reset(scaled(env->reset(Rng::derive_seed(seed, episode)).values,
                         config.obs_scale));
    }
  }

  result.checkpoint =
      make_checkpoint(online, adam, rng, config.obs_scale,
                      static_cast<std::uint64_t>(config.total_steps));
  return result;
}

namespace {

EvalAggregate aggregate_summaries(std::vector<SummaryRecord> summaries) {
  EvalAggregate agg;
  agg.episodes = static_cast<int>(summaries.size());
  if (summaries.empty()) return agg;
  const double n = static_cast<double>(summaries.size());
  auto stats = [&](auto field, double& mean, double& sd) {
    double sum = 0.0;
    for (const auto& s : summaries) sum += field(s);
    mean = sum / n;
    double var = 0.0;
    for (const auto& s : summaries) {
      const double d = field(s) - mean;
      var += d * d;
    }
    sd = std::sqrt(var / n);  // population standard deviation
  };
  stats([](const SummaryRecord& s) { return s.total_reward; }, agg.reward_mean,
        agg.reward_std);
  stats([](const SummaryRecord& s) { return s.steps_survived; }, agg.steps_mean,
        agg.steps_std);
  stats([](const SummaryRecord& s) { return s.mean_cost; }, agg.cost_mean,
        agg.cost_std);
  stats([](const SummaryRecord& s) { return s.mean_islands; }, agg.islands_mean,
        agg.islands_std);
  stats([](const SummaryRecord& s) { return s.mean_unsupplied; },
        agg.unsupplied_mean, agg.unsupplied_std);
  stats([](const SummaryRecord& s) { return s.mean_broken; }, agg.broken_mean,
        agg.broken_std);
  agg.per_episode = std::move(summaries);
  return agg;
}

}  // namespace

EvalAggregate evaluate_policy(const Policy& policy, const EnvFactory& make_env,
                              int episodes, std::uint64_t seed, double c_re) {
  auto env = make_env();
  std::vector<SummaryRecord> summaries;
  for (int ep = 0; ep < episodes; ++ep) {
    ObservationVector obs = env->reset(Rng::derive_seed(seed, 0x1000 + ep));
    while (!env->done()) {
      const auto sr = env->step(policy(obs));
      obs = sr.observation;
    }
    summaries.push_back(episode_summary(env->episode_log(), c_re));
  }
  return aggregate_summaries(std::move(summaries));
}

EvalAggregate evaluate(const Checkpoint& ckpt, const EnvFactory& make_env,
                       int episodes, std::uint64_t seed) {
  auto probe = make_env();
  const std::size_t obs_size = probe->observation_width();
  const std::size_t n_actions = probe->catalog().size();
  const double c_re = probe->config().c_re;
  if (obs_size != ckpt.obs_size || n_actions != ckpt.n_actions)
    throw IncompatibleCheckpoint(
        "checkpoint does not match the environment (observation " +
        std::to_string(obs_size) + "/" + std::to_string(ckpt.obs_size) +
        ", actions " + std::to_string(n_actions) + "/" +
        std::to_string(ckpt.n_actions) + ")");

  QNetwork net(ckpt.obs_size, ckpt.n_actions, 0, ckpt.mean_center);
  net.import_params(ckpt.params);

  FrameStack stack(obs_size);
  Rng rng(seed);  // only consulted if epsilon were nonzero
  auto& env = probe;
  std::vector<SummaryRecord> summaries;
  for (int ep = 0; ep < episodes; ++ep) {
    ObservationVector obs = env->reset(Rng::derive_seed(seed, 0x1000 + ep));
    stack.reset(scaled(obs.values, ckpt.obs_scale));
    while (!env->done()) {
      const auto a = select_action(net, stack.stacked(), 0.0, rng);
      const auto sr = env->step(static_cast<std::size_t>(a));
      stack.push(scaled(sr.observation.values, ckpt.obs_scale));
    }
    summaries.push_back(episode_summary(env->episode_log(), c_re));
  }
  return aggregate_summaries(std::move(summaries));
}

}  // namespace gridres
