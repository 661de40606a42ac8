#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "gridres/matrix.hpp"
#include "gridres/rng.hpp"

namespace gridres {

/// Fully-connected layer y = x W^T + b with an optional leaky-ReLU
/// activation. Forward passes can record activations for the backward pass;
/// gradients accumulate into w_grad / b_grad.
struct DenseLayer {
  Matrix w;                    // out x in
  std::vector<double> b;       // out
  bool activation = true;      // leaky ReLU after the affine map

  Matrix w_grad;
  std::vector<double> b_grad;

  // recorded by forward(record=true)
  Matrix input;
  Matrix preact;
  bool recorded = false;

  DenseLayer(std::size_t in, std::size_t out, bool act, Rng& rng);

  Matrix forward(const Matrix& x, bool record);
  /// Given dLoss/dOutput, accumulates parameter gradients and returns
  /// dLoss/dInput.
  Matrix backward(const Matrix& dy);

  std::size_t param_count() const { return w.size() + b.size(); }
};

inline constexpr double kLeakyReluAlpha = 0.01;

/// Dueling Q-network: trunk (2O, O, 896, 512) on a 4-frame stacked input of
/// width 4O, a 384-unit advantage head of width |A| and a 384-unit value
/// head of width 1, combined as Q = V + A (plain addition; the mean-centered
/// variant sits behind a flag, default off).
class QNetwork {
 public:
  QNetwork(std::size_t obs_size, std::size_t n_actions, std::uint64_t init_seed,
           bool mean_center = false);

  std::size_t observation_size() const { return obs_size_; }
  std::size_t input_width() const { return 4 * obs_size_; }
  std::size_t n_actions() const { return n_actions_; }
  bool mean_center() const { return mean_center_; }

  /// x: batch x input_width. Returns Q: batch x n_actions.
  Matrix forward(const Matrix& x, bool record = false);

  /// dLoss/dQ for the recorded batch; accumulates parameter gradients.
  void backward(const Matrix& dq);

  void zero_grads();

  std::size_t param_count() const;
  void export_params(std::vector<double>& out) const;
  void import_params(const std::vector<double>& in);
  void export_grads(std::vector<double>& out) const;
  void copy_params_from(const QNetwork& other);

  /// Applies fn to every (param, grad) pair in canonical order.
  template <typename Fn>
  void for_each_param(Fn&& fn) {
    for (auto* layer : layers()) {
      for (std::size_t i = 0; i < layer->w.size(); ++i)
        fn(layer->w.data()[i], layer->w_grad.data()[i]);
      for (std::size_t i = 0; i < layer->b.size(); ++i)
        fn(layer->b[i], layer->b_grad[i]);
    }
  }

  std::vector<DenseLayer*> layers();
  std::vector<const DenseLayer*> layers() const;

 private:
  std::size_t obs_size_;
  std::size_t n_actions_;
  bool mean_center_;
  std::vector<DenseLayer> trunk_;
  std::vector<DenseLayer> advantage_;
  std::vector<DenseLayer> value_;

  // recorded trunk output needed to route head gradients
  Matrix trunk_out_;
  Matrix dq_buffer_;
  bool recorded_ = false;
};

/// Adam with bias correction and the stepped learning-rate schedule
/// lr(step) = base * decay^(step / decay_every), integer division.
struct AdamConfig {
  double base_lr = 1e-4;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  double decay_rate = 0.95;
  long long decay_every = 1000;
};

class AdamState {
 public:
  AdamState() = default;
  AdamState(std::size_t param_count, AdamConfig config);

  double effective_lr() const;
  long long steps() const { return step_count_; }

  /// One update from the gradients currently held in the network.
  void apply(QNetwork& net);

  const std::vector<double>& first_moment() const { return m_; }
  const std::vector<double>& second_moment() const { return v_; }
  const AdamConfig& config() const { return config_; }

  void restore(std::vector<double> m, std::vector<double> v, long long steps);

 private:
  AdamConfig config_;
  std::vector<double> m_, v_;
  long long step_count_ = 0;
};

/// Everything needed to resume training deterministically.
struct Checkpoint {
  std::uint32_t version = 1;
  std::size_t obs_size = 0;
  std::size_t n_actions = 0;
  bool mean_center = false;
  double obs_scale = 1.0;
  std::vector<double> params;
  std::vector<double> adam_m, adam_v;
  long long adam_steps = 0;
  AdamConfig adam_config;
  std::uint64_t env_steps = 0;
  Rng rng;

  void save(const std::string& path) const;
  static Checkpoint load(const std::string& path);
};

Checkpoint make_checkpoint(const QNetwork& net, const AdamState& adam,
                           const Rng& rng, double obs_scale,
                           std::uint64_t env_steps);
void restore_network(const Checkpoint& ckpt, QNetwork& net, AdamState& adam);

}  // namespace gridres
