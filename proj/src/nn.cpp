#include "gridres/nn.hpp"

#include <cmath>
#include <cstring>
#include <fstream>

namespace gridres {

DenseLayer::DenseLayer(std::size_t in, std::size_t out, bool act, Rng& rng)
    : w(out, in), b(out, 0.0), activation(act), w_grad(out, in), b_grad(out, 0.0) {
  // Uniform in +-sqrt(6 / (fan_in + fan_out)).
  const double bound = std::sqrt(6.0 / static_cast<double>(in + out));
  for (double& x : w.storage()) x = rng.uniform(-bound, bound);
}

Matrix DenseLayer::forward(const Matrix& x, bool record) {
  if (x.cols() != w.cols())
    throw ShapeMismatch("dense layer: input width " + std::to_string(x.cols()) +
                        ", expected " + std::to_string(w.cols()));
  Matrix z = gemm_nt(x, w);
  for (std::size_t i = 0; i < z.rows(); ++i)
    for (std::size_t j = 0; j < z.cols(); ++j) z(i, j) += b[j];
  if (record) {
    input = x;
    preact = z;
    recorded = true;
  }
  if (activation)
    for (double& v : z.storage())
      if (v < 0.0) v *= kLeakyReluAlpha;
  return z;
}

Matrix DenseLayer::backward(const Matrix& dy) {
  if (!recorded) throw NoForwardRecorded("dense layer: backward without forward");
  Matrix dz = dy;
  if (activation) {
    for (std::size_t i = 0; i < dz.size(); ++i)
      if (preact.data()[i] <= 0.0) dz.data()[i] *= kLeakyReluAlpha;
  }
  // Accumulate dW = dz^T x and db = column sums of dz.
  Matrix wg = gemm_tn(dz, input);
  for (std::size_t i = 0; i < w_grad.size(); ++i) w_grad.data()[i] += wg.data()[i];
  for (std::size_t i = 0; i < dz.rows(); ++i)
    for (std::size_t j = 0; j < dz.cols(); ++j) b_grad[j] += dz(i, j);
  return gemm(dz, w);
}

namespace {

std::vector<std::size_t> trunk_widths(std::size_t obs_size) {
  return {2 * obs_size, obs_size, 896, 512};
}

}  // namespace

QNetwork::QNetwork(std::size_t obs_size, std::size_t n_actions,
                   std::uint64_t init_seed, bool mean_center)
    : obs_size_(obs_size), n_actions_(n_actions), mean_center_(mean_center) {
  Rng rng(init_seed);
  std::size_t in = input_width();
  for (std::size_t width : trunk_widths(obs_size)) {
    trunk_.emplace_back(in, width, true, rng);
    in = width;
  }
  advantage_.emplace_back(in, 384, true, rng);
  advantage_.emplace_back(384, n_actions, false, rng);
  value_.emplace_back(in, 384, true, rng);
  value_.emplace_back(384, 1, false, rng);
}

std::vector<DenseLayer*> QNetwork::layers() {
  std::vector<DenseLayer*> out;
  for (auto& l : trunk_) out.push_back(&l);
  for (auto& l : advantage_) out.push_back(&l);
  for (auto& l : value_) out.push_back(&l);
  return out;
}

std::vector<const DenseLayer*> QNetwork::layers() const {
  std::vector<const DenseLayer*> out;
  for (const auto& l : trunk_) out.push_back(&l);
  for (const auto& l : advantage_) out.push_back(&l);
  for (const auto& l : value_) out.push_back(&l);
  return out;
}

Matrix QNetwork::forward(const Matrix& x, bool record) {
  if (x.cols() != input_width())
    throw ShapeMismatch("q-network: input width " + std::to_string(x.cols()) +
                        ", expected " + std::to_string(input_width()));
  Matrix h = x;
  for (auto& layer : trunk_) h = layer.forward(h, record);
  if (record) {
    trunk_out_ = h;
    recorded_ = true;
  }
  Matrix adv = h;
  for (auto& layer : advantage_) adv = layer.forward(adv, record);
  Matrix val = h;
  for (auto& layer : value_) val = layer.forward(val, record);

  // Q(s, a) = V(s) + A(s, a), plain addition.
  Matrix q = adv;
  for (std::size_t i = 0; i < q.rows(); ++i) {
    double shift = val(i, 0);
    if (mean_center_) {
      double mean = 0.0;
      for (std::size_t j = 0; j < q.cols(); ++j) mean += q(i, j);
      shift -= mean / static_cast<double>(q.cols());
    }
    for (std::size_t j = 0; j < q.cols(); ++j) q(i, j) += shift;
  }
  return q;
}

void QNetwork::backward(const Matrix& dq) {
  if (!recorded_) throw NoForwardRecorded("q-network: backward without forward");
  if (dq.cols() != n_actions_)
    throw ShapeMismatch("q-network: gradient width mismatch");

  // dV = row sums of dQ; dA = dQ (mean-centered: dQ minus its row mean).
  Matrix dval(dq.rows(), 1);
  for (std::size_t i = 0; i < dq.rows(); ++i) {
    double sum = 0.0;
    for (std::size_t j = 0; j < dq.cols(); ++j) sum += dq(i, j);
    dval(i, 0) = sum;
  }
  Matrix dadv = dq;
  if (mean_center_) {
    for (std::size_t i = 0; i < dq.rows(); ++i) {
      const double mean = dval(i, 0) / static_cast<double>(dq.cols());
      for (std::size_t j = 0; j < dq.cols(); ++j) dadv(i, j) -= mean;
    }
  }

  for (auto it = advantage_.rbegin(); it != advantage_.rend(); ++it)
    dadv = it->backward(dadv);
  for (auto it = value_.rbegin(); it != value_.rend(); ++it)
    dval = it->backward(dval);

  Matrix dtrunk = dadv;
  for (std::size_t i = 0; i < dtrunk.size(); ++i)
    dtrunk.data()[i] += dval.data()[i];
  for (auto it = trunk_.rbegin(); it != trunk_.rend(); ++it)
    dtrunk = it->backward(dtrunk);
}

void QNetwork::zero_grads() {
  for (auto* layer : layers()) {
    layer->w_grad.fill(0.0);
    layer->b_grad.assign(layer->b_grad.size(), 0.0);
  }
}

std::size_t QNetwork::param_count() const {
  std::size_t n = 0;
  for (const auto* layer : layers()) n += layer->param_count();
  return n;
}

void QNetwork::export_params(std::vector<double>& out) const {
  out.clear();
  out.reserve(param_count());
  for (const auto* layer : layers()) {
    out.insert(out.end(), layer->w.storage().begin(), layer->w.storage().end());
    out.insert(out.end(), layer->b.begin(), layer->b.end());
  }
}

void QNetwork::import_params(const std::vector<double>& in) {
  if (in.size() != param_count())
    throw ShapeMismatch("q-network: parameter vector size mismatch");
  std::size_t at = 0;
  for (auto* layer : layers()) {
    std::memcpy(layer->w.data(), in.data() + at, layer->w.size() * sizeof(double));
    at += layer->w.size();
    std::memcpy(layer->b.data(), in.data() + at, layer->b.size() * sizeof(double));
    at += layer->b.size();
  }
}

void QNetwork::export_grads(std::vector<double>& out) const {
  out.clear();
  out.reserve(param_count());
  for (const auto* layer : layers()) {
    out.insert(out.end(), layer->w_grad.storage().begin(), layer->w_grad.storage().end());
    out.insert(out.end(), layer->b_grad.begin(), layer->b_grad.end());
  }
}

void QNetwork::copy_params_from(const QNetwork& other) {
  std::vector<double> buf;
  other.export_params(buf);
  import_params(buf);
}

AdamState::AdamState(std::size_t param_count, AdamConfig config)
    : config_(config), m_(param_count, 0.0), v_(param_count, 0.0) {}

double AdamState::effective_lr() const {
  return config_.base_lr *
         std::pow(config_.decay_rate,
                  static_cast<double>(step_count_ / config_.decay_every));
}

void AdamState::apply(QNetwork& net) {
  if (m_.size() != net.param_count())
    throw ShapeMismatch("adam: state sized for a different network");
  const double lr = effective_lr();
  const long long t = step_count_ + 1;
  const double bc1 = 1.0 - std::pow(config_.beta1, static_cast<double>(t));
  const double bc2 = 1.0 - std::pow(config_.beta2, static_cast<double>(t));
  std::size_t i = 0;
  net.for_each_param([&](double& p, double& g) {
    m_[i] = config_.beta1 * m_[i] + (1.0 - config_.beta1) * g;
    v_[i] = config_.beta2 * v_[i] + (1.0 - config_.beta2) * g * g;
    const double mhat = m_[i] / bc1;
    const double vhat = v_[i] / bc2;
    p -= lr * mhat / (std::sqrt(vhat) + config_.eps);
    ++i;
  });
  step_count_ = t;
}

void AdamState::restore(std::vector<double> m, std::vector<double> v, long long steps) {
  m_ = std::move(m);
  v_ = std::move(v);
  step_count_ = steps;
}

namespace {

constexpr char kMagic[8] = {'G', 'R', 'D', 'Q', 'N', 'E', 'T', '1'};

template <typename T>
void put(std::ostream& os, const T& v) {
  os.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
void get(std::istream& is, T& v) {
  is.read(reinterpret_cast<char*>(&v), sizeof(T));
}

void put_vec(std::ostream& os, const std::vector<double>& v) {
  put(os, static_cast<std::uint64_t>(v.size()));
  os.write(reinterpret_cast<const char*>(v.data()),
           static_cast<std::streamsize>(v.size() * sizeof(double)));
}

std::vector<double> get_vec(std::istream& is) {
  std::uint64_t n = 0;
  get(is, n);
  std::vector<double> v(n);
  is.read(reinterpret_cast<char*>(v.data()),
          static_cast<std::streamsize>(n * sizeof(double)));
  return v;
}

}  // namespace

void Checkpoint::save(const std::string& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("checkpoint: cannot write " + path);
  out.write(kMagic, sizeof(kMagic));
  put(out, version);
  put(out, static_cast<std::uint64_t>(obs_size));
  put(out, static_cast<std::uint64_t>(n_actions));
  put(out, static_cast<std::uint8_t>(mean_center ? 1 : 0));
  put(out, obs_scale);
  put_vec(out, params);
  put_vec(out, adam_m);
  put_vec(out, adam_v);
  put(out, adam_steps);
  put(out, adam_config.base_lr);
  put(out, adam_config.beta1);
  put(out, adam_config.beta2);
  put(out, adam_config.eps);
  put(out, adam_config.decay_rate);
  put(out, adam_config.decay_every);
  put(out, env_steps);
  rng.save(out);
  if (!out) throw ConfigError("checkpoint: write failed for " + path);
}

Checkpoint Checkpoint::load(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IncompatibleCheckpoint("checkpoint: cannot open " + path);
  char magic[8];
  in.read(magic, sizeof(magic));
  if (!in || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0)
    throw IncompatibleCheckpoint("checkpoint: bad magic in " + path);
  Checkpoint c;
  get(in, c.version);
  if (c.version != 1)
    throw IncompatibleCheckpoint("checkpoint: unsupported version");
  std::uint64_t tmp = 0;
  get(in, tmp); c.obs_size = tmp;
  get(in, tmp); c.n_actions = tmp;
  std::uint8_t flag = 0;
  get(in, flag); c.mean_center = flag != 0;
  get(in, c.obs_scale);
  c.params = get_vec(in);
  c.adam_m = get_vec(in);
  c.adam_v = get_vec(in);
  get(in, c.adam_steps);
  get(in, c.adam_config.base_lr);
  get(in, c.adam_config.beta1);
  get(in, c.adam_config.beta2);
  get(in, c.adam_config.eps);
  get(in, c.adam_config.decay_rate);
  get(in, c.adam_config.decay_every);
  get(in, c.env_steps);
  c.rng.load(in);
  if (!in) throw IncompatibleCheckpoint("checkpoint: truncated file " + path);
  return c;
}

Checkpoint make_checkpoint(const QNetwork& net, const AdamState& adam,
                           const Rng& rng, double obs_scale,
                           std::uint64_t env_steps) {
  Checkpoint c;
  c.obs_size = net.observation_size();
  c.n_actions = net.n_actions();
  c.mean_center = net.mean_center();
  c.obs_scale = obs_scale;
  net.export_params(c.params);
  c.adam_m = adam.first_moment();
  c.adam_v = adam.second_moment();
  c.adam_steps = adam.steps();
  c.adam_config = adam.config();
  c.env_steps = env_steps;
  c.rng = rng;
  return c;
}

void restore_network(const Checkpoint& ckpt, QNetwork& net, AdamState& adam) {
  if (net.observation_size() != ckpt.obs_size || net.n_actions() != ckpt.n_actions)
    throw IncompatibleCheckpoint("checkpoint: network shape mismatch");
  net.import_params(ckpt.params);
  adam = AdamState(net.param_count(), ckpt.adam_config);
  adam.restore(ckpt.adam_m, ckpt.adam_v, ckpt.adam_steps);
}

}  // namespace gridres
