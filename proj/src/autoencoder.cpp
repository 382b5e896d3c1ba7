#include "aespec/autoencoder.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "aespec/rng.hpp"

namespace aespec::ae {

namespace {

constexpr std::uint64_t kInitDomain = 0x696e6974;     // "init"
constexpr std::uint64_t kShuffleDomain = 0x73687566;  // "shuf"

double activate(Activation a, double v) {
  switch (a) {
    case Activation::Relu:
      return v > 0.0 ? v : 0.0;
    case Activation::Tanh:
      return std::tanh(v);
    case Activation::Identity:
      break;
  }
  return v;
}

void affine(const Layer& layer, std::span<const double> in, std::vector<double>& out) {
  const std::size_t rows = layer.weights.rows();
  out.resize(rows);
  for (std::size_t i = 0; i < rows; ++i) {
    auto w = layer.weights.row(i);
    double acc = layer.biases[i];
    for (std::size_t j = 0; j < w.size(); ++j) acc += w[j] * in[j];
    out[i] = acc;
  }
}

void run_layers(const AutoencoderParams& params, ActivationCache& cache, std::size_t first) {
  for (std::size_t l = first; l < kLayerCount; ++l) {
    std::span<const double> in = l == first ? std::span<const double>(cache.input) : cache.post[l - 1];
    affine(params.layers[l], in, cache.pre[l]);
    const Activation act = activation_of(l);
    cache.post[l].resize(cache.pre[l].size());
    for (std::size_t i = 0; i < cache.pre[l].size(); ++i) cache.post[l][i] = activate(act, cache.pre[l][i]);
  }
}

}  // namespace

Activation activation_of(std::size_t index) {
  if (index == 3) return Activation::Identity;
  if (index == 7) return Activation::Tanh;
  return Activation::Relu;
}

std::array<std::size_t, kLayerCount + 1> layer_widths(std::size_t latent_dim) {
  return {kInputDim, 128, 64, 32, latent_dim, 32, 64, 128, kInputDim};
}

AutoencoderParams AutoencoderParams::zeros(std::size_t latent_dim) {
  AutoencoderParams p;
  p.latent_dim = latent_dim;
  const auto w = layer_widths(latent_dim);
  for (std::size_t l = 0; l < kLayerCount; ++l) {
    p.layers[l].weights = Matrix(w[l + 1], w[l]);
    p.layers[l].biases.assign(w[l + 1], 0.0);
  }
  return p;
}

void AutoencoderParams::validate() const {
  if (latent_dim < kMinLatent || latent_dim > kMaxLatent) {
    throw DomainError("latent dimension " + std::to_string(latent_dim) + " outside [2, 20]");
  }
  const auto w = layer_widths(latent_dim);
  for (std::size_t l = 0; l < kLayerCount; ++l) {
    const Layer& layer = layers[l];
    if (layer.weights.rows() != w[l + 1] || layer.weights.cols() != w[l] || layer.biases.size() != w[l + 1]) {
      throw DomainError("layer " + std::to_string(l + 1) + " has weights " + layer.weights.shape_string() +
                        ", expected " + std::to_string(w[l + 1]) + "x" + std::to_string(w[l]));
    }
    for (double v : layer.weights.data())
      if (!std::isfinite(v)) throw DomainError("non-finite weight in layer " + std::to_string(l + 1));
    for (double v : layer.biases)
      if (!std::isfinite(v)) throw DomainError("non-finite bias in layer " + std::to_string(l + 1));
  }
}

std::size_t AutoencoderParams::parameter_count() const {
  std::size_t n = 0;
  for (const auto& layer : layers) n += layer.weights.data().size() + layer.biases.size();
  return n;
}

AutoencoderParams init(std::size_t latent_dim, std::uint64_t seed) {
  if (latent_dim < kMinLatent || latent_dim > kMaxLatent) {
    throw DomainError("latent dimension " + std::to_string(latent_dim) + " outside [2, 20]");
  }
  AutoencoderParams p = AutoencoderParams::zeros(latent_dim);
  const CounterRng root = CounterRng(seed).split(kInitDomain);
  for (std::size_t l = 0; l < kLayerCount; ++l) {
    CounterRng rng = root.split(l);
    Layer& layer = p.layers[l];
    const double bound = 1.0 / std::sqrt(static_cast<double>(layer.weights.cols()));
    for (double& v : layer.weights.data()) v = rng.uniform(-bound, bound);
    for (double& v : layer.biases) v = rng.uniform(-bound, bound);
  }
  return p;
}

ActivationCache forward(const AutoencoderParams& params, std::span<const double> x) {
  if (x.size() != kInputDim) {
    throw linalg::ShapeError("forward: input of length " + std::to_string(x.size()) + ", expected 784");
  }
  ActivationCache cache;
  cache.input.assign(x.begin(), x.end());
  run_layers(params, cache, 0);
  return cache;
}

ActivationCache forward_from_latent(const AutoencoderParams& params, std::span<const double> z) {
  if (z.size() != params.latent_dim) {
    throw linalg::ShapeError("forward_from_latent: latent point of length " + std::to_string(z.size()) +
                             ", expected " + std::to_string(params.latent_dim));
  }
  ActivationCache cache;
  cache.first_layer = 4;
  cache.input.assign(z.begin(), z.end());
  run_layers(params, cache, 4);
  return cache;
}

double loss(std::span<const double> y, std::span<const double> x) {
  if (y.size() != x.size()) throw linalg::ShapeError("loss: lengths differ");
  double s = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) s += (y[i] - x[i]) * (y[i] - x[i]);
  return s / static_cast<double>(y.size());
}

void accumulate_gradients(const AutoencoderParams& params, const ActivationCache& cache, double scale,
                          Gradients& grads) {
  const auto& y = cache.reconstruction();
  const auto& x = cache.input;
  const double n = static_cast<double>(y.size());

  // dL/d(pre_8) = (2/n)(y - x) * (1 - y^2)
  std::vector<double> delta(y.size());
  for (std::size_t i = 0; i < y.size(); ++i) delta[i] = 2.0 / n * (y[i] - x[i]) * (1.0 - y[i] * y[i]);

  std::vector<double> upstream;
  for (std::size_t l = kLayerCount; l-- > 0;) {
    const Layer& layer = params.layers[l];
    Layer& g = grads.layers[l];
    std::span<const double> in = l == 0 ? std::span<const double>(x) : cache.post[l - 1];
    for (std::size_t i = 0; i < delta.size(); ++i) {
      const double di = scale * delta[i];
      g.biases[i] += di;
      if (di == 0.0) continue;
      auto grow = g.weights.row(i);
      for (std::size_t j = 0; j < in.size(); ++j) grow[j] += di * in[j];
    }
    if (l == 0) break;

    upstream.assign(layer.weights.cols(), 0.0);
    for (std::size_t i = 0; i < delta.size(); ++i) {
      const double di = delta[i];
      if (di == 0.0) continue;
      auto w = layer.weights.row(i);
      for (std::size_t j = 0; j < w.size(); ++j) upstream[j] += di * w[j];
    }
    const auto& pre = cache.pre[l - 1];
    if (activation_of(l - 1) == Activation::Relu) {
      // Heaviside derivative: 1 for pre > 0, 0 otherwise (including exactly 0).
      for (std::size_t j = 0; j < upstream.size(); ++j)
        if (!(pre[j] > 0.0)) upstream[j] = 0.0;
    }
    delta.swap(upstream);
  }
}

Gradients backward(const AutoencoderParams& params, const ActivationCache& cache) {
  Gradients g = AutoencoderParams::zeros(params.latent_dim);
  accumulate_gradients(params, cache, 1.0, g);
  return g;
}

std::vector<std::size_t> TrainingConfig::normalized_checkpoints() const {
  std::vector<std::size_t> out{0};
  for (std::size_t e : checkpoint_epochs)
    if (e <= epochs) out.push_back(e);
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

std::vector<std::size_t> epoch_permutation(std::size_t count, std::uint64_t seed, std::size_t epoch) {
  std::vector<std::size_t> order(count);
  for (std::size_t i = 0; i < count; ++i) order[i] = i;
  CounterRng rng = CounterRng(seed).split(kShuffleDomain).split(epoch);
  for (std::size_t i = count; i > 1; --i) {
    const std::size_t j = rng.below(i);
    std::swap(order[i - 1], order[j]);
  }
  return order;
}

namespace {

template <typename Fn>
void for_each_parameter(AutoencoderParams& p, Gradients& g, Fn&& fn) {
  for (std::size_t l = 0; l < kLayerCount; ++l) {
    auto pw = p.layers[l].weights.data();
    auto gw = g.layers[l].weights.data();
    for (std::size_t k = 0; k < pw.size(); ++k) fn(l, false, k, pw[k], gw[k]);
    auto& pb = p.layers[l].biases;
    auto& gb = g.layers[l].biases;
    for (std::size_t k = 0; k < pb.size(); ++k) fn(l, true, k, pb[k], gb[k]);
  }
}

struct AdamState {
  Gradients m;
  Gradients v;
  std::size_t step = 0;
};

void zero(Gradients& g) {
  for (auto& layer : g.layers) {
    std::fill(layer.weights.data().begin(), layer.weights.data().end(), 0.0);
    std::fill(layer.biases.begin(), layer.biases.end(), 0.0);
  }
}

double& slot(Gradients& g, std::size_t l, bool bias, std::size_t k) {
  return bias ? g.layers[l].biases[k] : g.layers[l].weights.data()[k];
}

}  // namespace

TrainingResult train(AutoencoderParams params, const std::vector<std::vector<double>>& dataset,
                     const TrainingConfig& config, const CheckpointSink& sink) {
  params.validate();
  if (config.epochs > 0 && dataset.empty()) throw DomainError("training requires a nonempty dataset");
  if (config.batch_size == 0) throw DomainError("batch size must be positive");
  for (const auto& point : dataset) {
    if (point.size() != kInputDim) throw DomainError("training point of wrong length");
  }

  TrainingResult result;
  const auto checkpoints = config.normalized_checkpoints();
  auto emit = [&](std::size_t epoch) {
    if (!std::binary_search(checkpoints.begin(), checkpoints.end(), epoch)) return;
    Checkpoint cp{epoch, params};
    if (sink) {
      sink(cp);
    } else {
      result.checkpoints.push_back(std::move(cp));
    }
  };
  emit(0);

  Gradients grads = AutoencoderParams::zeros(params.latent_dim);
  std::optional<AdamState> adam;
  if (std::holds_alternative<Adam>(config.optimizer)) {
    adam.emplace(AdamState{AutoencoderParams::zeros(params.latent_dim), AutoencoderParams::zeros(params.latent_dim)});
  }

  for (std::size_t epoch = 1; epoch <= config.epochs; ++epoch) {
    const auto order = epoch_permutation(dataset.size(), config.seed, epoch);
    double epoch_loss = 0.0;
    std::size_t batch_index = 0;
    for (std::size_t start = 0; start < order.size(); start += config.batch_size, ++batch_index) {
      const std::size_t stop = std::min(order.size(), start + config.batch_size);
      const double inv = 1.0 / static_cast<double>(stop - start);
      zero(grads);
      double batch_loss = 0.0;
      for (std::size_t s = start; s < stop; ++s) {
        const auto cache = forward(params, dataset[order[s]]);
        batch_loss += loss(cache.reconstruction(), cache.input);
        accumulate_gradients(params, cache, inv, grads);
      }
      if (!std::isfinite(batch_loss)) {
        throw NumericalError("non-finite loss at epoch " + std::to_string(epoch) + ", batch " +
                             std::to_string(batch_index));
      }
      epoch_loss += batch_loss;

      const double lr = config.learning_rate;
      if (adam) {
        const Adam& hp = std::get<Adam>(config.optimizer);
        ++adam->step;
        const double c1 = 1.0 - std::pow(hp.beta1, static_cast<double>(adam->step));
        const double c2 = 1.0 - std::pow(hp.beta2, static_cast<double>(adam->step));
        for_each_parameter(params, grads, [&](std::size_t l, bool bias, std::size_t k, double& p, double g) {
          double& m = slot(adam->m, l, bias, k);
          double& v = slot(adam->v, l, bias, k);
          m = hp.beta1 * m + (1.0 - hp.beta1) * g;
          v = hp.beta2 * v + (1.0 - hp.beta2) * g * g;
          p -= lr * (m / c1) / (std::sqrt(v / c2) + hp.epsilon);
        });
      } else {
        for_each_parameter(params, grads, [&](std::size_t, bool, std::size_t, double& p, double g) { p -= lr * g; });
      }
    }
    result.epoch_losses.push_back(epoch_loss / static_cast<double>(dataset.size()));
    emit(epoch);
  }
  return result;
}

}  // namespace aespec::ae
