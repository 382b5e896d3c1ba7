#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "aespec/matrix.hpp"

namespace aespec::ae {

using linalg::Matrix;

inline constexpr std::size_t kInputDim = 784;
inline constexpr std::size_t kLayerCount = 8;
inline constexpr std::size_t kMinLatent = 2;
inline constexpr std::size_t kMaxLatent = 20;

enum class Activation { Relu, Identity, Tanh };

/// Activation applied after layer `index` (0-based): ReLU on 0-2 and 4-6,
/// none on the latent layer 3, tanh on the output layer 7.
Activation activation_of(std::size_t index);

/// Layer widths: 784, 128, 64, 32, d, 32, 64, 128, 784.
std::array<std::size_t, kLayerCount + 1> layer_widths(std::size_t latent_dim);

class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Layer {
  Matrix weights;  // out x in
  std::vector<double> biases;

  bool operator==(const Layer&) const = default;
};

struct AutoencoderParams {
  std::size_t latent_dim = 0;
  std::array<Layer, kLayerCount> layers;

  /// All-zero parameters with the architecture's shapes.
  static AutoencoderParams zeros(std::size_t latent_dim);

  /// Throws DomainError when the shape chain is broken or an entry is not finite.
  void validate() const;

  std::size_t parameter_count() const;

  bool operator==(const AutoencoderParams&) const = default;
};

/// Gradient of the loss, shaped like the parameters.
using Gradients = AutoencoderParams;

struct ActivationCache {
  std::vector<double> input;                                  // x
  std::array<std::vector<double>, kLayerCount> pre;            // A x + b per layer
  std::array<std::vector<double>, kLayerCount> post;           // activation(pre)
  /// First layer index that was evaluated: 0 for a full pass, 4 for a decoder-only pass.
  std::size_t first_layer = 0;

  const std::vector<double>& latent() const { return first_layer == 0 ? post[3] : input; }
  const std::vector<double>& reconstruction() const { return post[7]; }
};

AutoencoderParams init(std::size_t latent_dim, std::uint64_t seed);

ActivationCache forward(const AutoencoderParams& params, std::span<const double> x);

/// Runs only the decoder (layers 4-7) from a latent point z.
ActivationCache forward_from_latent(const AutoencoderParams& params, std::span<const double> z);

/// Mean squared error (1/n) sum (y_i - x_i)^2.
double loss(std::span<const double> y, std::span<const double> x);

/// Exact gradient of loss(forward(x).y, x) with respect to every parameter.
Gradients backward(const AutoencoderParams& params, const ActivationCache& cache);

/// Accumulates `scale * backward(params, cache)` into `grads` without allocating.
void accumulate_gradients(const AutoencoderParams& params, const ActivationCache& cache, double scale,
                          Gradients& grads);

struct Sgd {};
struct Adam {
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};
using Optimizer = std::variant<Sgd, Adam>;

struct TrainingConfig {
  std::size_t epochs = 300;
  std::vector<std::size_t> checkpoint_epochs = {0, 1, 4, 10, 50, 300};
  std::uint64_t seed = 0;
  std::size_t batch_size = 128;
  double learning_rate = 1e-3;
  Optimizer optimizer = Adam{};

  /// Sorted unique checkpoint list, with 0 added and entries beyond `epochs` dropped.
  std::vector<std::size_t> normalized_checkpoints() const;
};

struct Checkpoint {
  std::size_t epoch;
  AutoencoderParams params;
};

struct TrainingResult {
  std::vector<Checkpoint> checkpoints;
  std::vector<double> epoch_losses;  // mean per-sample loss of each epoch, index 0 = epoch 1
};

using CheckpointSink = std::function<void(const Checkpoint&)>;

/// Mini-batch training. Each epoch visits the dataset in a Fisher-Yates order
/// seeded by (config.seed, epoch). Checkpoint 0 is the untouched initialisation.
/// When `sink` is set checkpoints are handed to it as they are produced instead
/// of being retained in the result.
TrainingResult train(AutoencoderParams params, const std::vector<std::vector<double>>& dataset,
                     const TrainingConfig& config, const CheckpointSink& sink = {});

/// Dataset visit order for one epoch.
std::vector<std::size_t> epoch_permutation(std::size_t count, std::uint64_t seed, std::size_t epoch);

// -- checkpoint files -------------------------------------------------------

class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr char kCheckpointMagic[8] = {'A', 'E', 'S', 'P', 'E', 'C', '0', '1'};

struct CheckpointHeader {
  std::uint32_t latent_dim;
  std::uint32_t epoch;
  std::uint64_t seed;
};

std::vector<std::uint8_t> encode_checkpoint(const AutoencoderParams& params, std::uint32_t epoch, std::uint64_t seed);
AutoencoderParams decode_checkpoint(std::span<const std::uint8_t> bytes, CheckpointHeader* header = nullptr);

void write_checkpoint(const std::filesystem::path& path, const AutoencoderParams& params, std::uint32_t epoch,
                      std::uint64_t seed);
AutoencoderParams read_checkpoint(const std::filesystem::path& path, CheckpointHeader* header = nullptr);

}  // namespace aespec::ae
