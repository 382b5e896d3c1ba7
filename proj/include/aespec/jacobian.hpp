#pragma once

#include <vector>

#include "aespec/autoencoder.hpp"
#include "aespec/matrix.hpp"

namespace aespec::jac {

using ae::ActivationCache;
using ae::AutoencoderParams;
using linalg::Matrix;

/// Diagonal of the ReLU derivative at `pre`: 1 where pre > 0, else 0.
std::vector<double> heaviside(const std::vector<double>& pre);

/// Diagonal of the tanh derivative given the tanh outputs: 1 - y^2.
std::vector<double> tanh_derivative(const std::vector<double>& y);

/// D f_enc at the cached input: A4 D3 A3 D2 A2 D1 A1 (d x 784).
Matrix encoder_jacobian(const AutoencoderParams& params, const ActivationCache& cache);

/// D f_dec at the cached latent point: T A8 D7 A7 D6 A6 D5 A5 (784 x d).
/// Accepts a full cache or one from forward_from_latent.
Matrix decoder_jacobian(const AutoencoderParams& params, const ActivationCache& cache);

/// J_I = D f_dec(z) D f_enc(x) (784 x 784). Rank at most d.
Matrix input_jacobian(const AutoencoderParams& params, const ActivationCache& cache);

/// J_L = D(f_enc o f_dec)(z) = D f_enc(y) D f_dec(z) (d x d), with the encoder
/// factors taken from a fresh forward pass at the reconstruction y.
Matrix latent_jacobian(const AutoencoderParams& params, const ActivationCache& cache);

enum class Which { Latent, Input, EncoderOnly, DecoderOnly };

struct JacobianRequest {
  Which which;
  /// 784-vector, or a d-vector for DecoderOnly.
  std::vector<double> point;
};

Matrix jacobian(const AutoencoderParams& params, const JacobianRequest& request);

}  // namespace aespec::jac
