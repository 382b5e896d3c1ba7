#include "aespec/jacobian.hpp"

#include <string>

namespace aespec::jac {

namespace {

void require_full(const ActivationCache& cache, const char* what) {
  if (cache.first_layer != 0) {
    throw linalg::ShapeError(std::string(what) + " needs a cache from a full forward pass");
  }
}

// D4 A4 ... D1 A1 applied to `right` (784 x c); the encoder's last layer has no activation.
Matrix apply_encoder(const AutoencoderParams& params, const ActivationCache& enc, Matrix right) {
  for (std::size_t l = 0; l < 4; ++l) {
    right = linalg::matmul(params.layers[l].weights, right);
    if (l < 3) linalg::scale_rows(right, heaviside(enc.pre[l]));
  }
  return right;
}

}  // namespace

std::vector<double> heaviside(const std::vector<double>& pre) {
  std::vector<double> d(pre.size());
  for (std::size_t i = 0; i < pre.size(); ++i) d[i] = pre[i] > 0.0 ? 1.0 : 0.0;
  return d;
}

std::vector<double> tanh_derivative(const std::vector<double>& y) {
  std::vector<double> d(y.size());
  for (std::size_t i = 0; i < y.size(); ++i) d[i] = 1.0 - y[i] * y[i];
  return d;
}

Matrix encoder_jacobian(const AutoencoderParams& params, const ActivationCache& cache) {
  require_full(cache, "encoder_jacobian");
  Matrix m = params.layers[0].weights;
  linalg::scale_rows(m, heaviside(cache.pre[0]));
  for (std::size_t l = 1; l < 4; ++l) {
    m = linalg::matmul(params.layers[l].weights, m);
    if (l < 3) linalg::scale_rows(m, heaviside(cache.pre[l]));
  }
  return m;
}

Matrix decoder_jacobian(const AutoencoderParams& params, const ActivationCache& cache) {
  Matrix m = params.layers[4].weights;
  linalg::scale_rows(m, heaviside(cache.pre[4]));
  for (std::size_t l = 5; l < 8; ++l) {
    m = linalg::matmul(params.layers[l].weights, m);
    linalg::scale_rows(m, l < 7 ? heaviside(cache.pre[l]) : tanh_derivative(cache.post[7]));
  }
  return m;
}

Matrix input_jacobian(const AutoencoderParams& params, const ActivationCache& cache) {
  return linalg::matmul(decoder_jacobian(params, cache), encoder_jacobian(params, cache));
}

Matrix latent_jacobian(const AutoencoderParams& params, const ActivationCache& cache) {
  const ActivationCache at_reconstruction = ae::forward(params, cache.reconstruction());
  return apply_encoder(params, at_reconstruction, decoder_jacobian(params, cache));
}

Matrix jacobian(const AutoencoderParams& params, const JacobianRequest& request) {
  const std::size_t expected = request.which == Which::DecoderOnly ? params.latent_dim : ae::kInputDim;
  if (request.point.size() != expected) {
    throw linalg::ShapeError("jacobian request point has length " + std::to_string(request.point.size()) +
                             ", expected " + std::to_string(expected));
  }
  if (request.which == Which::DecoderOnly) {
    return decoder_jacobian(params, ae::forward_from_latent(params, request.point));
  }
  const ActivationCache cache = ae::forward(params, request.point);
  switch (request.which) {
    case Which::Latent:
      return latent_jacobian(params, cache);
    case Which::Input:
      return input_jacobian(params, cache);
    case Which::EncoderOnly:
      return encoder_jacobian(params, cache);
    case Which::DecoderOnly:
      break;
  }
  return decoder_jacobian(params, cache);
}

}  // namespace aespec::jac
