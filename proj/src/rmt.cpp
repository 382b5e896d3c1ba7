#include "aespec/rmt.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "aespec/rng.hpp"

namespace aespec::rmt {

ChainSpec::ChainSpec(std::vector<std::size_t> dims) : dims_(std::move(dims)) {
  if (dims_.empty()) throw DomainError("chain needs at least one dimension");
  for (std::size_t n : dims_)
    if (n == 0) throw DomainError("chain dimensions must be positive");
  if (*std::min_element(dims_.begin(), dims_.end()) != dims_.front()) {
    throw DomainError("chain must start at its smallest dimension, got n1 = " + std::to_string(dims_.front()));
  }
}

ChainSpec ChainSpec::autoencoder_latent(std::size_t latent_dim) {
  return ChainSpec({latent_dim, 32, 64, 128, 784, 128, 64, 32});
}

std::vector<double> ChainSpec::alphas() const {
  std::vector<double> a;
  for (std::size_t j = 1; j < dims_.size(); ++j)
    a.push_back(static_cast<double>(dims_[j]) / static_cast<double>(dims_.front()));
  return a;
}

Matrix sample_uniform_matrix(std::size_t n, std::uint64_t seed) {
  CounterRng rng(seed);
  Matrix m(n, n);
  for (double& v : m.data()) v = rng.uniform(-1.0, 1.0);
  return m;
}

Matrix sample_wigner(std::size_t n, std::uint64_t seed) {
  CounterRng rng(seed);
  Matrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i; j < n; ++j) {
      const double g = rng.gaussian();
      m(i, j) = g;
      m(j, i) = g;
    }
  }
  return m;
}

Matrix sample_gaussian_matrix(std::size_t rows, std::size_t cols, std::uint64_t seed) {
  CounterRng rng(seed);
  Matrix m(rows, cols);
  for (double& v : m.data()) v = rng.gaussian();
  return m;
}

std::vector<Matrix> sample_gaussian_chain(const ChainSpec& spec, std::uint64_t seed) {
  const CounterRng root(seed);
  const auto& dims = spec.dims();
  std::vector<Matrix> chain;
  chain.reserve(dims.size());
  for (std::size_t j = 0; j < dims.size(); ++j) {
    CounterRng rng = root.split(j);
    Matrix m(dims[j], dims[(j + 1) % dims.size()]);
    for (double& v : m.data()) v = rng.gaussian();
    chain.push_back(std::move(m));
  }
  return chain;
}

Matrix scaled_chain_product(const std::vector<Matrix>& chain, std::size_t n1) {
  const double s = 1.0 / std::sqrt(static_cast<double>(n1));
  Matrix p = linalg::scale(chain.front(), s);
  for (std::size_t j = 1; j < chain.size(); ++j) p = linalg::matmul(p, linalg::scale(chain[j], s));
  return p;
}

LawSample sample_semicircle(std::size_t n, std::uint64_t seed) {
  const Matrix w = linalg::scale(sample_wigner(n, seed), 1.0 / std::sqrt(static_cast<double>(n)));
  return {LawKind::Semicircle, n, seed, linalg::eigenvalues(w)};
}

LawSample sample_circular(std::size_t n, std::uint64_t seed) {
  const Matrix a = linalg::scale(sample_uniform_matrix(n, seed), 1.0 / std::sqrt(static_cast<double>(n)));
  return {LawKind::Circular, n, seed, linalg::eigenvalues(a)};
}

LawSample sample_square_product(std::size_t m, std::size_t n, std::uint64_t seed) {
  if (m == 0) throw DomainError("product order m must be positive");
  const ChainSpec spec(std::vector<std::size_t>(m, n));
  const Matrix p = scaled_chain_product(sample_gaussian_chain(spec, seed), n);
  return {LawKind::ProductSquare, n, seed, linalg::eigenvalues(p)};
}

LawSample sample_rect_chain(const ChainSpec& spec, std::uint64_t seed) {
  const Matrix p = scaled_chain_product(sample_gaussian_chain(spec, seed), spec.smallest());
  return {LawKind::RectChain, spec.smallest(), seed, linalg::eigenvalues(p)};
}

double semicircle_density(double x) {
  if (std::abs(x) > 2.0) return 0.0;
  return std::sqrt(4.0 - x * x) / (2.0 * std::numbers::pi);
}

double semicircle_cdf(double x) {
  if (x <= -2.0) return 0.0;
  if (x >= 2.0) return 1.0;
  return 0.5 + x * std::sqrt(4.0 - x * x) / (4.0 * std::numbers::pi) + std::asin(x / 2.0) / std::numbers::pi;
}

double product_law_density(std::size_t m, double re, double im) {
  if (m == 0) throw DomainError("product order m must be positive");
  const double r2 = re * re + im * im;
  if (r2 > 1.0) return 0.0;
  const double md = static_cast<double>(m);
  return 1.0 / (std::numbers::pi * md * std::pow(r2, (md - 1.0) / md));
}

double product_law_sq_modulus_cdf(std::size_t m, double s) {
  if (m == 0) throw DomainError("product order m must be positive");
  if (s <= 0.0) return 0.0;
  if (s >= 1.0) return 1.0;
  return std::pow(s, 1.0 / static_cast<double>(m));
}

double disc_sq_modulus_cdf(double radius, double s) {
  if (s <= 0.0) return 0.0;
  return std::min(1.0, s / (radius * radius));
}

namespace {

double chain_law_value(const std::vector<double>& alphas, double u) {
  double v = u;
  for (double a : alphas) v *= (u - 1.0 + a);
  return v;
}

}  // namespace

double rect_chain_sq_modulus_cdf(const ChainSpec& spec, double s) {
  const auto alphas = spec.alphas();
  if (s <= 0.0) return 0.0;
  if (s >= chain_law_value(alphas, 1.0)) return 1.0;
  // The law is increasing in U on [0, 1] when every alpha >= 1, so the CDF is its inverse.
  double lo = 0.0, hi = 1.0;
  for (int it = 0; it < 200 && hi - lo > 1e-15; ++it) {
    const double mid = 0.5 * (lo + hi);
    (chain_law_value(alphas, mid) <= s ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

double predicted_sq_modulus(const ChainSpec& spec, double u) {
  if (!(u >= 0.0 && u <= 1.0)) throw DomainError("quantile u must lie in [0, 1], got " + std::to_string(u));
  double v = u / std::pow(3.0, static_cast<double>(spec.length()));
  for (double a : spec.alphas()) v *= (u - 1.0) / a + 1.0;
  return v;
}

ModulusStats predicted_modulus_stats(const ChainSpec& spec) {
  return {std::sqrt(predicted_sq_modulus(spec, 0.5)), std::sqrt(predicted_sq_modulus(spec, 1.0))};
}

std::vector<double> sample_predicted_distribution(const ChainSpec& spec, std::size_t count, std::uint64_t seed) {
  CounterRng rng(seed);
  std::vector<double> out(count);
  for (double& v : out) v = predicted_sq_modulus(spec, rng.uniform());
  return out;
}

}  // namespace aespec::rmt
