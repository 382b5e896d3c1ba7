#pragma once

#include <cstdint>
#include <stdexcept>
#include <vector>

#include "aespec/eigen.hpp"
#include "aespec/matrix.hpp"

namespace aespec::rmt {

using linalg::Matrix;
using linalg::Spectrum;

class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Dimensions n_1..n_k of a rectangular chain n_1 x n_2, n_2 x n_3, ..., n_k x n_1.
/// n_1 must be the smallest dimension so the product lives on the smallest space.
class ChainSpec {
 public:
  explicit ChainSpec(std::vector<std::size_t> dims);

  /// The autoencoder's latent loop: d, 32, 64, 128, 784, 128, 64, 32.
  static ChainSpec autoencoder_latent(std::size_t latent_dim);

  const std::vector<std::size_t>& dims() const { return dims_; }
  std::size_t length() const { return dims_.size(); }
  std::size_t smallest() const { return dims_.front(); }
  /// alpha_j = n_j / n_1 for j = 2..k (empty when k == 1).
  std::vector<double> alphas() const;

 private:
  std::vector<std::size_t> dims_;
};

enum class LawKind { Semicircle, Circular, ProductSquare, RectChain };

/// One finite draw from a law: the spectrum of a sampled matrix.
struct LawSample {
  LawKind law;
  std::size_t matrix_order;
  std::uint64_t seed;
  Spectrum spectrum;
};

// -- samplers (all deterministic in seed) ---------------------------------

/// n x n, entries i.i.d. U[-1, 1].
Matrix sample_uniform_matrix(std::size_t n, std::uint64_t seed);

/// Symmetric n x n, upper triangle (with diagonal) i.i.d. N(0, 1).
Matrix sample_wigner(std::size_t n, std::uint64_t seed);

/// rows x cols, entries i.i.d. N(0, 1).
Matrix sample_gaussian_matrix(std::size_t rows, std::size_t cols, std::uint64_t seed);

/// Matrices of shapes n_j x n_{j+1} with n_{k+1} = n_1, entries i.i.d. N(0, 1).
std::vector<Matrix> sample_gaussian_chain(const ChainSpec& spec, std::uint64_t seed);

/// Product of the chain, each factor scaled by 1/sqrt(n_1).
Matrix scaled_chain_product(const std::vector<Matrix>& chain, std::size_t n1);

/// Spectra of the four reference ensembles, already normalised to their limit laws.
LawSample sample_semicircle(std::size_t n, std::uint64_t seed);
LawSample sample_circular(std::size_t n, std::uint64_t seed);  // U[-1,1] entries, 1/sqrt(n)
LawSample sample_square_product(std::size_t m, std::size_t n, std::uint64_t seed);
LawSample sample_rect_chain(const ChainSpec& spec, std::uint64_t seed);

// -- limiting laws ----------------------------------------------------------

/// (1/2pi) sqrt(4 - x^2) on |x| <= 2, zero elsewhere.
double semicircle_density(double x);
double semicircle_cdf(double x);

/// Density of the m-th power of the uniform law on the unit disc at a + bi.
double product_law_density(std::size_t m, double re, double im);

/// CDF of |lambda|^2 under the m-fold square product law: s^(1/m) on [0, 1].
double product_law_sq_modulus_cdf(std::size_t m, double s);

/// CDF of |lambda|^2 for the uniform disc of the given radius.
double disc_sq_modulus_cdf(double radius, double s);

/// CDF of U * prod_j (U - 1 + alpha_j) for U ~ U[0,1], the unscaled chain law.
double rect_chain_sq_modulus_cdf(const ChainSpec& spec, double s);

// -- rescaled predictions for the autoencoder initialisation --------------

/// (1/3^k) u prod_{j>=2} ((u - 1)/alpha_j + 1): the quantile at u of the
/// squared eigenvalue modulus predicted for a chain of U[-1/sqrt(fan), 1/sqrt(fan)] layers.
double predicted_sq_modulus(const ChainSpec& spec, double u);

struct ModulusStats {
  double median;
  double max;
};

/// Square roots of predicted_sq_modulus at u = 0.5 and u = 1.
ModulusStats predicted_modulus_stats(const ChainSpec& spec);

/// i.i.d. draws of predicted_sq_modulus(spec, U) with U ~ U[0, 1].
std::vector<double> sample_predicted_distribution(const ChainSpec& spec, std::size_t count, std::uint64_t seed);

}  // namespace aespec::rmt
