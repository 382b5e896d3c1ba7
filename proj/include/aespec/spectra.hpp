#pragma once

#include <array>
#include <complex>
#include <functional>
#include <span>
#include <vector>

#include "aespec/eigen.hpp"

namespace aespec::spectra {

using linalg::Spectrum;

/// Eigenvalues with modulus below this are "zero": excluded from argument statistics.
inline constexpr double kZeroModulus = 1e-12;

/// |atan2(im, re)| in [0, pi]; conjugates fold to the same value. Exact zero maps to 0.
double fold_argument(std::complex<double> value);

/// Type-7 quantile (linear interpolation between order statistics) of sorted data.
double quantile_sorted(std::span<const double> sorted, double p);

/// min, q25, median, q75, p95, max.
using Quantiles = std::array<double, 6>;

Quantiles quantiles(std::vector<double> values);

struct BoxStats {
  Quantiles q{};
  double whisker_low = 0.0;   // smallest value >= q25 - 1.5 IQR
  double whisker_high = 0.0;  // largest value <= q75 + 1.5 IQR
  std::vector<double> outliers;
};

BoxStats box_stats(std::vector<double> values);

struct SpectralSummary {
  std::size_t latent_dim = 0;
  std::size_t epoch = 0;
  std::size_t sample_points = 0;
  std::size_t eigen_count = 0;
  std::size_t zero_count = 0;
  BoxStats modulus;
  BoxStats argument;  // folded arguments of non-zero eigenvalues

  const Quantiles& modulus_quantiles() const { return modulus.q; }
  const Quantiles& argument_quantiles() const { return argument.q; }
};

/// Pools all eigenvalues of `spectra` and summarises moduli and folded arguments.
SpectralSummary summarize(std::span<const Spectrum> spectra, std::size_t epoch, std::size_t latent_dim);

/// Two-sided sup |F_n - F| over the sample, F_n the empirical CDF.
double ks_statistic(std::vector<double> samples, const std::function<double(double)>& cdf);

/// Uniform-weight empirical spectral distribution.
struct EsdSample {
  std::vector<std::complex<double>> values;

  static EsdSample from(const Spectrum& s) { return {s.values}; }
  static EsdSample pooled(std::span<const Spectrum> spectra);

  double weight() const { return values.empty() ? 0.0 : 1.0 / static_cast<double>(values.size()); }
  std::vector<double> sq_moduli() const;
  std::vector<double> folded_arguments() const;
  std::vector<double> real_parts() const;
};

/// Fraction of eigenvalues with re <= x and im <= y.
double esd_cdf(const EsdSample& sample, double x, double y);

/// Spearman rank correlation (average ranks for ties).
double spearman(std::span<const double> a, std::span<const double> b);

}  // namespace aespec::spectra
