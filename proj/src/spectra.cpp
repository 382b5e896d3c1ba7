#include "aespec/spectra.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace aespec::spectra {

double fold_argument(std::complex<double> value) {
  if (value == std::complex<double>(0.0, 0.0)) return 0.0;
  return std::abs(std::atan2(value.imag(), value.real()));
}

double quantile_sorted(std::span<const double> sorted, double p) {
  if (sorted.empty()) throw std::invalid_argument("quantile of an empty sample");
  const double h = (static_cast<double>(sorted.size()) - 1.0) * p;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

Quantiles quantiles(std::vector<double> values) {
  std::sort(values.begin(), values.end());
  return {values.front(), quantile_sorted(values, 0.25), quantile_sorted(values, 0.5),
          quantile_sorted(values, 0.75), quantile_sorted(values, 0.95), values.back()};
}

BoxStats box_stats(std::vector<double> values) {
  BoxStats b;
  if (values.empty()) return b;
  std::sort(values.begin(), values.end());
  b.q = {values.front(), quantile_sorted(values, 0.25), quantile_sorted(values, 0.5),
         quantile_sorted(values, 0.75), quantile_sorted(values, 0.95), values.back()};
  const double iqr = b.q[3] - b.q[1];
  const double lo_fence = b.q[1] - 1.5 * iqr;
  const double hi_fence = b.q[3] + 1.5 * iqr;
  b.whisker_low = b.q[1];
  b.whisker_high = b.q[3];
  for (double v : values) {
    if (v < lo_fence || v > hi_fence) {
      b.outliers.push_back(v);
    } else {
      b.whisker_low = std::min(b.whisker_low, v);
      b.whisker_high = std::max(b.whisker_high, v);
    }
  }
  return b;
}

SpectralSummary summarize(std::span<const Spectrum> spectra, std::size_t epoch, std::size_t latent_dim) {
  if (spectra.empty()) throw std::invalid_argument("summarize: no spectra");
  SpectralSummary s;
  s.latent_dim = latent_dim;
  s.epoch = epoch;
  s.sample_points = spectra.size();
  std::vector<double> moduli;
  std::vector<double> args;
  for (const auto& sp : spectra) {
    for (const auto& v : sp.values) {
      const double r = std::abs(v);
      moduli.push_back(r);
      if (r < kZeroModulus) {
        ++s.zero_count;
      } else {
        args.push_back(fold_argument(v));
      }
    }
  }
  s.eigen_count = moduli.size();
  if (moduli.empty()) throw std::invalid_argument("summarize: spectra contain no eigenvalues");
  s.modulus = box_stats(std::move(moduli));
  s.argument = box_stats(std::move(args));
  return s;
}

double ks_statistic(std::vector<double> samples, const std::function<double(double)>& cdf) {
  if (samples.empty()) throw std::invalid_argument("ks_statistic: empty sample");
  std::sort(samples.begin(), samples.end());
  const double n = static_cast<double>(samples.size());
  double d = 0.0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const double f = cdf(samples[i]);
    d = std::max({d, static_cast<double>(i + 1) / n - f, f - static_cast<double>(i) / n});
  }
  return d;
}

EsdSample EsdSample::pooled(std::span<const Spectrum> spectra) {
  EsdSample e;
  for (const auto& s : spectra) e.values.insert(e.values.end(), s.values.begin(), s.values.end());
  return e;
}

std::vector<double> EsdSample::sq_moduli() const {
  std::vector<double> out(values.size());
  std::transform(values.begin(), values.end(), out.begin(), [](auto v) { return std::norm(v); });
  return out;
}

std::vector<double> EsdSample::folded_arguments() const {
  std::vector<double> out(values.size());
  std::transform(values.begin(), values.end(), out.begin(), fold_argument);
  return out;
}

std::vector<double> EsdSample::real_parts() const {
  std::vector<double> out(values.size());
  std::transform(values.begin(), values.end(), out.begin(), [](auto v) { return v.real(); });
  return out;
}

double esd_cdf(const EsdSample& sample, double x, double y) {
  if (sample.values.empty()) return 0.0;
  const auto hits = std::count_if(sample.values.begin(), sample.values.end(),
                                  [&](auto v) { return v.real() <= x && v.imag() <= y; });
  return static_cast<double>(hits) * sample.weight();
}

namespace {

std::vector<double> ranks(std::span<const double> v) {
  std::vector<std::size_t> idx(v.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
  std::vector<double> r(v.size());
  for (std::size_t i = 0; i < idx.size();) {
    std::size_t j = i;
    while (j + 1 < idx.size() && v[idx[j + 1]] == v[idx[i]]) ++j;
    const double avg = 0.5 * static_cast<double>(i + j) + 1.0;
    for (std::size_t k = i; k <= j; ++k) r[idx[k]] = avg;
    i = j + 1;
  }
  return r;
}

}  // namespace

double spearman(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size() || a.size() < 2) throw std::invalid_argument("spearman: need two equal-length samples");
  const auto ra = ranks(a);
  const auto rb = ranks(b);
  const double ma = std::accumulate(ra.begin(), ra.end(), 0.0) / static_cast<double>(ra.size());
  const double mb = std::accumulate(rb.begin(), rb.end(), 0.0) / static_cast<double>(rb.size());
  double sab = 0.0, saa = 0.0, sbb = 0.0;
  for (std::size_t i = 0; i < ra.size(); ++i) {
    sab += (ra[i] - ma) * (rb[i] - mb);
    saa += (ra[i] - ma) * (ra[i] - ma);
    sbb += (rb[i] - mb) * (rb[i] - mb);
  }
  if (saa == 0.0 || sbb == 0.0) return 0.0;
  return sab / std::sqrt(saa * sbb);
}

}  // namespace aespec::spectra
