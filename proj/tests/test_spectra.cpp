#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "aespec/rng.hpp"
#include "aespec/spectra.hpp"

using namespace aespec;
using namespace aespec::spectra;
using cplx = std::complex<double>;

namespace {
double uniform_cdf(double x) { return std::clamp(x, 0.0, 1.0); }
}  // namespace

TEST_CASE("folded arguments") {
  CHECK(fold_argument({0.0, 1.0}) == doctest::Approx(std::numbers::pi / 2));
  CHECK(fold_argument({0.0, -1.0}) == doctest::Approx(std::numbers::pi / 2));
  CHECK(fold_argument({2.0, 0.0}) == 0.0);
  CHECK(fold_argument({-2.0, 0.0}) == doctest::Approx(std::numbers::pi));
  CHECK(fold_argument({-2.0, -0.0}) == doctest::Approx(std::numbers::pi));
  CHECK(fold_argument({0.0, 0.0}) == 0.0);
  CHECK(fold_argument({1.0, 1.0}) == fold_argument({1.0, -1.0}));
}

TEST_CASE("type-7 quantiles") {
  const std::vector<double> v{1, 2, 3, 4};
  CHECK(quantile_sorted(v, 0.0) == 1.0);
  CHECK(quantile_sorted(v, 1.0) == 4.0);
  CHECK(quantile_sorted(v, 0.5) == 2.5);
  CHECK(quantile_sorted(v, 0.25) == doctest::Approx(1.75));
  CHECK_THROWS(quantile_sorted(std::vector<double>{}, 0.5));

  CounterRng rng(3);
  std::vector<double> s(257);
  for (double& x : s) x = rng.gaussian();
  const auto q = quantiles(s);
  for (std::size_t i = 1; i < q.size(); ++i) CHECK(q[i - 1] <= q[i]);
}

TEST_CASE("box statistics") {
  std::vector<double> v{1, 2, 3, 4, 5, 6, 7, 8, 100};
  const auto b = box_stats(v);
  CHECK(b.q[2] == 5.0);
  CHECK(b.outliers == std::vector<double>{100.0});
  CHECK(b.whisker_high == 8.0);
  CHECK(b.whisker_low == 1.0);
}

TEST_CASE("spectral summaries") {
  SUBCASE("three unit eigenvalues") {
    const std::vector<Spectrum> s{Spectrum{{cplx(1, 0), cplx(1, 0), cplx(1, 0)}}};
    const auto sum = summarize(s, 4, 3);
    for (double q : sum.modulus_quantiles()) CHECK(q == 1.0);
    for (double q : sum.argument_quantiles()) CHECK(q == 0.0);
    CHECK(sum.eigen_count == 3);
    CHECK(sum.zero_count == 0);
    CHECK(sum.epoch == 4);
  }
  SUBCASE("a conjugate pair") {
    const std::vector<Spectrum> s{Spectrum{{cplx(0, 1), cplx(0, -1)}}};
    const auto sum = summarize(s, 0, 2);
    CHECK(sum.modulus.q[2] == 1.0);
    CHECK(sum.argument.q[2] == doctest::Approx(std::numbers::pi / 2));
  }
  SUBCASE("zeros are excluded from argument statistics") {
    const std::vector<Spectrum> s{Spectrum{{cplx(0, 0), cplx(1e-13, 0), cplx(-1, 0)}}};
    const auto sum = summarize(s, 0, 3);
    CHECK(sum.zero_count == 2);
    CHECK(sum.eigen_count == 3);
    CHECK(sum.argument.q[0] == doctest::Approx(std::numbers::pi));
    CHECK(sum.modulus.q[0] == 0.0);
  }
  SUBCASE("uniform disc of radius 1/sqrt(3)") {
    CounterRng rng(11);
    const double radius = 1.0 / std::sqrt(3.0);
    std::vector<Spectrum> spectra(100);
    for (auto& sp : spectra)
      for (int i = 0; i < 10; ++i)
        sp.values.push_back(std::polar(radius * std::sqrt(rng.uniform()), rng.uniform(-std::numbers::pi, std::numbers::pi)));
    const auto sum = summarize(spectra, 0, 10);
    CHECK(sum.sample_points == 100);
    CHECK(sum.modulus.q[2] == doctest::Approx(radius / std::sqrt(2.0)).epsilon(0.05));
    CHECK(sum.argument.q[2] == doctest::Approx(std::numbers::pi / 2).epsilon(0.05));
  }
  CHECK_THROWS(summarize(std::vector<Spectrum>{}, 0, 2));
}

TEST_CASE("Kolmogorov-Smirnov statistic") {
  for (std::size_t n : {1u, 10u, 1000u}) {
    std::vector<double> s;
    for (std::size_t i = 1; i <= n; ++i) s.push_back((static_cast<double>(i) - 0.5) / static_cast<double>(n));
    CHECK(ks_statistic(s, uniform_cdf) == doctest::Approx(0.5 / static_cast<double>(n)));
  }
  CHECK(ks_statistic({0.5}, uniform_cdf) == 0.5);
  CHECK(ks_statistic({2.0, 3.0}, uniform_cdf) == 1.0);

  int below = 0;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    CounterRng rng(seed);
    std::vector<double> s(10000);
    for (double& x : s) x = rng.uniform();
    below += ks_statistic(s, uniform_cdf) < 0.025;

    // Invariant under a monotone change of variables applied to both sides.
    std::vector<double> cubed(s);
    for (double& x : cubed) x = x * x * x;
    CHECK(ks_statistic(cubed, [](double y) { return std::cbrt(std::clamp(y, 0.0, 1.0)); }) ==
          doctest::Approx(ks_statistic(s, uniform_cdf)).epsilon(1e-12));
  }
  CHECK(below >= 99);
}

TEST_CASE("empirical spectral distribution") {
  const EsdSample e{{cplx(1, 1), cplx(1, -1), cplx(-2, 0)}};
  CHECK(e.weight() == doctest::Approx(1.0 / 3.0));
  CHECK(esd_cdf(e, 0.0, 0.0) == doctest::Approx(1.0 / 3.0));
  CHECK(esd_cdf(e, 1.0, 0.0) == doctest::Approx(2.0 / 3.0));
  CHECK(esd_cdf(e, 1.0, 1.0) == doctest::Approx(1.0));
  CHECK(esd_cdf(e, -3.0, 5.0) == 0.0);
  CHECK(esd_cdf(EsdSample{}, 0.0, 0.0) == 0.0);

  // Conjugating every eigenvalue leaves moduli and folded arguments unchanged.
  EsdSample conj = e;
  for (auto& v : conj.values) v = std::conj(v);
  CHECK(conj.sq_moduli() == e.sq_moduli());
  CHECK(conj.folded_arguments() == e.folded_arguments());

  // Pooling is concatenation with uniform weight, independent of grouping.
  const std::vector<Spectrum> a{Spectrum{{cplx(1, 0)}}, Spectrum{{cplx(2, 0), cplx(3, 0)}}};
  const std::vector<Spectrum> b{Spectrum{{cplx(1, 0), cplx(2, 0), cplx(3, 0)}}};
  CHECK(EsdSample::pooled(a).values == EsdSample::pooled(b).values);
  CHECK(esd_cdf(EsdSample::pooled(a), 2.0, 0.0) == doctest::Approx(2.0 / 3.0));
  CHECK(EsdSample::pooled(a).real_parts() == std::vector<double>{1, 2, 3});
}

TEST_CASE("Spearman rank correlation") {
  const std::vector<double> x{2, 4, 8, 16};
  CHECK(spearman(x, std::vector<double>{9, 7, 3, 1}) == doctest::Approx(-1.0));
  CHECK(spearman(x, std::vector<double>{1, 2, 3, 100}) == doctest::Approx(1.0));
  CHECK(spearman(x, std::vector<double>{3, 4, 1, 2}) == doctest::Approx(-0.6));
  CHECK(spearman(x, std::vector<double>{1, 1, 1, 1}) == 0.0);
  CHECK_THROWS(spearman(x, std::vector<double>{1, 2}));
}
