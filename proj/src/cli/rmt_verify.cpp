#include <cmath>
#include <cstdio>
#include <map>
#include <numbers>
#include <sstream>

#include "aespec/cli.hpp"
#include "aespec/rmt.hpp"

namespace aespec::cli {

namespace {

const double kDiscRadius = 1.0 / std::sqrt(3.0);

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

std::string opt(const std::optional<double>& v) { return v ? fmt(*v) : std::string(); }

double mean(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

rmt::ChainSpec chain_for(std::size_t n) { return rmt::ChainSpec({n, 2 * n}); }

// One draw of one case, with everything the row and the summary checks need.
struct Draw {
  RmtRow row;
  linalg::Spectrum spectrum;
};

Draw run_one(const RmtCase& c, std::uint64_t seed) {
  Draw d;
  d.row.law = c.law;
  d.row.n = c.n;
  d.row.seed = seed;
  if (c.law == "semicircle") {
    d.spectrum = rmt::sample_semicircle(c.n, seed).spectrum;
    d.row.ks_real = spectra::ks_statistic(spectra::EsdSample::from(d.spectrum).real_parts(), rmt::semicircle_cdf);
  } else if (c.law == "circular") {
    d.spectrum = rmt::sample_circular(c.n, seed).spectrum;
    const auto esd = spectra::EsdSample::from(d.spectrum);
    const auto sq = esd.sq_moduli();
    d.row.ks_sq_modulus = spectra::ks_statistic(sq, [](double s) { return rmt::disc_sq_modulus_cdf(kDiscRadius, s); });
    d.row.ks_argument = spectra::ks_statistic(esd.folded_arguments(), [](double a) { return a / std::numbers::pi; });
    d.row.radius_estimate = std::sqrt(2.0 * mean(sq));
    double outside = 0.0;
    for (auto v : d.spectrum.values) outside += std::abs(v) > kDiscRadius + 0.05;
    d.row.frac_outside = outside / static_cast<double>(d.spectrum.size());
  } else if (c.law == "product2" || c.law == "product3") {
    const std::size_t m = c.law == "product2" ? 2 : 3;
    d.spectrum = rmt::sample_square_product(m, c.n, seed).spectrum;
    d.row.ks_sq_modulus = spectra::ks_statistic(spectra::EsdSample::from(d.spectrum).sq_moduli(),
                                                [m](double s) { return rmt::product_law_sq_modulus_cdf(m, s); });
  } else if (c.law == "chain") {
    const auto spec = chain_for(c.n);
    d.spectrum = rmt::sample_rect_chain(spec, seed).spectrum;
    d.row.ks_sq_modulus = spectra::ks_statistic(spectra::EsdSample::from(d.spectrum).sq_moduli(),
                                                [&](double s) { return rmt::rect_chain_sq_modulus_cdf(spec, s); });
  } else {
    throw UsageError("unknown law '" + c.law + "'");
  }
  return d;
}

RmtCheck upper(const RmtCase& c, const std::string& metric, double value, double threshold) {
  return {c.law, c.n, c.seeds, metric, value, threshold, true, value < threshold};
}

}  // namespace

const std::vector<std::string>& rmt_laws() {
  static const std::vector<std::string> laws{"semicircle", "circular", "product2", "product3", "chain"};
  return laws;
}

std::vector<RmtCase> default_rmt_cases() {
  return {{"semicircle", 128, 10}, {"semicircle", 256, 10}, {"semicircle", 512, 10}, {"circular", 512, 10},
          {"product2", 256, 10},   {"product3", 256, 10},   {"chain", 8, 50}};
}

bool RmtReport::passed() const {
  for (const auto& c : checks)
    if (!c.pass) return false;
  return true;
}

std::string RmtReport::rows_csv() const {
  std::ostringstream os;
  os << "law,n,seed,ks_sq_modulus,ks_argument,ks_real,radius_estimate,frac_outside\n";
  for (const auto& r : rows) {
    os << r.law << ',' << r.n << ',' << r.seed << ',' << opt(r.ks_sq_modulus) << ',' << opt(r.ks_argument) << ','
       << opt(r.ks_real) << ',' << opt(r.radius_estimate) << ',' << opt(r.frac_outside) << '\n';
  }
  return os.str();
}

std::string RmtReport::checks_csv() const {
  std::ostringstream os;
  os << "law,n,seeds,metric,value,threshold,pass\n";
  for (const auto& c : checks) {
    os << c.law << ',' << c.n << ',' << c.seeds << ',' << c.metric << ',' << fmt(c.value) << ',' << fmt(c.threshold)
       << ',' << (c.pass ? "PASS" : "FAIL") << '\n';
  }
  return os.str();
}

std::string RmtReport::scatter_csv() const {
  std::ostringstream os;
  os << "re,im\n";
  for (auto v : circular_scatter) os << fmt(v.real()) << ',' << fmt(v.imag()) << '\n';
  return os.str();
}

RmtReport run_rmt_suite(const std::vector<RmtCase>& cases, std::size_t workers) {
  struct Task {
    std::size_t case_index;
    std::uint64_t seed;
  };
  std::vector<Task> tasks;
  for (std::size_t i = 0; i < cases.size(); ++i) {
    const auto& laws = rmt_laws();
    if (std::find(laws.begin(), laws.end(), cases[i].law) == laws.end()) {
      throw UsageError("unknown law '" + cases[i].law + "'");
    }
    if (cases[i].seeds == 0 || cases[i].n == 0) throw UsageError("law " + cases[i].law + " needs n > 0 and seeds > 0");
    for (std::uint64_t s = 0; s < cases[i].seeds; ++s) tasks.push_back({i, s});
  }
  std::vector<Draw> draws(tasks.size());
  parallel_for(tasks.size(), workers, [&](std::size_t t) { draws[t] = run_one(cases[tasks[t].case_index], tasks[t].seed); });

  RmtReport report;
  std::size_t t = 0;
  for (const auto& c : cases) {
    std::vector<Draw> mine(draws.begin() + static_cast<std::ptrdiff_t>(t),
                           draws.begin() + static_cast<std::ptrdiff_t>(t + c.seeds));
    t += c.seeds;
    auto collect = [&](std::optional<double> RmtRow::*field) {
      std::vector<double> v;
      for (const auto& d : mine) v.push_back(*(d.row.*field));
      return v;
    };
    for (const auto& d : mine) report.rows.push_back(d.row);

    if (c.law == "semicircle") {
      report.checks.push_back(upper(c, "mean_ks_real", mean(collect(&RmtRow::ks_real)), 0.05));
    } else if (c.law == "circular") {
      if (report.circular_scatter.empty()) report.circular_scatter = mine.front().spectrum.values;
      report.checks.push_back(upper(c, "mean_ks_sq_modulus", mean(collect(&RmtRow::ks_sq_modulus)), 0.05));
      report.checks.push_back(upper(c, "mean_ks_argument", mean(collect(&RmtRow::ks_argument)), 0.05));
      report.checks.push_back(upper(c, "mean_frac_outside", mean(collect(&RmtRow::frac_outside)), 0.02 + 1e-12));
      const double r = mean(collect(&RmtRow::radius_estimate));
      report.checks.push_back(
          {c.law, c.n, c.seeds, "radius_estimate", r, kDiscRadius, false, std::abs(r - kDiscRadius) <= 0.05 * kDiscRadius});
    } else if (c.law == "chain") {
      // Compared through the seed-averaged (pooled) ESD: with n1 eigenvalues per
      // draw a single draw's ESD is far too coarse for a KS test.
      std::vector<linalg::Spectrum> all;
      for (const auto& d : mine) all.push_back(d.spectrum);
      const auto spec = chain_for(c.n);
      const double ks = spectra::ks_statistic(spectra::EsdSample::pooled(all).sq_moduli(),
                                              [&](double s) { return rmt::rect_chain_sq_modulus_cdf(spec, s); });
      report.checks.push_back(upper(c, "pooled_ks_sq_modulus", ks, 0.12));
    } else {
      report.checks.push_back(upper(c, "mean_ks_sq_modulus", mean(collect(&RmtRow::ks_sq_modulus)), 0.08));
    }
  }
  return report;
}

std::vector<PredictionRow> prediction_table(std::size_t first, std::size_t last) {
  std::vector<PredictionRow> rows;
  for (std::size_t n1 = first; n1 <= last; ++n1) {
    const auto spec = rmt::ChainSpec::autoencoder_latent(n1);
    PredictionRow r;
    r.n1 = n1;
    r.median_sq = rmt::predicted_sq_modulus(spec, 0.5);
    r.max_sq = rmt::predicted_sq_modulus(spec, 1.0);
    const auto stats = rmt::predicted_modulus_stats(spec);
    r.median_norm = stats.median;
    r.max_norm = stats.max;
    rows.push_back(r);
  }
  return rows;
}

std::string prediction_csv(const std::vector<PredictionRow>& rows) {
  std::ostringstream os;
  os << "n1,median_sq,max_sq,median_norm,max_norm\n";
  for (const auto& r : rows) {
    os << r.n1 << ',' << fmt(r.median_sq) << ',' << fmt(r.max_sq) << ',' << fmt(r.median_norm) << ','
       << fmt(r.max_norm) << '\n';
  }
  return os.str();
}

}  // namespace aespec::cli
