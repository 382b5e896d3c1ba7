#include "aespec/eigen.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace aespec::linalg {

std::vector<double> Spectrum::moduli() const {
  std::vector<double> out;
  out.reserve(values.size());
  for (const auto& v : values) out.push_back(std::abs(v));
  return out;
}

std::vector<double> Spectrum::arguments() const {
  std::vector<double> out;
  out.reserve(values.size());
  for (const auto& v : values) out.push_back(std::arg(v));
  return out;
}

std::complex<double> Spectrum::sum() const {
  std::complex<double> s = 0.0;
  for (const auto& v : values) s += v;
  return s;
}

std::complex<double> Spectrum::product() const {
  std::complex<double> p = 1.0;
  for (const auto& v : values) p *= v;
  return p;
}

ConvergenceError::ConvergenceError(std::size_t unreduced_order, std::size_t iterations)
    : std::runtime_error("QR iteration did not converge after " + std::to_string(iterations) +
                         " iterations; unreduced block of order " + std::to_string(unreduced_order)),
      unreduced_order_(unreduced_order),
      iterations_(iterations) {}

Matrix hessenberg(const Matrix& a) {
  if (!a.square()) throw ShapeError("hessenberg: " + a.shape_string() + " is not square");
  const std::size_t n = a.rows();
  Matrix h = a;
  std::vector<double> v(n);
  for (std::size_t k = 0; k + 2 < n; ++k) {
    double norm = 0.0;
    for (std::size_t i = k + 1; i < n; ++i) norm += h(i, k) * h(i, k);
    norm = std::sqrt(norm);
    if (norm == 0.0) continue;
    const double alpha = h(k + 1, k) > 0 ? -norm : norm;
    double vnorm2 = 0.0;
    for (std::size_t i = k + 1; i < n; ++i) {
      v[i] = h(i, k) - (i == k + 1 ? alpha : 0.0);
      vnorm2 += v[i] * v[i];
    }
    if (vnorm2 == 0.0) continue;

    // H <- P H with P = I - 2vv^T/|v|^2 acting on rows k+1..n-1.
    std::vector<double> w(n, 0.0);
    for (std::size_t i = k + 1; i < n; ++i) {
      const double vi = v[i];
      auto r = h.row(i);
      for (std::size_t j = k; j < n; ++j) w[j] += vi * r[j];
    }
    for (std::size_t i = k + 1; i < n; ++i) {
      const double f = 2.0 * v[i] / vnorm2;
      auto r = h.row(i);
      for (std::size_t j = k; j < n; ++j) r[j] -= f * w[j];
    }
    // H <- H P acting on columns k+1..n-1.
    for (std::size_t i = 0; i < n; ++i) {
      auto r = h.row(i);
      double dot = 0.0;
      for (std::size_t j = k + 1; j < n; ++j) dot += r[j] * v[j];
      const double f = 2.0 * dot / vnorm2;
      for (std::size_t j = k + 1; j < n; ++j) r[j] -= f * v[j];
    }
    h(k + 1, k) = alpha;
    for (std::size_t i = k + 2; i < n; ++i) h(i, k) = 0.0;
  }
  return h;
}

namespace {

double sign_of(double magnitude, double s) { return s >= 0.0 ? std::abs(magnitude) : -std::abs(magnitude); }

// Francis double-shift QR on an upper Hessenberg matrix, eigenvalues only.
// Follows the classical EISPACK hqr structure: deflate from the bottom,
// extract 1x1 real roots and 2x2 blocks in closed form.
Spectrum hessenberg_qr(Matrix a, const EigenOptions& opt) {
  const int n = static_cast<int>(a.rows());
  std::vector<double> wr(n, 0.0), wi(n, 0.0);
  constexpr double eps = std::numeric_limits<double>::epsilon();

  double anorm = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = std::max(i - 1, 0); j < n; ++j) anorm += std::abs(a(i, j));
  // Subdiagonals at round-off level relative to the whole matrix carry no
  // information; without this floor a cluster of exact zeros never deflates.
  const double absolute_floor = eps * anorm;

  const std::size_t total_budget = opt.iterations_per_eigenvalue * static_cast<std::size_t>(n);
  std::size_t total_its = 0;

  int nn = n - 1;
  double t = 0.0;  // accumulated exceptional shifts
  while (nn >= 0) {
    int its = 0;
    for (;;) {
      int l = nn;
      for (; l >= 1; --l) {
        double s = std::abs(a(l - 1, l - 1)) + std::abs(a(l, l));
        if (s == 0.0) s = anorm;
        const double sub = std::abs(a(l, l - 1));
        if (sub <= opt.deflation_tol * s || sub <= absolute_floor) {
          a(l, l - 1) = 0.0;
          break;
        }
      }
      double x = a(nn, nn);
      if (l == nn) {
        wr[nn] = x + t;
        wi[nn] = 0.0;
        --nn;
        break;
      }
      double y = a(nn - 1, nn - 1);
      double w = a(nn, nn - 1) * a(nn - 1, nn);
      if (l == nn - 1) {
        const double p = 0.5 * (y - x);
        const double q = p * p + w;
        double z = std::sqrt(std::abs(q));
        x += t;
        if (q >= 0.0) {
          z = p + sign_of(z, p);
          wr[nn - 1] = wr[nn] = x + z;
          if (z != 0.0) wr[nn] = x - w / z;
          wi[nn - 1] = wi[nn] = 0.0;
        } else {
          wr[nn - 1] = wr[nn] = x + p;
          wi[nn - 1] = z;
          wi[nn] = -z;
        }
        nn -= 2;
        break;
      }

      if (its >= static_cast<int>(opt.iterations_per_eigenvalue) || total_its >= total_budget) {
        throw ConvergenceError(static_cast<std::size_t>(nn - l + 1), total_its);
      }
      if (its == 10 || its == 20) {
        t += x;
        for (int i = 0; i <= nn; ++i) a(i, i) -= x;
        const double s = std::abs(a(nn, nn - 1)) + std::abs(a(nn - 1, nn - 2));
        y = x = 0.75 * s;
        w = -0.4375 * s * s;
      }
      ++its;
      ++total_its;

      // Find two consecutive small subdiagonals to start the bulge.
      int m = nn - 2;
      double p = 0.0, q = 0.0, r = 0.0, z = 0.0;
      for (; m >= l; --m) {
        z = a(m, m);
        r = x - z;
        double s = y - z;
        p = (r * s - w) / a(m + 1, m) + a(m, m + 1);
        q = a(m + 1, m + 1) - z - r - s;
        r = a(m + 2, m + 1);
        s = std::abs(p) + std::abs(q) + std::abs(r);
        p /= s;
        q /= s;
        r /= s;
        if (m == l) break;
        const double u = std::abs(a(m, m - 1)) * (std::abs(q) + std::abs(r));
        const double v = std::abs(p) * (std::abs(a(m - 1, m - 1)) + std::abs(z) + std::abs(a(m + 1, m + 1)));
        if (u <= eps * v) break;
      }
      for (int i = m + 2; i <= nn; ++i) {
        a(i, i - 2) = 0.0;
        if (i != m + 2) a(i, i - 3) = 0.0;
      }

      // Chase the bulge with 3-element Householder reflectors.
      for (int k = m; k <= nn - 1; ++k) {
        if (k != m) {
          p = a(k, k - 1);
          q = a(k + 1, k - 1);
          r = (k != nn - 1) ? a(k + 2, k - 1) : 0.0;
          x = std::abs(p) + std::abs(q) + std::abs(r);
          if (x != 0.0) {
            p /= x;
            q /= x;
            r /= x;
          }
        }
        const double s = sign_of(std::sqrt(p * p + q * q + r * r), p);
        if (s == 0.0) continue;
        if (k == m) {
          if (l != m) a(k, k - 1) = -a(k, k - 1);
        } else {
          a(k, k - 1) = -s * x;
        }
        p += s;
        x = p / s;
        y = q / s;
        z = r / s;
        q /= p;
        r /= p;
        for (int j = k; j <= nn; ++j) {
          double pj = a(k, j) + q * a(k + 1, j);
          if (k != nn - 1) {
            pj += r * a(k + 2, j);
            a(k + 2, j) -= pj * z;
          }
          a(k + 1, j) -= pj * y;
          a(k, j) -= pj * x;
        }
        const int mmin = nn < k + 3 ? nn : k + 3;
        for (int i = l; i <= mmin; ++i) {
          double pi = x * a(i, k) + y * a(i, k + 1);
          if (k != nn - 1) {
            pi += z * a(i, k + 2);
            a(i, k + 2) -= pi * r;
          }
          a(i, k + 1) -= pi * q;
          a(i, k) -= pi;
        }
      }
    }
  }

  Spectrum out;
  out.values.reserve(n);
  for (int i = 0; i < n; ++i) out.values.emplace_back(wr[i], wi[i]);
  return out;
}

}  // namespace

Spectrum eigenvalues(const Matrix& a, const EigenOptions& options) {
  if (!a.square() || a.rows() == 0) {
    throw ShapeError("eigenvalues: need a non-empty square matrix, got " + a.shape_string());
  }
  if (a.rows() == 1) return Spectrum{{std::complex<double>(a(0, 0), 0.0)}};
  return hessenberg_qr(hessenberg(a), options);
}

bool conjugate_closed(const Spectrum& s, double tol) {
  std::vector<bool> used(s.size(), false);
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (used[i] || s.values[i].imag() == 0.0) continue;
    bool found = false;
    for (std::size_t j = 0; j < s.size(); ++j) {
      if (j == i || used[j]) continue;
      if (std::abs(s.values[j].real() - s.values[i].real()) <= tol &&
          std::abs(s.values[j].imag() + s.values[i].imag()) <= tol) {
        used[i] = used[j] = true;
        found = true;
        break;
      }
    }
    if (!found) return false;
  }
  return true;
}

}  // namespace aespec::linalg
