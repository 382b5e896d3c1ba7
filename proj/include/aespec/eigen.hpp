#pragma once

#include <complex>
#include <cstddef>
#include <stdexcept>
#include <vector>

#include "aespec/matrix.hpp"

namespace aespec::linalg {

/// Multiset of eigenvalues of a real square matrix.
struct Spectrum {
  std::vector<std::complex<double>> values;

  std::size_t size() const { return values.size(); }
  std::vector<double> moduli() const;
  std::vector<double> arguments() const;  // atan2(im, re), in (-pi, pi]
  std::complex<double> sum() const;
  std::complex<double> product() const;
};

/// Raised when the shifted QR iteration exhausts its budget.
class ConvergenceError : public std::runtime_error {
 public:
  ConvergenceError(std::size_t unreduced_order, std::size_t iterations);
  /// Order of the active (not yet deflated) block when iteration stopped.
  std::size_t unreduced_order() const { return unreduced_order_; }
  std::size_t iterations() const { return iterations_; }

 private:
  std::size_t unreduced_order_;
  std::size_t iterations_;
};

struct EigenOptions {
  /// h(i+1,i) is negligible when |h(i+1,i)| <= deflation_tol * (|h(i,i)| + |h(i+1,i+1)|).
  double deflation_tol = 1e-14;
  std::size_t iterations_per_eigenvalue = 40;
};

/// Householder reduction to upper Hessenberg form (orthogonally similar to `a`).
/// Entries below the first subdiagonal are exactly zero.
Matrix hessenberg(const Matrix& a);

/// All eigenvalues with multiplicity, via Francis double-shift QR on the
/// Hessenberg form. Complex eigenvalues are emitted as adjacent conjugate pairs
/// (positive imaginary part first).
Spectrum eigenvalues(const Matrix& a, const EigenOptions& options = {});

/// True when every non-real value has a conjugate partner within `tol` on both components.
bool conjugate_closed(const Spectrum& s, double tol = 1e-9);

}  // namespace aespec::linalg
