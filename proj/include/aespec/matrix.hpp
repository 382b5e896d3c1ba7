#pragma once

#include <cstddef>
#include <initializer_list>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace aespec::linalg {

/// Raised when operand shapes do not compose.
class ShapeError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Dense row-major matrix of doubles.
///
/// Entries are finite on construction from external data; arithmetic on
/// finite inputs may still overflow, which callers check where it matters.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols);
  Matrix(std::size_t rows, std::size_t cols, std::vector<double> entries);
  Matrix(std::initializer_list<std::initializer_list<double>> rows);

  static Matrix identity(std::size_t n);
  static Matrix diagonal(std::span<const double> diag);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  bool square() const { return rows_ == cols_; }
  bool empty() const { return data_.empty(); }

  double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  std::span<double> row(std::size_t i) { return {data_.data() + i * cols_, cols_}; }
  std::span<const double> row(std::size_t i) const { return {data_.data() + i * cols_, cols_}; }

  std::span<const double> data() const { return data_; }
  std::span<double> data() { return data_; }

  std::string shape_string() const;

  bool operator==(const Matrix&) const = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

Matrix matmul(const Matrix& a, const Matrix& b);
Matrix transpose(const Matrix& a);
Matrix scale(const Matrix& a, double alpha);
Matrix add(const Matrix& a, const Matrix& b);

/// y = A x
std::vector<double> matvec(const Matrix& a, std::span<const double> x);

/// Multiplies row i of `a` by diag[i] in place.
void scale_rows(Matrix& a, std::span<const double> diag);

double trace(const Matrix& a);

/// LU with partial pivoting; exact zero pivot yields 0.
double determinant(const Matrix& a);

/// Max absolute entrywise difference; shapes must agree.
double max_abs_diff(const Matrix& a, const Matrix& b);

/// Orthogonal factor of a Householder QR factorization of a square matrix.
Matrix orthogonal_factor(const Matrix& a);

}  // namespace aespec::linalg
