#pragma once

#include <gmpxx.h>

#include <cstddef>
#include <initializer_list>
#include <string>
#include <vector>

#include "paramodular/error.hpp"

namespace paramodular {

using Int = mpz_class;
using Rat = mpq_class;
using IntVector = std::vector<Int>;
using RatVector = std::vector<Rat>;

// Dense row-major matrix over an exact ring (Int or Rat).
template <typename T>
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols) {}
  Matrix(std::initializer_list<std::initializer_list<long>> init);
  explicit Matrix(const std::vector<std::vector<T>>& grid);

  static Matrix identity(std::size_t n);
  static Matrix diagonal(const std::vector<T>& diag);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  bool empty() const { return rows_ == 0 || cols_ == 0; }
  bool square() const { return rows_ == cols_; }

  T& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  const T& operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  std::vector<T> row(std::size_t i) const;
  std::vector<T> col(std::size_t j) const;
  void set_row(std::size_t i, const std::vector<T>& values);
  void append_row(const std::vector<T>& values);

  Matrix transpose() const;
  Matrix block(std::size_t r0, std::size_t c0, std::size_t nr, std::size_t nc) const;
  void set_block(std::size_t r0, std::size_t c0, const Matrix& m);
  Matrix select_rows(const std::vector<std::size_t>& idx) const;

  bool is_zero() const;
  bool is_identity() const;

  Matrix operator*(const Matrix& other) const;
  Matrix operator+(const Matrix& other) const;
  Matrix operator-(const Matrix& other) const;
  Matrix operator-() const;
  Matrix scaled(const T& s) const;
  std::vector<T> left_apply(const std::vector<T>& v) const;  // v * M
  std::vector<T> apply(const std::vector<T>& v) const;       // M * v

  bool operator==(const Matrix& other) const = default;

  std::string to_string() const;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<T> data_;
};

using IntMatrix = Matrix<Int>;
using RatMatrix = Matrix<Rat>;

IntMatrix vstack(const IntMatrix& a, const IntMatrix& b);
RatMatrix vstack(const RatMatrix& a, const RatMatrix& b);
IntMatrix block_diagonal(const IntMatrix& a, const IntMatrix& b);
RatMatrix block_diagonal(const RatMatrix& a, const RatMatrix& b);

RatMatrix to_rational(const IntMatrix& m);
bool is_integral(const RatMatrix& m);
// Throws IntegralityViolation when an entry is not integral.
IntMatrix to_integer(const RatMatrix& m);
// Least common multiple of all entry denominators.
Int common_denominator(const RatMatrix& m);

Int determinant(const IntMatrix& m);
Rat determinant(const RatMatrix& m);

// Standard alternating Gram (0, T; -T, 0) for a diagonal T.
IntMatrix alternating_gram(const IntVector& divisors);
// (0, I; -I, 0) of size 2n.
IntMatrix standard_symplectic_form(std::size_t n);

Int gcd_of(const IntVector& v);
Int lcm_of(const IntVector& v);

}  // namespace paramodular
