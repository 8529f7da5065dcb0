#include "paramodular/matrix.hpp"

#include <numeric>
#include <sstream>

namespace paramodular {

const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::SingularMatrix: return "SingularMatrix";
    case ErrorCode::InvalidLevel: return "InvalidLevel";
    case ErrorCode::DegenerateForm: return "DegenerateForm";
    case ErrorCode::NotPrimitive: return "NotPrimitive";
    case ErrorCode::NotIsotropic: return "NotIsotropic";
    case ErrorCode::NonSquareFreeLevel: return "NonSquareFreeLevel";
    case ErrorCode::InvalidRank: return "InvalidRank";
    case ErrorCode::InadmissibleD: return "InadmissibleD";
    case ErrorCode::NotElementary: return "NotElementary";
    case ErrorCode::NotIsometric: return "NotIsometric";
    case ErrorCode::InvalidInvariant: return "InvalidInvariant";
    case ErrorCode::ScaleLimit: return "ScaleLimit";
    case ErrorCode::IncompatibleLocals: return "IncompatibleLocals";
    case ErrorCode::NotMaximal: return "NotMaximal";
    case ErrorCode::NotContainedInRadical: return "NotContainedInRadical";
    case ErrorCode::IntegralityViolation: return "IntegralityViolation";
    case ErrorCode::NotStabilizing: return "NotStabilizing";
    case ErrorCode::NotInHalfSpace: return "NotInHalfSpace";
    case ErrorCode::NotPositiveDefinite: return "NotPositiveDefinite";
    case ErrorCode::NotEven: return "NotEven";
    case ErrorCode::TailTooLarge: return "TailTooLarge";
    case ErrorCode::NotSupported: return "NotSupported";
    case ErrorCode::EmptyGenus: return "EmptyGenus";
    case ErrorCode::NotApplicable: return "NotApplicable";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
  }
  return "Unknown";
}

template <typename T>
Matrix<T>::Matrix(std::initializer_list<std::initializer_list<long>> init) {
  rows_ = init.size();
  cols_ = rows_ ? init.begin()->size() : 0;
  data_.reserve(rows_ * cols_);
  for (const auto& r : init) {
    if (r.size() != cols_) throw Error(ErrorCode::DimensionMismatch, "ragged initializer");
    for (long v : r) data_.emplace_back(v);
  }
}

template <typename T>
Matrix<T>::Matrix(const std::vector<std::vector<T>>& grid) {
  rows_ = grid.size();
  cols_ = rows_ ? grid.front().size() : 0;
  data_.reserve(rows_ * cols_);
  for (const auto& r : grid) {
    if (r.size() != cols_) throw Error(ErrorCode::DimensionMismatch, "ragged grid");
    data_.insert(data_.end(), r.begin(), r.end());
  }
}

template <typename T>
Matrix<T> Matrix<T>::identity(std::size_t n) {
  Matrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1;
  return m;
}

template <typename T>
Matrix<T> Matrix<T>::diagonal(const std::vector<T>& diag) {
  Matrix m(diag.size(), diag.size());
  for (std::size_t i = 0; i < diag.size(); ++i) m(i, i) = diag[i];
  return m;
}

template <typename T>
std::vector<T> Matrix<T>::row(std::size_t i) const {
  return std::vector<T>(data_.begin() + i * cols_, data_.begin() + (i + 1) * cols_);
}

template <typename T>
std::vector<T> Matrix<T>::col(std::size_t j) const {
  std::vector<T> out(rows_);
  for (std::size_t i = 0; i < rows_; ++i) out[i] = (*this)(i, j);
  return out;
}

template <typename T>
void Matrix<T>::set_row(std::size_t i, const std::vector<T>& values) {
  if (values.size() != cols_) throw Error(ErrorCode::DimensionMismatch, "set_row");
  std::copy(values.begin(), values.end(), data_.begin() + i * cols_);
}

template <typename T>
void Matrix<T>::append_row(const std::vector<T>& values) {
  if (rows_ == 0 && cols_ == 0) cols_ = values.size();
  if (values.size() != cols_) throw Error(ErrorCode::DimensionMismatch, "append_row");
  data_.insert(data_.end(), values.begin(), values.end());
  ++rows_;
}

template <typename T>
Matrix<T> Matrix<T>::transpose() const {
  Matrix t(cols_, rows_);
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
  return t;
}

template <typename T>
Matrix<T> Matrix<T>::block(std::size_t r0, std::size_t c0, std::size_t nr, std::size_t nc) const {
  if (r0 + nr > rows_ || c0 + nc > cols_) throw Error(ErrorCode::DimensionMismatch, "block");
  Matrix b(nr, nc);
  for (std::size_t i = 0; i < nr; ++i)
    for (std::size_t j = 0; j < nc; ++j) b(i, j) = (*this)(r0 + i, c0 + j);
  return b;
}

template <typename T>
void Matrix<T>::set_block(std::size_t r0, std::size_t c0, const Matrix& m) {
  if (r0 + m.rows_ > rows_ || c0 + m.cols_ > cols_)
    throw Error(ErrorCode::DimensionMismatch, "set_block");
  for (std::size_t i = 0; i < m.rows_; ++i)
    for (std::size_t j = 0; j < m.cols_; ++j) (*this)(r0 + i, c0 + j) = m(i, j);
}

template <typename T>
Matrix<T> Matrix<T>::select_rows(const std::vector<std::size_t>& idx) const {
  Matrix out(idx.size(), cols_);
  for (std::size_t k = 0; k < idx.size(); ++k) out.set_row(k, row(idx[k]));
  return out;
}

template <typename T>
bool Matrix<T>::is_zero() const {
  for (const auto& v : data_)
    if (v != 0) return false;
  return true;
}

template <typename T>
bool Matrix<T>::is_identity() const {
  if (!square()) return false;
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = 0; j < cols_; ++j)
      if ((*this)(i, j) != (i == j ? 1 : 0)) return false;
  return true;
}

template <typename T>
Matrix<T> Matrix<T>::operator*(const Matrix& other) const {
  if (cols_ != other.rows_) throw Error(ErrorCode::DimensionMismatch, "matrix product");
  Matrix out(rows_, other.cols_);
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t k = 0; k < cols_; ++k) {
      const T& a = (*this)(i, k);
      if (a == 0) continue;
      for (std::size_t j = 0; j < other.cols_; ++j) out(i, j) += a * other(k, j);
    }
  return out;
}

template <typename T>
Matrix<T> Matrix<T>::operator+(const Matrix& other) const {
  if (rows_ != other.rows_ || cols_ != other.cols_)
    throw Error(ErrorCode::DimensionMismatch, "matrix sum");
  Matrix out(*this);
  for (std::size_t i = 0; i < data_.size(); ++i) out.data_[i] += other.data_[i];
  return out;
}

template <typename T>
Matrix<T> Matrix<T>::operator-(const Matrix& other) const {
  return *this + (-other);
}

template <typename T>
Matrix<T> Matrix<T>::operator-() const {
  Matrix out(*this);
  for (auto& v : out.data_) v = -v;
  return out;
}

template <typename T>
Matrix<T> Matrix<T>::scaled(const T& s) const {
  Matrix out(*this);
  for (auto& v : out.data_) v *= s;
  return out;
}

template <typename T>
std::vector<T> Matrix<T>::left_apply(const std::vector<T>& v) const {
  if (v.size() != rows_) throw Error(ErrorCode::DimensionMismatch, "left_apply");
  std::vector<T> out(cols_);
  for (std::size_t i = 0; i < rows_; ++i) {
    if (v[i] == 0) continue;
    for (std::size_t j = 0; j < cols_; ++j) out[j] += v[i] * (*this)(i, j);
  }
  return out;
}

template <typename T>
std::vector<T> Matrix<T>::apply(const std::vector<T>& v) const {
  if (v.size() != cols_) throw Error(ErrorCode::DimensionMismatch, "apply");
  std::vector<T> out(rows_);
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = 0; j < cols_; ++j) out[i] += (*this)(i, j) * v[j];
  return out;
}

template <typename T>
std::string Matrix<T>::to_string() const {
  std::ostringstream os;
  os << "[";
  for (std::size_t i = 0; i < rows_; ++i) {
    os << (i ? ", [" : "[");
    for (std::size_t j = 0; j < cols_; ++j) os << (j ? ", " : "") << (*this)(i, j);
    os << "]";
  }
  os << "]";
  return os.str();
}

template class Matrix<Int>;
template class Matrix<Rat>;

namespace {
template <typename T>
Matrix<T> vstack_impl(const Matrix<T>& a, const Matrix<T>& b) {
  if (a.rows() == 0) return b;
  if (b.rows() == 0) return a;
  if (a.cols() != b.cols()) throw Error(ErrorCode::DimensionMismatch, "vstack");
  Matrix<T> out(a.rows() + b.rows(), a.cols());
  out.set_block(0, 0, a);
  out.set_block(a.rows(), 0, b);
  return out;
}

template <typename T>
Matrix<T> block_diag_impl(const Matrix<T>& a, const Matrix<T>& b) {
  Matrix<T> out(a.rows() + b.rows(), a.cols() + b.cols());
  out.set_block(0, 0, a);
  out.set_block(a.rows(), a.cols(), b);
  return out;
}
}  // namespace

IntMatrix vstack(const IntMatrix& a, const IntMatrix& b) { return vstack_impl(a, b); }
RatMatrix vstack(const RatMatrix& a, const RatMatrix& b) { return vstack_impl(a, b); }
IntMatrix block_diagonal(const IntMatrix& a, const IntMatrix& b) { return block_diag_impl(a, b); }
RatMatrix block_diagonal(const RatMatrix& a, const RatMatrix& b) { return block_diag_impl(a, b); }

RatMatrix to_rational(const IntMatrix& m) {
  RatMatrix out(m.rows(), m.cols());
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) out(i, j) = Rat(m(i, j));
  return out;
}

bool is_integral(const RatMatrix& m) {
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j)
      if (m(i, j).get_den() != 1) return false;
  return true;
}

IntMatrix to_integer(const RatMatrix& m) {
  IntMatrix out(m.rows(), m.cols());
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) {
      if (m(i, j).get_den() != 1)
        throw Error(ErrorCode::IntegralityViolation, "non-integral entry " + m(i, j).get_str());
      out(i, j) = m(i, j).get_num();
    }
  return out;
}

Int common_denominator(const RatMatrix& m) {
  Int c = 1;
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) {
      Int d = m(i, j).get_den();
      mpz_lcm(c.get_mpz_t(), c.get_mpz_t(), d.get_mpz_t());
    }
  return c;
}

Int determinant(const IntMatrix& m) {
  if (!m.square()) throw Error(ErrorCode::DimensionMismatch, "determinant of non-square matrix");
  // Bareiss fraction-free elimination.
  const std::size_t n = m.rows();
  if (n == 0) return 1;
  IntMatrix a = m;
  Int prev = 1;
  int sign = 1;
  for (std::size_t k = 0; k + 1 < n; ++k) {
    if (a(k, k) == 0) {
      std::size_t s = k + 1;
      while (s < n && a(s, k) == 0) ++s;
      if (s == n) return 0;
      for (std::size_t j = 0; j < n; ++j) std::swap(a(k, j), a(s, j));
      sign = -sign;
    }
    for (std::size_t i = k + 1; i < n; ++i)
      for (std::size_t j = k + 1; j < n; ++j) {
        Int v = a(i, j) * a(k, k) - a(i, k) * a(k, j);
        mpz_divexact(a(i, j).get_mpz_t(), v.get_mpz_t(), prev.get_mpz_t());
      }
    prev = a(k, k);
  }
  return sign * a(n - 1, n - 1);
}

Rat determinant(const RatMatrix& m) {
  if (!m.square()) throw Error(ErrorCode::DimensionMismatch, "determinant of non-square matrix");
  const std::size_t n = m.rows();
  RatMatrix a = m;
  Rat det = 1;
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t p = k;
    while (p < n && a(p, k) == 0) ++p;
    if (p == n) return 0;
    if (p != k) {
      for (std::size_t j = 0; j < n; ++j) std::swap(a(k, j), a(p, j));
      det = -det;
    }
    det *= a(k, k);
    for (std::size_t i = k + 1; i < n; ++i) {
      if (a(i, k) == 0) continue;
      Rat f = a(i, k) / a(k, k);
      for (std::size_t j = k; j < n; ++j) a(i, j) -= f * a(k, j);
    }
  }
  return det;
}

IntMatrix alternating_gram(const IntVector& divisors) {
  const std::size_t m = divisors.size();
  IntMatrix g(2 * m, 2 * m);
  for (std::size_t i = 0; i < m; ++i) {
    g(i, m + i) = divisors[i];
    g(m + i, i) = -divisors[i];
  }
  return g;
}

IntMatrix standard_symplectic_form(std::size_t n) {
  return alternating_gram(IntVector(n, Int(1)));
}

Int gcd_of(const IntVector& v) {
  Int g = 0;
  for (const auto& x : v) mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), x.get_mpz_t());
  return g;
}

Int lcm_of(const IntVector& v) {
  Int l = 1;
  for (const auto& x : v) mpz_lcm(l.get_mpz_t(), l.get_mpz_t(), x.get_mpz_t());
  return l;
}

}  // namespace paramodular
