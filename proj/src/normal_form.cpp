#include "paramodular/normal_form.hpp"

#include <algorithm>

namespace paramodular {

namespace {

void swap_rows(IntMatrix& a, std::size_t i, std::size_t j) {
  if (i == j) return;
  for (std::size_t c = 0; c < a.cols(); ++c) std::swap(a(i, c), a(j, c));
}

void swap_cols(IntMatrix& a, std::size_t i, std::size_t j) {
  if (i == j) return;
  for (std::size_t r = 0; r < a.rows(); ++r) std::swap(a(r, i), a(r, j));
}

// row_i -= q * row_j
void sub_row(IntMatrix& a, std::size_t i, std::size_t j, const Int& q) {
  if (q == 0) return;
  for (std::size_t c = 0; c < a.cols(); ++c)
    if (a(j, c) != 0) mpz_submul(a(i, c).get_mpz_t(), q.get_mpz_t(), a(j, c).get_mpz_t());
}

// col_i -= q * col_j
void sub_col(IntMatrix& a, std::size_t i, std::size_t j, const Int& q) {
  if (q == 0) return;
  for (std::size_t r = 0; r < a.rows(); ++r)
    if (a(r, j) != 0) mpz_submul(a(r, i).get_mpz_t(), q.get_mpz_t(), a(r, j).get_mpz_t());
}

void negate_row(IntMatrix& a, std::size_t i) {
  for (std::size_t c = 0; c < a.cols(); ++c) a(i, c) = -a(i, c);
}

Int floor_div(const Int& a, const Int& b) {
  Int q;
  mpz_fdiv_q(q.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
  return q;
}

Int trunc_div(const Int& a, const Int& b) {
  Int q;
  mpz_tdiv_q(q.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
  return q;
}

template <bool Track>
SmithForm smith_impl(const IntMatrix& input) {
  const std::size_t m = input.rows(), n = input.cols();
  SmithForm out{Track ? IntMatrix::identity(m) : IntMatrix(), input,
                Track ? IntMatrix::identity(n) : IntMatrix()};
  IntMatrix& a = out.D;
  const std::size_t steps = std::min(m, n);
  for (std::size_t t = 0; t < steps; ++t) {
    while (true) {
      // Pivot: smallest nonzero absolute value in the trailing block.
      bool found = false;
      std::size_t pi = t, pj = t;
      Int best;
      for (std::size_t i = t; i < m; ++i)
        for (std::size_t j = t; j < n; ++j)
          if (a(i, j) != 0 && (!found || abs(a(i, j)) < best)) {
            best = abs(a(i, j));
            pi = i;
            pj = j;
            found = true;
          }
      if (!found) return out;
      swap_rows(a, t, pi);
      swap_cols(a, t, pj);
      if constexpr (Track) {
        swap_rows(out.U, t, pi);
        swap_cols(out.V, t, pj);
      }
      bool clean = true;
      for (std::size_t i = t + 1; i < m; ++i) {
        if (a(i, t) == 0) continue;
        Int q = trunc_div(a(i, t), a(t, t));
        sub_row(a, i, t, q);
        if constexpr (Track) sub_row(out.U, i, t, q);
        if (a(i, t) != 0) clean = false;
      }
      for (std::size_t j = t + 1; j < n; ++j) {
        if (a(t, j) == 0) continue;
        Int q = trunc_div(a(t, j), a(t, t));
        sub_col(a, j, t, q);
        if constexpr (Track) sub_col(out.V, j, t, q);
        if (a(t, j) != 0) clean = false;
      }
      if (!clean) continue;
      // Divisibility: fold an offending row into the pivot row and retry.
      bool divisible = true;
      for (std::size_t i = t + 1; i < m && divisible; ++i)
        for (std::size_t j = t + 1; j < n; ++j)
          if (!mpz_divisible_p(a(i, j).get_mpz_t(), a(t, t).get_mpz_t())) {
            sub_row(a, t, i, Int(-1));
            if constexpr (Track) sub_row(out.U, t, i, Int(-1));
            divisible = false;
            break;
          }
      if (divisible) break;
    }
    if (a(t, t) < 0) {
      negate_row(a, t);
      if constexpr (Track) negate_row(out.U, t);
    }
  }
  return out;
}

}  // namespace

SmithForm smith_normal_form(const IntMatrix& a) { return smith_impl<true>(a); }

IntVector elementary_divisors(const IntMatrix& a) {
  SmithForm s = smith_impl<false>(a);
  IntVector d;
  for (std::size_t i = 0; i < std::min(a.rows(), a.cols()); ++i) d.push_back(s.D(i, i));
  return d;
}

HermiteForm hermite_normal_form(const IntMatrix& input) {
  const std::size_t m = input.rows(), n = input.cols();
  HermiteForm out{input, IntMatrix::identity(m), 0};
  IntMatrix& a = out.H;
  std::size_t r = 0;
  for (std::size_t j = 0; j < n && r < m; ++j) {
    while (true) {
      std::size_t pivot = m;
      for (std::size_t i = r; i < m; ++i)
        if (a(i, j) != 0 && (pivot == m || abs(a(i, j)) < abs(a(pivot, j)))) pivot = i;
      if (pivot == m) break;
      swap_rows(a, r, pivot);
      swap_rows(out.U, r, pivot);
      bool done = true;
      for (std::size_t i = r + 1; i < m; ++i) {
        if (a(i, j) == 0) continue;
        Int q = floor_div(a(i, j), a(r, j));
        sub_row(a, i, r, q);
        sub_row(out.U, i, r, q);
        if (a(i, j) != 0) done = false;
      }
      if (done) break;
    }
    if (r >= m || a(r, j) == 0) continue;
    if (a(r, j) < 0) {
      negate_row(a, r);
      negate_row(out.U, r);
    }
    for (std::size_t i = 0; i < r; ++i) {
      Int q = floor_div(a(i, j), a(r, j));
      sub_row(a, i, r, q);
      sub_row(out.U, i, r, q);
    }
    ++r;
  }
  out.rank = r;
  return out;
}

IntMatrix row_basis(const IntMatrix& generators) {
  if (generators.rows() == 0) return IntMatrix(0, generators.cols());
  HermiteForm h = hermite_normal_form(generators);
  return h.H.block(0, 0, h.rank, generators.cols());
}

RatMatrix rational_inverse(const RatMatrix& input) {
  if (!input.square()) throw Error(ErrorCode::DimensionMismatch, "inverse of non-square matrix");
  const std::size_t n = input.rows();
  RatMatrix a = input;
  RatMatrix inv = RatMatrix::identity(n);
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t p = k;
    while (p < n && a(p, k) == 0) ++p;
    if (p == n) throw Error(ErrorCode::SingularMatrix, "matrix is singular");
    if (p != k)
      for (std::size_t j = 0; j < n; ++j) {
        std::swap(a(k, j), a(p, j));
        std::swap(inv(k, j), inv(p, j));
      }
    Rat piv = a(k, k);
    for (std::size_t j = 0; j < n; ++j) {
      a(k, j) /= piv;
      inv(k, j) /= piv;
    }
    for (std::size_t i = 0; i < n; ++i) {
      if (i == k || a(i, k) == 0) continue;
      Rat f = a(i, k);
      for (std::size_t j = 0; j < n; ++j) {
        a(i, j) -= f * a(k, j);
        inv(i, j) -= f * inv(k, j);
      }
    }
  }
  return inv;
}

RatMatrix rational_inverse(const IntMatrix& a) { return rational_inverse(to_rational(a)); }

bool is_symplectic(const RatMatrix& g, const IntMatrix& form) {
  if (!g.square() || !form.square() || g.rows() != form.rows() || g.rows() % 2 != 0)
    throw Error(ErrorCode::DimensionMismatch, "is_symplectic");
  RatMatrix j = to_rational(form);
  return g.transpose() * j * g == j;
}

IntMatrix left_kernel(const IntMatrix& a) {
  HermiteForm h = hermite_normal_form(a);
  IntMatrix k(a.rows() - h.rank, a.rows());
  for (std::size_t i = h.rank; i < a.rows(); ++i) k.set_row(i - h.rank, h.U.row(i));
  return row_basis(k);
}

IntMatrix saturate(const IntMatrix& generators) {
  if (generators.rows() == 0) return IntMatrix(0, generators.cols());
  IntMatrix right = left_kernel(generators.transpose());
  if (right.rows() == 0) return IntMatrix::identity(generators.cols());
  return left_kernel(right.transpose());
}

std::optional<IntVector> solve_left(const IntMatrix& a, const IntVector& b) {
  if (b.size() != a.cols()) throw Error(ErrorCode::DimensionMismatch, "solve_left");
  HermiteForm h = hermite_normal_form(a);
  IntVector rest = b;
  IntVector c(a.rows());
  std::size_t col = 0;
  for (std::size_t i = 0; i < h.rank; ++i) {
    while (h.H(i, col) == 0) {
      if (rest[col] != 0) return std::nullopt;
      ++col;
    }
    if (!mpz_divisible_p(rest[col].get_mpz_t(), h.H(i, col).get_mpz_t())) return std::nullopt;
    c[i] = rest[col] / h.H(i, col);
    for (std::size_t j = col; j < a.cols(); ++j) rest[j] -= c[i] * h.H(i, j);
  }
  for (const auto& v : rest)
    if (v != 0) return std::nullopt;
  return h.U.left_apply(c);
}

RatLattice::RatLattice(const RatMatrix& generators) { canonicalize(generators); }
RatLattice::RatLattice(const IntMatrix& generators) { canonicalize(to_rational(generators)); }

void RatLattice::canonicalize(const RatMatrix& generators) {
  dim_ = generators.cols();
  denom_ = common_denominator(generators);
  hnf_ = row_basis(to_integer(generators.scaled(Rat(denom_))));
  if (hnf_.rows() == 0) denom_ = 1;
  key_ = denom_.get_str() + "|";
  for (std::size_t i = 0; i < hnf_.rows(); ++i)
    for (std::size_t j = 0; j < hnf_.cols(); ++j) {
      key_ += hnf_(i, j).get_str();
      key_ += ',';
    }
}

RatMatrix RatLattice::basis() const { return to_rational(hnf_).scaled(Rat(1, 1) / Rat(denom_)); }

bool RatLattice::contains(const RatVector& v) const {
  IntVector scaled(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    Rat s = v[i] * Rat(denom_);
    if (s.get_den() != 1) return false;
    scaled[i] = s.get_num();
  }
  return solve_left(hnf_, scaled).has_value();
}

bool RatLattice::contains(const RatLattice& other) const {
  RatMatrix b = other.basis();
  for (std::size_t i = 0; i < b.rows(); ++i)
    if (!contains(b.row(i))) return false;
  return true;
}

Rat RatLattice::volume() const {
  if (rank() != dim_) throw Error(ErrorCode::DimensionMismatch, "volume of non-full lattice");
  Rat v = Rat(abs(determinant(hnf_)));
  for (std::size_t i = 0; i < dim_; ++i) v /= Rat(denom_);
  return v;
}

RatLattice RatLattice::operator+(const RatLattice& other) const {
  return RatLattice(vstack(basis(), other.basis()));
}

RatLattice RatLattice::dual() const {
  if (rank() != dim_) throw Error(ErrorCode::DimensionMismatch, "dual of non-full lattice");
  return RatLattice(rational_inverse(basis()).transpose());
}

RatLattice RatLattice::intersect(const RatLattice& other) const {
  return (dual() + other.dual()).dual();
}

RatLattice RatLattice::scaled(const Rat& s) const { return RatLattice(basis().scaled(s)); }

RatLattice RatLattice::transformed(const RatMatrix& m) const { return RatLattice(basis() * m); }

Rat lattice_index(const RatLattice& outer, const RatLattice& inner) {
  return inner.volume() / outer.volume();
}

RatVector relative_elementary_divisors(const RatLattice& lattice, const RatLattice& reference) {
  RatMatrix coords = lattice.basis() * rational_inverse(reference.basis());
  Int c = common_denominator(coords);
  IntVector d = elementary_divisors(to_integer(coords.scaled(Rat(c))));
  RatVector out;
  for (const auto& x : d) out.push_back(Rat(x) / Rat(c));
  for (auto& q : out) q.canonicalize();
  return out;
}

int valuation(const Int& v, const Int& p) {
  if (v == 0) throw Error(ErrorCode::InvalidArgument, "valuation of zero");
  Int x = abs(v);
  int e = 0;
  while (mpz_divisible_p(x.get_mpz_t(), p.get_mpz_t())) {
    x /= p;
    ++e;
  }
  return e;
}

int valuation(const Rat& v, const Int& p) {
  return valuation(Int(v.get_num()), p) - valuation(Int(v.get_den()), p);
}

}  // namespace paramodular
