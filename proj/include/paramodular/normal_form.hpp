#pragma once

#include <optional>
#include <string>

#include "paramodular/matrix.hpp"

namespace paramodular {

// U * A * V = D with U, V unimodular, D diagonal, d_i >= 0 and d_i | d_{i+1}.
struct SmithForm {
  IntMatrix U;
  IntMatrix D;
  IntMatrix V;
};
SmithForm smith_normal_form(const IntMatrix& a);
// Diagonal of the Smith form only (cheaper: no transforms tracked).
IntVector elementary_divisors(const IntMatrix& a);

// U * A = H, U unimodular; H in row echelon form with positive pivots,
// entries above each pivot reduced into [0, pivot), zero rows last.
struct HermiteForm {
  IntMatrix H;
  IntMatrix U;
  std::size_t rank = 0;
};
HermiteForm hermite_normal_form(const IntMatrix& a);
// Nonzero rows of the HNF: the canonical basis of the row lattice.
IntMatrix row_basis(const IntMatrix& generators);

RatMatrix rational_inverse(const RatMatrix& a);
RatMatrix rational_inverse(const IntMatrix& a);

bool is_symplectic(const RatMatrix& g, const IntMatrix& form);

// Basis (rows) of the saturated left kernel {x in Z^m : x A = 0}.
IntMatrix left_kernel(const IntMatrix& a);
// Basis of (Q-span of rows) ∩ Z^n.
IntMatrix saturate(const IntMatrix& generators);
// Integral x with x * A = b, if one exists.
std::optional<IntVector> solve_left(const IntMatrix& a, const IntVector& b);

// A Z-lattice in Q^n given by generator rows, stored canonically as
// (c, HNF(c * L)) with c the least positive integer making c * L integral.
class RatLattice {
 public:
  RatLattice() = default;
  explicit RatLattice(const RatMatrix& generators);
  explicit RatLattice(const IntMatrix& generators);

  std::size_t dim() const { return dim_; }
  std::size_t rank() const { return hnf_.rows(); }
  const Int& denominator() const { return denom_; }
  const IntMatrix& scaled_basis() const { return hnf_; }
  RatMatrix basis() const;
  const std::string& key() const { return key_; }

  bool contains(const RatVector& v) const;
  bool contains(const RatLattice& other) const;
  // Covolume for full-rank lattices.
  Rat volume() const;

  RatLattice operator+(const RatLattice& other) const;
  RatLattice intersect(const RatLattice& other) const;
  RatLattice scaled(const Rat& s) const;
  // Image under x -> x * M (row convention).
  RatLattice transformed(const RatMatrix& m) const;
  // Euclidean dual {y : y . x in Z for all x in L}.
  RatLattice dual() const;

  bool operator==(const RatLattice& o) const { return key_ == o.key_; }
  bool operator<(const RatLattice& o) const { return key_ < o.key_; }

 private:
  void canonicalize(const RatMatrix& generators);

  std::size_t dim_ = 0;
  Int denom_ = 1;
  IntMatrix hnf_;
  std::string key_;
};

// Index [M : L] for full-rank L contained in M.
Rat lattice_index(const RatLattice& outer, const RatLattice& inner);

// Elementary divisors (as rationals) of L with respect to M, both full rank:
// there is a basis m_i of M such that the q_i m_i form a basis of L.
RatVector relative_elementary_divisors(const RatLattice& lattice, const RatLattice& reference);

// p-adic valuation; v must be nonzero.
int valuation(const Int& v, const Int& p);
int valuation(const Rat& v, const Int& p);

}  // namespace paramodular
