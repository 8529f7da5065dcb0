#pragma once

#include <complex>
#include <map>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "paramodular/hecke_local.hpp"

namespace paramodular {

// Matrices act on columns in the symplectic basis (e, e', v, v') with
// v_i = f_i / d_i built from para_symplectic_basis of each factor.

struct GarrettTriple {
  Int d, d2;
  int r = 0;
  int m = 0, n = 0;
  Int N1, N2, D1, D2;
  auto key() const { return std::tie(r, d, d2); }
  bool operator==(const GarrettTriple& o) const { return key() == o.key(); }
  bool operator<(const GarrettTriple& o) const { return key() < o.key(); }
};

std::vector<GarrettTriple> admissible_triples(int m, int n, const Int& N1, const Int& N2, const Int& D1,
                                              const Int& D2);

struct GarrettRep {
  GarrettTriple triple;
  IntMatrix S1, S2;
  RatMatrix B;
  IntMatrix T, T2;  // diag(d~_1..d~_r), diag(d~'_1..d~'_r)
  RatMatrix C;
  RatMatrix full;
  IntVector divisors1, divisors2;
};

// Integral vs the paramodular levels: diag(T1, T2)^-1 C and its transpose integral.
GarrettRep garrett_representative(const GarrettTriple& triple, const RatMatrix& B, const AltLattice& L1,
                                  const AltLattice& L2);
// Divisors d~_1..d~_r of a cusp representative: gcd of the pairings of S e_j with the lattice.
IntVector tilde_divisors(const IntMatrix& S, const IntVector& divisors, int count);

// Coordinates of the lattice basis (e, e', f, f') in (e, e', v, v').
RatMatrix garrett_lattice_basis(const IntVector& divisors1, const IntVector& divisors2);
bool preserves_lattice(const RatMatrix& g, const IntVector& divisors1, const IntVector& divisors2);

struct IsotropicPair {
  IntMatrix X1, X2;        // projections, row bases in lattice coordinates
  IntMatrix rad1, rad2;    // X ∩ L_i
  int r = 0;
  IntMatrix comp1, comp2;  // bases of the complements L_i' of M(rad_i)
  RatMatrix phi;           // rows: images of the basis of L_1' in coordinates of L_2'
  IntMatrix Xprime1;       // pi_1(X ∩ L'), coordinates in comp1
  IntMatrix Xprime2;       // pi_2(X ∩ L'), coordinates in comp2
};

// X: rows in the coordinates of L1 ⊥ L2 (first 2m entries for L1).
IsotropicPair project_isotropic(const AltLattice& L1, const AltLattice& L2, const IntMatrix& X);
// The converse construction from (X1, X2, phi); returns generator rows.
IntMatrix rebuild_isotropic(const IsotropicPair& pair, std::size_t m2, std::size_t n2);

struct RadicalSplit {
  IntMatrix Z;
  IntMatrix Xprime;
};
RadicalSplit split_radical(const AltLattice& L, const IntMatrix& X, const IsotropicSubmodule& Z);

struct OrbitInvariants {
  Int d, d2;
  int r = 0;
  std::map<Int, LocalDoubleCoset> classes;
  bool operator==(const OrbitInvariants&) const = default;
};
OrbitInvariants orbit_invariants(const AltLattice& L1, const AltLattice& L2, const RatMatrix& g);
// Keeps primes with a nontrivial class or a p-modular plane on either side.
std::map<Int, LocalDoubleCoset> canonical_classes(const std::map<Int, LocalDoubleCoset>& classes);

// Random elements of Sp(L1) x Sp(L2) and of the parabolic P ∩ Sp(L) in (e, e', v, v').
RatMatrix random_factor_element(const IntVector& divisors1, const IntVector& divisors2, std::mt19937_64& rng);
RatMatrix random_parabolic_element(std::size_t total, std::mt19937_64& rng);

using ComplexMatrix = Eigen::MatrixXcd;
struct KernelCheck {
  std::complex<double> lhs, rhs;
  double error = 0;
  bool ok = false;
};
KernelCheck kernel_identity_check(const GarrettRep& rep, const ComplexMatrix& z, const ComplexMatrix& w,
                                  double tol);
// Random point of the Siegel half space with Im Z >= I.
ComplexMatrix random_half_space_point(std::size_t n, std::mt19937_64& rng);
Eigen::MatrixXd to_double(const RatMatrix& m);

}  // namespace paramodular
