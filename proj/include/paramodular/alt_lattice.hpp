#pragma once

#include <cstdint>
#include <map>
#include <random>
#include <utility>
#include <vector>

#include "paramodular/normal_form.hpp"

namespace paramodular {

// Full-rank lattice with an alternating Gram matrix on its basis.
// Vectors are integer rows in that basis; <x, y> = x * gram * y^T.
struct AltLattice {
  IntMatrix gram;

  AltLattice() = default;
  explicit AltLattice(IntMatrix g);
  std::size_t rank() const { return gram.rows(); }
  Int pair(const IntVector& x, const IntVector& y) const;
};

// Rows of `transform` are e_1..e_m, f_1..f_m in lattice coordinates:
// transform * gram * transform^T = alternating_gram(divisors).
struct ParaBasis {
  IntMatrix transform;
  IntVector divisors;
};

struct IsotropicSubmodule {
  IntMatrix generators;  // rows
  std::size_t rank() const { return generators.rows(); }
};

struct IsotropicAdaptation {
  IntMatrix e;  // rows e_1..e_r, spanning Z
  IntMatrix f;  // rows f_1..f_r
  IntVector d;  // <e_i, f_i> = d_i
  IntMatrix complement_basis;  // rows, lattice coordinates
  AltLattice complement;       // Gram on complement_basis
};

AltLattice standard_lattice(const IntVector& T);
ParaBasis para_symplectic_basis(const AltLattice& L);
std::pair<Int, Int> level_and_det(const AltLattice& L);
bool is_squarefree(const Int& n);
std::vector<Int> prime_divisors(const Int& n);

IsotropicAdaptation adapt_to_isotropic(const AltLattice& L, const IsotropicSubmodule& Z);
Int d_invariant(const AltLattice& L, const IsotropicSubmodule& Z);
bool orbit_equivalent(const AltLattice& L, const IsotropicSubmodule& Z1, const IsotropicSubmodule& Z2);

std::vector<Int> admissible_d_values(int m, int u, const Int& N, const Int& D);
Int cusp_count(int m, int u, const std::map<Int, int>& ell);

// Lift of matrices S_p in SL_m(F_p) (entries taken mod p) to S in SL_m(Z)
// with S = S_p mod p for every listed prime.
IntMatrix lift_special_linear(const std::map<Int, IntMatrix>& residues, std::size_t m);

// Lexicographically smallest permutation placing exactly k of the last
// `ell` slots at the positions m-u..m-1; entry j is the image slot of j.
std::vector<std::size_t> cusp_permutation(int m, int u, int ell, int k);

struct CuspRepresentative {
  IntMatrix S;      // in SL_m(Z)
  RatMatrix gamma;  // diag(S, S^-T), rescaled coordinates (e, f_i / d_i)
  ParaBasis basis;  // the para-symplectic basis of L used for the coordinates
};
CuspRepresentative cusp_representative(const AltLattice& L, int u, const Int& d);
// gamma U_0 ∩ L in lattice coordinates: the last u columns of S read as e-vectors.
IsotropicSubmodule cusp_submodule(const CuspRepresentative& rep, int u);

// Symplectic transvection x -> x + c <x, v> v as a matrix acting on rows.
IntMatrix transvection(const AltLattice& L, const IntVector& v, const Int& c);
// Product of `length` random transvections along short random vectors.
IntMatrix random_isometry(const AltLattice& L, std::mt19937_64& rng, int length = 20);

// Random primitive totally isotropic submodule of rank u.
IsotropicSubmodule random_isotropic(const AltLattice& L, int u, std::mt19937_64& rng, int range = 3);

}  // namespace paramodular
