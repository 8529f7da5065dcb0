#pragma once

#include <map>
#include <tuple>
#include <utility>
#include <vector>

#include "paramodular/alt_lattice.hpp"

namespace paramodular {

// a unimodular and b p-modular hyperbolic planes.
struct LocalShape {
  Int p;
  int a = 0;
  int b = 0;
  int n() const { return a + b; }
  bool operator==(const LocalShape&) const = default;
};

// Orbit invariant of a lattice L relative to Lambda of the source shape.
// mu is listed slot by slot: the r_minus planes unimodular in Lambda but
// p-modular in L, the remaining unimodular planes, the r_plus planes
// p-modular in Lambda but unimodular in L, the remaining p-modular planes.
struct LocalDoubleCoset {
  LocalShape source;
  int a2 = 0;  // shape of L
  int b2 = 0;
  int r_minus = 0;
  int r_plus = 0;
  std::vector<int> mu;

  int weight() const;  // sum of mu
  auto key() const { return std::tie(source.p, source.a, source.b, a2, b2, r_minus, r_plus, mu); }
  bool operator==(const LocalDoubleCoset& o) const { return key() == o.key(); }
  bool operator<(const LocalDoubleCoset& o) const { return key() < o.key(); }
};

// Gram (0, T; -T, 0) with T = diag(1_a, p 1_b).
IntMatrix local_gram(const LocalShape& shape);
IntVector local_divisors(const LocalShape& shape);

void validate(const LocalDoubleCoset& dc);

// L given by generator rows in the coordinates of the basis of Lambda
// (whose Gram is `gram`); only the p-adic structure matters.
LocalDoubleCoset classify_lattice(const Int& p, const IntMatrix& gram, const RatMatrix& L);
LocalDoubleCoset classify_pair(const LocalShape& shape, const RatMatrix& L);

// Basis rows p^mu_i e_i, p^nu_i f_i of the representative lattice.
RatMatrix representative_lattice(const LocalDoubleCoset& dc);
// Monomial block B and D = diag(B, B^-T) in symplectic coordinates.
RatMatrix representative_block(const LocalDoubleCoset& dc);
RatMatrix representative_matrix(const LocalDoubleCoset& dc);

bool transpose_integrality(const RatMatrix& B, const IntMatrix& T, const IntMatrix& T2);
// For a = a', b = b': the tuple whose block equals T^-1 B^t T.
LocalDoubleCoset transpose_partner(const LocalDoubleCoset& dc);

std::vector<LocalDoubleCoset> enumerate_double_cosets(const LocalShape& source, int a2, int b2, int j);
std::vector<LocalDoubleCoset> enumerate_Tpj(const LocalShape& shape, int j);

Int neighbor_count_formula(const Int& p, int n1, int n2);
// N(p) < p^{2n+1} (p > 3 or n2 = 0), < 5/4 3^{2n+1} (p = 3), < 2^{2n+2} (p = 2).
bool neighbor_bound_holds(const Int& p, int n1, int n2);

struct EnumerationBudget {
  long long max_candidates = 10'000'000;
};

// Neighbors of the standard lattice, sorted by lattice key.
std::vector<RatLattice> enumerate_neighbors(const LocalShape& shape, const EnumerationBudget& budget = {});
std::vector<RatLattice> enumerate_neighbors_reference(const LocalShape& shape, const EnumerationBudget& budget = {});

// Matrix g with rows a basis of L and g * gram * g^T = gram.
RatMatrix adapted_basis(const LocalShape& shape, const RatLattice& L);

// All lattices at index p^j on both sides (the left cosets of T(p^j)), j = 0..jmax.
std::vector<std::vector<RatLattice>> hecke_levels(const LocalShape& shape, int jmax,
                                                  const EnumerationBudget& budget = {});
std::vector<std::vector<RatLattice>> hecke_levels_reference(const LocalShape& shape, int jmax,
                                                            const EnumerationBudget& budget = {});
std::vector<RatLattice> left_cosets(const LocalDoubleCoset& dc, const EnumerationBudget& budget = {});

struct HeckeTerm {
  LocalDoubleCoset coset;
  long long multiplicity;
  long long orbit_size;
  bool operator==(const HeckeTerm&) const = default;
};
std::vector<HeckeTerm> hecke_product(const LocalShape& shape, int i, int j, const EnumerationBudget& budget = {});
std::vector<HeckeTerm> hecke_product_reference(const LocalShape& shape, int i, int j,
                                               const EnumerationBudget& budget = {});

// Global block B with T^-1 B^t T2 integral realizing the given local classes.
// The local source shape at p is read from T2, the target shape from T.
RatMatrix global_representative(const IntMatrix& T, const IntMatrix& T2,
                                 const std::map<Int, LocalDoubleCoset>& locals);
// Rows of diag(B, B^-T) Lambda(T) in the coordinates of Lambda(T2).
RatMatrix block_lattice(const RatMatrix& B, const IntMatrix& T, const IntMatrix& T2);
// Local classes of diag(B, B^-T) at every prime dividing det(B) * levels.
std::map<Int, LocalDoubleCoset> hecke_class(const RatMatrix& B, const IntMatrix& T, const IntMatrix& T2);

std::vector<std::pair<Int, int>> factor_Tm(const IntMatrix& T, const Int& m);

}  // namespace paramodular
