#pragma once

#include <map>
#include <optional>
#include <vector>

#include "paramodular/alt_lattice.hpp"
#include "paramodular/short_vectors.hpp"

namespace paramodular {

// Positive definite even lattice; gram is the matrix of b(x, y) = Q(x+y) - Q(x) - Q(y),
// so Q(x) = x gram x^t / 2.
struct QuadLattice {
  IntMatrix gram;

  QuadLattice() = default;
  explicit QuadLattice(IntMatrix g);  // checks symmetry, evenness, definiteness
  std::size_t rank() const { return gram.rows(); }
  Int Q(const IntVector& x) const;
  Int b(const IntVector& x, const IntVector& y) const;
};

IntMatrix e8_gram();

struct LatticeInvariants {
  Int level;
  Int disc;              // det of the b-Gram
  RatMatrix dual_basis;  // rows, coordinates in the basis of L
};
LatticeInvariants invariants(const QuadLattice& L);
bool is_unimodular(const QuadLattice& L);
// L^# = t^-1 L.
bool is_modular(const QuadLattice& L, const Int& t);

// Vectors grouped by Q-value, Q(x) <= bound, including 0 and both signs.
std::map<long, std::vector<Vec>> short_vectors(const QuadLattice& L, long bound,
                                               const ShortVectorBudget& budget = {});

// L_1 ⊇ ... ⊇ L_n with coordinates relative to the basis of L_1.
struct ParamodularChain {
  QuadLattice first;
  std::vector<IntMatrix> coords;  // one basis matrix per member; coords[0] = identity
  IntVector T;

  std::size_t length() const { return coords.size(); }
  QuadLattice member(std::size_t j) const;
};
ParamodularChain make_chain(const QuadLattice& first, const std::vector<IntMatrix>& later, const IntVector& T);
void validate_chain(const ParamodularChain& chain);

struct Sublattice {
  IntMatrix coords;  // HNF basis in coordinates of L
  QuadLattice lattice;
};
struct SublatticeBudget {
  long long max_subspaces = 5'000'000;
};
// Even p-modular K with L ⊇ K ⊇ pL for even unimodular L, via maximal
// totally singular subspaces of (L/pL, Q mod p). Sorted by coordinates.
std::vector<Sublattice> pmodular_sublattices(const QuadLattice& L, const Int& p,
                                             const SublatticeBudget& budget = {});

struct ChainClass {
  ParamodularChain representative;
  Int stabilizer_order;
  long long orbit_size = 0;  // number of chains in the enumerated list in this class
};
// Classes of chains starting with L1 (assumed of class number one) for
// T = (1, ..., 1, p, ..., p); members with equal t coincide.
std::vector<ChainClass> enumerate_chain_classes(const QuadLattice& L1, const IntVector& T);

}  // namespace paramodular
