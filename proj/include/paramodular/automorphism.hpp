#pragma once

#include <optional>
#include <vector>

#include "paramodular/quad_lattice.hpp"

namespace paramodular {

struct AutomorphismBudget {
  long long max_nodes = 200'000'000;
};

struct AutomorphismGroup {
  Int order;
  std::vector<IntMatrix> generators;  // rows act on coordinates: x -> x g
};

// Simultaneous stabilizer O(L_1, ..., L_n) of a chain, by backtracking over
// short vectors with a stabilizer chain.
AutomorphismGroup automorphism_group(const ParamodularChain& chain, const AutomorphismBudget& budget = {});
Int aut_order(const ParamodularChain& chain, const AutomorphismBudget& budget = {});
Int aut_order(const QuadLattice& L, const AutomorphismBudget& budget = {});

// g with g^t gram_K g = gram_L, i.e. the columns of g are the images of the
// basis of L in coordinates of K.
std::optional<IntMatrix> isometry_test(const QuadLattice& L, const QuadLattice& K,
                                       const AutomorphismBudget& budget = {});
// Row matrix M with M gram M^t = gram and coords_j(A) M spanning coords_j(B) for all j.
std::optional<IntMatrix> chain_isometry(const ParamodularChain& A, const ParamodularChain& B,
                                        const AutomorphismBudget& budget = {});

}  // namespace paramodular
