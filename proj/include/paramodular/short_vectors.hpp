#pragma once

#include <map>
#include <vector>

#include "paramodular/matrix.hpp"

namespace paramodular {

using Vec = std::vector<long>;
using SmallMatrix = std::vector<std::vector<long>>;

struct ShortVectorBudget {
  long long max_vectors = 50'000'000;
};

struct NormedVector {
  long norm;  // x A x^t
  Vec x;
  bool operator<(const NormedVector& o) const { return norm != o.norm ? norm < o.norm : x < o.x; }
  bool operator==(const NormedVector&) const = default;
};

SmallMatrix to_small(const IntMatrix& m);
long small_norm(const SmallMatrix& A, const Vec& x);
long small_pair(const SmallMatrix& A, const Vec& x, const Vec& y);

// All x with x A x^t <= bound for a positive definite integral A, sorted by
// (norm, x). Parallel over the values of the last coordinate.
std::vector<NormedVector> enumerate_short(const SmallMatrix& A, long bound, const ShortVectorBudget& budget = {});
std::vector<NormedVector> enumerate_short_reference(const SmallMatrix& A, long bound,
                                                    const ShortVectorBudget& budget = {});
// counts[k] = #{x : x A x^t = k} for k <= bound, without storing vectors.
std::vector<long long> norm_counts(const SmallMatrix& A, long bound);
std::vector<long long> norm_counts_reference(const SmallMatrix& A, long bound);

}  // namespace paramodular
