#include "paramodular/quad_lattice.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace paramodular {

QuadLattice::QuadLattice(IntMatrix g) : gram(std::move(g)) {
  const std::size_t m = gram.rows();
  if (!gram.square()) throw Error(ErrorCode::DimensionMismatch, "Gram must be square");
  if (!(gram == gram.transpose())) throw Error(ErrorCode::DimensionMismatch, "Gram must be symmetric");
  for (std::size_t i = 0; i < m; ++i)
    if (gram(i, i) % 2 != 0) throw Error(ErrorCode::NotEven, "Gram diagonal must be even");
  for (std::size_t k = 1; k <= m; ++k)
    if (determinant(gram.block(0, 0, k, k)) <= 0)
      throw Error(ErrorCode::NotPositiveDefinite, "Gram is not positive definite");
}

Int QuadLattice::Q(const IntVector& x) const { return b(x, x) / 2; }

Int QuadLattice::b(const IntVector& x, const IntVector& y) const {
  IntVector gy = gram.apply(y);
  Int s = 0;
  for (std::size_t i = 0; i < x.size(); ++i) s += x[i] * gy[i];
  return s;
}

IntMatrix e8_gram() {
  // Cartan matrix: chain 1-3-4-5-6-7-8 with node 2 attached to node 4.
  IntMatrix g = IntMatrix::diagonal(IntVector(8, Int(2)));
  const int edges[][2] = {{0, 2}, {2, 3}, {3, 4}, {4, 5}, {5, 6}, {6, 7}, {1, 3}};
  for (const auto& e : edges) g(e[0], e[1]) = g(e[1], e[0]) = -1;
  return g;
}

LatticeInvariants invariants(const QuadLattice& L) {
  LatticeInvariants out;
  out.disc = determinant(L.gram);
  out.dual_basis = rational_inverse(L.gram);
  out.level = common_denominator(out.dual_basis);
  for (std::size_t i = 0; i < L.rank(); ++i) {
    Rat v = out.dual_basis(i, i) * out.level;
    if (v.get_num() % 2 != 0) {
      out.level *= 2;
      break;
    }
  }
  return out;
}

bool is_unimodular(const QuadLattice& L) { return abs(determinant(L.gram)) == 1; }

bool is_modular(const QuadLattice& L, const Int& t) {
  // L^# = t^-1 L  <=>  gram / t is integral and unimodular.
  for (std::size_t i = 0; i < L.rank(); ++i)
    for (std::size_t j = 0; j < L.rank(); ++j)
      if (L.gram(i, j) % t != 0) return false;
  RatMatrix s = to_rational(L.gram).scaled(Rat(1) / Rat(t));
  return abs(determinant(s)) == 1;
}

std::map<long, std::vector<Vec>> short_vectors(const QuadLattice& L, long bound, const ShortVectorBudget& budget) {
  if (bound < 0) throw Error(ErrorCode::InvalidArgument, "negative bound");
  std::map<long, std::vector<Vec>> out;
  for (auto& v : enumerate_short(to_small(L.gram), 2 * bound, budget)) out[v.norm / 2].push_back(std::move(v.x));
  return out;
}

QuadLattice ParamodularChain::member(std::size_t j) const {
  const IntMatrix& U = coords.at(j);
  return QuadLattice(U * first.gram * U.transpose());
}

ParamodularChain make_chain(const QuadLattice& first, const std::vector<IntMatrix>& later, const IntVector& T) {
  ParamodularChain c;
  c.first = first;
  c.coords.push_back(IntMatrix::identity(first.rank()));
  for (const auto& U : later) c.coords.push_back(row_basis(U));
  c.T = T;
  validate_chain(c);
  return c;
}

void validate_chain(const ParamodularChain& c) {
  const std::size_t n = c.coords.size(), m = c.first.rank();
  if (c.T.size() != n || n == 0) throw Error(ErrorCode::DimensionMismatch, "T length must match the chain");
  if (c.T[0] != 1) throw Error(ErrorCode::InvalidLevel, "t_1 must be 1");
  for (std::size_t j = 0; j < n; ++j) {
    if (c.coords[j].rows() != m || c.coords[j].cols() != m || determinant(c.coords[j]) == 0)
      throw Error(ErrorCode::DimensionMismatch, "member must have full rank");
    if (j > 0 && c.T[j] % c.T[j - 1] != 0) throw Error(ErrorCode::InvalidLevel, "T must be a divisor chain");
    if (j > 0 && !RatLattice(c.coords[j - 1]).contains(RatLattice(c.coords[j])))
      throw Error(ErrorCode::InvalidArgument, "chain is not descending");
    if (!is_modular(c.member(j), c.T[j])) throw Error(ErrorCode::NotElementary, "member is not t_j-modular");
  }
}

namespace {

long mod(long a, long p) { return ((a % p) + p) % p; }

}  // namespace

std::vector<Sublattice> pmodular_sublattices(const QuadLattice& L, const Int& P, const SublatticeBudget& budget) {
  const std::size_t m = L.rank();
  if (!is_unimodular(L)) throw Error(ErrorCode::InvalidArgument, "L must be unimodular");
  if (m % 2 != 0) throw Error(ErrorCode::InvalidRank, "rank must be even");
  if (!P.fits_slong_p() || P < 2 || prime_divisors(P) != std::vector<Int>{P})
    throw Error(ErrorCode::InvalidArgument, "p must be a small prime");
  const long p = P.get_si();
  double space = std::pow(double(p), double(m));
  if (space > 5e7) throw Error(ErrorCode::ScaleLimit, "L/pL too large");
  SmallMatrix G = to_small(L.gram);

  // Projective singular points: first nonzero coordinate 1.
  std::vector<Vec> points;
  Vec x(m, 0);
  const long total = static_cast<long>(space);
  for (long code = 1; code < total; ++code) {
    long c = code;
    for (std::size_t i = 0; i < m; ++i) {
      x[i] = c % p;
      c /= p;
    }
    auto first = std::find_if(x.begin(), x.end(), [](long v) { return v != 0; });
    if (*first != 1) continue;
    if (mod(small_norm(G, x) / 2, p) == 0) points.push_back(x);
  }

  // Each subspace is produced once through its reduced echelon basis, whose
  // rows are singular points with increasing pivots.
  auto pivot = [](const Vec& v) {
    return static_cast<std::size_t>(std::find_if(v.begin(), v.end(), [](long c) { return c != 0; }) - v.begin());
  };
  std::vector<std::vector<Vec>> found;
  std::vector<Vec> rows;
  std::vector<std::size_t> pivots;
  auto dfs = [&](auto&& self, std::size_t from) -> void {
    if (rows.size() == m / 2) {
      found.push_back(rows);
      if (static_cast<long long>(found.size()) > budget.max_subspaces)
        throw Error(ErrorCode::ScaleLimit, "subspace budget exceeded");
      return;
    }
    for (std::size_t i = from; i < points.size(); ++i) {
      const Vec& v = points[i];
      std::size_t pv = pivot(v);
      if (!pivots.empty() && pv <= pivots.back()) continue;
      bool ok = true;
      for (std::size_t r = 0; r < rows.size() && ok; ++r)
        ok = v[pivots[r]] == 0 && rows[r][pv] == 0 && mod(small_pair(G, v, rows[r]), p) == 0;
      if (!ok) continue;
      rows.push_back(v);
      pivots.push_back(pv);
      self(self, i + 1);
      rows.pop_back();
      pivots.pop_back();
    }
  };
  std::sort(points.begin(), points.end(), [&](const Vec& a, const Vec& b) { return pivot(a) < pivot(b); });
  dfs(dfs, 0);

  std::vector<Sublattice> out;
  for (const auto& W : found) {
    IntMatrix gens = IntMatrix::diagonal(IntVector(m, P));
    for (const auto& w : W) {
      IntVector row(w.begin(), w.end());
      gens.append_row(row);
    }
    IntMatrix U = row_basis(gens);
    out.push_back({U, QuadLattice(U * L.gram * U.transpose())});
  }
  std::sort(out.begin(), out.end(),
            [](const Sublattice& a, const Sublattice& b) { return a.coords.to_string() < b.coords.to_string(); });
  return out;
}

}  // namespace paramodular
