#include <doctest.h>

#include <random>
#include <set>

#include "paramodular/automorphism.hpp"

using namespace paramodular;

namespace {

// E8 as D8 ∪ (D8 + 1/2) in R^8, doubled to stay integral: count vectors with
// x.x <= 2 * bound, returned per Q-value.
std::vector<long> e8_shells_oracle(int bound) {
  std::vector<long> out(bound + 1, 0);
  const int lim = 2 * static_cast<int>(std::ceil(std::sqrt(2.0 * bound)));
  std::vector<int> x(8);
  auto visit = [&](auto&& self, int i, int parity) -> void {
    if (i == 8) {
      int s = 0, n = 0;
      for (int v : x) s += v, n += v * v;
      // doubled coordinates: all even (D8) or all odd (D8 + 1/2), sum = 0 mod 4.
      if (s % 4 != 0) return;
      if (n % 8 != 0) return;
      int q = n / 8;
      if (q <= bound) ++out[q];
      return;
    }
    for (int v = -lim; v <= lim; ++v) {
      if ((v & 1) != parity) continue;
      x[i] = v;
      self(self, i + 1, parity);
    }
  };
  visit(visit, 0, 0);
  visit(visit, 0, 1);
  return out;
}

// Naive box enumeration using |x_i| <= sqrt(N (A^-1)_ii).
std::vector<NormedVector> box_oracle(const IntMatrix& A, long N) {
  const std::size_t m = A.rows();
  RatMatrix inv = rational_inverse(A);
  std::vector<long> r(m);
  for (std::size_t i = 0; i < m; ++i) r[i] = static_cast<long>(std::floor(std::sqrt(N * inv(i, i).get_d()) + 1e-9));
  SmallMatrix S = to_small(A);
  std::vector<NormedVector> out;
  Vec x(m);
  auto rec = [&](auto&& self, std::size_t i) -> void {
    if (i == m) {
      long n = small_norm(S, x);
      if (n <= N) out.push_back({n, x});
      return;
    }
    for (long v = -r[i]; v <= r[i]; ++v) {
      x[i] = v;
      self(self, i + 1);
    }
  };
  rec(rec, 0);
  std::sort(out.begin(), out.end());
  return out;
}

IntMatrix random_unimodular(std::size_t m, std::mt19937_64& rng, int steps = 12) {
  IntMatrix U = IntMatrix::identity(m);
  std::uniform_int_distribution<int> c(-1, 1);
  for (int k = 0; k < steps; ++k) {
    std::size_t i = rng() % m, j = rng() % m;
    if (i == j) continue;
    IntMatrix E = IntMatrix::identity(m);
    E(i, j) = c(rng);
    U = E * U;
  }
  // a random signed permutation as well
  std::vector<std::size_t> perm(m);
  for (std::size_t i = 0; i < m; ++i) perm[i] = i;
  std::shuffle(perm.begin(), perm.end(), rng);
  IntMatrix P(m, m);
  for (std::size_t i = 0; i < m; ++i) P(i, perm[i]) = (rng() & 1) ? 1 : -1;
  return P * U;
}

// Counts all bases images among short vectors with the right Gram.
long long brute_aut_order(const IntMatrix& G) {
  const std::size_t m = G.rows();
  long top = 0;
  for (std::size_t i = 0; i < m; ++i) top = std::max(top, G(i, i).get_si());
  auto pool = box_oracle(G, top);
  SmallMatrix S = to_small(G);
  long long count = 0;
  std::vector<Vec> img(m);
  auto rec = [&](auto&& self, std::size_t i) -> void {
    if (i == m) {
      IntMatrix M(m, m);
      for (std::size_t a = 0; a < m; ++a)
        for (std::size_t b = 0; b < m; ++b) M(a, b) = img[a][b];
      if (abs(determinant(M)) == 1) ++count;
      return;
    }
    for (const auto& v : pool) {
      if (v.norm != S[i][i]) continue;
      bool ok = true;
      for (std::size_t j = 0; j < i && ok; ++j) ok = small_pair(S, img[j], v.x) == S[j][i];
      if (!ok) continue;
      img[i] = v.x;
      self(self, i + 1);
    }
  };
  rec(rec, 0);
  return count;
}

}  // namespace

TEST_CASE("lattice invariants") {
  QuadLattice E(e8_gram());
  auto inv = invariants(E);
  CHECK(inv.level == 1);
  CHECK(inv.disc == 1);
  CHECK(is_integral(inv.dual_basis));  // L = L^#
  CHECK(RatLattice(inv.dual_basis) == RatLattice(IntMatrix::identity(8)));
  auto a1 = invariants(QuadLattice(IntMatrix{{2}}));
  CHECK(a1.level == 4);
  CHECK(a1.disc == 2);
  CHECK_FALSE(is_unimodular(QuadLattice(IntMatrix{{2}})));
  auto h = invariants(QuadLattice(IntMatrix{{2, 1}, {1, 2}}));
  CHECK(h.level == 3);
  CHECK(h.disc == 3);
  CHECK_THROWS_AS(QuadLattice(IntMatrix{{1}}), Error);
  CHECK_THROWS_AS(QuadLattice(IntMatrix{{2, 3}, {3, 2}}), Error);
  CHECK_THROWS_AS(QuadLattice(IntMatrix{{2, 1}, {0, 2}}), Error);
}

TEST_CASE("short vectors") {
  QuadLattice E(e8_gram());
  auto zero = short_vectors(E, 0);
  REQUIRE(zero.size() == 1);
  CHECK(zero[0] == std::vector<Vec>{Vec(8, 0)});
  auto sv = short_vectors(E, 3);
  auto oracle = e8_shells_oracle(3);
  for (long q = 0; q <= 3; ++q) CHECK(static_cast<long>(sv[q].size()) == oracle[q]);
  CHECK(sv[1].size() == 240);
  CHECK(sv[2].size() == 2160);
  for (const auto& [q, vs] : sv)
    for (const auto& v : vs) CHECK(E.Q(IntVector(v.begin(), v.end())) == q);
  auto counts = norm_counts(to_small(E.gram), 8);
  for (long q = 0; q <= 3; ++q) CHECK(counts[2 * q] == oracle[q]);
  CHECK(counts == norm_counts_reference(to_small(E.gram), 8));

  std::mt19937_64 rng(7);
  for (int t = 0; t < 20; ++t) {
    std::size_t m = 1 + rng() % 4;
    IntMatrix B(m, m);
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t j = 0; j < m; ++j) B(i, j) = static_cast<long>(rng() % 5) - 2;
    if (determinant(B) == 0) continue;
    IntMatrix A = B * B.transpose();
    for (std::size_t i = 0; i < m; ++i) A(i, i) += 1;
    long N = 4 + rng() % 10;
    SmallMatrix S = to_small(A);
    auto fast = enumerate_short(S, N), ref = enumerate_short_reference(S, N);
    CHECK(fast == ref);
    CHECK(fast == box_oracle(A, N));
  }
  CHECK_THROWS_AS(enumerate_short(to_small(e8_gram()), 40, ShortVectorBudget{1000}), Error);
}

TEST_CASE("isometries and automorphisms") {
  std::mt19937_64 rng(11);
  QuadLattice E(e8_gram());
  auto id = isometry_test(E, E);
  REQUIRE(id);
  CHECK(id->transpose() * E.gram * *id == E.gram);
  for (int t = 0; t < 3; ++t) {
    IntMatrix U = random_unimodular(8, rng);
    QuadLattice K(U * E.gram * U.transpose());
    auto g = isometry_test(E, K);
    REQUIRE(g);
    CHECK(g->transpose() * K.gram * *g == E.gram);
    auto h = isometry_test(K, E);
    REQUIRE(h);
    CHECK(h->transpose() * E.gram * *h == K.gram);
  }
  CHECK_FALSE(isometry_test(E, QuadLattice(IntMatrix::diagonal(IntVector(8, Int(2))))));
  // Same determinant and level, different classes: x^2+xy+4y^2 and 2x^2+xy+2y^2.
  QuadLattice P(IntMatrix{{2, 1}, {1, 8}}), R(IntMatrix{{4, 1}, {1, 4}});
  CHECK(invariants(P).level == invariants(R).level);
  CHECK(short_vectors(P, 1)[1].size() != short_vectors(R, 1)[1].size());
  CHECK_FALSE(isometry_test(P, R));
  CHECK_FALSE(isometry_test(R, P));

  // |W(E8)| is the product of the invariant degrees.
  CHECK(aut_order(E) == Int(2 * 8 * 12 * 14 * 18 * 20 * 24) * 30);
  CHECK(aut_order(E) == 696729600);
  CHECK(aut_order(QuadLattice(IntMatrix{{2}})) == 2);
  std::vector<IntMatrix> small{IntMatrix{{2, -1}, {-1, 2}}, IntMatrix{{2, 0}, {0, 2}}, IntMatrix{{2, 1}, {1, 8}},
                               IntMatrix{{2, -1, 0}, {-1, 2, -1}, {0, -1, 2}}, IntMatrix{{2, 1, 0}, {1, 4, 1}, {0, 1, 6}},
                               IntMatrix{{4, 1, 1}, {1, 4, 1}, {1, 1, 4}}, IntMatrix::diagonal({Int(2), Int(2), Int(4), Int(4)})};
  for (const auto& G : small) {
    IntMatrix U = random_unimodular(G.rows(), rng, 4);
    QuadLattice L(U * G * U.transpose());
    CHECK(aut_order(L) == static_cast<long>(brute_aut_order(L.gram)));
  }
}

TEST_CASE("modular sublattices of E8") {
  QuadLattice E(e8_gram());
  auto subs = pmodular_sublattices(E, 2);
  // Independent count: all 4-dim subspaces of F_2^8 in reduced echelon form.
  long count = 0;
  SmallMatrix S = to_small(E.gram);
  for (int mask = 0; mask < 256; ++mask) {
    if (__builtin_popcount(mask) != 4) continue;
    std::vector<int> piv;
    for (int c = 0; c < 8; ++c)
      if (mask >> c & 1) piv.push_back(c);
    std::vector<std::pair<int, int>> free;
    for (int r = 0; r < 4; ++r)
      for (int c = piv[r] + 1; c < 8; ++c)
        if (!(mask >> c & 1)) free.push_back({r, c});
    for (long bits = 0; bits < (1L << free.size()); ++bits) {
      std::vector<Vec> rows(4, Vec(8, 0));
      for (int r = 0; r < 4; ++r) rows[r][piv[r]] = 1;
      for (std::size_t f = 0; f < free.size(); ++f)
        if (bits >> f & 1) rows[free[f].first][free[f].second] = 1;
      bool ok = true;
      for (int a = 0; a < 4 && ok; ++a) {
        ok = (small_norm(S, rows[a]) / 2) % 2 == 0;
        for (int b = a + 1; b < 4 && ok; ++b) ok = small_pair(S, rows[a], rows[b]) % 2 == 0;
      }
      count += ok;
    }
  }
  CHECK(count == 270);
  CHECK(static_cast<long>(subs.size()) == count);
  for (const auto& K : subs) {
    CHECK(is_modular(K.lattice, 2));
    RatMatrix dual = rational_inverse(K.lattice.gram) * to_rational(K.coords);
    CHECK(RatLattice(dual) == RatLattice(to_rational(K.coords).scaled(Rat(1, 2))));
    IntMatrix half = K.lattice.gram;
    for (std::size_t i = 0; i < 8; ++i)
      for (std::size_t j = 0; j < 8; ++j) {
        REQUIRE(half(i, j) % 2 == 0);
        half(i, j) /= 2;
      }
    CHECK(abs(determinant(half)) == 1);
    for (std::size_t i = 0; i < 8; ++i) CHECK(half(i, i) % 2 == 0);
  }
  auto subs3 = pmodular_sublattices(E, 3);
  CHECK(subs3.size() == 2 * 4 * 10 * 28);
  for (std::size_t i = 0; i < subs3.size(); i += 97) CHECK(is_modular(subs3[i].lattice, 3));
  CHECK_THROWS_AS(pmodular_sublattices(QuadLattice(IntMatrix{{2}}), 2), Error);
}

TEST_CASE("chain classes") {
  QuadLattice E(e8_gram());
  Int full = aut_order(E);
  auto trivial = enumerate_chain_classes(E, {1, 1});
  REQUIRE(trivial.size() == 1);
  CHECK(trivial[0].stabilizer_order == full);
  auto classes = enumerate_chain_classes(E, {1, 2});
  auto subs = pmodular_sublattices(E, 2);
  Rat total = 0, weight = 0;
  long long orbit_total = 0;
  for (const auto& c : classes) {
    CHECK(full % c.stabilizer_order == 0);
    total += Rat(full) / Rat(c.stabilizer_order);
    weight += Rat(1) / Rat(c.stabilizer_order);
    CHECK(Rat(static_cast<long>(c.orbit_size)) == Rat(full) / Rat(c.stabilizer_order));
    orbit_total += c.orbit_size;
  }
  CHECK(total == Rat(static_cast<long>(subs.size())));
  CHECK(orbit_total == static_cast<long long>(subs.size()));
  MESSAGE("E8, T=(1,2): " << classes.size() << " class(es), weight " << weight.get_str());
  // Members of one class are isometric chains.
  auto a = make_chain(E, {subs[0].coords}, {1, 2}), b = make_chain(E, {subs[200].coords}, {1, 2});
  auto M = chain_isometry(a, b);
  REQUIRE(M);
  CHECK(*M * E.gram * M->transpose() == E.gram);
  CHECK(row_basis(subs[0].coords * *M) == subs[200].coords);
  CHECK_THROWS_AS(make_chain(E, {subs[0].coords}, {1, 3}), Error);
  CHECK_THROWS_AS(enumerate_chain_classes(E, {1, 6}), Error);
}
