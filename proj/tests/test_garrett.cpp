#include <doctest.h>

#include <random>
#include <set>

#include "paramodular/garrett.hpp"

using namespace paramodular;

namespace {

std::vector<Int> divisors_of(const Int& n) {
  std::vector<Int> out;
  for (Int d = 1; d <= n; ++d)
    if (n % d == 0) out.push_back(d);
  return out;
}

bool divides_power(const Int& d, const Int& N, int k) {
  Int P = 1;
  for (int i = 0; i < k; ++i) P *= N;
  return P % d == 0;
}

LocalShape shape_of(const IntMatrix& T, const Int& p) {
  LocalShape s{p, 0, 0};
  for (std::size_t i = 0; i < T.rows(); ++i) (T(i, i) % p == 0 ? s.b : s.a)++;
  return s;
}

// All local class choices of weight <= 1 at the primes of T, T' and at q.
std::vector<std::map<Int, LocalDoubleCoset>> small_classes(const IntMatrix& T, const IntMatrix& T2, const Int& q) {
  std::set<Int> primes{q};
  for (std::size_t i = 0; i < T.rows(); ++i)
    for (const auto& p : prime_divisors(T(i, i) * T2(i, i))) primes.insert(p);
  std::vector<std::map<Int, LocalDoubleCoset>> out{{}};
  for (const auto& p : primes) {
    LocalShape src = shape_of(T2, p), tgt = shape_of(T, p);
    std::vector<LocalDoubleCoset> opts;
    for (int j = 0; j <= 1; ++j)
      for (const auto& dc : enumerate_double_cosets(src, tgt.a, tgt.b, j)) opts.push_back(dc);
    std::vector<std::map<Int, LocalDoubleCoset>> next;
    for (const auto& base : out)
      for (const auto& dc : opts) {
        auto c = base;
        c[p] = dc;
        next.push_back(c);
      }
    out = next;
  }
  return out;
}

// Independent lattice check: Q^-1 g Q integral with Q = diag(1, T1, T2).
bool stabilizes(const RatMatrix& g, const IntVector& t1, const IntVector& t2) {
  const std::size_t m = t1.size(), n = t2.size(), N = m + n;
  auto q = [&](std::size_t i) -> Int {
    if (i < N) return 1;
    return i < N + m ? t1[i - N] : t2[i - N - m];
  };
  for (std::size_t i = 0; i < 2 * N; ++i)
    for (std::size_t j = 0; j < 2 * N; ++j) {
      Rat x = g(i, j) * q(j) / q(i);
      if (x.get_den() != 1) return false;
    }
  return true;
}

AltLattice disguise(const IntVector& t, std::mt19937_64& rng) {
  AltLattice L = standard_lattice(t);
  std::uniform_int_distribution<int> c(-2, 2);
  IntMatrix U = IntMatrix::identity(L.rank());
  for (int k = 0; k < 6; ++k) {
    std::size_t i = rng() % L.rank(), j = rng() % L.rank();
    if (i == j) continue;
    IntMatrix E = IntMatrix::identity(L.rank());
    E(i, j) = c(rng);
    U = E * U;
  }
  return AltLattice(U * L.gram * U.transpose());
}

}  // namespace

TEST_CASE("admissible triples match the divisibility conditions") {
  struct Case { int m, n; Int N1, N2, D1, D2; };
  for (const auto& c : std::vector<Case>{{1, 1, 2, 2, 2, 2}, {2, 1, 2, 3, 2, 3}, {2, 2, 6, 2, 6, 4}, {3, 2, 2, 3, 4, 3}}) {
    std::set<std::tuple<int, Int, Int>> expect;
    for (int r = 0; r <= std::min(c.m, c.n); ++r)
      for (const auto& d : divisors_of(c.D1))
        for (const auto& d2 : divisors_of(c.D2))
          if (divides_power(d, c.N1, c.m - r) && divides_power(c.D1 / d, c.N1, r) &&
              divides_power(d2, c.N2, c.n - r) && divides_power(c.D2 / d2, c.N2, r))
            expect.insert({r, d, d2});
    std::set<std::tuple<int, Int, Int>> got;
    for (const auto& t : admissible_triples(c.m, c.n, c.N1, c.N2, c.D1, c.D2)) got.insert({t.r, t.d, t.d2});
    CHECK(got == expect);
  }
  CHECK_THROWS_AS(admissible_triples(-1, 1, 1, 1, 1, 1), Error);
}

namespace {

std::string describe(const OrbitInvariants& v) {
  std::string s = "r=" + std::to_string(v.r) + " d=" + v.d.get_str() + " d'=" + v.d2.get_str();
  for (const auto& [p, dc] : v.classes) {
    s += " p" + p.get_str() + ":(" + std::to_string(dc.a2) + "," + std::to_string(dc.r_minus) + "," +
         std::to_string(dc.r_plus) + ";";
    for (int x : dc.mu) s += std::to_string(x);
    s += ")";
  }
  return s;
}

// g X0 in the coordinates (e, f | e', f') of the standard lattices.
IntMatrix isotropic_of(const RatMatrix& g, const IntVector& t1, const IntVector& t2) {
  const std::size_t m = t1.size(), n = t2.size(), N = m + n;
  IntMatrix X(N, 2 * N);
  auto q = [&](std::size_t i) -> Int { return i < N ? Int(1) : (i < N + m ? t1[i - N] : t2[i - N - m]); };
  for (std::size_t j = 0; j < N; ++j)
    for (std::size_t k = 0; k < 2 * N; ++k) {
      std::size_t i;  // global slot of coordinate k
      if (k < 2 * m) i = k < m ? k : N + (k - m);
      else i = k - 2 * m < n ? m + (k - 2 * m) : N + m + (k - 2 * m - n);
      X(j, k) = Rat(g(i, j) / q(i)).get_num();
    }
  return X;
}

struct Config {
  IntVector t1, t2;
};

}  // namespace

TEST_CASE("garrett representatives realize their orbit invariants") {
  std::mt19937_64 rng(20240611);
  const Int q = 5;
  std::size_t checked = 0;
  for (const auto& cfg : std::vector<Config>{{{2}, {2}}, {{1, 2}, {3}}, {{2}, {1, 2}}, {{1, 2}, {2}}, {{2, 2}, {1, 2}}}) {
    AltLattice L1 = disguise(cfg.t1, rng), L2 = disguise(cfg.t2, rng);
    const int m = cfg.t1.size(), n = cfg.t2.size();
    Int D1 = 1, D2 = 1;
    for (const auto& x : cfg.t1) D1 *= x;
    for (const auto& x : cfg.t2) D2 *= x;
    std::set<std::string> seen;
    std::size_t built = 0;
    for (const auto& tr : admissible_triples(m, n, lcm_of(cfg.t1), lcm_of(cfg.t2), D1, D2)) {
      auto c1 = cusp_representative(L1, m - tr.r, tr.d), c2 = cusp_representative(L2, n - tr.r, tr.d2);
      IntMatrix T = IntMatrix::diagonal(tilde_divisors(c1.S, c1.basis.divisors, tr.r));
      IntMatrix T2 = IntMatrix::diagonal(tilde_divisors(c2.S, c2.basis.divisors, tr.r));
      for (std::size_t i = 1; i < T.rows(); ++i) CHECK(T(i, i) % T(i - 1, i - 1) == 0);
      std::vector<std::map<Int, LocalDoubleCoset>> choices{{}};
      if (tr.r > 0) choices = small_classes(T, T2, q);
      for (const auto& locals : choices) {
        RatMatrix B = tr.r > 0 ? global_representative(T, T2, locals) : RatMatrix(0, 0);
        GarrettRep rep = garrett_representative(tr, B, L1, L2);
        CHECK(rep.T == T);
        CHECK(is_symplectic(rep.full, standard_symplectic_form(m + n)));
        CHECK(stabilizes(rep.full, rep.divisors1, rep.divisors2));
        OrbitInvariants inv = orbit_invariants(L1, L2, rep.full);
        CHECK(inv.r == tr.r);
        CHECK(inv.d == tr.d);
        CHECK(inv.d2 == tr.d2);
        auto expect = tr.r > 0 ? canonical_classes(hecke_class(B, T, T2)) : std::map<Int, LocalDoubleCoset>{};
        CHECK(expect == canonical_classes(locals));
        INFO(describe(inv));
        CHECK(inv.classes == expect);
        seen.insert(describe(inv));
        ++built;
        for (int k = 0; k < 3; ++k) {
          RatMatrix g = random_factor_element(rep.divisors1, rep.divisors2, rng) * rep.full *
                        random_parabolic_element(m + n, rng);
          REQUIRE(stabilizes(g, rep.divisors1, rep.divisors2));
          CHECK(orbit_invariants(L1, L2, g) == inv);

          AltLattice S1(alternating_gram(rep.divisors1)), S2(alternating_gram(rep.divisors2));
          IntMatrix X = isotropic_of(g, rep.divisors1, rep.divisors2);
          IsotropicPair pair = project_isotropic(S1, S2, X);
          CHECK(rebuild_isotropic(pair, 2 * m, 2 * n) == row_basis(X));
          CHECK(pair.X1 == row_basis(vstack(pair.rad1, pair.Xprime1 * pair.comp1)));
          IntMatrix G1 = pair.Xprime1 * pair.comp1 * S1.gram * (pair.Xprime1 * pair.comp1).transpose();
          IntMatrix G2 = pair.Xprime2 * pair.comp2 * S2.gram * (pair.Xprime2 * pair.comp2).transpose();
          CHECK(G2 == -G1);
        }
        for (int k = 0; k < 3; ++k) {
          auto z = random_half_space_point(m, rng), w = random_half_space_point(n, rng);
          KernelCheck kc = kernel_identity_check(rep, z, w, 1e-9);
          INFO(kc.lhs, " vs ", kc.rhs);
          CHECK(kc.ok);
        }
      }
    }
    CHECK(seen.size() == built);
    checked += built;
  }
  MESSAGE("representatives checked: " << checked);
  CHECK(checked > 20);
}

TEST_CASE("garrett errors") {
  AltLattice L1 = standard_lattice({2}), L2 = standard_lattice({2});
  auto triples = admissible_triples(1, 1, 2, 2, 2, 2);
  for (const auto& tr : triples) {
    if (tr.r != 1) continue;
    RatMatrix bad = RatMatrix::diagonal({Rat(1, 7)});
    CHECK_THROWS_AS(garrett_representative(tr, bad, L1, L2), Error);
    CHECK_THROWS_AS(garrett_representative(tr, RatMatrix::identity(2), L1, L2), Error);
  }
  GarrettRep rep = garrett_representative(triples.front(), RatMatrix(0, 0), L1, L2);
  ComplexMatrix z(1, 1), w(1, 1);
  z(0, 0) = {0.0, 0.1};
  w(0, 0) = {0.0, 1.0};
  try {
    kernel_identity_check(rep, z, w, 1e-9);
    FAIL("expected NotInHalfSpace");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::NotInHalfSpace);
  }
  RatMatrix g = RatMatrix::identity(4);
  g(2, 0) = Rat(1, 3);
  CHECK_THROWS_AS(orbit_invariants(L1, L2, g), Error);
  // Maximality and isotropy are enforced.
  AltLattice S(alternating_gram({2})), S2(alternating_gram({2}));
  IntMatrix X{{1, 0, 0, 0}};
  CHECK_THROWS_AS(project_isotropic(S, S2, X), Error);
  IntMatrix Y{{1, 0, 0, 0}, {0, 1, 0, 0}};
  CHECK_THROWS_AS(project_isotropic(S, S2, Y), Error);
}

TEST_CASE("splitting off the radical") {
  AltLattice L = standard_lattice({1, 2});
  // X = span(e1, e2, f2) has radical span(e1).
  IntMatrix X{{1, 0, 0, 0}, {0, 1, 0, 0}, {0, 0, 0, 1}};
  RadicalSplit s = split_radical(L, X, {IntMatrix{{1, 0, 0, 0}}});
  CHECK(s.Xprime.rows() == 2);
  CHECK(determinant(s.Xprime * L.gram * s.Xprime.transpose()) != 0);
  CHECK(row_basis(vstack(s.Z, s.Xprime)) == row_basis(X));
  RadicalSplit t = split_radical(L, X, {IntMatrix(0, 4)});
  CHECK(determinant(t.Xprime * L.gram * t.Xprime.transpose()) == 0);
  CHECK_THROWS_AS(split_radical(L, X, {IntMatrix{{0, 0, 1, 0}}}), Error);
  CHECK_THROWS_AS(split_radical(L, X, {IntMatrix{{0, 1, 0, 0}}}), Error);
}
