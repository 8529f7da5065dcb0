#include <random>
#include <set>

#include "doctest.h"
#include "paramodular/alt_lattice.hpp"

using namespace paramodular;

namespace {

// gcd of maximal minors of Z * G: the index of <Z, Lambda> in Hom(Z, Z).
Int pairing_index(const AltLattice& L, const IsotropicSubmodule& Z) {
  IntMatrix a = Z.generators * L.gram;
  const std::size_t r = a.rows(), n = a.cols();
  if (r == 0) return 1;
  Int g = 0;
  for (unsigned mask = 0; mask < (1u << n); ++mask) {
    if (static_cast<std::size_t>(__builtin_popcount(mask)) != r) continue;
    IntMatrix m(r, r);
    std::size_t c = 0;
    for (std::size_t j = 0; j < n; ++j)
      if (mask >> j & 1) {
        for (std::size_t i = 0; i < r; ++i) m(i, c) = a(i, j);
        ++c;
      }
    Int d = determinant(m);
    mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), d.get_mpz_t());
  }
  return g;
}

IntVector level_vector(int m, int ell, int p) {
  IntVector T;
  for (int i = 0; i < m; ++i) T.push_back(i < m - ell ? 1 : p);
  return T;
}

}  // namespace

TEST_CASE("standard lattices and para-symplectic bases") {
  CHECK(standard_lattice({1}).gram == IntMatrix{{0, 1}, {-1, 0}});
  CHECK(standard_lattice({1, 2}).gram == alternating_gram({1, 2}));
  CHECK_THROWS_AS(standard_lattice({}), Error);
  CHECK_THROWS_AS(standard_lattice({1, 0}), Error);

  auto pb = para_symplectic_basis(AltLattice(alternating_gram({2, 3})));
  CHECK(pb.divisors == IntVector{1, 6});
  auto five = para_symplectic_basis(AltLattice(IntMatrix{{0, 5}, {-5, 0}}));
  CHECK(five.divisors == IntVector{5});
  CHECK_THROWS_AS(para_symplectic_basis(AltLattice(IntMatrix(2, 2))), Error);

  CHECK(level_and_det(standard_lattice({1, 3})) == std::pair<Int, Int>(3, 3));
  CHECK(level_and_det(standard_lattice({1, 1})) == std::pair<Int, Int>(1, 1));
  CHECK(level_and_det(standard_lattice({1, 2, 2})) == std::pair<Int, Int>(2, 4));
}

TEST_CASE("para-symplectic basis of disguised lattices") {
  std::mt19937_64 rng(5);
  std::uniform_int_distribution<int> d(-2, 2);
  std::vector<IntVector> levels{{1, 2}, {2, 3}, {1, 1, 6}, {3, 3}, {1, 10, 10}};
  for (const auto& T : levels) {
    for (int t = 0; t < 10; ++t) {
      std::size_t n = 2 * T.size();
      IntMatrix u = IntMatrix::identity(n);
      for (int s = 0; s < 15; ++s) {
        std::size_t i = rng() % n, j = rng() % n;
        if (i == j) continue;
        Int c = d(rng);
        for (std::size_t k = 0; k < n; ++k) u(i, k) += c * u(j, k);
      }
      AltLattice L(u * alternating_gram(T) * u.transpose());
      auto pb = para_symplectic_basis(L);
      CHECK(pb.transform * L.gram * pb.transform.transpose() == alternating_gram(pb.divisors));
      CHECK(abs(determinant(pb.transform)) == 1);
      // Each d_i appears twice among the elementary divisors of the Gram.
      IntVector ed = elementary_divisors(L.gram);
      for (std::size_t i = 0; i < pb.divisors.size(); ++i) {
        CHECK(ed[2 * i] == pb.divisors[i]);
        CHECK(ed[2 * i + 1] == pb.divisors[i]);
      }
    }
  }
}

TEST_CASE("adapting to isotropic submodules") {
  const int p = 3;
  AltLattice L = standard_lattice({1, p});
  auto a1 = adapt_to_isotropic(L, {IntMatrix{{1, 0, 0, 0}}});
  CHECK(a1.d == IntVector{1});
  CHECK(para_symplectic_basis(a1.complement).divisors == IntVector{p});
  auto a2 = adapt_to_isotropic(L, {IntMatrix{{0, 1, 0, 0}}});
  CHECK(a2.d == IntVector{p});
  CHECK(para_symplectic_basis(a2.complement).divisors == IntVector{1});
  CHECK(adapt_to_isotropic(L, {IntMatrix{{1, 1, 0, 0}}}).d == IntVector{1});
  CHECK(d_invariant(L, {IntMatrix{{1, 0, 0, 0}, {0, 1, 0, 0}}}) == p);
  CHECK(orbit_equivalent(L, {IntMatrix{{1, 0, 0, 0}}}, {IntMatrix{{1, 1, 0, 0}}}));
  CHECK_FALSE(orbit_equivalent(L, {IntMatrix{{1, 0, 0, 0}}}, {IntMatrix{{0, 1, 0, 0}}}));

  CHECK_THROWS_AS(adapt_to_isotropic(L, {IntMatrix{{1, 0, 0, 0}, {0, 0, 1, 0}}}), Error);
  CHECK_THROWS_AS(adapt_to_isotropic(L, {IntMatrix{{2, 0, 0, 0}}}), Error);
  CHECK_THROWS_AS(adapt_to_isotropic(standard_lattice({1, 4}), {IntMatrix{{1, 0, 0, 0}}}), Error);

  std::mt19937_64 rng(17);
  AltLattice big = standard_lattice({1, 2, 2});
  for (int t = 0; t < 50; ++t) {
    int u = 1 + static_cast<int>(rng() % 3);
    auto Z = random_isotropic(big, u, rng);
    auto ad = adapt_to_isotropic(big, Z);
    IntMatrix m = vstack(ad.e, ad.f);
    CHECK((m * big.gram * ad.complement_basis.transpose()).is_zero());
    CHECK(abs(determinant(vstack(m, ad.complement_basis))) == 1);
    CHECK(RatLattice(ad.e) == RatLattice(Z.generators));
    CHECK((ad.f * big.gram * ad.f.transpose()).is_zero());
    Int prod = 1;
    for (const auto& d : ad.d) prod *= d;
    CHECK(prod == pairing_index(big, Z));
  }
}

TEST_CASE("d is an orbit invariant") {
  std::mt19937_64 rng(23);
  for (const auto& T : std::vector<IntVector>{{1, 2}, {1, 3, 3}, {2, 2}}) {
    AltLattice L = standard_lattice(T);
    for (int t = 0; t < 30; ++t) {
      int u = 1 + static_cast<int>(rng() % T.size());
      auto Z = random_isotropic(L, u, rng);
      IntMatrix g = random_isometry(L, rng);
      CHECK(g * L.gram * g.transpose() == L.gram);
      IsotropicSubmodule gz{Z.generators * g};
      CHECK(d_invariant(L, gz) == d_invariant(L, Z));
    }
  }
}

TEST_CASE("admissible values and cusp counts") {
  CHECK(admissible_d_values(2, 1, 2, 2) == std::vector<Int>{1, 2});
  CHECK(admissible_d_values(2, 2, 2, 2) == std::vector<Int>{2});
  CHECK(admissible_d_values(3, 1, 1, 1) == std::vector<Int>{1});
  CHECK_THROWS_AS(admissible_d_values(2, 3, 2, 2), Error);
  CHECK(cusp_count(2, 1, {{2, 1}}) == 2);
  CHECK(cusp_count(2, 2, {{2, 1}}) == 1);
  CHECK(cusp_count(3, 1, {{2, 0}, {3, 0}}) == 1);
}

TEST_CASE("sampled d-values realize exactly the admissible set") {
  std::mt19937_64 rng(2024);
  for (int p : {2, 3})
    for (int m = 1; m <= 3; ++m)
      for (int ell = 0; ell <= m; ++ell) {
        IntVector T = level_vector(m, ell, p);
        AltLattice L = standard_lattice(T);
        auto [N, D] = level_and_det(L);
        for (int u = 1; u <= m; ++u) {
          std::set<Int> seen;
          for (int s = 0; s < 300; ++s) {
            auto Z = random_isotropic(L, u, rng);
            Int d = d_invariant(L, Z);
            CHECK(d == pairing_index(L, Z));
            seen.insert(d);
          }
          auto adm = admissible_d_values(m, u, N, D);
          CHECK(std::vector<Int>(seen.begin(), seen.end()) == adm);
          std::map<Int, int> ells;
          if (ell > 0) ells[p] = ell;
          CHECK(cusp_count(m, u, ells) == Int(adm.size()));
        }
      }
}

TEST_CASE("special linear lifts") {
  std::mt19937_64 rng(41);
  IntMatrix a2{{0, 1}, {-1, 0}};
  IntMatrix a3{{2, 1, 0}, {0, 2, 0}, {1, 1, 1}};  // det 4 = 1 mod 3
  auto S = lift_special_linear({{Int(2), IntMatrix{{0, 1}, {1, 0}}}, {Int(3), a2}}, 2);
  CHECK(determinant(S) == 1);
  for (std::size_t i = 0; i < 2; ++i)
    for (std::size_t j = 0; j < 2; ++j) {
      CHECK(mpz_divisible_p(Int(S(i, j) - (i == j ? 0 : 1)).get_mpz_t(), Int(2).get_mpz_t()));
      CHECK(mpz_divisible_p(Int(S(i, j) - a2(i, j)).get_mpz_t(), Int(3).get_mpz_t()));
    }
  auto S3 = lift_special_linear({{Int(3), a3}}, 3);
  CHECK(determinant(S3) == 1);
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 3; ++j)
      CHECK(mpz_divisible_p(Int(S3(i, j) - a3(i, j)).get_mpz_t(), Int(3).get_mpz_t()));
}

TEST_CASE("cusp representatives") {
  CHECK(cusp_permutation(2, 1, 1, 0) == std::vector<std::size_t>{1, 0});
  CHECK(cusp_permutation(2, 1, 1, 1) == std::vector<std::size_t>{0, 1});
  for (int p : {2, 3, 5})
    for (int m = 1; m <= 3; ++m)
      for (int ell = 0; ell <= m; ++ell) {
        AltLattice L = standard_lattice(level_vector(m, ell, p));
        auto [N, D] = level_and_det(L);
        for (int u = 0; u <= m; ++u)
          for (const auto& d : admissible_d_values(m, u, N, D)) {
            auto rep = cusp_representative(L, u, d);
            CHECK(determinant(rep.S) == 1);
            CHECK(is_symplectic(rep.gamma, standard_symplectic_form(m)));
            if (u == 0 || N == 1) CHECK(rep.S.is_identity());
            if (u > 0) CHECK(d_invariant(L, cusp_submodule(rep, u)) == d);
          }
        if (ell > 0 && ell < m)
          CHECK_THROWS_AS(cusp_representative(L, m, Int(1)), Error);
      }
}
