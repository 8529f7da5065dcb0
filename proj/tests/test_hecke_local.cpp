#include <random>
#include <set>

#include "doctest.h"
#include "paramodular/hecke_local.hpp"

using namespace paramodular;

namespace {

const std::vector<LocalShape> small_shapes(int p) {
  return {{p, 1, 0}, {p, 0, 1}, {p, 1, 1}, {p, 2, 0}, {p, 0, 2}};
}

RatMatrix diag_rat(std::initializer_list<Rat> d) { return RatMatrix::diagonal(std::vector<Rat>(d)); }

}  // namespace

TEST_CASE("classification examples") {
  const Int p = 2;
  LocalShape s11{p, 1, 1}, s10{p, 1, 0};
  auto id = classify_pair(s11, RatMatrix::identity(4));
  CHECK(id.r_minus == 0);
  CHECK(id.r_plus == 0);
  CHECK(id.mu == std::vector<int>{0, 0});

  auto dc = classify_pair(s11, diag_rat({Rat(2), Rat(1), Rat(1, 2), Rat(1)}));
  CHECK(dc.r_minus == 0);
  CHECK(dc.r_plus == 0);
  CHECK(dc.mu == std::vector<int>{1, 0});

  auto dm = classify_pair(s10, diag_rat({Rat(2), Rat(1)}));
  CHECK(dm.r_minus == 1);
  CHECK(dm.a2 == 0);
  CHECK(dm.b2 == 1);
  CHECK(dm.mu == std::vector<int>{1});

  CHECK_THROWS_AS(classify_pair(s10, diag_rat({Rat(4), Rat(1)})), Error);
  CHECK_THROWS_AS(classify_pair(s10, diag_rat({Rat(1, 2), Rat(1, 2)})), Error);
}

TEST_CASE("representatives classify back and satisfy transpose integrality") {
  for (int p : {2, 3})
    for (const auto& shape : small_shapes(p))
      for (int a2 = 0; a2 <= shape.n(); ++a2)
        for (int j = 0; j <= 3; ++j)
          for (const auto& dc : enumerate_double_cosets(shape, a2, shape.n() - a2, j)) {
            RatMatrix L = representative_lattice(dc);
            CHECK(classify_pair(shape, L) == dc);
            RatMatrix B = representative_block(dc);
            IntMatrix T = IntMatrix::diagonal(local_divisors({shape.p, dc.a2, dc.b2}));
            IntMatrix T2 = IntMatrix::diagonal(local_divisors(shape));
            CHECK(RatLattice(block_lattice(B, T, T2)) == RatLattice(L));
            CHECK(transpose_integrality(B, T, T2));
            RatMatrix D = representative_matrix(dc);
            CHECK(is_symplectic(D, standard_symplectic_form(shape.n())));
            if (a2 == shape.a) {
              RatMatrix lhs = rational_inverse(T) * B.transpose() * to_rational(T);
              CHECK(lhs == representative_block(transpose_partner(dc)));
            }
          }
  CHECK(transpose_integrality(RatMatrix::identity(2), IntMatrix{{1, 0}, {0, 2}}, IntMatrix{{1, 0}, {0, 2}}));
  // diag(1, p) against T = diag(1, p), T' = 1: T^-1 B^t T' = diag(1, 1).
  CHECK(transpose_integrality(diag_rat({Rat(1), Rat(2)}), IntMatrix{{1, 0}, {0, 2}}, IntMatrix::identity(2)));
  CHECK_FALSE(transpose_integrality(RatMatrix::identity(2), IntMatrix{{1, 0}, {0, 2}}, IntMatrix::identity(2)));
}

TEST_CASE("T(p^j) tuples") {
  LocalShape s10{2, 1, 0}, s11{2, 1, 1};
  CHECK(enumerate_Tpj(s11, 0).size() == 1);
  auto t10 = enumerate_Tpj(s10, 1);
  REQUIRE(t10.size() == 1);
  CHECK(t10[0].mu == std::vector<int>{1});
  auto t11 = enumerate_Tpj(s11, 1);
  CHECK(t11.size() == 3);
  std::set<std::pair<int, std::vector<int>>> got;
  for (const auto& dc : t11) got.insert({dc.r_minus, dc.mu});
  CHECK(got == std::set<std::pair<int, std::vector<int>>>{{0, {1, 0}}, {0, {0, 1}}, {1, {1, 0}}});
  CHECK_THROWS_AS(validate(LocalDoubleCoset{s11, 1, 1, 1, 1, {0, 0}}), Error);
}

TEST_CASE("classification is an orbit invariant") {
  std::mt19937_64 rng(99);
  for (int p : {2, 3})
    for (const auto& shape : small_shapes(p)) {
      AltLattice Lam(local_gram(shape));
      for (int j = 0; j <= 2; ++j)
        for (const auto& dc : enumerate_Tpj(shape, j)) {
          RatMatrix L = representative_lattice(dc);
          for (int t = 0; t < 3; ++t) {
            RatMatrix g = to_rational(random_isometry(Lam, rng, 10));
            CHECK(classify_pair(shape, L * g) == dc);
          }
        }
    }
}

TEST_CASE("neighbor formula and enumeration") {
  CHECK(neighbor_count_formula(2, 1, 0) == 6);
  CHECK(neighbor_count_formula(2, 1, 1) == 66);
  CHECK(neighbor_count_formula(3, 0, 1) == 12);
  for (int p : {2, 3})
    for (const auto& shape : small_shapes(p)) {
      auto fast = enumerate_neighbors(shape);
      auto ref = enumerate_neighbors_reference(shape);
      CHECK(fast.size() == ref.size());
      for (std::size_t i = 0; i < std::min(fast.size(), ref.size()); ++i) CHECK(fast[i] == ref[i]);
      CHECK(Int(fast.size()) == neighbor_count_formula(shape.p, shape.a, shape.b));
    }
  CHECK_THROWS_AS(enumerate_neighbors({2, 1, 1}, EnumerationBudget{10}), Error);
  for (int p : {5, 7, 11, 13})
    for (int n = 1; n <= 6; ++n)
      for (int n2 = 0; n2 <= n; ++n2) CHECK(neighbor_bound_holds(p, n - n2, n2));
}

TEST_CASE("left cosets partition the T(p^j) lattices") {
  for (int p : {2, 3})
    for (const auto& shape : small_shapes(p)) {
      auto levels = hecke_levels(shape, 2);
      CHECK(levels[1].size() == enumerate_neighbors(shape).size());
      for (int j = 0; j <= 2; ++j) {
        std::map<LocalDoubleCoset, int> counts;
        for (const auto& L : levels[j]) {
          RatMatrix b = L.basis();
          ++counts[classify_pair(shape, b)];
        }
        auto tuples = enumerate_Tpj(shape, j);
        CHECK(counts.size() == tuples.size());
        for (const auto& dc : tuples) {
          CHECK(counts[dc] > 0);
          RatLattice rep(representative_lattice(dc));
          CHECK(std::find(levels[j].begin(), levels[j].end(), rep) != levels[j].end());
        }
      }
      Int np = levels[1].size();
      CHECK(Int(levels[2].size()) <= np * np);
    }
  LocalShape s10{2, 1, 0};
  auto lc = left_cosets(enumerate_Tpj(s10, 1)[0]);
  CHECK(lc.size() == 6);
  CHECK(left_cosets(enumerate_Tpj(s10, 0)[0]).size() == 1);
}

TEST_CASE("Hecke products") {
  for (int p : {2, 3}) {
    LocalShape s10{p, 1, 0};
    // Bruhat-Tits tree count: T(p)^2 = T(p^2) + (p - 1) T(p) + p(p + 1) T(1).
    auto prod = hecke_product(s10, 1, 1);
    std::map<int, long long> by_weight;
    for (const auto& t : prod) by_weight[t.coset.weight()] = t.multiplicity;
    CHECK(prod.size() == 3);
    CHECK(by_weight[2] == 1);
    CHECK(by_weight[1] == p - 1);
    CHECK(by_weight[0] == p * (p + 1));
  }
  LocalShape s11{2, 1, 1};
  auto unit = hecke_product(s11, 0, 1);
  CHECK(unit.size() == 3);
  for (const auto& t : unit) CHECK(t.multiplicity == 1);
  CHECK(hecke_product(s11, 1, 1) == hecke_product(s11, 1, 1));
  LocalShape s10{3, 1, 0};
  CHECK(hecke_product(s10, 1, 2) == hecke_product(s10, 2, 1));
}

TEST_CASE("global representatives") {
  IntMatrix T = IntMatrix{{1, 0}, {0, 6}};
  RatMatrix I = global_representative(T, T, {});
  CHECK(I.is_identity());

  LocalShape s2{2, 1, 1}, s3{3, 1, 1}, s5{5, 2, 0};
  for (const auto& d2 : enumerate_Tpj(s2, 1))
    for (const auto& d3 : enumerate_Tpj(s3, 1)) {
      std::map<Int, LocalDoubleCoset> locals{{Int(2), d2}, {Int(3), d3}};
      RatMatrix B = global_representative(T, T, locals);
      CHECK(is_integral(B));
      CHECK(determinant(B) == 6);
      CHECK(transpose_integrality(B, T, T));
      auto cls = hecke_class(B, T, T);
      CHECK(cls.at(2) == d2);
      CHECK(cls.at(3) == d3);
    }
  for (const auto& d5 : enumerate_Tpj(s5, 2)) {
    RatMatrix B = global_representative(T, T, {{Int(5), d5}});
    CHECK(determinant(B) == 25);
    CHECK(hecke_class(B, T, T).at(5) == d5);
  }
  // Different levels on the two sides.
  IntMatrix Tt = IntMatrix{{1, 0}, {0, 2}}, Ts = IntMatrix::identity(2);
  LocalShape src{2, 2, 0};
  for (const auto& dc : enumerate_double_cosets(src, 1, 1, 1)) {
    RatMatrix B = global_representative(Tt, Ts, {{Int(2), dc}});
    CHECK(transpose_integrality(B, Tt, Ts));
    CHECK(hecke_class(B, Tt, Ts).at(2) == dc);
  }
  CHECK_THROWS_AS(global_representative(T, T, {{Int(2), enumerate_Tpj(LocalShape{2, 2, 0}, 1)[0]}}), Error);
  CHECK(factor_Tm(T, 1).empty());
  CHECK(factor_Tm(T, 12) == std::vector<std::pair<Int, int>>{{2, 2}, {3, 1}});
  CHECK(factor_Tm(T, 7) == std::vector<std::pair<Int, int>>{{7, 1}});
}

TEST_CASE("parallel level and product enumeration match the serial paths") {
  for (const auto& shape : small_shapes(2)) {
    auto a = hecke_levels(shape, 2), b = hecke_levels_reference(shape, 2);
    REQUIRE(a.size() == b.size());
    for (std::size_t j = 0; j < a.size(); ++j) CHECK(a[j] == b[j]);
  }
  LocalShape s{3, 1, 0};
  CHECK(hecke_product(s, 1, 2) == hecke_product_reference(s, 1, 2));
}
