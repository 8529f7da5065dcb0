#include <doctest.h>

#include <cmath>
#include <random>

#include "paramodular/automorphism.hpp"
#include "paramodular/theta.hpp"

using namespace paramodular;
using C = std::complex<double>;

namespace {

// E8 shells via D8 ∪ (D8 + 1/2), doubled coordinates.
std::vector<long> e8_shells_oracle(int bound) {
  std::vector<long> out(bound + 1, 0);
  const int lim = 2 * static_cast<int>(std::ceil(std::sqrt(2.0 * bound)));
  std::vector<int> x(8);
  auto visit = [&](auto&& self, int i, int parity) -> void {
    if (i == 8) {
      int s = 0, n = 0;
      for (int v : x) s += v, n += v * v;
      if (s % 4 != 0 || n % 8 != 0) return;
      if (n / 8 <= bound) ++out[n / 8];
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

ParamodularChain e8_chain(std::size_t which = 0) {
  QuadLattice E(e8_gram());
  auto subs = pmodular_sublattices(E, 2);
  return make_chain(E, {subs.at(which).coords}, {1, 2});
}

ThetaInput single_input(const IntMatrix& gram) {
  return {to_rational(gram), {RatMatrix::identity(gram.rows())}, {Rat(1, 2)}};
}

ComplexMat scalar(C z) {
  ComplexMat Z(1, 1);
  Z(0, 0) = z;
  return Z;
}

// Per-lattice counts of Q-values.
std::vector<long long> q_counts(const QuadLattice& L, long bound) {
  std::vector<long long> out(bound + 1, 0);
  for (const auto& [q, vs] : short_vectors(L, bound)) out[q] += static_cast<long long>(vs.size());
  return out;
}

}  // namespace

TEST_CASE("degree one coefficients of E8 match the shell oracle") {
  auto e = theta_coefficients(single_input(e8_gram()), 6, 10);
  auto shells = e8_shells_oracle(6);
  CHECK(e.n == 1);
  for (long q = 0; q <= 6; ++q) {
    // key is scale * b(x, x) = scale * 2Q
    ThetaKey k{static_cast<long>(e.scale.get_si() * 2 * q)};
    auto it = e.coefficients.find(k);
    REQUIRE(it != e.coefficients.end());
    CHECK(it->second == shells[q]);
  }
  CHECK(e.coefficients.size() == 7);
}

TEST_CASE("zero Gram has coefficient one") {
  auto ch = e8_chain();
  auto e = theta_coefficients(ch, 2);
  CHECK(e.coefficients.at(ThetaKey(3, 0)) == 1);
  for (const auto& [k, c] : e.coefficients) CHECK(c > 0);
}

TEST_CASE("parallel join equals the serial reference") {
  auto ch = e8_chain();
  auto in = chain_input(ch);
  auto e = theta_coefficients(in, 3, 3);
  CHECK(e.coefficients == theta_coefficients_reference(in, 3));

  // degree three on A2 with mixed sublattices and weights
  RatMatrix A2 = to_rational(IntMatrix{{2, 1}, {1, 2}});
  RatMatrix sub{{1, 1}, {0, 3}};
  ThetaInput in3{A2, {RatMatrix::identity(2), RatMatrix::identity(2).scaled(2), sub}, {Rat(1, 2), Rat(1, 4), Rat(1, 3)}};
  auto e3 = theta_coefficients(in3, 3, 3);
  CHECK(e3.n == 3);
  CHECK(e3.coefficients == theta_coefficients_reference(in3, 3));
  CHECK(e3.coefficients.size() > 10);
}

TEST_CASE("coefficient sum counts truncated tuples") {
  auto ch = e8_chain();
  const long B = 4;
  auto e = theta_coefficients(ch, B);
  Int total = 0;
  for (const auto& [k, c] : e.coefficients) total += c;
  auto n1 = q_counts(ch.member(0), B);
  auto n2 = q_counts(ch.member(1), 2 * B);
  Int expect = 0;
  for (long a = 0; a <= B; ++a)
    for (long b = 0; 2 * a + b <= 2 * B; ++b) expect += Int(long(n1[a])) * Int(long(n2[b]));
  CHECK(total == expect);
}

TEST_CASE("chain coefficients obey the level structure") {
  auto ch = e8_chain();
  auto e = theta_coefficients(ch, 4);
  CHECK(translation_invariant(e, ch.T));
  for (const auto& [k, c] : e.coefficients) {
    auto H = key_matrix(k, 2);
    // K-slot b-values are divisible by 2t = 4, cross terms only integral
    CHECK(H[1][1] % (4 * e.scale.get_si()) == 0);
    CHECK(H[0][1] % e.scale.get_si() == 0);
  }
  CHECK_FALSE(translation_invariant(e, {1, 4}));
}

TEST_CASE("permuting the chain permutes the keys") {
  auto ch = e8_chain();
  auto in = chain_input(ch);
  auto e = theta_coefficients(in, 3, 3);
  auto p = theta_coefficients(permuted_input(in, {1, 0}), 3, 3);
  REQUIRE(e.scale == p.scale);
  std::map<ThetaKey, Int> swapped;
  for (const auto& [k, c] : e.coefficients) swapped[{k[2], k[1], k[0]}] = c;
  CHECK(swapped == p.coefficients);
}

TEST_CASE("isometric chains have equal theta series") {
  auto a = theta_coefficients(e8_chain(0), 3);
  auto b = theta_coefficients(e8_chain(137), 3);
  CHECK(a.coefficients == b.coefficients);
}

TEST_CASE("evaluation near the cusp and at z = i") {
  auto ch = e8_chain();
  auto e = theta_coefficients(ch, 4);
  ComplexMat Z = ComplexMat::Identity(2, 2) * C(0, 4);
  auto v = theta_eval(e, Z, 1e-10);
  CHECK(std::abs(v.value - 1.0) < 1e-8);
  CHECK(v.tail < 1e-10);

  // Degree one: E4(i) = 3 Gamma(1/4)^8 / (2 pi)^6, and a direct shell sum.
  auto e1 = theta_coefficients(single_input(e8_gram()), 6, 10);
  auto w = theta_eval(e1, scalar(C(0, 1)), 1e-12);
  const double closed = 3 * std::pow(std::tgamma(0.25), 8) / std::pow(2 * M_PI, 6);
  auto shells = e8_shells_oracle(6);
  double direct = 0;
  for (int q = 0; q <= 6; ++q) direct += shells[q] * std::exp(-2 * M_PI * q);
  CHECK(std::abs(w.value - closed) < 1e-11);
  CHECK(std::abs(w.value - direct) < 1e-12);
  CHECK(w.tail < 1e-12);
}

TEST_CASE("evaluation is linear in the coefficients") {
  auto ch = e8_chain();
  auto a = theta_coefficients(ch, 3);
  auto b = theta_coefficients(e8_chain(5), 3);
  ThetaExpansion mix = a;
  for (auto& [k, c] : mix.coefficients) c *= 2;
  for (const auto& [k, c] : b.coefficients) mix.coefficients[k] += 3 * c;
  for (auto& h : mix.histograms)
    for (auto& x : h) x *= 5;
  std::mt19937_64 rng(3);
  for (int s = 0; s < 3; ++s) {
    ComplexMat Z = sample_near_fixed_point(ch.T, rng);
    Z.imag() *= 2.0;
    auto va = theta_eval(a, Z, 1e-6).value, vb = theta_eval(b, Z, 1e-6).value;
    auto vm = theta_eval(mix, Z, 1e-5).value;
    CHECK(std::abs(vm - (2.0 * va + 3.0 * vb)) < 1e-10);
  }
}

TEST_CASE("degree one inversion") {
  // Jacobi: Z with b(x, x) = 2x^2, dual b(y, y) = y^2 / 2.
  auto in = single_input(IntMatrix{{2}});
  auto e = theta_coefficients(in, 40, 60);
  auto d = theta_coefficients(dual_input(in), 40, 60);
  for (C z : {C(0.3, 1.1), C(-0.45, 0.9), C(0, 1), C(0.1, 2.0)}) {
    auto r = inversion_check(e, d, scalar(z), 1e-10);
    CHECK(r.ok);
    CHECK(r.tail < 1e-12);
  }
  // Direct sums for the Jacobi pair.
  C z(0.3, 1.1), lhs = 0, rhs = 0;
  for (int n = -40; n <= 40; ++n) {
    lhs += std::exp(C(0, M_PI) * (n * n / 2.0) * (-1.0 / z));
    rhs += std::exp(C(0, M_PI) * (2.0 * n * n) * z);
  }
  rhs *= std::sqrt(z / C(0, 1)) * std::sqrt(2.0);
  CHECK(std::abs(lhs - rhs) < 1e-12);
  CHECK(std::abs(lhs - inversion_check(e, d, scalar(z), 1).lhs) < 1e-12);

  auto e8 = theta_coefficients(single_input(e8_gram()), 8, 18);
  auto e8d = theta_coefficients(dual_input(single_input(e8_gram())), 8, 18);
  for (C z : {C(0, 1), C(0.6, 0.85), C(-0.3, 0.97)}) {
    auto r = inversion_check(e8, e8d, scalar(z), 1e-10);
    CHECK(r.ok);
    CHECK(r.tail < 1e-10);
  }
}

TEST_CASE("paramodularity of the E8 chain at a short truncation") {
  auto ch = e8_chain();
  auto e = theta_coefficients(ch, 5);
  std::mt19937_64 rng(11);
  for (int s = 0; s < 2; ++s) {
    ComplexMat Z = sample_near_fixed_point(ch.T, rng);
    auto r = paramodularity_check(ch, e, Z, 1e-6, 1e-6);
    CHECK(r.ok);
    CHECK(r.tail < 1e-6);
    bool saw_jt = false;
    for (const auto& g : r.generators) {
      CHECK(g.error < 1e-6);
      if (g.name.find("J") != std::string::npos) saw_jt = true;
    }
    CHECK(saw_jt);
  }
}

namespace {
// Bernoulli numbers by the standard recurrence.
Rat bernoulli(int n) {
  std::vector<Rat> B(n + 1);
  B[0] = 1;
  for (int m = 1; m <= n; ++m) {
    Rat s = 0;
    Int c = 1;  // binom(m + 1, j)
    for (int j = 0; j < m; ++j) {
      s += Rat(c) * B[j];
      c = c * (m + 1 - j) / (j + 1);
    }
    B[m] = -s / Rat(m + 1);
  }
  return B[n];
}
}  // namespace

TEST_CASE("genus theta of E8 against the Eisenstein series") {
  auto cl = enumerate_chain_classes(QuadLattice(e8_gram()), {1});
  REQUIRE(cl.size() == 1);
  auto g = genus_theta(cl, 6);
  CHECK(g.total_weight == Rat(1, 696729600));
  auto shells = e8_shells_oracle(6);
  for (long q = 0; q <= 6; ++q) CHECK(g.coefficients.at(ThetaKey{2 * q}) == Rat(shells[q]));
  for (const auto& [k, v] : g.coefficients) CHECK(v == Rat(g.classes[0].coefficients.at(k)));

  auto r = eisenstein_compare_deg1(g, 4, 6);
  CHECK(r.ok);
  CHECK(r.normalization == Rat(-8) / bernoulli(4));
  for (long l = 1; l <= 6; ++l) CHECK(r.eisenstein[l] == Rat(240) * Rat(divisor_sum(l, 3)));

  auto broken = g;
  broken.coefficients[ThetaKey{6}] += 1;
  auto bad = eisenstein_compare_deg1(broken, 4, 6);
  CHECK_FALSE(bad.ok);
  CHECK(bad.mismatches == std::vector<long>{3});
}

TEST_CASE("divisor sums") {
  for (long n = 1; n <= 30; ++n) {
    Int s = 0;
    for (long d = 1; d * d <= n; ++d)
      if (n % d == 0) {
        s += Int(d * d * d);
        if (d * d != n) s += Int((n / d) * (n / d) * (n / d));
      }
    CHECK(divisor_sum(n, 3) == s);
  }
}

TEST_CASE("theta error cases") {
  auto ch = e8_chain();
  auto e = theta_coefficients(ch, 3);
  ComplexMat Z = ComplexMat::Identity(2, 2) * C(0, 0.05);
  CHECK_THROWS_WITH_AS(theta_eval(e, Z, 1e-10), doctest::Contains("TailTooLarge"), Error);
  ComplexMat bad = ComplexMat::Identity(2, 2) * C(0, -1);
  CHECK_THROWS_AS(theta_eval(e, bad, 1e-10), Error);
  CHECK_THROWS_AS(genus_theta({}, 3), Error);
  auto g = genus_theta(enumerate_chain_classes(QuadLattice(e8_gram()), {1}), 4);
  CHECK_THROWS_AS(eisenstein_compare_deg1(g, 8, 4), Error);
  CHECK_THROWS_AS(eisenstein_compare_deg1(g, 4, 9), Error);
  // rank not divisible by 8, built without validation
  ParamodularChain small{QuadLattice(IntMatrix{{2, 1}, {1, 2}}), {IntMatrix::identity(2)}, {1}};
  auto es = theta_coefficients(small, 3);
  CHECK_THROWS_AS(paramodularity_check(small, es, scalar(C(0, 1)), 1e-8), Error);
}
