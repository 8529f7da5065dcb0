#include "paramodular/garrett.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace paramodular {

namespace {

IntMatrix columns(const IntMatrix& m, std::size_t c0, std::size_t nc) { return m.block(0, c0, m.rows(), nc); }

IntMatrix hstack(const IntMatrix& a, const IntMatrix& b) {
  IntMatrix out(a.rows(), a.cols() + b.cols());
  out.set_block(0, 0, a);
  out.set_block(0, a.cols(), b);
  return out;
}

IntMatrix coordinates_in(const IntMatrix& basis, const IntMatrix& rows) {
  IntMatrix out(rows.rows(), basis.rows());
  for (std::size_t i = 0; i < rows.rows(); ++i) {
    auto c = solve_left(basis, rows.row(i));
    if (!c) throw Error(ErrorCode::NotContainedInRadical, "vector outside the expected sublattice");
    out.set_row(i, *c);
  }
  return out;
}

// Slots of factor 1 (size m) and factor 2 (size n) in (e, e', v, v').
std::size_t slot1(std::size_t i, std::size_t m, std::size_t n) { return i < m ? i : m + n + (i - m); }
std::size_t slot2(std::size_t i, std::size_t m, std::size_t n) { return i < n ? m + i : 2 * m + n + (i - n); }


}  // namespace

std::vector<GarrettTriple> admissible_triples(int m, int n, const Int& N1, const Int& N2, const Int& D1,
                                              const Int& D2) {
  if (m < 0 || n < 0) throw Error(ErrorCode::InvalidRank, "negative rank");
  std::vector<GarrettTriple> out;
  for (int r = 0; r <= std::min(m, n); ++r)
    for (const auto& d : admissible_d_values(m, m - r, N1, D1))
      for (const auto& d2 : admissible_d_values(n, n - r, N2, D2))
        out.push_back({d, d2, r, m, n, N1, N2, D1, D2});
  std::sort(out.begin(), out.end());
  return out;
}

IntVector tilde_divisors(const IntMatrix& S, const IntVector& divisors, int count) {
  IntVector out;
  for (int j = 0; j < count; ++j) {
    IntVector col;
    for (std::size_t i = 0; i < S.rows(); ++i) col.push_back(S(i, j) * divisors[i]);
    out.push_back(gcd_of(col));
  }
  return out;
}

RatMatrix garrett_lattice_basis(const IntVector& divisors1, const IntVector& divisors2) {
  const std::size_t m = divisors1.size(), n = divisors2.size();
  RatMatrix Q = RatMatrix::identity(2 * (m + n));
  for (std::size_t i = 0; i < m; ++i) Q(m + n + i, m + n + i) = divisors1[i];
  for (std::size_t i = 0; i < n; ++i) Q(2 * m + n + i, 2 * m + n + i) = divisors2[i];
  return Q;
}

bool preserves_lattice(const RatMatrix& g, const IntVector& divisors1, const IntVector& divisors2) {
  RatMatrix Q = garrett_lattice_basis(divisors1, divisors2);
  if (g.rows() != Q.rows() || g.cols() != Q.cols()) return false;
  RatMatrix h = rational_inverse(Q) * g * Q;
  return is_integral(h) && abs(determinant(h)) == 1;
}

GarrettRep garrett_representative(const GarrettTriple& triple, const RatMatrix& B, const AltLattice& L1,
                                  const AltLattice& L2) {
  GarrettRep out;
  out.triple = triple;
  const int r = triple.r;
  CuspRepresentative c1 = cusp_representative(L1, triple.m - r, triple.d);
  CuspRepresentative c2 = cusp_representative(L2, triple.n - r, triple.d2);
  const std::size_t m = c1.S.rows(), n = c2.S.rows();
  if (static_cast<int>(m) != triple.m || static_cast<int>(n) != triple.n)
    throw Error(ErrorCode::DimensionMismatch, "triple ranks do not match the lattices");
  out.S1 = c1.S;
  out.S2 = c2.S;
  out.divisors1 = c1.basis.divisors;
  out.divisors2 = c2.basis.divisors;
  IntVector t = tilde_divisors(c1.S, out.divisors1, r), t2 = tilde_divisors(c2.S, out.divisors2, r);
  out.T = IntMatrix::diagonal(t);
  out.T2 = IntMatrix::diagonal(t2);
  if (B.rows() != static_cast<std::size_t>(r) || B.cols() != static_cast<std::size_t>(r))
    throw Error(ErrorCode::DimensionMismatch, "B must be r x r");
  if (r > 0 && determinant(B) == 0) throw Error(ErrorCode::SingularMatrix, "B is singular");
  if (!transpose_integrality(B, out.T, out.T2))
    throw Error(ErrorCode::IntegralityViolation, "T^-1 B^t T' is not integral");
  out.B = B;

  RatMatrix Tp = to_rational(out.T2);
  RatMatrix K = B.transpose() * Tp;  // B^t T'
  RatMatrix mid(m + n, m + n);
  mid.set_block(0, m, K);
  mid.set_block(m, 0, K.transpose());
  RatMatrix s1 = rational_inverse(c1.S), s2 = rational_inverse(c2.S);
  RatMatrix S = block_diagonal(s1, s2);
  out.C = S.transpose() * mid * S;
  out.full = RatMatrix::identity(2 * (m + n));
  out.full.set_block(m + n, 0, out.C);
  if (!is_symplectic(out.full, standard_symplectic_form(m + n)))
    throw Error(ErrorCode::NotStabilizing, "representative is not symplectic");
  if (!preserves_lattice(out.full, out.divisors1, out.divisors2))
    throw Error(ErrorCode::IntegralityViolation, "representative does not preserve the lattice");
  return out;
}

namespace {

// X ∩ L' for L = M(Z) ⊥ L': the vectors of X orthogonal to the partners f of Z.
IntMatrix intersect_complement(const IntMatrix& X, const IntMatrix& gram, const IntMatrix& F) {
  if (F.rows() == 0) return row_basis(X);
  IntMatrix K = left_kernel(X * gram * F.transpose());
  return row_basis(K * X);
}

IsotropicAdaptation adapt(const AltLattice& L, const IntMatrix& Z) { return adapt_to_isotropic(L, {Z}); }

IntMatrix pad(const IntMatrix& a, std::size_t before, std::size_t after) {
  IntMatrix out(a.rows(), before + a.cols() + after);
  out.set_block(0, before, a);
  return out;
}

}  // namespace

IsotropicPair project_isotropic(const AltLattice& L1, const AltLattice& L2, const IntMatrix& X) {
  const std::size_t m2 = L1.rank(), n2 = L2.rank();
  if (X.cols() != m2 + n2) throw Error(ErrorCode::DimensionMismatch, "X has the wrong width");
  IntMatrix G = block_diagonal(L1.gram, L2.gram);
  if (!(X * G * X.transpose()).is_zero()) throw Error(ErrorCode::NotIsotropic, "X is not isotropic");
  IntMatrix Xb = row_basis(X);
  if (2 * Xb.rows() != m2 + n2 || !(saturate(Xb) == Xb))
    throw Error(ErrorCode::NotMaximal, "X is not a primitive maximal isotropic submodule");

  IsotropicPair out;
  IntMatrix P1 = columns(Xb, 0, m2), P2 = columns(Xb, m2, n2);
  out.X1 = row_basis(P1);
  out.X2 = row_basis(P2);
  out.rad1 = row_basis(left_kernel(P2) * P1);
  out.rad2 = row_basis(left_kernel(P1) * P2);
  out.r = static_cast<int>(m2 / 2 - out.rad1.rows());
  if (static_cast<int>(n2 / 2 - out.rad2.rows()) != out.r)
    throw Error(ErrorCode::InvalidInvariant, "radical ranks disagree");

  IsotropicAdaptation a1 = adapt(L1, out.rad1), a2 = adapt(L2, out.rad2);
  out.comp1 = a1.complement_basis;
  out.comp2 = a2.complement_basis;
  IntMatrix F = vstack(pad(a1.f, 0, n2), pad(a2.f, m2, 0));
  IntMatrix Xp = intersect_complement(Xb, G, F);
  if (Xp.rows() != static_cast<std::size_t>(2 * out.r))
    throw Error(ErrorCode::InvalidInvariant, "unexpected rank of X ∩ L'");
  out.Xprime1 = coordinates_in(out.comp1, columns(Xp, 0, m2));
  out.Xprime2 = coordinates_in(out.comp2, columns(Xp, m2, n2));
  if (out.r > 0) out.phi = rational_inverse(out.Xprime1) * to_rational(out.Xprime2);
  return out;
}

IntMatrix rebuild_isotropic(const IsotropicPair& pair, std::size_t m2, std::size_t n2) {
  IntMatrix gens = vstack(pad(pair.rad1, 0, n2), pad(pair.rad2, m2, 0));
  if (pair.r > 0) {
    // x1 + phi(x1) over a basis of X1 modulo its radical.
    IntMatrix y1 = pair.Xprime1 * pair.comp1;
    IntMatrix y2 = to_integer(to_rational(pair.Xprime1) * pair.phi) * pair.comp2;
    gens = vstack(gens, hstack(y1, y2));
  }
  return row_basis(gens);
}

RadicalSplit split_radical(const AltLattice& L, const IntMatrix& X, const IsotropicSubmodule& Z) {
  if (X.cols() != L.rank() || Z.generators.cols() != L.rank())
    throw Error(ErrorCode::DimensionMismatch, "dimension mismatch");
  IntMatrix Xb = row_basis(X);
  for (std::size_t i = 0; i < Z.rank(); ++i)
    if (!solve_left(Xb, Z.generators.row(i)))
      throw Error(ErrorCode::NotContainedInRadical, "Z is not contained in X");
  if (!(Z.generators * L.gram * Xb.transpose()).is_zero())
    throw Error(ErrorCode::NotContainedInRadical, "Z is not orthogonal to X");
  RadicalSplit out;
  out.Z = row_basis(Z.generators);
  if (Z.rank() == 0) {
    out.Xprime = Xb;
    return out;
  }
  IsotropicAdaptation a = adapt(L, out.Z);
  out.Xprime = intersect_complement(Xb, L.gram, a.f);
  return out;
}

std::map<Int, LocalDoubleCoset> canonical_classes(const std::map<Int, LocalDoubleCoset>& classes) {
  std::map<Int, LocalDoubleCoset> out;
  for (const auto& [p, dc] : classes)
    if (dc.weight() > 0 || dc.source.b > 0 || dc.b2 > 0) out.emplace(p, dc);
  return out;
}

OrbitInvariants orbit_invariants(const AltLattice& L1, const AltLattice& L2, const RatMatrix& g) {
  const IntVector t1 = para_symplectic_basis(L1).divisors, t2 = para_symplectic_basis(L2).divisors;
  const std::size_t m = t1.size(), n = t2.size();
  if (g.rows() != 2 * (m + n) || g.cols() != 2 * (m + n))
    throw Error(ErrorCode::DimensionMismatch, "g has the wrong size");
  if (!is_symplectic(g, standard_symplectic_form(m + n)))
    throw Error(ErrorCode::NotStabilizing, "g is not symplectic");
  if (!preserves_lattice(g, t1, t2)) throw Error(ErrorCode::NotStabilizing, "g does not preserve the lattice");

  RatMatrix Q = garrett_lattice_basis(t1, t2);
  IntMatrix h = to_integer(rational_inverse(Q) * g * Q);
  // Columns 0..m+n-1 of h span g X0; reorder coordinates to (e, f | e', f').
  IntMatrix X(m + n, 2 * (m + n));
  for (std::size_t j = 0; j < m + n; ++j) {
    for (std::size_t i = 0; i < 2 * m; ++i) X(j, i) = h(slot1(i, m, n), j);
    for (std::size_t i = 0; i < 2 * n; ++i) X(j, 2 * m + i) = h(slot2(i, m, n), j);
  }
  AltLattice S1(alternating_gram(t1)), S2(alternating_gram(t2));
  IsotropicPair pair = project_isotropic(S1, S2, X);

  OrbitInvariants out;
  out.r = pair.r;
  out.d = d_invariant(S1, {pair.rad1});
  out.d2 = d_invariant(S2, {pair.rad2});
  if (pair.r > 0) {
    IntMatrix gram2 = pair.comp2 * S2.gram * pair.comp2.transpose();
    std::set<Int> primes;
    for (const auto& p : prime_divisors(lcm_of(t1) * lcm_of(t2))) primes.insert(p);
    for (const auto& p : prime_divisors(common_denominator(pair.phi))) primes.insert(p);
    Rat det = determinant(pair.phi);
    for (const auto& p : prime_divisors(abs(det.get_num()) * det.get_den())) primes.insert(p);
    std::map<Int, LocalDoubleCoset> classes;
    for (const auto& p : primes) classes.emplace(p, classify_lattice(p, gram2, pair.phi));
    out.classes = canonical_classes(classes);
  }
  return out;
}

RatMatrix random_factor_element(const IntVector& divisors1, const IntVector& divisors2, std::mt19937_64& rng) {
  const std::size_t m = divisors1.size(), n = divisors2.size();
  RatMatrix g(2 * (m + n), 2 * (m + n));
  auto place = [&](const IntVector& t, auto slot) {
    const std::size_t k = t.size();
    if (k == 0) return;
    IntMatrix M = random_isometry(AltLattice(alternating_gram(t)), rng);
    IntVector q(2 * k, Int(1));
    std::copy(t.begin(), t.end(), q.begin() + k);
    // Column action in the rescaled coordinates: Q M^t Q^-1.
    for (std::size_t i = 0; i < 2 * k; ++i)
      for (std::size_t j = 0; j < 2 * k; ++j) g(slot(i), slot(j)) = Rat(q[i] * M(j, i)) / q[j];
  };
  place(divisors1, [&](std::size_t i) { return slot1(i, m, n); });
  place(divisors2, [&](std::size_t i) { return slot2(i, m, n); });
  return g;
}

RatMatrix random_parabolic_element(std::size_t total, std::mt19937_64& rng) {
  std::uniform_int_distribution<int> coeff(-2, 2);
  RatMatrix g = RatMatrix::identity(2 * total);
  for (std::size_t i = 0; i < total; ++i)
    for (std::size_t j = i; j < total; ++j) {
      int c = coeff(rng);
      g(i, total + j) = c;
      g(j, total + i) = c;
    }
  return g;
}

Eigen::MatrixXd to_double(const RatMatrix& m) {
  Eigen::MatrixXd out(m.rows(), m.cols());
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) out(i, j) = m(i, j).get_d();
  return out;
}

namespace {

void require_half_space(const ComplexMatrix& z, const char* name) {
  if (z.rows() != z.cols()) throw Error(ErrorCode::DimensionMismatch, std::string(name) + " is not square");
  if ((z - z.transpose()).norm() > 1e-12 * (1 + z.norm()))
    throw Error(ErrorCode::NotInHalfSpace, std::string(name) + " is not symmetric");
  if (z.rows() == 0) return;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(z.imag());
  // Points too close to the boundary make the determinants ill conditioned.
  if (es.eigenvalues().minCoeff() < 0.5)
    throw Error(ErrorCode::NotInHalfSpace, std::string(name) + " has Im eigenvalue below 1/2");
}

}  // namespace

KernelCheck kernel_identity_check(const GarrettRep& rep, const ComplexMatrix& z, const ComplexMatrix& w,
                                  double tol) {
  const int m = rep.triple.m, n = rep.triple.n, r = rep.triple.r;
  if (z.rows() != m || w.rows() != n) throw Error(ErrorCode::DimensionMismatch, "z, w sizes");
  require_half_space(z, "z");
  require_half_space(w, "w");
  ComplexMatrix iota = ComplexMatrix::Zero(m + n, m + n);
  iota.topLeftCorner(m, m) = z;
  iota.bottomRightCorner(n, n) = w;
  ComplexMatrix C = to_double(rep.C).cast<std::complex<double>>();
  KernelCheck out;
  out.lhs = (C * iota + ComplexMatrix::Identity(m + n, m + n)).determinant();

  ComplexMatrix s1 = to_double(rational_inverse(rep.S1)).cast<std::complex<double>>();
  ComplexMatrix s2 = to_double(rational_inverse(rep.S2)).cast<std::complex<double>>();
  ComplexMatrix zs = (s1 * z * s1.transpose()).topLeftCorner(r, r);
  ComplexMatrix ws = (s2 * w * s2.transpose()).topLeftCorner(r, r);
  ComplexMatrix K = to_double(rep.B.transpose() * to_rational(rep.T2)).cast<std::complex<double>>();
  out.rhs = r == 0 ? std::complex<double>(1)
                   : (ComplexMatrix::Identity(r, r) - K * ws * K.transpose() * zs).determinant();
  out.error = std::abs(out.lhs - out.rhs) / std::max(1.0, std::abs(out.lhs));
  out.ok = out.error <= tol;
  return out;
}

ComplexMatrix random_half_space_point(std::size_t n, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Eigen::MatrixXd x(n, n), a(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      x(i, j) = u(rng);
      a(i, j) = 0.5 * u(rng);
    }
  Eigen::MatrixXd re = (x + x.transpose()) / 2;
  Eigen::MatrixXd im = Eigen::MatrixXd::Identity(n, n) + a * a.transpose();
  ComplexMatrix out(n, n);
  out.real() = re;
  out.imag() = im;
  return out;
}

}  // namespace paramodular
