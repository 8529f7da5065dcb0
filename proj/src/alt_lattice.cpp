#include "paramodular/alt_lattice.hpp"

#include <algorithm>
#include <numeric>

namespace paramodular {

namespace {

IntVector axpy(const IntVector& x, const Int& a, const IntVector& y) {
  IntVector out = x;
  for (std::size_t i = 0; i < out.size(); ++i) out[i] += a * y[i];
  return out;
}

// g = sum c_i v_i with g = gcd(v), g >= 0.
Int extended_gcd(const IntVector& v, IntVector& coeffs) {
  coeffs.assign(v.size(), Int(0));
  Int g = 0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (v[i] == 0) continue;
    Int s, t, h;
    mpz_gcdext(h.get_mpz_t(), s.get_mpz_t(), t.get_mpz_t(), g.get_mpz_t(), v[i].get_mpz_t());
    for (std::size_t j = 0; j < i; ++j) coeffs[j] *= s;
    coeffs[i] = t;
    g = h;
  }
  return g;
}

Int mod_positive(const Int& a, const Int& m) {
  Int r;
  mpz_fdiv_r(r.get_mpz_t(), a.get_mpz_t(), m.get_mpz_t());
  return r;
}

}  // namespace

AltLattice::AltLattice(IntMatrix g) : gram(std::move(g)) {
  if (!gram.square()) throw Error(ErrorCode::DimensionMismatch, "Gram matrix must be square");
  for (std::size_t i = 0; i < gram.rows(); ++i)
    for (std::size_t j = 0; j <= i; ++j)
      if (gram(i, j) != -gram(j, i))
        throw Error(ErrorCode::InvalidArgument, "Gram matrix is not alternating");
}

Int AltLattice::pair(const IntVector& x, const IntVector& y) const {
  IntVector xg = gram.left_apply(x);
  Int s = 0;
  for (std::size_t i = 0; i < y.size(); ++i) s += xg[i] * y[i];
  return s;
}

AltLattice standard_lattice(const IntVector& T) {
  if (T.empty()) throw Error(ErrorCode::InvalidLevel, "empty level");
  for (const auto& t : T)
    if (t <= 0) throw Error(ErrorCode::InvalidLevel, "level entries must be positive");
  return AltLattice(alternating_gram(T));
}

ParaBasis para_symplectic_basis(const AltLattice& L) {
  const std::size_t n = L.rank();
  if (n == 0 || determinant(L.gram) == 0) throw Error(ErrorCode::DegenerateForm, "degenerate form");
  std::vector<IntVector> work;
  for (std::size_t i = 0; i < n; ++i) work.push_back(IntMatrix::identity(n).row(i));
  std::vector<IntVector> es, fs;
  IntVector ds;
  while (!work.empty()) {
    // Restart point: pick the smallest nonzero pairing in the working set.
    while (true) {
      std::size_t bi = 0, bj = 0;
      Int best = 0;
      for (std::size_t i = 0; i < work.size(); ++i)
        for (std::size_t j = i + 1; j < work.size(); ++j) {
          Int v = L.pair(work[i], work[j]);
          if (v != 0 && (best == 0 || abs(v) < best)) {
            best = abs(v);
            bi = i;
            bj = j;
          }
        }
      IntVector e = work[bi], f = work[bj];
      Int d = L.pair(e, f);
      if (d < 0) {
        for (auto& x : f) x = -x;
        d = -d;
      }
      std::vector<IntVector> rest;
      for (std::size_t i = 0; i < work.size(); ++i)
        if (i != bi && i != bj) rest.push_back(work[i]);
      bool smaller = false;
      for (auto& x : rest) {
        Int a, b;
        mpz_tdiv_q(a.get_mpz_t(), L.pair(x, f).get_mpz_t(), d.get_mpz_t());
        mpz_tdiv_q(b.get_mpz_t(), L.pair(x, e).get_mpz_t(), d.get_mpz_t());
        // <x - a e + b f, f> = <x,f> - a d ; <x - a e + b f, e> = <x,e> - b d
        x = axpy(axpy(x, -a, e), b, f);
        if (L.pair(x, e) != 0 || L.pair(x, f) != 0) smaller = true;
      }
      if (smaller) {
        rest.push_back(e);
        rest.push_back(f);
        work = rest;
        continue;
      }
      bool bumped = false;
      for (std::size_t i = 0; i < rest.size() && !bumped; ++i)
        for (std::size_t j = i + 1; j < rest.size(); ++j)
          if (!mpz_divisible_p(L.pair(rest[i], rest[j]).get_mpz_t(), d.get_mpz_t())) {
            e = axpy(e, Int(1), rest[i]);
            bumped = true;
            break;
          }
      if (bumped) {
        rest.push_back(e);
        rest.push_back(f);
        work = rest;
        continue;
      }
      es.push_back(e);
      fs.push_back(f);
      ds.push_back(d);
      work = rest;
      break;
    }
  }
  ParaBasis pb;
  pb.divisors = ds;
  pb.transform = IntMatrix(n, n);
  for (std::size_t i = 0; i < es.size(); ++i) {
    pb.transform.set_row(i, es[i]);
    pb.transform.set_row(i + es.size(), fs[i]);
  }
  return pb;
}

std::pair<Int, Int> level_and_det(const AltLattice& L) {
  ParaBasis pb = para_symplectic_basis(L);
  Int prod = 1;
  for (const auto& d : pb.divisors) prod *= d;
  return {lcm_of(pb.divisors), prod};
}

bool is_squarefree(const Int& n) {
  Int x = abs(n);
  for (Int p = 2; p * p <= x; ++p) {
    if (mpz_divisible_p(x.get_mpz_t(), p.get_mpz_t())) {
      x /= p;
      if (mpz_divisible_p(x.get_mpz_t(), p.get_mpz_t())) return false;
    }
  }
  return true;
}

std::vector<Int> prime_divisors(const Int& n) {
  std::vector<Int> out;
  Int x = abs(n);
  for (Int p = 2; p * p <= x; ++p)
    if (mpz_divisible_p(x.get_mpz_t(), p.get_mpz_t())) {
      out.push_back(p);
      while (mpz_divisible_p(x.get_mpz_t(), p.get_mpz_t())) x /= p;
    }
  if (x > 1) out.push_back(x);
  return out;
}

IsotropicAdaptation adapt_to_isotropic(const AltLattice& L, const IsotropicSubmodule& Z) {
  const std::size_t n = L.rank();
  if (Z.generators.cols() != n) throw Error(ErrorCode::DimensionMismatch, "submodule dimension");
  if (determinant(L.gram) == 0) throw Error(ErrorCode::DegenerateForm, "degenerate form");
  if (!is_squarefree(level_and_det(L).first))
    throw Error(ErrorCode::NonSquareFreeLevel, "level is not square free");
  const IntMatrix& z = Z.generators;
  if (!(z * L.gram * z.transpose()).is_zero())
    throw Error(ErrorCode::NotIsotropic, "submodule is not totally isotropic");
  if (z.rows() > 0) {
    IntVector ed = elementary_divisors(z);
    if (ed.size() != z.rows() || std::any_of(ed.begin(), ed.end(), [](const Int& x) { return x != 1; }))
      throw Error(ErrorCode::NotPrimitive, "submodule is not primitive");
  }

  IsotropicAdaptation out;
  out.e = IntMatrix(0, n);
  out.f = IntMatrix(0, n);
  IntMatrix basis = IntMatrix::identity(n);
  IntMatrix zc = z;
  while (zc.rows() > 0) {
    AltLattice cur(basis * L.gram * basis.transpose());
    const std::size_t k = cur.rank();
    zc = row_basis(zc);
    IntVector e = zc.row(0);
    Int d = gcd_of(cur.gram.left_apply(e));
    // Lambda_d = {x : <x, Lambda> in dZ} from the Smith form of the Gram.
    SmithForm s = smith_normal_form(cur.gram);
    std::vector<IntVector> lam;
    IntVector pairs;
    for (std::size_t i = 0; i < k; ++i) {
      Int g;
      mpz_gcd(g.get_mpz_t(), d.get_mpz_t(), s.D(i, i).get_mpz_t());
      IntVector v = s.V.col(i);
      for (auto& x : v) x *= d / g;
      pairs.push_back(cur.pair(e, v));
      lam.push_back(std::move(v));
    }
    IntVector c;
    if (extended_gcd(pairs, c) != d) throw Error(ErrorCode::NonSquareFreeLevel, "no hyperbolic partner");
    IntVector f(k, Int(0));
    for (std::size_t i = 0; i < k; ++i) f = axpy(f, c[i], lam[i]);
    auto project = [&](const IntVector& x) {
      Int a = cur.pair(x, f) / d;
      Int b = cur.pair(e, x) / d;
      return axpy(axpy(x, -a, e), -b, f);
    };
    IntMatrix proj(k, k);
    for (std::size_t i = 0; i < k; ++i) proj.set_row(i, project(IntMatrix::identity(k).row(i)));
    IntMatrix comp = row_basis(proj);
    IntMatrix znext(zc.rows() - 1, comp.rows());
    for (std::size_t i = 1; i < zc.rows(); ++i) {
      auto coords = solve_left(comp, project(zc.row(i)));
      if (!coords) throw Error(ErrorCode::NotPrimitive, "projection left the complement");
      znext.set_row(i - 1, *coords);
    }
    out.e.append_row(basis.left_apply(e));
    out.f.append_row(basis.left_apply(f));
    out.d.push_back(d);
    basis = comp * basis;
    zc = znext;
  }
  out.complement_basis = basis;
  out.complement = AltLattice(basis * L.gram * basis.transpose());
  return out;
}

Int d_invariant(const AltLattice& L, const IsotropicSubmodule& Z) {
  Int prod = 1;
  for (const auto& d : adapt_to_isotropic(L, Z).d) prod *= d;
  return prod;
}

bool orbit_equivalent(const AltLattice& L, const IsotropicSubmodule& Z1, const IsotropicSubmodule& Z2) {
  return Z1.rank() == Z2.rank() && d_invariant(L, Z1) == d_invariant(L, Z2);
}

std::vector<Int> admissible_d_values(int m, int u, const Int& N, const Int& D) {
  if (u < 0 || m < 0 || u > m) throw Error(ErrorCode::InvalidRank, "need 0 <= u <= m");
  std::vector<Int> divisors{1};
  for (const auto& p : prime_divisors(D)) {
    int e = valuation(D, p);
    std::vector<Int> next;
    for (const auto& x : divisors) {
      Int q = x;
      for (int i = 0; i <= e; ++i, q *= p) next.push_back(q);
    }
    divisors = next;
  }
  std::vector<Int> out;
  for (const auto& d : divisors) {
    Int nu, nmu;
    mpz_pow_ui(nu.get_mpz_t(), N.get_mpz_t(), u);
    mpz_pow_ui(nmu.get_mpz_t(), N.get_mpz_t(), m - u);
    Int rest = D / d;
    if (mpz_divisible_p(nu.get_mpz_t(), d.get_mpz_t()) && mpz_divisible_p(nmu.get_mpz_t(), rest.get_mpz_t()))
      out.push_back(d);
  }
  std::sort(out.begin(), out.end());
  return out;
}

Int cusp_count(int m, int u, const std::map<Int, int>& ell) {
  if (u < 0 || m < 0 || u > m) throw Error(ErrorCode::InvalidRank, "need 0 <= u <= m");
  Int out = 1;
  for (const auto& [p, l] : ell) {
    if (l < 0 || l > m) throw Error(ErrorCode::InvalidRank, "need 0 <= ell_p <= m");
    out *= std::min({u, m - u, l, m - l}) + 1;
  }
  return out;
}

IntMatrix lift_special_linear(const std::map<Int, IntMatrix>& residues, std::size_t m) {
  Int N = 1;
  for (const auto& [p, a] : residues) N *= p;
  IntMatrix S = IntMatrix::identity(m);
  for (const auto& [p, input] : residues) {
    if (input.rows() != m || input.cols() != m) throw Error(ErrorCode::DimensionMismatch, "lift size");
    IntMatrix a(m, m);
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t j = 0; j < m; ++j) a(i, j) = mod_positive(input(i, j), p);
    if (mod_positive(determinant(a), p) != 1)
      throw Error(ErrorCode::InvalidArgument, "residue matrix is not in SL_m(F_p)");
    struct Op {
      std::size_t i, j;
      Int c;
    };
    std::vector<Op> ops;
    auto apply = [&](std::size_t i, std::size_t j, const Int& c) {
      Int cc = mod_positive(c, p);
      if (cc == 0) return;
      for (std::size_t col = 0; col < m; ++col) a(i, col) = mod_positive(a(i, col) + cc * a(j, col), p);
      ops.push_back({i, j, cc});
    };
    auto inverse = [&](const Int& x) {
      Int r;
      mpz_invert(r.get_mpz_t(), x.get_mpz_t(), p.get_mpz_t());
      return r;
    };
    for (std::size_t k = 0; k < m; ++k) {
      if (a(k, k) == 0) {
        std::size_t i = k + 1;
        while (a(i, k) == 0) ++i;
        apply(k, i, Int(1));
      }
      if (k + 1 < m && a(k, k) != 1) {
        if (a(k + 1, k) == 0) apply(k + 1, k, Int(1));
        apply(k, k + 1, (1 - a(k, k)) * inverse(a(k + 1, k)));
      }
      for (std::size_t i = 0; i < m; ++i)
        if (i != k) apply(i, k, -a(i, k));
    }
    // E_r ... E_1 A = I, so A = E_1^-1 ... E_r^-1; lift each factor by CRT.
    Int cof = N / p;
    Int scale = cof * inverse(mod_positive(cof, p));
    for (const auto& op : ops) {
      Int x = mod_positive(-op.c * scale, N);
      for (std::size_t r = 0; r < m; ++r) S(r, op.j) += x * S(r, op.i);
    }
  }
  return S;
}

std::vector<std::size_t> cusp_permutation(int m, int u, int ell, int k) {
  const int r = m - u;
  const int front_p = ell - k;
  if (k < 0 || k > u || k > ell || front_p < 0 || front_p > r)
    throw Error(ErrorCode::InadmissibleD, "no permutation realizes this divisor pattern");
  std::vector<std::size_t> nonp, pslots;
  for (int i = 0; i < m - ell; ++i) nonp.push_back(i);
  for (int i = m - ell; i < m; ++i) pslots.push_back(i);
  std::vector<std::size_t> sigma;
  auto take = [&](std::vector<std::size_t>& from, int count) {
    for (int i = 0; i < count; ++i) sigma.push_back(from[i]);
    from.erase(from.begin(), from.begin() + count);
  };
  take(nonp, r - front_p);
  take(pslots, front_p);
  take(nonp, static_cast<int>(nonp.size()));
  take(pslots, static_cast<int>(pslots.size()));
  return sigma;
}

CuspRepresentative cusp_representative(const AltLattice& L, int u, const Int& d) {
  CuspRepresentative out;
  out.basis = para_symplectic_basis(L);
  const IntVector& T = out.basis.divisors;
  const int m = static_cast<int>(T.size());
  if (u < 0 || u > m) throw Error(ErrorCode::InvalidRank, "need 0 <= u <= m");
  Int N = lcm_of(T), D = 1;
  for (const auto& t : T) D *= t;
  if (!is_squarefree(N)) throw Error(ErrorCode::NonSquareFreeLevel, "level is not square free");
  auto adm = admissible_d_values(m, u, N, D);
  if (std::find(adm.begin(), adm.end(), d) == adm.end())
    throw Error(ErrorCode::InadmissibleD, "d is not admissible");
  std::map<Int, IntMatrix> residues;
  for (const auto& p : prime_divisors(N)) {
    int ell = 0;
    for (const auto& t : T)
      if (mpz_divisible_p(t.get_mpz_t(), p.get_mpz_t())) ++ell;
    auto sigma = cusp_permutation(m, u, ell, valuation(d, p));
    IntMatrix P(m, m);
    for (int j = 0; j < m; ++j) P(sigma[j], j) = 1;
    if (determinant(P) < 0)
      for (int i = 0; i < m; ++i) P(i, 0) = -P(i, 0);
    residues[p] = P;
  }
  out.S = lift_special_linear(residues, m);
  RatMatrix s = to_rational(out.S);
  out.gamma = block_diagonal(s, rational_inverse(s).transpose());
  return out;
}

IsotropicSubmodule cusp_submodule(const CuspRepresentative& rep, int u) {
  const std::size_t m = rep.S.rows();
  IntMatrix z(u, 2 * m);
  for (int j = 0; j < u; ++j)
    for (std::size_t i = 0; i < m; ++i) z(j, i) = rep.S(i, m - u + j);
  return {z * rep.basis.transform};
}

IntMatrix transvection(const AltLattice& L, const IntVector& v, const Int& c) {
  const std::size_t n = L.rank();
  IntVector w = L.gram.apply(v);
  IntMatrix M = IntMatrix::identity(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) M(i, j) += c * w[i] * v[j];
  return M;
}

IntMatrix random_isometry(const AltLattice& L, std::mt19937_64& rng, int length) {
  const std::size_t n = L.rank();
  std::uniform_int_distribution<int> coeff(-1, 1);
  IntMatrix M = IntMatrix::identity(n);
  for (int step = 0; step < length; ++step) {
    IntVector v(n);
    bool nonzero = false;
    while (!nonzero)
      for (auto& x : v) {
        x = coeff(rng);
        nonzero = nonzero || x != 0;
      }
    M = M * transvection(L, v, Int(rng() % 2 ? 1 : -1));
  }
  return M;
}

IsotropicSubmodule random_isotropic(const AltLattice& L, int u, std::mt19937_64& rng, int range) {
  const std::size_t n = L.rank();
  if (u < 0 || 2 * static_cast<std::size_t>(u) > n) throw Error(ErrorCode::InvalidRank, "isotropic rank");
  std::uniform_int_distribution<int> coeff(-range, range);
  IntMatrix V(0, n);
  while (V.rows() < static_cast<std::size_t>(u)) {
    IntVector x(n, Int(0));
    if (V.rows() == 0) {
      for (auto& c : x) c = coeff(rng);
    } else {
      IntMatrix K = left_kernel(L.gram * V.transpose());
      for (std::size_t i = 0; i < K.rows(); ++i) x = axpy(x, Int(coeff(rng)), K.row(i));
    }
    if (std::all_of(x.begin(), x.end(), [](const Int& c) { return c == 0; })) continue;
    IntMatrix W = V;
    W.append_row(x);
    IntMatrix sat = saturate(W);
    if (sat.rows() > V.rows()) V = sat;
  }
  return {V};
}

}  // namespace paramodular
