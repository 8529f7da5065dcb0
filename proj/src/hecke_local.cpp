#include "paramodular/hecke_local.hpp"

#include <algorithm>
#include <functional>
#include <set>

namespace paramodular {

namespace {

enum class PlaneType { U0, U1, P0, P1 };

Int ipow(const Int& p, long e) {
  Int r;
  mpz_pow_ui(r.get_mpz_t(), p.get_mpz_t(), static_cast<unsigned long>(e));
  return r;
}

Rat ppow(const Int& p, int e) {
  return e >= 0 ? Rat(ipow(p, e)) : Rat(Int(1), ipow(p, -e));
}

bool p_integral(const Rat& x, const Int& p) {
  return !mpz_divisible_p(x.get_den_mpz_t(), p.get_mpz_t());
}

bool p_integral(const RatMatrix& m, const Int& p) {
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j)
      if (!p_integral(m(i, j), p)) return false;
  return true;
}

// p-adic valuations of the elementary divisors of a nonsingular rational matrix.
std::vector<int> p_exponents(const RatMatrix& m, const Int& p) {
  Int c = common_denominator(m);
  IntVector ed = elementary_divisors(to_integer(m.scaled(Rat(c))));
  int vc = valuation(c, p);
  std::vector<int> out;
  for (const auto& d : ed) {
    if (d == 0) throw Error(ErrorCode::SingularMatrix, "lattice is not of full rank");
    out.push_back(valuation(d, p) - vc);
  }
  std::sort(out.begin(), out.end());
  return out;
}

bool take(std::multiset<int>& s, int x) {
  auto it = s.find(x);
  if (it == s.end()) return false;
  s.erase(it);
  return true;
}

bool decompose(std::multiset<int> E, std::multiset<int> F, int ua, int pb,
               std::vector<std::pair<PlaneType, int>>& out) {
  if (E.empty()) return F.empty() && ua == 0 && pb == 0;
  const int x = *E.rbegin();
  struct Option {
    PlaneType t;
    bool ok;
    int e2, f1, f2;
  };
  const Option options[] = {
      {PlaneType::U1, ua > 0 && x >= 1, 1 - x, x, 1 - x},
      {PlaneType::U0, ua > 0 && x >= 0, -x, x, -x},
      {PlaneType::P1, pb > 0 && x >= 0, -x - 1, x + 1, -x},
      {PlaneType::P0, pb > 0 && x >= 0, -x, x + 1, 1 - x},
  };
  for (const auto& o : options) {
    if (!o.ok) continue;
    std::multiset<int> e = E, f = F;
    if (!take(e, x) || !take(e, o.e2) || !take(f, o.f1) || !take(f, o.f2)) continue;
    bool unimodular = o.t == PlaneType::U0 || o.t == PlaneType::U1;
    out.emplace_back(o.t, x);
    if (decompose(e, f, ua - (unimodular ? 1 : 0), pb - (unimodular ? 0 : 1), out)) return true;
    out.pop_back();
  }
  return false;
}

PlaneType slot_type(const LocalDoubleCoset& dc, int i) {
  if (i < dc.r_minus) return PlaneType::U1;
  if (i < dc.source.a) return PlaneType::U0;
  if (i < dc.source.a + dc.r_plus) return PlaneType::P1;
  return PlaneType::P0;
}

int f_exponent(PlaneType t, int mu) {
  switch (t) {
    case PlaneType::U1: return 1 - mu;
    case PlaneType::P1: return -mu - 1;
    default: return -mu;
  }
}

std::pair<int, int> shape_of_gram(const RatMatrix& gram, const Int& p) {
  int a = 0, b = 0;
  for (int v : p_exponents(gram, p)) {
    if (v == 0) ++a;
    else if (v == 1) ++b;
    else throw Error(ErrorCode::NotElementary, "lattice is not p-elementary");
  }
  return {a / 2, b / 2};
}

}  // namespace

int LocalDoubleCoset::weight() const {
  int s = 0;
  for (int m : mu) s += m;
  return s;
}

IntVector local_divisors(const LocalShape& shape) {
  if (shape.a < 0 || shape.b < 0 || shape.n() < 1) throw Error(ErrorCode::InvalidArgument, "empty local shape");
  IntVector T;
  for (int i = 0; i < shape.a; ++i) T.push_back(1);
  for (int i = 0; i < shape.b; ++i) T.push_back(shape.p);
  return T;
}

IntMatrix local_gram(const LocalShape& shape) { return alternating_gram(local_divisors(shape)); }

void validate(const LocalDoubleCoset& dc) {
  const int a = dc.source.a, b = dc.source.b, n = dc.source.n();
  auto fail = [] { throw Error(ErrorCode::InvalidInvariant, "invalid double coset invariants"); };
  if (dc.a2 != a - dc.r_minus + dc.r_plus || dc.b2 != b - dc.r_plus + dc.r_minus) fail();
  if (dc.r_minus < 0 || dc.r_minus > std::min(a, dc.b2)) fail();
  if (dc.r_plus < 0 || dc.r_plus > std::min(dc.a2, b)) fail();
  if (static_cast<int>(dc.mu.size()) != n) fail();
  for (int i = 0; i < n; ++i) {
    if (dc.mu[i] < (i < dc.r_minus ? 1 : 0)) fail();
    if (i > 0 && slot_type(dc, i) == slot_type(dc, i - 1) && dc.mu[i] < dc.mu[i - 1]) fail();
  }
}

LocalDoubleCoset classify_lattice(const Int& p, const IntMatrix& gram, const RatMatrix& L) {
  if (!gram.square() || gram.rows() % 2 || L.rows() != gram.rows() || L.cols() != gram.cols())
    throw Error(ErrorCode::DimensionMismatch, "lattice and Gram sizes differ");
  RatMatrix G = to_rational(gram);
  auto [a, b] = shape_of_gram(G, p);
  RatMatrix gl = L * G * L.transpose();
  if (!p_integral(gl, p) || !p_integral(rational_inverse(gl).scaled(Rat(p)), p))
    throw Error(ErrorCode::NotElementary, "lattice is not p-elementary");
  auto [a2, b2] = shape_of_gram(gl, p);
  std::vector<int> ev = p_exponents(L, p), fv = p_exponents(L * G, p);
  std::vector<std::pair<PlaneType, int>> planes;
  if (!decompose({ev.begin(), ev.end()}, {fv.begin(), fv.end()}, a, b, planes))
    throw Error(ErrorCode::NotIsometric, "no double coset matches the elementary divisors");
  LocalDoubleCoset dc;
  dc.source = {p, a, b};
  std::vector<int> seg[4];
  for (const auto& [t, mu] : planes) seg[static_cast<int>(t)].push_back(mu);
  for (auto& s : seg) std::sort(s.begin(), s.end());
  dc.r_minus = static_cast<int>(seg[static_cast<int>(PlaneType::U1)].size());
  dc.r_plus = static_cast<int>(seg[static_cast<int>(PlaneType::P1)].size());
  for (PlaneType t : {PlaneType::U1, PlaneType::U0, PlaneType::P1, PlaneType::P0})
    for (int mu : seg[static_cast<int>(t)]) dc.mu.push_back(mu);
  dc.a2 = a - dc.r_minus + dc.r_plus;
  dc.b2 = b - dc.r_plus + dc.r_minus;
  if (dc.a2 != a2 || dc.b2 != b2) throw Error(ErrorCode::NotIsometric, "inconsistent shape");
  return dc;
}

LocalDoubleCoset classify_pair(const LocalShape& shape, const RatMatrix& L) {
  return classify_lattice(shape.p, local_gram(shape), L);
}

RatMatrix representative_lattice(const LocalDoubleCoset& dc) {
  validate(dc);
  const int n = dc.source.n();
  RatMatrix L(2 * n, 2 * n);
  for (int i = 0; i < n; ++i) {
    L(i, i) = ppow(dc.source.p, dc.mu[i]);
    L(n + i, n + i) = ppow(dc.source.p, f_exponent(slot_type(dc, i), dc.mu[i]));
  }
  return L;
}

RatMatrix representative_block(const LocalDoubleCoset& dc) {
  validate(dc);
  const int n = dc.source.n(), a = dc.source.a;
  RatMatrix B(n, n);
  for (int i = 0; i < n; ++i) {
    int col = 0;
    switch (slot_type(dc, i)) {
      case PlaneType::P1: col = i - a; break;
      case PlaneType::U0: col = dc.r_plus + (i - dc.r_minus); break;
      case PlaneType::U1: col = dc.a2 + i; break;
      case PlaneType::P0: col = dc.a2 + dc.r_minus + (i - a - dc.r_plus); break;
    }
    B(i, col) = ppow(dc.source.p, dc.mu[i]);
  }
  return B;
}

RatMatrix representative_matrix(const LocalDoubleCoset& dc) {
  RatMatrix B = representative_block(dc);
  return block_diagonal(B, rational_inverse(B).transpose());
}

bool transpose_integrality(const RatMatrix& B, const IntMatrix& T, const IntMatrix& T2) {
  if (!B.square() || T.rows() != B.rows() || T2.rows() != B.rows())
    throw Error(ErrorCode::DimensionMismatch, "transpose_integrality sizes");
  return is_integral(rational_inverse(T) * B.transpose() * to_rational(T2));
}

LocalDoubleCoset transpose_partner(const LocalDoubleCoset& dc) {
  validate(dc);
  const int a = dc.source.a, n = dc.source.n(), r = dc.r_minus;
  if (dc.a2 != a || r != dc.r_plus) throw Error(ErrorCode::InvalidInvariant, "partner needs equal shapes");
  LocalDoubleCoset out = dc;
  out.mu.clear();
  for (int i = a; i < a + r; ++i) out.mu.push_back(dc.mu[i] + 1);
  for (int i = r; i < a; ++i) out.mu.push_back(dc.mu[i]);
  for (int i = 0; i < r; ++i) out.mu.push_back(dc.mu[i] - 1);
  for (int i = a + r; i < n; ++i) out.mu.push_back(dc.mu[i]);
  validate(out);
  return out;
}

std::vector<LocalDoubleCoset> enumerate_double_cosets(const LocalShape& source, int a2, int b2, int j) {
  std::vector<LocalDoubleCoset> out;
  const int a = source.a, b = source.b, n = source.n();
  if (a2 < 0 || b2 < 0 || a2 + b2 != n || j < 0) return out;
  for (int rp = 0; rp <= std::min(a2, b); ++rp) {
    int rm = rp + a - a2;
    if (rm < 0 || rm > std::min(a, b2)) continue;
    LocalDoubleCoset dc{source, a2, b2, rm, rp, std::vector<int>(n, 0)};
    std::function<void(int, int)> fill = [&](int i, int left) {
      if (i == n) {
        if (left == 0) out.push_back(dc);
        return;
      }
      int lo = i < rm ? 1 : 0;
      if (i > 0 && slot_type(dc, i) == slot_type(dc, i - 1)) lo = std::max(lo, dc.mu[i - 1]);
      for (int v = lo; v <= left; ++v) {
        dc.mu[i] = v;
        fill(i + 1, left - v);
      }
    };
    fill(0, j);
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<LocalDoubleCoset> enumerate_Tpj(const LocalShape& shape, int j) {
  return enumerate_double_cosets(shape, shape.a, shape.b, j);
}

Int neighbor_count_formula(const Int& p, int n1, int n2) {
  if (n1 < 0 || n2 < 0 || n1 + n2 < 1) throw Error(ErrorCode::InvalidArgument, "need n1 + n2 >= 1");
  Rat P(p), q1 = Rat(ipow(p, 2 * n1)), q2 = Rat(ipow(p, 2 * n2));
  Rat v = P / ((P - 1) * (P - 1)) * (q1 - 1) * (q2 - 1) + P / (P - 1) * q1 * (q2 - 1) +
          P / (P - 1) * q2 * (q1 - 1);
  v.canonicalize();
  if (v.get_den() != 1) throw Error(ErrorCode::IntegralityViolation, "neighbor count not integral");
  return v.get_num();
}

bool neighbor_bound_holds(const Int& p, int n1, int n2) {
  const int n = n1 + n2;
  Rat N(neighbor_count_formula(p, n1, n2));
  bool ok = true;
  if (p > 3 || n2 == 0) ok = ok && N < Rat(ipow(p, 2 * n + 1));
  if (p == 3) ok = ok && N < Rat(5, 4) * Rat(ipow(p, 2 * n + 1));
  if (p == 2) ok = ok && N < Rat(ipow(p, 2 * n + 2));
  return ok;
}

namespace {

std::vector<IntVector> projective_points(const Int& p, std::size_t k) {
  std::vector<IntVector> out;
  const long P = p.get_si();
  for (std::size_t lead = 0; lead < k; ++lead) {
    std::size_t free = k - lead - 1;
    long total = 1;
    for (std::size_t i = 0; i < free; ++i) total *= P;
    for (long code = 0; code < total; ++code) {
      IntVector v(k, Int(0));
      v[lead] = 1;
      long c = code;
      for (std::size_t i = lead + 1; i < k; ++i, c /= P) v[i] = c % P;
      out.push_back(std::move(v));
    }
  }
  return out;
}

IntMatrix hyperplane_basis(const IntVector& h, const Int& p) {
  const std::size_t k = h.size();
  std::size_t lead = 0;
  while (h[lead] == 0) ++lead;
  IntMatrix M(k, k);
  for (std::size_t i = 0; i < k; ++i) {
    if (i == lead) {
      M(i, lead) = p;
    } else {
      M(i, i) = 1;
      M(i, lead) = -h[i];
    }
  }
  return M;
}

std::pair<int, int> index_exponents(const RatMatrix& X, const Int& p) {
  int down = 0, up = 0;
  for (int e : p_exponents(X, p)) {
    if (e > 0) down += e;
    else up -= e;
  }
  return {down, up};
}

// Candidate L = M + Z v/p when it is a neighbor of the standard lattice.
std::optional<RatLattice> neighbor_candidate(const LocalShape& shape, const IntMatrix& gram,
                                             const IntMatrix& M, const IntVector& coeffs) {
  const Int& p = shape.p;
  IntVector v = M.left_apply(coeffs);
  if (std::all_of(v.begin(), v.end(), [&](const Int& x) { return mpz_divisible_p(x.get_mpz_t(), p.get_mpz_t()); }))
    return std::nullopt;
  IntVector vg = gram.left_apply(v);
  for (std::size_t i = 0; i < M.rows(); ++i) {
    Int s = 0;
    for (std::size_t j = 0; j < vg.size(); ++j) s += vg[j] * M(i, j);
    if (!mpz_divisible_p(s.get_mpz_t(), p.get_mpz_t())) return std::nullopt;
  }
  RatMatrix gens = to_rational(M);
  RatVector w;
  for (const auto& x : v) w.push_back(Rat(x, p));
  gens.append_row(w);
  RatLattice L(gens);
  RatMatrix b = L.basis();
  RatMatrix gl = b * to_rational(gram) * b.transpose();
  if (!p_integral(rational_inverse(gl).scaled(Rat(p)), p)) return std::nullopt;
  return L;
}

void check_budget(long long count, const EnumerationBudget& budget) {
  if (count > budget.max_candidates) throw Error(ErrorCode::ScaleLimit, "enumeration budget exceeded");
}

}  // namespace

std::vector<RatLattice> enumerate_neighbors(const LocalShape& shape, const EnumerationBudget& budget) {
  const IntMatrix gram = local_gram(shape);
  const std::size_t k = gram.rows();
  const auto points = projective_points(shape.p, k);
  check_budget(static_cast<long long>(points.size()) * static_cast<long long>(points.size()), budget);
  std::vector<std::vector<RatLattice>> found(points.size());
#pragma omp parallel for schedule(dynamic)
  for (std::size_t h = 0; h < points.size(); ++h) {
    IntMatrix M = hyperplane_basis(points[h], shape.p);
    for (const auto& c : points)
      if (auto L = neighbor_candidate(shape, gram, M, c)) found[h].push_back(*L);
  }
  std::map<std::string, RatLattice> merged;
  for (auto& bucket : found)
    for (auto& L : bucket) merged.emplace(L.key(), std::move(L));
  std::vector<RatLattice> out;
  for (auto& [key, L] : merged) out.push_back(std::move(L));
  return out;
}

std::vector<RatLattice> enumerate_neighbors_reference(const LocalShape& shape, const EnumerationBudget& budget) {
  // Every index-p sublattice M and every nonzero class of M/pM, no projective reduction.
  const IntMatrix gram = local_gram(shape);
  const std::size_t k = gram.rows();
  const long P = shape.p.get_si();
  long total = 1;
  for (std::size_t i = 0; i < k; ++i) total *= P;
  const auto hyperplanes = projective_points(shape.p, k);
  check_budget(static_cast<long long>(hyperplanes.size()) * total, budget);
  std::map<std::string, RatLattice> merged;
  for (const auto& h : hyperplanes) {
    IntMatrix M = hyperplane_basis(h, shape.p);
    for (long code = 1; code < total; ++code) {
      IntVector c(k);
      long x = code;
      for (std::size_t i = 0; i < k; ++i, x /= P) c[i] = x % P;
      if (auto L = neighbor_candidate(shape, gram, M, c)) merged.emplace(L->key(), *L);
    }
  }
  std::vector<RatLattice> out;
  for (auto& [key, L] : merged) out.push_back(L);
  return out;
}

RatMatrix adapted_basis(const LocalShape& shape, const RatLattice& L) {
  RatMatrix b = L.basis();
  IntMatrix gl = to_integer(b * to_rational(local_gram(shape)) * b.transpose());
  ParaBasis pb = para_symplectic_basis(AltLattice(gl));
  if (pb.divisors != local_divisors(shape)) throw Error(ErrorCode::NotIsometric, "lattice has another shape");
  return to_rational(pb.transform) * b;
}

namespace {

std::vector<std::vector<RatLattice>> levels_impl(const LocalShape& shape, int jmax, const EnumerationBudget& budget,
                                                 bool parallel) {
  std::vector<std::vector<RatLattice>> levels{{RatLattice(IntMatrix::identity(2 * shape.n()))}};
  if (jmax <= 0) return levels;
  const auto base = enumerate_neighbors(shape, budget);
  std::vector<RatMatrix> base_bases;
  for (const auto& N : base) base_bases.push_back(N.basis());
  levels.push_back(base);
  for (int k = 2; k <= jmax; ++k) {
    const auto& prev = levels.back();
    check_budget(static_cast<long long>(prev.size()) * static_cast<long long>(base.size()), budget);
    std::vector<std::vector<RatLattice>> found(prev.size());
#pragma omp parallel for schedule(dynamic) if (parallel)
    for (std::size_t i = 0; i < prev.size(); ++i) {
      RatMatrix g = adapted_basis(shape, prev[i]);
      for (const auto& nb : base_bases) {
        RatMatrix X = nb * g;
        auto [down, up] = index_exponents(X, shape.p);
        if (down == k && up == k) found[i].emplace_back(X);
      }
    }
    std::map<std::string, RatLattice> merged;
    for (auto& bucket : found)
      for (auto& L : bucket) merged.emplace(L.key(), std::move(L));
    std::vector<RatLattice> next;
    for (auto& [key, L] : merged) next.push_back(std::move(L));
    levels.push_back(std::move(next));
  }
  return levels;
}

}  // namespace

std::vector<std::vector<RatLattice>> hecke_levels(const LocalShape& shape, int jmax,
                                                  const EnumerationBudget& budget) {
  return levels_impl(shape, jmax, budget, true);
}

std::vector<std::vector<RatLattice>> hecke_levels_reference(const LocalShape& shape, int jmax,
                                                            const EnumerationBudget& budget) {
  return levels_impl(shape, jmax, budget, false);
}

std::vector<RatLattice> left_cosets(const LocalDoubleCoset& dc, const EnumerationBudget& budget) {
  validate(dc);
  if (dc.a2 != dc.source.a) throw Error(ErrorCode::InvalidInvariant, "left cosets need equal shapes");
  const int j = dc.weight();
  auto levels = hecke_levels(dc.source, j, budget);
  std::vector<RatLattice> out;
  for (const auto& L : levels[j])
    if (classify_pair(dc.source, L.basis()) == dc) out.push_back(L);
  return out;
}

namespace {

std::vector<HeckeTerm> product_impl(const LocalShape& shape, int i, int j, const EnumerationBudget& budget,
                                    bool parallel) {
  auto levels = levels_impl(shape, std::max(i, j), budget, parallel);
  const auto& Si = levels[i];
  const auto& Sj = levels[j];
  check_budget(static_cast<long long>(Si.size()) * static_cast<long long>(Sj.size()), budget);
  std::vector<RatMatrix> sj_bases;
  for (const auto& N : Sj) sj_bases.push_back(N.basis());
  std::vector<std::map<std::string, std::pair<RatLattice, long long>>> partial(Si.size());
#pragma omp parallel for schedule(dynamic) if (parallel)
  for (std::size_t a = 0; a < Si.size(); ++a) {
    RatMatrix g = adapted_basis(shape, Si[a]);
    for (const auto& nb : sj_bases) {
      RatLattice R(nb * g);
      auto it = partial[a].find(R.key());
      if (it == partial[a].end()) partial[a].emplace(R.key(), std::make_pair(R, 1LL));
      else ++it->second.second;
    }
  }
  std::map<std::string, std::pair<RatLattice, long long>> counts;
  for (auto& part : partial)
    for (auto& [key, entry] : part) {
      auto it = counts.find(key);
      if (it == counts.end()) counts.emplace(key, entry);
      else it->second.second += entry.second;
    }
  std::map<LocalDoubleCoset, HeckeTerm> terms;
  for (const auto& [key, entry] : counts) {
    LocalDoubleCoset dc = classify_pair(shape, entry.first.basis());
    auto it = terms.find(dc);
    if (it == terms.end()) {
      terms.emplace(dc, HeckeTerm{dc, entry.second, 1});
    } else {
      if (it->second.multiplicity != entry.second)
        throw Error(ErrorCode::InvalidInvariant, "product count is not constant on an orbit");
      ++it->second.orbit_size;
    }
  }
  std::vector<HeckeTerm> out;
  for (auto& [dc, t] : terms) out.push_back(t);
  return out;
}

}  // namespace

std::vector<HeckeTerm> hecke_product(const LocalShape& shape, int i, int j, const EnumerationBudget& budget) {
  return product_impl(shape, i, j, budget, true);
}

std::vector<HeckeTerm> hecke_product_reference(const LocalShape& shape, int i, int j,
                                               const EnumerationBudget& budget) {
  return product_impl(shape, i, j, budget, false);
}

namespace {

IntVector diagonal_of(const IntMatrix& T) {
  if (!T.square()) throw Error(ErrorCode::DimensionMismatch, "level matrix must be square");
  IntVector d;
  for (std::size_t i = 0; i < T.rows(); ++i) {
    for (std::size_t j = 0; j < T.cols(); ++j)
      if (i != j && T(i, j) != 0) throw Error(ErrorCode::InvalidLevel, "level matrix must be diagonal");
    if (T(i, i) <= 0) throw Error(ErrorCode::InvalidLevel, "level entries must be positive");
    d.push_back(T(i, i));
  }
  return d;
}

LocalShape shape_at(const IntVector& d, const Int& p) {
  LocalShape s{p, 0, 0};
  for (const auto& t : d) {
    if (mpz_divisible_p(t.get_mpz_t(), p.get_mpz_t())) ++s.b;
    else ++s.a;
  }
  return s;
}

}  // namespace

RatMatrix global_representative(const IntMatrix& T, const IntMatrix& T2,
                                 const std::map<Int, LocalDoubleCoset>& locals) {
  IntVector t = diagonal_of(T), t2 = diagonal_of(T2);
  if (t.size() != t2.size()) throw Error(ErrorCode::DimensionMismatch, "level sizes differ");
  const std::size_t n = t.size();
  Int N = lcm_of(t), N2 = lcm_of(t2);
  if (!is_squarefree(N) || !is_squarefree(N2)) throw Error(ErrorCode::NonSquareFreeLevel, "level not square free");
  std::set<Int> primes;
  for (const auto& p : prime_divisors(N * N2)) primes.insert(p);
  for (const auto& [p, dc] : locals) primes.insert(p);

  std::map<Int, LocalDoubleCoset> chosen;
  for (const auto& p : primes) {
    LocalShape src = shape_at(t2, p), tgt = shape_at(t, p);
    auto it = locals.find(p);
    if (it != locals.end()) {
      validate(it->second);
      if (!(it->second.source == src) || it->second.a2 != tgt.a)
        throw Error(ErrorCode::IncompatibleLocals, "local class does not match the levels");
      chosen[p] = it->second;
    } else {
      auto trivial = enumerate_double_cosets(src, tgt.a, tgt.b, 0);
      if (trivial.empty()) throw Error(ErrorCode::IncompatibleLocals, "missing local class");
      chosen[p] = trivial.front();
    }
  }
  // delta_i collects the row exponents over all primes.
  IntVector delta(n, Int(1));
  std::map<Int, RatMatrix> blocks;
  for (const auto& [p, dc] : chosen) {
    blocks[p] = representative_block(dc);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        if (blocks[p](i, j) != 0) delta[i] *= blocks[p](i, j).get_num();
  }
  std::map<Int, IntMatrix> residues;
  for (const auto& [p, B] : blocks) {
    IntMatrix R(n, n);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        if (B(i, j) != 0) {
          Int unit = delta[i] / B(i, j).get_num(), inv;
          if (mpz_invert(inv.get_mpz_t(), unit.get_mpz_t(), p.get_mpz_t()) == 0)
            throw Error(ErrorCode::IncompatibleLocals, "determinants cannot be aligned");
          R(i, j) = inv;
        }
    Int det = determinant(R), inv;
    det = ((det % p) + p) % p;
    mpz_invert(inv.get_mpz_t(), det.get_mpz_t(), p.get_mpz_t());
    for (std::size_t j = 0; j < n; ++j) R(0, j) *= inv;
    residues[p] = R;
  }
  IntMatrix A = lift_special_linear(residues, n);
  IntMatrix B(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) B(i, j) = delta[i] * A(i, j);
  RatMatrix out = to_rational(B);
  if (!transpose_integrality(out, T, T2)) throw Error(ErrorCode::IntegralityViolation, "T^-1 B^t T' not integral");
  return out;
}

RatMatrix block_lattice(const RatMatrix& B, const IntMatrix& T, const IntMatrix& T2) {
  const std::size_t n = B.rows();
  if (!B.square() || T.rows() != n || T2.rows() != n) throw Error(ErrorCode::DimensionMismatch, "block sizes");
  RatMatrix h = block_diagonal(B, rational_inverse(B).transpose());
  RatMatrix P = block_diagonal(RatMatrix::identity(n), to_rational(T));
  RatMatrix P2 = block_diagonal(RatMatrix::identity(n), to_rational(T2));
  return P * h.transpose() * rational_inverse(P2);
}

std::map<Int, LocalDoubleCoset> hecke_class(const RatMatrix& B, const IntMatrix& T, const IntMatrix& T2) {
  IntVector t = diagonal_of(T), t2 = diagonal_of(T2);
  Rat det = determinant(B);
  if (det == 0) throw Error(ErrorCode::SingularMatrix, "B is singular");
  std::set<Int> primes;
  for (const auto& p : prime_divisors(Int(det.get_num()) * Int(det.get_den()) * lcm_of(t) * lcm_of(t2)))
    primes.insert(p);
  RatMatrix X = block_lattice(B, T, T2);
  IntMatrix gram = alternating_gram(t2);
  std::map<Int, LocalDoubleCoset> out;
  for (const auto& p : primes) out[p] = classify_lattice(p, gram, X);
  return out;
}

std::vector<std::pair<Int, int>> factor_Tm(const IntMatrix& T, const Int& m) {
  diagonal_of(T);
  if (m < 1) throw Error(ErrorCode::InvalidArgument, "m must be positive");
  std::vector<std::pair<Int, int>> out;
  for (const auto& p : prime_divisors(m)) out.emplace_back(p, valuation(m, p));
  return out;
}

}  // namespace paramodular
