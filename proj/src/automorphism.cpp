#include "paramodular/automorphism.hpp"

#include <algorithm>
#include <map>
#include <set>

namespace paramodular {

namespace {

long mod(long a, long p) { return ((a % p) + p) % p; }

int rank_mod(std::vector<Vec> rows, long p) {
  if (rows.empty()) return 0;
  const std::size_t m = rows[0].size();
  int r = 0;
  for (std::size_t c = 0; c < m && r < static_cast<int>(rows.size()); ++c) {
    int piv = r;
    while (piv < static_cast<int>(rows.size()) && mod(rows[piv][c], p) == 0) ++piv;
    if (piv == static_cast<int>(rows.size())) continue;
    std::swap(rows[r], rows[piv]);
    long a = mod(rows[r][c], p);
    for (std::size_t i = r + 1; i < rows.size(); ++i) {
      long f = mod(rows[i][c], p);
      if (f == 0) continue;
      for (std::size_t k = 0; k < m; ++k) rows[i][k] = mod(rows[i][k] * a - f * rows[r][k], p);
    }
    ++r;
  }
  return r;
}

Vec times(const Vec& x, const SmallMatrix& M) {
  Vec y(M[0].size(), 0);
  for (std::size_t i = 0; i < x.size(); ++i)
    if (x[i] != 0)
      for (std::size_t j = 0; j < y.size(); ++j) y[j] += x[i] * M[i][j];
  return y;
}

// x lies in the member iff x * parity = 0 mod p.
struct Parity {
  long p;
  SmallMatrix source, target;
};

std::vector<Parity> parities(const std::vector<IntMatrix>& source, const std::vector<IntMatrix>& target,
                             const IntVector& T) {
  std::vector<Parity> out;
  for (std::size_t j = 0; j < source.size(); ++j) {
    if (T[j] == 1) continue;
    RatMatrix s = rational_inverse(source[j]).scaled(Rat(T[j])), t = rational_inverse(target[j]).scaled(Rat(T[j]));
    if (!is_integral(s) || !is_integral(t)) throw Error(ErrorCode::InvalidArgument, "member does not contain t L");
    for (const auto& p : prime_divisors(T[j])) out.push_back({p.get_si(), to_small(to_integer(s)), to_small(to_integer(t))});
  }
  return out;
}

struct Search {
  SmallMatrix A_source, A_target;
  std::vector<Vec> gens;             // generating set of the source, coordinates
  std::vector<std::vector<long>> F;  // b(gens_i, gens_j)
  SmallMatrix solve;                 // C with C * gens = I
  std::map<long, std::vector<Vec>> target_by_norm;
  std::vector<Parity> par;
  long long nodes = 0, max_nodes = 0;

  std::vector<Vec> y;  // images
  std::vector<Vec> yA;

  bool parity_ok(std::size_t k) const {
    for (const auto& P : par) {
      std::vector<Vec> a, b, ab;
      for (std::size_t i = 0; i < k; ++i) {
        Vec u = times(gens[i], P.source), v = times(y[i], P.target);
        Vec w = u;
        w.insert(w.end(), v.begin(), v.end());
        a.push_back(u);
        b.push_back(v);
        ab.push_back(w);
      }
      int ra = rank_mod(a, P.p);
      if (ra != rank_mod(b, P.p) || ra != rank_mod(ab, P.p)) return false;
    }
    return true;
  }

  bool compatible(std::size_t level, const Vec& v) const {
    for (std::size_t j = 0; j < level; ++j) {
      long s = 0;
      for (std::size_t t = 0; t < v.size(); ++t) s += yA[j][t] * v[t];
      if (s != F[j][level]) return false;
    }
    return true;
  }

  void assign(std::size_t level, const Vec& v) {
    y[level] = v;
    yA[level] = times(v, A_target);
  }

  SmallMatrix matrix() const {
    SmallMatrix M(solve.size(), Vec(A_target.size(), 0));
    for (std::size_t i = 0; i < solve.size(); ++i)
      for (std::size_t k = 0; k < gens.size(); ++k)
        if (solve[i][k] != 0)
          for (std::size_t j = 0; j < M[i].size(); ++j) M[i][j] += solve[i][k] * y[k][j];
    return M;
  }

  // Extends y[0..level) to a full isometry; leaves the result in y.
  bool extend(std::size_t level) {
    if (++nodes > max_nodes) throw Error(ErrorCode::ScaleLimit, "automorphism search budget exceeded");
    if (level == gens.size()) return true;
    auto it = target_by_norm.find(F[level][level]);
    if (it == target_by_norm.end()) return false;
    for (const auto& v : it->second) {
      if (!compatible(level, v)) continue;
      assign(level, v);
      if (!parity_ok(level + 1)) continue;
      if (extend(level + 1)) return true;
    }
    return false;
  }
};

std::vector<Vec> choose_generators(const SmallMatrix& A) {
  const std::size_t m = A.size();
  long top = 0;
  for (std::size_t i = 0; i < m; ++i) top = std::max(top, A[i][i]);
  std::vector<NormedVector> pool = enumerate_short(A, top);
  std::vector<Vec> chosen;
  IntMatrix span(0, m);
  std::vector<bool> used(pool.size(), false);
  auto full = [&] { return span.rows() == m && abs(determinant(span)) == 1; };
  while (!full()) {
    // Prefer short vectors meeting many chosen ones; keeps the search tree narrow.
    std::vector<std::pair<std::pair<long, long>, std::size_t>> order;
    for (std::size_t i = 0; i < pool.size(); ++i) {
      if (used[i] || pool[i].norm == 0) continue;
      long links = 0;
      for (const auto& c : chosen)
        if (small_pair(A, pool[i].x, c) != 0) ++links;
      order.push_back({{pool[i].norm, -links}, i});
    }
    std::sort(order.begin(), order.end());
    bool grew = false;
    for (const auto& [score, i] : order) {
      IntMatrix next = span;
      next.append_row(IntVector(pool[i].x.begin(), pool[i].x.end()));
      next = row_basis(next);
      bool larger = next.rows() > span.rows() || (next.rows() == m && abs(determinant(next)) < abs(determinant(span)));
      used[i] = true;
      if (!larger) continue;
      span = next;
      chosen.push_back(pool[i].x);
      grew = true;
      break;
    }
    if (!grew) throw Error(ErrorCode::InvalidArgument, "short vectors do not generate the lattice");
  }
  return chosen;
}

Search make_search(const IntMatrix& gram_source, const IntMatrix& gram_target,
                   const std::vector<IntMatrix>& coords_source, const std::vector<IntMatrix>& coords_target,
                   const IntVector& T, const AutomorphismBudget& budget) {
  Search s;
  s.A_source = to_small(gram_source);
  s.A_target = to_small(gram_target);
  s.gens = choose_generators(s.A_source);
  const std::size_t k = s.gens.size(), m = gram_source.rows();
  s.F.assign(k, std::vector<long>(k));
  long top = 0;
  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t j = 0; j < k; ++j) {
      s.F[i][j] = small_pair(s.A_source, s.gens[i], s.gens[j]);
      if (i == j) top = std::max(top, s.F[i][i]);
    }
  IntMatrix G(k, m);
  for (std::size_t i = 0; i < k; ++i) G.set_row(i, IntVector(s.gens[i].begin(), s.gens[i].end()));
  s.solve.assign(m, Vec(k, 0));
  for (std::size_t i = 0; i < m; ++i) {
    auto c = solve_left(G, IntMatrix::identity(m).row(i));
    for (std::size_t j = 0; j < k; ++j) s.solve[i][j] = (*c)[j].get_si();
  }
  for (auto& v : enumerate_short(s.A_target, top)) s.target_by_norm[v.norm].push_back(std::move(v.x));
  s.par = parities(coords_source, coords_target, T);
  s.max_nodes = budget.max_nodes;
  s.y.assign(k, Vec());
  s.yA.assign(k, Vec());
  return s;
}

IntMatrix to_int(const SmallMatrix& M) {
  IntMatrix out(M.size(), M.empty() ? 0 : M[0].size());
  for (std::size_t i = 0; i < M.size(); ++i)
    for (std::size_t j = 0; j < M[i].size(); ++j) out(i, j) = M[i][j];
  return out;
}

ParamodularChain single_chain(const QuadLattice& L) {
  ParamodularChain c;
  c.first = L;
  c.coords = {IntMatrix::identity(L.rank())};
  c.T = {Int(1)};
  return c;
}

bool same_shape(const ParamodularChain& A, const ParamodularChain& B) {
  return A.first.rank() == B.first.rank() && A.T == B.T && A.length() == B.length();
}

}  // namespace

AutomorphismGroup automorphism_group(const ParamodularChain& chain, const AutomorphismBudget& budget) {
  Search s = make_search(chain.first.gram, chain.first.gram, chain.coords, chain.coords, chain.T, budget);
  const std::size_t k = s.gens.size();
  AutomorphismGroup out;
  out.order = 1;
  std::vector<SmallMatrix> gens;  // generators found so far; all fix gens[0..level)
  for (std::size_t level = k; level-- > 0;) {
    for (std::size_t j = 0; j < level; ++j) s.assign(j, s.gens[j]);
    std::set<Vec> orbit{s.gens[level]}, failed;
    auto close = [&](std::set<Vec>& set) {
      std::vector<Vec> todo(set.begin(), set.end());
      while (!todo.empty()) {
        Vec v = todo.back();
        todo.pop_back();
        for (const auto& g : gens) {
          Vec w = times(v, g);
          if (set.insert(w).second) todo.push_back(w);
        }
      }
    };
    close(orbit);
    for (const auto& v : s.target_by_norm[s.F[level][level]]) {
      if (orbit.count(v) || failed.count(v) || !s.compatible(level, v)) continue;
      s.assign(level, v);
      if (s.parity_ok(level + 1) && s.extend(level + 1)) {
        gens.push_back(s.matrix());
        close(orbit);
      } else {
        std::set<Vec> bad{v};
        close(bad);
        failed.insert(bad.begin(), bad.end());
      }
      for (std::size_t j = 0; j < level; ++j) s.assign(j, s.gens[j]);
    }
    out.order *= static_cast<long>(orbit.size());
  }
  for (const auto& g : gens) out.generators.push_back(to_int(g));
  return out;
}

Int aut_order(const ParamodularChain& chain, const AutomorphismBudget& budget) {
  return automorphism_group(chain, budget).order;
}

Int aut_order(const QuadLattice& L, const AutomorphismBudget& budget) {
  return aut_order(single_chain(L), budget);
}

std::optional<IntMatrix> chain_isometry(const ParamodularChain& A, const ParamodularChain& B,
                                        const AutomorphismBudget& budget) {
  if (!same_shape(A, B)) return std::nullopt;
  if (determinant(A.first.gram) != determinant(B.first.gram)) return std::nullopt;
  Search s = make_search(A.first.gram, B.first.gram, A.coords, B.coords, A.T, budget);
  if (!s.extend(0)) return std::nullopt;
  IntMatrix M = to_int(s.matrix());
  if (!(M * B.first.gram * M.transpose() == A.first.gram))
    throw Error(ErrorCode::NotIsometric, "isometry check failed");
  return M;
}

std::optional<IntMatrix> isometry_test(const QuadLattice& L, const QuadLattice& K, const AutomorphismBudget& budget) {
  if (L.rank() != K.rank()) return std::nullopt;
  auto il = invariants(L), ik = invariants(K);
  if (il.disc != ik.disc || il.level != ik.level) return std::nullopt;
  auto M = chain_isometry(single_chain(L), single_chain(K), budget);
  if (!M) return std::nullopt;
  return M->transpose();
}

}  // namespace paramodular

namespace paramodular {

std::vector<ChainClass> enumerate_chain_classes(const QuadLattice& L1, const IntVector& T) {
  if (T.empty() || T[0] != 1) throw Error(ErrorCode::InvalidLevel, "T must start with 1");
  Int p = T.back();
  for (const auto& t : T)
    if (t != 1 && t != p) throw Error(ErrorCode::NotSupported, "only levels (1, ..., 1, p, ..., p) are supported");
  if (p != 1 && prime_divisors(p) != std::vector<Int>{p})
    throw Error(ErrorCode::NotSupported, "only prime levels are supported");
  const std::size_t m = L1.rank();
  auto build = [&](const IntMatrix& K) {
    std::vector<IntMatrix> later;
    for (std::size_t j = 1; j < T.size(); ++j) later.push_back(T[j] == 1 ? IntMatrix::identity(m) : K);
    return make_chain(L1, later, T);
  };
  if (p == 1) {
    ParamodularChain c = build(IntMatrix::identity(m));
    return {ChainClass{c, aut_order(c), 1}};
  }
  auto subs = pmodular_sublattices(L1, p);
  AutomorphismGroup G = automorphism_group(make_chain(L1, {}, {Int(1)}));
  std::map<std::string, std::size_t> index;
  for (std::size_t i = 0; i < subs.size(); ++i) index[subs[i].coords.to_string()] = i;
  std::vector<bool> seen(subs.size(), false);
  std::vector<ChainClass> out;
  for (std::size_t i = 0; i < subs.size(); ++i) {
    if (seen[i]) continue;
    long long size = 0;
    std::vector<std::size_t> todo{i};
    seen[i] = true;
    while (!todo.empty()) {
      std::size_t j = todo.back();
      todo.pop_back();
      ++size;
      for (const auto& g : G.generators) {
        auto it = index.find(row_basis(subs[j].coords * g).to_string());
        if (it == index.end()) throw Error(ErrorCode::InvalidInvariant, "automorphism left the sublattice list");
        if (!seen[it->second]) {
          seen[it->second] = true;
          todo.push_back(it->second);
        }
      }
    }
    ParamodularChain c = build(subs[i].coords);
    out.push_back({c, aut_order(c), size});
  }
  return out;
}

}  // namespace paramodular
