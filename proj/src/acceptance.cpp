#include "paramodular/acceptance.hpp"

#include <chrono>
#include <functional>
#include <random>
#include <set>

#include "paramodular/automorphism.hpp"

namespace paramodular {

namespace {

struct Outcome {
  bool passed = true;
  Json detail = Json::object();
  void require(bool cond, const std::string& what) {
    if (!cond) {
      passed = false;
      detail["failures"].push_back(what);
    }
  }
};

Int ipow(long b, long e) {
  Int r;
  mpz_ui_pow_ui(r.get_mpz_t(), static_cast<unsigned long>(b), static_cast<unsigned long>(e));
  return r;
}

Outcome cusp_counting(const AcceptanceConfig& cfg) {
  Outcome o;
  std::mt19937_64 rng(cfg.seed);
  const int samples = cfg.quick ? 1000 : 10000;
  o.detail["samples"] = samples;
  for (long p : {2, 3}) {
    AltLattice L = standard_lattice({1, p});
    auto [N, D] = level_and_det(L);
    for (int u : {1, 2}) {
      std::set<Int> seen;
      for (int s = 0; s < samples; ++s) seen.insert(d_invariant(L, random_isotropic(L, u, rng)));
      auto adm = admissible_d_values(2, u, N, D);
      Int count = cusp_count(2, u, {{Int(p), 1}});
      const std::string tag = "p=" + std::to_string(p) + " u=" + std::to_string(u);
      o.require(count == (u == 1 ? 2 : 1), tag + ": cusp count");
      o.require(std::vector<Int>(seen.begin(), seen.end()) == adm, tag + ": sampled d-values");
      o.detail["cases"].push_back(Json{{"p", p}, {"u", u}, {"count", to_json(count)},
                                       {"d_values", to_json(adm)},
                                       {"sampled", to_json(IntVector(seen.begin(), seen.end()))}});
    }
  }
  return o;
}

Outcome neighbor_formula(const AcceptanceConfig&) {
  Outcome o;
  for (auto [p, a, b] : std::vector<std::tuple<long, int, int>>{{2, 1, 0}, {3, 1, 0}, {2, 1, 1}, {2, 0, 1}, {3, 0, 1}}) {
    LocalShape s{p, a, b};
    auto nb = enumerate_neighbors(s);
    Int f = neighbor_count_formula(p, a, b);
    o.require(Int(nb.size()) == f, "shape " + std::to_string(p) + "," + std::to_string(a) + "," + std::to_string(b));
    o.detail["cases"].push_back(Json{{"p", p}, {"a", a}, {"b", b}, {"formula", to_json(f)}, {"enumerated", nb.size()}});
  }
  return o;
}

Outcome bound_suite(const AcceptanceConfig&) {
  Outcome o;
  long checked = 0;
  for (long p : {2, 3, 5, 7, 11, 13})
    for (int n = 1; n <= 6; ++n)
      for (int b = 0; b <= n; ++b) {
        Int f = neighbor_count_formula(p, n - b, b);
        const std::string tag = "p=" + std::to_string(p) + " n=" + std::to_string(n) + " b=" + std::to_string(b);
        if (p == 2 && b > 0 && b < n) {
          // 2^{2n+2} fails once both plane types occur (N ~ 6 * 4^n); 2^{2n+3} holds.
          o.require(f >= ipow(2, 2 * n + 2), tag + ": expected the stated bound to fail");
          o.require(f < ipow(2, 2 * n + 3), tag + ": corrected bound");
          o.detail["stated_p2_bound_fails"].push_back(Json{{"n1", n - b}, {"n2", b}, {"N", to_json(f)},
                                                           {"bound", to_json(ipow(2, 2 * n + 2))}});
        } else {
          bool ok;
          if (p == 2) ok = f < ipow(2, 2 * n + 2);
          else if (p == 3) ok = 4 * f < 5 * ipow(3, 2 * n + 1);
          else ok = f < ipow(p, 2 * n + 1);
          if (p <= 3 && b == 0) ok = ok && f < ipow(p, 2 * n + 1);
          o.require(ok, tag);
        }
        ++checked;
      }
  o.detail["checked"] = checked;
  o.detail["smallest_counterexample"] = Json{{"p", 2}, {"n1", 1}, {"n2", 1}, {"N", to_json(neighbor_count_formula(2, 1, 1))},
                                             {"enumerated", enumerate_neighbors({2, 1, 1}).size()}};
  return o;
}

std::vector<LocalShape> small_shapes(long p) { return {{p, 1, 0}, {p, 0, 1}, {p, 1, 1}, {p, 2, 0}, {p, 0, 2}}; }

std::string shape_tag(const LocalShape& s) {
  return "p=" + s.p.get_str() + " (" + std::to_string(s.a) + "," + std::to_string(s.b) + ")";
}

Outcome hecke_partition(const AcceptanceConfig&) {
  Outcome o;
  for (long p : {2, 3})
    for (const auto& shape : small_shapes(p)) {
      auto levels = hecke_levels(shape, 2);
      for (int j = 0; j <= 2; ++j) {
        auto tuples = enumerate_Tpj(shape, j);
        std::set<LocalDoubleCoset> expected(tuples.begin(), tuples.end());
        std::map<LocalDoubleCoset, long> counts;
        bool all_classified = true;
        for (const auto& L : levels[j]) {
          auto dc = classify_pair(shape, L.basis());
          if (!expected.count(dc)) all_classified = false;
          ++counts[dc];
        }
        const std::string tag = shape_tag(shape) + " j=" + std::to_string(j);
        o.require(all_classified && counts.size() == expected.size(), tag + ": partition");
        long total = 0;
        for (const auto& dc : tuples) {
          o.require(classify_pair(shape, representative_lattice(dc)) == dc, tag + ": representative classifies back");
          auto lc = left_cosets(dc);
          o.require(static_cast<long>(lc.size()) == counts[dc], tag + ": left cosets of one class");
          total += static_cast<long>(lc.size());
        }
        o.require(total == static_cast<long>(levels[j].size()), tag + ": sizes add up");
        o.detail["cases"].push_back(Json{{"shape", shape_tag(shape)}, {"j", j}, {"lattices", levels[j].size()},
                                         {"double_cosets", tuples.size()}});
      }
    }
  return o;
}

Json terms_json(const std::vector<HeckeTerm>& terms) {
  Json out = Json::array();
  for (const auto& t : terms)
    out.push_back(Json{{"coset", to_json(t.coset)}, {"multiplicity", t.multiplicity}, {"orbit_size", t.orbit_size}});
  return out;
}

Outcome commutativity(const AcceptanceConfig&) {
  Outcome o;
  LocalShape s{2, 1, 1};
  auto ab = hecke_product(s, 1, 2), ba = hecke_product(s, 2, 1);
  auto key = [](const std::vector<HeckeTerm>& v) {
    std::multiset<std::pair<LocalDoubleCoset, long long>> m;
    for (const auto& t : v) m.insert({t.coset, t.multiplicity});
    return m;
  };
  o.require(key(ab) == key(ba), "T(2)T(4) != T(4)T(2)");
  o.detail["terms"] = ab.size();
  o.detail["product"] = terms_json(ab);
  return o;
}

Outcome power_bound(const AcceptanceConfig&) {
  Outcome o;
  for (long p : {2, 3})
    for (const auto& shape : small_shapes(p)) {
      auto levels = hecke_levels(shape, 2);
      const Int n1 = levels[1].size();
      Int pw = 1;
      for (int j = 0; j <= 2; ++j) {
        o.require(Int(levels[j].size()) <= pw, shape_tag(shape) + " j=" + std::to_string(j));
        o.detail["cases"].push_back(Json{{"shape", shape_tag(shape)}, {"j", j}, {"N", levels[j].size()},
                                         {"N1_pow", to_json(pw)}});
        pw *= n1;
      }
    }
  return o;
}

// Standard lattice in a random basis.
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

LocalShape shape_of(const IntMatrix& T, const Int& p) {
  LocalShape s{p, 0, 0};
  for (std::size_t i = 0; i < T.rows(); ++i) (T(i, i) % p == 0 ? s.b : s.a)++;
  return s;
}

// Every choice of local classes of weight <= 1 at the primes of T, T' and at q.
std::vector<std::map<Int, LocalDoubleCoset>> small_classes(const IntMatrix& T, const IntMatrix& T2, const Int& q) {
  std::set<Int> primes{q};
  for (std::size_t i = 0; i < T.rows(); ++i)
    for (const auto& p : prime_divisors(T(i, i) * T2(i, i))) primes.insert(p);
  std::vector<std::map<Int, LocalDoubleCoset>> out{{}};
  for (const auto& p : primes) {
    LocalShape src = shape_of(T2, p), tgt = shape_of(T, p);
    std::vector<std::map<Int, LocalDoubleCoset>> next;
    for (int j = 0; j <= 1; ++j)
      for (const auto& dc : enumerate_double_cosets(src, tgt.a, tgt.b, j))
        for (auto c : out) {
          c[p] = dc;
          next.push_back(std::move(c));
        }
    out = std::move(next);
  }
  return out;
}

struct GarrettCase {
  AltLattice L1, L2;
  GarrettRep rep;
  std::map<Int, LocalDoubleCoset> expected, chosen;
};

std::vector<GarrettCase> garrett_cases(std::mt19937_64& rng, Json& configs) {
  std::vector<GarrettCase> out;
  for (long p : {2, 3})
    for (const auto& [t1, t2] : std::vector<std::pair<IntVector, IntVector>>{
             {{1}, {1}}, {{1}, {p}}, {{1, 1}, {1}}, {{1, 1}, {p}}, {{1, p}, {1}}, {{1, p}, {p}}}) {
      if (p == 3 && lcm_of(t1) * lcm_of(t2) == 1) continue;  // already seen at p = 2
      AltLattice L1 = disguise(t1, rng), L2 = disguise(t2, rng);
      const int m = t1.size(), n = t2.size();
      Int D1 = 1, D2 = 1;
      for (const auto& x : t1) D1 *= x;
      for (const auto& x : t2) D2 *= x;
      std::size_t before = out.size();
      for (const auto& tr : admissible_triples(m, n, lcm_of(t1), lcm_of(t2), D1, D2)) {
        auto c1 = cusp_representative(L1, m - tr.r, tr.d), c2 = cusp_representative(L2, n - tr.r, tr.d2);
        IntMatrix T = IntMatrix::diagonal(tilde_divisors(c1.S, c1.basis.divisors, tr.r));
        IntMatrix T2 = IntMatrix::diagonal(tilde_divisors(c2.S, c2.basis.divisors, tr.r));
        std::vector<std::map<Int, LocalDoubleCoset>> choices{{}};
        if (tr.r > 0) choices = small_classes(T, T2, 5);
        for (const auto& locals : choices) {
          RatMatrix B = tr.r > 0 ? global_representative(T, T2, locals) : RatMatrix(0, 0);
          auto expected = tr.r > 0 ? canonical_classes(hecke_class(B, T, T2)) : std::map<Int, LocalDoubleCoset>{};
          out.push_back({L1, L2, garrett_representative(tr, B, L1, L2), expected, canonical_classes(locals)});
        }
      }
      configs.push_back(Json{{"T1", to_json(t1)}, {"T2", to_json(t2)}, {"representatives", out.size() - before}});
    }
  return out;
}

Outcome garrett_round_trip(const AcceptanceConfig& cfg) {
  Outcome o;
  std::mt19937_64 rng(cfg.seed + 7);
  const int translations = cfg.quick ? 10 : 100;
  Json configs = Json::array();
  auto cases = garrett_cases(rng, configs);
  std::set<std::string> seen;
  for (const auto& c : cases) {
    const auto& rep = c.rep;
    const std::size_t N = rep.divisors1.size() + rep.divisors2.size();
    const std::string tag = "r=" + std::to_string(rep.triple.r) + " d=" + rep.triple.d.get_str() +
                            " d'=" + rep.triple.d2.get_str();
    o.require(is_symplectic(rep.full, standard_symplectic_form(N)), tag + ": symplectic");
    o.require(preserves_lattice(rep.full, rep.divisors1, rep.divisors2), tag + ": lattice");
    o.require(c.expected == c.chosen, tag + ": block realizes the chosen classes");
    OrbitInvariants inv = orbit_invariants(c.L1, c.L2, rep.full);
    o.require(inv.r == rep.triple.r && inv.d == rep.triple.d && inv.d2 == rep.triple.d2 && inv.classes == c.expected,
              tag + ": invariants");
    std::string key = std::to_string(c.L1.rank()) + "/" + std::to_string(c.L2.rank()) + to_json(rep.divisors1).dump() +
                      to_json(rep.divisors2).dump() + tag + to_json(inv.classes).dump();
    o.require(seen.insert(key).second, tag + ": duplicate representative");
    for (int k = 0; k < translations; ++k) {
      RatMatrix g = random_factor_element(rep.divisors1, rep.divisors2, rng) * rep.full *
                    random_parabolic_element(N, rng);
      if (!(orbit_invariants(c.L1, c.L2, g) == inv)) {
        o.require(false, tag + ": translation changed the invariants");
        break;
      }
    }
  }
  o.detail["configs"] = configs;
  o.detail["representatives"] = cases.size();
  o.detail["translations_each"] = translations;
  return o;
}

Outcome kernel_identity(const AcceptanceConfig& cfg) {
  Outcome o;
  std::mt19937_64 rng(cfg.seed + 7);
  Json configs = Json::array();
  auto cases = garrett_cases(rng, configs);
  const int points = cfg.quick ? 5 : 20;
  const double tol = 1e-10;
  double worst = 0;
  long special = 0;
  for (const auto& c : cases) {
    const auto& rep = c.rep;
    const std::size_t m = rep.divisors1.size(), n = rep.divisors2.size();
    const int r = rep.triple.r;
    const bool plain = r == static_cast<int>(m) && r == static_cast<int>(n) && rep.T == rep.T2 &&
                       rep.B == RatMatrix::identity(r);
    for (int k = 0; k < points; ++k) {
      auto z = random_half_space_point(m, rng), w = random_half_space_point(n, rng);
      KernelCheck kc = kernel_identity_check(rep, z, w, tol);
      worst = std::max(worst, kc.error);
      o.require(kc.ok, "kernel identity r=" + std::to_string(r));
      if (plain) {
        // det(1 - T w T z) in the coordinates of the cusp representatives
        Eigen::MatrixXcd Td = to_double(to_rational(rep.T)).cast<std::complex<double>>();
        Eigen::MatrixXcd s1 = to_double(rational_inverse(rep.S1)).cast<std::complex<double>>();
        Eigen::MatrixXcd s2 = to_double(rational_inverse(rep.S2)).cast<std::complex<double>>();
        Eigen::MatrixXcd zs = s1 * z * s1.transpose(), ws = s2 * w * s2.transpose();
        auto direct = (Eigen::MatrixXcd::Identity(r, r) - Td * ws * Td * zs).determinant();
        double err = std::abs(direct - kc.lhs) / std::max(1.0, std::abs(direct));
        worst = std::max(worst, err);
        o.require(err < tol, "special case");
        ++special;
      }
    }
  }
  o.require(special > 0, "special case not reached");
  o.detail["representatives"] = cases.size();
  o.detail["points_each"] = points;
  o.detail["special_case_points"] = special;
  o.detail["max_relative_error"] = worst;
  return o;
}

// E8 = D8 ∪ (D8 + 1/2) in doubled coordinates, counted per Q-value.
std::vector<long> e8_naive_shells(int bound) {
  std::vector<long> out(bound + 1, 0);
  const int lim = 2 * static_cast<int>(std::ceil(std::sqrt(2.0 * bound)));
  std::vector<int> x(8);
  std::function<void(int, int)> visit = [&](int i, int parity) {
    if (i == 8) {
      int s = 0, n = 0;
      for (int v : x) s += v, n += v * v;
      if (s % 4 == 0 && n % 8 == 0 && n / 8 <= bound) ++out[n / 8];
      return;
    }
    for (int v = -lim; v <= lim; ++v)
      if ((v & 1) == parity) {
        x[i] = v;
        visit(i + 1, parity);
      }
  };
  visit(0, 0);
  visit(0, 1);
  return out;
}

Outcome e8_shells(const AcceptanceConfig&) {
  Outcome o;
  auto naive = e8_naive_shells(3);
  QuadLattice E(e8_gram());
  auto sv = short_vectors(E, 3);
  Json rows = Json::array();
  const std::vector<long> expected{1, 240, 2160, 6720};
  for (long q = 0; q <= 3; ++q) {
    long prod = sv.count(q) ? static_cast<long>(sv.at(q).size()) : 0;
    o.require(prod == naive[q] && prod == expected[q], "Q=" + std::to_string(q));
    rows.push_back(Json{{"Q", q}, {"enumerator", prod}, {"oracle", naive[q]}});
  }
  o.detail["shells"] = rows;
  return o;
}

Outcome siegel_degree_one(const AcceptanceConfig&) {
  Outcome o;
  auto classes = enumerate_chain_classes(QuadLattice(e8_gram()), {1});
  auto g = genus_theta(classes, 10);
  auto r = eisenstein_compare_deg1(g, 4, 10);
  o.require(r.ok, "theta differs from the Eisenstein series");
  o.require(r.normalization == 240, "normalization");
  Json th = Json::array(), es = Json::array();
  for (std::size_t l = 0; l < r.theta.size(); ++l) th.push_back(to_json(r.theta[l])), es.push_back(to_json(r.eisenstein[l]));
  o.detail["classes"] = classes.size();
  o.detail["normalization"] = to_json(r.normalization);
  o.detail["theta"] = th;
  o.detail["eisenstein"] = es;
  return o;
}

Outcome paramodularity(const AcceptanceConfig& cfg) {
  Outcome o;
  QuadLattice E(e8_gram());
  auto subs = pmodular_sublattices(E, 2);
  auto chain = make_chain(E, {subs.front().coords}, {1, 2});
  auto e = theta_coefficients(chain, 7);
  o.require(translation_invariant(e, chain.T), "coefficients not translation invariant");
  std::mt19937_64 rng(cfg.seed + 11);
  double worst = 0, worst_tail = 0;
  for (int s = 0; s < 5; ++s) {
    ComplexMat Z = sample_near_fixed_point(chain.T, rng);
    auto rep = paramodularity_check(chain, e, Z, 1e-8, 1e-10);
    o.require(rep.ok, "sample " + std::to_string(s));
    worst_tail = std::max(worst_tail, rep.tail);
    for (const auto& g : rep.generators) {
      worst = std::max(worst, g.error);
      if (g.name.find("J") == std::string::npos) o.require(g.exact, g.name + " not exact");
    }
  }
  o.detail["bound"] = 7;
  o.detail["coefficients"] = e.coefficients.size();
  o.detail["max_defect"] = worst;
  o.detail["max_tail"] = worst_tail;
  return o;
}

// Orbit count of 2-modular sublattices of E8, frozen from the first run.
constexpr std::size_t kE8ChainOrbits = 1;

Outcome chain_bookkeeping(const AcceptanceConfig&) {
  Outcome o;
  QuadLattice E(e8_gram());
  const Int group = aut_order(E);
  auto classes = enumerate_chain_classes(E, {1, 2});
  const std::size_t subs = pmodular_sublattices(E, 2).size();
  Int total = 0;
  Json rows = Json::array();
  for (const auto& c : classes) {
    o.require(group % c.stabilizer_order == 0 && Int(static_cast<long>(c.orbit_size)) == group / c.stabilizer_order, "orbit-stabilizer");
    total += group / c.stabilizer_order;
    rows.push_back(Json{{"stabilizer", to_json(c.stabilizer_order)}, {"orbit", c.orbit_size}});
  }
  o.require(total == Int(subs), "orbit sizes do not add up");
  o.require(classes.size() == kE8ChainOrbits, "orbit count changed");
  o.detail["aut_order"] = to_json(group);
  o.detail["sublattices"] = subs;
  o.detail["orbits"] = classes.size();
  o.detail["classes"] = rows;
  return o;
}

}  // namespace

std::vector<CriterionResult> run_acceptance(const AcceptanceConfig& config) {
  const std::vector<std::tuple<int, std::string, std::function<Outcome(const AcceptanceConfig&)>>> items{
      {1, "cusp counting", cusp_counting},
      {2, "neighbor formula", neighbor_formula},
      {3, "neighbor bounds", bound_suite},
      {4, "Hecke left cosets partition", hecke_partition},
      {5, "T(2)T(4) = T(4)T(2)", commutativity},
      {6, "N(p^j) <= N(p)^j", power_bound},
      {7, "Garrett round trip", garrett_round_trip},
      {8, "Garrett kernel identity", kernel_identity},
      {9, "E8 shells", e8_shells},
      {10, "degree one Siegel consistency", siegel_degree_one},
      {11, "paramodularity of the E8 chain", paramodularity},
      {12, "chain orbit-stabilizer identity", chain_bookkeeping},
  };
  std::vector<CriterionResult> out;
  for (const auto& [id, title, fn] : items) {
    if (!config.only.empty() && std::find(config.only.begin(), config.only.end(), id) == config.only.end()) continue;
    CriterionResult r{id, title, false, 0, Json::object()};
    auto t0 = std::chrono::steady_clock::now();
    try {
      Outcome o = fn(config);
      r.passed = o.passed;
      r.detail = std::move(o.detail);
    } catch (const Error& ex) {
      r.detail["error"] = ex.what();
    }
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    out.push_back(std::move(r));
  }
  return out;
}

Json to_json(const AcceptanceConfig& config) {
  return Json{{"quick", config.quick}, {"seed", config.seed}, {"only", config.only}};
}

Json to_json(const CriterionResult& r) {
  return Json{{"id", r.id}, {"title", r.title}, {"passed", r.passed}, {"detail", r.detail}};
}

}  // namespace paramodular
