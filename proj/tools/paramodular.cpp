#include <omp.h>

#include <cstdlib>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <set>

#include <CLI11.hpp>

#include "paramodular/acceptance.hpp"
#include "paramodular/automorphism.hpp"

using namespace paramodular;

namespace {

struct Options {
  bool pretty = false;
  int threads = 0;
  std::uint64_t seed = 1;
  long long budget = 10'000'000;
  std::string out;
};

IntVector parse_ints(const std::vector<std::string>& items) {
  IntVector v;
  for (const auto& s : items) v.push_back(int_from_json(Json(s)));
  return v;
}

LocalShape parse_shape(long p, const std::vector<int>& ab) {
  if (ab.size() != 2 || ab[0] < 0 || ab[1] < 0 || ab[0] + ab[1] < 1)
    throw Error(ErrorCode::InvalidArgument, "--shape takes a,b with a + b >= 1");
  if (p < 2 || prime_divisors(p) != std::vector<Int>{Int(p)}) throw Error(ErrorCode::InvalidArgument, "--p must be prime");
  return {p, ab[0], ab[1]};
}

std::map<Int, int> ell_of(const IntVector& divisors) {
  std::map<Int, int> ell;
  for (const auto& d : divisors)
    for (const auto& p : prime_divisors(d)) ++ell[p];
  return ell;
}

AltLattice alt_lattice_from(const std::vector<std::string>& T, const std::string& gram_path) {
  if (!gram_path.empty()) return AltLattice(int_matrix_from_json(read_json_file(gram_path).at("gram")));
  if (T.empty()) throw Error(ErrorCode::InvalidArgument, "give --T or --gram");
  return standard_lattice(parse_ints(T));
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Paramodular lattices, local Hecke algebras, Garrett double cosets and theta series"};
  app.require_subcommand(1);
  app.fallthrough();
  Options opt;
  app.add_flag("--pretty", opt.pretty, "indent JSON output");
  app.add_option("--threads", opt.threads, "OpenMP threads (default: PARAMODULAR_THREADS, else all cores)");
  app.add_option("--out", opt.out, "write the report to this file instead of stdout");
  std::vector<std::pair<CLI::App*, std::function<int(Json&)>>> commands;

  // cusps
  {
    auto* sub = app.add_subcommand("cusps", "zero-dimensional cusps: admissible d and representatives");
    static std::vector<std::string> T;
    static std::string gram;
    static int u = 1;
    sub->add_option("--T", T, "elementary divisors of the standard lattice")->delimiter(',');
    sub->add_option("--gram", gram, "JSON file {gram: alternating matrix}");
    sub->add_option("--u", u, "rank of the isotropic submodules")->check(CLI::PositiveNumber);
    commands.emplace_back(sub, [](Json& r) {
      r["config"] = Json{{"T", T}, {"gram", gram}, {"u", u}};
      AltLattice L = alt_lattice_from(T, gram);
      auto basis = para_symplectic_basis(L);
      const int m = static_cast<int>(L.rank() / 2);
      auto [N, D] = level_and_det(L);
      auto ds = admissible_d_values(m, u, N, D);
      r["divisors"] = to_json(basis.divisors);
      r["count"] = to_json(cusp_count(m, u, ell_of(basis.divisors)));
      r["d_values"] = to_json(IntVector(ds.begin(), ds.end()));
      Json reps = Json::array();
      for (const auto& d : ds) {
        auto c = cusp_representative(L, u, d);
        reps.push_back(Json{{"d", to_json(d)}, {"S", to_json(c.S)}, {"gamma", to_json(c.gamma)},
                            {"submodule", to_json(cusp_submodule(c, u).generators)}});
      }
      r["representatives"] = reps;
      return 0;
    });
  }

  // neighbors
  {
    auto* sub = app.add_subcommand("neighbors", "neighbors of the standard local lattice");
    static long p = 2;
    static std::vector<int> shape{1, 1};
    static bool count_only = false, reference = false;
    sub->add_option("--p", p, "prime")->required();
    sub->add_option("--shape", shape, "a,b: unimodular and p-modular planes")->delimiter(',')->required();
    sub->add_flag("--count-only", count_only, "omit the lattices");
    sub->add_flag("--reference", reference, "use the serial enumerator");
    sub->add_option("--budget", opt.budget, "candidate cap");
    commands.emplace_back(sub, [&opt](Json& r) {
      r["config"] = Json{{"p", p}, {"shape", shape}, {"count_only", count_only}, {"reference", reference},
                         {"budget", opt.budget}};
      LocalShape s = parse_shape(p, shape);
      EnumerationBudget b{opt.budget};
      auto nb = reference ? enumerate_neighbors_reference(s, b) : enumerate_neighbors(s, b);
      r["formula"] = to_json(neighbor_count_formula(s.p, s.a, s.b));
      r["enumerated"] = nb.size();
      if (!count_only) {
        Json list = Json::array();
        for (const auto& L : nb) list.push_back(to_json(L.basis()));
        r["lattices"] = list;
      }
      return 0;
    });
  }

  // hecke-reps
  {
    auto* sub = app.add_subcommand("hecke-reps", "double coset representatives of T(p^j)");
    static long p = 2;
    static std::vector<int> shape{1, 1};
    static int j = 1;
    sub->add_option("--p", p, "prime")->required();
    sub->add_option("--shape", shape, "a,b")->delimiter(',')->required();
    sub->add_option("--j", j, "exponent")->check(CLI::NonNegativeNumber);
    commands.emplace_back(sub, [](Json& r) {
      r["config"] = Json{{"p", p}, {"shape", shape}, {"j", j}};
      LocalShape s = parse_shape(p, shape);
      Json list = Json::array();
      for (const auto& dc : enumerate_Tpj(s, j))
        list.push_back(Json{{"invariant", to_json(dc)}, {"matrix", to_json(representative_matrix(dc))}});
      r["representatives"] = list;
      return 0;
    });
  }

  // cosets
  {
    auto* sub = app.add_subcommand("cosets", "left cosets of each double coset in T(p^j)");
    static long p = 2;
    static std::vector<int> shape{1, 1};
    static int j = 1;
    static bool count_only = false;
    sub->add_option("--p", p, "prime")->required();
    sub->add_option("--shape", shape, "a,b")->delimiter(',')->required();
    sub->add_option("--j", j, "exponent")->check(CLI::NonNegativeNumber);
    sub->add_flag("--count-only", count_only, "omit the lattices");
    sub->add_option("--budget", opt.budget, "candidate cap");
    commands.emplace_back(sub, [&opt](Json& r) {
      r["config"] = Json{{"p", p}, {"shape", shape}, {"j", j}, {"count_only", count_only}, {"budget", opt.budget}};
      LocalShape s = parse_shape(p, shape);
      Json list = Json::array();
      std::size_t total = 0;
      for (const auto& dc : enumerate_Tpj(s, j)) {
        auto lc = left_cosets(dc, EnumerationBudget{opt.budget});
        total += lc.size();
        Json entry{{"invariant", to_json(dc)}, {"count", lc.size()}};
        if (!count_only) {
          Json ls = Json::array();
          for (const auto& L : lc) ls.push_back(to_json(L.basis()));
          entry["lattices"] = ls;
        }
        list.push_back(entry);
      }
      r["double_cosets"] = list;
      r["total"] = total;
      return 0;
    });
  }

  // garrett
  {
    auto* sub = app.add_subcommand("garrett", "Garrett double coset representatives");
    static int m = 1, n = 1, samples = 20;
    static std::vector<std::string> T1{"1"}, T2{"1"};
    static bool list = false, check_kernel = false;
    static double tol = 1e-10;
    static std::vector<int> weights{0, 1};
    static long q = 0;
    sub->add_option("--m", m, "rank of the first lattice")->check(CLI::PositiveNumber);
    sub->add_option("--n", n, "rank of the second lattice")->check(CLI::PositiveNumber);
    sub->add_option("--T1", T1, "level of the first lattice (a single N or m divisors)")->delimiter(',');
    sub->add_option("--T2", T2, "level of the second lattice")->delimiter(',');
    sub->add_flag("--list", list, "include the representative matrices");
    sub->add_option("--extra-prime", q, "also vary the Hecke class at this prime");
    sub->add_flag("--check-kernel", check_kernel, "compare det(C iota + 1) with the reduced kernel");
    sub->add_option("--samples", samples, "kernel sample points per representative");
    sub->add_option("--tol", tol, "kernel tolerance");
    sub->add_option("--seed", opt.seed, "random seed");
    commands.emplace_back(sub, [&opt](Json& r) {
      r["config"] = Json{{"m", m}, {"n", n}, {"T1", T1}, {"T2", T2}, {"list", list}, {"extra_prime", q},
                         {"check_kernel", check_kernel}, {"samples", samples}, {"tol", tol}, {"seed", opt.seed}};
      auto expand = [](const std::vector<std::string>& t, int k) {
        IntVector v = parse_ints(t);
        if (v.size() == 1 && k > 1) {  // N: paramodular type (1, ..., 1, N)
          IntVector w(k, 1);
          w.back() = v[0];
          return w;
        }
        if (static_cast<int>(v.size()) != k) throw Error(ErrorCode::InvalidArgument, "level length must match the rank");
        return v;
      };
      IntVector t1 = expand(T1, m), t2 = expand(T2, n);
      AltLattice L1 = standard_lattice(t1), L2 = standard_lattice(t2);
      Int D1 = 1, D2 = 1;
      for (const auto& x : t1) D1 *= x;
      for (const auto& x : t2) D2 *= x;
      std::mt19937_64 rng(opt.seed);
      Json reps = Json::array();
      bool all_ok = true;
      double worst = 0;
      for (const auto& tr : admissible_triples(m, n, lcm_of(t1), lcm_of(t2), D1, D2)) {
        auto c1 = cusp_representative(L1, m - tr.r, tr.d), c2 = cusp_representative(L2, n - tr.r, tr.d2);
        IntMatrix T = IntMatrix::diagonal(tilde_divisors(c1.S, c1.basis.divisors, tr.r));
        IntMatrix Tp = IntMatrix::diagonal(tilde_divisors(c2.S, c2.basis.divisors, tr.r));
        // Hecke classes: trivial, plus weight one at the level primes and the extra prime.
        std::set<Int> primes;
        if (q > 1) primes.insert(q);
        for (std::size_t i = 0; i < T.rows(); ++i)
          for (const auto& p : prime_divisors(T(i, i) * Tp(i, i))) primes.insert(p);
        std::vector<std::map<Int, LocalDoubleCoset>> choices{{}};
        if (tr.r > 0)
          for (const auto& p : primes) {
            LocalShape src{p, 0, 0}, tgt{p, 0, 0};
            for (std::size_t i = 0; i < T.rows(); ++i) {
              (Tp(i, i) % p == 0 ? src.b : src.a)++;
              (T(i, i) % p == 0 ? tgt.b : tgt.a)++;
            }
            std::vector<std::map<Int, LocalDoubleCoset>> next;
            for (int w : weights)
              for (const auto& dc : enumerate_double_cosets(src, tgt.a, tgt.b, w))
                for (auto c : choices) {
                  c[p] = dc;
                  next.push_back(std::move(c));
                }
            choices = std::move(next);
          }
        for (const auto& locals : choices) {
          RatMatrix B = tr.r > 0 ? global_representative(T, Tp, locals) : RatMatrix(0, 0);
          GarrettRep rep = garrett_representative(tr, B, L1, L2);
          Json e{{"triple", to_json(tr)}, {"T", to_json(tilde_divisors(c1.S, c1.basis.divisors, tr.r))},
                 {"T_prime", to_json(tilde_divisors(c2.S, c2.basis.divisors, tr.r))},
                 {"classes", tr.r > 0 ? to_json(canonical_classes(hecke_class(B, T, Tp))) : Json::array()}};
          if (list) {
            e["B"] = to_json(B);
            e["matrix"] = to_json(rep.full);
          }
          if (check_kernel) {
            for (int k = 0; k < samples; ++k) {
              auto kc = kernel_identity_check(rep, random_half_space_point(m, rng), random_half_space_point(n, rng), tol);
              worst = std::max(worst, kc.error);
              all_ok = all_ok && kc.ok;
            }
          }
          reps.push_back(e);
        }
      }
      r["representatives"] = reps;
      r["count"] = reps.size();
      if (check_kernel) r["kernel"] = Json{{"ok", all_ok}, {"max_relative_error", worst}};
      return all_ok ? 0 : 1;
    });
  }

  // theta
  {
    auto* sub = app.add_subcommand("theta", "theta coefficients of a paramodular chain");
    static std::string chain_path;
    static long bound = 6;
    static bool check = false;
    static int samples = 5;
    static double tol = 1e-8, tail_tol = 1e-10;
    static long long max_vectors = 50'000'000;
    sub->add_option("--chain", chain_path, "JSON file {gram1, coords, T}")->required();
    sub->add_option("--trace-bound", bound, "keep tuples with sum Q(x_i)/t_i <= bound")->check(CLI::NonNegativeNumber);
    sub->add_flag("--check-modularity", check, "numerical check of the paramodular generators");
    sub->add_option("--samples", samples, "sample points");
    sub->add_option("--tol", tol, "defect tolerance");
    sub->add_option("--tail-tol", tail_tol, "tail tolerance");
    sub->add_option("--max-vectors", max_vectors, "short vector budget");
    sub->add_option("--seed", opt.seed, "random seed");
    commands.emplace_back(sub, [&opt](Json& r) {
      r["config"] = Json{{"chain", chain_path}, {"trace_bound", bound}, {"check_modularity", check},
                         {"samples", samples}, {"tol", tol}, {"tail_tol", tail_tol},
                         {"max_vectors", max_vectors}, {"seed", opt.seed}};
      auto chain = chain_from_json(read_json_file(chain_path));
      ThetaBudget budget;
      budget.max_vectors = max_vectors;
      auto e = theta_coefficients(chain, bound, budget);
      r["degree"] = e.n;
      r["weight"] = chain.first.rank() / 2;
      r["translation_invariant"] = translation_invariant(e, chain.T);
      r["coefficients"] = coefficients_json(e);
      int rc = 0;
      if (check) {
        std::mt19937_64 rng(opt.seed);
        Json pts = Json::array();
        for (int s = 0; s < samples; ++s) {
          ComplexMat Z = sample_near_fixed_point(chain.T, rng);
          auto rep = paramodularity_check(chain, e, Z, tol, tail_tol);
          Json gens = Json::array();
          for (const auto& g : rep.generators) gens.push_back(Json{{"name", g.name}, {"error", g.error}, {"exact", g.exact}});
          pts.push_back(Json{{"ok", rep.ok}, {"tail", rep.tail}, {"generators", gens}});
          if (!rep.ok) rc = 1;
        }
        r["modularity"] = Json{{"ok", rc == 0}, {"points", pts}};
      }
      return rc;
    });
  }

  // chains
  {
    auto* sub = app.add_subcommand("chains", "classes of paramodular chains starting at a lattice");
    static std::string lattice;
    static std::vector<std::string> T{"1", "2"};
    sub->add_option("--lattice", lattice, "JSON file {gram}")->required();
    sub->add_option("--T", T, "t_1, ..., t_n")->delimiter(',');
    commands.emplace_back(sub, [](Json& r) {
      r["config"] = Json{{"lattice", lattice}, {"T", T}};
      QuadLattice L = lattice_from_json(read_json_file(lattice));
      auto classes = enumerate_chain_classes(L, parse_ints(T));
      Json list = Json::array();
      for (const auto& c : classes)
        list.push_back(Json{{"chain", chain_to_json(c.representative)}, {"stabilizer_order", to_json(c.stabilizer_order)},
                            {"orbit_size", c.orbit_size}});
      r["aut_order"] = to_json(aut_order(L));
      r["classes"] = list;
      r["count"] = classes.size();
      return 0;
    });
  }

  // genus
  {
    auto* sub = app.add_subcommand("genus", "weighted genus theta series");
    static std::string lattice;
    static std::vector<std::string> T{"1"};
    static long bound = 6;
    static int eisenstein = 0;
    sub->add_option("--lattice", lattice, "JSON file {gram}")->required();
    sub->add_option("--T", T, "t_1, ..., t_n")->delimiter(',');
    sub->add_option("--trace-bound", bound, "truncation")->check(CLI::NonNegativeNumber);
    sub->add_option("--eisenstein", eisenstein, "compare with the degree one Eisenstein series of this weight");
    commands.emplace_back(sub, [](Json& r) {
      r["config"] = Json{{"lattice", lattice}, {"T", T}, {"trace_bound", bound}, {"eisenstein", eisenstein}};
      QuadLattice L = lattice_from_json(read_json_file(lattice));
      auto classes = enumerate_chain_classes(L, parse_ints(T));
      auto g = genus_theta(classes, bound);
      Json ws = Json::array();
      for (const auto& w : g.weights) ws.push_back(to_json(w));
      r["class_weights"] = ws;
      r["total_weight"] = to_json(g.total_weight);
      const std::size_t n = g.classes.front().n;
      const Int scale = g.classes.front().scale;
      Json coeffs = Json::array();
      for (const auto& [key, v] : g.coefficients) {
        Json flat = Json::array();
        for (const auto& row : key_matrix(key, n))
          for (long x : row) flat.push_back(to_json(Rat(Int(x), scale)));
        coeffs.push_back(Json{{"H", flat}, {"value", to_json(v)}});
      }
      r["coefficients"] = coeffs;
      if (eisenstein > 0) {
        auto e = eisenstein_compare_deg1(g, eisenstein, static_cast<int>(bound));
        Json th = Json::array(), es = Json::array();
        for (std::size_t l = 0; l < e.theta.size(); ++l) th.push_back(to_json(e.theta[l])), es.push_back(to_json(e.eisenstein[l]));
        r["eisenstein"] = Json{{"ok", e.ok}, {"normalization", to_json(e.normalization)}, {"theta", th},
                               {"eisenstein", es}, {"mismatches", e.mismatches}};
        return e.ok ? 0 : 1;
      }
      return 0;
    });
  }

  // check
  {
    auto* sub = app.add_subcommand("check", "run the acceptance suite");
    static bool quick = false;
    static std::vector<int> only;
    static std::uint64_t seed = AcceptanceConfig{}.seed;
    sub->add_flag("--quick", quick, "smaller sample counts");
    sub->add_option("--only", only, "criterion ids")->delimiter(',');
    sub->add_option("--seed", seed, "random seed");
    commands.emplace_back(sub, [](Json& r) {
      AcceptanceConfig cfg{quick, seed, only};
      r["config"] = to_json(cfg);
      Json items = Json::array();
      bool ok = true;
      for (const auto& c : run_acceptance(cfg)) {
        items.push_back(to_json(c));
        ok = ok && c.passed;
      }
      r["criteria"] = items;
      r["passed"] = ok;
      return ok ? 0 : 1;
    });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  int threads = opt.threads;
  if (threads <= 0)
    if (const char* env = std::getenv("PARAMODULAR_THREADS")) threads = std::atoi(env);
  if (threads > 0) omp_set_num_threads(threads);

  for (auto& [sub, run] : commands) {
    if (!*sub) continue;
    Json report;
    report["command"] = sub->get_name();
    int rc;
    try {
      rc = run(report);
    } catch (const Error& ex) {
      std::cerr << Json{{"command", sub->get_name()}, {"error", ex.what()}}.dump() << "\n";
      return ex.code() == ErrorCode::ScaleLimit ? 3 : 2;
    } catch (const nlohmann::json::exception& ex) {
      std::cerr << Json{{"command", sub->get_name()}, {"error", ex.what()}}.dump() << "\n";
      return 2;
    }
    const std::string text = report.dump(opt.pretty ? 2 : -1);
    if (opt.out.empty()) {
      std::cout << text << "\n";
    } else {
      std::ofstream f(opt.out);
      if (!f) {
        std::cerr << "cannot write " << opt.out << "\n";
        return 2;
      }
      f << text << "\n";
    }
    return rc;
  }
  return 2;
}
