#include "paramodular/theta.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace paramodular {

ThetaInput chain_input(const ParamodularChain& chain) {
  ThetaInput in;
  in.ambient_gram = to_rational(chain.first.gram);
  for (std::size_t j = 0; j < chain.length(); ++j) {
    in.bases.push_back(to_rational(chain.coords[j]));
    in.weights.push_back(Rat(1) / Rat(2 * chain.T[j]));
  }
  return in;
}

ThetaInput dual_input(const ThetaInput& input) {
  ThetaInput out = input;
  for (auto& U : out.bases) U = rational_inverse(U * input.ambient_gram * U.transpose()) * U;
  return out;
}

ThetaInput permuted_input(const ThetaInput& input, const std::vector<std::size_t>& perm) {
  ThetaInput out = input;
  for (std::size_t i = 0; i < perm.size(); ++i) {
    out.bases[i] = input.bases.at(perm[i]);
    out.weights[i] = input.weights.at(perm[i]);
  }
  return out;
}

ThetaKey theta_key(const std::vector<std::vector<long>>& H) {
  ThetaKey k;
  for (std::size_t i = 0; i < H.size(); ++i)
    for (std::size_t j = i; j < H.size(); ++j) k.push_back(H[i][j]);
  return k;
}

std::vector<std::vector<long>> key_matrix(const ThetaKey& key, std::size_t n) {
  std::vector<std::vector<long>> H(n, std::vector<long>(n));
  std::size_t t = 0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i; j < n; ++j) H[i][j] = H[j][i] = key.at(t++);
  return H;
}

namespace {

std::string fmt_double(double x) {
  std::ostringstream os;
  os << std::scientific << x;
  return os.str();
}

long small(const Int& v) {
  if (!v.fits_slong_p()) throw Error(ErrorCode::ScaleLimit, "value too large");
  return v.get_si();
}

Int floor_of(const Rat& r) {
  Int q;
  mpz_fdiv_q(q.get_mpz_t(), r.get_num_mpz_t(), r.get_den_mpz_t());
  return q;
}

struct Prepared {
  std::size_t n = 0, m = 0;
  Int scale, unit;
  SmallMatrix A;
  std::vector<SmallMatrix> W, G;
  std::vector<long> c;  // S * unit = sum c_i s_i with s_i = scale * b(x_i, x_i)
};

Prepared prepare(const ThetaInput& in) {
  Prepared P;
  P.n = in.degree();
  P.m = in.rank();
  if (P.n == 0) throw Error(ErrorCode::InvalidArgument, "empty lattice tuple");
  if (in.weights.size() != P.n) throw Error(ErrorCode::DimensionMismatch, "one weight per lattice");
  Int cden = 1;
  for (const auto& U : in.bases) {
    if (U.rows() != P.m || U.cols() != P.m) throw Error(ErrorCode::DimensionMismatch, "bases must be square");
    cden = lcm_of({cden, common_denominator(U)});
  }
  Int e = common_denominator(in.ambient_gram);
  P.scale = cden * cden * e;
  P.A = to_small(to_integer(in.ambient_gram.scaled(Rat(e))));
  Int D = 1;
  for (const auto& w : in.weights) {
    if (w <= 0) throw Error(ErrorCode::InvalidArgument, "weights must be positive");
    Rat r = w / Rat(P.scale);
    r.canonicalize();
    D = lcm_of({D, Int(r.get_den())});
  }
  P.unit = D;
  for (std::size_t i = 0; i < P.n; ++i) {
    IntMatrix Wi = to_integer(in.bases[i].scaled(Rat(cden)));
    P.W.push_back(to_small(Wi));
    IntMatrix Gi = Wi * to_integer(in.ambient_gram.scaled(Rat(e))) * Wi.transpose();
    P.G.push_back(to_small(Gi));
    Rat ci = in.weights[i] * Rat(D) / Rat(P.scale);
    ci.canonicalize();
    P.c.push_back(small(ci.get_num()));
  }
  return P;
}

Vec row_times(const Vec& x, const SmallMatrix& M) {
  Vec y(M.empty() ? 0 : M[0].size(), 0);
  for (std::size_t i = 0; i < x.size(); ++i)
    if (x[i] != 0)
      for (std::size_t j = 0; j < y.size(); ++j) y[j] += x[i] * M[i][j];
  return y;
}

long dot(const Vec& a, const Vec& b) {
  long s = 0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

// Vectors of one lattice with their norm s, ambient coordinates w and w A.
struct Shell {
  std::vector<long> s;
  std::vector<Vec> w, wA;
};

std::vector<Shell> shells(const Prepared& P, long bound_int, const ThetaBudget& budget) {
  std::vector<Shell> out(P.n);
  for (std::size_t i = 0; i < P.n; ++i) {
    long N = bound_int / P.c[i];
    for (auto& v : enumerate_short(P.G[i], N, {budget.max_vectors})) {
      out[i].s.push_back(v.norm);
      Vec w = row_times(v.x, P.W[i]);
      out[i].wA.push_back(row_times(w, P.A));
      out[i].w.push_back(std::move(w));
    }
  }
  return out;
}

}  // namespace

namespace {

// Dense key box: H_ii in [0, N_i], |H_ij| <= sqrt(N_i N_j).
struct KeyBox {
  std::size_t n;
  std::vector<long> lo, size;
  std::vector<std::size_t> stride;
  std::size_t total = 1;

  KeyBox(const std::vector<long>& N) : n(N.size()) {
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i; j < n; ++j) {
        long r = i == j ? 0 : static_cast<long>(std::floor(std::sqrt(double(N[i]) * double(N[j])) + 1e-9));
        lo.push_back(i == j ? 0 : -r);
        size.push_back(i == j ? N[i] + 1 : 2 * r + 1);
      }
    stride.resize(size.size());
    for (std::size_t t = size.size(); t-- > 0;) {
      stride[t] = total;
      total *= static_cast<std::size_t>(size[t]);
    }
  }
  std::size_t slot(std::size_t i, std::size_t j) const { return i * n - i * (i - 1) / 2 + (j - i); }
  ThetaKey decode(std::size_t idx) const {
    ThetaKey k(size.size());
    for (std::size_t t = 0; t < size.size(); ++t) k[t] = lo[t] + static_cast<long>((idx / stride[t]) % size[t]);
    return k;
  }
};

struct Joiner {
  const Prepared& P;
  const std::vector<Shell>& sh;
  const KeyBox& box;
  long bound_int;
  std::vector<long long>& counts;
  std::vector<std::size_t> pick;

  // offset accumulates the box index of the fixed part of the key.
  void run(std::size_t level, long used, std::size_t offset) {
    const Shell& S = sh[level];
    const long c = P.c[level];
    const std::size_t dslot = box.slot(level, level);
    for (std::size_t a = 0; a < S.s.size(); ++a) {
      long add = c * S.s[a];
      if (used + add > bound_int) break;  // shells are sorted by norm
      std::size_t idx = offset + static_cast<std::size_t>(S.s[a]) * box.stride[dslot];
      for (std::size_t j = 0; j < level; ++j) {
        std::size_t t = box.slot(j, level);
        long h = dot(sh[j].wA[pick[j]], S.w[a]);
        idx += static_cast<std::size_t>(h - box.lo[t]) * box.stride[t];
      }
      if (level + 1 == P.n) {
        ++counts[idx];
      } else {
        pick[level] = a;
        run(level + 1, used + add, idx);
      }
    }
  }
};

}  // namespace

ThetaExpansion theta_coefficients(const ThetaInput& input, const Rat& bound, const Rat& horizon,
                                  const ThetaBudget& budget) {
  if (bound < 0) throw Error(ErrorCode::InvalidArgument, "negative bound");
  if (horizon < bound) throw Error(ErrorCode::InvalidArgument, "tail horizon below the bound");
  Prepared P = prepare(input);
  ThetaExpansion e;
  e.input = input;
  e.n = P.n;
  e.scale = P.scale;
  e.bound = bound;
  e.horizon = horizon;
  e.unit = P.unit;
  const long bound_int = small(floor_of(bound * Rat(P.unit)));
  auto sh = shells(P, bound_int, budget);
  std::vector<long> N;
  for (std::size_t i = 0; i < P.n; ++i) N.push_back(bound_int / P.c[i]);
  KeyBox box(N);
  if (static_cast<long long>(box.total) > budget.max_box) throw Error(ErrorCode::ScaleLimit, "coefficient box too large");

  std::vector<long long> counts(box.total, 0);
  const Shell& first = sh[0];
  const long first_count = static_cast<long>(first.s.size());
#pragma omp parallel
  {
    std::vector<long long> local(box.total, 0);
    Joiner J{P, sh, box, bound_int, local, std::vector<std::size_t>(P.n, 0)};
#pragma omp for schedule(dynamic, 64)
    for (long a = 0; a < first_count; ++a) {
      long used = P.c[0] * first.s[a];
      if (used > bound_int) continue;
      std::size_t idx = static_cast<std::size_t>(first.s[a]) * box.stride[box.slot(0, 0)];
      if (P.n == 1) {
        ++local[idx];
        continue;
      }
      J.pick[0] = a;
      J.run(1, used, idx);
    }
#pragma omp critical
    for (std::size_t t = 0; t < box.total; ++t) counts[t] += local[t];
  }
  for (std::size_t t = 0; t < box.total; ++t)
    if (counts[t] != 0) e.coefficients.emplace(box.decode(t), Int(static_cast<long>(counts[t])));

  // Tail data up to the horizon, counts only.
  const long horizon_int = small(floor_of(horizon * Rat(P.unit)));
  for (std::size_t i = 0; i < P.n; ++i) {
    auto counts_i = norm_counts(P.G[i], horizon_int / P.c[i]);
    std::vector<long long> h(horizon_int + 1, 0);
    double mn = 0;
    for (std::size_t s = 0; s < counts_i.size(); ++s) {
      if (counts_i[s] == 0) continue;
      h[s * P.c[i]] += counts_i[s];
      if (s > 0 && mn == 0) mn = double(s) / P.scale.get_d();
    }
    if (mn == 0) mn = double(counts_i.size()) / P.scale.get_d();  // no nonzero vector below the horizon
    e.histograms.push_back(std::move(h));
    e.minima.push_back(mn);
  }
  return e;
}

ThetaExpansion theta_coefficients(const ParamodularChain& chain, long bound, const ThetaBudget& budget) {
  return theta_coefficients(chain_input(chain), Rat(bound), Rat(3 * bound + 6), budget);
}

std::map<ThetaKey, Int> theta_coefficients_reference(const ThetaInput& input, const Rat& bound,
                                                     const ThetaBudget& budget) {
  Prepared P = prepare(input);
  const long bound_int = small(floor_of(bound * Rat(P.unit)));
  auto sh = shells(P, bound_int, budget);
  std::map<ThetaKey, Int> out;
  std::vector<std::size_t> pick(P.n, 0);
  auto rec = [&](auto&& self, std::size_t level, long used) -> void {
    if (level == P.n) {
      std::vector<std::vector<long>> H(P.n, std::vector<long>(P.n));
      for (std::size_t i = 0; i < P.n; ++i)
        for (std::size_t j = 0; j < P.n; ++j) H[i][j] = dot(sh[i].w[pick[i]], sh[j].wA[pick[j]]);
      out[theta_key(H)] += 1;
      return;
    }
    for (std::size_t a = 0; a < sh[level].s.size(); ++a) {
      long add = P.c[level] * sh[level].s[a];
      if (used + add > bound_int) continue;
      pick[level] = a;
      self(self, level + 1, used + add);
    }
  };
  rec(rec, 0, 0);
  return out;
}

namespace {

void require_half_space(const ComplexMat& Z) {
  if (Z.rows() != Z.cols() || Z.rows() == 0) throw Error(ErrorCode::DimensionMismatch, "Z must be square");
  if ((Z - Z.transpose()).norm() > 1e-12 * (1 + Z.norm())) throw Error(ErrorCode::NotInHalfSpace, "Z is not symmetric");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(Z.imag());
  if (es.eigenvalues().minCoeff() <= 0) throw Error(ErrorCode::NotInHalfSpace, "Im Z is not positive definite");
}

double packing_count(double s, double weight, double minimum, std::size_t m) {
  return std::pow(1.0 + 2.0 * std::sqrt(s / (weight * minimum)), double(m));
}

}  // namespace

double weighted_min_eigenvalue(const ComplexMat& Z, const std::vector<Rat>& weights) {
  require_half_space(Z);
  const Eigen::Index n = Z.rows();
  if (static_cast<std::size_t>(n) != weights.size()) throw Error(ErrorCode::DimensionMismatch, "Z size");
  Eigen::MatrixXd Y = Z.imag();
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) Y(i, j) /= std::sqrt(weights[i].get_d() * weights[j].get_d());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(Y);
  return es.eigenvalues().minCoeff();
}

double tail_bound(const ThetaExpansion& e, const ComplexMat& Z) {
  const double lambda = weighted_min_eigenvalue(Z, e.input.weights);
  const double a = M_PI * lambda, unit = e.unit.get_d();
  const long bound_int = floor_of(e.bound * Rat(e.unit)).get_si();
  const long horizon_int = static_cast<long>(e.histograms[0].size()) - 1;
  // Exact counts of sum_i weights[i] b(x_i, x_i) up to the horizon.
  std::vector<double> conv(e.histograms[0].begin(), e.histograms[0].end());
  for (std::size_t i = 1; i < e.histograms.size(); ++i) {
    std::vector<double> next(horizon_int + 1, 0.0);
    for (long u = 0; u <= horizon_int; ++u)
      if (conv[u] != 0)
        for (long v = 0; u + v <= horizon_int; ++v) next[u + v] += conv[u] * double(e.histograms[i][v]);
    conv = std::move(next);
  }
  double tail = 0;
  for (long k = bound_int + 1; k <= horizon_int; ++k) tail += conv[k] * std::exp(-a * k / unit);

  // Beyond the horizon: exp(-a S) <= exp(-(a - theta) H) exp(-theta S), summed over all tuples.
  const double theta = a / 2, H = e.horizon.get_d();
  double product = 1;
  for (std::size_t i = 0; i < e.histograms.size(); ++i) {
    double part = 0;
    for (long k = 0; k <= horizon_int; ++k) part += double(e.histograms[i][k]) * std::exp(-theta * k / unit);
    const double w = e.input.weights[i].get_d(), ds = 0.05;
    double rest = 0;
    for (double s = H; s < H + 80.0 / theta; s += ds)
      rest += theta * packing_count(s + ds, w, e.minima[i], e.input.rank()) * std::exp(-theta * s) * ds;
    product *= part + rest;
  }
  return tail + std::exp(-(a - theta) * H) * product;
}

ThetaValue theta_eval(const ThetaExpansion& e, const ComplexMat& Z, double tail_tol) {
  if (static_cast<std::size_t>(Z.rows()) != e.n) throw Error(ErrorCode::DimensionMismatch, "Z size");
  ThetaValue out;
  out.tail = tail_bound(e, Z);
  if (!(out.tail <= tail_tol)) throw Error(ErrorCode::TailTooLarge, "tail bound " + fmt_double(out.tail));
  const double scale = e.scale.get_d();
  std::complex<double> sum = 0;
  const std::complex<double> I(0, 1);
  for (const auto& [key, count] : e.coefficients) {
    auto H = key_matrix(key, e.n);
    std::complex<double> tr = 0;
    for (std::size_t i = 0; i < e.n; ++i)
      for (std::size_t j = 0; j < e.n; ++j) tr += double(H[i][j]) * Z(j, i);
    sum += count.get_d() * std::exp(M_PI * I * tr / scale);
  }
  out.value = sum;
  return out;
}

std::complex<double> sqrt_det_over_i(const ComplexMat& Z) {
  require_half_space(Z);
  const std::complex<double> I(0, 1);
  ComplexMat Y = ComplexMat(Z.imag().cast<std::complex<double>>()), X = ComplexMat(Z.real().cast<std::complex<double>>());
  double arg = 0;
  std::complex<double> prev = Y.determinant();
  const int steps = 4000;
  for (int k = 1; k <= steps; ++k) {
    std::complex<double> d = (Y - I * (double(k) / steps) * X).determinant();
    arg += std::arg(d / prev);
    prev = d;
  }
  return std::sqrt(std::abs(prev)) * std::exp(I * (arg / 2));
}

InversionReport inversion_check(const ThetaExpansion& e, const ThetaExpansion& dual, const ComplexMat& Z,
                                double tol, double tail_tol) {
  InversionReport r;
  ComplexMat W = -Z.inverse();
  ThetaValue a = theta_eval(dual, W, tail_tol), b = theta_eval(e, Z, tail_tol);
  std::complex<double> factor = std::pow(sqrt_det_over_i(Z), double(e.input.rank()));
  for (const auto& U : e.input.bases) factor *= std::sqrt(determinant(U * e.input.ambient_gram * U.transpose()).get_d());
  r.lhs = a.value;
  r.rhs = factor * b.value;
  r.tail = a.tail + std::abs(factor) * b.tail;
  r.error = std::abs(r.lhs - r.rhs) / std::max(1.0, std::abs(r.rhs));
  r.ok = r.error < tol;
  return r;
}

ComplexMat apply_J_T(const IntVector& T, const ComplexMat& Z) {
  const Eigen::Index n = Z.rows();
  ComplexMat D = ComplexMat::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) D(i, i) = T[i].get_d();
  return -(D * Z * D).inverse();
}

ComplexMat sample_near_fixed_point(const IntVector& T, std::mt19937_64& rng, double spread) {
  const Eigen::Index n = static_cast<Eigen::Index>(T.size());
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Eigen::MatrixXd X(n, n), M(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = i; j < n; ++j) {
      X(i, j) = X(j, i) = 2 * spread * u(rng);
      M(i, j) = M(j, i) = (i == j ? 1.0 : 0.0) + spread * u(rng);
    }
  Eigen::MatrixXd D = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) D(i, i) = 1.0 / std::sqrt(T[i].get_d());
  ComplexMat Z(n, n);
  Z.real() = X;
  Z.imag() = D * M * D;
  return Z;
}

bool translation_invariant(const ThetaExpansion& e, const IntVector& T) {
  for (const auto& [key, count] : e.coefficients) {
    auto H = key_matrix(key, e.n);
    for (std::size_t i = 0; i < e.n; ++i)
      for (std::size_t j = i; j < e.n; ++j) {
        Int h = H[i][j];
        Int need = (i == j ? 2 : 1) * T[i] * e.scale;  // t_i | Q(x_i), t_i | b(x_i, x_j)
        if (h % need != 0) return false;
      }
  }
  return true;
}

ParamodularityReport paramodularity_check(const ParamodularChain& chain, const ThetaExpansion& e, const ComplexMat& Z,
                                          double tol, double tail_tol) {
  const std::size_t m = chain.first.rank(), n = chain.length();
  if (m % 8 != 0) throw Error(ErrorCode::NotSupported, "rank must be divisible by 8");
  if (e.n != n) throw Error(ErrorCode::DimensionMismatch, "expansion degree");
  const int k = static_cast<int>(m / 2);
  ParamodularityReport r;
  ThetaValue base = theta_eval(e, Z, tail_tol);
  r.tail = base.tail;
  const bool exact = translation_invariant(e, chain.T);
  auto translated = [&](std::size_t i, std::size_t j) {
    ComplexMat W = Z;
    double s = 1.0 / chain.T[i].get_d();
    W(i, j) += s;
    if (i != j) W(j, i) += s;
    ThetaValue v = theta_eval(e, W, tail_tol);
    r.tail = std::max(r.tail, v.tail);
    return std::abs(v.value - base.value) / std::max(1.0, std::abs(base.value));
  };
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i; j < n; ++j) {
      std::string name = i == j ? "translation E" + std::to_string(i + 1) + std::to_string(i + 1)
                                : "translation E" + std::to_string(i + 1) + std::to_string(j + 1) + "+E" +
                                      std::to_string(j + 1) + std::to_string(i + 1);
      r.generators.push_back({name, translated(i, j), exact});
    }
  ComplexMat D = ComplexMat::Zero(n, n);
  for (std::size_t i = 0; i < n; ++i) D(i, i) = chain.T[i].get_d();
  ThetaValue jt = theta_eval(e, apply_J_T(chain.T, Z), tail_tol);
  r.tail = std::max(r.tail, jt.tail);
  std::complex<double> lhs = jt.value * std::pow((D * Z).determinant(), -k);
  r.generators.push_back({"J_T", std::abs(lhs - base.value) / std::max(1.0, std::abs(base.value)), false});
  r.ok = std::all_of(r.generators.begin(), r.generators.end(), [&](const GeneratorDefect& g) {
    return g.error < tol && (g.name == "J_T" || g.exact);
  });
  return r;
}

GenusTheta genus_theta(const std::vector<ChainClass>& classes, long bound, const ThetaBudget& budget) {
  if (classes.empty()) throw Error(ErrorCode::EmptyGenus, "no classes");
  GenusTheta g;
  g.total_weight = 0;
  for (const auto& c : classes) {
    if (c.stabilizer_order <= 0) throw Error(ErrorCode::InvalidArgument, "stabilizer order must be positive");
    g.classes.push_back(theta_coefficients(c.representative, bound, budget));
    g.weights.push_back(Rat(1) / Rat(c.stabilizer_order));
    g.total_weight += g.weights.back();
  }
  for (std::size_t i = 0; i < g.classes.size(); ++i)
    for (const auto& [key, count] : g.classes[i].coefficients) g.coefficients[key] += g.weights[i] * Rat(count);
  for (auto& [key, v] : g.coefficients) v /= g.total_weight;
  return g;
}

Int divisor_sum(long n, int power) {
  Int s = 0;
  for (long d = 1; d <= n; ++d)
    if (n % d == 0) {
      Int t;
      mpz_ui_pow_ui(t.get_mpz_t(), static_cast<unsigned long>(d), static_cast<unsigned long>(power));
      s += t;
    }
  return s;
}

EisensteinReport eisenstein_compare_deg1(const GenusTheta& gt, int k, int terms) {
  if (gt.classes.empty()) throw Error(ErrorCode::EmptyGenus, "no classes");
  const ThetaExpansion& e0 = gt.classes[0];
  if (e0.n != 1) throw Error(ErrorCode::NotApplicable, "degree one only");
  if (k % 4 != 0 || 2 * static_cast<std::size_t>(k) != e0.input.rank())
    throw Error(ErrorCode::NotApplicable, "need k = m/2 and k = 0 mod 4");
  for (const auto& c : gt.classes) {
    if (c.input.weights[0] != Rat(1, 2) || c.scale != 1) throw Error(ErrorCode::NotApplicable, "level one only");
    if (c.bound < terms) throw Error(ErrorCode::NotApplicable, "expansion bound below the requested terms");
  }
  EisensteinReport r;
  auto coeff = [&](long l) {
    auto it = gt.coefficients.find(ThetaKey{2 * l});
    return it == gt.coefficients.end() ? Rat(0) : it->second;
  };
  r.normalization = coeff(1) / Rat(divisor_sum(1, k - 1));
  for (long l = 0; l <= terms; ++l) {
    r.theta.push_back(coeff(l));
    r.eisenstein.push_back(l == 0 ? Rat(1) : r.normalization * Rat(divisor_sum(l, k - 1)));
    if (r.theta.back() != r.eisenstein.back()) r.mismatches.push_back(l);
  }
  r.ok = r.mismatches.empty();
  return r;
}

}  // namespace paramodular
