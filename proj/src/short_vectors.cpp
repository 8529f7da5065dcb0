#include "paramodular/short_vectors.hpp"

#include <limits>
#include <algorithm>
#include <atomic>
#include <cmath>

namespace paramodular {

SmallMatrix to_small(const IntMatrix& m) {
  SmallMatrix out(m.rows(), Vec(m.cols()));
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) {
      if (!m(i, j).fits_slong_p()) throw Error(ErrorCode::ScaleLimit, "entry too large");
      out[i][j] = m(i, j).get_si();
    }
  return out;
}

long small_pair(const SmallMatrix& A, const Vec& x, const Vec& y) {
  long s = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (x[i] == 0) continue;
    long t = 0;
    for (std::size_t j = 0; j < y.size(); ++j) t += A[i][j] * y[j];
    s += x[i] * t;
  }
  return s;
}

long small_norm(const SmallMatrix& A, const Vec& x) { return small_pair(A, x, x); }

namespace {

struct Cholesky {
  std::vector<double> q;                // q_i
  std::vector<std::vector<double>> mu;  // mu[i][j], j > i
};

Cholesky decompose(const SmallMatrix& A) {
  const std::size_t m = A.size();
  std::vector<std::vector<double>> R(m, std::vector<double>(m, 0.0));
  for (std::size_t j = 0; j < m; ++j) {
    for (std::size_t i = 0; i <= j; ++i) {
      double s = static_cast<double>(A[i][j]);
      for (std::size_t k = 0; k < i; ++k) s -= R[k][i] * R[k][j];
      if (i == j) {
        if (s <= 0) throw Error(ErrorCode::NotPositiveDefinite, "Gram is not positive definite");
        R[j][j] = std::sqrt(s);
      } else {
        R[i][j] = s / R[i][i];
      }
    }
  }
  Cholesky c;
  c.q.resize(m);
  c.mu.assign(m, std::vector<double>(m, 0.0));
  for (std::size_t i = 0; i < m; ++i) {
    c.q[i] = R[i][i] * R[i][i];
    for (std::size_t j = i + 1; j < m; ++j) c.mu[i][j] = R[i][j] / R[i][i];
  }
  return c;
}

// Depth-first enumeration below a fixed last coordinate; f(x) sees every
// candidate, the caller checks the exact norm.
template <typename F>
void enumerate_below(const Cholesky& c, double bound, Vec& x, int i, double rem, F&& f) {
  if (i < 0) {
    f(x);
    return;
  }
  double center = 0;
  for (std::size_t j = i + 1; j < x.size(); ++j) center -= c.mu[i][j] * x[j];
  double r = std::sqrt(std::max(0.0, rem) / c.q[i]);
  long lo = static_cast<long>(std::ceil(center - r - 1e-9)), hi = static_cast<long>(std::floor(center + r + 1e-9));
  for (long v = lo; v <= hi; ++v) {
    double d = v - center;
    double next = rem - c.q[i] * d * d;
    if (next < -1e-6 * (1 + bound)) continue;
    x[i] = v;
    enumerate_below(c, bound, x, i - 1, next, f);
  }
  x[i] = 0;
}

std::pair<long, long> top_range(const Cholesky& c, double bound) {
  const int m = static_cast<int>(c.q.size());
  long r = static_cast<long>(std::floor(std::sqrt(bound / c.q[m - 1]) + 1e-9));
  return {-r, r};
}

template <typename F>
void enumerate_branch(const Cholesky& c, double bound, long top, F&& f) {
  const int m = static_cast<int>(c.q.size());
  Vec x(m, 0);
  x[m - 1] = top;
  double rem = bound + 1e-6 * (1 + bound) - c.q[m - 1] * double(top) * double(top);
  if (rem < 0) return;
  enumerate_below(c, bound, x, m - 2, rem, f);
}

std::vector<NormedVector> collect(const SmallMatrix& A, long bound, const ShortVectorBudget& budget,
                                  bool parallel) {
  if (bound < 0) throw Error(ErrorCode::InvalidArgument, "negative bound");
  const std::size_t m = A.size();
  if (m == 0) return {NormedVector{0, {}}};
  Cholesky c = decompose(A);
  auto [lo, hi] = top_range(c, double(bound));
  const long branches = hi - lo + 1;
  std::vector<std::vector<NormedVector>> parts(branches);
  std::atomic<long long> total{0};
#pragma omp parallel for schedule(dynamic) if (parallel)
  for (long b = 0; b < branches; ++b) {
    auto& out = parts[b];
    enumerate_branch(c, double(bound), lo + b, [&](const Vec& x) {
      long n = small_norm(A, x);
      if (n > bound) return;
      if (++total > budget.max_vectors) return;
      out.push_back({n, x});
    });
  }
  if (total > budget.max_vectors) throw Error(ErrorCode::ScaleLimit, "short vector budget exceeded");
  std::vector<NormedVector> all;
  all.reserve(total);
  for (auto& p : parts)
    for (auto& v : p) all.push_back(std::move(v));
  std::sort(all.begin(), all.end());
  return all;
}

}  // namespace

std::vector<NormedVector> enumerate_short(const SmallMatrix& A, long bound, const ShortVectorBudget& budget) {
  return collect(A, bound, budget, true);
}

std::vector<NormedVector> enumerate_short_reference(const SmallMatrix& A, long bound,
                                                    const ShortVectorBudget& budget) {
  return collect(A, bound, budget, false);
}

std::vector<long long> norm_counts(const SmallMatrix& A, long bound) {
  if (bound < 0) throw Error(ErrorCode::InvalidArgument, "negative bound");
  std::vector<long long> counts(bound + 1, 0);
  if (A.empty()) {
    counts[0] = 1;
    return counts;
  }
  Cholesky c = decompose(A);
  auto [lo, hi] = top_range(c, double(bound));
  const long branches = hi - lo + 1;
  std::vector<std::vector<long long>> parts(branches, std::vector<long long>(bound + 1, 0));
#pragma omp parallel for schedule(dynamic)
  for (long b = 0; b < branches; ++b)
    enumerate_branch(c, double(bound), lo + b, [&](const Vec& x) {
      long n = small_norm(A, x);
      if (n <= bound) ++parts[b][n];
    });
  for (const auto& p : parts)
    for (long k = 0; k <= bound; ++k) counts[k] += p[k];
  return counts;
}

std::vector<long long> norm_counts_reference(const SmallMatrix& A, long bound) {
  if (bound < 0) throw Error(ErrorCode::InvalidArgument, "negative bound");
  std::vector<long long> counts(bound + 1, 0);
  for (const auto& v : enumerate_short_reference(A, bound, ShortVectorBudget{std::numeric_limits<long long>::max()})) ++counts[v.norm];
  return counts;
}

}  // namespace paramodular
