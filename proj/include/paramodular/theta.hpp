#pragma once

#include <complex>
#include <map>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "paramodular/quad_lattice.hpp"

namespace paramodular {

// Lattices L_1..L_n on one ambient space; tuples are truncated by
// sum_i weights[i] * b(x_i, x_i) <= bound.
struct ThetaInput {
  RatMatrix ambient_gram;       // b on the ambient basis
  std::vector<RatMatrix> bases;  // rows in ambient coordinates
  std::vector<Rat> weights;
  std::size_t degree() const { return bases.size(); }
  std::size_t rank() const { return ambient_gram.rows(); }
};

// Weights 1/(2 t_i), so the truncation reads sum Q(x_i)/t_i <= bound.
ThetaInput chain_input(const ParamodularChain& chain);
ThetaInput dual_input(const ThetaInput& input);
ThetaInput permuted_input(const ThetaInput& input, const std::vector<std::size_t>& perm);

using ThetaKey = std::vector<long>;  // upper triangle of scale * H, row by row

struct ThetaBudget {
  long long max_vectors = 50'000'000;
  long long max_box = 50'000'000;
};

struct ThetaExpansion {
  ThetaInput input;
  std::size_t n = 0;
  Int scale = 1;  // H = key / scale, H the b-Gram of the tuple
  Rat bound;
  std::map<ThetaKey, Int> coefficients;
  // Tail data: counts per lattice of weights[i] * b(x, x) = k / unit, k <= horizon * unit.
  Rat horizon;
  Int unit = 1;
  std::vector<std::vector<long long>> histograms;
  std::vector<double> minima;  // smallest nonzero b(x, x)
};

ThetaExpansion theta_coefficients(const ThetaInput& input, const Rat& bound, const Rat& horizon,
                                  const ThetaBudget& budget = {});
ThetaExpansion theta_coefficients(const ParamodularChain& chain, long bound, const ThetaBudget& budget = {});
// Serial join through an ordered map; reference for the parallel join.
std::map<ThetaKey, Int> theta_coefficients_reference(const ThetaInput& input, const Rat& bound,
                                                     const ThetaBudget& budget = {});
ThetaKey theta_key(const std::vector<std::vector<long>>& H);
std::vector<std::vector<long>> key_matrix(const ThetaKey& key, std::size_t n);

using ComplexMat = Eigen::MatrixXcd;

struct ThetaValue {
  std::complex<double> value;
  double tail = 0;  // certified bound for the omitted terms
};
// Smallest eigenvalue of diag(w)^-1/2 Im Z diag(w)^-1/2.
double weighted_min_eigenvalue(const ComplexMat& Z, const std::vector<Rat>& weights);
double tail_bound(const ThetaExpansion& e, const ComplexMat& Z);
ThetaValue theta_eval(const ThetaExpansion& e, const ComplexMat& Z, double tail_tol);

// sqrt(det(Z/i)) continued from the imaginary axis along iY + tX.
std::complex<double> sqrt_det_over_i(const ComplexMat& Z);

struct InversionReport {
  std::complex<double> lhs, rhs;
  double error = 0, tail = 0;
  bool ok = false;
};
InversionReport inversion_check(const ThetaExpansion& e, const ThetaExpansion& dual, const ComplexMat& Z,
                                double tol, double tail_tol = 1e-12);

struct GeneratorDefect {
  std::string name;
  double error = 0;
  bool exact = false;  // decided on the coefficients
};
struct ParamodularityReport {
  std::vector<GeneratorDefect> generators;
  double tail = 0;
  bool ok = false;
};
ComplexMat apply_J_T(const IntVector& T, const ComplexMat& Z);
// Random point near the fixed point i T^-1/2 of J_T, so both Z and J_T Z keep
// a large weighted imaginary part.
ComplexMat sample_near_fixed_point(const IntVector& T, std::mt19937_64& rng, double spread = 0.05);
ParamodularityReport paramodularity_check(const ParamodularChain& chain, const ThetaExpansion& e,
                                          const ComplexMat& Z, double tol, double tail_tol = 1e-10);
// Coefficient-level translation invariance: t_i | Q-values and t_i | b(x_i, x_j).
bool translation_invariant(const ThetaExpansion& e, const IntVector& T);

struct GenusTheta {
  std::vector<ThetaExpansion> classes;
  std::vector<Rat> weights;  // 1 / |O|
  Rat total_weight;
  std::map<ThetaKey, Rat> coefficients;
};
GenusTheta genus_theta(const std::vector<ChainClass>& classes, long bound, const ThetaBudget& budget = {});

struct EisensteinReport {
  Rat normalization;
  std::vector<Rat> theta, eisenstein;  // coefficients at l = 0..terms
  std::vector<long> mismatches;
  bool ok = false;
};
EisensteinReport eisenstein_compare_deg1(const GenusTheta& gt, int k, int terms);
Int divisor_sum(long n, int power);

}  // namespace paramodular
