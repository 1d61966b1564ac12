#ifndef FIELDCALC_ORACLE_HPP
#define FIELDCALC_ORACLE_HPP

#include <cstdint>
#include <functional>
#include <random>
#include <vector>

#include "fieldcalc/common.hpp"
#include "fieldcalc/gaussian.hpp"
#include "fieldcalc/series.hpp"

// Independent brute-force references. Nothing in here shares contraction
// code with the modules it checks: tuple loops, quadrature and sampling are
// written from scratch.
namespace fieldcalc::oracle {

/// Gauss-Hermite rule for the weight e^{-t^2}: integrates polynomials of
/// degree <= 2*order - 1 exactly.
struct QuadratureRule {
  std::vector<double> nodes;
  std::vector<double> weights;

  static QuadratureRule gauss_hermite(int order);
};

inline constexpr int kDefaultGhOrder = 40;

/// Exact Gaussian expectation (covariance = metric components, mean zero) of
/// an arbitrary function of the field, by whitening + tensorized
/// Gauss-Hermite. Supports m <= 3.
double gh_expectation_fn(const Metric& metric, const std::function<double(const std::vector<double>&)>& f,
                         int order = kDefaultGhOrder);

/// Expectation of the analytic functional P(phi) = integral of P^X phi_X dX
/// (Guichardet weights included). Errors when the polynomial degree exceeds
/// the rule's exactness.
double gh_expectation(const Metric& metric, const SymmetricSeries& poly, const BaseSpace& base,
                      int order = kDefaultGhOrder);

/// Plain monomial moment E[phi_{x_1} ... phi_{x_n}].
double gh_moment(const Metric& metric, const MultiIndex& x, int order = kDefaultGhOrder);

struct McResult {
  double mean = 0.0;
  double std_error = 0.0;
};

/// Seeded Monte Carlo estimate of E[f(phi)] for phi ~ N(0, g). Sampling is
/// mt19937_64 + Box-Muller over a Cholesky factor, so results are
/// bit-reproducible given (seed, samples, g). Requires g positive definite.
McResult mc_expectation(const Metric& metric, const std::function<double(const std::vector<double>&)>& f,
                        long samples, std::uint64_t seed);

/// Reproducible N(0, g) sampler used by mc_expectation: mt19937_64 uniforms
/// mapped through an explicit Box-Muller transform, then a Cholesky factor
/// of g. The generator identity is part of the output contract.
class GaussianSampler {
 public:
  GaussianSampler(const Metric& metric, std::uint64_t seed);
  void draw(std::vector<double>& out);

 private:
  double normal();
  double uniform01();

  int m_;
  std::vector<double> chol_;  // lower triangular, row-major
  std::mt19937_64 rng_;
  double spare_ = 0.0;
  bool have_spare_ = false;
};

/// Naive nested-tuple-loop evaluations of the series contractions; these are
/// the references for guichardet_integral, eval_generating and wick_product.
double naive_integral(const SymmetricSeries& f, const BaseSpace& base);
double naive_eval(const SymmetricSeries& f, const std::vector<double>& j, const BaseSpace& base);
double naive_wick_entry(const SymmetricSeries& f, const SymmetricSeries& g, const MultiIndex& x);

/// Formal power series in one variable, ordinary coefficients a_0..a_N.
using ScalarSeries = std::vector<double>;

ScalarSeries scalar_mul(const ScalarSeries& a, const ScalarSeries& b, int n_out);
/// h(f(t)) truncated; requires f_0 = 0.
ScalarSeries scalar_compose(const ScalarSeries& h, const ScalarSeries& f);
/// exp(f) for f_0 = 0, via the derivative recurrence.
ScalarSeries scalar_exp(const ScalarSeries& f);
/// log(f) for f_0 = 1.
ScalarSeries scalar_log(const ScalarSeries& f);
/// 1/f for f_0 != 0.
ScalarSeries scalar_inverse(const ScalarSeries& f);

}  // namespace fieldcalc::oracle

#endif  // FIELDCALC_ORACLE_HPP
