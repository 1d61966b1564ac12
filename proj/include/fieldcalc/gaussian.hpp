#ifndef FIELDCALC_GAUSSIAN_HPP
#define FIELDCALC_GAUSSIAN_HPP

#include <map>
#include <vector>

#include "fieldcalc/common.hpp"
#include "fieldcalc/multi_index.hpp"
#include "fieldcalc/series.hpp"

namespace fieldcalc {

/// Symmetric invertible two-point kernel g_{xy} together with its weighted
/// inverse g^{xy}. The inversion rule is the discretized delta convention:
///   sum_y w_y g_{xy} g^{yz} = delta_{xz} / w_z.
/// In matrix form g_inv = W^{-1} g^{-1} W^{-1} with W = diag(weights).
struct Metric {
  int m = 0;
  std::vector<double> g;       // row-major m x m
  std::vector<double> g_inv;   // row-major m x m, weighted inverse
  double condition_number = 0.0;

  double operator()(int x, int y) const { return g[static_cast<std::size_t>(x * m + y)]; }
  double inv(int x, int y) const { return g_inv[static_cast<std::size_t>(x * m + y)]; }

  /// Builds a metric from a symmetric matrix; computes the weighted inverse
  /// and a condition estimate. Throws NumericError when numerically singular.
  static Metric make(const std::vector<double>& g_rowmajor, const BaseSpace& base);
  static Metric identity(const BaseSpace& base);
};

/// Weighted inverse with the rule above. Throws NumericError (with the
/// condition estimate in the message) when g is singular.
std::vector<double> metric_inverse(const std::vector<double>& g_rowmajor, const BaseSpace& base);

/// Centered Gaussian moment of a tuple, as the explicit sum over pair
/// partitions of positions: 0 for odd order, sum of products of g over
/// pairs otherwise. Guarded by the pair-enumeration limit (order <= 14).
double isserlis_moment(const Metric& metric, const MultiIndex& x);

/// Number of pairings summed by isserlis_moment: (n-1)!! for even n.
long long isserlis_pairing_count(int order);

/// Memoized Gaussian moment evaluator using the first-point recursion
///   E[phi_X] = mean_x E[phi_{X-x}] + sum_{y in X-x} g_{xy} E[phi_{X-x-y}].
/// Same values as the pair-partition sum but polynomial cost, so it serves
/// the high-order contractions in the perturbative expansions.
class GaussianMoments {
 public:
  GaussianMoments(const Metric& metric, std::vector<double> mean);
  explicit GaussianMoments(const Metric& metric);
  double at(const MultiIndex& x);

 private:
  const Metric& metric_;
  std::vector<double> mean_;
  std::map<MultiIndex, double> memo_;
};

/// Moments of the Gaussian state with the given mean and covariance, as a
/// series truncated at n_max.
SymmetricSeries gaussian_series(const Metric& metric, const std::vector<double>& mean, int n_max);

/// Annihilation-type operator: (b_x F)(X) = F(X + {x}). Alias of derivative.
SymmetricSeries apply_b(int x, const SymmetricSeries& f);

/// Creation-type operator: (b*_x F)(X) = sum_{x' in X} g_{xx'} F(X - {x'}),
/// positions counted with multiplicity. Raises the truncation by one.
SymmetricSeries apply_b_star(const Metric& metric, int x, const SymmetricSeries& f);

/// Raised-index annihilator b^x = g^{xy} b_y (weighted contraction).
SymmetricSeries apply_b_upper(const Metric& metric, const BaseSpace& base, int x, const SymmetricSeries& f);

/// Smallest eigenvalue of the Gram matrix M_{nm} = Z_G(j_n + j_m) built from
/// real sources. Nonnegative for genuinely positive (truncation-converged)
/// states; a negative value is a finding, not an error.
double bochner_spotcheck(const SymmetricSeries& g, const std::vector<Source>& sources, const BaseSpace& base);

}  // namespace fieldcalc

#endif  // FIELDCALC_GAUSSIAN_HPP
