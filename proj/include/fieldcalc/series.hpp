#ifndef FIELDCALC_SERIES_HPP
#define FIELDCALC_SERIES_HPP

#include <map>
#include <span>
#include <vector>

#include "fieldcalc/common.hpp"
#include "fieldcalc/multi_index.hpp"

namespace fieldcalc {

/// Truncated family {G_n} of completely symmetric functions over a finite
/// base space, stored sparsely as one scalar per canonical multi-index of order
/// <= truncation_order. Absent entries are zero. Values are the common value
/// of the symmetric function on all permutations of the tuple; the
/// permutation multiplicity n!/prod(mult!) is applied at contraction time,
/// never stored.
class SymmetricSeries {
 public:
  explicit SymmetricSeries(int n_max) : n_max_(n_max) {
    if (n_max < 0) throw InvalidInput("SymmetricSeries: negative truncation order");
  }

  /// Multiplicative unit: only the empty index, value 1.
  static SymmetricSeries unit(int n_max) {
    SymmetricSeries s(n_max);
    s.set(MultiIndex{}, 1.0);
    return s;
  }

  int truncation_order() const { return n_max_; }

  double at(const MultiIndex& x) const {
    auto it = coeffs_.find(x);
    return it == coeffs_.end() ? 0.0 : it->second;
  }

  void set(const MultiIndex& x, double v) {
    if (x.order() > n_max_) throw InvalidInput("SymmetricSeries::set: index order exceeds truncation");
    if (v == 0.0)
      coeffs_.erase(x);
    else
      coeffs_[x] = v;
  }

  void add(const MultiIndex& x, double v) { set(x, at(x) + v); }

  const std::map<MultiIndex, double>& entries() const { return coeffs_; }

  /// Copy truncated (or extended) to a new order; entries beyond are dropped.
  SymmetricSeries truncated(int n_max) const {
    SymmetricSeries out(n_max);
    for (const auto& [x, v] : coeffs_)
      if (x.order() <= n_max) out.set(x, v);
    return out;
  }

  /// Largest order with a nonzero entry.
  int max_entry_order() const {
    int d = 0;
    for (const auto& [x, v] : coeffs_) d = std::max(d, x.order());
    return d;
  }

  friend bool operator==(const SymmetricSeries& a, const SymmetricSeries& b) {
    return a.n_max_ == b.n_max_ && a.coeffs_ == b.coeffs_;
  }

 private:
  int n_max_ = 0;
  std::map<MultiIndex, double> coeffs_;
};

/// Weight of a canonical multi-index in the discrete Guichardet measure:
/// prod_x w_x^mult(x) / prod_x mult(x)!. Summing F(X) times this weight over
/// canonical X reproduces sum_n (1/n!) of the full tuple sums.
double guichardet_weight(const MultiIndex& x, const BaseSpace& base);

/// Integral of F over the discrete Guichardet space, truncated at F's order.
double guichardet_integral(const SymmetricSeries& f, const BaseSpace& base);

/// Dual pairing <F, G> = integral of F(X) G(X) dX, truncated at the smaller
/// truncation order.
double contract(const SymmetricSeries& f, const SymmetricSeries& g, const BaseSpace& base);

/// Exponential vector: X -> prod_{x in X} f(x), with value 1 at the empty
/// index.
SymmetricSeries exponential_vector(const Source& f, int n_max, const BaseSpace& base);

/// Generating functional Z_F(j) = sum_n (1/n!) F_n j^n with weights,
/// truncated at F's order.
double eval_generating(const SymmetricSeries& f, const Source& j, const BaseSpace& base);

/// Wick product (F <> G)(X) = sum over splittings of the multiset X into an
/// ordered pair of sub-multisets, each splitting carrying the product of
/// per-point binomial coefficients. Triangular in order, hence exact at
/// every order <= min(truncations).
SymmetricSeries wick_product(const SymmetricSeries& f, const SymmetricSeries& g);

/// n-th Wick power; n = 0 gives the unit series.
SymmetricSeries wick_power(const SymmetricSeries& f, int n);

/// Functional derivative at point x: output(X) = F(X + {x}); truncation
/// drops by one.
SymmetricSeries derivative(const SymmetricSeries& f, int x);

/// Composition H = sum_n (h_n / n!) F^{<>n} for Maclaurin coefficients
/// h = (h_0 .. h_K). Exact to truncation when F has no order-0 part;
/// otherwise correct only to the vertex order K supplied.
SymmetricSeries compose(std::span<const double> maclaurin, const SymmetricSeries& f);

/// exp of a series with K_0 = 0 (throws otherwise). Equals the sum over
/// position partitions of products of K over blocks.
SymmetricSeries exp_series(const SymmetricSeries& k);

/// log of a series with positive order-0 coefficient; the order-0 entry of
/// the result is ln(G_0) and the rest uses the normalized series.
SymmetricSeries log_series(const SymmetricSeries& g);

/// Multiplicative inverse under the Wick product: Z_F Z_G = 1. Requires
/// G_0 != 0.
SymmetricSeries inverse_series(const SymmetricSeries& g);

/// Partition-sum forms, enumerating set partitions of tuple positions
/// directly. Same values as exp_series / log_series; used to cross-check the
/// composition route. Guarded by the partition enumeration limit.
SymmetricSeries exp_series_partitions(const SymmetricSeries& k);
SymmetricSeries log_series_partitions(const SymmetricSeries& g);

std::string series_to_json(const SymmetricSeries& s);
SymmetricSeries series_from_json_text(const std::string& text);

}  // namespace fieldcalc

#endif  // FIELDCALC_SERIES_HPP
