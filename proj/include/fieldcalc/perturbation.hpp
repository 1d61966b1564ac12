#ifndef FIELDCALC_PERTURBATION_HPP
#define FIELDCALC_PERTURBATION_HPP

#include <utility>
#include <vector>

#include "fieldcalc/common.hpp"
#include "fieldcalc/gaussian.hpp"
#include "fieldcalc/series.hpp"

namespace fieldcalc {

/// Interaction functional V(phi) = integral of v^X phi_X dX, stored as the
/// contravariant coefficient series v (v at the empty index must vanish),
/// scaled globally by the coupling.
struct Interaction {
  SymmetricSeries v{0};
  double coupling = 0.0;

  int max_degree() const { return v.max_entry_order(); }
};

/// Complete model: base space, metric, interaction and both truncation
/// orders (n_max = vertex count, n_max_moments = moment order).
struct ModelSpec {
  BaseSpace base;
  Metric metric;
  Interaction interaction;
  int n_max = 0;          // powers of the coupling retained
  int n_max_moments = 0;  // moment order retained

  void validate() const;
};

/// Flattened vertex expansion sum_{n <= n_max} (1/n!) V^{<>n}, with the
/// coupling folded in. Shared by the partition function, the interacting
/// moments and the Dyson-Schwinger residual.
struct VertexExpansion {
  int max_order = 0;
  std::vector<std::pair<MultiIndex, double>> terms;
};
VertexExpansion build_vertex_expansion(const ModelSpec& model);

/// Truncated partition function Xi = sum_{n <= n_max} (1/n!) E_g[V^n],
/// evaluated by contracting Wick powers of V against Gaussian moments.
double partition_function(const ModelSpec& model);

/// Same quantity by explicit enumeration: partitions of tuple positions
/// carry vertex coefficients, pair partitions carry the metric. Guarded by
/// the pair-enumeration limit.
double partition_function_enumerated(const ModelSpec& model);

/// Moments of the interacting state up to n_max_moments:
/// G_X = (1/Xi) sum_n (1/n!) <V^{<>n}(Y), G^g(X+Y)>_Y. The order-0 entry is
/// exactly 1. Deterministic for any thread count.
SymmetricSeries interacting_moments(const ModelSpec& model, int n_max_moments, unsigned threads = 1);

/// Enumerated cross-check of interacting_moments (partitions x pairings).
SymmetricSeries interacting_moments_enumerated(const ModelSpec& model, int n_max_moments);

/// Moment <-> cumulant transforms; thin wrappers over log/exp of the series
/// with the normalization conventions G_0 = 1, K_0 = 0 enforced.
SymmetricSeries moments_to_cumulants(const SymmetricSeries& g);
SymmetricSeries cumulants_to_moments(const SymmetricSeries& k);

/// Dyson-Schwinger residual at (X, x):
///   G_{X+x} - sum_{x' in X} g_{xx'} G_{X-x'}
///          - sum_y w_y g_{xy} integral of v^{y+Y} G_{X+Y} dY.
/// Vanishes (to truncation order) when G holds the interacting moments of
/// the model. Requires G truncated at order >= |X| + 1 + degree(V).
double ds_residual(const ModelSpec& model, const SymmetricSeries& g, const MultiIndex& x_idx, int x);

/// Max |ds_residual| over all canonical X with order <= order_cap and all
/// points x.
double max_ds_residual(const ModelSpec& model, const SymmetricSeries& g, int order_cap);

}  // namespace fieldcalc

#endif  // FIELDCALC_PERTURBATION_HPP
