#ifndef FIELDCALC_TREES_HPP
#define FIELDCALC_TREES_HPP

#include <vector>

#include "fieldcalc/combinatorics.hpp"
#include "fieldcalc/common.hpp"
#include "fieldcalc/perturbation.hpp"

namespace fieldcalc {

/// Covariant classical field psi_x.
using ClassicalField = std::vector<double>;

/// Index lowering: j_x = sum_y w_y g_{xy} j^y.
ClassicalField lower_source(const Metric& metric, const BaseSpace& base, const Source& j);

struct PicardResult {
  ClassicalField psi;
  int iterations = 0;
  double residual = 0.0;
  std::vector<double> residual_history;
};

/// Fixed point of psi -> j_lowered + V(psi), where
/// V_x(psi) = sum_y w_y g_{xy} integral of v^{y+Y} psi_Y dY.
/// Plain iteration with a damped (0.5) fallback once the residual stops
/// decreasing; throws NumericError with the residual history on divergence
/// or when max_iter is exhausted.
PicardResult picard_solve(const ModelSpec& model, const Source& j, double tol = 1e-12, int max_iter = 200);

/// Tree-level expansion of the classical field: sum over hierarchies with at
/// most max_leaves leaves, each internal node contributing a metric-lowered
/// vertex coefficient, each leaf a lowered source, dummy points contracted
/// with quadrature weights. Requires every interaction term to have order
/// >= 3 so that internal nodes (>= 2 children) can realize every vertex.
ClassicalField tree_expand(const ModelSpec& model, const Source& j, int max_leaves);

/// Weight vector of a single hierarchy node (leaves carry the lowered
/// source). The value depends only on the tree shape, not on leaf labels or
/// child order.
ClassicalField hierarchy_weight_vector(const ModelSpec& model, const ClassicalField& lowered_j,
                                       const Hierarchy::Node& node);

struct StationaryLogZ {
  double log_z = 0.0;
  double stationarity_residual = 0.0;
  ClassicalField psi;
};

/// Stationary-phase value of the log generating functional:
/// log Z ~ psi.j + S0(psi) + V(psi) with S0(psi) = -1/2 psi_x g^{xy} psi_y,
/// evaluated at the Picard fixed point; also reports the max-norm of the
/// stationarity equation residual j^x - g^{xy} psi_y + int v^{x+X} psi_X dX.
StationaryLogZ stationary_log_z(const ModelSpec& model, const Source& j, double tol = 1e-12, int max_iter = 500);

}  // namespace fieldcalc

#endif  // FIELDCALC_TREES_HPP
