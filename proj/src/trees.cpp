#include "fieldcalc/trees.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "fieldcalc/combinatorics.hpp"

namespace fieldcalc {

namespace {

// psi^Y = prod over the multiset Y of psi values.
double field_power(const ClassicalField& psi, const MultiIndex& y) {
  double p = 1.0;
  for (int pt : y) p *= psi[static_cast<std::size_t>(pt)];
  return p;
}

// T_y = integral of v^{y+Y} psi_Y dY for every point y, i.e. the functional
// derivative of V at psi with one free lower slot.
std::vector<double> interaction_gradient(const ModelSpec& model, const ClassicalField& psi) {
  std::vector<double> t(static_cast<std::size_t>(model.base.size()), 0.0);
  double lambda = model.interaction.coupling;
  for (const auto& [u, val] : model.interaction.v.entries()) {
    for (auto [y, mult] : u.multiplicities()) {
      MultiIndex rest = u.minus(y);
      t[static_cast<std::size_t>(y)] +=
          lambda * val * guichardet_weight(rest, model.base) * field_power(psi, rest);
    }
  }
  return t;
}

// The Picard map psi -> j_lowered + sum_y w_y g_{xy} T_y(psi).
ClassicalField picard_map(const ModelSpec& model, const ClassicalField& j_low, const ClassicalField& psi) {
  std::vector<double> t = interaction_gradient(model, psi);
  ClassicalField out(j_low);
  for (int x = 0; x < model.base.size(); ++x) {
    double acc = 0.0;
    for (int y = 0; y < model.base.size(); ++y)
      acc += model.base.weight(y) * model.metric(x, y) * t[static_cast<std::size_t>(y)];
    out[static_cast<std::size_t>(x)] += acc;
  }
  return out;
}

double max_abs_diff(const ClassicalField& a, const ClassicalField& b) {
  double d = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) d = std::max(d, std::abs(a[i] - b[i]));
  return d;
}

// Weight vector of one hierarchy: leaves carry the lowered source, an
// internal node with children A_1..A_k carries
//   u_x = sum_y w_y g_{xy} sum_{a_1..a_k} v^{y, a_1..a_k} prod_i w_{a_i} u^{(A_i)}_{a_i}.
ClassicalField hierarchy_weight(const ModelSpec& model, const ClassicalField& j_low, const Hierarchy::Node& node) {
  int m = model.base.size();
  if (node.is_leaf()) return j_low;

  std::vector<ClassicalField> child(node.children.size());
  for (std::size_t c = 0; c < node.children.size(); ++c)
    child[c] = hierarchy_weight(model, j_low, node.children[c]);

  int k = static_cast<int>(node.children.size());
  std::vector<double> t(static_cast<std::size_t>(m), 0.0);  // T_y before the final lowering
  std::vector<int> tuple(static_cast<std::size_t>(k), 0);
  double lambda = model.interaction.coupling;
  while (true) {
    double prod = 1.0;
    for (int i = 0; i < k; ++i) {
      int a = tuple[static_cast<std::size_t>(i)];
      prod *= model.base.weight(a) * child[static_cast<std::size_t>(i)][static_cast<std::size_t>(a)];
    }
    if (prod != 0.0) {
      for (int y = 0; y < m; ++y) {
        std::vector<int> pts(tuple.begin(), tuple.end());
        pts.push_back(y);
        double vv = model.interaction.v.at(MultiIndex(std::move(pts)));
        if (vv != 0.0) t[static_cast<std::size_t>(y)] += lambda * vv * prod;
      }
    }
    int i = k - 1;
    while (i >= 0 && tuple[static_cast<std::size_t>(i)] == m - 1) --i;
    if (i < 0) break;
    ++tuple[static_cast<std::size_t>(i)];
    for (int r = i + 1; r < k; ++r) tuple[static_cast<std::size_t>(r)] = 0;
  }

  ClassicalField out(static_cast<std::size_t>(m), 0.0);
  for (int x = 0; x < m; ++x) {
    double acc = 0.0;
    for (int y = 0; y < m; ++y) acc += model.base.weight(y) * model.metric(x, y) * t[static_cast<std::size_t>(y)];
    out[static_cast<std::size_t>(x)] = acc;
  }
  return out;
}

}  // namespace

ClassicalField lower_source(const Metric& metric, const BaseSpace& base, const Source& j) {
  if (static_cast<int>(j.size()) != base.size())
    throw InvalidInput("lower_source: source length does not match base space");
  ClassicalField out(static_cast<std::size_t>(base.size()), 0.0);
  for (int x = 0; x < base.size(); ++x) {
    double acc = 0.0;
    for (int y = 0; y < base.size(); ++y)
      acc += base.weight(y) * metric(x, y) * j[static_cast<std::size_t>(y)];
    out[static_cast<std::size_t>(x)] = acc;
  }
  return out;
}

PicardResult picard_solve(const ModelSpec& model, const Source& j, double tol, int max_iter) {
  model.validate();
  ClassicalField j_low = lower_source(model.metric, model.base, j);
  PicardResult res;
  res.psi = j_low;
  bool damped = false;
  double prev_residual = std::numeric_limits<double>::infinity();
  for (int it = 1; it <= max_iter; ++it) {
    ClassicalField next = picard_map(model, j_low, res.psi);
    double r = max_abs_diff(next, res.psi);
    res.residual_history.push_back(r);
    if (damped)
      for (std::size_t i = 0; i < next.size(); ++i) next[i] = 0.5 * (next[i] + res.psi[i]);
    res.psi = std::move(next);
    res.iterations = it;
    res.residual = r;
    if (r <= tol) return res;
    if (r > 1e6) break;                      // diverging, stop early
    if (r > prev_residual && !damped) damped = true;  // oscillation fallback
    prev_residual = r;
  }
  std::ostringstream os;
  os << "picard_solve: no convergence after " << res.iterations << " iterations; residual history:";
  std::size_t from = res.residual_history.size() > 8 ? res.residual_history.size() - 8 : 0;
  for (std::size_t i = from; i < res.residual_history.size(); ++i) os << ' ' << res.residual_history[i];
  throw NumericError(os.str());
}

ClassicalField tree_expand(const ModelSpec& model, const Source& j, int max_leaves) {
  model.validate();
  if (max_leaves < 1) throw InvalidInput("tree_expand: need at least one leaf");
  if (max_leaves > kMaxHierarchyN)
    throw SizeLimitError("tree_expand: max_leaves exceeds hierarchy guard " + std::to_string(kMaxHierarchyN));
  for (const auto& [u, val] : model.interaction.v.entries())
    if (u.order() < 3)
      throw InvalidInput("tree_expand: interaction terms must have order >= 3 "
                         "(lower orders cannot appear as hierarchy nodes)");

  ClassicalField j_low = lower_source(model.metric, model.base, j);
  ClassicalField psi(static_cast<std::size_t>(model.base.size()), 0.0);
  for (int n = 1; n <= max_leaves; ++n) {
    double c = 1.0 / factorial(n);
    for_each_hierarchy(n, [&](const Hierarchy& h) {
      ClassicalField u = hierarchy_weight(model, j_low, h.root);
      for (std::size_t i = 0; i < psi.size(); ++i) psi[i] += c * u[i];
    });
  }
  return psi;
}

ClassicalField hierarchy_weight_vector(const ModelSpec& model, const ClassicalField& lowered_j,
                                       const Hierarchy::Node& node) {
  return hierarchy_weight(model, lowered_j, node);
}

StationaryLogZ stationary_log_z(const ModelSpec& model, const Source& j, double tol, int max_iter) {
  PicardResult pr = picard_solve(model, j, tol, max_iter);
  const ClassicalField& psi = pr.psi;
  int m = model.base.size();

  double source_term = 0.0;
  for (int x = 0; x < m; ++x)
    source_term += model.base.weight(x) * j[static_cast<std::size_t>(x)] * psi[static_cast<std::size_t>(x)];

  double s0 = 0.0;
  for (int x = 0; x < m; ++x)
    for (int y = 0; y < m; ++y)
      s0 -= 0.5 * model.base.weight(x) * model.base.weight(y) * psi[static_cast<std::size_t>(x)] *
            model.metric.inv(x, y) * psi[static_cast<std::size_t>(y)];

  double v_at_psi = 0.0;
  double lambda = model.interaction.coupling;
  for (const auto& [u, val] : model.interaction.v.entries())
    v_at_psi += lambda * val * guichardet_weight(u, model.base) * field_power(psi, u);

  StationaryLogZ out;
  out.psi = psi;
  out.log_z = source_term + s0 + v_at_psi;

  // j^x - g^{xy} psi_y + int v^{x+X} psi_X dX, contravariant slot x
  std::vector<double> grad = interaction_gradient(model, psi);
  double worst = 0.0;
  for (int x = 0; x < m; ++x) {
    double r = j[static_cast<std::size_t>(x)];
    for (int y = 0; y < m; ++y)
      r -= model.base.weight(y) * model.metric.inv(x, y) * psi[static_cast<std::size_t>(y)];
    r += grad[static_cast<std::size_t>(x)];
    worst = std::max(worst, std::abs(r));
  }
  out.stationarity_residual = worst;
  return out;
}

}  // namespace fieldcalc
