#include "fieldcalc/perturbation.hpp"

#include <cmath>

#include "fieldcalc/combinatorics.hpp"
#include "fieldcalc/parallel.hpp"

namespace fieldcalc {

namespace {

// Number of canonical multi-indices of order <= n over m points.
double index_count_estimate(int m, int n) {
  double c = 1.0;
  for (int i = 1; i <= m; ++i) c = c * (n + i) / i;
  return c;
}

void guard_contraction_work(const ModelSpec& model, int total_order, const char* who) {
  if (index_count_estimate(model.base.size(), total_order) > 2e6)
    throw SizeLimitError(std::string(who) + ": contraction over orders up to " + std::to_string(total_order) +
                         " exceeds the work guard");
}

// Sum over set partitions of the positions of X whose blocks all carry a
// vertex factor: blocks of size <= degree, at most n_max blocks. Recursive
// restricted-growth construction with size pruning.
double vertex_partition_sum(const ModelSpec& model, const MultiIndex& x) {
  int n = x.order();
  if (n == 0) return 1.0;  // the empty partition (zero vertices)
  int degree = model.interaction.max_degree();
  if (degree == 0) return 0.0;
  double lambda = model.interaction.coupling;
  const SymmetricSeries& v = model.interaction.v;

  std::vector<std::vector<int>> blocks;
  double acc = 0.0;
  auto close_value = [&]() {
    double term = 1.0;
    for (const auto& b : blocks) {
      std::vector<int> pts;
      pts.reserve(b.size());
      for (int pos : b) pts.push_back(x[pos]);
      term *= lambda * v.at(MultiIndex::from_sorted(std::move(pts)));
      if (term == 0.0) return 0.0;
    }
    return term;
  };
  auto rec = [&](auto&& self, int pos) -> void {
    if (pos == n) {
      acc += close_value();
      return;
    }
    for (auto& b : blocks) {
      if (static_cast<int>(b.size()) < degree) {
        b.push_back(pos);
        self(self, pos + 1);
        b.pop_back();
      }
    }
    if (static_cast<int>(blocks.size()) < model.n_max) {
      blocks.push_back({pos});
      self(self, pos + 1);
      blocks.pop_back();
    }
  };
  rec(rec, 0);
  return acc;
}

}  // namespace

void ModelSpec::validate() const {
  if (metric.m != base.size()) throw InvalidInput("ModelSpec: metric size does not match base space");
  if (n_max < 0 || n_max_moments < 0) throw InvalidInput("ModelSpec: negative truncation order");
  if (interaction.v.at(MultiIndex{}) != 0.0)
    throw InvalidInput("ModelSpec: interaction must have no order-0 term");
  for (const auto& [idx, val] : interaction.v.entries())
    for (int pt : idx)
      if (pt < 0 || pt >= base.size()) throw InvalidInput("ModelSpec: interaction index outside base space");
}

VertexExpansion build_vertex_expansion(const ModelSpec& model) {
  model.validate();
  int degree = model.interaction.max_degree();
  int cap = model.n_max * degree;
  guard_contraction_work(model, cap, "vertex expansion");

  SymmetricSeries vs(cap);
  for (const auto& [idx, val] : model.interaction.v.entries())
    if (idx.order() <= cap) vs.set(idx, model.interaction.coupling * val);

  VertexExpansion out;
  out.max_order = cap;
  SymmetricSeries power = SymmetricSeries::unit(cap);
  for (int n = 0; n <= model.n_max; ++n) {
    if (n > 0) power = wick_product(power, vs);
    double c = 1.0 / factorial(n);
    for (const auto& [y, val] : power.entries())
      if (val != 0.0) out.terms.emplace_back(y, c * val);
  }
  return out;
}

double partition_function(const ModelSpec& model) {
  VertexExpansion vx = build_vertex_expansion(model);
  GaussianMoments gm(model.metric);
  double xi = 0.0;
  for (const auto& [y, c] : vx.terms) xi += c * gm.at(y) * guichardet_weight(y, model.base);
  return xi;
}

double partition_function_enumerated(const ModelSpec& model) {
  model.validate();
  int cap = model.n_max * model.interaction.max_degree();
  if (cap > kMaxPairPartitionN)
    throw SizeLimitError("partition_function_enumerated: n_max * degree exceeds pairing guard");
  double xi = 0.0;
  for (int order = 0; order <= cap; order += 2) {
    for_each_multi_index_of_order(model.base.size(), order, [&](const MultiIndex& x) {
      double pv = vertex_partition_sum(model, x);
      if (pv == 0.0) return;
      xi += pv * isserlis_moment(model.metric, x) * guichardet_weight(x, model.base);
    });
  }
  return xi;
}

SymmetricSeries interacting_moments(const ModelSpec& model, int n_max_moments, unsigned threads) {
  VertexExpansion vx = build_vertex_expansion(model);
  guard_contraction_work(model, n_max_moments + vx.max_order, "interacting_moments");

  // Gaussian moment table covering every X+Y the contraction touches.
  SymmetricSeries gtable = gaussian_series(model.metric, std::vector<double>(model.base.weights.size(), 0.0),
                                           n_max_moments + vx.max_order);

  std::vector<double> vertex_weights(vx.terms.size());
  for (std::size_t t = 0; t < vx.terms.size(); ++t)
    vertex_weights[t] = vx.terms[t].second * guichardet_weight(vx.terms[t].first, model.base);

  double xi = 0.0;
  for (std::size_t t = 0; t < vx.terms.size(); ++t) xi += vertex_weights[t] * gtable.at(vx.terms[t].first);
  if (xi == 0.0) throw NumericError("interacting_moments: truncated partition function vanished");

  std::vector<MultiIndex> targets;
  for_each_multi_index(model.base.size(), n_max_moments, [&](const MultiIndex& x) { targets.push_back(x); });

  std::vector<double> values(targets.size(), 0.0);
  parallel_for(targets.size(), threads, [&](std::size_t i) {
    const MultiIndex& x = targets[i];
    double acc = 0.0;
    for (std::size_t t = 0; t < vx.terms.size(); ++t)
      acc += vertex_weights[t] * gtable.at(x.merged(vx.terms[t].first));
    values[i] = acc / xi;
  });

  SymmetricSeries out(n_max_moments);
  for (std::size_t i = 0; i < targets.size(); ++i) out.set(targets[i], values[i]);
  return out;
}

SymmetricSeries interacting_moments_enumerated(const ModelSpec& model, int n_max_moments) {
  model.validate();
  int cap = model.n_max * model.interaction.max_degree();
  if (n_max_moments + cap > kMaxPairPartitionN)
    throw SizeLimitError("interacting_moments_enumerated: moment order plus vertex order exceeds pairing guard");
  double xi = partition_function_enumerated(model);
  if (xi == 0.0) throw NumericError("interacting_moments_enumerated: truncated partition function vanished");

  SymmetricSeries out(n_max_moments);
  for_each_multi_index(model.base.size(), n_max_moments, [&](const MultiIndex& x) {
    double acc = 0.0;
    for (int yorder = 0; yorder <= cap; ++yorder) {
      if ((x.order() + yorder) % 2 != 0) continue;
      for_each_multi_index_of_order(model.base.size(), yorder, [&](const MultiIndex& y) {
        double pv = vertex_partition_sum(model, y);
        if (pv == 0.0) return;
        acc += pv * isserlis_moment(model.metric, x.merged(y)) * guichardet_weight(y, model.base);
      });
    }
    out.set(x, acc / xi);
  });
  return out;
}

SymmetricSeries moments_to_cumulants(const SymmetricSeries& g) {
  if (std::abs(g.at(MultiIndex{}) - 1.0) > 1e-12)
    throw InvalidInput("moments_to_cumulants: moments must be normalized (G at the empty index = 1)");
  return log_series(g);
}

SymmetricSeries cumulants_to_moments(const SymmetricSeries& k) {
  if (std::abs(k.at(MultiIndex{})) > 1e-12)
    throw InvalidInput("cumulants_to_moments: cumulants must vanish at the empty index");
  SymmetricSeries k0 = k;
  k0.set(MultiIndex{}, 0.0);
  return exp_series(k0);
}

double ds_residual(const ModelSpec& model, const SymmetricSeries& g, const MultiIndex& x_idx, int x) {
  model.validate();
  if (x < 0 || x >= model.base.size()) throw InvalidInput("ds_residual: point outside base space");
  int degree = model.interaction.max_degree();
  int required = x_idx.order() + 1 + degree;
  if (g.truncation_order() < required)
    throw InvalidInput("ds_residual: moments truncated at order " + std::to_string(g.truncation_order()) +
                       ", need at least " + std::to_string(required));

  double r = g.at(x_idx.plus(x));
  for (auto [pt, k] : x_idx.multiplicities()) r -= k * model.metric(x, pt) * g.at(x_idx.minus(pt));

  double lambda = model.interaction.coupling;
  for (const auto& [u, val] : model.interaction.v.entries()) {
    for (auto [y, mult_y] : u.multiplicities()) {
      MultiIndex rest = u.minus(y);
      r -= model.base.weight(y) * model.metric(x, y) * lambda * val * guichardet_weight(rest, model.base) *
           g.at(x_idx.merged(rest));
    }
  }
  return r;
}

double max_ds_residual(const ModelSpec& model, const SymmetricSeries& g, int order_cap) {
  double worst = 0.0;
  for_each_multi_index(model.base.size(), order_cap, [&](const MultiIndex& x_idx) {
    for (int x = 0; x < model.base.size(); ++x)
      worst = std::max(worst, std::abs(ds_residual(model, g, x_idx, x)));
  });
  return worst;
}

}  // namespace fieldcalc
