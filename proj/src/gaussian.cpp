#include "fieldcalc/gaussian.hpp"

#include <cmath>
#include <cstdio>
#include <limits>

#include <Eigen/Dense>

#include "fieldcalc/combinatorics.hpp"

namespace fieldcalc {

namespace {

Eigen::MatrixXd to_eigen(const std::vector<double>& rowmajor, int m) {
  Eigen::MatrixXd a(m, m);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) a(i, j) = rowmajor[static_cast<std::size_t>(i * m + j)];
  return a;
}

std::vector<double> from_eigen(const Eigen::MatrixXd& a) {
  int m = static_cast<int>(a.rows());
  std::vector<double> out(static_cast<std::size_t>(m * m));
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) out[static_cast<std::size_t>(i * m + j)] = a(i, j);
  return out;
}

}  // namespace

std::vector<double> metric_inverse(const std::vector<double>& g_rowmajor, const BaseSpace& base) {
  int m = base.size();
  if (static_cast<int>(g_rowmajor.size()) != m * m)
    throw InvalidInput("metric_inverse: matrix size does not match base space");
  Eigen::MatrixXd g = to_eigen(g_rowmajor, m);
  if (!g.isApprox(g.transpose(), 1e-12)) throw InvalidInput("metric_inverse: matrix must be symmetric");

  Eigen::JacobiSVD<Eigen::MatrixXd> svd(g);
  double smax = svd.singularValues()(0);
  double smin = svd.singularValues()(m - 1);
  double cond = smin > 0.0 ? smax / smin : std::numeric_limits<double>::infinity();
  if (!(smin > 0.0) || cond > 1e14) {
    char buf[128];
    std::snprintf(buf, sizeof buf, "metric_inverse: singular metric (condition estimate %.3g)", cond);
    throw NumericError(buf);
  }

  Eigen::VectorXd winv(m);
  for (int i = 0; i < m; ++i) winv(i) = 1.0 / base.weight(i);
  Eigen::MatrixXd inv = winv.asDiagonal() * g.fullPivLu().inverse() * winv.asDiagonal();
  return from_eigen(inv);
}

Metric Metric::make(const std::vector<double>& g_rowmajor, const BaseSpace& base) {
  Metric out;
  out.m = base.size();
  out.g = g_rowmajor;
  out.g_inv = metric_inverse(g_rowmajor, base);
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(to_eigen(g_rowmajor, out.m));
  out.condition_number = svd.singularValues()(0) / svd.singularValues()(out.m - 1);
  return out;
}

Metric Metric::identity(const BaseSpace& base) {
  int m = base.size();
  std::vector<double> g(static_cast<std::size_t>(m * m), 0.0);
  for (int i = 0; i < m; ++i) g[static_cast<std::size_t>(i * m + i)] = 1.0;
  return make(g, base);
}

double isserlis_moment(const Metric& metric, const MultiIndex& x) {
  int n = x.order();
  if (n % 2 != 0) return 0.0;
  if (n == 0) return 1.0;
  if (n > kMaxPairPartitionN)
    throw SizeLimitError("isserlis_moment: order exceeds pairing guard " + std::to_string(kMaxPairPartitionN));
  double acc = 0.0;
  for_each_pair_partition(n, [&](const PairPartition& pp) {
    double term = 1.0;
    for (auto [a, b] : pp.pairs) term *= metric(x[a], x[b]);
    acc += term;
  });
  return acc;
}

long long isserlis_pairing_count(int order) {
  if (order % 2 != 0) return 0;
  long long v = 1;
  for (int k = order - 1; k > 1; k -= 2) v *= k;
  return v;
}

GaussianMoments::GaussianMoments(const Metric& metric, std::vector<double> mean)
    : metric_(metric), mean_(std::move(mean)) {
  if (static_cast<int>(mean_.size()) != metric_.m)
    throw InvalidInput("GaussianMoments: mean length does not match metric");
}

GaussianMoments::GaussianMoments(const Metric& metric)
    : GaussianMoments(metric, std::vector<double>(static_cast<std::size_t>(metric.m), 0.0)) {}

double GaussianMoments::at(const MultiIndex& x) {
  if (x.order() == 0) return 1.0;
  auto it = memo_.find(x);
  if (it != memo_.end()) return it->second;
  int first = x[0];
  MultiIndex rest = x.minus_at(0);
  double acc = mean_[static_cast<std::size_t>(first)] * at(rest);
  for (auto [pt, k] : rest.multiplicities()) acc += k * metric_(first, pt) * at(rest.minus(pt));
  memo_.emplace(x, acc);
  return acc;
}

SymmetricSeries gaussian_series(const Metric& metric, const std::vector<double>& mean, int n_max) {
  GaussianMoments gm(metric, mean);
  SymmetricSeries out(n_max);
  for_each_multi_index(metric.m, n_max, [&](const MultiIndex& x) { out.set(x, gm.at(x)); });
  return out;
}

SymmetricSeries apply_b(int x, const SymmetricSeries& f) { return derivative(f, x); }

SymmetricSeries apply_b_star(const Metric& metric, int x, const SymmetricSeries& f) {
  SymmetricSeries out(f.truncation_order() + 1);
  for (const auto& [y, v] : f.entries()) {
    for (int p = 0; p < metric.m; ++p) {
      double gxp = metric(x, p);
      if (gxp == 0.0) continue;
      out.add(y.plus(p), static_cast<double>(y.count(p) + 1) * gxp * v);
    }
  }
  return out;
}

SymmetricSeries apply_b_upper(const Metric& metric, const BaseSpace& base, int x, const SymmetricSeries& f) {
  SymmetricSeries out(std::max(f.truncation_order() - 1, 0));
  for (int y = 0; y < metric.m; ++y) {
    double c = base.weight(y) * metric.inv(x, y);
    if (c == 0.0) continue;
    SymmetricSeries d = derivative(f, y);
    for (const auto& [idx, v] : d.entries()) out.add(idx, c * v);
  }
  return out;
}

double bochner_spotcheck(const SymmetricSeries& g, const std::vector<Source>& sources, const BaseSpace& base) {
  int n = static_cast<int>(sources.size());
  if (n == 0) throw InvalidInput("bochner_spotcheck: need at least one source");
  Eigen::MatrixXd gram(n, n);
  for (int a = 0; a < n; ++a) {
    for (int b = a; b < n; ++b) {
      Source sum(sources[static_cast<std::size_t>(a)]);
      for (int i = 0; i < base.size(); ++i) sum[static_cast<std::size_t>(i)] += sources[static_cast<std::size_t>(b)][static_cast<std::size_t>(i)];
      double z = eval_generating(g, sum, base);
      gram(a, b) = z;
      gram(b, a) = z;
    }
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(gram);
  return es.eigenvalues().minCoeff();
}

}  // namespace fieldcalc
