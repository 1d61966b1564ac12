#include "fieldcalc/oracle.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Dense>

namespace fieldcalc::oracle {

namespace {

constexpr double kPi = 3.14159265358979323846;

Eigen::MatrixXd metric_matrix(const Metric& metric) {
  Eigen::MatrixXd g(metric.m, metric.m);
  for (int i = 0; i < metric.m; ++i)
    for (int j = 0; j < metric.m; ++j) g(i, j) = metric(i, j);
  return g;
}

Eigen::MatrixXd cholesky_or_throw(const Metric& metric, const char* who) {
  Eigen::LLT<Eigen::MatrixXd> llt(metric_matrix(metric));
  if (llt.info() != Eigen::Success)
    throw NumericError(std::string(who) + ": covariance must be positive definite");
  return llt.matrixL();
}

// Analytic-functional evaluation with Guichardet weights, written directly
// so it shares no code with eval_generating.
double poly_eval(const SymmetricSeries& poly, const std::vector<double>& phi, const BaseSpace& base) {
  double acc = 0.0;
  for (const auto& [x, v] : poly.entries()) {
    double term = v;
    int run = 1;
    for (int i = 0; i < x.order(); ++i) {
      term *= base.weight(x[i]) * phi[static_cast<std::size_t>(x[i])];
      if (i + 1 < x.order() && x[i + 1] == x[i]) {
        ++run;
      } else {
        for (int r = 2; r <= run; ++r) term /= r;
        run = 1;
      }
    }
    acc += term;
  }
  return acc;
}

}  // namespace

QuadratureRule QuadratureRule::gauss_hermite(int order) {
  if (order < 1) throw InvalidInput("gauss_hermite: order must be positive");
  // Golub-Welsch: eigen-decompose the Jacobi matrix of the Hermite
  // recurrence; weights are sqrt(pi) times the squared first components.
  Eigen::MatrixXd jac = Eigen::MatrixXd::Zero(order, order);
  for (int k = 1; k < order; ++k) {
    double b = std::sqrt(k / 2.0);
    jac(k - 1, k) = b;
    jac(k, k - 1) = b;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(jac);
  QuadratureRule rule;
  rule.nodes.resize(static_cast<std::size_t>(order));
  rule.weights.resize(static_cast<std::size_t>(order));
  for (int i = 0; i < order; ++i) {
    rule.nodes[static_cast<std::size_t>(i)] = es.eigenvalues()(i);
    double v0 = es.eigenvectors()(0, i);
    rule.weights[static_cast<std::size_t>(i)] = std::sqrt(kPi) * v0 * v0;
  }
  return rule;
}

double gh_expectation_fn(const Metric& metric, const std::function<double(const std::vector<double>&)>& f,
                         int order) {
  int m = metric.m;
  if (m > 3) throw InvalidInput("gh_expectation_fn: tensorized quadrature supports m <= 3");
  Eigen::MatrixXd chol = cholesky_or_throw(metric, "gh_expectation_fn");
  QuadratureRule rule = QuadratureRule::gauss_hermite(order);

  std::vector<double> phi(static_cast<std::size_t>(m), 0.0);
  std::vector<int> idx(static_cast<std::size_t>(m), 0);
  double acc = 0.0;
  const double scale = std::sqrt(2.0);
  while (true) {
    double w = 1.0;
    for (int d = 0; d < m; ++d) w *= rule.weights[static_cast<std::size_t>(idx[static_cast<std::size_t>(d)])];
    for (int r = 0; r < m; ++r) {
      double v = 0.0;
      for (int c = 0; c <= r; ++c) v += chol(r, c) * rule.nodes[static_cast<std::size_t>(idx[static_cast<std::size_t>(c)])];
      phi[static_cast<std::size_t>(r)] = scale * v;
    }
    acc += w * f(phi);
    int d = m - 1;
    while (d >= 0 && idx[static_cast<std::size_t>(d)] == static_cast<int>(rule.nodes.size()) - 1) --d;
    if (d < 0) break;
    ++idx[static_cast<std::size_t>(d)];
    for (int r = d + 1; r < m; ++r) idx[static_cast<std::size_t>(r)] = 0;
  }
  return acc / std::pow(kPi, m / 2.0);
}

double gh_expectation(const Metric& metric, const SymmetricSeries& poly, const BaseSpace& base, int order) {
  if (poly.max_entry_order() > 2 * order - 1)
    throw InvalidInput("gh_expectation: polynomial degree exceeds quadrature exactness");
  return gh_expectation_fn(
      metric, [&](const std::vector<double>& phi) { return poly_eval(poly, phi, base); }, order);
}

double gh_moment(const Metric& metric, const MultiIndex& x, int order) {
  if (x.order() > 2 * order - 1) throw InvalidInput("gh_moment: moment order exceeds quadrature exactness");
  return gh_expectation_fn(
      metric,
      [&x](const std::vector<double>& phi) {
        double p = 1.0;
        for (int pt : x) p *= phi[static_cast<std::size_t>(pt)];
        return p;
      },
      order);
}

McResult mc_expectation(const Metric& metric, const std::function<double(const std::vector<double>&)>& f,
                        long samples, std::uint64_t seed) {
  if (samples < 1) throw InvalidInput("mc_expectation: need at least one sample");
  GaussianSampler sampler(metric, seed);
  std::vector<double> phi(static_cast<std::size_t>(metric.m), 0.0);
  // Welford accumulation keeps the variance stable in one deterministic pass.
  double mean = 0.0, m2 = 0.0;
  for (long i = 0; i < samples; ++i) {
    sampler.draw(phi);
    double v = f(phi);
    double d = v - mean;
    mean += d / static_cast<double>(i + 1);
    m2 += d * (v - mean);
  }
  McResult out;
  out.mean = mean;
  out.std_error = samples > 1 ? std::sqrt(m2 / (static_cast<double>(samples - 1) * static_cast<double>(samples))) : 0.0;
  return out;
}

GaussianSampler::GaussianSampler(const Metric& metric, std::uint64_t seed) : m_(metric.m), rng_(seed) {
  Eigen::MatrixXd chol = cholesky_or_throw(metric, "GaussianSampler");
  chol_.assign(static_cast<std::size_t>(m_ * m_), 0.0);
  for (int r = 0; r < m_; ++r)
    for (int c = 0; c <= r; ++c) chol_[static_cast<std::size_t>(r * m_ + c)] = chol(r, c);
}

double GaussianSampler::uniform01() {
  // 53-bit mantissa uniform in (0, 1]; the +1 keeps log() finite.
  return (static_cast<double>(rng_() >> 11) + 1.0) * 0x1.0p-53;
}

double GaussianSampler::normal() {
  if (have_spare_) {
    have_spare_ = false;
    return spare_;
  }
  double u1 = uniform01();
  double u2 = uniform01();
  double r = std::sqrt(-2.0 * std::log(u1));
  double a = 2.0 * kPi * u2;
  spare_ = r * std::sin(a);
  have_spare_ = true;
  return r * std::cos(a);
}

void GaussianSampler::draw(std::vector<double>& out) {
  out.assign(static_cast<std::size_t>(m_), 0.0);
  std::vector<double> z(static_cast<std::size_t>(m_));
  for (int i = 0; i < m_; ++i) z[static_cast<std::size_t>(i)] = normal();
  for (int r = 0; r < m_; ++r) {
    double acc = 0.0;
    for (int c = 0; c <= r; ++c) acc += chol_[static_cast<std::size_t>(r * m_ + c)] * z[static_cast<std::size_t>(c)];
    out[static_cast<std::size_t>(r)] = acc;
  }
}

double naive_integral(const SymmetricSeries& f, const BaseSpace& base) {
  int m = base.size();
  double acc = 0.0;
  for (int n = 0; n <= f.truncation_order(); ++n) {
    double pw = std::pow(static_cast<double>(m), n);
    if (pw > 2e7) throw SizeLimitError("naive_integral: tuple loop too large");
    std::vector<int> t(static_cast<std::size_t>(n), 0);
    double layer = 0.0;
    while (true) {
      std::vector<int> sorted(t);
      std::sort(sorted.begin(), sorted.end());
      double w = 1.0;
      for (int p : t) w *= base.weight(p);
      layer += f.at(MultiIndex::from_sorted(sorted)) * w;
      int i = n - 1;
      while (i >= 0 && t[static_cast<std::size_t>(i)] == m - 1) --i;
      if (i < 0) break;
      ++t[static_cast<std::size_t>(i)];
      for (int r = i + 1; r < n; ++r) t[static_cast<std::size_t>(r)] = 0;
    }
    acc += layer / factorial(n);
  }
  return acc;
}

double naive_eval(const SymmetricSeries& f, const std::vector<double>& j, const BaseSpace& base) {
  int m = base.size();
  double acc = 0.0;
  for (int n = 0; n <= f.truncation_order(); ++n) {
    double pw = std::pow(static_cast<double>(m), n);
    if (pw > 2e7) throw SizeLimitError("naive_eval: tuple loop too large");
    std::vector<int> t(static_cast<std::size_t>(n), 0);
    double layer = 0.0;
    while (true) {
      std::vector<int> sorted(t);
      std::sort(sorted.begin(), sorted.end());
      double w = 1.0;
      for (int p : t) w *= base.weight(p) * j[static_cast<std::size_t>(p)];
      layer += f.at(MultiIndex::from_sorted(sorted)) * w;
      int i = n - 1;
      while (i >= 0 && t[static_cast<std::size_t>(i)] == m - 1) --i;
      if (i < 0) break;
      ++t[static_cast<std::size_t>(i)];
      for (int r = i + 1; r < n; ++r) t[static_cast<std::size_t>(r)] = 0;
    }
    acc += layer / factorial(n);
  }
  return acc;
}

double naive_wick_entry(const SymmetricSeries& f, const SymmetricSeries& g, const MultiIndex& x) {
  int n = x.order();
  if (n > 24) throw SizeLimitError("naive_wick_entry: subset loop too large");
  double acc = 0.0;
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << n); ++mask) {
    std::vector<int> left, right;
    for (int i = 0; i < n; ++i)
      ((mask >> i) & 1 ? left : right).push_back(x[i]);
    acc += f.at(MultiIndex::from_sorted(left)) * g.at(MultiIndex::from_sorted(right));
  }
  return acc;
}

ScalarSeries scalar_mul(const ScalarSeries& a, const ScalarSeries& b, int n_out) {
  ScalarSeries out(static_cast<std::size_t>(n_out) + 1, 0.0);
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; i + j < out.size() && j < b.size(); ++j) out[i + j] += a[i] * b[j];
  return out;
}

ScalarSeries scalar_compose(const ScalarSeries& h, const ScalarSeries& f) {
  if (f.empty() || f[0] != 0.0) throw InvalidInput("scalar_compose: inner series must have zero constant term");
  int n = static_cast<int>(f.size()) - 1;
  ScalarSeries out(static_cast<std::size_t>(n) + 1, 0.0);
  // Horner from the top coefficient down.
  for (std::size_t k = h.size(); k-- > 0;) {
    out = scalar_mul(out, f, n);
    out[0] += h[k];
  }
  return out;
}

ScalarSeries scalar_exp(const ScalarSeries& f) {
  if (f.empty() || f[0] != 0.0) throw InvalidInput("scalar_exp: constant term must vanish");
  int n = static_cast<int>(f.size()) - 1;
  ScalarSeries e(static_cast<std::size_t>(n) + 1, 0.0);
  e[0] = 1.0;
  for (int k = 1; k <= n; ++k) {
    double s = 0.0;
    for (int i = 1; i <= k; ++i)
      if (i < static_cast<int>(f.size())) s += i * f[static_cast<std::size_t>(i)] * e[static_cast<std::size_t>(k - i)];
    e[static_cast<std::size_t>(k)] = s / k;
  }
  return e;
}

ScalarSeries scalar_log(const ScalarSeries& f) {
  if (f.empty() || f[0] != 1.0) throw InvalidInput("scalar_log: constant term must be 1");
  int n = static_cast<int>(f.size()) - 1;
  ScalarSeries l(static_cast<std::size_t>(n) + 1, 0.0);
  for (int k = 1; k <= n; ++k) {
    double s = k * f[static_cast<std::size_t>(k)];
    for (int i = 1; i < k; ++i) s -= i * l[static_cast<std::size_t>(i)] * f[static_cast<std::size_t>(k - i)];
    l[static_cast<std::size_t>(k)] = s / k;
  }
  return l;
}

ScalarSeries scalar_inverse(const ScalarSeries& f) {
  if (f.empty() || f[0] == 0.0) throw InvalidInput("scalar_inverse: constant term must be nonzero");
  int n = static_cast<int>(f.size()) - 1;
  ScalarSeries q(static_cast<std::size_t>(n) + 1, 0.0);
  q[0] = 1.0 / f[0];
  for (int k = 1; k <= n; ++k) {
    double s = 0.0;
    for (int i = 1; i <= k; ++i) s += f[static_cast<std::size_t>(i)] * q[static_cast<std::size_t>(k - i)];
    q[static_cast<std::size_t>(k)] = -s / f[0];
  }
  return q;
}

}  // namespace fieldcalc::oracle
