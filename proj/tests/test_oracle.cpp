#include <doctest.h>

#include <cmath>

#include "fieldcalc/oracle.hpp"
#include "test_util.hpp"

using namespace fieldcalc;
using testutil::Rand;

TEST_CASE("gauss-hermite rule integrates the weight and low moments exactly") {
  auto rule = oracle::QuadratureRule::gauss_hermite(40);
  double total = 0.0, second = 0.0;
  for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
    total += rule.weights[i];
    second += rule.weights[i] * rule.nodes[i] * rule.nodes[i];
  }
  CHECK(total == doctest::Approx(std::sqrt(M_PI)).epsilon(1e-13));
  CHECK(second == doctest::Approx(0.5 * std::sqrt(M_PI)).epsilon(1e-12));
}

TEST_CASE("gh moments: unit variance values and the m = 2 covariance") {
  BaseSpace b1 = BaseSpace::uniform(1);
  Metric g1 = Metric::identity(b1);
  CHECK(oracle::gh_moment(g1, MultiIndex{0, 0}) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(oracle::gh_moment(g1, MultiIndex{0, 0, 0, 0}) == doctest::Approx(3.0).epsilon(1e-12));
  CHECK(std::abs(oracle::gh_moment(g1, MultiIndex{0, 0, 0})) <= 1e-12);

  Rand r(61);
  BaseSpace b2 = BaseSpace::uniform(2);
  Metric g2 = Metric::make(testutil::random_spd(r, 2), b2);
  CHECK(oracle::gh_moment(g2, MultiIndex{0, 1}) == doctest::Approx(g2(0, 1)).epsilon(1e-12));

  CHECK_THROWS_AS(oracle::gh_moment(g1, MultiIndex(std::vector<int>(10, 0)), 4), InvalidInput);
  BaseSpace b4 = BaseSpace::uniform(4);
  Metric g4 = Metric::identity(b4);
  CHECK_THROWS_AS(oracle::gh_expectation_fn(g4, [](const std::vector<double>&) { return 1.0; }), InvalidInput);
}

TEST_CASE("gh expectation of an analytic functional") {
  // P(phi) = c + a phi_0 + b phi_0^2 with Guichardet weights: E = c + b w^2 / 2
  BaseSpace base({1.3});
  Metric g = Metric::make({0.9}, base);
  SymmetricSeries p(2);
  p.set(MultiIndex{}, 2.0);
  p.set(MultiIndex{0}, 0.7);
  p.set(MultiIndex{0, 0}, 1.1);
  double w2 = 1.3 * 1.3;
  double expect = 2.0 + 1.1 * w2 * 0.9 / 2.0;
  CHECK(oracle::gh_expectation(g, p, base) == doctest::Approx(expect).epsilon(1e-12));
}

TEST_CASE("monte carlo: trivial cases and reproducibility") {
  BaseSpace base = BaseSpace::uniform(2);
  Rand r(62);
  Metric g = Metric::make(testutil::random_spd(r, 2), base);

  auto one = oracle::mc_expectation(g, [](const std::vector<double>&) { return 1.0; }, 1000, 7);
  CHECK(one.mean == 1.0);
  CHECK(one.std_error == 0.0);

  auto first = oracle::mc_expectation(g, [](const std::vector<double>& p) { return p[0]; }, 100000, 7);
  CHECK(std::abs(first.mean) <= 5.0 * first.std_error);

  auto again = oracle::mc_expectation(g, [](const std::vector<double>& p) { return p[0]; }, 100000, 7);
  CHECK(first.mean == again.mean);
  CHECK(first.std_error == again.std_error);

  auto other = oracle::mc_expectation(g, [](const std::vector<double>& p) { return p[0]; }, 100000, 8);
  CHECK(first.mean != other.mean);

  Metric not_spd;
  not_spd.m = 1;
  not_spd.g = {-1.0};
  not_spd.g_inv = {-1.0};
  CHECK_THROWS_AS(oracle::mc_expectation(not_spd, [](const std::vector<double>&) { return 1.0; }, 10, 1),
                  NumericError);
}

TEST_CASE("scalar series arithmetic") {
  using oracle::ScalarSeries;

  // log(1 + x): coefficients (-1)^(n-1)/n
  ScalarSeries onepx = {1.0, 1.0, 0.0, 0.0, 0.0, 0.0};
  ScalarSeries l = oracle::scalar_log(onepx);
  for (int n = 1; n <= 5; ++n)
    CHECK(l[n] == doctest::Approx((n % 2 ? 1.0 : -1.0) / n).epsilon(1e-14));

  // 1/(1 + x) = 1 - x + x^2 - ...
  ScalarSeries inv = oracle::scalar_inverse(onepx);
  for (int n = 0; n <= 5; ++n) CHECK(inv[n] == doctest::Approx(n % 2 ? -1.0 : 1.0).epsilon(1e-14));

  // exp(log f) = f
  Rand r(63);
  ScalarSeries f = {1.0};
  for (int n = 1; n <= 7; ++n) f.push_back(r.uniform(-1.0, 1.0));
  ScalarSeries back = oracle::scalar_exp(oracle::scalar_log(f));
  for (std::size_t i = 0; i < f.size(); ++i) CHECK(back[i] == doctest::Approx(f[i]).epsilon(1e-12));

  // compose(h, f) matches direct polynomial evaluation of truncations
  ScalarSeries h = {0.3, -0.5, 0.25, 0.1};
  ScalarSeries inner = {0.0, 0.8, -0.3, 0.05};
  ScalarSeries comp = oracle::scalar_compose(h, inner);
  // brute force: expand h(inner(t)) with nested multiplication
  ScalarSeries acc(inner.size(), 0.0);
  ScalarSeries pw = {1.0};
  pw.resize(inner.size(), 0.0);
  for (std::size_t k = 0; k < h.size(); ++k) {
    for (std::size_t i = 0; i < acc.size(); ++i) acc[i] += h[k] * pw[i];
    pw = oracle::scalar_mul(pw, inner, static_cast<int>(inner.size()) - 1);
  }
  for (std::size_t i = 0; i < acc.size(); ++i) CHECK(comp[i] == doctest::Approx(acc[i]).epsilon(1e-13));

  CHECK_THROWS_AS(oracle::scalar_log(ScalarSeries{2.0, 1.0}), InvalidInput);
  CHECK_THROWS_AS(oracle::scalar_inverse(ScalarSeries{0.0, 1.0}), InvalidInput);
  CHECK_THROWS_AS(oracle::scalar_compose(h, ScalarSeries{1.0, 1.0}), InvalidInput);
}

TEST_CASE("naive loops stay within their guards") {
  SymmetricSeries big(5);
  big.set(MultiIndex{}, 1.0);
  BaseSpace base = BaseSpace::uniform(100);
  CHECK_THROWS_AS(oracle::naive_integral(big, base), SizeLimitError);
}
