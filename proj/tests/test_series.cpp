#include <doctest.h>

#include <cmath>

#include "fieldcalc/combinatorics.hpp"
#include "fieldcalc/oracle.hpp"
#include "fieldcalc/series.hpp"
#include "test_util.hpp"

using namespace fieldcalc;
using testutil::Rand;

TEST_CASE("guichardet integral: order-0 term, hand-evaluated truncation, naive oracle") {
  BaseSpace b1 = BaseSpace::uniform(1);
  SymmetricSeries f(3);
  f.set(MultiIndex{}, 2.5);
  CHECK(guichardet_integral(f, b1) == doctest::Approx(2.5).epsilon(1e-15));

  // m = 1, w = 1, F_n = 1 for n <= 3: 1 + 1 + 1/2 + 1/6
  SymmetricSeries ones(3);
  for (int n = 0; n <= 3; ++n) ones.set(MultiIndex(std::vector<int>(n, 0)), 1.0);
  CHECK(guichardet_integral(ones, b1) == doctest::Approx(1.0 + 1.0 + 0.5 + 1.0 / 6.0).epsilon(1e-15));

  Rand r(11);
  for (int rep = 0; rep < 10; ++rep) {
    int m = r.pick(1, 3);
    BaseSpace base = testutil::random_base(r, m);
    SymmetricSeries g = testutil::random_series(r, m, 4, 4);
    CHECK(std::abs(guichardet_integral(g, base) - oracle::naive_integral(g, base)) <= 1e-12);
  }
}

TEST_CASE("exponential vector: degenerate cases and the overlap identity") {
  BaseSpace base = BaseSpace::uniform(2);
  Source zero(2, 0.0);
  SymmetricSeries ez = exponential_vector(zero, 5, base);
  CHECK(ez.entries().size() == 1);
  CHECK(ez.at(MultiIndex{}) == 1.0);

  Source delta = {0.7, 0.0};
  SymmetricSeries ed = exponential_vector(delta, 4, base);
  for (int k = 0; k <= 4; ++k)
    CHECK(ed.at(MultiIndex(std::vector<int>(k, 0))) == doctest::Approx(std::pow(0.7, k)).epsilon(1e-15));

  // <exp f | exp g> = e^<f, g> up to the truncation tail
  Rand r(12);
  for (int rep = 0; rep < 20; ++rep) {
    int m = r.pick(1, 4);
    BaseSpace b = testutil::random_base(r, m);
    Source f = testutil::random_source(r, m, 0.7);
    Source g = testutil::random_source(r, m, 0.7);
    double dot = 0.0;
    for (int x = 0; x < m; ++x) dot += b.weight(x) * f[x] * g[x];
    double lhs = eval_generating(exponential_vector(f, 20, b), g, b);
    CHECK(std::abs(lhs - std::exp(dot)) <= 1e-10 * std::exp(std::abs(dot)));
  }
}

TEST_CASE("eval_generating: j = 0 slot and naive oracle") {
  Rand r(13);
  for (int rep = 0; rep < 10; ++rep) {
    int m = r.pick(1, 3);
    BaseSpace base = testutil::random_base(r, m);
    SymmetricSeries f = testutil::random_series(r, m, 4, 4);
    Source j0(static_cast<std::size_t>(m), 0.0);
    CHECK(eval_generating(f, j0, base) == f.at(MultiIndex{}));
    Source j = testutil::random_source(r, m);
    CHECK(std::abs(eval_generating(f, j, base) - oracle::naive_eval(f, j, base)) <= 1e-12);
  }
}

TEST_CASE("wick product: unit entry, exponential vectors, generating-functional homomorphism") {
  Rand r(14);
  BaseSpace base = testutil::random_base(r, 3);
  SymmetricSeries f = testutil::random_series(r, 3, 5, 2);
  SymmetricSeries g = testutil::random_series(r, 3, 5, 2);
  SymmetricSeries fg = wick_product(f, g);
  CHECK(fg.at(MultiIndex{}) == doctest::Approx(f.at(MultiIndex{}) * g.at(MultiIndex{})).epsilon(1e-15));

  // exp(f) <> exp(g) = exp(f + g), exact per entry
  Source sf = testutil::random_source(r, 3);
  Source sg = testutil::random_source(r, 3);
  Source sum(3);
  for (int i = 0; i < 3; ++i) sum[i] = sf[i] + sg[i];
  SymmetricSeries lhs = wick_product(exponential_vector(sf, 5, base), exponential_vector(sg, 5, base));
  SymmetricSeries rhs = exponential_vector(sum, 5, base);
  CHECK(testutil::max_entry_diff(lhs, rhs, 5) <= 1e-12);

  // Z_{F<>G}(j) = Z_F(j) Z_G(j) for truncation-consistent supports
  for (int rep = 0; rep < 50; ++rep) {
    int m = r.pick(1, 3);
    BaseSpace b = testutil::random_base(r, m);
    SymmetricSeries a = testutil::random_series(r, m, 6, 3);
    SymmetricSeries c = testutil::random_series(r, m, 6, 3);
    Source j = testutil::random_source(r, m, 0.6);
    double z1 = eval_generating(wick_product(a, c), j, b);
    double z2 = eval_generating(a, j, b) * eval_generating(c, j, b);
    CHECK(std::abs(z1 - z2) <= 1e-12);
  }
}

TEST_CASE("wick product entries match the naive split enumeration") {
  Rand r(15);
  for (int rep = 0; rep < 5; ++rep) {
    int m = r.pick(1, 3);
    SymmetricSeries f = testutil::random_series(r, m, 5, 3);
    SymmetricSeries g = testutil::random_series(r, m, 5, 3);
    SymmetricSeries h = wick_product(f, g);
    for_each_multi_index(m, 5, [&](const MultiIndex& x) {
      CHECK(std::abs(h.at(x) - oracle::naive_wick_entry(f, g, x)) <= 1e-12);
    });
  }
}

TEST_CASE("wick product is commutative and associative with the unit") {
  Rand r(16);
  for (int rep = 0; rep < 20; ++rep) {
    int m = r.pick(1, 3);
    SymmetricSeries a = testutil::random_series(r, m, 6, 2);
    SymmetricSeries b = testutil::random_series(r, m, 6, 2);
    SymmetricSeries c = testutil::random_series(r, m, 6, 2);
    CHECK(testutil::max_entry_diff(wick_product(a, b), wick_product(b, a), 6) <= 1e-12);
    CHECK(testutil::max_entry_diff(wick_product(wick_product(a, b), c), wick_product(a, wick_product(b, c)), 6) <=
          1e-12);
    CHECK(testutil::max_entry_diff(wick_product(a, SymmetricSeries::unit(6)), a, 6) <= 1e-12);
  }
}

TEST_CASE("wick powers: unit, square, iterated naive oracle") {
  Rand r(17);
  SymmetricSeries f = testutil::random_series(r, 2, 6, 2);
  CHECK(wick_power(f, 0) == SymmetricSeries::unit(6));
  CHECK(testutil::max_entry_diff(wick_power(f, 2), wick_product(f, f), 6) <= 1e-12);

  // independent route: fold naive_wick_entry twice
  SymmetricSeries f2(6), f3(6);
  for_each_multi_index(2, 6, [&](const MultiIndex& x) { f2.set(x, oracle::naive_wick_entry(f, f, x)); });
  for_each_multi_index(2, 6, [&](const MultiIndex& x) { f3.set(x, oracle::naive_wick_entry(f2, f, x)); });
  CHECK(testutil::max_entry_diff(wick_power(f, 3), f3, 6) <= 1e-11);

  // rank-1 series: n-th power of an exponential vector scales the source
  BaseSpace base = BaseSpace::uniform(2);
  Source s = {0.4, -0.3};
  SymmetricSeries e1 = exponential_vector(s, 5, base);
  Source s3 = {1.2, -0.9};
  CHECK(testutil::max_entry_diff(wick_power(e1, 3), exponential_vector(s3, 5, base), 5) <= 1e-12);
}

TEST_CASE("derivative: slot extraction, exponential vectors, Leibniz, commutation") {
  Rand r(18);
  BaseSpace base = testutil::random_base(r, 3);
  SymmetricSeries f = testutil::random_series(r, 3, 5, 4);
  Source j0(3, 0.0);
  for (int x = 0; x < 3; ++x)
    CHECK(eval_generating(derivative(f, x), j0, base) == f.at(MultiIndex{x}));

  Source s = testutil::random_source(r, 3);
  SymmetricSeries ef = exponential_vector(s, 5, base);
  SymmetricSeries def = derivative(ef, 1);
  for (const auto& [x, v] : def.entries())
    CHECK(v == doctest::Approx(s[1] * ef.at(x)).epsilon(1e-12));

  SymmetricSeries g = testutil::random_series(r, 3, 5, 4);
  for (int x = 0; x < 3; ++x) {
    SymmetricSeries lhs = derivative(wick_product(f, g), x);
    SymmetricSeries rhs = wick_product(derivative(f, x), g);
    SymmetricSeries rhs2 = wick_product(f, derivative(g, x));
    for (const auto& [idx, v] : lhs.entries()) CHECK(std::abs(v - rhs.at(idx) - rhs2.at(idx)) <= 1e-12);
  }

  CHECK(testutil::max_entry_diff(derivative(derivative(f, 0), 2), derivative(derivative(f, 2), 0), 3) == 0.0);

  SymmetricSeries order0(0);
  order0.set(MultiIndex{}, 3.0);
  SymmetricSeries d0 = derivative(order0, 0);
  CHECK(d0.entries().empty());
  CHECK(d0.truncation_order() == 0);
}

TEST_CASE("compose: exp of a rank-1 first-order series is the exponential vector") {
  BaseSpace base = BaseSpace::uniform(2);
  Source s = {0.8, -0.5};
  SymmetricSeries f(5);
  f.set(MultiIndex{0}, s[0]);
  f.set(MultiIndex{1}, s[1]);
  std::vector<double> exp_coeffs(6, 1.0);
  CHECK(testutil::max_entry_diff(compose(exp_coeffs, f), exponential_vector(s, 5, base), 5) <= 1e-12);

  // identity h(z) = h_0 + z shifts the order-0 entry only
  Rand r(19);
  SymmetricSeries g = testutil::random_series(r, 2, 4, 3);
  g.set(MultiIndex{}, 0.0);
  std::vector<double> ident = {2.5, 1.0};
  SymmetricSeries composed = compose(ident, g);
  CHECK(composed.at(MultiIndex{}) == doctest::Approx(2.5).epsilon(1e-15));
  for (const auto& [x, v] : g.entries())
    if (x.order() >= 1) CHECK(composed.at(x) == doctest::Approx(v).epsilon(1e-13));
}

namespace {

// m = 1 series <-> ordinary scalar coefficients a_n = F_n w^n / n!
oracle::ScalarSeries to_scalar(const SymmetricSeries& s, double w) {
  oracle::ScalarSeries a(static_cast<std::size_t>(s.truncation_order()) + 1, 0.0);
  double wp = 1.0;
  for (int n = 0; n <= s.truncation_order(); ++n) {
    a[static_cast<std::size_t>(n)] = s.at(MultiIndex(std::vector<int>(n, 0))) * wp / factorial(n);
    wp *= w;
  }
  return a;
}

}  // namespace

TEST_CASE("m = 1 transforms match the scalar formal-series oracles") {
  Rand r(20);
  for (double w : {1.0, 1.7}) {
    BaseSpace base({w});
    for (int rep = 0; rep < 10; ++rep) {
      const int n = 8;
      SymmetricSeries g(n);
      g.set(MultiIndex{}, 1.0);
      for (int k = 1; k <= n; ++k) g.set(MultiIndex(std::vector<int>(k, 0)), r.uniform(-1.0, 1.0));

      oracle::ScalarSeries gs = to_scalar(g, w);
      oracle::ScalarSeries log_ref = oracle::scalar_log(gs);
      oracle::ScalarSeries inv_ref = oracle::scalar_inverse(gs);
      oracle::ScalarSeries log_lib = to_scalar(log_series(g), w);
      oracle::ScalarSeries inv_lib = to_scalar(inverse_series(g), w);
      for (int k = 0; k <= n; ++k) {
        CHECK(std::abs(log_lib[k] - log_ref[k]) <= 1e-12);
        CHECK(std::abs(inv_lib[k] - inv_ref[k]) <= 1e-12);
      }

      SymmetricSeries k = log_series(g);
      oracle::ScalarSeries exp_ref = oracle::scalar_exp(to_scalar(k, w));
      oracle::ScalarSeries exp_lib = to_scalar(exp_series(k), w);
      for (int i = 0; i <= n; ++i) CHECK(std::abs(exp_lib[i] - exp_ref[i]) <= 1e-12);
    }
  }
}

TEST_CASE("exp and log are mutually inverse; the partition sums agree with composition") {
  Rand r(21);
  for (int rep = 0; rep < 10; ++rep) {
    int m = r.pick(1, 3);
    SymmetricSeries k = testutil::random_series(r, m, 4, 4, 0.8);
    k.set(MultiIndex{}, 0.0);
    SymmetricSeries g = exp_series(k);
    CHECK(testutil::max_entry_diff(log_series(g), k, 4) <= 1e-12);
    CHECK(testutil::max_entry_diff(exp_series_partitions(k), g, 4) <= 1e-12);

    SymmetricSeries back = exp_series(log_series(g));
    CHECK(testutil::max_entry_diff(back, g, 4) <= 1e-12);
  }

  // cumulant examples: G_{x} = K_x, G_{xy} = K_{xy} + K_x K_y
  SymmetricSeries k(2);
  k.set(MultiIndex{0}, 0.3);
  k.set(MultiIndex{1}, -0.2);
  k.set(MultiIndex{0, 1}, 0.5);
  SymmetricSeries g = exp_series(k);
  CHECK(g.at(MultiIndex{}) == doctest::Approx(1.0));
  CHECK(g.at(MultiIndex{0}) == doctest::Approx(0.3));
  CHECK(g.at(MultiIndex{0, 1}) == doctest::Approx(0.5 + 0.3 * -0.2));

  CHECK(exp_series(SymmetricSeries(4)) == SymmetricSeries::unit(4));
  CHECK_THROWS_AS(exp_series(SymmetricSeries::unit(3)), InvalidInput);
  CHECK_THROWS_AS(log_series(SymmetricSeries(3)), InvalidInput);
}

TEST_CASE("log partition sum carries the Moebius weights (-1)^(N-1) (N-1)!") {
  Rand r(22);
  SymmetricSeries g = testutil::random_series(r, 2, 4, 4, 0.7);
  g.set(MultiIndex{}, 1.0);
  SymmetricSeries k_lib = log_series(g);
  SymmetricSeries k_part = log_series_partitions(g);
  CHECK(testutil::max_entry_diff(k_lib, k_part, 4) <= 1e-12);

  // the weights themselves, read off from a one-point series
  SymmetricSeries h(4);
  h.set(MultiIndex{}, 1.0);
  h.set(MultiIndex{0}, 1.0);
  SymmetricSeries kh = log_series(h);
  // K_n = sum over partitions of n positions of mu_N; blocks all carry 1
  // K_1 = mu_1 = 1, K_2 = mu_1 + mu_2 = 1 - 1 = 0 is less direct; instead
  // check against ln(1 + w x) coefficients: n! a_n with a_n = (-1)^(n-1)/n
  for (int n = 1; n <= 4; ++n) {
    double expected = (n % 2 == 1 ? 1.0 : -1.0) * factorial(n - 1);
    CHECK(kh.at(MultiIndex(std::vector<int>(n, 0))) == doctest::Approx(expected).epsilon(1e-12));
  }
}

TEST_CASE("inverse series: unit, defining property, error case") {
  CHECK(inverse_series(SymmetricSeries::unit(4)) == SymmetricSeries::unit(4));
  CHECK_THROWS_AS(inverse_series(SymmetricSeries(4)), InvalidInput);

  Rand r(23);
  for (int rep = 0; rep < 10; ++rep) {
    int m = r.pick(1, 3);
    SymmetricSeries g = testutil::random_series(r, m, 4, 4, 0.6);
    g.set(MultiIndex{}, r.uniform(0.7, 1.5));
    SymmetricSeries inv = inverse_series(g);
    CHECK(testutil::max_entry_diff(wick_product(inv, g), SymmetricSeries::unit(4), 4) <= 1e-11);
  }
}

TEST_CASE("sum-integral lemma for p = 2 and 3") {
  Rand r(24);
  for (int rep = 0; rep < 30; ++rep) {
    int m = r.pick(1, 3);
    BaseSpace base = testutil::random_base(r, m);
    SymmetricSeries a = testutil::random_series(r, m, 6, 2);
    SymmetricSeries b = testutil::random_series(r, m, 6, 2);
    double lhs2 = guichardet_integral(a, base) * guichardet_integral(b, base);
    double rhs2 = guichardet_integral(wick_product(a, b), base);
    CHECK(std::abs(lhs2 - rhs2) <= 1e-12);

    SymmetricSeries c = testutil::random_series(r, m, 6, 2);
    double lhs3 = lhs2 * guichardet_integral(c, base);
    double rhs3 = guichardet_integral(wick_product(wick_product(a, b), c), base);
    CHECK(std::abs(lhs3 - rhs3) <= 1e-12);
  }
}

TEST_CASE("chain rule over position partitions, orders up to 4") {
  // Cubic h and a degree-2 series make both sides exact: the composed
  // series has no entries beyond order 6, all retained at truncation 10.
  Rand r(25);
  BaseSpace base = testutil::random_base(r, 2);
  SymmetricSeries f = testutil::random_series(r, 2, 10, 2, 0.5);
  f.set(MultiIndex{}, 0.0);
  std::vector<double> hc = {r.uniform(-1, 1), r.uniform(-1, 1), r.uniform(-1, 1), r.uniform(-1, 1)};
  SymmetricSeries h = compose(hc, f);
  Source j = testutil::random_source(r, 2, 0.4);
  double z = eval_generating(f, j, base) - f.at(MultiIndex{});

  auto h_deriv = [&](int k, double at) {
    double acc = 0.0;
    for (int n = k; n < static_cast<int>(hc.size()); ++n)
      acc += hc[static_cast<std::size_t>(n)] * std::pow(at, n - k) / factorial(n - k);
    return acc;
  };

  std::vector<MultiIndex> xs = {MultiIndex{0},       MultiIndex{0, 1},       MultiIndex{0, 0},
                                MultiIndex{0, 1, 1}, MultiIndex{0, 0, 1, 1}, MultiIndex{0, 1, 0, 1}};
  for (const auto& x : xs) {
    double lhs = eval_generating(testutil::derivative_multi(h, x), j, base);
    double rhs = 0.0;
    for_each_partition(x.order(), [&](const Partition& p) {
      double term = h_deriv(p.n_blocks(), z);
      for (const auto& block : p.blocks) {
        std::vector<int> pts;
        for (int pos : block) pts.push_back(x[pos]);
        term *= eval_generating(testutil::derivative_multi(f, MultiIndex(pts)), j, base);
      }
      rhs += term;
    });
    CHECK(std::abs(lhs - rhs) <= 1e-12);
  }
}

TEST_CASE("series JSON round trip is value-identical") {
  Rand r(26);
  SymmetricSeries s = testutil::random_series(r, 3, 4, 3);
  SymmetricSeries back = series_from_json_text(series_to_json(s));
  CHECK(back == s);
  CHECK(series_to_json(back) == series_to_json(s));

  CHECK_THROWS_AS(series_from_json_text("{\"entries\": []}"), InvalidInput);
  CHECK_THROWS_AS(series_from_json_text("not json"), InvalidInput);
  CHECK_THROWS_AS(series_from_json_text("{\"n_max\": 2, \"entries\": [{\"idx\": [1, 0], \"val\": 1}]}"),
                  InvalidInput);
}
