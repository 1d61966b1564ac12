#include <doctest.h>

#include <cmath>

#include "fieldcalc/trees.hpp"
#include "test_util.hpp"

using namespace fieldcalc;
using testutil::Rand;

namespace {

ModelSpec cubic_model(int m, double lambda, Rand& r) {
  ModelSpec spec;
  spec.base = testutil::random_base(r, m);
  spec.metric = Metric::make(testutil::random_spd(r, m), spec.base);
  SymmetricSeries v(3);
  for_each_multi_index_of_order(m, 3, [&](const MultiIndex& x) { v.set(x, r.uniform(-1.0, 1.0)); });
  spec.interaction.v = v;
  spec.interaction.coupling = lambda;
  spec.n_max = 3;
  spec.n_max_moments = 4;
  return spec;
}

}  // namespace

TEST_CASE("lower_source: identity metric, zero source, matrix oracle") {
  BaseSpace b = BaseSpace::uniform(3);
  Metric id = Metric::identity(b);
  Source j = {0.5, -0.25, 1.5};
  CHECK(lower_source(id, b, j) == j);
  CHECK(lower_source(id, b, Source(3, 0.0)) == ClassicalField(3, 0.0));

  Rand r(51);
  BaseSpace base = testutil::random_base(r, 3);
  Metric g = Metric::make(testutil::random_spd(r, 3), base);
  Source s = testutil::random_source(r, 3);
  ClassicalField low = lower_source(g, base, s);
  for (int x = 0; x < 3; ++x) {
    double expect = 0.0;
    for (int y = 0; y < 3; ++y) expect += base.weight(y) * g(x, y) * s[y];
    CHECK(low[x] == doctest::Approx(expect).epsilon(1e-14));
  }
}

TEST_CASE("picard: free model converges immediately, zero source fixes the origin") {
  Rand r(52);
  ModelSpec model = cubic_model(2, 0.0, r);
  model.interaction.v = SymmetricSeries(0);
  Source j = testutil::random_source(r, 2);
  PicardResult res = picard_solve(model, j);
  CHECK(res.iterations == 1);
  CHECK(res.psi == lower_source(model.metric, model.base, j));

  ModelSpec cubic = cubic_model(2, 0.05, r);
  PicardResult zero = picard_solve(cubic, Source(2, 0.0));
  CHECK(zero.residual <= 1e-12);
  for (double v : zero.psi) CHECK(v == 0.0);
}

TEST_CASE("picard matches the scalar closed form on a cubic m = 1 model") {
  // psi = j_low + a psi^2 with a = g w lambda v3 / 2
  double g0 = 1.3, w0 = 0.9, lambda = 0.04, v3 = 0.8, j0 = 0.6;
  ModelSpec model;
  model.base = BaseSpace({w0});
  model.metric = Metric::make({g0}, model.base);
  SymmetricSeries v(3);
  v.set(MultiIndex{0, 0, 0}, v3);
  model.interaction.v = v;
  model.interaction.coupling = lambda;
  model.n_max = 3;
  model.n_max_moments = 4;

  double j_low = w0 * g0 * j0;
  double a = w0 * g0 * lambda * v3 * w0 * w0 / 2.0;
  double psi_exact = (1.0 - std::sqrt(1.0 - 4.0 * a * j_low)) / (2.0 * a);
  PicardResult res = picard_solve(model, {j0}, 1e-14, 500);
  CHECK(res.psi[0] == doctest::Approx(psi_exact).epsilon(1e-12));

  // strong coupling has no nearby fixed point: the iteration must report
  ModelSpec diverging = model;
  diverging.interaction.coupling = 50.0;
  CHECK_THROWS_AS(picard_solve(diverging, {j0}, 1e-14, 60), NumericError);
}

TEST_CASE("tree expansion: single leaf is the lowered source, layers converge to picard") {
  Rand r(53);
  ModelSpec model = cubic_model(2, 0.05, r);
  Source j = testutil::random_source(r, 2, 0.5);

  ClassicalField one = tree_expand(model, j, 1);
  ClassicalField low = lower_source(model.metric, model.base, j);
  for (int x = 0; x < 2; ++x) CHECK(one[x] == doctest::Approx(low[x]).epsilon(1e-14));

  PicardResult fixed = picard_solve(model, j, 1e-14, 500);
  double prev = 1e9;
  for (int leaves : {2, 3, 4, 5}) {
    ClassicalField t = tree_expand(model, j, leaves);
    double err = 0.0;
    for (int x = 0; x < 2; ++x) err = std::max(err, std::abs(t[x] - fixed.psi[x]));
    CHECK(err < prev);
    prev = err;
  }
  CHECK(prev < 1e-5);
}

TEST_CASE("tree expansion rejects low-order vertices and ignores zero ones") {
  Rand r(54);
  ModelSpec model = cubic_model(2, 0.05, r);
  Source j = testutil::random_source(r, 2, 0.5);
  ClassicalField base_result = tree_expand(model, j, 3);

  // a vertex with zero coefficient changes nothing
  ModelSpec padded = model;
  SymmetricSeries v = padded.interaction.v;
  SymmetricSeries v4(4);
  for (const auto& [idx, val] : v.entries()) v4.set(idx, val);
  v4.set(MultiIndex{0, 0, 1, 1}, 0.0);  // no-op entry
  padded.interaction.v = v4;
  ClassicalField padded_result = tree_expand(padded, j, 3);
  for (int x = 0; x < 2; ++x) CHECK(padded_result[x] == base_result[x]);

  ModelSpec quad = model;
  SymmetricSeries v2(2);
  v2.set(MultiIndex{0, 1}, 0.3);
  quad.interaction.v = v2;
  CHECK_THROWS_AS(tree_expand(quad, j, 3), InvalidInput);
  CHECK_THROWS_AS(tree_expand(model, j, 0), InvalidInput);
  CHECK_THROWS_AS(tree_expand(model, j, 10), SizeLimitError);
}

TEST_CASE("taylor layers of the picard solution match the tree layers") {
  // five-point divided differences at t in {0, +-h, +-2h}, h = 1e-2
  Rand r(55);
  for (int m : {1, 2}) {
    ModelSpec model = cubic_model(m, 0.05, r);
    Source j = testutil::random_source(r, m, 0.4);
    const double h = 1e-2;

    auto psi_at = [&](double t) {
      Source tj(j);
      for (auto& v : tj) v *= t;
      return picard_solve(model, tj, 1e-15, 2000).psi;
    };
    ClassicalField p0 = psi_at(0.0), p1 = psi_at(h), p_1 = psi_at(-h), p2 = psi_at(2 * h), p_2 = psi_at(-2 * h);

    for (int n = 1; n <= 4; ++n) {
      ClassicalField layer = tree_expand(model, j, n);
      if (n > 1) {
        ClassicalField lower = tree_expand(model, j, n - 1);
        for (int x = 0; x < m; ++x) layer[x] -= lower[x];
      }
      for (int x = 0; x < m; ++x) {
        double dn = 0.0;
        switch (n) {
          case 1: dn = (-p2[x] + 8 * p1[x] - 8 * p_1[x] + p_2[x]) / (12 * h); break;
          case 2: dn = (-p2[x] + 16 * p1[x] - 30 * p0[x] + 16 * p_1[x] - p_2[x]) / (12 * h * h); break;
          case 3: dn = (p2[x] - 2 * p1[x] + 2 * p_1[x] - p_2[x]) / (2 * h * h * h); break;
          case 4: dn = (p2[x] - 4 * p1[x] + 6 * p0[x] - 4 * p_1[x] + p_2[x]) / (h * h * h * h); break;
        }
        CHECK(std::abs(dn / factorial(n) - layer[x]) <= 1e-8);
      }
    }
  }
}

TEST_CASE("stationary log Z: free limits and residual") {
  Rand r(56);
  ModelSpec model = cubic_model(2, 0.0, r);
  model.interaction.v = SymmetricSeries(0);

  StationaryLogZ at_zero = stationary_log_z(model, Source(2, 0.0));
  CHECK(at_zero.log_z == doctest::Approx(0.0).epsilon(1e-14));

  // V = 0: log Z = 1/2 j W g W j
  Source j = testutil::random_source(r, 2, 0.7);
  double quad = 0.0;
  for (int x = 0; x < 2; ++x)
    for (int y = 0; y < 2; ++y)
      quad += model.base.weight(x) * j[x] * model.metric(x, y) * model.base.weight(y) * j[y];
  StationaryLogZ free = stationary_log_z(model, j);
  CHECK(free.log_z == doctest::Approx(0.5 * quad).epsilon(1e-12));
  CHECK(free.stationarity_residual <= 1e-10);

  ModelSpec cubic = cubic_model(2, 0.05, r);
  StationaryLogZ interacting = stationary_log_z(cubic, j);
  CHECK(interacting.stationarity_residual <= 1e-10);
}

TEST_CASE("hierarchy weights are symmetric under child reordering") {
  Rand r(57);
  ModelSpec model = cubic_model(2, 0.05, r);
  Source j = testutil::random_source(r, 2, 0.5);
  ClassicalField j_low = lower_source(model.metric, model.base, j);

  // ((0,1),2) with children in both orders
  Hierarchy::Node leaf0{{0}, {}}, leaf1{{1}, {}}, leaf2{{2}, {}};
  Hierarchy::Node inner{{0, 1}, {leaf0, leaf1}};
  Hierarchy::Node root_a{{0, 1, 2}, {inner, leaf2}};
  Hierarchy::Node root_b{{0, 1, 2}, {leaf2, inner}};
  ClassicalField wa = hierarchy_weight_vector(model, j_low, root_a);
  ClassicalField wb = hierarchy_weight_vector(model, j_low, root_b);
  for (int x = 0; x < 2; ++x) CHECK(wa[x] == doctest::Approx(wb[x]).epsilon(1e-14));
}
