#include <cmath>

#include "doctest.h"
#include "gpsing/errors.hpp"
#include "gpsing/grid.hpp"

using namespace gpsing;

TEST_SUITE_BEGIN("grid");

TEST_CASE("build_grid node placement") {
  const GridPtr g1 = build_grid(1, 1.0, 3, 1.0);
  CHECK(g1->r[0] == 0.0);
  CHECK(g1->r[1] == doctest::Approx(0.5));
  CHECK(g1->r[2] == 1.0);

  const GridPtr g2 = build_grid(1, 1.0, 3, 2.0);
  CHECK(g2->r[1] == doctest::Approx(0.25));

  const GridPtr g3 = build_grid(3, 20.0, 4001, 2.0);
  CHECK(g3->r[1] == doctest::Approx(20.0 / (4000.0 * 4000.0)).epsilon(1e-12));
  CHECK(g3->surface_const == doctest::Approx(4.0 * M_PI));

  CHECK_THROWS_AS(build_grid(1, 1.0, 2, 1.0), BadGridSpec);
  CHECK_THROWS_AS(build_grid(1, -1.0, 10, 1.0), BadGridSpec);
  CHECK_THROWS_AS(build_grid(1, 1.0, 10, 0.5), BadGridSpec);
}

TEST_CASE("quadrature reproduces singular-weight analytic values") {
  // constant field, weight r^{N-1+gamma}: closed form rmax^{N+gamma}/(N+gamma)
  {
    const GridPtr g = build_grid(3, 1.0, 801, 2.0);
    const RadialField one = make_field(g, [](double) { return 1.0; });
    CHECK(integrate(one, -0.5) ==
          doctest::Approx(4.0 * M_PI / 2.5).epsilon(1e-10));
  }
  {
    const GridPtr g = build_grid(1, 1.0, 801, 2.0);
    const RadialField one = make_field(g, [](double) { return 1.0; });
    CHECK(integrate(one, -0.5) == doctest::Approx(4.0).epsilon(1e-10));
    CHECK(integrate(one, 0.0) == doctest::Approx(2.0).epsilon(1e-12));
    CHECK_THROWS_AS(integrate(one, -1.0), WeightNotIntegrable);
    CHECK_THROWS_AS(integrate(one, -1.5), WeightNotIntegrable);
  }
}

TEST_CASE("quadrature is exact for piecewise-linear fields at gamma = 0") {
  const GridPtr g = build_grid(2, 5.0, 41, 2.0);
  const RadialField f = make_field(g, [](double r) { return 3.0 - 0.4 * r; });
  // per-cell exact integral of (a + b r) r^{N-1}
  double exact = 0.0;
  for (std::size_t i = 0; i + 1 < g->nodes(); ++i) {
    const double ra = g->r[i], rb = g->r[i + 1];
    const double fa = f.values[i];
    const double slope = (f.values[i + 1] - fa) / (rb - ra);
    auto anti = [&](double r) {
      return (fa - slope * ra) * r * r / 2.0 + slope * r * r * r / 3.0;
    };
    exact += anti(rb) - anti(ra);
  }
  exact *= g->surface_const;
  CHECK(integrate(f, 0.0) == doctest::Approx(exact).epsilon(1e-14));
}

TEST_CASE("gaussian norms") {
  // uniform spacing: the trapezoid rule is superconvergent for even smooth
  // fields, which is what the 1e-8 truncation claim relies on
  const GridPtr g = build_grid(1, 20.0, 4001, 1.0);
  const RadialField u = make_field(g, [](double r) { return std::exp(-r * r); });
  CHECK(integrate(u, 0.0) == doctest::Approx(std::sqrt(M_PI)).epsilon(1e-9));
  CHECK(l2_norm_sq(u) == doctest::Approx(std::sqrt(M_PI / 2.0)).epsilon(1e-9));
  // int (u')^2 = sqrt(pi/2) for u = e^{-r^2} on the line; second-order
  // differences leave an O(h^2) bias
  CHECK(h1_seminorm_sq(u) == doctest::Approx(std::sqrt(M_PI / 2.0)).epsilon(1e-4));

  const GridPtr gg = build_grid(1, 20.0, 4001, 2.0);
  const RadialField ug = make_field(gg, [](double r) { return std::exp(-2.0 * r * r); });
  CHECK(integrate(ug, 0.0) == doctest::Approx(std::sqrt(M_PI / 2.0)).epsilon(2e-6));

  const RadialField z = zero_field(g);
  CHECK(l2_norm_sq(z) == 0.0);
  CHECK(h1_seminorm_sq(z) == 0.0);
}

TEST_CASE("quadrature converges at second order under refinement") {
  auto err = [](std::size_t nodes) {
    const GridPtr g = build_grid(1, 10.0, nodes, 2.0);
    const RadialField u = make_field(g, [](double r) { return std::exp(-r * r); });
    return std::abs(integrate(u, 0.0) - std::sqrt(M_PI));
  };
  const double e1 = err(101);
  const double e2 = err(201);
  CHECK(e2 * 4.0 <= e1 * 1.05);  // at least ~4x smaller after doubling
}

TEST_CASE("rescale preserves mass and composes") {
  const GridPtr g = build_grid(1, 20.0, 3001, 2.0);
  // narrow profile so eps = 0.1 keeps the support inside rmax
  const RadialField u =
      make_field(g, [](double r) { return std::exp(-8.0 * r * r); });
  const double base = l2_norm_sq(u);

  CHECK(sup_distance(rescale(u, 1.0), u) == doctest::Approx(0.0).epsilon(1e-14));
  for (double eps : {0.1, 0.3, 0.7, 1.0}) {
    CHECK(l2_norm_sq(rescale(u, eps)) == doctest::Approx(base).epsilon(1e-6));
  }
  // composition against direct evaluation of the doubly-scaled field
  const RadialField two_step = rescale(rescale(u, 0.8), 0.5);
  const RadialField direct = rescale(u, 0.4);
  CHECK(sup_distance(two_step, direct) < 1e-8);
  // positivity survives
  for (double v : rescale(u, 0.35).values) CHECK(v >= 0.0);
}

TEST_CASE("sup distance demands a shared grid") {
  const GridPtr g = build_grid(1, 10.0, 101, 2.0);
  const GridPtr h = build_grid(1, 10.0, 102, 2.0);
  const RadialField a = make_field(g, [](double) { return 1.0; });
  const RadialField b = zero_field(g);
  CHECK(sup_distance(a, b) == doctest::Approx(1.0));
  CHECK(sup_distance(a, a) == 0.0);
  CHECK_THROWS_AS(sup_distance(a, zero_field(h)), GridMismatch);
}

TEST_CASE("derivative is second order on a graded grid") {
  const GridPtr g = build_grid(1, 5.0, 2001, 2.0);
  const RadialField u = make_field(g, [](double r) { return std::sin(r); });
  const auto d = derivative(u);
  double worst = 0.0;
  for (std::size_t i = 1; i < g->nodes() - 1; ++i)
    worst = std::max(worst, std::abs(d[i] - std::cos(g->r[i])));
  CHECK(worst < 2e-5);
}

TEST_CASE("field serialization round trip") {
  const GridPtr g = build_grid(2, 8.0, 101, 2.0);
  const RadialField u = make_field(g, [](double r) { return std::exp(-r); });
  const RadialField back = field_from_json_string(field_to_json_string(u));
  CHECK(back.grid->N == 2);
  CHECK(back.grid->nodes() == 101);
  CHECK(sup_distance(u, back) == 0.0);
}

TEST_SUITE_END();

TEST_SUITE_BEGIN("grid");

TEST_CASE("singular-weight quadrature against the gamma function") {
  // int_0^inf e^{-r} r^{N-1-b} dr = Gamma(N - b)
  const GridPtr g2 = build_grid(2, 40.0, 8001, 2.0);
  const RadialField e2 = make_field(g2, [](double r) { return std::exp(-r); });
  CHECK(integrate(e2, -0.8) ==
        doctest::Approx(2.0 * M_PI * std::tgamma(1.2)).epsilon(1e-5));
  const GridPtr g3 = build_grid(3, 40.0, 8001, 2.0);
  const RadialField e3 = make_field(g3, [](double r) { return std::exp(-r); });
  CHECK(integrate(e3, -0.5) ==
        doctest::Approx(4.0 * M_PI * std::tgamma(2.5)).epsilon(1e-5));
  CHECK(integrate(e3, -1.5) ==
        doctest::Approx(4.0 * M_PI * std::tgamma(1.5)).epsilon(1e-5));
}

TEST_CASE("strongly singular weights integrate exactly for constants") {
  const GridPtr g = build_grid(2, 1.0, 801, 2.0);
  const RadialField one = make_field(g, [](double) { return 1.0; });
  // weight r^{N-1+gamma} = r^{-0.5}: integral 2 pi / 0.5
  CHECK(integrate(one, -1.5) == doctest::Approx(2.0 * M_PI / 0.5).epsilon(1e-10));
  CHECK_THROWS_AS(integrate(one, -2.0), WeightNotIntegrable);
  // positive shifts work too: weight r^{N-1+2}
  CHECK(integrate(one, 2.0) == doctest::Approx(2.0 * M_PI / 4.0).epsilon(1e-10));
}

TEST_SUITE_END();
