#include <cmath>

#include "doctest.h"
#include "gpsing/errors.hpp"
#include "gpsing/sweep.hpp"

using namespace gpsing;

TEST_SUITE_BEGIN("sweep");

namespace {

const GroundStateW& case_a_profile() {
  static const GroundStateW w = solve_w_shooting(
      validate_params(1, 2.0, 0.5, 1.0), build_grid(1, 20.0, 8001, 2.0));
  return w;
}

}  // namespace

TEST_CASE("decay fit recovers exact exponential rates") {
  const GridPtr g = build_grid(1, 20.0, 2001, 2.0);
  const RadialField e1 = make_field(g, [](double r) { return std::exp(-r); });
  const DecayFit f1 = decay_fit(e1, {8.0, 14.0});
  CHECK(f1.rate == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(f1.quality >= 0.999999);
  CHECK(f1.theta == doctest::Approx(1.0 - 1e-6));

  const RadialField e2 =
      make_field(g, [](double r) { return std::exp(-0.5 * r); });
  const DecayFit f2 = decay_fit(e2, {8.0, 14.0});
  CHECK(f2.rate == doctest::Approx(0.5).epsilon(1e-6));
  CHECK(f2.theta == doctest::Approx(0.25).epsilon(1e-6));

  const RadialField neg = make_field(g, [](double r) { return 1.0 - r; });
  CHECK_THROWS_AS(decay_fit(neg, {8.0, 14.0}), NonpositiveTail);
  CHECK_THROWS_AS(decay_fit(e1, {14.0, 8.0}), UsageError);
}

TEST_CASE("trap-free sweep is pinned by the exact scaling law") {
  const GroundStateW& w = case_a_profile();
  const ProblemParams q = validate_params(1, 2.0, 0.5, 1.0);
  const GridPtr g = build_grid(1, 20.0, 4001, 2.0);
  FlowConfig fc;
  const ScalingReport rep =
      run_sweep(q, PotentialSpec::zero(), {1.0, 10.0, 100.0}, g, fc, w);

  REQUIRE(rep.rows.size() == 3);
  for (const auto& row : rep.rows) {
    CAPTURE(row.M);
    CHECK(row.converged);
    CHECK(row.error.empty());
    CHECK(row.ratio < 0.0);
    CHECK(std::abs(row.ratio + rep.lambda0) <= 1e-3 * rep.lambda0);
    CHECK(row.trap_mass == 0.0);
    CHECK(row.eps == epsilon_of(q.with_M(row.M), w.a_star));
    CHECK(row.sup_dist <= 5e-3 * sup_norm(rep.wbar));
    CHECK(row.sandwich_ok);
  }
  // the rescaled gradient mass is constant for the exactly-scaling family
  const double g0 = rep.rows[0].grad_sq;
  for (const auto& row : rep.rows)
    CHECK(std::abs(row.grad_sq - g0) <= 1e-3 * g0);

  const UniformBounds ub = uniform_bounds_check(rep);
  CHECK(ub.all_positive);
  CHECK(ub.ratio_limit == doctest::Approx(2.0));
  CHECK(std::abs(ub.ratio_final - ub.ratio_limit) <= 0.02 * ub.ratio_limit);
}

TEST_CASE("trapped sweep rows carry the concentration diagnostics") {
  const GroundStateW& w = case_a_profile();
  const ProblemParams q = validate_params(1, 2.0, 0.5, 1.0);
  const GridPtr g = build_grid(1, 20.0, 2001, 2.0);
  FlowConfig fc;
  const ScalingReport rep =
      run_sweep(q, PotentialSpec::power(1.0, 2.0), {10.0, 100.0}, g, fc, w);

  REQUIRE(rep.rows.size() == 2);
  for (const auto& row : rep.rows) {
    CHECK(row.converged);
    CHECK(row.ratio < 0.0);
    CHECK(row.mu < 0.0);
    CHECK(row.sandwich_ok);
    CHECK(row.decay_quality >= 0.99);
  }
  CHECK(rep.rows[1].trap_mass < rep.rows[0].trap_mass);
  CHECK(rep.rows[1].sup_dist < rep.rows[0].sup_dist);
  CHECK(std::abs(rep.rows[1].mu_eps2 + 1.0) <
        std::abs(rep.rows[0].mu_eps2 + 1.0));

  const auto conv = profile_convergence(rep, w);
  REQUIRE(conv.size() == 2);
  CHECK(conv[1].first < conv[0].first);
  CHECK(conv[1].second < conv[0].second);
  CHECK(conv[0].first == doctest::Approx(rep.rows[0].sup_dist));
}

TEST_CASE("concentration holds in two dimensions as well") {
  const ProblemParams q = validate_params(2, 1.5, 0.8, 1.0);
  const GroundStateW w = solve_w_shooting(q, build_grid(2, 20.0, 8001, 2.0));
  const GridPtr g = build_grid(2, 20.0, 2001, 2.0);
  FlowConfig fc;
  const ScalingReport rep =
      run_sweep(q, PotentialSpec::power(1.0, 2.0), {100.0, 10000.0}, g, fc, w);
  REQUIRE(rep.rows.size() == 2);
  for (const auto& row : rep.rows) {
    CHECK(row.converged);
    CHECK(row.sandwich_ok);
    CHECK(row.mu < 0.0);
  }
  CHECK(rep.rows[1].trap_mass < rep.rows[0].trap_mass);
  CHECK(rep.rows[1].sup_dist < rep.rows[0].sup_dist);
  CHECK(std::abs(rep.rows[1].mu_eps2 + 1.0) <
        std::abs(rep.rows[0].mu_eps2 + 1.0));
  CHECK(std::abs(rep.rows[1].ratio + rep.lambda0) <
        std::abs(rep.rows[0].ratio + rep.lambda0));
  const UniformBounds ub = uniform_bounds_check(rep);
  CHECK(ub.ratio_limit == doctest::Approx(4.0 / 2.6));
  CHECK(std::abs(ub.ratio_final - ub.ratio_limit) <= 0.02 * ub.ratio_limit);
}

TEST_CASE("failed rows are reported rather than dropped") {
  const GroundStateW& w = case_a_profile();
  const ProblemParams q = validate_params(1, 2.0, 0.5, 1.0);
  const GridPtr g = build_grid(1, 20.0, 1001, 2.0);
  FlowConfig fc;
  fc.max_iters = 40;
  fc.tol_residual = 1e-30;  // unattainable
  const ScalingReport rep =
      run_sweep(q, PotentialSpec::power(1.0, 2.0), {10.0}, g, fc, w);
  REQUIRE(rep.rows.size() == 1);
  CHECK_FALSE(rep.rows[0].converged);
  CHECK_FALSE(rep.rows[0].error.empty());
  CHECK(profile_convergence(rep, w).empty());
}

TEST_CASE("sweep input validation") {
  const GroundStateW& w = case_a_profile();
  const ProblemParams q = validate_params(1, 2.0, 0.5, 1.0);
  const GridPtr g = build_grid(1, 20.0, 1001, 2.0);
  FlowConfig fc;
  CHECK_THROWS_AS(
      run_sweep(q, PotentialSpec::zero(), {10.0, 10.0}, g, fc, w), UsageError);
  CHECK_THROWS_AS(run_sweep(q, PotentialSpec::zero(), {}, g, fc, w), UsageError);
  CHECK_THROWS_AS(
      run_sweep(q, PotentialSpec::zero(), {100.0, 10.0}, g, fc, w), UsageError);
  GroundStateW empty;
  CHECK_THROWS_AS(run_sweep(q, PotentialSpec::zero(), {10.0}, g, fc, empty),
                  ProfileMissing);
}

TEST_SUITE_END();
