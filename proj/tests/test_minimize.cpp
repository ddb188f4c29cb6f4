#include <cmath>

#include "doctest.h"
#include "gpsing/errors.hpp"
#include "gpsing/minimize.hpp"
#include "gpsing/profile.hpp"

using namespace gpsing;

TEST_SUITE_BEGIN("minimize");

namespace {

const GroundStateW& case_a_profile() {
  static const GroundStateW w = solve_w_shooting(
      validate_params(1, 2.0, 0.5, 1.0), build_grid(1, 20.0, 4001, 2.0));
  return w;
}

}  // namespace

TEST_CASE("weak interaction recovers the harmonic ground energy") {
  const ProblemParams q = validate_params(1, 2.0, 0.5, 1e-4);
  const GridPtr g = build_grid(1, 20.0, 4001, 2.0);
  FlowConfig fc;
  fc.init = FlowInit::gaussian;
  const MinimizerResult r = gfdn_minimize(q, PotentialSpec::power(1.0, 2.0), g, fc);
  CHECK(r.converged);
  CHECK(r.energy.total == doctest::Approx(1.0).epsilon(5e-2));

  // flow invariants: exact constraint, positivity, monotone energy record
  CHECK(std::abs(l2_norm_sq(r.u) - 1.0) <= 1e-12);
  for (double v : r.u.values) CHECK(v >= 0.0);
  for (std::size_t i = 0; i + 1 < r.energy_history.size(); ++i) {
    const double slack = 1e-12 * std::max(1.0, std::abs(r.energy_history[i]));
    CHECK(r.energy_history[i + 1] <= r.energy_history[i] + slack);
  }
}

TEST_CASE("trap-free minimization matches the closed-form energy law") {
  const GroundStateW& w = case_a_profile();
  const ProblemParams q = validate_params(1, 2.0, 0.5, 10.0);
  FlowConfig fc;
  fc.init = FlowInit::scaled_w;
  const MinimizerResult r =
      gfdn_minimize(q, PotentialSpec::zero(), w.profile.grid, fc, &w);
  CHECK(r.converged);
  const double closed = tilde_I_closed(q, w.a_star);
  CHECK(std::abs(r.energy.total - closed) / std::abs(closed) < 1e-3);
  // frozen from a fine-resolution flow minimization of the same problem
  CHECK(r.energy.total == doctest::Approx(-5.09871).epsilon(1e-4));

  // multiplier identity, Rayleigh cross-check, closed form
  CHECK(lagrange_multiplier(r, q) == r.mu);
  CHECK(std::abs(r.mu - r.mu_rayleigh) <= 1e-3 * std::max(1.0, std::abs(r.mu)));
  CHECK(r.mu < 0.0);
  const double eps = epsilon_of(q, w.a_star);
  CHECK(eps * eps * r.mu == doctest::Approx(-1.0).epsilon(1e-3));
}

TEST_CASE("trap-free multiplier at M = 1 matches its closed form") {
  const GroundStateW& w = case_a_profile();
  const ProblemParams q = validate_params(1, 2.0, 0.5, 1.0);
  FlowConfig fc;
  fc.init = FlowInit::scaled_w;
  const MinimizerResult r =
      gfdn_minimize(q, PotentialSpec::zero(), w.profile.grid, fc, &w);
  CHECK(r.converged);
  CHECK(std::abs(r.mu - tilde_mu1_closed(q, w.a_star)) /
            std::abs(tilde_mu1_closed(q, w.a_star)) <
        1e-3);
  CHECK(r.mu * w.a_star == doctest::Approx(-1.0).epsilon(1e-3));
}

TEST_CASE("evaluate_E bookkeeping identity and closed-form spot checks") {
  const GroundStateW& w = case_a_profile();
  const GridPtr g = w.profile.grid;
  const ProblemParams q = validate_params(1, 2.0, 0.5, 10.0);
  const PotentialSpec trap = PotentialSpec::power(1.0, 2.0);

  // the predicted trap-free minimizer shape at strength M
  auto predicted = [&](double M) {
    const ProblemParams qM = q.with_M(M);
    RadialField u = rescale(w.profile, tilde_alpha_of(qM, w.a_star));
    const double inv = 1.0 / std::sqrt(l2_norm_sq(u));
    for (double& v : u.values) v *= inv;
    return u;
  };

  const RadialField u10 = predicted(10.0);
  const EnergyParts e = evaluate_E(u10, q, trap);
  const double s = std::pow(q.M, 0.5 * (q.p - 1.0));
  CHECK(e.total == doctest::Approx(e.kinetic + e.trap -
                                   2.0 * s / (q.p + 1.0) * e.interaction)
                       .epsilon(1e-12));

  // with V = 0 the predicted shape reproduces the closed-form energy
  const EnergyParts e0 = evaluate_E(u10, q, PotentialSpec::zero());
  CHECK(e0.trap == 0.0);
  CHECK(e0.total ==
        doctest::Approx(tilde_I_closed(q, w.a_star)).epsilon(1e-3));

  // the trap mass of the concentrating shape decays with M
  const EnergyParts e100 =
      evaluate_E(predicted(100.0), q.with_M(100.0), trap);
  CHECK(e100.trap < e.trap);
  CHECK(e.trap < evaluate_E(predicted(1.0), q.with_M(1.0), trap).trap);
}

TEST_CASE("cut-off test function bounds the minimum from above") {
  const GroundStateW& w = case_a_profile();
  const GridPtr g = w.profile.grid;
  const PotentialSpec trap = PotentialSpec::power(1.0, 2.0);
  const ProblemParams q = validate_params(1, 2.0, 0.5, 100.0);

  FlowConfig fc;
  fc.init = FlowInit::scaled_w;
  fc.dt = std::min(fc.dt, 0.2 * std::pow(epsilon_of(q, w.a_star), 2.0));
  const MinimizerResult r = gfdn_minimize(q, trap, g, fc, &w);
  const TestFunctionEnergy tf =
      test_function_energy(q, trap, g, tilde_alpha_of(q, w.a_star), w);

  CHECK(tf.a_tau >= 1.0);
  // the discrete minimization property holds in the flow's own energy
  CHECK(flow_energy(r.u, q, trap) <=
        flow_energy(tf.u, q, trap) + 1e-8 * std::abs(tf.energy));

  // normalization excess is exponentially small once tau is large
  for (double tau : {15.0, 20.0}) {
    const TestFunctionEnergy t = test_function_energy(q, trap, g, tau, w);
    CHECK(t.a_tau >= 1.0);
    CHECK(t.a_tau <= 1.0 + 1e-6);
  }

  // the upper bound tightens toward the trap-free law as M grows
  const ProblemParams qbig = q.with_M(10000.0);
  const TestFunctionEnergy tbig = test_function_energy(
      qbig, trap, g, tilde_alpha_of(qbig, w.a_star), w);
  const double ratio_small = tf.energy / tilde_I_closed(q, w.a_star);
  const double ratio_big = tbig.energy / tilde_I_closed(qbig, w.a_star);
  CHECK(std::abs(ratio_big - 1.0) < std::abs(ratio_small - 1.0));
  CHECK(std::abs(ratio_big - 1.0) < 1e-4);
}

TEST_CASE("the minimum does not depend on the starting point") {
  const GroundStateW& w = case_a_profile();
  const ProblemParams q = validate_params(1, 2.0, 0.5, 100.0);
  const GridPtr g = w.profile.grid;
  const PotentialSpec trap = PotentialSpec::power(1.0, 2.0);
  const double dt = std::min(2e-3, 0.2 * std::pow(epsilon_of(q, w.a_star), 2.0));

  FlowConfig hinted;
  hinted.init = FlowInit::scaled_w;
  hinted.dt = dt;
  const MinimizerResult a = gfdn_minimize(q, trap, g, hinted, &w);

  FlowConfig cold;
  cold.init = FlowInit::gaussian;
  cold.dt = dt;
  const MinimizerResult c = gfdn_minimize(q, trap, g, cold);

  CHECK(a.converged);
  CHECK(c.converged);
  CHECK(std::abs(a.energy.total - c.energy.total) <
        1e-8 * std::abs(a.energy.total));
  CHECK(sup_distance(a.u, c.u) < 1e-5);
}

TEST_CASE("flow reports a flagged partial result at the iteration cap") {
  const ProblemParams q = validate_params(1, 2.0, 0.5, 1.0);
  const GridPtr g = build_grid(1, 20.0, 801, 2.0);
  FlowConfig fc;
  fc.init = FlowInit::gaussian;
  fc.max_iters = 3;
  const MinimizerResult r = gfdn_minimize(q, PotentialSpec::zero(), g, fc);
  CHECK_FALSE(r.converged);
  CHECK(r.iters == 3);
  CHECK(all_finite(r.u));
}

TEST_CASE("flow config validation") {
  const ProblemParams q = validate_params(1, 2.0, 0.5, 1.0);
  const GridPtr g = build_grid(1, 10.0, 101, 2.0);
  FlowConfig fc;
  fc.dt = 0.0;
  CHECK_THROWS_AS(gfdn_minimize(q, PotentialSpec::zero(), g, fc), UsageError);
  fc = FlowConfig{};
  fc.max_iters = 0;
  CHECK_THROWS_AS(gfdn_minimize(q, PotentialSpec::zero(), g, fc), UsageError);
}

TEST_CASE("custom initial profile is accepted") {
  const ProblemParams q = validate_params(1, 2.0, 0.5, 1e-4);
  const GridPtr g = build_grid(1, 20.0, 2001, 2.0);
  FlowConfig fc;
  fc.init = FlowInit::profile;
  fc.init_profile =
      make_field(g, [](double r) { return std::exp(-0.4 * r * r); });
  const MinimizerResult r = gfdn_minimize(q, PotentialSpec::power(1.0, 2.0), g, fc);
  CHECK(r.converged);
  CHECK(r.energy.total == doctest::Approx(1.0).epsilon(5e-2));
}

TEST_CASE("test function requires a computed profile") {
  const GridPtr g = build_grid(1, 20.0, 801, 2.0);
  const ProblemParams q = validate_params(1, 2.0, 0.5, 10.0);
  GroundStateW empty;
  CHECK_THROWS_AS(
      test_function_energy(q, PotentialSpec::zero(), g, 10.0, empty),
      ProfileMissing);
}

TEST_SUITE_END();
