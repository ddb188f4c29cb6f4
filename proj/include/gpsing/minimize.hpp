#pragma once

#include <optional>
#include <vector>

#include "gpsing/grid.hpp"
#include "gpsing/problem.hpp"

namespace gpsing {

struct GroundStateW;  // profile.hpp

enum class FlowInit { gaussian, profile, scaled_w };

/// Controls for the normalized gradient flow.
///
/// dt is both the starting step and the adaptive cap; steps shrink on an
/// energy increase and grow again (1.1x) on success. Stopping requires both
/// energy stagnation below tol_energy (relative) and a scaled discrete
/// Euler-Lagrange residual below tol_residual.
struct FlowConfig {
  double dt = 2e-3;
  int max_iters = 400000;
  double tol_energy = 1e-10;
  double tol_residual = 1e-6;
  FlowInit init = FlowInit::scaled_w;
  double gaussian_width = 1.0;
  std::optional<RadialField> init_profile;
};

struct EnergyParts {
  double kinetic = 0.0;      ///< |grad u|_2^2
  double trap = 0.0;         ///< int V u^2
  double interaction = 0.0;  ///< int u^{p+1} r^{-b}, without the prefactor
  double total = 0.0;        ///< kinetic + trap - (2 M^{(p-1)/2}/(p+1)) interaction
};

EnergyParts evaluate_E(const RadialField& u, const ProblemParams& params,
                       const PotentialSpec& potential);

struct MinimizerResult {
  RadialField u;                       ///< normalized minimizer candidate
  EnergyParts energy;
  double mu = 0.0;                     ///< multiplier via the energy identity
  double mu_rayleigh = 0.0;            ///< operator Rayleigh quotient cross-check
  int iters = 0;
  double el_residual = 0.0;            ///< quadrature-weighted, scaled by max(1,|mu|)
  bool converged = false;              ///< false when max_iters was hit
  std::vector<double> energy_history;  ///< discrete flow energy per accepted step
};

/// Backward-Euler normalized gradient flow with a lagged nonlinear
/// coefficient; every accepted step renormalizes to ||u||_2^2 = 1 exactly.
/// The fixed point solves the discrete Euler-Lagrange equation, so the
/// residual stop is attainable independent of dt.
///
/// w_hint enables the scaled_w initialization (the predicted minimizer
/// shape); without it the flow falls back to a Gaussian start.
MinimizerResult gfdn_minimize(const ProblemParams& params,
                              const PotentialSpec& potential, const GridPtr& grid,
                              const FlowConfig& config = {},
                              const GroundStateW* w_hint = nullptr);

/// mu = E_M(u) - ((p-1)/(p+1)) M^{(p-1)/2} int u^{p+1} r^{-b}.
double lagrange_multiplier(const MinimizerResult& result, const ProblemParams& params);

struct TestFunctionEnergy {
  double energy = 0.0;  ///< E_M(u_tau), an upper bound for I(M)
  double a_tau = 1.0;   ///< cut-off normalization constant, >= 1
  double tau = 0.0;
  RadialField u;        ///< the normalized test function itself
};

/// Discrete energy the flow actually minimizes (flux-form kinetic term,
/// lumped cells, cell-averaged singular weight). Sandwich comparisons use
/// this so that all three sides share one discretization.
double flow_energy(const RadialField& u, const ProblemParams& params,
                   const PotentialSpec& potential);

/// Energy of the cut-off test function u_tau(x) = A_tau tau^{N/2} w(tau x)
/// phi(x) / ||w||_2 with phi == 1 on r <= 1 and phi == 0 on r >= 2.
TestFunctionEnergy test_function_energy(const ProblemParams& params,
                                        const PotentialSpec& potential,
                                        const GridPtr& grid, double tau,
                                        const GroundStateW& w);

}  // namespace gpsing
