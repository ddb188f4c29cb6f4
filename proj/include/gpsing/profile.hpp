#pragma once

#include <array>
#include <string>
#include <utility>

#include "gpsing/grid.hpp"
#include "gpsing/minimize.hpp"
#include "gpsing/problem.hpp"

namespace gpsing {

/// Computed positive radial profile w of -Lap w + w = w^p r^{-b}, with its
/// mass a* = ||w||_2^2, Pohozaev residuals and fitted tail rate.
///
/// Beyond tail_r the profile follows the linearized far-field form
/// w(r) = tail_value (r/tail_r)^{-(N-1)/2} exp(-(r - tail_r)), which eval()
/// also uses past the grid end.
struct GroundStateW {
  RadialField profile;
  double a_star = 0.0;
  double w0 = 0.0;  ///< w(0)
  std::array<double, 2> pohozaev_res{0.0, 0.0};
  double decay = 0.0;          ///< fitted tail rate, expected near 1
  double decay_quality = 0.0;  ///< correlation of the tail fit
  std::string method;          ///< "shooting", "flow" or "cross_validated"
  int N = 1;
  double tail_r = 0.0;
  double tail_value = 0.0;
  std::shared_ptr<const FieldInterpolant> interp;  ///< set by the solvers

  double eval(double r) const;
};

struct ShootingConfig {
  std::pair<double, double> bracket{0.0, 0.0};  ///< (0,0) requests auto-bracketing
  double bisect_tol = 1e-13;   ///< absolute bisection width on w(0)
  int max_bisect = 120;
  double r_anchor = 1e-5;      ///< series handoff radius
  double h_max = 2e-3;         ///< integrator cap step
  double splice_rel = 1e-5;    ///< switch to the analytic tail below this fraction of w(0)
  double march_past = 12.0;    ///< integrate to rmax + march_past for classification
};

/// Outward integration from the origin series with bisection on w(0)
/// between zero-crossing and turning-up trajectories.
GroundStateW solve_w_shooting(const ProblemParams& params, const GridPtr& grid,
                              const ShootingConfig& config = {});

/// Flow defaults for the trap-free profile solve: the spectral gap of the
/// M = 1 problem can be small, so the step cap sits well above the trapped
/// solver default.
inline FlowConfig profile_flow_config() {
  FlowConfig fc;
  fc.dt = 0.05;
  fc.init = FlowInit::gaussian;
  return fc;
}

/// Minimizes the M = 1 trap-free energy by normalized gradient flow and
/// unscales the minimizer through its multiplier back to w.
GroundStateW solve_w_flow(const ProblemParams& params, const GridPtr& grid,
                          const FlowConfig& config = profile_flow_config());

/// Relative residuals of the two Pohozaev equalities, both measured
/// against |grad w|_2^2.
std::array<double, 2> pohozaev_residual(const RadialField& w,
                                        const ProblemParams& params);

/// int u^{p+1} r^{-b} over the field's grid.
double interaction_integral(const RadialField& u, const ProblemParams& params);

/// C_GN int |u|^{p+1} r^{-b} / (|grad u|^{N(p-1)/2+b} ||u||^{p+1-N(p-1)/2-b});
/// <= 1 for every field and = 1 exactly at u = w.
double gn_ratio(const RadialField& u, const ProblemParams& params, double c_gn);

struct CrossValidation {
  double a_star_rel_diff = 0.0;
  double sup_diff = 0.0;   ///< sup distance between the two profiles
  double sup_scale = 0.0;  ///< w(0) of the reference profile
};

CrossValidation cross_validate(const GroundStateW& a, const GroundStateW& b);

}  // namespace gpsing
