#pragma once

#include <string>
#include <utility>
#include <vector>

#include "gpsing/grid.hpp"
#include "gpsing/minimize.hpp"
#include "gpsing/problem.hpp"
#include "gpsing/profile.hpp"

namespace gpsing {

/// Least-squares exponential tail fit on a window.
struct DecayFit {
  double rate = 0.0;                      ///< slope of -log f(r)
  std::pair<double, double> window{0, 0};
  double theta = 0.0;                     ///< rate^2 clamped into (0,1)
  double quality = 0.0;                   ///< |correlation| of the fit
};

/// Throws NonpositiveTail when the field is not positive on the window.
DecayFit decay_fit(const RadialField& f, std::pair<double, double> window);

/// Diagnostics of one trapped solve at interaction strength M.
struct ScalingRow {
  double M = 0.0;
  double I_M = 0.0;         ///< computed energy
  double ratio = 0.0;       ///< I(M) / (M/a*)^{beta_energy}, tends to -lambda0
  double trap_mass = 0.0;   ///< int V u^2, tends to 0
  double eps = 0.0;         ///< epsilon_of(M, a*)
  double mu = 0.0;
  double mu_eps2 = 0.0;     ///< eps^2 mu, tends to -1
  double sup_dist = 0.0;    ///< sup |w_k - w/sqrt(a*)|
  double h1_dist = 0.0;     ///< full H^1 distance of w_k to w/sqrt(a*)
  double sing_mass = 0.0;   ///< int w_k^{p+1} r^{-b}
  double grad_sq = 0.0;     ///< |grad w_k|_2^2
  double decay_rate = 0.0;
  double decay_quality = 0.0;
  double tilde_closed = 0.0;    ///< closed-form trap-free energy at this M
  double tilde_discrete = 0.0;  ///< same-grid V = 0 minimum (sandwich lower side)
  double test_fn_energy = 0.0;  ///< cut-off upper bound (sandwich upper side)
  double a_tau = 1.0;
  bool sandwich_ok = false;
  bool converged = false;
  int iters = 0;
  std::string error;  ///< non-empty when the row failed
};

struct ScalingReport {
  ProblemParams params;   ///< M field unused
  PotentialSpec potential;
  int grid_nodes = 0;     ///< base grid; rows refine with the concentration scale
  double grid_rmax = 0.0;
  double grid_grading = 0.0;
  double a_star = 0.0;
  double lambda0 = 0.0;
  double beta_energy = 0.0;
  double beta_length = 0.0;
  std::vector<ScalingRow> rows;
  /// rescaled minimizers, one per row on that row's (refined) grid;
  /// default-constructed on failed rows
  std::vector<RadialField> wk_fields;
  RadialField wbar;  ///< w / sqrt(a*) on the base grid
  std::string notes;
};

/// One gfdn solve per M (rows ordered by M); failed rows are recorded, not
/// dropped. Requires the computed profile w for scaling references and the
/// predicted-shape initialization.
ScalingReport run_sweep(const ProblemParams& params_pb, const PotentialSpec& potential,
                        const std::vector<double>& M_list, const GridPtr& grid,
                        const FlowConfig& flow, const GroundStateW& w);

/// Per-row (sup, H1) distances of w_k to w/sqrt(a*); skips failed rows.
std::vector<std::pair<double, double>> profile_convergence(const ScalingReport& report,
                                                           const GroundStateW& w);

struct UniformBounds {
  double grad_min = 0.0, grad_max = 0.0;  ///< range of |grad w_k|_2^2
  double sing_min = 0.0, sing_max = 0.0;  ///< range of int w_k^{p+1} r^{-b}
  double ratio_final = 0.0;  ///< (2 a*^{(p-1)/2}/(p+1)) sing/grad at the largest M
  double ratio_limit = 0.0;  ///< 4 / (N(p-1) + 2b)
  bool all_positive = false;
};

UniformBounds uniform_bounds_check(const ScalingReport& report);

}  // namespace gpsing
