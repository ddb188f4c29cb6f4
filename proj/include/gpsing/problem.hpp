#pragma once

#include <optional>
#include <string>

namespace gpsing {

/// Parameter tuple (N, p, b, M) of the singular GP functional.
///
/// The admissible window is
///   0 < b < min{2, N},   1 < p < 1 + (4 - 2b)/N,   M > 0,
/// which keeps the problem mass-subcritical and the weight r^{-b} integrable.
/// Instances are produced by validate_params and treated as valid downstream.
struct ProblemParams {
  int N = 1;     ///< spatial dimension
  double p = 2.0;  ///< nonlinearity power
  double b = 0.5;  ///< singularity exponent of the weight r^{-b}
  double M = 1.0;  ///< interaction strength

  ProblemParams with_M(double new_M) const {
    ProblemParams q = *this;
    q.M = new_M;
    return q;
  }
};

/// Validates the window above; throws RegimeViolation naming the bound.
ProblemParams validate_params(int N, double p, double b, double M = 1.0);

/// Closed-form constants of a parameter set. a_star and c_gn stay unset
/// until the profile w has been computed.
struct DerivedConstants {
  double lambda0 = 0.0;      ///< limit energy coefficient, > 0 on valid params
  double beta_energy = 0.0;  ///< energy scaling exponent 2(p-1)/(4-N(p-1)-2b)
  double beta_length = 0.0;  ///< length scaling exponent (p-1)/(4-N(p-1)-2b)
  std::optional<double> a_star;
  std::optional<double> c_gn;
};

DerivedConstants derived_constants(const ProblemParams& params);

/// Sharp interpolation constant; needs a* = ||w||_2^2.
double gn_constant(const ProblemParams& params, double a_star);

/// Trap-free minimum energy: -lambda0 (M/a*)^{beta_energy}.
double tilde_I_closed(const ProblemParams& params, double a_star);

/// Concentration length scale (M/a*)^{-beta_length}; decreasing in M.
double epsilon_of(const ProblemParams& params, double a_star);

/// Reciprocal of epsilon_of: the rescaling factor of the trap-free minimizer.
double tilde_alpha_of(const ProblemParams& params, double a_star);

/// Multiplier of the M = 1 trap-free minimizer: -(a*)^{-beta_energy}.
double tilde_mu1_closed(const ProblemParams& params, double a_star);

/// Exact scaling identity: tilde I(M) = M^{beta_energy} tilde I(1).
double tilde_scaling_identity(const ProblemParams& params, double I1);

/// Radial trapping potential: either V == 0 or V(r) = gamma^2 r^s.
struct PotentialSpec {
  enum class Kind { zero, power_law };

  Kind kind = Kind::zero;
  double gamma = 1.0;
  double s = 2.0;

  static PotentialSpec zero();
  static PotentialSpec power(double gamma, double s);
  /// Accepts "zero" or "power:<gamma>,<s>"; throws UsageError otherwise.
  static PotentialSpec parse(const std::string& text);

  double operator()(double r) const;
  bool is_zero() const { return kind == Kind::zero; }
  std::string str() const;
};

}  // namespace gpsing
