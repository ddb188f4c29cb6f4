#include "gpsing/problem.hpp"

#include <cmath>
#include <cstdio>

#include "gpsing/errors.hpp"

namespace gpsing {

namespace {

std::string num(double x) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%g", x);
  return buf;
}

// 4 - N(p-1) - 2b, positive on the admissible window.
double subcritical_gap(const ProblemParams& q) {
  return 4.0 - q.N * (q.p - 1.0) - 2.0 * q.b;
}

// 2(p+1) - N(p-1) - 2b, positive on the admissible window.
double euler_gap(const ProblemParams& q) {
  return 2.0 * (q.p + 1.0) - q.N * (q.p - 1.0) - 2.0 * q.b;
}

}  // namespace

ProblemParams validate_params(int N, double p, double b, double M) {
  if (N < 1) throw RegimeViolation("N", "N >= 1");
  if (!(b > 0.0)) throw RegimeViolation("b", "b > 0");
  const double b_max = std::min(2.0, static_cast<double>(N));
  if (!(b < b_max)) throw RegimeViolation("b", "b < " + num(b_max));
  if (!(p > 1.0)) throw RegimeViolation("p", "p > 1");
  const double p_max = 1.0 + (4.0 - 2.0 * b) / N;
  if (!(p < p_max)) throw RegimeViolation("p", "p < " + num(p_max));
  if (!(M > 0.0) || !std::isfinite(M)) throw RegimeViolation("M", "M > 0");
  return ProblemParams{N, p, b, M};
}

DerivedConstants derived_constants(const ProblemParams& q) {
  DerivedConstants d;
  d.lambda0 = -(q.N * (q.p - 1.0) + 2.0 * q.b - 4.0) / euler_gap(q);
  d.beta_energy = 2.0 * (q.p - 1.0) / subcritical_gap(q);
  d.beta_length = (q.p - 1.0) / subcritical_gap(q);
  return d;
}

double gn_constant(const ProblemParams& q, double a_star) {
  if (!(a_star > 0.0)) throw NonpositiveAStar();
  const double top = q.N * (q.p - 1.0) + 2.0 * q.b;
  const double bot = euler_gap(q);
  return std::pow(top / bot, top / 4.0) * bot / (2.0 * (q.p + 1.0)) *
         std::pow(a_star, (q.p - 1.0) / 2.0);
}

double tilde_I_closed(const ProblemParams& q, double a_star) {
  if (!(a_star > 0.0)) throw NonpositiveAStar();
  const DerivedConstants d = derived_constants(q);
  return -d.lambda0 * std::pow(q.M / a_star, d.beta_energy);
}

double epsilon_of(const ProblemParams& q, double a_star) {
  if (!(a_star > 0.0)) throw NonpositiveAStar();
  return std::pow(q.M / a_star, -derived_constants(q).beta_length);
}

double tilde_alpha_of(const ProblemParams& q, double a_star) {
  if (!(a_star > 0.0)) throw NonpositiveAStar();
  return std::pow(q.M / a_star, derived_constants(q).beta_length);
}

double tilde_mu1_closed(const ProblemParams& q, double a_star) {
  if (!(a_star > 0.0)) throw NonpositiveAStar();
  return -std::pow(a_star, -derived_constants(q).beta_energy);
}

double tilde_scaling_identity(const ProblemParams& q, double I1) {
  return std::pow(q.M, derived_constants(q).beta_energy) * I1;
}

PotentialSpec PotentialSpec::zero() { return PotentialSpec{Kind::zero, 0.0, 0.0}; }

PotentialSpec PotentialSpec::power(double gamma, double s) {
  if (!(gamma > 0.0)) throw UsageError("potential coefficient gamma must be > 0");
  if (!(s > 0.0)) throw UsageError("potential exponent s must be > 0");
  return PotentialSpec{Kind::power_law, gamma, s};
}

PotentialSpec PotentialSpec::parse(const std::string& text) {
  if (text == "zero") return zero();
  const std::string prefix = "power:";
  if (text.rfind(prefix, 0) == 0) {
    double gamma = 0.0, s = 0.0;
    int used = 0;
    const char* args = text.c_str() + prefix.size();
    if (std::sscanf(args, "%lf,%lf%n", &gamma, &s, &used) == 2 &&
        args[used] == '\0')
      return power(gamma, s);
  }
  throw UsageError("unrecognized potential '" + text + "'; expected zero or power:<gamma>,<s>");
}

double PotentialSpec::operator()(double r) const {
  if (kind == Kind::zero) return 0.0;
  return gamma * gamma * std::pow(r, s);
}

std::string PotentialSpec::str() const {
  if (kind == Kind::zero) return "zero";
  char buf[80];
  std::snprintf(buf, sizeof(buf), "power:%.17g,%.17g", gamma, s);
  return buf;
}

}  // namespace gpsing
