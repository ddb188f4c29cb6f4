#include "gpsing/profile.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

#include "gpsing/errors.hpp"
#include "gpsing/sweep.hpp"

namespace gpsing {

namespace {

// Two-sided state of the radial field equation w'' + (N-1)/r w' = w - w^p r^{-b}.
struct State {
  double w;
  double v;  // w'
};

// Origin expansion w(r) = w0 + A r^{2-b} + B r^2 + C r^{4-2b} + ..., obtained
// by matching powers; the singular source makes w'' unbounded at 0, so the
// integrator starts from this series instead of r = 0.
struct OriginSeries {
  double w0, A, B, C;
  double b;
  int N;

  State at(double r) const {
    const double r2b = std::pow(r, 2.0 - b);
    const double r42b = std::pow(r, 4.0 - 2.0 * b);
    State s;
    s.w = w0 + A * r2b + B * r * r + C * r42b;
    s.v = A * (2.0 - b) * std::pow(r, 1.0 - b) + 2.0 * B * r +
          C * (4.0 - 2.0 * b) * std::pow(r, 3.0 - 2.0 * b);
    return s;
  }
};

OriginSeries make_series(const ProblemParams& q, double w0) {
  OriginSeries s;
  s.w0 = w0;
  s.b = q.b;
  s.N = q.N;
  const double b = q.b;
  const double N = q.N;
  s.A = -std::pow(w0, q.p) / ((2.0 - b) * (N - b));
  s.B = w0 / (2.0 * N);
  s.C = q.p * std::pow(w0, 2.0 * q.p - 1.0) /
        ((2.0 - b) * (N - b) * (4.0 - 2.0 * b) * (N + 2.0 - 2.0 * b));
  return s;
}

State rhs(const ProblemParams& q, double r, const State& s) {
  const double wpos = std::max(s.w, 0.0);
  State d;
  d.w = s.v;
  d.v = s.w - std::pow(wpos, q.p) * std::pow(r, -q.b) -
        (q.N - 1.0) / r * s.v;
  return d;
}

State rk4(const ProblemParams& q, double r, const State& s, double h) {
  const State k1 = rhs(q, r, s);
  const State s2{s.w + 0.5 * h * k1.w, s.v + 0.5 * h * k1.v};
  const State k2 = rhs(q, r + 0.5 * h, s2);
  const State s3{s.w + 0.5 * h * k2.w, s.v + 0.5 * h * k2.v};
  const State k3 = rhs(q, r + 0.5 * h, s3);
  const State s4{s.w + h * k3.w, s.v + h * k3.v};
  const State k4 = rhs(q, r + h, s4);
  return State{s.w + h / 6.0 * (k1.w + 2.0 * k2.w + 2.0 * k3.w + k4.w),
               s.v + h / 6.0 * (k1.v + 2.0 * k2.v + 2.0 * k3.v + k4.v)};
}

enum class Shot { high, low, separatrix };

struct Sample {
  double r, w, v;
};

// Integrates outward from the series anchor. A trajectory is "low" once w
// crosses zero and "high" once w' turns positive; the separating value of
// w(0) is the decaying profile. Steps grow geometrically away from the
// origin (h ~ 0.05 r capped at h_max), which keeps the r^{2-b} layer and
// the singular source resolved.
Shot march(const ProblemParams& q, const ShootingConfig& cfg, double w0,
           double r_end, std::vector<Sample>* record) {
  double r = cfg.r_anchor;
  const OriginSeries series = make_series(q, w0);
  State s = series.at(r);
  if (record) record->push_back({r, s.w, s.v});
  while (r < r_end) {
    const double h = std::min({cfg.h_max, std::max(0.05 * r, 1e-7), r_end - r});
    s = rk4(q, r, s, h);
    r += h;
    if (!std::isfinite(s.w) || !std::isfinite(s.v)) return Shot::high;
    if (s.w <= 0.0) return Shot::low;
    if (record) record->push_back({r, s.w, s.v});
    if (s.v >= 0.0) return Shot::high;
    if (s.w > 10.0 * w0) return Shot::high;
  }
  return Shot::separatrix;
}

// Cubic Hermite evaluation inside a recorded trajectory.
double hermite_at(const std::vector<Sample>& tr, double r) {
  auto cmp = [](const Sample& a, double x) { return a.r < x; };
  auto it = std::lower_bound(tr.begin(), tr.end(), r, cmp);
  if (it == tr.begin()) return tr.front().w;
  if (it == tr.end()) return tr.back().w;
  const Sample& hi = *it;
  const Sample& lo = *(it - 1);
  const double h = hi.r - lo.r;
  const double t = (r - lo.r) / h;
  const double t2 = t * t, t3 = t2 * t;
  return lo.w * (2.0 * t3 - 3.0 * t2 + 1.0) + h * lo.v * (t3 - 2.0 * t2 + t) +
         hi.w * (-2.0 * t3 + 3.0 * t2) + h * hi.v * (t3 - t2);
}

double tail_eval(int N, double tail_r, double tail_value, double r) {
  return tail_value * std::pow(r / tail_r, -0.5 * (N - 1.0)) *
         std::exp(-(r - tail_r));
}

// Fills a_star, Pohozaev residuals, decay fit and the interpolant.
void finalize(GroundStateW& out, const ProblemParams& q) {
  out.N = q.N;
  out.a_star = l2_norm_sq(out.profile);
  out.pohozaev_res = pohozaev_residual(out.profile, q);
  const double rmax = out.profile.grid->rmax;
  const DecayFit fit = decay_fit(out.profile, {0.5 * rmax, 0.75 * rmax});
  out.decay = fit.rate;
  out.decay_quality = fit.quality;
  out.interp = std::make_shared<FieldInterpolant>(out.profile);
  if (std::abs(out.profile.values.back()) > 1e-8)
    std::fprintf(stderr,
                 "gpsing: warning: |w(rmax)| = %.3g exceeds 1e-8; "
                 "consider a larger rmax\n",
                 out.profile.values.back());
}

}  // namespace

double GroundStateW::eval(double r) const {
  if (profile.values.empty()) throw ProfileMissing();
  if (r > profile.grid->rmax) {
    if (tail_r > 0.0 && tail_value > 0.0)
      return tail_eval(N, tail_r, tail_value, r);
    return 0.0;
  }
  if (interp) return (*interp)(r);
  return interp_eval(profile, r);
}

GroundStateW solve_w_shooting(const ProblemParams& q, const GridPtr& grid,
                              const ShootingConfig& cfg) {
  if (grid->N != q.N) throw BadGridSpec("grid dimension differs from params");
  const double r_end = grid->rmax + cfg.march_past;

  auto classify = [&](double w0) { return march(q, cfg, w0, r_end, nullptr); };

  double lo = cfg.bracket.first, hi = cfg.bracket.second;
  if (lo == 0.0 && hi == 0.0) {
    // auto-bracket around w0 = 1
    double probe = 1.0;
    const Shot c = classify(probe);
    if (c == Shot::high || c == Shot::separatrix) {
      lo = probe;
      hi = 2.0 * probe;
      int guard = 0;
      while (classify(hi) != Shot::low) {
        hi *= 2.0;
        if (++guard > 60) throw NoBracket("no zero-crossing trajectory found");
      }
    } else {
      hi = probe;
      lo = 0.5 * probe;
      int guard = 0;
      while (classify(lo) == Shot::low) {
        lo *= 0.5;
        if (++guard > 60) throw NoBracket("no turning-up trajectory found");
      }
    }
  } else {
    if (!(lo > 0.0) || !(hi > lo)) throw NoBracket("bracket must satisfy 0 < lo < hi");
    const Shot cl = classify(lo), ch = classify(hi);
    if (cl == Shot::low || ch == Shot::high)
      throw NoBracket("bracket does not separate the trajectory classes");
  }

  int it = 0;
  while (hi - lo > cfg.bisect_tol) {
    if (++it > cfg.max_bisect)
      throw BisectionStalled("bisection interval stuck at width " +
                             std::to_string(hi - lo));
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;  // double precision exhausted
    const Shot c = classify(mid);
    if (c == Shot::separatrix) {
      lo = hi = mid;
      break;
    }
    (c == Shot::high ? lo : hi) = mid;
  }
  const double w0 = 0.5 * (lo + hi);

  std::vector<Sample> tr;
  tr.reserve(1 << 16);
  march(q, cfg, w0, r_end, &tr);

  // Last sample still trusted: decaying and above the splice threshold.
  const double splice = cfg.splice_rel * w0;
  std::size_t anchor = 0;
  for (std::size_t j = 0; j < tr.size(); ++j)
    if (tr[j].w >= splice && tr[j].v < 0.0) anchor = j;
  if (anchor == 0) throw BisectionStalled("trajectory has no decaying range");
  tr.resize(anchor + 1);
  const double tail_r = tr.back().r;
  const double tail_value = tr.back().w;

  const OriginSeries series = make_series(q, w0);
  std::vector<double> vals(grid->nodes());
  for (std::size_t i = 0; i < vals.size(); ++i) {
    const double r = grid->r[i];
    if (r <= cfg.r_anchor)
      vals[i] = series.at(std::max(r, 0.0)).w;
    else if (r <= tail_r)
      vals[i] = hermite_at(tr, r);
    else
      vals[i] = tail_eval(q.N, tail_r, tail_value, r);
  }
  vals[0] = w0;

  GroundStateW out;
  out.profile = RadialField(grid, std::move(vals));
  out.w0 = w0;
  out.tail_r = tail_r;
  out.tail_value = tail_value;
  out.method = "shooting";
  finalize(out, q);
  return out;
}

GroundStateW solve_w_flow(const ProblemParams& q, const GridPtr& grid,
                          const FlowConfig& cfg) {
  if (grid->N != q.N) throw BadGridSpec("grid dimension differs from params");
  const ProblemParams q1 = q.with_M(1.0);
  FlowConfig fc = cfg;
  if (fc.init == FlowInit::scaled_w) fc.init = FlowInit::gaussian;

  // Minimize the trap-free M = 1 energy, then unscale through the
  // multiplier: u1(x) = (-mu1)^{(2-b)/(2(p-1))} w(sqrt(-mu1) x).
  //
  // The working domain tracks the minimizer's own scale 1/kappa: it must
  // cover rmax/kappa for the unscaling and 22/kappa for the tail, and a
  // domain much larger than that wastes the node budget (kappa can exceed
  // 100 near the edges of the parameter window). A cheap coarse pass pins
  // down kappa; the full-resolution passes then warm-start from it.
  MinimizerResult r1;
  double kappa = 1.0;
  {
    // scale estimate only: loose tolerances, partial results acceptable
    const GridPtr coarse =
        build_grid(grid->N, grid->rmax,
                   std::min<std::size_t>(grid->nodes(), 1201), grid->grading);
    FlowConfig fc0 = fc;
    fc0.tol_residual = std::max(fc.tol_residual, 2e-2);
    fc0.tol_energy = std::max(fc.tol_energy, 1e-9);
    fc0.max_iters = std::min(fc.max_iters, 60000);
    r1 = gfdn_minimize(q1, PotentialSpec::zero(), coarse, fc0, nullptr);
    if (!(r1.mu < 0.0)) throw FlowDiverged("trap-free multiplier not negative");
    kappa = std::sqrt(-r1.mu);
  }

  GridPtr work = grid;
  for (int pass = 0; pass < 3; ++pass) {
    const double target = std::max(1.02 * grid->rmax, 22.0) / kappa;
    const bool covered = work->rmax * kappa >= grid->rmax * 0.999;
    if (pass > 0 && covered && work->rmax <= 3.0 * target) break;
    if (!covered || work->rmax > 3.0 * target)
      work = build_grid(grid->N, target, grid->nodes(), grid->grading);
    fc.init = FlowInit::profile;
    fc.init_profile = r1.u;
    r1 = gfdn_minimize(q1, PotentialSpec::zero(), work, fc, nullptr);
    if (!r1.converged) throw FlowDiverged("trap-free flow did not converge");
    if (!(r1.mu < 0.0)) throw FlowDiverged("trap-free multiplier not negative");
    kappa = std::sqrt(-r1.mu);
  }
  if (work->rmax * kappa < grid->rmax * 0.999)
    throw GridTooCoarse("could not cover the requested radius after unscaling");

  const double amp = std::pow(-r1.mu, (2.0 - q.b) / (2.0 * (q.p - 1.0)));
  const FieldInterpolant interp_u1(r1.u);
  std::vector<double> vals(grid->nodes());
  for (std::size_t i = 0; i < vals.size(); ++i)
    vals[i] = std::max(0.0, interp_u1(grid->r[i] / kappa)) / amp;

  GroundStateW out;
  out.profile = RadialField(grid, std::move(vals));
  out.w0 = out.profile.values[0];
  out.method = "flow";
  // anchor the tail continuation at the last node comfortably above noise
  const double splice = 1e-5 * out.w0;
  for (std::size_t i = 1; i < out.profile.size(); ++i) {
    if (out.profile.values[i] >= splice) {
      out.tail_r = grid->r[i];
      out.tail_value = out.profile.values[i];
    }
  }
  finalize(out, q);
  return out;
}

std::array<double, 2> pohozaev_residual(const RadialField& w,
                                        const ProblemParams& q) {
  const double kin = h1_seminorm_sq(w);
  const double inter = interaction_integral(w, q);
  const double l2 = l2_norm_sq(w);
  const double top = q.N * (q.p - 1.0) + 2.0 * q.b;
  const double c1 = top / (2.0 * (q.p + 1.0));
  const double c2 = top / (2.0 * (q.p + 1.0) - top);
  return {std::abs(kin - c1 * inter) / kin, std::abs(kin - c2 * l2) / kin};
}

double interaction_integral(const RadialField& u, const ProblemParams& q) {
  std::vector<double> up(u.size());
  for (std::size_t i = 0; i < u.size(); ++i)
    up[i] = std::pow(std::abs(u.values[i]), q.p + 1.0);
  return integrate_values(*u.grid, up, -q.b);
}

double gn_ratio(const RadialField& u, const ProblemParams& q, double c_gn) {
  const double l2 = l2_norm_sq(u);
  if (!(l2 > 0.0)) throw ZeroField();
  const double kin = h1_seminorm_sq(u);
  const double inter = interaction_integral(u, q);
  const double e_grad = 0.5 * q.N * (q.p - 1.0) + q.b;
  const double e_mass = q.p + 1.0 - e_grad;
  return c_gn * inter /
         (std::pow(std::sqrt(kin), e_grad) * std::pow(std::sqrt(l2), e_mass));
}

CrossValidation cross_validate(const GroundStateW& a, const GroundStateW& b) {
  CrossValidation cv;
  cv.a_star_rel_diff = std::abs(a.a_star - b.a_star) / b.a_star;
  cv.sup_diff = sup_distance(a.profile, b.profile);
  cv.sup_scale = b.w0;
  return cv;
}

}  // namespace gpsing
