#include "gpsing/minimize.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <limits>

#include "gpsing/errors.hpp"
#include "gpsing/profile.hpp"

namespace gpsing {

namespace {

// Smooth cut-off: 1 on r <= 1, 0 on r >= 2.
double cutoff(double r) {
  if (r <= 1.0) return 1.0;
  if (r >= 2.0) return 0.0;
  const double f1 = std::exp(-1.0 / (2.0 - r));
  const double f2 = std::exp(-1.0 / (r - 1.0));
  return f1 / (f1 + f2);
}

// Flux-form radial operator -Lap + V - s r^{-b} u^{p-1} on the graded grid.
// The last node is a Dirichlet zero and node 0 carries the zero-flux
// symmetry condition. The singular weight enters as its exact dual-cell
// average, so r^{-b} is never evaluated at the origin and the first-cell
// mass of the weight is carried exactly.
struct FlowOperator {
  const RadialGrid& g;
  double p, b, s;             // s = M^{(p-1)/2}
  std::size_t n;              // unknowns 0..n-1 (all nodes but the last)
  std::vector<double> aoh;    // face transmissibility S r_f^{N-1} / h
  std::vector<double> vol;    // dual cell volumes
  std::vector<double> V;      // potential samples
  std::vector<double> wsing;  // cell-averaged r^{-b}

  FlowOperator(const RadialGrid& grid, const ProblemParams& q,
               const PotentialSpec& pot)
      : g(grid), p(q.p), b(q.b), s(std::pow(q.M, 0.5 * (q.p - 1.0))) {
    const std::size_t m = g.nodes();
    n = m - 1;
    aoh.resize(n);
    vol.resize(n);
    V.resize(n);
    wsing.resize(n);
    const double S = g.surface_const;
    const double Nb = g.N - b;
    double face_prev = 0.0;   // r_{i-1/2}^N at the left face of cell i
    double wface_prev = 0.0;  // r_{i-1/2}^{N-b}
    for (std::size_t i = 0; i < n; ++i) {
      const double rf = 0.5 * (g.r[i] + g.r[i + 1]);
      const double h = g.r[i + 1] - g.r[i];
      aoh[i] = S * std::pow(rf, g.N - 1.0) / h;
      const double face_cur = std::pow(rf, static_cast<double>(g.N));
      vol[i] = S * (face_cur - face_prev) / g.N;
      face_prev = face_cur;
      const double wface_cur = std::pow(rf, Nb);
      wsing[i] = S * (wface_cur - wface_prev) / Nb / vol[i];
      wface_prev = wface_cur;
      V[i] = pot(g.r[i]);
    }
  }

  // (-Lap u + V u - s r^{-b} u^p)_i for the active nodes; trailing zero.
  std::vector<double> apply(const std::vector<double>& u) const {
    std::vector<double> out(u.size(), 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      const double left = (i > 0) ? aoh[i - 1] * (u[i] - u[i - 1]) : 0.0;
      const double right = aoh[i] * (u[i] - u[i + 1]);
      out[i] = (left + right) / vol[i] + V[i] * u[i] -
               s * wsing[i] * std::pow(u[i], p);
    }
    return out;
  }

  // Lyapunov energy of the discrete flow.
  double energy(const std::vector<double>& u) const {
    double kin = 0.0, pot_e = 0.0, inter = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double du = u[i + 1] - u[i];
      kin += aoh[i] * du * du;
      pot_e += vol[i] * V[i] * u[i] * u[i];
      inter += vol[i] * wsing[i] * std::pow(u[i], p + 1.0);
    }
    return kin + pot_e - 2.0 * s / (p + 1.0) * inter;
  }

  // Backward-Euler step with the nonlinear coefficient lagged on the
  // diagonal; Thomas solve. Returns false when the solve went non-finite.
  bool step(const std::vector<double>& u, double dt, std::vector<double>& out,
            std::vector<double>& cprime, std::vector<double>& dprime) const {
    cprime.assign(n, 0.0);
    dprime.assign(n, 0.0);
    double c_prev = 0.0, d_prev = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double lower = (i > 0) ? -dt * aoh[i - 1] / vol[i] : 0.0;
      const double upper = (i + 1 < n) ? -dt * aoh[i] / vol[i] : 0.0;
      const double diagL = ((i > 0 ? aoh[i - 1] : 0.0) + aoh[i]) / vol[i];
      const double diag =
          1.0 + dt * (diagL + V[i] - s * wsing[i] * std::pow(u[i], p - 1.0));
      const double denom = diag - lower * c_prev;
      if (denom == 0.0 || !std::isfinite(denom)) return false;
      cprime[i] = upper / denom;
      dprime[i] = (u[i] - lower * d_prev) / denom;
      c_prev = cprime[i];
      d_prev = dprime[i];
    }
    out.assign(u.size(), 0.0);
    double next = 0.0;
    for (std::size_t i = n; i-- > 0;) {
      const double xi = dprime[i] - cprime[i] * next;
      if (!std::isfinite(xi)) return false;
      out[i] = xi;
      next = xi;
    }
    return true;
  }

  // Rayleigh quotient in the operator inner product.
  double rayleigh(const std::vector<double>& u,
                  const std::vector<double>& Au) const {
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      num += vol[i] * Au[i] * u[i];
      den += vol[i] * u[i] * u[i];
    }
    return num / den;
  }
};

double mass_norm_sq(const RadialGrid& g, const std::vector<double>& u) {
  std::vector<double> sq(u.size());
  for (std::size_t i = 0; i < u.size(); ++i) sq[i] = u[i] * u[i];
  return integrate_values(g, sq, 0.0);
}

void normalize(const RadialGrid& g, std::vector<double>& u) {
  const double nrm = mass_norm_sq(g, u);
  if (!(nrm > 0.0)) throw FlowDiverged("flow state lost all mass");
  const double inv = 1.0 / std::sqrt(nrm);
  for (double& x : u) x *= inv;
}

std::vector<double> initial_state(const ProblemParams& q, const GridPtr& grid,
                                  const FlowConfig& cfg, const GroundStateW* w) {
  const std::size_t m = grid->nodes();
  std::vector<double> u(m, 0.0);
  FlowInit mode = cfg.init;
  if (mode == FlowInit::scaled_w && (w == nullptr || w->a_star <= 0.0))
    mode = FlowInit::gaussian;
  if (mode == FlowInit::profile && !cfg.init_profile) mode = FlowInit::gaussian;

  switch (mode) {
    case FlowInit::gaussian: {
      const double wdt = cfg.gaussian_width;
      for (std::size_t i = 0; i < m; ++i) {
        const double r = grid->r[i];
        u[i] = std::exp(-r * r / (2.0 * wdt * wdt));
      }
      break;
    }
    case FlowInit::profile: {
      const FieldInterpolant interp(*cfg.init_profile);
      for (std::size_t i = 0; i < m; ++i)
        u[i] = std::max(0.0, interp(grid->r[i]));
      break;
    }
    case FlowInit::scaled_w: {
      const double alpha = tilde_alpha_of(q, w->a_star);
      const double amp = std::pow(alpha, 0.5 * q.N) / std::sqrt(w->a_star);
      for (std::size_t i = 0; i < m; ++i)
        u[i] = amp * std::max(0.0, w->eval(alpha * grid->r[i]));
      break;
    }
  }
  u.back() = 0.0;
  normalize(*grid, u);
  return u;
}

}  // namespace

EnergyParts evaluate_E(const RadialField& u, const ProblemParams& q,
                       const PotentialSpec& pot) {
  EnergyParts e;
  e.kinetic = h1_seminorm_sq(u);
  if (!pot.is_zero()) {
    std::vector<double> vu2(u.size());
    for (std::size_t i = 0; i < u.size(); ++i)
      vu2[i] = pot(u.grid->r[i]) * u.values[i] * u.values[i];
    e.trap = integrate_values(*u.grid, vu2, 0.0);
  }
  std::vector<double> up(u.size());
  for (std::size_t i = 0; i < u.size(); ++i)
    up[i] = std::pow(std::abs(u.values[i]), q.p + 1.0);
  e.interaction = integrate_values(*u.grid, up, -q.b);
  const double s = std::pow(q.M, 0.5 * (q.p - 1.0));
  e.total = e.kinetic + e.trap - 2.0 * s / (q.p + 1.0) * e.interaction;
  return e;
}

double lagrange_multiplier(const MinimizerResult& result, const ProblemParams& q) {
  const double s = std::pow(q.M, 0.5 * (q.p - 1.0));
  return result.energy.total -
         (q.p - 1.0) / (q.p + 1.0) * s * result.energy.interaction;
}

double flow_energy(const RadialField& u, const ProblemParams& q,
                   const PotentialSpec& pot) {
  const FlowOperator op(*u.grid, q, pot);
  return op.energy(u.values);
}

MinimizerResult gfdn_minimize(const ProblemParams& q, const PotentialSpec& pot,
                              const GridPtr& grid, const FlowConfig& cfg,
                              const GroundStateW* w_hint) {
  if (!(cfg.dt > 0.0) || cfg.max_iters < 1 || !(cfg.tol_energy > 0.0) ||
      !(cfg.tol_residual > 0.0))
    throw UsageError("flow config must have positive dt, tolerances and max_iters");

  const FlowOperator op(*grid, q, pot);
  std::vector<double> u = initial_state(q, grid, cfg, w_hint);
  std::vector<double> trial, scratch_c, scratch_d;

  MinimizerResult res;
  double E = op.energy(u);
  res.energy_history.push_back(E);

  double dt = cfg.dt;
  int stall = 0;
  int iter = 0;
  double mu_op = 0.0;
  double el_res = std::numeric_limits<double>::infinity();
  double best_res = el_res;
  int no_progress = 0;

  auto residual = [&]() {
    const std::vector<double> Au = op.apply(u);
    mu_op = op.rayleigh(u, Au);
    std::vector<double> rv(u.size(), 0.0);
    for (std::size_t i = 0; i < op.n; ++i) {
      const double ri = Au[i] - mu_op * u[i];
      rv[i] = ri * ri;
    }
    el_res = std::sqrt(integrate_values(*grid, rv, 0.0)) /
             std::max(1.0, std::abs(mu_op));
  };

  const bool trace = std::getenv("GPSING_FLOW_TRACE") != nullptr;
  const int check_every = 25;
  for (iter = 1; iter <= cfg.max_iters; ++iter) {
    if (trace && iter % 500 == 0)
      std::fprintf(stderr, "[flow] it=%d dt=%.3e E=%.12g stall=%d res=%.3e\n",
                   iter, dt, E, stall, el_res);
    bool ok = op.step(u, dt, trial, scratch_c, scratch_d);
    double E_new = 0.0;
    if (ok) {
      // A sign-flipped solve (backward Euler stepping across 1/|mu|) dies
      // under the positivity clamp; treat it as a rejected step.
      for (double& x : trial) x = std::max(0.0, x);
      trial.back() = 0.0;
      const double nrm = mass_norm_sq(*grid, trial);
      ok = std::isfinite(nrm) && nrm > 0.0;
      if (ok) {
        const double inv = 1.0 / std::sqrt(nrm);
        for (double& x : trial) x *= inv;
        E_new = op.energy(trial);
        ok = std::isfinite(E_new) &&
             E_new <= E + 1e-12 * std::max(1.0, std::abs(E));
      }
    }
    if (!ok) {
      dt *= 0.5;
      if (dt < 1e-16) throw FlowDiverged("step size collapsed");
      continue;
    }
    u.swap(trial);
    const double dE = std::abs(E - E_new);
    E = E_new;
    res.energy_history.push_back(E);
    dt = std::min(dt * 1.1, cfg.dt);

    if (dE <= cfg.tol_energy * std::max(1.0, std::abs(E)))
      ++stall;
    else
      stall = 0;

    if (stall >= 2 || iter % check_every == 0) {
      residual();
      if (el_res < cfg.tol_residual && stall >= 1) {
        res.converged = true;
        break;
      }
      // Fail only when the residual has genuinely stopped improving.
      if (el_res < best_res * (1.0 - 1e-3)) {
        best_res = el_res;
        no_progress = 0;
      } else if (++no_progress >= 400) {
        throw GridTooCoarse("EL residual stuck at " + std::to_string(el_res));
      }
    }
  }
  if (!res.converged) residual();

  res.u = RadialField(grid, std::move(u));
  res.energy = evaluate_E(res.u, q, pot);
  res.mu = lagrange_multiplier(res, q);
  res.mu_rayleigh = mu_op;
  res.el_residual = el_res;
  res.iters = std::min(iter, cfg.max_iters);
  return res;
}

TestFunctionEnergy test_function_energy(const ProblemParams& q,
                                        const PotentialSpec& pot,
                                        const GridPtr& grid, double tau,
                                        const GroundStateW& w) {
  if (w.profile.values.empty() || !(w.a_star > 0.0)) throw ProfileMissing();
  if (!(tau > 0.0)) throw UsageError("tau must be positive");

  // Mass lost to the cut-off, accumulated on the profile grid so the
  // normalization constant comes out >= 1 by construction.
  const RadialGrid& wg = *w.profile.grid;
  std::vector<double> lost(wg.nodes());
  for (std::size_t i = 0; i < lost.size(); ++i) {
    const double phi = cutoff(wg.r[i] / tau);
    const double wi = w.profile.values[i];
    lost[i] = wi * wi * (1.0 - phi * phi);
  }
  double loss = integrate_values(wg, lost, 0.0);
  if (2.0 * tau > wg.rmax) {
    // tail remainder beyond the profile grid
    const int naux = 1000;
    const double a = wg.rmax, bnd = 2.0 * tau;
    const double h = (bnd - a) / naux;
    double acc = 0.0;
    for (int i = 0; i <= naux; ++i) {
      const double y = a + h * i;
      const double phi = cutoff(y / tau);
      const double wy = w.eval(y);
      const double f =
          wy * wy * (1.0 - phi * phi) * std::pow(y, wg.N - 1.0);
      acc += (i == 0 || i == naux) ? 0.5 * f : f;
    }
    loss += wg.surface_const * acc * h;
  }
  loss = std::min(loss, 0.999 * w.a_star);
  const double a_tau = std::sqrt(w.a_star / (w.a_star - loss));

  const double amp = a_tau * std::pow(tau, 0.5 * q.N) / std::sqrt(w.a_star);
  RadialField u = make_field(grid, [&](double r) {
    return amp * w.eval(tau * r) * cutoff(r);
  });
  std::vector<double> sq(u.size());
  for (std::size_t i = 0; i < u.size(); ++i) sq[i] = u.values[i] * u.values[i];
  const double nrm = integrate_values(*grid, sq, 0.0);
  if (!(nrm > 0.0)) throw ProfileMissing();
  const double inv = 1.0 / std::sqrt(nrm);
  for (double& x : u.values) x *= inv;

  TestFunctionEnergy out;
  out.energy = evaluate_E(u, q, pot).total;
  out.a_tau = a_tau;
  out.tau = tau;
  out.u = std::move(u);
  return out;
}

}  // namespace gpsing
