#pragma once

#include <string>
#include <vector>

namespace brcap {

// u(t) = t^{2-d} sum_n a_n s^n with s = t^{4-d}.
struct SeriesResult {
  int d = 0;
  double a0 = 0.0;
  std::vector<long double> a;
  double radius = 0.0;  // ratio-test radius of convergence in s
};

// a_n = 4 / (n delta (n delta + 1)) (d-2)^{-2} sum_{k<n} a_k a_{n-1-k}.
SeriesResult series_coefficients(int d, double a0, int N);
// Throws ConvergenceError when t is too close to the radius for N terms.
double series_u(const SeriesResult& s, double t, double* err = nullptr);
double snake_delta(int d);

struct A0Result {
  int d = 0;
  double a0 = 0.0;
  double lo = 0.0;  // classified convergent
  double hi = 0.0;  // classified divergent
  double eps = 0.0;
  int N = 0;
  bool conclusive = true;
  bool converges_at_probe = true;  // the returned a0 at t = 1 + eps
  int bisections = 0;
};

// Largest a0 for which the series converges for all t > 1. Convergence is
// classified by the growth rate gamma of log a_n = alpha + beta log n + gamma n
// fitted on the last N/4 terms; the probe t = 1 + eps is reported only.
A0Result find_a0(int d, double eps = 1e-3, int N = 4000, double tol = 1e-10);

struct RadialSolution {
  int d = 0;
  double a0 = 0.0;
  std::string method;  // series, shooting, closed_form_d6
  double delta = 0.0;
  SeriesResult series;  // used for t >= t_far
  double t_far = 0.0;
  double t_min = 1.0;   // smallest t covered by the trajectory
  double tau_blowup = 0.0;
  int shots = 0;
  // Trajectory of w = t^{d-2} u against tau = log t on a uniform grid.
  double tau0 = 0.0, dtau = 0.0;
  std::vector<double> w, wt;

  double u(double t) const;
  double du(double t) const;  // du/dt
};

struct ShootOptions {
  double t_far = 30.0;
  double tol = 1e-13;
  double grid = 1e-3;
  int series_terms = 200;
  double blowup_level = 1e9;  // stop when w exceeds this multiple of a
};

RadialSolution closed_form_d6();
RadialSolution series_solution(int d, double a0, int N = 4000);
RadialSolution shoot_radial(int d, const ShootOptions& opt = {});
// Trajectory for a fixed boundary value a; reports the extrapolated blow-up.
RadialSolution shoot_once(int d, double a, const ShootOptions& opt = {});

// u_{B(0,r)}(x) = r^{-2} u(|x| / r).
double u_ball(const RadialSolution& s, double r, double x);

// Quintic cutoff: 0 on [0,2], 1 on [3, inf).
double cutoff_psi(double t, int deriv = 0);

struct IntegralCheck {
  double rhs = 0.0;
  double a0 = 0.0;
  double residual = 0.0;  // |rhs - a0| / a0
  double tail = 0.0;      // part of the integral beyond t_far
  double tail_bound = 0.0;
};

// a0 = -(c_d/2) int (4 psi u^2 - u Lap psi) by radial quadrature.
IntegralCheck integral_identity_check(const RadialSolution& s);

// Max over the grid with t >= t_lo of the ODE residual, scaled by the
// largest term.
double ode_residual(const RadialSolution& s, double t_lo);

// Normalizer phi_d(t) for d in {1,2,3,4}.
double phi_low_dim(int d, double t);

}  // namespace brcap
