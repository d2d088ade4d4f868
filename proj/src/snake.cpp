#include "brcap/snake.hpp"

#include <Eigen/Dense>
#include <array>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/tools/roots.hpp>
#include <boost/numeric/odeint.hpp>
#include <cmath>
#include <limits>

#include "brcap/common.hpp"

namespace brcap {

double snake_delta(int d) { return (d - 4.0) / (d - 2.0); }

namespace {

void check_dim(int d) {
  if (d < 5) throw ValidationError("snake radial problem requires d >= 5");
}

std::vector<long double> recursion(int d, long double a0, int N) {
  const long double delta = (d - 4.0L) / (d - 2.0L);
  const long double inv = 1.0L / ((d - 2.0L) * (d - 2.0L));
  std::vector<long double> a(N + 1);
  a[0] = a0;
  for (int n = 1; n <= N; ++n) {
    long double s = 0.0L;
    for (int k = 0; k < n; ++k) s += a[k] * a[n - 1 - k];
    const long double nd = n * delta;
    a[n] = 4.0L / (nd * (nd + 1.0L)) * inv * s;
    if (!std::isfinite(a[n])) throw ConvergenceError("series coefficients overflow");
  }
  return a;
}

struct GrowthFit {
  double gamma = 0.0;
  double beta = 0.0;
};

// Least squares of log a_n on (1, log n, n, 1/n) over n in [n0, n1].
GrowthFit fit_growth(const std::vector<long double>& loga, int n0, int n1) {
  const int m = n1 - n0 + 1;
  Eigen::MatrixXd A(m, 4);
  Eigen::VectorXd y(m);
  const long double shift = loga[n0];
  for (int i = 0; i < m; ++i) {
    const double n = n0 + i;
    A(i, 0) = 1.0;
    A(i, 1) = std::log(n);
    A(i, 2) = n - n0;
    A(i, 3) = 1.0 / n;
    y(i) = static_cast<double>(loga[n0 + i] - shift);
  }
  Eigen::VectorXd c = A.colPivHouseholderQr().solve(y);
  return {c(2), c(1)};
}

}  // namespace

SeriesResult series_coefficients(int d, double a0, int N) {
  check_dim(d);
  if (!(a0 > 0.0)) throw ValidationError("a0 must be positive");
  if (N < 0) throw ValidationError("N must be nonnegative");
  SeriesResult s;
  s.d = d;
  s.a0 = a0;
  s.a = recursion(d, a0, N);
  if (N >= 16) {
    std::vector<long double> la(N + 1);
    for (int n = 0; n <= N; ++n) la[n] = std::log(s.a[n]);
    s.radius = std::exp(-fit_growth(la, N - N / 4, N).gamma);
  } else if (N >= 1) {
    s.radius = static_cast<double>(s.a[N - 1] / s.a[N]);
  }
  return s;
}

double series_u(const SeriesResult& s, double t, double* err) {
  if (!(t > 1.0)) throw ValidationError("series evaluation needs t > 1");
  const int d = s.d;
  const long double x = std::pow(static_cast<long double>(t), 4.0L - d);
  long double sum = 0.0L, p = 1.0L, last = 0.0L;
  for (std::size_t n = 0; n < s.a.size(); ++n) {
    last = s.a[n] * p;
    sum += last;
    p *= x;
  }
  const double ratio = s.radius > 0.0 ? static_cast<double>(x) / s.radius : 1.0;
  const double tail = ratio < 1.0 ? static_cast<double>(last) * ratio / (1.0 - ratio) : HUGE_VAL;
  const double rel = tail / static_cast<double>(sum);
  if (err) *err = rel;
  if (!(rel < 1e-8)) throw ConvergenceError("series too slow at this t; raise N");
  return static_cast<double>(std::pow(static_cast<long double>(t), 2.0L - d) * sum);
}

A0Result find_a0(int d, double eps, int N, double tol) {
  check_dim(d);
  if (!(eps > 0.0)) throw ValidationError("eps must be positive");
  if (N < 64) throw ValidationError("N must be at least 64");
  // a_n is homogeneous of degree n + 1 in a0, so log a_n(a0) = (n + 1) log a0 + log c_n.
  const auto c = recursion(d, 1.0L, N);
  std::vector<long double> lc(N + 1);
  for (int n = 0; n <= N; ++n) lc[n] = std::log(c[n]);
  auto gamma_at = [&](double a0, int n0, int n1) {
    std::vector<long double> la(N + 1);
    for (int n = n0; n <= n1; ++n) la[n] = lc[n] + (n + 1) * std::log(static_cast<long double>(a0));
    return fit_growth(la, n0, n1).gamma;
  };
  A0Result r;
  r.d = d;
  r.eps = eps;
  r.N = N;
  double lo = 1e-3, hi = 1e3;
  while (gamma_at(lo, N - N / 4, N) > 0.0) lo *= 0.1;
  while (gamma_at(hi, N - N / 4, N) <= 0.0) hi *= 10.0;
  while (hi - lo > tol && r.bisections < 200) {
    const double mid = 0.5 * (lo + hi);
    if (gamma_at(mid, N - N / 4, N) <= 0.0)
      lo = mid;
    else
      hi = mid;
    ++r.bisections;
  }
  r.lo = lo;
  r.hi = hi;
  r.a0 = 0.5 * (lo + hi);
  // The earlier window must give the same answer to within the bracket.
  const double g2 = gamma_at(r.a0, N / 2, N - N / 4);
  r.conclusive = std::abs(g2) < 1e-3 / N + 10 * tol / r.a0;
  r.converges_at_probe = gamma_at(r.a0, N - N / 4, N) < (d - 4) * std::log1p(eps);
  return r;
}

double RadialSolution::u(double t) const {
  if (!(t > 1.0)) throw ValidationError("u is defined for t > 1");
  if (method == "closed_form_d6") return 6.0 / ((t * t - 1) * (t * t - 1));
  if (method == "series" || t >= t_far) return series_u(series, t);
  if (t < t_min) throw ValidationError("t below the computed trajectory");
  const double tau = std::log(t);
  double x = (tau0 - tau) / dtau;
  std::size_t i = std::min<std::size_t>(static_cast<std::size_t>(x), w.size() - 2);
  const double s = x - i, h = -dtau;
  const double h00 = (1 + 2 * s) * (1 - s) * (1 - s), h10 = s * (1 - s) * (1 - s);
  const double h01 = s * s * (3 - 2 * s), h11 = s * s * (s - 1);
  const double wv = h00 * w[i] + h10 * h * wt[i] + h01 * w[i + 1] + h11 * h * wt[i + 1];
  return std::exp((2.0 - d) * tau) * wv;
}

double RadialSolution::du(double t) const {
  if (method == "closed_form_d6") return -24.0 * t / std::pow(t * t - 1, 3);
  const double h = 1e-5 * t;
  return (u(t + h) - u(t - h)) / (2 * h);
}

RadialSolution closed_form_d6() {
  RadialSolution s;
  s.d = 6;
  s.a0 = 6.0;
  s.method = "closed_form_d6";
  s.delta = snake_delta(6);
  s.series = series_coefficients(6, 6.0, 400);
  s.t_far = 30.0;
  return s;
}

RadialSolution series_solution(int d, double a0, int N) {
  RadialSolution s;
  s.d = d;
  s.a0 = a0;
  s.method = "series";
  s.delta = snake_delta(d);
  s.series = series_coefficients(d, a0, N);
  s.t_far = 30.0;
  return s;
}

namespace {

using State = std::array<double, 2>;

struct Shot {
  double tau_b = -HUGE_VAL;
  std::vector<double> w, wt;
};

Shot integrate(int d, double a, const ShootOptions& opt, bool keep) {
  namespace ode = boost::numeric::odeint;
  const double tau_far = std::log(opt.t_far);
  const auto ser = recursion(d, a, opt.series_terms);
  const double s = std::exp((4.0 - d) * tau_far);
  long double w0 = 0.0L, wt0 = 0.0L, p = 1.0L;
  for (int n = 0; n <= opt.series_terms; ++n) {
    w0 += ser[n] * p;
    wt0 += n * (4.0L - d) * ser[n] * p;
    p *= s;
  }
  auto sys = [d](const State& x, State& dx, double tau) {
    dx[0] = x[1];
    dx[1] = (d - 2.0) * x[1] + 4.0 * std::exp((4.0 - d) * tau) * x[0] * x[0];
  };
  auto stepper = ode::make_controlled(opt.tol, opt.tol, ode::runge_kutta_dopri5<State>());
  State x{double(w0), double(wt0)};
  double tau = tau_far, dt = -1e-3;
  Shot out;
  if (keep) {
    out.w.push_back(x[0]);
    out.wt.push_back(x[1]);
  }
  const double level = opt.blowup_level * std::max(a, 1.0);
  const double tau_min = -8.0 / (d - 4.0);
  std::size_t k = 1;
  // Steps land exactly on the grid so stored values carry the full tolerance.
  for (long iter = 0; iter < 100000000L; ++iter) {
    const double next = tau_far - k * opt.grid;
    double h = std::max(dt, next - tau);
    const bool to_grid = h == next - tau;
    if (stepper.try_step(sys, x, tau, h) == ode::fail) {
      dt = h;
      continue;
    }
    if (!to_grid || std::abs(tau - next) > 1e-15) dt = h;
    if (std::abs(tau - next) <= 1e-15) {
      tau = next;
      ++k;
      if (keep) {
        out.w.push_back(x[0]);
        out.wt.push_back(x[1]);
      }
    }
    if (!std::isfinite(x[0]) || x[0] > level) {
      out.tau_b = tau + 2.0 * x[0] / x[1];
      return out;
    }
    if (tau < tau_min) return out;
  }
  throw ConvergenceError("shooting step-size underflow");
}

}  // namespace

RadialSolution shoot_once(int d, double a, const ShootOptions& opt) {
  check_dim(d);
  if (!(a > 0.0)) throw ValidationError("boundary value must be positive");
  if (!(opt.t_far > 2.0)) throw ValidationError("t_far must exceed 2");
  Shot sh = integrate(d, a, opt, true);
  RadialSolution r;
  r.d = d;
  r.a0 = a;
  r.method = "shooting";
  r.delta = snake_delta(d);
  r.series = series_coefficients(d, a, opt.series_terms);
  r.t_far = opt.t_far;
  r.tau_blowup = sh.tau_b;
  r.shots = 1;
  r.tau0 = std::log(opt.t_far);
  r.dtau = opt.grid;
  r.w = std::move(sh.w);
  r.wt = std::move(sh.wt);
  if (r.w.size() < 3) throw ConvergenceError("trajectory too short");
  r.t_min = std::exp(r.tau0 - (r.w.size() - 1) * r.dtau);
  return r;
}

RadialSolution shoot_radial(int d, const ShootOptions& opt) {
  check_dim(d);
  int shots = 0;
  auto f = [&](double a) {
    ++shots;
    return integrate(d, a, opt, false).tau_b;
  };
  // Initial bracket from one trial shot, then widen until the sign changes.
  double a = 1.0;
  double tb = f(a);
  if (!std::isfinite(tb)) {
    while (!std::isfinite(tb) && a < 1e12) tb = f(a *= 4.0);
  }
  double guess = a * std::exp(-(d - 4.0) * tb);
  double lo = guess * 0.99, hi = guess * 1.01;
  double flo = f(lo), fhi = f(hi);
  while (!(flo < 0.0)) flo = f(lo *= 0.9);
  while (!(fhi > 0.0)) fhi = f(hi *= 1.1);
  boost::uintmax_t it = 200;
  auto root = boost::math::tools::toms748_solve(
      f, lo, hi, flo, fhi, [](double x, double y) { return std::abs(x - y) <= 1e-14 * std::abs(x); }, it);
  const double astar = 0.5 * (root.first + root.second);
  RadialSolution r = shoot_once(d, astar, opt);
  r.shots = shots + 1;
  return r;
}

double u_ball(const RadialSolution& s, double r, double x) {
  if (!(r > 0.0)) throw ValidationError("radius must be positive");
  return s.u(x / r) / (r * r);
}

double cutoff_psi(double t, int deriv) {
  if (t <= 2.0) return 0.0;
  if (t >= 3.0) return deriv == 0 ? 1.0 : 0.0;
  const double x = t - 2.0;
  switch (deriv) {
    case 0: return x * x * x * (10 - 15 * x + 6 * x * x);
    case 1: return 30 * x * x * (1 - x) * (1 - x);
    case 2: return 60 * x * (1 - x) * (1 - 2 * x);
  }
  throw ValidationError("cutoff derivative order must be 0, 1 or 2");
}

IntegralCheck integral_identity_check(const RadialSolution& s) {
  const int d = s.d;
  using GK = boost::math::quadrature::gauss_kronrod<double, 61>;
  auto inner = [&](double t) {
    const double u = s.u(t);
    const double lap = cutoff_psi(t, 2) + (d - 1.0) / t * cutoff_psi(t, 1);
    return (4 * cutoff_psi(t) * u * u - u * lap) * std::pow(t, d - 1.0);
  };
  auto outer = [&](double t) {
    const double u = s.u(t);
    return 4 * u * u * std::pow(t, d - 1.0);
  };
  const double T = s.t_far;
  double err = 0.0;
  const double p1 = GK::integrate(inner, 2.0, 3.0, 15, 1e-14, &err);
  const double p2 = GK::integrate(outer, 3.0, T, 15, 1e-14, &err);
  // Beyond T: u^2 t^{d-1} = t^{3-d} sum_m b_m t^{-m(d-4)}, b = a * a.
  const auto& a = s.series.a;
  const std::size_t M = std::min<std::size_t>(a.size(), 200);
  long double tail = 0.0L, last = 0.0L;
  const long double x = std::pow(static_cast<long double>(T), 4.0L - d);
  long double p = x;
  for (std::size_t m = 0; m < M; ++m) {
    long double b = 0.0L;
    for (std::size_t k = 0; k <= m; ++k) b += a[k] * a[m - k];
    last = 4.0L * b * p / ((d - 4.0L) * (m + 1));
    tail += last;
    p *= x;
  }
  IntegralCheck c;
  c.a0 = s.a0;
  c.tail = static_cast<double>(tail);
  c.tail_bound = static_cast<double>(std::abs(last));
  c.rhs = -(p1 + p2 + c.tail) / (d - 2.0);  // c_d times the sphere area is 2/(d-2)
  c.residual = std::abs(c.rhs - c.a0) / c.a0;
  return c;
}

double ode_residual(const RadialSolution& s, double t_lo) {
  if (s.w.size() < 7) throw ValidationError("residual needs a shooting trajectory");
  const int d = s.d;
  const double h = s.dtau;
  double worst = 0.0;
  const auto& f = s.wt;
  for (std::size_t i = 3; i + 3 < s.w.size(); ++i) {
    const double tau = s.tau0 - i * h;
    if (std::exp(tau) < t_lo) break;
    // Sixth-order central difference; the grid runs toward smaller tau.
    const double wtt = (f[i - 3] - 9 * f[i - 2] + 45 * f[i - 1] - 45 * f[i + 1] + 9 * f[i + 2] - f[i + 3]) / (60 * h);
    const double a = (d - 2.0) * s.wt[i];
    const double b = 4.0 * std::exp((4.0 - d) * tau) * s.w[i] * s.w[i];
    const double scale = std::max({std::abs(wtt), std::abs(a), std::abs(b)});
    worst = std::max(worst, std::abs(wtt - a - b) / scale);
  }
  return worst;
}

double phi_low_dim(int d, double t) {
  if (!(t > 1.0)) throw ValidationError("phi_d needs t > 1");
  if (d >= 1 && d <= 3) return 2.0 / (4 - d) * t * t;
  if (d == 4) return 2.0 * t * t * std::log(t);
  throw ValidationError("phi_d is defined for d in {1,2,3,4}");
}

}  // namespace brcap
