#include "brcap/riesz.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <deque>
#include <numeric>

#include "brcap/common.hpp"

namespace brcap {

namespace {

std::vector<double> origin_or(const std::vector<double>& c, int d) {
  if (c.empty()) return std::vector<double>(d, 0.0);
  if (static_cast<int>(c.size()) != d) throw ValidationError("center has wrong dimension");
  return c;
}

double unit_ball_volume(int k) { return std::pow(M_PI, k / 2.0) / std::tgamma(k / 2.0 + 1.0); }

}  // namespace

DiscretizedCompact mesh_ball(int d, double radius, double h, const std::vector<double>& center) {
  if (d < 1) throw ValidationError("dimension must be positive");
  if (!(radius > 0.0) || !(h > 0.0)) throw ValidationError("radius and mesh size must be positive");
  const auto c = origin_or(center, d);
  DiscretizedCompact s;
  s.dim = d;
  s.h = h;
  s.descriptor = "ball";
  const int K = static_cast<int>(std::ceil(radius / h));
  std::vector<int> k(d, -K);
  const double vol = std::pow(h, d);
  for (;;) {
    double r2 = 0.0;
    for (int i = 0; i < d; ++i) {
      const double v = h * (k[i] + 0.5);
      r2 += v * v;
    }
    if (r2 <= radius * radius) {
      for (int i = 0; i < d; ++i) s.x.push_back(c[i] + h * (k[i] + 0.5));
      s.w.push_back(vol);
    }
    int i = 0;
    while (i < d && ++k[i] == K) k[i++] = -K;
    if (i == d) break;
  }
  if (s.w.empty()) throw ValidationError("mesh too coarse for the ball");
  return s;
}

DiscretizedCompact mesh_sphere(int d, double radius, int m, const std::vector<double>& center) {
  if (d < 2) throw ValidationError("sphere needs d >= 2");
  if (!(radius > 0.0) || m < 1) throw ValidationError("bad sphere mesh parameters");
  const auto c = origin_or(center, d);
  DiscretizedCompact s;
  s.dim = d;
  s.surface = true;
  s.h = 2.0 * radius / m;
  s.descriptor = "sphere";
  const double cell = std::pow(2.0 / m, d - 1);
  std::vector<double> u(d);
  for (int face = 0; face < 2 * d; ++face) {
    const int axis = face / 2;
    std::vector<int> k(d - 1, 0);
    for (;;) {
      for (int i = 0, j = 0; i < d; ++i) u[i] = i == axis ? (face % 2 ? 1.0 : -1.0) : -1.0 + (2.0 * k[j++] + 1.0) / m;
      double n2 = 0.0;
      for (double v : u) n2 += v * v;
      const double n = std::sqrt(n2);
      for (int i = 0; i < d; ++i) s.x.push_back(c[i] + radius * u[i] / n);
      s.w.push_back(std::pow(radius, d - 1) * cell / std::pow(n, d));
      int i = 0;
      while (i < d - 1 && ++k[i] == m) k[i++] = 0;
      if (i == d - 1) break;
    }
  }
  return s;
}

DiscretizedCompact mesh_box(int d, const std::vector<double>& lo, const std::vector<double>& hi, double h) {
  if (static_cast<int>(lo.size()) != d || static_cast<int>(hi.size()) != d) throw ValidationError("box corners have wrong dimension");
  if (!(h > 0.0)) throw ValidationError("mesh size must be positive");
  DiscretizedCompact s;
  s.dim = d;
  s.h = h;
  s.descriptor = "box";
  std::vector<int> n(d);
  std::vector<double> step(d);
  double vol = 1.0;
  for (int i = 0; i < d; ++i) {
    if (!(hi[i] > lo[i])) throw ValidationError("empty box");
    n[i] = std::max(1, static_cast<int>(std::lround((hi[i] - lo[i]) / h)));
    step[i] = (hi[i] - lo[i]) / n[i];
    vol *= step[i];
  }
  std::vector<int> k(d, 0);
  for (;;) {
    for (int i = 0; i < d; ++i) s.x.push_back(lo[i] + step[i] * (k[i] + 0.5));
    s.w.push_back(vol);
    int i = 0;
    while (i < d && ++k[i] == n[i]) k[i++] = 0;
    if (i == d) break;
  }
  return s;
}

DiscretizedCompact mesh_points(int d, const std::vector<std::vector<double>>& pts, double h) {
  if (pts.empty()) throw ValidationError("empty point set");
  if (!(h > 0.0)) throw ValidationError("mesh size must be positive");
  DiscretizedCompact s;
  s.dim = d;
  s.h = h;
  s.descriptor = "points";
  for (const auto& p : pts) {
    if (static_cast<int>(p.size()) != d) throw ValidationError("point has wrong dimension");
    s.x.insert(s.x.end(), p.begin(), p.end());
    s.w.push_back(std::pow(h, d));
  }
  return s;
}

DiscretizedCompact translate(const DiscretizedCompact& s, const std::vector<double>& shift) {
  if (static_cast<int>(shift.size()) != s.dim) throw ValidationError("shift has wrong dimension");
  DiscretizedCompact t = s;
  for (std::size_t i = 0; i < t.size(); ++i)
    for (int k = 0; k < t.dim; ++k) t.x[i * t.dim + k] += shift[k];
  return t;
}

DiscretizedCompact merge(const DiscretizedCompact& a, const DiscretizedCompact& b) {
  if (a.dim != b.dim || a.surface != b.surface) throw ValidationError("cannot merge different cloud types");
  DiscretizedCompact m = a;
  m.descriptor = a.descriptor + "+" + b.descriptor;
  m.h = std::max(a.h, b.h);
  m.x.insert(m.x.end(), b.x.begin(), b.x.end());
  m.w.insert(m.w.end(), b.w.begin(), b.w.end());
  return m;
}

double riesz_constant(int d, double gamma) {
  if (!(gamma > 0.0 && gamma < d)) throw ValidationError("gamma must lie in (0, d)");
  return std::pow(M_PI, d / 2.0 - gamma) * std::tgamma(gamma / 2.0) / std::tgamma((d - gamma) / 2.0);
}

namespace {

// Euclidean projection onto the probability simplex.
void project_simplex(Eigen::VectorXd& v) {
  const Eigen::Index n = v.size();
  std::vector<double> u(v.data(), v.data() + n);
  std::sort(u.begin(), u.end(), std::greater<>());
  double cum = 0.0, theta = 0.0;
  for (Eigen::Index j = 0; j < n; ++j) {
    cum += u[j];
    const double t = (cum - 1.0) / (j + 1);
    if (u[j] - t > 0.0) theta = t;
  }
  for (Eigen::Index i = 0; i < n; ++i) v[i] = std::max(0.0, v[i] - theta);
}

double kkt_residual(const Eigen::VectorXd& nu, const Eigen::VectorXd& phi, double E) {
  double r = 0.0;
  const double thr = 1e-9 / nu.size();
  for (Eigen::Index i = 0; i < nu.size(); ++i) {
    r = std::max(r, (E - phi[i]) / E);
    if (nu[i] > thr) r = std::max(r, (phi[i] - E) / E);
  }
  return r;
}

}  // namespace

EquilibriumResult riesz_capacity(const DiscretizedCompact& set, double gamma, const RieszOptions& opt) {
  const int d = set.dim;
  const std::size_t n = set.size();
  if (n == 0) throw ValidationError("empty point cloud");
  const int k = set.surface ? d - 1 : d;
  if (!(gamma > 0.0 && gamma < d)) throw ValidationError("gamma must lie in (0, d)");
  if (!(gamma < k)) throw ValidationError("gamma must be below the dimension of the set");
  for (double w : set.w)
    if (!(w > 0.0)) throw ValidationError("weights must be positive");
  EquilibriumResult res;
  res.gamma = gamma;
  res.kernel_constant = riesz_constant(d, gamma);
  const double C = res.kernel_constant;

  Eigen::MatrixXd K(n, n);
  parallel_chunks(n, 64, [&](std::size_t i0, std::size_t i1) {
    for (std::size_t i = i0; i < i1; ++i) {
      const double* xi = set.point(i);
      for (std::size_t j = 0; j < n; ++j) {
        if (i == j) {
          // Kernel averaged over a k-ball of the cell's measure.
          const double rho = std::pow(set.w[i] / unit_ball_volume(k), 1.0 / k);
          K(i, i) = C * k * std::pow(rho, -gamma) / (k - gamma);
          continue;
        }
        const double* xj = set.point(j);
        double r2 = 0.0;
        for (int c = 0; c < d; ++c) r2 += (xi[c] - xj[c]) * (xi[c] - xj[c]);
        K(i, j) = C * std::pow(r2, -0.5 * gamma);
      }
    }
  });

  // Spectral projected gradient with nonmonotone Armijo backtracking.
  Eigen::VectorXd x = Eigen::VectorXd::Constant(n, 1.0 / n);
  Eigen::VectorXd Kx = K * x;
  double f = x.dot(Kx);
  Eigen::VectorXd g = 2.0 * Kx;
  double alpha = 1.0 / std::max(1e-300, g.cwiseAbs().maxCoeff());
  std::deque<double> hist{f};
  int it = 0;
  for (; it < opt.max_iter; ++it) {
    res.kkt = kkt_residual(x, Kx, f);
    if (res.kkt < opt.tol) break;
    Eigen::VectorXd dir = x - alpha * g;
    project_simplex(dir);
    dir -= x;
    if (dir.cwiseAbs().maxCoeff() == 0.0) break;
    const Eigen::VectorXd Kd = K * dir;
    const double gd = g.dot(dir), dKd = dir.dot(Kd);
    const double fmax = *std::max_element(hist.begin(), hist.end());
    double lam = 1.0;
    while (f + lam * gd + lam * lam * dKd > fmax + 1e-4 * lam * gd && lam > 1e-20) lam *= 0.5;
    x += lam * dir;
    Kx += lam * Kd;
    f = x.dot(Kx);
    g = 2.0 * Kx;
    const double ss = lam * lam * dir.squaredNorm();
    const double sy = 2.0 * lam * lam * dKd;
    alpha = sy > 0.0 ? std::clamp(ss / sy, 1e-12, 1e12) : 1e12;
    hist.push_back(f);
    if (hist.size() > 10) hist.pop_front();
  }
  res.iterations = it;
  res.converged = res.kkt < opt.tol;
  res.energy = f;
  res.capacity = 1.0 / f;
  res.nu.assign(x.data(), x.data() + n);
  if (!res.converged) throw ConvergenceError("equilibrium measure did not converge");
  return res;
}

Refinement richardson(double coarse, double fine, double h_coarse, double h_fine, double order) {
  if (!(h_fine < h_coarse)) throw ValidationError("fine mesh must be finer");
  Refinement r;
  r.coarse = coarse;
  r.fine = fine;
  const double q = std::pow(h_coarse / h_fine, order);
  r.extrapolated = (q * fine - coarse) / (q - 1.0);
  return r;
}

BscapRieszRatio bscap_riesz_ratio(int d, const EquilibriumResult& ball, double a0) {
  if (d < 5) throw ValidationError("ratio needs d >= 5");
  if (std::abs(ball.gamma - (d - 4.0)) > 1e-12) throw ValidationError("ball capacity must use gamma = d - 4");
  BscapRieszRatio r;
  r.d = d;
  r.bscap = a0;
  r.cap = ball.capacity;
  r.ratio = a0 / ball.capacity;
  return r;
}

}  // namespace brcap
