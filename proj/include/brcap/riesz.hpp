#pragma once

#include <string>
#include <vector>

namespace brcap {

// Point cloud with quadrature weights (cell volumes or surface areas).
struct DiscretizedCompact {
  int dim = 0;
  std::string descriptor;
  double h = 0.0;
  bool surface = false;
  std::vector<double> x;  // size() * dim coordinates
  std::vector<double> w;

  std::size_t size() const { return w.size(); }
  const double* point(std::size_t i) const { return &x[i * dim]; }
};

// Cell-centred grid h (k + 1/2) restricted to the closed ball.
DiscretizedCompact mesh_ball(int d, double radius, double h, const std::vector<double>& center = {});
// Radial projection of a cube-face grid with m cells per face edge.
DiscretizedCompact mesh_sphere(int d, double radius, int m, const std::vector<double>& center = {});
DiscretizedCompact mesh_box(int d, const std::vector<double>& lo, const std::vector<double>& hi, double h);
// Explicit points, each carrying a cell of volume h^d.
DiscretizedCompact mesh_points(int d, const std::vector<std::vector<double>>& pts, double h);
DiscretizedCompact translate(const DiscretizedCompact& s, const std::vector<double>& shift);
DiscretizedCompact merge(const DiscretizedCompact& a, const DiscretizedCompact& b);

// C_{d,gamma} = pi^{d/2 - gamma} Gamma(gamma/2) / Gamma((d - gamma)/2).
double riesz_constant(int d, double gamma);

struct RieszOptions {
  double tol = 1e-7;  // KKT residual relative to the energy
  int max_iter = 50000;
};

struct EquilibriumResult {
  double gamma = 0.0;
  double energy = 0.0;
  double capacity = 0.0;
  double kernel_constant = 0.0;
  double kkt = 0.0;
  int iterations = 0;
  bool converged = false;
  std::vector<double> nu;
};

EquilibriumResult riesz_capacity(const DiscretizedCompact& set, double gamma, const RieszOptions& opt = {});

struct Refinement {
  double coarse = 0.0;
  double fine = 0.0;
  double extrapolated = 0.0;  // Richardson with the given order in h
};

Refinement richardson(double coarse, double fine, double h_coarse, double h_fine, double order = 1.0);

struct BscapRieszRatio {
  int d = 0;
  double bscap = 0.0;
  double cap = 0.0;
  double ratio = 0.0;
};

// BScap(B(0,1)) / Cap_{d-4}(B(0,1)).
BscapRieszRatio bscap_riesz_ratio(int d, const EquilibriumResult& ball, double a0);

}  // namespace brcap
