#pragma once

#include <memory>
#include <string>
#include <vector>

#include "brcap/box.hpp"
#include "brcap/lattice.hpp"

namespace brcap {

enum class GreenMethod { neumann, fourier };

std::string to_string(GreenMethod m);
GreenMethod parse_green_method(const std::string& s);

struct GreenTable {
  StepLaw law;
  std::shared_ptr<const Box> box;  // margin 0; all sites are table entries
  std::vector<double> value;
  std::vector<double> lower;  // bracket, neumann only
  std::vector<double> upper;
  GreenMethod method = GreenMethod::neumann;
  double tol = 0.0;
  int terms = 0;  // neumann truncation N

  int radius() const { return box->radius(); }
  bool covers(const int* x) const;
  double at(const int* x) const;
  double at(const Point& x) const { return at(x.data()); }
  // Table value when covered, c_g |x|_theta^{2-d} otherwise.
  double eval(const int* x) const;
  double eval(const Point& x) const { return eval(x.data()); }
  std::uint64_t digest() const;
};

struct GreenOptions {
  double tol = 1e-8;
  int min_terms = 64;
  int max_terms = 4000;
  int walk_radius = 0;  // 0: chosen from the step law and N
};

GreenTable green_table(const StepLaw& law, int radius, GreenMethod method,
                       const GreenOptions& opt = {});

struct GreenPoint {
  double value = 0.0;
  double error = 0.0;
  int levels = 0;
};

// Fourier inversion of 1/(1-phi) over dyadic shells of the torus.
GreenPoint green_fourier(const StepLaw& law, const Point& x, double tol = 1e-9);

// Max over interior table sites of |g(x) - delta_0(x) - sum_z theta(z) g(x+z)|.
double harmonic_residual(const GreenTable& g);

struct KernelValue {
  double value = 0.0;
  double box_part = 0.0;
  double tail_part = 0.0;
};

// G(x) = sum_y g(x-y) g(y): exact sum over |y|_inf <= conv_radius plus a
// continuum tail outside that cube. Needs a table of radius
// conv_radius + |x|_inf.
KernelValue second_order_kernel(const GreenTable& g, const Point& x, int conv_radius);

// G on a box by the time-weighted separable Fourier integral (axis-separable
// laws only). eval() falls back to c_g |x|^{2-d}, so use at() or covers().
GreenTable second_order_table(const StepLaw& law, int radius);

}  // namespace brcap
