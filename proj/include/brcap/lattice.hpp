#pragma once

#include <Eigen/Dense>
#include <string>
#include <utility>
#include <vector>

#include "brcap/common.hpp"

namespace brcap {

// Integer lattice spanned by a set of vectors, kept in upper-triangular
// Hermite normal form.
class IntLattice {
 public:
  IntLattice(int dim, const std::vector<Point>& gens);
  int rank() const { return rank_; }
  long long index() const;  // |det|, 0 when rank < dim
  bool contains(const Point& x) const;

 private:
  int dim_;
  int rank_ = 0;
  std::vector<std::vector<long long>> rows_;
};

// Symmetric, finitely supported, irreducible step distribution on Z^d.
struct StepLaw {
  std::string name;
  int dim = 0;
  std::vector<Point> support;
  std::vector<double> prob;
  Eigen::MatrixXd cov;
  Eigen::MatrixXd cov_inv;
  double cov_det = 0.0;
  int period = 1;       // cyclic index of the difference lattice
  Point shift;          // any support point, used for the parity class
  bool hyperoctahedral = false;
  bool sign_symmetric = false;
  int max_jump = 0;     // sup-norm of the support

  std::uint64_t hash() const;
  // Residue of n mod period at which P(S_n = x) can be nonzero.
  int parity_class(const Point& x) const;
};

StepLaw make_step_law(const std::string& kind, int d);
StepLaw make_custom_step_law(int d, const std::vector<std::pair<Point, double>>& atoms,
                             const std::string& name = "custom");

double theta_norm(const StepLaw& law, const Point& x);
double theta_norm(const StepLaw& law, const double* x);

// Leading constant of g(x) ~ c_g |x|_theta^{2-d}.
double green_constant(const StepLaw& law);
// Leading constant of G(x) = sum_y g(x-y) g(y) ~ c_G |x|_theta^{4-d}.
double second_order_constant(const StepLaw& law);

double sup_norm(const Point& x);
double euclid_norm(const Point& x);

}  // namespace brcap
