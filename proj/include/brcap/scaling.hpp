#pragma once

#include <string>
#include <vector>

#include "brcap/capacity.hpp"

namespace brcap {

struct CTheta {
  double from_cg = 0.0;       // 2 / (sigma^2 c_g)
  double from_det = 0.0;      // 4 pi^{d/2} sqrt(det M) / (sigma^2 Gamma((d-2)/2))
  double value = 0.0;
};

CTheta c_theta(const OffspringLaw& law, const StepLaw& step);

// c_theta BScap(M^{-1/2} B(0, rho)) = c_theta (rho / sqrt(m))^{d-4} a0 for M = m I.
double continuum_target(double rho, const OffspringLaw& law, const StepLaw& step, double a0);

enum class ScalingMethod { solver, mc };

struct ScalingOptions {
  ScalingMethod method = ScalingMethod::solver;
  double box_factor = 4.0;  // solver box radius / (n rho)
  SolverOptions solver;
  McOptions mc;
  double mc_lambda = 4.0;   // far-field probe at mc_lambda n rho
  double a0 = 0.0;          // 0: computed by find_a0
  double envelope = 0.0;    // C in Bcap(B(0,r)) <= C r^{d-4}; 0: four times the rho = 1 target
};

struct ScalingRow {
  int n = 0;
  int box_radius = 0;
  std::size_t points = 0;     // |nK ∩ Z^d|
  std::size_t on_sphere = 0;  // lattice points exactly on the sphere of radius n rho
  double estimate = 0.0;
  double uncertainty = 0.0;
  double rescaled = 0.0;      // estimate / n^{d-4}
  double ratio_to_target = 0.0;
  double cauchy_diff = 0.0;   // |rescaled_i - rescaled_{i-1}|, 0 for the first row
  std::string method;
};

struct ScalingRun {
  int d = 0;
  double rho = 0.0;
  double a0 = 0.0;
  CTheta ctheta;
  double target = 0.0;
  double envelope = 0.0;  // C rho^{d-4}
  std::vector<ScalingRow> rows;
  std::vector<std::string> skipped;
  bool positive = true;
  bool bounded = true;
  bool cauchy_decreasing = true;
  bool gap_nonincreasing = true;  // trend warning only
};

ScalingRun run_scaling(double rho, const std::vector<int>& ladder, const OffspringLaw& law, const StepLaw& step,
                       const ScalingOptions& opt = {});

}  // namespace brcap
