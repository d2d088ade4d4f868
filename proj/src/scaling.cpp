#include "brcap/scaling.hpp"

#include <cmath>

#include "brcap/snake.hpp"

namespace brcap {

CTheta c_theta(const OffspringLaw& law, const StepLaw& step) {
  const int d = step.dim;
  if (d < 5) throw ValidationError("c_theta requires d >= 5");
  CTheta c;
  c.from_cg = 2.0 / (law.sigma2 * green_constant(step));
  c.from_det = 4.0 * std::pow(M_PI, d / 2.0) * std::sqrt(step.cov_det) / (law.sigma2 * std::tgamma((d - 2) / 2.0));
  if (std::abs(c.from_cg - c.from_det) > 1e-12 * c.from_det) throw ConvergenceError("c_theta expressions disagree");
  c.value = c.from_det;
  return c;
}

double continuum_target(double rho, const OffspringLaw& law, const StepLaw& step, double a0) {
  const int d = step.dim;
  if (!(rho > 0.0)) throw ValidationError("rho must be positive");
  const double m = step.cov(0, 0);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) {
      const double want = i == j ? m : 0.0;
      if (std::abs(step.cov(i, j) - want) > 1e-12) throw ValidationError("continuum target needs an isotropic covariance");
    }
  return c_theta(law, step).value * std::pow(rho / std::sqrt(m), d - 4.0) * a0;
}

ScalingRun run_scaling(double rho, const std::vector<int>& ladder, const OffspringLaw& law, const StepLaw& step,
                       const ScalingOptions& opt) {
  const int d = step.dim;
  if (ladder.empty()) throw ValidationError("empty ladder");
  for (std::size_t i = 1; i < ladder.size(); ++i)
    if (ladder[i] <= ladder[i - 1]) throw ValidationError("ladder must be strictly increasing");
  if (ladder.front() < 1) throw ValidationError("ladder entries must be positive");
  ScalingRun run;
  run.d = d;
  run.rho = rho;
  run.a0 = opt.a0 > 0.0 ? opt.a0 : find_a0(d).a0;
  run.ctheta = c_theta(law, step);
  run.target = continuum_target(rho, law, step, run.a0);
  const double C = opt.envelope > 0.0 ? opt.envelope : 4.0 * continuum_target(1.0, law, step, run.a0);
  run.envelope = C * std::pow(rho, d - 4.0);

  for (int n : ladder) {
    const double r = n * rho;
    LatticeSet K = LatticeSet::ball(d, r, true);
    ScalingRow row;
    row.n = n;
    row.points = K.size();
    row.on_sphere = K.on_sphere(r).size();
    try {
      if (opt.method == ScalingMethod::solver) {
        int R = static_cast<int>(std::ceil(opt.box_factor * r));
        R = std::max(R, static_cast<int>(std::ceil(r)) + 2 * step.max_jump + 1);
        row.box_radius = R;
        SolverRun sr = run_solver(step, law, K, R, opt.solver);
        CapacityEstimate e = bcap_sum_escape_solver(sr);
        row.estimate = e.value;
        row.uncertainty = e.half_width;
        row.method = "sum_escape/solver";
      } else {
        const int t = static_cast<int>(std::ceil(opt.mc_lambda * std::max(r, 1.0)));
        CapacityEstimate e = bcap_far_field_mc(K, law, step, {t}, opt.mc, opt.mc_lambda);
        row.estimate = e.value;
        row.uncertainty = 0.5 * (e.upper - e.lower);
        row.method = "far_field/mc";
      }
    } catch (const BudgetError& ex) {
      run.skipped.push_back("n=" + std::to_string(n) + ": " + ex.what());
      continue;
    } catch (const ConvergenceError& ex) {
      run.skipped.push_back("n=" + std::to_string(n) + ": " + ex.what());
      continue;
    }
    row.rescaled = row.estimate / std::pow(double(n), d - 4.0);
    row.ratio_to_target = row.rescaled / run.target;
    if (!run.rows.empty()) row.cauchy_diff = std::abs(row.rescaled - run.rows.back().rescaled);
    run.rows.push_back(row);
  }
  for (std::size_t i = 0; i < run.rows.size(); ++i) {
    const auto& r = run.rows[i];
    run.positive = run.positive && r.rescaled > 0.0;
    run.bounded = run.bounded && r.rescaled <= run.envelope;
    if (i >= 2) run.cauchy_decreasing = run.cauchy_decreasing && r.cauchy_diff < run.rows[i - 1].cauchy_diff;
    if (i >= 1)
      run.gap_nonincreasing = run.gap_nonincreasing &&
                              std::abs(r.rescaled - run.target) <= std::abs(run.rows[i - 1].rescaled - run.target);
  }
  return run;
}

}  // namespace brcap
