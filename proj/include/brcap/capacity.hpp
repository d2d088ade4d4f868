#pragma once

#include <cmath>
#include <memory>
#include <string>
#include <vector>

#include "brcap/brw.hpp"
#include "brcap/field.hpp"

namespace brcap {

enum class CapMethod { sum_escape, far_field, harmonic_measure };

std::string to_string(CapMethod m);

// Exponent alpha = (d-4) / (2(d-1)) of the far-field error bound.
double rate_exponent(int d);

struct LadderPoint {
  double dist = 0.0;   // |x|
  double ratio = 0.0;  // hitting probability over g(x)
  double lower = 0.0;
  double upper = 0.0;
};

struct CapacityEstimate {
  CapMethod method = CapMethod::sum_escape;
  std::string mode;  // "mc" or "solver"
  double value = 0.0;
  double half_width = 0.0;
  double lower = 0.0;
  double upper = 0.0;
  bool mixed = false;  // brackets and binomial intervals combined
  std::uint64_t digest = 0;
  std::vector<LadderPoint> ladder;
  double slope = std::nan("");  // log-log decay of |ratio - reference|
};

// Solver fields on a box, plus an optional smaller box used to bound the
// closure error.
struct SolverRun {
  SolverContext ctx;
  FieldSet fields;
  std::shared_ptr<SolverRun> coarse;
};

SolverRun run_solver(const StepLaw& step, const OffspringLaw& law, const LatticeSet& K, int radius,
                     const SolverOptions& opt = {}, int check_radius = 0,
                     std::shared_ptr<const GreenTable> green = nullptr);

CapacityEstimate bcap_sum_escape_mc(const LatticeSet& K, const OffspringLaw& law, const StepLaw& step,
                                    const McOptions& opt);
CapacityEstimate bcap_sum_escape_solver(const SolverRun& run);

// Harmonic-measure formula over the entrance of B; B must contain K.
CapacityEstimate bcap_harmonic(const SolverRun& run, const LatticeSet& B, const SolverOptions& opt = {});
double harmonic_formula(const SolverContext& ctx, const FieldSet& f, const LatticeSet& B, const SolverOptions& opt = {});

// Far-field ratios p_c(t e_1)/g(t e_1) along the ladder; each t must be at
// least lambda * max(r_K, 1). reference > 0 enables the slope report.
CapacityEstimate bcap_far_field_solver(const SolverRun& run, const std::vector<int>& ladder, double lambda = 2.0,
                                       double reference = 0.0);
CapacityEstimate bcap_far_field_mc(const LatticeSet& K, const OffspringLaw& law, const StepLaw& step,
                                   const std::vector<int>& ladder, const McOptions& opt, double lambda = 2.0,
                                   double reference = 0.0);

struct AdjointDiagRow {
  int t = 0;
  double adj = 0.0;    // p_adj / (g Bcap)
  double inf = 0.0;    // p_I / (G Bcap)
  double minus = 0.0;  // p_- / (G Bcap)
};

struct AdjointDiag {
  double bcap = 0.0;
  double target = 0.0;  // sigma^2 / 2
  std::vector<AdjointDiagRow> rows;
  double plateau_adj = 0.0;  // far end of the ladder
  double plateau_inf = 0.0;
  double plateau_minus = 0.0;
};

AdjointDiag adjoint_ratio_diag(const SolverRun& run, const std::vector<int>& ladder, double bcap_ref = 0.0);

}  // namespace brcap
