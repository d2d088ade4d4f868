#pragma once

#include <memory>
#include <string>
#include <vector>

#include "brcap/box.hpp"
#include "brcap/brw.hpp"
#include "brcap/green.hpp"
#include "brcap/offspring.hpp"

namespace brcap {

enum class Closure { matched, dirichlet_zero };
enum class FixedPoint { newton, picard };

std::string to_string(Closure c);
Closure parse_closure(const std::string& s);

struct SolverOptions {
  Closure closure = Closure::matched;
  FixedPoint method = FixedPoint::newton;
  double tol = 1e-12;     // sup-norm of the last update
  double cg_tol = 1e-13;  // relative residual of each linear solve
  int max_newton = 80;
  int max_cg = 100000;
  int max_outer = 60;
  long max_picard = 2000000;
};

// One box, step law, offspring law and target set, with the operators and
// far-field profiles shared by all solves.
struct SolverContext {
  StepLaw step;
  OffspringLaw law;
  AdjointLaw adj;
  LatticeSet K;
  std::shared_ptr<const Box> box;
  std::shared_ptr<const Stepper> P;
  std::shared_ptr<const GreenTable> green;
  std::vector<char> in_K;
  std::vector<char> exterior;     // sites outside the interior
  std::vector<double> g_far;      // g on every site
  std::vector<double> phi_far;    // |x|_theta^{4-d} on every site
  std::vector<std::uint32_t> layer;  // interior sites with sup-norm R

  std::size_t site(const Point& x) const;
};

// free_dims < 0 picks the largest reduction allowed by the step law and K.
SolverContext make_context(const StepLaw& step, const OffspringLaw& law, const LatticeSet& K, int radius,
                           int free_dims = -1, std::shared_ptr<const GreenTable> green = nullptr);
// Same box geometry with a different reduction; fields can be transferred.
SolverContext rebox(const SolverContext& ctx, int free_dims);

struct LatticeField {
  std::string quantity;
  std::shared_ptr<const Box> box;
  std::vector<double> value;
  Closure closure = Closure::matched;
  double closure_coeff = 0.0;
  int iterations = 0;
  int linear_iterations = 0;
  double residual = 0.0;

  double at(const Point& x) const;
};

struct CgStats {
  int iterations = 0;
  double relres = 0.0;
};

// v = b + D P v on interior sites; v = ext on the other sites.
std::vector<double> solve_forward(const Stepper& P, const std::vector<double>& D, const std::vector<double>& b,
                                  const std::vector<double>& ext, double tol, int maxit, CgStats* st = nullptr);
// v = b + P (D v) on interior sites; D must vanish off the interior.
std::vector<double> solve_adjoint(const Stepper& P, const std::vector<double>& D, const std::vector<double>& b,
                                  double tol, int maxit, CgStats* st = nullptr);

LatticeField solve_p_c(const SolverContext& ctx, const SolverOptions& opt = {});
LatticeField solve_p_adj(const SolverContext& ctx, const LatticeField& p_c);
LatticeField solve_p_I(const SolverContext& ctx, const LatticeField& p_adj, const SolverOptions& opt = {});
LatticeField solve_p_minus(const SolverContext& ctx, const LatticeField& p_I);

struct FieldSet {
  LatticeField p_c, p_adj, p_I, p_minus;
  double bcap = 0.0;  // sum over K of e_K = 1 - p_-
};

FieldSet solve_all(const SolverContext& ctx, const SolverOptions& opt = {});
double bcap_from_fields(const SolverContext& ctx, const FieldSet& f);

// Killing field 1 - p_adj on interior sites off K, 0 elsewhere.
std::vector<double> survival_field(const SolverContext& ctx, const LatticeField& p_adj);
// Indicator of a site set as a vector over the box.
std::vector<double> indicator(const SolverContext& ctx, const std::vector<std::size_t>& sites);
std::vector<double> indicator(const SolverContext& ctx, const LatticeSet& S);

// Orbit-summed killed Green function, walk also killed on leaving `region`
// (all interior sites when region is empty).
std::vector<double> killed_column(const SolverContext& ctx, const std::vector<double>& D, const std::vector<double>& source,
                                  const std::vector<double>& region, const SolverOptions& opt = {});
std::vector<double> killed_row(const SolverContext& ctx, const std::vector<double>& D, const std::vector<double>& source,
                               const std::vector<double>& region, const SolverOptions& opt = {});

// Orbit-summed harmonic measure of B from the source orbit:
// exit: sum_{x' in O} H^B(x', z) for z outside B;
// entrance: sum_{x' in O} H^B(z, x') for z outside B.
std::vector<double> exit_measure(const SolverContext& ctx, const std::vector<double>& D, const std::vector<double>& B,
                                 const std::vector<double>& source, const SolverOptions& opt = {});
std::vector<double> entrance_measure(const SolverContext& ctx, const std::vector<double>& D, const std::vector<double>& B,
                                     const std::vector<double>& source, const SolverOptions& opt = {});

struct IdentityReport {
  double pkx_column = 0.0;  // p_c against the killed-walk column sum
  double pkx_row = 0.0;     // p_c against killed-walk rows at probes
  double q_gr1_row = 0.0;   // p_I against killed-walk rows at probes
  double exit1 = 0.0;
  double exit2 = 0.0;
  double bcap_sum = 0.0;
  double bcap_harmonic = 0.0;
  double bcap_ek = 0.0;     // relative gap between the two
  double hbk_margin = 0.0;  // min over probes of exit mass - (1-p_adj) e_K
  double green_excess = 0.0;  // max of G_K - g_box over probe columns
};

// B is a hyperoctahedral set containing K, with a step-range margin inside
// the box interior. Probes are sites inside B and outside B.
IdentityReport check_identities(const SolverContext& ctx, const FieldSet& f, const LatticeSet& B,
                                const std::vector<Point>& probes_in_B, const std::vector<Point>& probes_out_B,
                                const SolverOptions& opt = {});

struct RatioCurve {
  std::vector<double> s;
  std::vector<double> deficit_box;   // max 1 - G_K / g_box
  std::vector<double> deficit_free;  // max 1 - G_K / g on sites well inside the box
};

// Killed Green function against the box and free Green functions for axis
// targets y = t e_1, maximized over |x|, |y| >= s r.
RatioCurve green_ratio_curve(const SolverContext& ctx, const FieldSet& f, double r, const std::vector<double>& s_values,
                             const std::vector<int>& targets, const SolverOptions& opt = {});

}  // namespace brcap
