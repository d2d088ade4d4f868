#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <map>

#include "brcap/capacity.hpp"

using namespace brcap;

namespace {

const SolverRun& run(const std::string& law, double rho, int R) {
  static std::map<std::tuple<std::string, double, int>, SolverRun> cache;
  auto key = std::make_tuple(law, rho, R);
  auto it = cache.find(key);
  if (it != cache.end()) return it->second;
  SolverRun r = run_solver(make_step_law("simple", 5), make_offspring_law(law), LatticeSet::ball(5, rho, true), R);
  return cache.emplace(key, std::move(r)).first->second;
}

}  // namespace

TEST_CASE("rate exponent") {
  CHECK(rate_exponent(5) == doctest::Approx(0.125).epsilon(1e-15));
  CHECK(rate_exponent(6) == doctest::Approx(0.2).epsilon(1e-15));
  CHECK_THROWS_AS(rate_exponent(4), ValidationError);
}

TEST_CASE("escape sum by simulation against the solver") {
  const auto& r = run("binary_critical", 0.0, 16);
  const CapacityEstimate s = bcap_sum_escape_solver(r);
  McOptions o;
  o.samples = 1500;
  o.seed = 31;
  o.max_vertices = 20000;
  o.remainder_safety = 2.0;
  const CapacityEstimate m = bcap_sum_escape_mc(r.ctx.K, r.ctx.law, r.ctx.step, o);
  CHECK(m.lower <= m.value);
  CHECK(m.value <= m.upper);
  CHECK(s.value >= m.lower);
  CHECK(s.value <= m.upper);
}

TEST_CASE("translated singletons have compatible escape estimates") {
  const StepLaw step = make_step_law("simple", 5);
  const OffspringLaw law = make_offspring_law("binary_critical");
  McOptions o;
  o.samples = 2000;
  o.seed = 4;
  o.max_vertices = 5000;
  Point e1(5, 0);
  e1[0] = 1;
  const HitEstimate a = escape_probability(LatticeSet(5, {Point(5, 0)}), Point(5, 0), law, step, o);
  const HitEstimate b = escape_probability(LatticeSet(5, {e1}), e1, law, step, o);
  CHECK(a.ci_low <= b.ci_high);
  CHECK(b.ci_low <= a.ci_high);
}

TEST_CASE("harmonic measure formula matches the escape sum") {
  for (double rho : {0.0, 1.0}) {
    CAPTURE(rho);
    const auto& r = run("binary_critical", rho, 12);
    const double s = bcap_sum_escape_solver(r).value;
    const LatticeSet B1 = LatticeSet::ball(5, std::max(rho, 1.0), true), B2 = LatticeSet::ball(5, rho + 3, true);
    CHECK(harmonic_formula(r.ctx, r.fields, B1) == doctest::Approx(s).epsilon(1e-6));
    CHECK(harmonic_formula(r.ctx, r.fields, B2) == doctest::Approx(s).epsilon(1e-6));
    const CapacityEstimate h = bcap_harmonic(r, B2);
    CHECK(h.lower <= h.value);
    CHECK(h.value <= h.upper);
  }
  const auto& r = run("binary_critical", 1.0, 12);
  CHECK_THROWS_AS(harmonic_formula(r.ctx, r.fields, LatticeSet(5, {Point(5, 0)})), ValidationError);
}

TEST_CASE("capacity grows with the set") {
  const double a = run("binary_critical", 0.0, 12).fields.bcap, b = run("binary_critical", 1.0, 12).fields.bcap,
               c = run("binary_critical", 2.0, 12).fields.bcap;
  CHECK(a < b);
  CHECK(b < c);
  // Subadditivity over the eleven points of the unit ball.
  CHECK(b < 11 * a);
}

TEST_CASE("far-field ladder") {
  const auto& r = run("binary_critical", 0.0, 16);
  const double s = bcap_sum_escape_solver(r).value;
  const CapacityEstimate f = bcap_far_field_solver(r, {2, 4, 8, 12}, 2.0, s);
  REQUIRE(f.ladder.size() == 4);
  double prev = 1e9;
  for (std::size_t k = 1; k < f.ladder.size(); ++k) {
    const double step = std::abs(f.ladder[k].ratio - f.ladder[k - 1].ratio);
    CHECK(step < prev);
    prev = step;
  }
  CHECK(f.value == doctest::Approx(s).epsilon(0.05));
  CHECK(f.lower <= f.value);
  CHECK(f.value <= f.upper);
  CHECK_THROWS_AS(bcap_far_field_solver(run("binary_critical", 2.0, 12), {3}, 2.0), ValidationError);
}

TEST_CASE("adjoint and spine ratios approach half the variance") {
  for (const char* name : {"binary_critical", "geometric_half"}) {
    CAPTURE(name);
    const auto& r = run(name, 1.0, 16);
    const AdjointDiag a = adjoint_ratio_diag(r, {4, 6, 8, 12});
    CHECK(a.target == doctest::Approx(r.ctx.law.sigma2 / 2.0));
    CHECK(a.plateau_adj == doctest::Approx(a.target).epsilon(0.15));
    CHECK(a.plateau_inf == doctest::Approx(a.plateau_minus).epsilon(0.15));
    CHECK(a.plateau_inf == doctest::Approx(a.target).epsilon(0.15));
  }
}
