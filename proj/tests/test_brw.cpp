#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "brcap/field.hpp"

using namespace brcap;

namespace {

Point axis(int d, int k, int i = 0) {
  Point x(d, 0);
  x[i] = k;
  return x;
}

// The solver value lies in the bracket widened by z binomial standard errors.
bool covers(const HitEstimate& h, double v, double z = 3.0) {
  const double se = std::sqrt(std::max(h.p_hat * (1.0 - h.p_hat), 1e-12) / double(h.samples));
  return v >= h.lower - z * se && v <= h.upper + z * se;
}

struct Fixture {
  StepLaw step = make_step_law("simple", 5);
  OffspringLaw law = make_offspring_law("binary_critical");
  LatticeSet K = LatticeSet(5, {Point(5, 0)});
  SolverContext ctx = make_context(step, law, K, 12);
  FieldSet f = solve_all(ctx);
};

const Fixture& fixture() {
  static const Fixture f;
  return f;
}

}  // namespace

TEST_CASE("lattice balls") {
  for (double r : {1.0, 2.0, 2.5}) {
    std::size_t closed = 0, open = 0;
    const int R = static_cast<int>(std::ceil(r));
    Point x(5, -R);
    for (;;) {
      int n2 = 0;
      for (int v : x) n2 += v * v;
      closed += n2 <= r * r;
      open += n2 < r * r;
      int i = 0;
      while (i < 5 && ++x[i] > R) x[i++] = -R;
      if (i == 5) break;
    }
    CHECK(LatticeSet::ball(5, r, true).size() == closed);
    CHECK(LatticeSet::ball(5, r, false).size() == open);
  }
  const LatticeSet B = LatticeSet::ball(5, 2, true);
  CHECK(B.size() == 221);
  CHECK(B.on_sphere(2.0).size() == 90);
  CHECK(B.hyperoctahedral());
  CHECK(B.contains({1, -1, 1, -1, 0}));
  CHECK_FALSE(B.contains({2, 1, 0, 0, 0}));
  CHECK_FALSE(LatticeSet(5, {axis(5, 1)}).hyperoctahedral());
  CHECK(LatticeSet(5, {axis(5, 1), axis(5, 0)}).digest() == LatticeSet(5, {axis(5, 0), axis(5, 1)}).digest());
}

TEST_CASE("start inside the set") {
  const auto& F = fixture();
  McOptions o;
  o.samples = 100;
  const HitEstimate h = hit_probability(TreeKind::critical, F.K, Point(5, 0), F.law, F.step, o);
  CHECK(h.p_hat == 1.0);
  CHECK(h.lower == 1.0);
  CHECK(h.upper == 1.0);
  CHECK(h.ci_half == 0.0);
  const HitEstimate i = p_infinite(F.K, Point(5, 0), F.law, F.step, o);
  CHECK(i.p_hat == 1.0);
}

TEST_CASE("critical hitting probability against the solver") {
  const auto& F = fixture();
  McOptions o;
  o.samples = 20000;
  o.seed = 5;
  for (const Point& x : {axis(5, 1), axis(5, 2), Point{1, 1, 0, 0, 0}, Point{2, 1, 1, 0, 0}, axis(5, 4)}) {
    const HitEstimate h = hit_probability(TreeKind::critical, F.K, x, F.law, F.step, o);
    CHECK(covers(h, F.f.p_c.at(x)));
  }
}

TEST_CASE("adjoint and infinite trees against the solver") {
  const auto& F = fixture();
  McOptions o;
  o.samples = 4000;
  o.seed = 6;
  o.max_vertices = 20000;
  const Point x = axis(5, 2);
  const HitEstimate a = hit_probability(TreeKind::adjoint, F.K, x, F.law, F.step, o);
  CHECK(covers(a, F.f.p_adj.at(x)));
  const HitEstimate pi = p_infinite(F.K, x, F.law, F.step, o);
  CHECK(covers(pi, F.f.p_I.at(x)));
  const HitEstimate e = escape_probability(F.K, x, F.law, F.step, o);
  CHECK(covers(e, 1.0 - F.f.p_minus.at(x)));
  // 1 - p_I = (1 - p_adj)(1 - p_-) within the combined intervals.
  const double lo = (1.0 - a.ci_high) * e.ci_low, hi = (1.0 - a.ci_low) * e.ci_high;
  CHECK(1.0 - pi.ci_high <= hi);
  CHECK(1.0 - pi.ci_low >= lo);
}

TEST_CASE("escape far from the set") {
  const auto& F = fixture();
  McOptions o;
  o.samples = 2000;
  o.seed = 8;
  o.remainder_safety = 2.0;
  o.r_stop = 64.0;
  const HitEstimate e = escape_probability(F.K, axis(5, 20), F.law, F.step, o);
  CHECK(e.lower > 0.9);
  CHECK(e.upper <= 1.0);
  CHECK(e.ci_low >= 0.0);
}

TEST_CASE("estimates do not depend on the thread count") {
  const auto& F = fixture();
  McOptions o;
  o.samples = 3000;
  o.seed = 17;
  set_thread_count(1);
  const HitEstimate a = hit_probability(TreeKind::critical, F.K, axis(5, 3), F.law, F.step, o);
  const HitEstimate ea = escape_probability(F.K, axis(5, 1), F.law, F.step, o);
  set_thread_count(4);
  const HitEstimate b = hit_probability(TreeKind::critical, F.K, axis(5, 3), F.law, F.step, o);
  const HitEstimate eb = escape_probability(F.K, axis(5, 1), F.law, F.step, o);
  set_thread_count(1);
  CHECK(a.p_hat == b.p_hat);
  CHECK(a.hits == b.hits);
  CHECK(a.capped == b.capped);
  CHECK(ea.p_hat == eb.p_hat);
  CHECK(ea.lower == eb.lower);
  CHECK(ea.upper == eb.upper);
}

TEST_CASE("hit bounds decay with distance") {
  const auto& F = fixture();
  double prev = 2.0, prev_s = 1e9;
  for (double t : {2.0, 4.0, 8.0, 16.0}) {
    const double c = critical_hit_bound(F.step, F.K, t, 2.0), s = spine_hit_bound(F.step, F.law, F.K, t, 2.0);
    CHECK(c > 0.0);
    CHECK(c < prev);
    CHECK(s < prev_s);
    prev = c;
    prev_s = s;
  }
}
