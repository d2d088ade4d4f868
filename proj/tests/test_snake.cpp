#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "brcap/common.hpp"
#include "brcap/snake.hpp"

using namespace brcap;

TEST_CASE("series coefficients in d=6 are 6(n+1)") {
  const SeriesResult s = series_coefficients(6, 6.0, 200);
  for (int n = 0; n <= 200; ++n) CHECK(double(s.a[n]) == doctest::Approx(6.0 * (n + 1)).epsilon(1e-14));
  CHECK(s.radius == doctest::Approx(1.0).epsilon(1e-2));
}

TEST_CASE("first coefficient") {
  // d=5: delta = 1/3, so a_1 = a_0^2.
  for (double a0 : {0.5, 1.0, 1.8}) {
    const SeriesResult s = series_coefficients(5, a0, 3);
    CHECK(double(s.a[1]) == doctest::Approx(a0 * a0).epsilon(1e-15));
  }
  const SeriesResult s7 = series_coefficients(7, 2.0, 1);
  const double delta = 3.0 / 5.0;
  CHECK(double(s7.a[1]) == doctest::Approx(4.0 / (delta * (delta + 1.0)) / 25.0 * 4.0).epsilon(1e-15));
  CHECK_THROWS_AS(series_coefficients(4, 1.0, 3), ValidationError);
  CHECK_THROWS_AS(series_coefficients(5, -1.0, 3), ValidationError);
}

TEST_CASE("partial sums reach the closed form") {
  const SeriesResult s = series_coefficients(6, 6.0, 400);
  double err = 0.0;
  CHECK(series_u(s, 2.0, &err) == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
  CHECK(err < 1e-10);
  CHECK(series_u(s, 3.0) == doctest::Approx(6.0 / 64.0).epsilon(1e-12));
  CHECK_THROWS_AS(series_u(s, 1.001), ConvergenceError);
}

TEST_CASE("boundary value a0") {
  const A0Result r6 = find_a0(6);
  CHECK(r6.conclusive);
  CHECK(r6.a0 == doctest::Approx(6.0).epsilon(1e-5));
  CHECK(r6.lo <= r6.a0);
  CHECK(r6.a0 <= r6.hi);

  const A0Result r5 = find_a0(5);
  const RadialSolution sh = shoot_radial(5);
  CHECK(r5.a0 == doctest::Approx(sh.a0).epsilon(1e-3));
  for (double eps : {1e-2, 1e-3}) {
    CAPTURE(eps);
    CHECK(find_a0(5, eps).a0 == doctest::Approx(r5.a0).epsilon(1e-6));
  }
}

TEST_CASE("shooting reproduces the d=6 closed form") {
  const RadialSolution s = shoot_radial(6);
  CHECK(s.a0 == doctest::Approx(6.0).epsilon(1e-8));
  CHECK(s.u(2.0) == doctest::Approx(2.0 / 3.0).epsilon(1e-6));
  CHECK(s.u(3.0) == doctest::Approx(6.0 / 64.0).epsilon(1e-6));
  const RadialSolution c = closed_form_d6();
  for (double t : {1.05, 1.5, 4.0, 50.0}) {
    const double exact = 6.0 / ((t * t - 1.0) * (t * t - 1.0));
    CHECK(c.u(t) == doctest::Approx(exact).epsilon(1e-12));
    CHECK(s.u(t) == doctest::Approx(exact).epsilon(1e-6));
    CHECK(c.du(t) == doctest::Approx(-24.0 * t / std::pow(t * t - 1.0, 3)).epsilon(1e-10));
  }
}

TEST_CASE("blow-up envelope at the boundary") {
  // u ~ 3 / (2 (t-1)^2) as t -> 1.
  const RadialSolution c = closed_form_d6();
  const double t = 1.001;
  CHECK(c.u(t) * (t - 1.0) * (t - 1.0) == doctest::Approx(1.5).epsilon(2e-3));
  const RadialSolution s = shoot_radial(5);
  CHECK(s.t_min <= 1.01);
  CHECK(s.u(1.01) * 1e-4 == doctest::Approx(1.5).epsilon(0.02));
}

TEST_CASE("radial solution is positive and decreasing") {
  const RadialSolution s = shoot_radial(5);
  double prev = 1e300;
  for (double t = 1.05; t < 100.0; t *= 1.1) {
    const double u = s.u(t);
    CHECK(u > 0.0);
    CHECK(u < prev);
    CHECK(s.du(t) < 0.0);
    prev = u;
  }
  const SeriesResult a = series_coefficients(5, s.a0, 400);
  for (const auto& v : a.a) CHECK(v >= 0.0L);
  CHECK(ode_residual(s, 1.1) < 1e-4);
}

TEST_CASE("ball scaling") {
  const RadialSolution c = closed_form_d6();
  for (double r : {0.5, 2.0, 3.0}) {
    const double x = 2.5 * r;
    CHECK(u_ball(c, r, x) == doctest::Approx(c.u(2.5) / (r * r)).epsilon(1e-14));
  }
}

TEST_CASE("integral identity") {
  const IntegralCheck c6 = integral_identity_check(closed_form_d6());
  CHECK(c6.residual < 1e-4);
  CHECK(c6.tail > 0.0);
  CHECK(c6.tail_bound < 1e-12 * c6.tail);
  const IntegralCheck c5 = integral_identity_check(shoot_radial(5));
  CHECK(c5.residual < 1e-3);
}

TEST_CASE("cutoff") {
  CHECK(cutoff_psi(1.0) == 0.0);
  CHECK(cutoff_psi(2.0) == 0.0);
  CHECK(cutoff_psi(3.0) == 1.0);
  CHECK(cutoff_psi(2.5) == doctest::Approx(0.5));
  const double h = 1e-5;
  for (double t : {2.2, 2.5, 2.9}) {
    CHECK(cutoff_psi(t, 1) == doctest::Approx((cutoff_psi(t + h) - cutoff_psi(t - h)) / (2 * h)).epsilon(1e-6));
    CHECK(cutoff_psi(t, 2) == doctest::Approx((cutoff_psi(t + h, 1) - cutoff_psi(t - h, 1)) / (2 * h)).epsilon(1e-6));
  }
}

TEST_CASE("low-dimensional normalizers") {
  CHECK(phi_low_dim(3, 2.0) == doctest::Approx(8.0).epsilon(1e-15));
  CHECK(phi_low_dim(4, std::exp(1.0)) == doctest::Approx(2.0 * std::exp(2.0)).epsilon(1e-14));
  CHECK(phi_low_dim(1, 10.0) == doctest::Approx(200.0 / 3.0).epsilon(1e-15));
  CHECK(phi_low_dim(2, 3.0) == doctest::Approx(9.0).epsilon(1e-15));
  CHECK_THROWS_AS(phi_low_dim(5, 2.0), ValidationError);
  CHECK_THROWS_AS(phi_low_dim(3, 1.0), ValidationError);
}
