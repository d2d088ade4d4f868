#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "brcap/offspring.hpp"

using namespace brcap;

namespace {

// sum_k k(k-1) p_k + mean - mean^2 over explicit atoms.
double variance_by_sum(const std::vector<double>& p) {
  double m1 = 0.0, m2 = 0.0;
  for (std::size_t k = 0; k < p.size(); ++k) {
    m1 += k * p[k];
    m2 += double(k) * k * p[k];
  }
  return m2 - m1 * m1;
}

std::vector<double> geometric_atoms(int K) {
  std::vector<double> p;
  for (int k = 0; k < K; ++k) p.push_back(std::ldexp(1.0, -(k + 1)));
  return p;
}

}  // namespace

TEST_CASE("offspring variances") {
  const OffspringLaw b = make_offspring_law("binary_critical");
  CHECK(b.sigma2 == doctest::Approx(variance_by_sum({0.5, 0.0, 0.5})).epsilon(1e-15));
  CHECK(b.sigma2 == doctest::Approx(1.0));
  const OffspringLaw g = make_offspring_law("geometric_half");
  CHECK(g.sigma2 == doctest::Approx(variance_by_sum(geometric_atoms(80))).epsilon(1e-12));
  CHECK(g.sigma2 == doctest::Approx(2.0));
  CHECK(g.pmf.mean() == doctest::Approx(1.0));
  const OffspringLaw c = make_offspring_law("custom", {0.3, 0.45, 0.2, 0.05});
  CHECK(c.sigma2 == doctest::Approx(variance_by_sum({0.3, 0.45, 0.2, 0.05})).epsilon(1e-14));
}

TEST_CASE("invalid offspring laws are rejected") {
  CHECK_THROWS_AS(make_offspring_law("custom", {0.0, 1.0}), ValidationError);
  CHECK_THROWS_AS(make_offspring_law("custom", {0.3, 0.3, 0.4}), ValidationError);
  CHECK_THROWS_AS(make_offspring_law("custom", {0.5, 0.6}), ValidationError);
  CHECK_THROWS_AS(make_offspring_law("fibonacci"), ValidationError);
}

TEST_CASE("generating function helpers") {
  const OffspringLaw c = make_offspring_law("custom", {0.3, 0.45, 0.2, 0.05});
  for (double s : {0.0, 0.3, 0.9, 1.0}) {
    double f = 0.0, fp = 0.0;
    for (int k = 0; k < 4; ++k) {
      f += c.pmf[k] * std::pow(s, k);
      if (k) fp += k * c.pmf[k] * std::pow(s, k - 1);
    }
    CHECK(c.pmf.gen(s) == doctest::Approx(f).epsilon(1e-15));
    CHECK(c.pmf.gen_prime(s) == doctest::Approx(fp).epsilon(1e-15));
  }
  // 1 - f(1 - m) ~ m for small m at criticality.
  CHECK(c.pmf.one_minus_gen(1e-12) == doctest::Approx(1e-12).epsilon(1e-9));
  const OffspringLaw g = make_offspring_law("geometric_half");
  CHECK(g.pmf.gen(0.5) == doctest::Approx(1.0 / 1.5).epsilon(1e-15));
}

TEST_CASE("adjoint laws") {
  const AdjointLaw b = adjoint_of(make_offspring_law("binary_critical"));
  CHECK(b.pmf[0] == doctest::Approx(0.5));
  CHECK(b.pmf[1] == doctest::Approx(0.5));
  CHECK(b.pmf[2] == doctest::Approx(0.0));
  CHECK(b.mean == doctest::Approx(0.5));

  const AdjointLaw g = adjoint_of(make_offspring_law("geometric_half"));
  // Tail sums of 2^{-(k+1)} reproduce the law.
  for (int k = 0; k < 30; ++k) {
    double tail = 0.0;
    for (int j = k + 1; j < 200; ++j) tail += std::ldexp(1.0, -(j + 1));
    CHECK(g.pmf[k] == doctest::Approx(tail).epsilon(1e-12));
  }
  CHECK(g.mean == doctest::Approx(1.0));

  const OffspringLaw c = make_offspring_law("custom", {0.3, 0.45, 0.2, 0.05});
  const AdjointLaw ca = adjoint_of(c);
  double total = 0.0;
  for (int k = 0; k < 6; ++k) total += ca.pmf[k];
  CHECK(total == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(ca.mean == doctest::Approx(c.sigma2 / 2.0).epsilon(1e-14));
}

TEST_CASE("root with no children gives a single vertex") {
  const OffspringLaw b = make_offspring_law("binary_critical");
  const std::uint64_t n = 1000000;
  std::uint64_t ones = 0;
  for (std::uint64_t i = 0; i < n; ++i) {
    Rng rng(7, i, 9);
    ones += b.pmf.sample(rng) == 0;
  }
  const double p = double(ones) / n, se = std::sqrt(0.25 / n);
  CHECK(std::abs(p - 0.5) < 3 * se);

  const TreeSizeLaw L = tree_size_law(b, 1, 5, n, 11);
  const double p1 = double(L.count[0]) / n;
  CHECK(std::abs(p1 - 0.5) < 3 * se);
  // Binary trees have odd sizes.
  CHECK(L.span == 2);
  CHECK(L.count[1] == 0);
  CHECK(L.count[3] == 0);
}

TEST_CASE("geometric tree sizes follow the local limit") {
  const OffspringLaw g = make_offspring_law("geometric_half");
  for (int n : {50, 100, 200, 500}) {
    const double exact = geometric_tree_size_pmf(n) * std::pow(n, 1.5) * std::sqrt(2.0) * std::sqrt(2 * M_PI);
    CHECK(exact > 0.9);
    CHECK(exact < 1.1);
  }
  // Catalan numbers: P(#T = n) = C_{n-1} 2^{-(2n-1)}.
  CHECK(geometric_tree_size_pmf(1) == doctest::Approx(0.5));
  CHECK(geometric_tree_size_pmf(2) == doctest::Approx(0.125));
  CHECK(geometric_tree_size_pmf(3) == doctest::Approx(2.0 / 32.0));

  const std::uint64_t n = 10000000;
  const TreeSizeLaw L = tree_size_law(g, 50, 500, n, 5);
  for (auto [a, b] : {std::pair{50, 100}, {100, 200}, {200, 400}, {400, 500}}) {
    const double r = L.normalized_bin(a, b);
    CHECK(r > 0.9);
    CHECK(r < 1.1);
  }
  // Per-size counts are consistent with the exact law.
  int outliers = 0;
  for (int k = 50; k <= 500; ++k) {
    const double p = geometric_tree_size_pmf(k);
    const double z = (double(L.count[k - 50]) - n * p) / std::sqrt(n * p * (1 - p));
    outliers += std::abs(z) > 4.0;
  }
  CHECK(outliers == 0);
}

TEST_CASE("budget semantics") {
  const OffspringLaw g = make_offspring_law("geometric_half");
  TreeBudget one{1};
  for (std::uint64_t i = 0; i < 200; ++i) {
    const Tree t = sample_critical_tree(g, one, 3, i);
    Rng rng(3, i, 1);
    const bool childless = g.pmf.sample(rng) == 0;
    CHECK((t.outcome == TreeOutcome::capped) == !childless);
    CHECK(t.size() == 1);
  }
  const Tree a = sample_adjoint_tree(g, one, 3, 0);
  CHECK(a.size() == 1);
}

TEST_CASE("adjoint trees") {
  const std::uint64_t n = 200000;
  const TreeBudget big{100000};
  const OffspringLaw b = make_offspring_law("binary_critical");
  std::uint64_t single = 0;
  for (std::uint64_t i = 0; i < n; ++i) single += sample_adjoint_tree(b, big, 21, i).size() == 1;
  CHECK(std::abs(double(single) / n - 0.5) < 3 * std::sqrt(0.25 / n));

  // Geometric(1/2): adjoint and critical trees share their size law.
  const OffspringLaw g = make_offspring_law("geometric_half");
  std::vector<double> fa(4, 0.0), fc(4, 0.0);
  for (std::uint64_t i = 0; i < n; ++i) {
    const auto sa = sample_adjoint_tree(g, big, 22, i).size(), sc = sample_critical_tree(g, big, 23, i).size();
    if (sa <= 4) fa[sa - 1] += 1.0 / n;
    if (sc <= 4) fc[sc - 1] += 1.0 / n;
  }
  for (int k = 0; k < 4; ++k) {
    const double se = std::sqrt(2.0 * fc[k] * (1 - fc[k]) / n);
    CHECK(std::abs(fa[k] - fc[k]) < 4 * se);
    CHECK(std::abs(fc[k] - geometric_tree_size_pmf(k + 1)) < 4 * se);
  }
}

TEST_CASE("spine stream is deterministic") {
  const OffspringLaw g = make_offspring_law("geometric_half");
  SpineStream s1(g, TreeBudget{10000}, 99), s2(g, TreeBudget{10000}, 99);
  for (int i = 0; i < 10; ++i) {
    const Tree a = s1.next(), b = s2.next();
    CHECK(a.parent == b.parent);
    CHECK(a.parent == s1.at(i).parent);
    CHECK(a.parent == sample_adjoint_tree(g, TreeBudget{10000}, 99, i).parent);
  }
  CHECK(s1.position() == 10);
}
