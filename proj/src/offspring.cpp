#include "brcap/offspring.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>

namespace brcap {

Pmf::Pmf(std::vector<double> p) : p_(std::move(p)) {
  if (p_.empty()) throw ValidationError("empty pmf");
  double s = 0.0;
  for (double v : p_) {
    if (!(v >= 0.0)) throw ValidationError("pmf has a negative atom");
    s += v;
  }
  if (std::abs(s - 1.0) > 1e-12) throw ValidationError("pmf does not sum to 1");
  while (p_.size() > 1 && p_.back() == 0.0) p_.pop_back();
  cdf_.resize(p_.size());
  std::partial_sum(p_.begin(), p_.end(), cdf_.begin());
  cdf_.back() = 1.0;
  for (std::size_t k = 0; k < p_.size(); ++k) {
    mean_ += k * p_[k];
    m2_ += k * (k - 1.0) * p_[k];
  }
}

Pmf Pmf::geometric_half() {
  Pmf g;
  g.geometric_ = true;
  for (int k = 0; k < 64; ++k) g.p_.push_back(std::ldexp(1.0, -(k + 1)));
  g.mean_ = 1.0;
  g.m2_ = 2.0;  // E[X(X-1)] = 2 q^2 / p^2 with q = p = 1/2
  return g;
}

double Pmf::operator[](std::size_t k) const {
  if (geometric_) return std::ldexp(1.0, -static_cast<int>(k + 1));
  return k < p_.size() ? p_[k] : 0.0;
}

double Pmf::gen(double s) const {
  if (geometric_) return 1.0 / (2.0 - s);
  double v = 0.0;
  for (std::size_t k = p_.size(); k-- > 0;) v = v * s + p_[k];
  return v;
}

double Pmf::gen_prime(double s) const {
  if (geometric_) return 1.0 / ((2.0 - s) * (2.0 - s));
  double v = 0.0;
  for (std::size_t k = p_.size(); k-- > 1;) v = v * s + k * p_[k];
  return v;
}

double Pmf::one_minus_gen(double m) const {
  if (geometric_) return m / (1.0 + m);
  if (m >= 1.0) return 1.0 - p_[0];
  const double l = std::log1p(-m);
  double v = 0.0;
  for (std::size_t k = 1; k < p_.size(); ++k) v += p_[k] * -std::expm1(k * l);
  return v;
}

int Pmf::sample(Rng& rng) const {
  if (geometric_) {
    int k = 0;
    for (;;) {
      std::uint64_t w = rng();
      if (w != 0) return k + std::countr_zero(w);
      k += 64;
    }
  }
  const double u = rng.uniform();
  return static_cast<int>(std::upper_bound(cdf_.begin(), cdf_.end(), u) - cdf_.begin());
}

std::uint64_t OffspringLaw::hash() const {
  Digest h;
  h.add(kind);
  if (!pmf.geometric())
    for (double v : pmf.atoms()) h.add(v);
  return h.value();
}

OffspringLaw make_offspring_law(const std::string& kind, const std::vector<double>& custom, int k_max) {
  OffspringLaw law;
  law.kind = kind;
  if (kind == "geometric_half") {
    law.pmf = Pmf::geometric_half();
    law.sigma2 = 2.0;
    law.third = 13.0;  // E[X^3] for geometric(1/2) on {0,1,...}
    return law;
  }
  std::vector<double> p;
  if (kind == "binary_critical") {
    p = {0.5, 0.0, 0.5};
  } else if (kind == "poisson_trunc") {
    if (k_max < 2) throw ValidationError("poisson_trunc needs k_max >= 2");
    p.assign(k_max + 1, 0.0);
    double below = 0.0, mass = 0.0;
    for (int k = 1; k < k_max; ++k) {
      p[k] = std::exp(-1.0 - std::lgamma(k + 1.0));
      below += k * p[k];
      mass += p[k];
    }
    p[k_max] = (1.0 - below) / k_max;
    p[0] = 1.0 - mass - p[k_max];
  } else if (kind == "custom") {
    p = custom;
  } else {
    throw ValidationError("unknown offspring law: " + kind);
  }
  law.pmf = Pmf(p);
  if (std::abs(law.pmf.mean() - 1.0) > 1e-12) throw ValidationError("offspring law is not critical");
  if (std::abs(law.pmf[1] - 1.0) < 1e-15) throw ValidationError("degenerate offspring law mu(1) = 1");
  law.sigma2 = law.pmf.second_factorial();  // mean 1: Var = E[X(X-1)] + 1 - 1
  if (!(law.sigma2 > 0.0)) throw ValidationError("offspring variance must be positive");
  for (std::size_t k = 0; k < law.pmf.atoms().size(); ++k) law.third += double(k) * k * k * law.pmf[k];
  return law;
}

AdjointLaw adjoint_of(const OffspringLaw& law) {
  AdjointLaw a;
  if (law.pmf.geometric()) {
    a.pmf = Pmf::geometric_half();
  } else {
    const auto& p = law.pmf.atoms();
    std::vector<double> q(std::max<std::size_t>(1, p.size() - 1), 0.0);
    for (std::size_t k = 0; k + 1 < p.size(); ++k)
      for (std::size_t j = k + 1; j < p.size(); ++j) q[k] += p[j];
    a.pmf = Pmf(q);
  }
  a.mean = a.pmf.mean();
  return a;
}

namespace {

Tree to_tree(GrowResult&& g, std::vector<std::int32_t>&& parent) {
  Tree t;
  t.parent = std::move(parent);
  t.outcome = g.outcome;
  t.frontier = std::move(g.frontier);
  return t;
}

}  // namespace

Tree sample_critical_tree(const OffspringLaw& law, const TreeBudget& budget, std::uint64_t seed,
                          std::uint64_t index) {
  Rng rng(seed, index, 1);
  std::vector<std::int32_t> parent;
  auto g = grow_tree(law.pmf, law.pmf, budget.max_vertices, rng, [](auto, auto) { return false; }, &parent);
  return to_tree(std::move(g), std::move(parent));
}

Tree sample_adjoint_tree(const OffspringLaw& law, const TreeBudget& budget, std::uint64_t seed,
                         std::uint64_t index) {
  Rng rng(seed, index, 2);
  const AdjointLaw adj = adjoint_of(law);
  std::vector<std::int32_t> parent;
  auto g = grow_tree(adj.pmf, law.pmf, budget.max_vertices, rng, [](auto, auto) { return false; }, &parent);
  return to_tree(std::move(g), std::move(parent));
}

SpineStream::SpineStream(OffspringLaw law, TreeBudget budget, std::uint64_t seed)
    : law_(std::move(law)), budget_(budget), seed_(seed) {}

Tree SpineStream::next() { return at(pos_++); }

Tree SpineStream::at(std::uint64_t i) const { return sample_adjoint_tree(law_, budget_, seed_, i); }

double TreeSizeLaw::normalized(int n) const {
  if (n < n_min || n > n_max || samples == 0) return 0.0;
  double p = double(count[n - n_min]) / double(samples);
  return p * std::pow(n, 1.5) * sigma * std::sqrt(2 * M_PI);
}

double TreeSizeLaw::normalized_bin(int a, int b) const {
  double hits = 0.0, expect = 0.0;
  for (int n = std::max(a, n_min); n <= std::min(b, n_max); ++n) {
    if (((n - residue) % span + span) % span != 0) continue;
    hits += count[n - n_min];
    expect += std::pow(n, -1.5) / (sigma * std::sqrt(2 * M_PI));
  }
  if (expect == 0.0 || samples == 0) return 0.0;
  return hits / double(samples) / expect;
}

TreeSizeLaw tree_size_law(const OffspringLaw& law, int n_min, int n_max, std::uint64_t samples,
                          std::uint64_t seed) {
  if (n_min < 1 || n_max < n_min) throw ValidationError("bad size range");
  TreeSizeLaw out;
  out.n_min = n_min;
  out.n_max = n_max;
  out.samples = samples;
  out.sigma = std::sqrt(law.sigma2);
  out.count.assign(n_max - n_min + 1, 0);
  // Sizes n are admissible when n (1 - a) = 1 mod h, a + hZ the offspring lattice.
  int h = 0, a = -1;
  for (std::size_t k = 0; k < (law.pmf.geometric() ? 2 : law.pmf.atoms().size()); ++k) {
    if (law.pmf[k] <= 0.0) continue;
    if (a < 0)
      a = static_cast<int>(k);
    else
      h = std::gcd(h, static_cast<int>(k) - a);
  }
  out.span = std::max(h, 1);
  out.residue = 1 % out.span;
  for (int r = 0; r < out.span; ++r)
    if (((r * (1 - a) - 1) % out.span + out.span) % out.span == 0) {
      out.residue = r;
      break;
    }

  const std::size_t chunk = 1 << 16;
  const std::size_t nchunks = (samples + chunk - 1) / chunk;
  std::vector<std::vector<std::uint64_t>> part(nchunks);
  std::vector<std::uint64_t> capped(nchunks, 0);
  parallel_chunks(nchunks, 1, [&](std::size_t c0, std::size_t c1) {
    for (std::size_t c = c0; c < c1; ++c) {
      part[c].assign(out.count.size(), 0);
      const std::uint64_t s0 = c * chunk, s1 = std::min<std::uint64_t>(samples, s0 + chunk);
      for (std::uint64_t s = s0; s < s1; ++s) {
        Rng rng(seed, s, 3);
        auto g = grow_tree(law.pmf, law.pmf, static_cast<std::size_t>(n_max) + 1, rng,
                           [](auto, auto) { return false; });
        if (g.outcome == TreeOutcome::capped) {
          ++capped[c];
        } else if (static_cast<int>(g.vertices) >= n_min && static_cast<int>(g.vertices) <= n_max) {
          ++part[c][g.vertices - n_min];
        }
      }
    }
  });
  for (std::size_t c = 0; c < nchunks; ++c) {
    out.capped += capped[c];
    for (std::size_t i = 0; i < out.count.size(); ++i) out.count[i] += part[c][i];
  }
  return out;
}

double geometric_tree_size_pmf(int n) {
  if (n < 1) return 0.0;
  double lc = std::lgamma(2.0 * n - 1) - 2 * std::lgamma(double(n));
  return std::exp(lc - (2.0 * n - 1) * std::log(2.0)) / n;
}

}  // namespace brcap
