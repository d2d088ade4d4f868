#include "brcap/brw.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace brcap {

std::size_t LatticeSet::KeyHash::operator()(const Key& k) const {
  std::uint64_t h = 0x12345678ULL;
  for (int c : k.c) h = mix64(h ^ static_cast<std::uint32_t>(c));
  return static_cast<std::size_t>(h);
}

LatticeSet::LatticeSet(int dim, std::vector<Point> pts) : dim_(dim) {
  if (dim < 1 || dim > kMaxDim) throw ValidationError("set dimension out of range");
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  pts_ = std::move(pts);
  lo_.fill(0);
  hi_.fill(0);
  bool first = true;
  for (const auto& p : pts_) {
    if (static_cast<int>(p.size()) != dim) throw ValidationError("set point has wrong dimension");
    Key k;
    for (int i = 0; i < dim; ++i) {
      k.c[i] = p[i];
      lo_[i] = first ? p[i] : std::min(lo_[i], p[i]);
      hi_[i] = first ? p[i] : std::max(hi_[i], p[i]);
    }
    first = false;
    set_.insert(k);
    radius_ = std::max(radius_, euclid_norm(p));
  }
}

LatticeSet LatticeSet::ball(int dim, double rho, bool closed) {
  const int r = static_cast<int>(std::floor(rho));
  std::vector<Point> pts;
  Point x(dim, -r);
  const double r2 = rho * rho;
  for (;;) {
    double s = 0.0;
    for (int c : x) s += double(c) * c;
    if (closed ? s <= r2 + 1e-9 : s < r2 - 1e-9) pts.push_back(x);
    int i = 0;
    while (i < dim && ++x[i] > r) x[i++] = -r;
    if (i == dim) break;
  }
  return LatticeSet(dim, pts);
}

bool LatticeSet::contains(const int* x) const {
  for (int i = 0; i < dim_; ++i)
    if (x[i] < lo_[i] || x[i] > hi_[i]) return false;
  Key k;
  for (int i = 0; i < dim_; ++i) k.c[i] = x[i];
  return set_.count(k) > 0;
}

bool LatticeSet::hyperoctahedral() const {
  for (const auto& p : pts_) {
    for (int i = 0; i < dim_; ++i) {
      Point q(p);
      q[i] = -q[i];
      if (!contains(q)) return false;
      if (i + 1 < dim_) {
        Point s(p);
        std::swap(s[i], s[i + 1]);
        if (!contains(s)) return false;
      }
    }
  }
  return true;
}

std::vector<Point> LatticeSet::on_sphere(double rho) const {
  std::vector<Point> out;
  for (const auto& p : pts_) {
    double s = 0.0;
    for (int c : p) s += double(c) * c;
    if (std::abs(s - rho * rho) < 1e-9) out.push_back(p);
  }
  return out;
}

std::uint64_t LatticeSet::digest() const {
  Digest h;
  h.add(std::int64_t(dim_));
  for (const auto& p : pts_)
    for (int c : p) h.add(std::int64_t(c));
  return h.value();
}

namespace {

double lambda_max(const StepLaw& step) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(step.cov);
  return es.eigenvalues().maxCoeff();
}

struct StepSampler {
  std::vector<double> cdf;
  const StepLaw* law;
  explicit StepSampler(const StepLaw& l) : law(&l) {
    cdf.resize(l.prob.size());
    std::partial_sum(l.prob.begin(), l.prob.end(), cdf.begin());
    cdf.back() = 1.0;
  }
  const Point& draw(Rng& rng) const {
    double u = rng.uniform();
    auto k = std::upper_bound(cdf.begin(), cdf.end(), u) - cdf.begin();
    return law->support[k];
  }
};

struct Geometry {
  double r_k;     // Euclidean radius of the set
  double scale;   // |y|_theta >= |y| / scale
  double dist(const int* v, int d) const {
    double s = 0.0;
    for (int i = 0; i < d; ++i) s += double(v[i]) * v[i];
    return std::max(0.0, std::sqrt(s) - r_k) / scale;
  }
};

std::pair<double, double> wilson(double k, double n) {
  const double z = 1.96;
  const double c = (k + z * z / 2) / (n + z * z);
  const double h = z * std::sqrt(std::max(0.0, k * (n - k) / n) + z * z / 4) / (n + z * z);
  return {std::max(0.0, c - h), std::min(1.0, c + h)};
}

HitEstimate certain(const std::string& q, std::uint64_t n) {
  HitEstimate e;
  e.quantity = q;
  e.samples = n;
  e.hits = n;
  e.p_hat = e.lower = e.upper = e.ci_low = e.ci_high = 1.0;
  return e;
}

HitEstimate summarize(const std::string& q, std::uint64_t n, double lo_sum, double hi_sum, std::uint64_t hits,
                      std::uint64_t capped) {
  HitEstimate e;
  e.quantity = q;
  e.samples = n;
  e.hits = hits;
  e.capped = capped;
  e.lower = lo_sum / n;
  e.upper = hi_sum / n;
  e.p_hat = 0.5 * (e.lower + e.upper);
  e.ci_low = wilson(lo_sum, n).first;
  e.ci_high = wilson(hi_sum, n).second;
  e.ci_half = 1.96 * std::sqrt(std::max(e.p_hat * (1 - e.p_hat), 1e-300) / n);
  return e;
}

struct Partial {
  double lo = 0.0, hi = 0.0;
  std::uint64_t hits = 0, capped = 0;
};

// Grows one tree with spatial labels from `root`; returns true on a hit and
// adds a frontier bound to `slack` when the tree is capped.
bool grow_labelled(const Pmf& root_law, const Pmf& law, const int* root, const LatticeSet& K,
                   const StepSampler& steps, const Geometry& geo, const StepLaw& step, double safety,
                   std::size_t max_vertices, Rng& rng, double& slack, bool& capped,
                   std::vector<std::array<int, kMaxDim>>& pos) {
  const int d = step.dim;
  pos.resize(1);
  for (int i = 0; i < d; ++i) pos[0][i] = root[i];
  auto visit = [&](std::int32_t c, std::int32_t p) {
    const Point& z = steps.draw(rng);
    if (static_cast<std::size_t>(c) >= pos.size()) pos.resize(c + 1);
    for (int i = 0; i < d; ++i) pos[c][i] = pos[p][i] + z[i];
    return K.contains(pos[c].data());
  };
  GrowResult g = grow_tree(root_law, law, max_vertices, rng, visit);
  if (g.stopped) return true;
  if (g.outcome == TreeOutcome::capped) {
    capped = true;
    double b = 0.0;
    for (std::size_t f = 0; f < g.frontier.size() && b < 1.0; ++f) {
      double t = geo.dist(pos[g.frontier[f]].data(), d);
      if (g.pending[f] < 0) {
        b += critical_hit_bound(step, K, t, safety);
      } else {
        double tt = std::max(0.0, t - step.max_jump / geo.scale);
        b += g.pending[f] * critical_hit_bound(step, K, tt, safety);
      }
    }
    slack += std::min(1.0, b);
  }
  return false;
}

}  // namespace

double critical_hit_bound(const StepLaw& step, const LatticeSet& K, double dist, double safety) {
  if (dist < 1.0) return 1.0;
  const double d = step.dim;
  return std::min(1.0, safety * K.size() * green_constant(step) * std::pow(dist, 2 - d));
}

double spine_hit_bound(const StepLaw& step, const OffspringLaw& law, const LatticeSet& K, double dist,
                       double safety) {
  if (dist < 1.0) return 1.0;
  const double d = step.dim;
  double b = green_constant(step) * std::pow(dist, 2 - d) +
             0.5 * law.sigma2 * second_order_constant(step) * std::pow(dist, 4 - d);
  return std::min(1.0, safety * K.size() * b);
}

HitEstimate hit_probability(TreeKind kind, const LatticeSet& K, const Point& x, const OffspringLaw& law,
                            const StepLaw& step, const McOptions& opt) {
  if (K.size() == 0) throw ValidationError("empty target set");
  if (static_cast<int>(x.size()) != step.dim || K.dim() != step.dim) throw ValidationError("dimension mismatch");
  if (opt.samples == 0) throw ValidationError("samples must be positive");
  if (K.contains(x)) return certain(kind == TreeKind::critical ? "p_c" : "p_adj", opt.samples);
  const AdjointLaw adj = adjoint_of(law);
  const Pmf& root_law = kind == TreeKind::critical ? law.pmf : adj.pmf;
  StepSampler steps(step);
  Geometry geo{K.radius(), std::sqrt(lambda_max(step))};
  const std::size_t chunk = 1024;
  const std::size_t nchunks = (opt.samples + chunk - 1) / chunk;
  std::vector<Partial> part(nchunks);
  parallel_chunks(nchunks, 1, [&](std::size_t c0, std::size_t c1) {
    std::vector<std::array<int, kMaxDim>> pos;
    for (std::size_t c = c0; c < c1; ++c) {
      Partial& P = part[c];
      const std::uint64_t s0 = c * chunk, s1 = std::min<std::uint64_t>(opt.samples, s0 + chunk);
      for (std::uint64_t s = s0; s < s1; ++s) {
        Rng rng(opt.seed, s, 10);
        double slack = 0.0;
        bool capped = false;
        bool hit = grow_labelled(root_law, law.pmf, x.data(), K, steps, geo, step, opt.frontier_safety,
                                 opt.max_vertices, rng, slack, capped, pos);
        if (hit) {
          ++P.hits;
          P.lo += 1;
          P.hi += 1;
        } else {
          P.hi += std::min(1.0, slack);
          if (capped) ++P.capped;
        }
      }
    }
  });
  double lo = 0, hi = 0;
  std::uint64_t hits = 0, capped = 0;
  for (const auto& P : part) {
    lo += P.lo;
    hi += P.hi;
    hits += P.hits;
    capped += P.capped;
  }
  return summarize(kind == TreeKind::critical ? "p_c" : "p_adj", opt.samples, lo, hi, hits, capped);
}

namespace {

// Runs spine samples; include_start puts the first spine vertex at x itself.
HitEstimate spine_run(const LatticeSet& K, const Point& x, const OffspringLaw& law, const StepLaw& step,
                      const McOptions& opt, bool include_start) {
  if (K.size() == 0) throw ValidationError("empty target set");
  if (static_cast<int>(x.size()) != step.dim || K.dim() != step.dim) throw ValidationError("dimension mismatch");
  if (opt.samples == 0) throw ValidationError("samples must be positive");
  if (include_start && K.contains(x)) return certain("p_spine", opt.samples);
  const int d = step.dim;
  const AdjointLaw adj = adjoint_of(law);
  StepSampler steps(step);
  Geometry geo{K.radius(), std::sqrt(lambda_max(step))};

  double r_stop = std::max(opt.r_stop, K.radius() + 2.0);
  auto remainder = [&](double r) {
    return spine_hit_bound(step, law, K, std::max(0.0, r - K.radius()) / geo.scale, opt.remainder_safety);
  };
  if (opt.adaptive_r_stop) {
    const double target = opt.remainder_fraction * 0.5 / std::sqrt(double(opt.samples));
    while (remainder(r_stop) > target && r_stop * 2 <= opt.r_stop_max) r_stop *= 2;
  }
  const double r2 = r_stop * r_stop;

  const std::size_t chunk = 256;
  const std::size_t nchunks = (opt.samples + chunk - 1) / chunk;
  std::vector<Partial> part(nchunks);
  parallel_chunks(nchunks, 1, [&](std::size_t c0, std::size_t c1) {
    std::vector<std::array<int, kMaxDim>> pos;
    for (std::size_t c = c0; c < c1; ++c) {
      Partial& P = part[c];
      const std::uint64_t s0 = c * chunk, s1 = std::min<std::uint64_t>(opt.samples, s0 + chunk);
      for (std::uint64_t s = s0; s < s1; ++s) {
        Rng rng(opt.seed, s, 20);
        int y[kMaxDim];
        for (int i = 0; i < d; ++i) y[i] = x[i];
        bool first = true, hit = false, capped = false;
        double slack = 0.0;
        for (;;) {
          if (!(first && include_start)) {
            const Point& z = steps.draw(rng);
            for (int i = 0; i < d; ++i) y[i] += z[i];
          }
          first = false;
          double n2 = 0.0;
          for (int i = 0; i < d; ++i) n2 += double(y[i]) * y[i];
          if (n2 > r2) {
            slack += remainder(std::sqrt(n2));
            break;
          }
          if (K.contains(y)) {
            hit = true;
            break;
          }
          if (grow_labelled(adj.pmf, law.pmf, y, K, steps, geo, step, opt.frontier_safety, opt.max_vertices, rng,
                            slack, capped, pos)) {
            hit = true;
            break;
          }
        }
        if (hit) {
          ++P.hits;
          P.lo += 1;
          P.hi += 1;
        } else {
          P.hi += std::min(1.0, slack);
        }
        if (capped) ++P.capped;
      }
    }
  });
  double lo = 0, hi = 0;
  std::uint64_t hits = 0, capped = 0;
  for (const auto& P : part) {
    lo += P.lo;
    hi += P.hi;
    hits += P.hits;
    capped += P.capped;
  }
  HitEstimate e = summarize("p_spine", opt.samples, lo, hi, hits, capped);
  e.r_stop = r_stop;
  if (e.upper - e.lower > opt.max_bracket)
    throw BudgetError("truncation bracket wider than requested tolerance");
  return e;
}

HitEstimate complement(HitEstimate e, const std::string& q) {
  HitEstimate c = e;
  c.quantity = q;
  c.p_hat = 1 - e.p_hat;
  c.lower = 1 - e.upper;
  c.upper = 1 - e.lower;
  c.ci_low = 1 - e.ci_high;
  c.ci_high = 1 - e.ci_low;
  return c;
}

}  // namespace

HitEstimate escape_probability(const LatticeSet& K, const Point& x, const OffspringLaw& law,
                               const StepLaw& step, const McOptions& opt) {
  return complement(spine_run(K, x, law, step, opt, false), "e_K");
}

HitEstimate p_infinite(const LatticeSet& K, const Point& x, const OffspringLaw& law, const StepLaw& step,
                       const McOptions& opt) {
  HitEstimate e = spine_run(K, x, law, step, opt, true);
  e.quantity = "p_I";
  return e;
}

}  // namespace brcap
