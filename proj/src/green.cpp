#include "brcap/green.hpp"

#include <algorithm>
#include <boost/math/special_functions/gamma.hpp>
#include <boost/math/special_functions/legendre.hpp>
#include <cmath>
#include <complex>
#include <map>
#include <mutex>

namespace brcap {

std::string to_string(GreenMethod m) { return m == GreenMethod::neumann ? "neumann" : "fourier"; }

GreenMethod parse_green_method(const std::string& s) {
  if (s == "neumann") return GreenMethod::neumann;
  if (s == "fourier") return GreenMethod::fourier;
  throw ValidationError("unknown Green method: " + s);
}

bool GreenTable::covers(const int* x) const {
  for (int i = 0; i < law.dim; ++i)
    if (std::abs(x[i]) > box->radius()) return false;
  return true;
}

double GreenTable::at(const int* x) const {
  std::size_t i = box->index(x);
  if (i == Box::npos) throw ValidationError("point outside Green table");
  return value[i];
}

double GreenTable::eval(const int* x) const {
  std::size_t i = box->index(x);
  if (i != Box::npos) return value[i];
  double v[kMaxDim];
  for (int k = 0; k < law.dim; ++k) v[k] = x[k];
  return green_constant(law) * std::pow(theta_norm(law, v), 2.0 - law.dim);
}

std::uint64_t GreenTable::digest() const {
  Digest h;
  h.add(std::int64_t(law.hash())).add(std::int64_t(box->radius())).add(to_string(method));
  for (double v : value) h.add(v);
  return h.value();
}

namespace {

IntLattice difference_lattice(const StepLaw& law) {
  std::vector<Point> diffs;
  for (const auto& z : law.support) {
    Point w(law.dim);
    for (int i = 0; i < law.dim; ++i) w[i] = z[i] - law.shift[i];
    diffs.push_back(w);
  }
  return IntLattice(law.dim, diffs);
}

int parity_of(const StepLaw& law, const IntLattice& dl, const Point& x) {
  if (law.period == 1) return 0;
  for (int r = 0; r < law.period; ++r) {
    Point w(law.dim);
    for (int i = 0; i < law.dim; ++i) w[i] = x[i] - r * law.shift[i];
    if (dl.contains(w)) return r;
  }
  throw ValidationError("point not reachable by the walk");
}

// int_a^inf t^moment (2 pi t)^{-d/2} det^{-1/2} exp(-b/t) dt.
double gaussian_tail(const StepLaw& law, double b, double a, int moment = 0) {
  const double d = law.dim;
  const double pref = std::pow(2 * M_PI, -d / 2) / std::sqrt(law.cov_det);
  const double e = d / 2 - 1 - moment;
  if (b <= 0.0) return pref * std::pow(a, -e) / e;
  return pref * std::pow(b, -e) * boost::math::tgamma_lower(e, b / a);
}

struct WalkRun {
  std::vector<double> origin;  // P(S_n = 0), n < steps
  std::vector<double> partial; // sum_{n<steps} P(S_n = x) over walk-box sites
};

WalkRun run_walk(const StepLaw& law, int walk_radius, int steps, int free_dims,
                 std::shared_ptr<const Box>* box_out) {
  auto box = std::make_shared<const Box>(law.dim, walk_radius, law.max_jump, free_dims);
  Stepper P(box, law);
  std::vector<double> p(box->size(), 0.0), q;
  Point o(law.dim, 0);
  const std::size_t io = box->index(o);
  p[io] = 1.0 / box->weight(io);
  WalkRun out;
  out.partial.assign(box->size(), 0.0);
  for (int n = 0; n < steps; ++n) {
    out.origin.push_back(p[io]);
    for (std::size_t i = 0; i < p.size(); ++i) out.partial[i] += p[i];
    P.apply(p, q);
    p.swap(q);
  }
  if (box_out) *box_out = box;
  return out;
}

struct GaussRule {
  std::vector<double> x, w;
};

const GaussRule& gauss_rule(int q) {
  static std::mutex mu;
  static std::map<int, GaussRule> cache;
  std::lock_guard<std::mutex> lk(mu);
  auto it = cache.find(q);
  if (it != cache.end()) return it->second;
  GaussRule r;
  auto zeros = boost::math::legendre_p_zeros<double>(q);
  for (double z : zeros) {
    double dp = boost::math::legendre_p_prime(q, z);
    double w = 2.0 / ((1 - z * z) * dp * dp);
    if (z == 0.0) {
      r.x.push_back(0.0);
      r.w.push_back(w);
    } else {
      r.x.push_back(z);
      r.w.push_back(w);
      r.x.push_back(-z);
      r.w.push_back(w);
    }
  }
  return cache.emplace(q, r).first->second;
}

bool axis_separable(const StepLaw& law) {
  for (const auto& z : law.support) {
    int nz = 0;
    for (int c : z) nz += c != 0;
    if (nz > 1) return false;
  }
  return true;
}

// With 1 - phi(k) = sum_i psi_i(k_i), 1/(1-phi) = int_0^inf exp(-t sum psi_i) dt
// and g(x) = int_0^inf prod_i q_i(t, x_i) dt with
// q_i(t, n) = (1/pi) int_0^pi cos(kn) exp(-t psi_i(k)) dk.
// moment = 1 gives g * g, since int int p_{s+u} ds du = int t p_t dt.
void separable_table(const StepLaw& law, const Box& tb, std::vector<double>& out, int moment = 0) {
  const int d = law.dim;
  const int L = tb.radius();
  const double t_lo = 1e-8, t_hi = 1e6;
  const GaussRule& gu = gauss_rule(10);
  std::vector<double> tn, tw;
  const double ua = std::log(t_lo), ub = std::log(t_hi);
  const int panels = static_cast<int>(std::ceil((ub - ua) / 0.5));
  const double pw = (ub - ua) / panels;
  for (int p = 0; p < panels; ++p)
    for (std::size_t j = 0; j < gu.x.size(); ++j) {
      double u = ua + pw * (p + 0.5 * (gu.x[j] + 1));
      tn.push_back(std::exp(u));
      tw.push_back(0.5 * pw * gu.w[j] * std::exp((1 + moment) * u));
    }
  const std::size_t T = tn.size();

  // One factor table per distinct axis law.
  std::vector<std::vector<std::pair<int, double>>> axis(d);
  for (std::size_t k = 0; k < law.support.size(); ++k)
    for (int i = 0; i < d; ++i)
      if (law.support[k][i] != 0) axis[i].push_back({law.support[k][i], law.prob[k]});
  std::vector<int> table_of(d);
  std::vector<std::vector<double>> q;  // q[table][n * T + t]
  std::vector<int> owner;
  const GaussRule& gk = gauss_rule(20);
  for (int i = 0; i < d; ++i) {
    int found = -1;
    for (std::size_t o = 0; o < owner.size(); ++o)
      if (axis[owner[o]] == axis[i]) found = static_cast<int>(o);
    if (found >= 0) {
      table_of[i] = found;
      continue;
    }
    table_of[i] = static_cast<int>(owner.size());
    owner.push_back(i);
    const auto& ax = axis[i];
    double m2 = 0.0;
    for (auto [z, p] : ax) m2 += p * z * z;
    std::vector<double> tab((L + 1) * T, 0.0);
    for (std::size_t ti = 0; ti < T; ++ti) {
      const double t = tn[ti];
      std::vector<double> br{0.0};
      double a = std::min(0.25, 0.5 / std::sqrt(1.0 + t * m2));
      while (br.back() < M_PI) {
        double w = std::min(0.25, std::max(a, br.back()));
        br.push_back(std::min(M_PI, br.back() + w));
      }
      for (std::size_t b = 0; b + 1 < br.size(); ++b) {
        const double k0 = br[b], k1 = br[b + 1];
        for (std::size_t j = 0; j < gk.x.size(); ++j) {
          double k = k0 + (k1 - k0) * 0.5 * (gk.x[j] + 1);
          double psi = 0.0;
          for (auto [z, p] : ax) {
            double s = std::sin(0.5 * z * k);
            psi += 2 * p * s * s;
          }
          double e = std::exp(-t * psi);
          if (e == 0.0) continue;
          double w = 0.5 * (k1 - k0) * gk.w[j] * e / M_PI;
          double c = std::cos(k), cm = 1.0, cn = c;
          tab[0 * T + ti] += w;
          if (L >= 1) tab[1 * T + ti] += w * c;
          for (int n = 2; n <= L; ++n) {
            double cx = 2 * c * cn - cm;
            cm = cn;
            cn = cx;
            tab[n * T + ti] += w * cn;
          }
        }
      }
    }
    q.push_back(std::move(tab));
  }

  out.assign(tb.size(), 0.0);
  parallel_chunks(tb.size(), 1024, [&](std::size_t s0, std::size_t s1) {
    std::vector<double> acc(T);
    for (std::size_t s = s0; s < s1; ++s) {
      const std::int16_t* r = tb.rep(s);
      std::copy(tw.begin(), tw.end(), acc.begin());
      for (int i = 0; i < d; ++i) {
        const double* row = &q[table_of[i]][std::abs(r[i]) * T];
        for (std::size_t t = 0; t < T; ++t) acc[t] *= row[t];
      }
      double v = 0.0;
      for (std::size_t t = 0; t < T; ++t) v += acc[t];
      double b = 0.0;
      for (int i = 0; i < d; ++i) b += double(r[i]) * r[i] / (2 * law.cov(i, i));
      v += gaussian_tail(law, b, t_hi, moment);
      if (tb.sup(s) == 0) v += moment ? 0.5 * t_lo * t_lo : t_lo;
      out[s] = v;
    }
  });
}

}  // namespace

GreenTable green_table(const StepLaw& law, int radius, GreenMethod method, const GreenOptions& opt) {
  if (law.dim < 3) throw ValidationError("Green function requires d >= 3");
  if (radius < 0) throw ValidationError("table radius must be nonnegative");
  GreenTable t;
  t.law = law;
  t.method = method;
  t.tol = opt.tol;
  const int fd = default_free_dims(law);
  t.box = std::make_shared<const Box>(law.dim, radius, 0, fd);
  const Box& tb = *t.box;
  t.value.assign(tb.size(), 0.0);

  if (method == GreenMethod::fourier) {
    if (axis_separable(law)) {
      separable_table(law, tb, t.value);
    } else {
      for (std::size_t i = 0; i < tb.size(); ++i) t.value[i] = green_fourier(law, tb.point(i), opt.tol).value;
    }
    return t;
  }

  const double d = law.dim;
  double var = 0.0;
  for (int i = 0; i < law.dim; ++i) var = std::max(var, law.cov(i, i));
  const double lclt0 = law.period * std::pow(2 * M_PI, -d / 2) / std::sqrt(law.cov_det);

  // Calibrate the local-CLT error at the origin on a short run.
  const int nc = 128;
  const int rc = static_cast<int>(std::ceil(6 * std::sqrt(nc * var))) + 2;
  WalkRun cal = run_walk(law, rc, nc + 1, fd, nullptr);
  double c_err = 0.0, c_bound = 0.0;
  c_bound = lclt0;
  for (int n = 64; n <= nc; ++n) {
    if (n % law.period != 0) continue;
    double pn = cal.origin[n];
    if (pn <= 0.0) continue;
    c_err = std::max(c_err, std::abs(pn - lclt0 * std::pow(n, -d / 2)) * std::pow(n, d / 2 + 1));
    c_bound = std::max(c_bound, pn * std::pow(n, d / 2));
  }
  int N = opt.min_terms;
  while (N < opt.max_terms && c_err * std::pow(N, -d / 2) / (d / 2) > opt.tol / 2) N = N * 5 / 4 + 1;
  N = std::min(N, opt.max_terms);
  t.terms = N;

  int rw = opt.walk_radius > 0 ? opt.walk_radius
                               : std::max(radius + 4, static_cast<int>(std::ceil(6 * std::sqrt(N * var))) + 2);
  std::shared_ptr<const Box> wb;
  WalkRun run = run_walk(law, rw, N, fd, &wb);

  IntLattice dl = difference_lattice(law);
  const double bound_tail = c_bound / law.period * std::pow(N - 0.5 * law.period, 1 - d / 2) / (d / 2 - 1);
  t.lower.assign(tb.size(), 0.0);
  t.upper.assign(tb.size(), 0.0);
  parallel_chunks(tb.size(), 1024, [&](std::size_t i0, std::size_t i1) {
    for (std::size_t i = i0; i < i1; ++i) {
      Point x = tb.point(i);
      double h = run.partial[wb->index(x)];
      int r = parity_of(law, dl, x);
      int n0 = N;
      while (((n0 - r) % law.period + law.period) % law.period != 0) ++n0;
      double b = 0.5 * std::pow(theta_norm(law, x), 2);
      double tail = gaussian_tail(law, b, n0 - 0.5 * law.period);
      t.value[i] = h + tail;
      t.lower[i] = h;
      t.upper[i] = h + bound_tail;
    }
  });
  return t;
}


GreenPoint green_fourier(const StepLaw& law, const Point& x, double tol) {
  const int d = law.dim;
  if (d < 3) throw ValidationError("Green function requires d >= 3");
  // Split the symbol into per-axis parts and the rest.
  std::vector<std::vector<std::pair<int, double>>> axis(d);
  std::vector<std::pair<Point, double>> other;
  for (std::size_t k = 0; k < law.support.size(); ++k) {
    const Point& z = law.support[k];
    int nz = 0, at = -1;
    for (int i = 0; i < d; ++i)
      if (z[i] != 0) ++nz, at = i;
    if (nz == 0) continue;
    if (nz == 1)
      axis[at].push_back({z[at], law.prob[k]});
    else
      other.push_back({z, law.prob[k]});
  }
  const bool sym = law.sign_symmetric;
  const double norm = sym ? std::pow(M_PI, -d) : std::pow(2 * M_PI, -d);
  int xmax = 0;
  for (int c : x) xmax = std::max(xmax, std::abs(c));

  GreenPoint out;
  double total = 0.0, last = 0.0;
  for (int level = 0; level < 60; ++level) {
    const double a = M_PI * std::ldexp(1.0, -level);
    const double h = a / 2;
    // Per-coordinate cell offsets inside the shell.
    std::vector<double> starts = sym ? std::vector<double>{0.0, h} : std::vector<double>{-a, -h, 0.0, h};
    auto inner = [&](double s) { return sym ? s == 0.0 : (s == -h || s == 0.0); };
    const int m = static_cast<int>(starts.size());
    std::vector<int> q(d);
    for (int i = 0; i < d; ++i) q[i] = 8 + static_cast<int>(std::ceil(0.6 * std::abs(x[i]) * h));

    double shell = 0.0;
    std::vector<int> cell(d, 0);
    // Node tables for one cell.
    std::vector<std::vector<double>> kk(d), bb(d), ww(d);
    std::vector<std::vector<std::complex<double>>> ee(d);
    for (;;) {
      bool all_inner = true;
      for (int i = 0; i < d; ++i) all_inner = all_inner && inner(starts[cell[i]]);
      if (!all_inner) {
        for (int i = 0; i < d; ++i) {
          const GaussRule& g = gauss_rule(q[i]);
          kk[i].resize(q[i]);
          bb[i].resize(q[i]);
          ww[i].resize(q[i]);
          ee[i].resize(q[i]);
          for (int j = 0; j < q[i]; ++j) {
            double k = starts[cell[i]] + h * 0.5 * (g.x[j] + 1);
            kk[i][j] = k;
            ww[i][j] = g.w[j] * h * 0.5;
            double s = 0.0;
            for (auto [zi, p] : axis[i]) {
              double sn = std::sin(0.5 * zi * k);
              s += 2 * p * sn * sn;
            }
            bb[i][j] = s;
            ee[i][j] = sym ? std::complex<double>(std::cos(k * x[i]), 0.0)
                           : std::exp(std::complex<double>(0.0, k * x[i]));
          }
        }
        // Odometer over the tensor grid with prefix accumulators.
        std::vector<int> idx(d, 0);
        std::vector<double> pb(d + 1, 0.0), pw(d + 1, 1.0);
        std::vector<std::complex<double>> pe(d + 1, 1.0);
        std::vector<std::vector<double>> pdot(d + 1, std::vector<double>(other.size(), 0.0));
        auto refresh = [&](int from) {
          for (int i = from; i < d; ++i) {
            int j = idx[i];
            pb[i + 1] = pb[i] + bb[i][j];
            pw[i + 1] = pw[i] * ww[i][j];
            pe[i + 1] = pe[i] * ee[i][j];
            for (std::size_t o = 0; o < other.size(); ++o)
              pdot[i + 1][o] = pdot[i][o] + kk[i][j] * other[o].first[i];
          }
        };
        refresh(0);
        double csum = 0.0;
        for (;;) {
          double den = pb[d];
          for (std::size_t o = 0; o < other.size(); ++o) {
            double sn = std::sin(0.5 * pdot[d][o]);
            den += 2 * other[o].second * sn * sn;
          }
          csum += pw[d] * pe[d].real() / den;
          int i = d - 1;
          while (i >= 0 && ++idx[i] == q[i]) idx[i--] = 0;
          if (i < 0) break;
          refresh(i);
        }
        shell += csum;
      }
      int i = d - 1;
      while (i >= 0 && ++cell[i] == m) cell[i--] = 0;
      if (i < 0) break;
    }
    shell *= norm;
    total += shell;
    last = shell;
    out.levels = level + 1;
    if (level >= 2 && h * xmax < 0.5 && std::abs(shell) < tol / 4) break;
  }
  const double rem = last / (std::ldexp(1.0, d - 2) - 1);
  out.value = total + rem;
  out.error = std::abs(rem) + tol / 4;
  return out;
}

double harmonic_residual(const GreenTable& g) {
  const Box& b = *g.box;
  const StepLaw& law = g.law;
  double worst = 0.0;
  int y[kMaxDim];
  for (std::size_t i = 0; i < b.size(); ++i) {
    if (b.sup(i) + law.max_jump > b.radius()) continue;
    const std::int16_t* r = b.rep(i);
    double s = 0.0;
    for (std::size_t k = 0; k < law.support.size(); ++k) {
      for (int j = 0; j < law.dim; ++j) y[j] = r[j] + law.support[k][j];
      s += law.prob[k] * g.value[b.index(y)];
    }
    double delta = b.sup(i) == 0 ? 1.0 : 0.0;
    worst = std::max(worst, std::abs(g.value[i] - delta - s));
  }
  return worst;
}

GreenTable second_order_table(const StepLaw& law, int radius) {
  if (law.dim < 5) throw ValidationError("second-order kernel requires d >= 5");
  if (!axis_separable(law)) throw ValidationError("second-order table needs an axis-separable step law");
  GreenTable t;
  t.law = law;
  t.method = GreenMethod::fourier;
  t.box = std::make_shared<const Box>(law.dim, radius, 0, default_free_dims(law));
  separable_table(law, *t.box, t.value, 1);
  return t;
}

KernelValue second_order_kernel(const GreenTable& g, const Point& x, int conv_radius) {
  const StepLaw& law = g.law;
  const int d = law.dim;
  if (d < 5) throw ValidationError("second-order kernel requires d >= 5");
  if (static_cast<int>(x.size()) != d) throw ValidationError("point has wrong dimension");
  // Put the point in a form fixed by the reduced coordinates of the box.
  Point xc = x;
  int nfree = d;
  if (law.hyperoctahedral) {
    std::vector<int> nz;
    for (int c : x)
      if (c != 0) nz.push_back(std::abs(c));
    nfree = static_cast<int>(nz.size());
    xc.assign(d, 0);
    for (int i = 0; i < nfree; ++i) xc[i] = nz[i];
  }
  if (static_cast<int>(sup_norm(xc)) + conv_radius > g.radius())
    throw ValidationError("Green table too small for the convolution radius");
  Box box(d, conv_radius, 0, nfree);
  double inside = chunked_sum(box.size(), 4096, [&](std::size_t i0, std::size_t i1) {
    int y[kMaxDim], z[kMaxDim];
    double s = 0.0;
    for (std::size_t i = i0; i < i1; ++i) {
      const std::int16_t* r = box.rep(i);
      for (int k = 0; k < d; ++k) {
        y[k] = r[k];
        z[k] = xc[k] - r[k];
      }
      s += box.weight(i) * g.at(y) * g.at(z);
    }
    return s;
  });

  // Continuum tail over the complement of the cube of half-side L.
  const double L = conv_radius + 0.5;
  const double cg = green_constant(law);
  const GaussRule& gt = gauss_rule(32);
  const GaussRule& gf = gauss_rule(6);
  const int nf = d - 1;
  double tail = 0.0;
  std::vector<int> fi(nf, 0);
  double u[kMaxDim], w1[kMaxDim], w2[kMaxDim];
  for (int face = 0; face < 2 * d; ++face) {
    const int axis_ = face / 2;
    const double sgn = face % 2 ? 1.0 : -1.0;
    std::fill(fi.begin(), fi.end(), 0);
    for (;;) {
      double wf = 1.0;
      for (int k = 0, c = 0; k < d; ++k) {
        if (k == axis_) {
          u[k] = sgn;
        } else {
          u[k] = gf.x[fi[c]];
          wf *= gf.w[fi[c]];
          ++c;
        }
      }
      for (std::size_t j = 0; j < gt.x.size(); ++j) {
        double tt = 0.5 * (gt.x[j] + 1);
        double wt = 0.5 * gt.w[j];
        double s = L / tt;
        for (int k = 0; k < d; ++k) {
          w1[k] = s * u[k];
          w2[k] = xc[k] - s * u[k];
        }
        double f = cg * std::pow(theta_norm(law, w1), 2.0 - d) * cg * std::pow(theta_norm(law, w2), 2.0 - d);
        tail += wf * wt * f * std::pow(s, d - 1) * L / (tt * tt);
      }
      int c = nf - 1;
      while (c >= 0 && ++fi[c] == static_cast<int>(gf.x.size())) fi[c--] = 0;
      if (c < 0) break;
    }
  }
  KernelValue kv;
  kv.box_part = inside;
  kv.tail_part = tail;
  kv.value = inside + tail;
  return kv;
}

}  // namespace brcap
