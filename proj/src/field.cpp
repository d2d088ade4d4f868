#include "brcap/field.hpp"

#include <algorithm>
#include <cmath>

namespace brcap {

std::string to_string(Closure c) { return c == Closure::matched ? "matched" : "dirichlet_zero"; }

Closure parse_closure(const std::string& s) {
  if (s == "matched") return Closure::matched;
  if (s == "dirichlet_zero") return Closure::dirichlet_zero;
  throw ValidationError("unknown closure: " + s);
}

std::size_t SolverContext::site(const Point& x) const {
  std::size_t i = box->index(x);
  if (i == Box::npos) throw ValidationError("point outside the solver box");
  return i;
}

double LatticeField::at(const Point& x) const {
  std::size_t i = box->index(x);
  if (i == Box::npos) throw ValidationError("point outside the field box");
  return value[i];
}

namespace {

void fill_context(SolverContext& c) {
  const Box& b = *c.box;
  const int d = c.step.dim;
  c.in_K.assign(b.size(), 0);
  c.exterior.assign(b.size(), 0);
  c.g_far.assign(b.size(), 0.0);
  c.phi_far.assign(b.size(), 0.0);
  c.layer.clear();
  for (std::size_t i = 0; i < b.size(); ++i) {
    Point x = b.point(i);
    c.in_K[i] = c.K.contains(x);
    c.exterior[i] = !b.interior(i);
    c.g_far[i] = c.green->eval(x);
    double n = theta_norm(c.step, x);
    c.phi_far[i] = n > 0 ? std::pow(n, 4.0 - d) : 1.0;
    if (b.sup(i) == b.radius()) c.layer.push_back(static_cast<std::uint32_t>(i));
  }
}

}  // namespace

SolverContext make_context(const StepLaw& step, const OffspringLaw& law, const LatticeSet& K, int radius,
                           int free_dims, std::shared_ptr<const GreenTable> green) {
  const int d = step.dim;
  if (K.dim() != d) throw ValidationError("target set has wrong dimension");
  if (K.size() == 0) throw ValidationError("empty target set");
  if (d < 5) throw ValidationError("solver requires d >= 5");
  int ksup = 0;
  for (const auto& a : K.points()) ksup = std::max(ksup, static_cast<int>(sup_norm(a)));
  if (ksup > radius - 2 * step.max_jump) throw ValidationError("target set too close to the box boundary");
  const bool sym = step.hyperoctahedral && K.hyperoctahedral();
  if (free_dims < 0) free_dims = sym ? 0 : d;
  if (free_dims < d && !sym) throw ValidationError("symmetry reduction needs hyperoctahedral step law and set");
  SolverContext c;
  c.step = step;
  c.law = law;
  c.adj = adjoint_of(law);
  c.K = K;
  c.box = std::make_shared<const Box>(d, radius, step.max_jump, free_dims);
  c.P = std::make_shared<const Stepper>(c.box, step);
  if (!green) green = std::make_shared<const GreenTable>(green_table(step, c.box->extent(), GreenMethod::fourier));
  if (green->radius() < c.box->extent()) throw ValidationError("Green table smaller than the solver box");
  c.green = green;
  fill_context(c);
  return c;
}

SolverContext rebox(const SolverContext& ctx, int free_dims) {
  return make_context(ctx.step, ctx.law, ctx.K, ctx.box->radius(), free_dims, ctx.green);
}

namespace {

double wdot(const Box& b, const std::vector<double>& x, const std::vector<double>& y) {
  const auto& in = b.interior_sites();
  return chunked_sum(in.size(), 8192, [&](std::size_t k0, std::size_t k1) {
    double s = 0.0;
    for (std::size_t k = k0; k < k1; ++k) {
      const auto i = in[k];
      s += b.weight(i) * x[i] * y[i];
    }
    return s;
  });
}

// Solves (I - S) y = rhs, S = sD P sD, in the orbit-weighted inner product.
std::vector<double> cg_solve(const Stepper& P, const std::vector<double>& sD, const std::vector<double>& rhs,
                             double tol, int maxit, CgStats* st) {
  const Box& b = P.box();
  const auto& in = b.interior_sites();
  const std::size_t n = b.size();
  std::vector<double> x(n, 0.0), r(rhs), p(rhs), Ap(n, 0.0), t(n, 0.0), u;
  for (std::size_t i = 0; i < n; ++i)
    if (!b.interior(i)) r[i] = p[i] = 0.0;
  const double bnorm = std::sqrt(wdot(b, r, r));
  if (st) *st = {};
  if (bnorm == 0.0) return x;
  double rr = bnorm * bnorm;
  int it = 0;
  for (; it < maxit; ++it) {
    if (std::sqrt(rr) <= tol * bnorm) break;
    for (auto i : in) t[i] = sD[i] * p[i];
    P.apply(t, u);
    parallel_chunks(in.size(), 8192, [&](std::size_t k0, std::size_t k1) {
      for (std::size_t k = k0; k < k1; ++k) {
        const auto i = in[k];
        Ap[i] = p[i] - sD[i] * u[i];
      }
    });
    const double pAp = wdot(b, p, Ap);
    if (!(pAp > 0.0)) throw ConvergenceError("linear operator lost positivity");
    const double alpha = rr / pAp;
    for (auto i : in) {
      x[i] += alpha * p[i];
      r[i] -= alpha * Ap[i];
    }
    const double rr2 = wdot(b, r, r);
    const double beta = rr2 / rr;
    rr = rr2;
    for (auto i : in) p[i] = r[i] + beta * p[i];
  }
  if (st) {
    st->iterations = it;
    st->relres = std::sqrt(rr) / bnorm;
  }
  if (std::sqrt(rr) > tol * bnorm) throw ConvergenceError("linear solve did not converge");
  return x;
}

std::vector<double> sqrt_field(const Box& b, const std::vector<double>& D) {
  std::vector<double> s(D.size(), 0.0);
  for (std::size_t i = 0; i < D.size(); ++i)
    if (b.interior(i)) s[i] = std::sqrt(std::max(0.0, D[i]));
  return s;
}

}  // namespace

std::vector<double> solve_forward(const Stepper& P, const std::vector<double>& D, const std::vector<double>& b,
                                  const std::vector<double>& ext, double tol, int maxit, CgStats* st) {
  const Box& box = P.box();
  const std::size_t n = box.size();
  std::vector<double> e(n, 0.0), pe;
  bool any_ext = false;
  for (std::size_t i = 0; i < n; ++i)
    if (!box.interior(i)) {
      e[i] = ext[i];
      any_ext = any_ext || ext[i] != 0.0;
    }
  std::vector<double> b2(n, 0.0);
  if (any_ext) P.apply(e, pe);
  for (auto i : box.interior_sites()) b2[i] = b[i] + (any_ext ? D[i] * pe[i] : 0.0);
  const auto sD = sqrt_field(box, D);
  std::vector<double> pb;
  P.apply(b2, pb);
  std::vector<double> rhs(n, 0.0);
  for (auto i : box.interior_sites()) rhs[i] = sD[i] * pb[i];
  auto y = cg_solve(P, sD, rhs, tol, maxit, st);
  std::vector<double> v(e);
  for (auto i : box.interior_sites()) v[i] = b2[i] + sD[i] * y[i];
  return v;
}

std::vector<double> solve_adjoint(const Stepper& P, const std::vector<double>& D, const std::vector<double>& b,
                                  double tol, int maxit, CgStats* st) {
  const Box& box = P.box();
  const std::size_t n = box.size();
  const auto sD = sqrt_field(box, D);
  std::vector<double> rhs(n, 0.0);
  for (auto i : box.interior_sites()) rhs[i] = sD[i] * b[i];
  auto y = cg_solve(P, sD, rhs, tol, maxit, st);
  std::vector<double> t(n, 0.0), u;
  for (auto i : box.interior_sites()) t[i] = sD[i] * y[i];
  P.apply(t, u);
  std::vector<double> v(n, 0.0);
  for (auto i : box.interior_sites()) v[i] = b[i] + u[i];
  return v;
}

namespace {

double layer_fit(const SolverContext& c, const std::vector<double>& v, bool log_profile) {
  double s = 0.0, w = 0.0;
  for (auto i : c.layer) {
    const double wi = c.box->weight(i);
    const double r = log_profile ? -std::log1p(-std::min(v[i], 1.0 - 1e-16)) / c.phi_far[i] : v[i] / c.g_far[i];
    s += wi * r;
    w += wi;
  }
  return s / w;
}

}  // namespace

LatticeField solve_p_c(const SolverContext& ctx, const SolverOptions& opt) {
  const Box& b = *ctx.box;
  const std::size_t n = b.size();
  const bool matched = opt.closure == Closure::matched;
  std::vector<double> p(n, 0.0), m;
  for (std::size_t i = 0; i < n; ++i)
    if (ctx.in_K[i]) p[i] = 1.0;
  double c = 0.0;
  auto set_ext = [&] {
    for (std::size_t i = 0; i < n; ++i)
      if (ctx.exterior[i]) p[i] = matched ? c * ctx.g_far[i] : 0.0;
  };
  LatticeField f;
  f.quantity = "p_c";
  f.box = ctx.box;
  f.closure = opt.closure;
  const auto& in = b.interior_sites();

  if (opt.method == FixedPoint::picard) {
    long it = 0;
    for (; it < opt.max_picard; ++it) {
      set_ext();
      ctx.P->apply(p, m);
      double upd = 0.0;
      for (auto i : in) {
        if (ctx.in_K[i]) continue;
        const double v = ctx.law.pmf.one_minus_gen(m[i]);
        upd = std::max(upd, std::abs(v - p[i]));
        p[i] = v;
      }
      if (matched) c = layer_fit(ctx, p, false);
      if (upd < opt.tol) break;
    }
    if (it == opt.max_picard) throw ConvergenceError("fixed-point iteration did not converge");
    f.iterations = static_cast<int>(it + 1);
  } else {
    std::vector<double> zero(n, 0.0), gext(n, 0.0);
    for (std::size_t i = 0; i < n; ++i)
      if (ctx.exterior[i]) gext[i] = ctx.g_far[i];
    int it = 0;
    bool done = false;
    for (; it < opt.max_newton && !done; ++it) {
      set_ext();
      ctx.P->apply(p, m);
      std::vector<double> r(n, 0.0), lam(n, 0.0);
      for (auto i : in) {
        if (ctx.in_K[i]) continue;
        r[i] = ctx.law.pmf.one_minus_gen(m[i]) - p[i];
        lam[i] = ctx.law.pmf.gen_prime(1.0 - m[i]);
      }
      CgStats st;
      auto d0 = solve_forward(*ctx.P, lam, r, zero, opt.cg_tol, opt.max_cg, &st);
      f.linear_iterations += st.iterations;
      double dc = 0.0;
      std::vector<double> d1;
      if (matched) {
        d1 = solve_forward(*ctx.P, lam, zero, gext, opt.cg_tol, opt.max_cg, &st);
        f.linear_iterations += st.iterations;
        std::vector<double> trial(p);
        for (auto i : in) trial[i] += d0[i];
        const double lp = layer_fit(ctx, trial, false);
        const double ld = layer_fit(ctx, d1, false);
        dc = (lp - c) / (1.0 - ld);
      }
      double step = 0.0;
      for (auto i : in) {
        const double dl = d0[i] + (matched ? dc * d1[i] : 0.0);
        step = std::max(step, std::abs(dl));
        p[i] = std::clamp(p[i] + dl, 0.0, 1.0);
      }
      c += dc;
      done = step < opt.tol && std::abs(dc) <= opt.tol * std::max(c, 1e-300) + 1e-300;
    }
    if (!done) throw ConvergenceError("Newton iteration did not converge");
    f.iterations = it;
  }
  set_ext();
  ctx.P->apply(p, m);
  double res = 0.0;
  for (auto i : in)
    if (!ctx.in_K[i]) res = std::max(res, std::abs(ctx.law.pmf.one_minus_gen(m[i]) - p[i]));
  f.residual = res;
  f.closure_coeff = c;
  f.value = std::move(p);
  return f;
}

LatticeField solve_p_adj(const SolverContext& ctx, const LatticeField& p_c) {
  const Box& b = *ctx.box;
  std::vector<double> m;
  ctx.P->apply(p_c.value, m);
  LatticeField f;
  f.quantity = "p_adj";
  f.box = ctx.box;
  f.closure = p_c.closure;
  f.closure_coeff = 0.5 * ctx.law.sigma2 * p_c.closure_coeff;
  f.value.assign(b.size(), 0.0);
  for (auto i : b.interior_sites()) f.value[i] = ctx.in_K[i] ? 1.0 : ctx.adj.pmf.one_minus_gen(m[i]);
  return f;
}

std::vector<double> survival_field(const SolverContext& ctx, const LatticeField& p_adj) {
  std::vector<double> D(ctx.box->size(), 0.0);
  for (auto i : ctx.box->interior_sites())
    if (!ctx.in_K[i]) D[i] = 1.0 - p_adj.value[i];
  return D;
}

LatticeField solve_p_I(const SolverContext& ctx, const LatticeField& p_adj, const SolverOptions& opt) {
  const Box& b = *ctx.box;
  const std::size_t n = b.size();
  const auto D = survival_field(ctx, p_adj);
  std::vector<double> rhs(n, 0.0);
  for (auto i : b.interior_sites()) rhs[i] = p_adj.value[i];
  LatticeField f;
  f.quantity = "p_I";
  f.box = ctx.box;
  f.closure = opt.closure;
  auto solve = [&](double c) {
    std::vector<double> ext(n, 0.0);
    for (std::size_t i = 0; i < n; ++i)
      if (ctx.exterior[i]) ext[i] = -std::expm1(-c * ctx.phi_far[i]);
    CgStats st;
    auto v = solve_forward(*ctx.P, D, rhs, ext, opt.cg_tol, opt.max_cg, &st);
    f.linear_iterations += st.iterations;
    ++f.iterations;
    return v;
  };
  if (opt.closure == Closure::dirichlet_zero) {
    f.value = solve(0.0);
    return f;
  }
  // Secant on the closure coefficient.
  double c0 = 0.0;
  auto v0 = solve(c0);
  double h0 = layer_fit(ctx, v0, true) - c0;
  double c1 = c0 + h0;
  auto v1 = solve(c1);
  double h1 = layer_fit(ctx, v1, true) - c1;
  int it = 0;
  while (std::abs(c1 - c0) > opt.tol * std::max(std::abs(c1), 1e-300) && it < opt.max_outer) {
    if (h1 == h0) break;
    double c2 = c1 - h1 * (c1 - c0) / (h1 - h0);
    c0 = c1;
    h0 = h1;
    c1 = std::max(0.0, c2);
    v1 = solve(c1);
    h1 = layer_fit(ctx, v1, true) - c1;
    ++it;
  }
  if (it == opt.max_outer) throw ConvergenceError("closure coefficient did not converge");
  f.closure_coeff = c1;
  f.value = std::move(v1);
  return f;
}

LatticeField solve_p_minus(const SolverContext& ctx, const LatticeField& p_I) {
  LatticeField f;
  f.quantity = "p_minus";
  f.box = ctx.box;
  f.closure = p_I.closure;
  ctx.P->apply(p_I.value, f.value);
  return f;
}

double bcap_from_fields(const SolverContext& ctx, const FieldSet& f) {
  double s = 0.0;
  for (std::size_t i = 0; i < ctx.box->size(); ++i)
    if (ctx.in_K[i]) s += ctx.box->weight(i) * (1.0 - f.p_minus.value[i]);
  return s;
}

FieldSet solve_all(const SolverContext& ctx, const SolverOptions& opt) {
  FieldSet f;
  f.p_c = solve_p_c(ctx, opt);
  f.p_adj = solve_p_adj(ctx, f.p_c);
  f.p_I = solve_p_I(ctx, f.p_adj, opt);
  f.p_minus = solve_p_minus(ctx, f.p_I);
  f.bcap = bcap_from_fields(ctx, f);
  return f;
}

std::vector<double> indicator(const SolverContext& ctx, const std::vector<std::size_t>& sites) {
  std::vector<double> v(ctx.box->size(), 0.0);
  for (auto s : sites) v[s] = 1.0;
  return v;
}

std::vector<double> indicator(const SolverContext& ctx, const LatticeSet& S) {
  if (ctx.box->reduced() && !S.hyperoctahedral()) throw ValidationError("set is not invariant under the box symmetry");
  std::vector<double> v(ctx.box->size(), 0.0);
  for (const auto& x : S.points()) v[ctx.site(x)] = 1.0;
  return v;
}

namespace {

std::vector<double> restrict_to(const std::vector<double>& v, const std::vector<double>& region) {
  if (region.empty()) return v;
  std::vector<double> r(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) r[i] = v[i] * region[i];
  return r;
}

}  // namespace

std::vector<double> killed_column(const SolverContext& ctx, const std::vector<double>& D, const std::vector<double>& source,
                                  const std::vector<double>& region, const SolverOptions& opt) {
  std::vector<double> zero(ctx.box->size(), 0.0);
  return solve_forward(*ctx.P, restrict_to(D, region), restrict_to(source, region), zero, opt.cg_tol, opt.max_cg);
}

std::vector<double> killed_row(const SolverContext& ctx, const std::vector<double>& D, const std::vector<double>& source,
                               const std::vector<double>& region, const SolverOptions& opt) {
  return solve_adjoint(*ctx.P, restrict_to(D, region), restrict_to(source, region), opt.cg_tol, opt.max_cg);
}

std::vector<double> exit_measure(const SolverContext& ctx, const std::vector<double>& D, const std::vector<double>& B,
                                 const std::vector<double>& source, const SolverOptions& opt) {
  auto R = killed_row(ctx, D, source, B, opt);
  const std::size_t n = ctx.box->size();
  std::vector<double> t(n, 0.0), E;
  for (std::size_t i = 0; i < n; ++i) t[i] = B[i] * D[i] * R[i];
  ctx.P->apply(t, E);
  for (std::size_t i = 0; i < n; ++i)
    if (B[i] != 0.0) E[i] = 0.0;
  return E;
}

std::vector<double> entrance_measure(const SolverContext& ctx, const std::vector<double>& D, const std::vector<double>& B,
                                     const std::vector<double>& source, const SolverOptions& opt) {
  auto C = killed_column(ctx, D, source, B, opt);
  const std::size_t n = ctx.box->size();
  std::vector<double> t(n, 0.0), H;
  for (std::size_t i = 0; i < n; ++i) t[i] = B[i] * C[i];
  ctx.P->apply(t, H);
  for (std::size_t i = 0; i < n; ++i) H[i] = B[i] != 0.0 ? 0.0 : D[i] * H[i];
  return H;
}

namespace {

double wsum(const Box& b, const std::vector<double>& x, const std::vector<double>& y, const std::vector<double>& mask) {
  double s = 0.0;
  for (std::size_t i = 0; i < b.size(); ++i)
    if (mask[i] != 0.0) s += b.weight(i) * x[i] * y[i];
  return s;
}

double rel(double a, double b) { return std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1e-300}); }

}  // namespace

IdentityReport check_identities(const SolverContext& ctx, const FieldSet& f, const LatticeSet& B,
                                const std::vector<Point>& probes_in_B, const std::vector<Point>& probes_out_B,
                                const SolverOptions& opt) {
  const Box& b = *ctx.box;
  const std::size_t n = b.size();
  IdentityReport rep;
  const auto D = survival_field(ctx, f.p_adj);
  const auto one_K = indicator(ctx, ctx.K);
  auto Bv = indicator(ctx, B);
  for (std::size_t i = 0; i < n; ++i)
    if (one_K[i] != 0.0 && Bv[i] == 0.0) throw ValidationError("B must contain K");
  for (std::size_t i = 0; i < n; ++i)
    if (Bv[i] != 0.0 && b.sup(i) + ctx.step.max_jump > b.radius())
      throw ValidationError("B must stay a step inside the box");
  std::vector<double> outside(n, 0.0);
  for (auto i : b.interior_sites()) outside[i] = Bv[i] == 0.0 ? 1.0 : 0.0;
  std::vector<double> interior(n, 0.0);
  for (auto i : b.interior_sites()) interior[i] = 1.0;

  // Column form: sum_a G_K(x, a) with the closure flux.
  std::vector<double> ext_c(n, 0.0), ext_I(n, 0.0);
  for (std::size_t i = 0; i < n; ++i)
    if (ctx.exterior[i]) {
      ext_c[i] = f.p_c.value[i];
      ext_I[i] = f.p_I.value[i];
    }
  auto F = solve_forward(*ctx.P, D, one_K, ext_c, opt.cg_tol, opt.max_cg);
  for (auto i : b.interior_sites()) rep.pkx_column = std::max(rep.pkx_column, std::abs(F[i] - f.p_c.value[i]));

  std::vector<double> pe_c, pe_I;
  ctx.P->apply(ext_c, pe_c);
  ctx.P->apply(ext_I, pe_I);
  std::vector<double> s_c(n, 0.0), s_I(n, 0.0);
  for (auto i : b.interior_sites()) {
    s_c[i] = one_K[i] + D[i] * pe_c[i];
    s_I[i] = f.p_adj.value[i] + D[i] * pe_I[i];
  }
  std::vector<Point> all(probes_in_B);
  all.insert(all.end(), probes_out_B.begin(), probes_out_B.end());
  for (const auto& x : all) {
    const std::size_t sx = ctx.site(x);
    auto R = killed_row(ctx, D, indicator(ctx, std::vector<std::size_t>{sx}), {}, opt);
    const double w = b.weight(sx);
    rep.pkx_row = std::max(rep.pkx_row, rel(wsum(b, R, s_c, interior), w * f.p_c.value[sx]));
    rep.q_gr1_row = std::max(rep.q_gr1_row, rel(wsum(b, R, s_I, interior), w * f.p_I.value[sx]));
  }

  std::vector<double> e(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) e[i] = 1.0 - f.p_minus.value[i];

  std::vector<double> dirichlet(n, 0.0);
  for (auto i : b.interior_sites()) dirichlet[i] = 1.0;
  rep.green_excess = -1.0;
  std::vector<std::vector<double>> col_y, row_y;
  for (const auto& y : probes_out_B) {
    const std::size_t sy = ctx.site(y);
    if (Bv[sy] != 0.0) throw ValidationError("outer probe lies in B");
    auto src = indicator(ctx, std::vector<std::size_t>{sy});
    col_y.push_back(killed_column(ctx, D, src, {}, opt));
    row_y.push_back(killed_row(ctx, D, src, {}, opt));
    auto gbox = killed_column(ctx, dirichlet, src, {}, opt);
    for (auto i : b.interior_sites()) rep.green_excess = std::max(rep.green_excess, col_y.back()[i] - gbox[i]);
  }
  rep.hbk_margin = 1e300;
  for (const auto& x : probes_in_B) {
    const std::size_t sx = ctx.site(x);
    if (Bv[sx] == 0.0) throw ValidationError("inner probe lies outside B");
    auto src = indicator(ctx, std::vector<std::size_t>{sx});
    auto E = exit_measure(ctx, D, Bv, src, opt);
    auto H = entrance_measure(ctx, D, Bv, src, opt);
    const double w = b.weight(sx);
    for (std::size_t k = 0; k < probes_out_B.size(); ++k) {
      rep.exit1 = std::max(rep.exit1, rel(w * col_y[k][sx], wsum(b, E, col_y[k], outside)));
      rep.exit2 = std::max(rep.exit2, rel(w * row_y[k][sx], wsum(b, row_y[k], H, outside)));
    }
    double mass = wsum(b, E, interior, outside);
    rep.hbk_margin = std::min(rep.hbk_margin, (mass - w * D[sx] * e[sx]) / w);
  }

  auto HK = entrance_measure(ctx, D, Bv, one_K, opt);
  rep.bcap_sum = f.bcap;
  rep.bcap_harmonic = wsum(b, HK, e, outside);
  rep.bcap_ek = rel(rep.bcap_sum, rep.bcap_harmonic);
  return rep;
}

RatioCurve green_ratio_curve(const SolverContext& ctx, const FieldSet& f, double r, const std::vector<double>& s_values,
                             const std::vector<int>& targets, const SolverOptions& opt) {
  const int d = ctx.step.dim;
  SolverContext c1 = rebox(ctx, 1);
  const Box& b1 = *c1.box;
  const std::size_t n = b1.size();
  std::vector<double> D(n, 0.0), one(n, 0.0);
  for (auto i : b1.interior_sites()) {
    one[i] = 1.0;
    if (c1.in_K[i]) continue;
    Point x = b1.point(i);
    D[i] = 1.0 - f.p_adj.value[ctx.site(x)];
  }
  RatioCurve out;
  out.s = s_values;
  out.deficit_box.assign(s_values.size(), 0.0);
  out.deficit_free.assign(s_values.size(), 0.0);
  const int R = b1.radius();
  for (int t : targets) {
    Point y(d, 0);
    y[0] = t;
    const std::size_t sy = c1.site(y);
    auto src = indicator(c1, std::vector<std::size_t>{sy});
    auto GK = killed_column(c1, D, src, {}, opt);
    auto gb = killed_column(c1, one, src, {}, opt);
    for (auto i : b1.interior_sites()) {
      if (i == sy || c1.in_K[i]) continue;
      const double nx = std::sqrt(b1.norm2(i));
      const double db = 1.0 - GK[i] / gb[i];
      double df = -1.0;
      if (b1.sup(i) <= R / 2) {
        Point z = b1.point(i);
        z[0] -= t;
        if (c1.green->covers(z.data())) df = 1.0 - GK[i] / c1.green->at(z);
      }
      for (std::size_t k = 0; k < s_values.size(); ++k) {
        const double m = s_values[k] * r;
        if (nx < m || t < m) continue;
        out.deficit_box[k] = std::max(out.deficit_box[k], db);
        out.deficit_free[k] = std::max(out.deficit_free[k], df);
      }
    }
  }
  return out;
}

}  // namespace brcap
