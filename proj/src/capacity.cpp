#include "brcap/capacity.hpp"

#include <algorithm>
#include <map>
#include <utility>

namespace brcap {

std::string to_string(CapMethod m) {
  switch (m) {
    case CapMethod::sum_escape: return "sum_escape";
    case CapMethod::far_field: return "far_field";
    case CapMethod::harmonic_measure: return "harmonic_measure";
  }
  return "";
}

double rate_exponent(int d) {
  if (d < 5) throw ValidationError("rate exponent needs d >= 5");
  return (d - 4.0) / (2.0 * (d - 1.0));
}

namespace {

std::uint64_t base_digest(const std::string& tag, const LatticeSet& K, const OffspringLaw& law, const StepLaw& step) {
  Digest h;
  h.add(tag);
  h.add(static_cast<std::int64_t>(K.digest()));
  h.add(static_cast<std::int64_t>(law.hash()));
  h.add(static_cast<std::int64_t>(step.hash()));
  return h.value();
}

std::uint64_t solver_digest(const std::string& tag, const SolverRun& run) {
  Digest h;
  h.add(static_cast<std::int64_t>(base_digest(tag, run.ctx.K, run.ctx.law, run.ctx.step)));
  h.add(static_cast<std::int64_t>(run.ctx.box->radius()));
  h.add(to_string(run.fields.p_c.closure));
  if (run.coarse) h.add(static_cast<std::int64_t>(run.coarse->ctx.box->radius()));
  return h.value();
}

double half_from(double v, double w) { return std::abs(v - w); }

}  // namespace

SolverRun run_solver(const StepLaw& step, const OffspringLaw& law, const LatticeSet& K, int radius,
                     const SolverOptions& opt, int check_radius, std::shared_ptr<const GreenTable> green) {
  SolverRun run;
  run.ctx = make_context(step, law, K, radius, -1, std::move(green));
  run.fields = solve_all(run.ctx, opt);
  if (check_radius > 0) {
    if (check_radius >= radius) throw ValidationError("check radius must be smaller than the box radius");
    auto c = std::make_shared<SolverRun>();
    c->ctx = make_context(step, law, K, check_radius, -1, run.ctx.green);
    c->fields = solve_all(c->ctx, opt);
    run.coarse = c;
  }
  return run;
}

CapacityEstimate bcap_sum_escape_mc(const LatticeSet& K, const OffspringLaw& law, const StepLaw& step,
                                    const McOptions& opt) {
  if (K.size() == 0) throw ValidationError("empty target set");
  // Orbit representatives with multiplicities when the geometry allows it.
  std::map<Point, int> orbits;
  std::vector<std::pair<Point, int>> reps;
  if (step.hyperoctahedral && K.hyperoctahedral()) {
    for (const auto& a : K.points()) {
      Point c(a);
      for (auto& v : c) v = std::abs(v);
      std::sort(c.begin(), c.end());
      ++orbits[c];
    }
    for (auto& [p, n] : orbits) reps.push_back({p, n});
  } else {
    for (const auto& a : K.points()) reps.push_back({a, 1});
  }
  CapacityEstimate e;
  e.method = CapMethod::sum_escape;
  e.mode = "mc";
  e.mixed = true;
  for (std::size_t k = 0; k < reps.size(); ++k) {
    McOptions o = opt;
    o.seed = mix64(opt.seed + k);
    HitEstimate h = escape_probability(K, reps[k].first, law, step, o);
    e.value += reps[k].second * h.p_hat;
    e.lower += reps[k].second * h.ci_low;
    e.upper += reps[k].second * h.ci_high;
  }
  e.half_width = 0.5 * (e.upper - e.lower);
  Digest h;
  h.add(static_cast<std::int64_t>(base_digest("sum_escape/mc", K, law, step)));
  h.add(static_cast<std::int64_t>(opt.samples));
  h.add(static_cast<std::int64_t>(opt.seed));
  h.add(static_cast<std::int64_t>(opt.max_vertices));
  h.add(opt.r_stop);
  h.add(opt.remainder_safety);
  h.add(opt.frontier_safety);
  e.digest = h.value();
  return e;
}

CapacityEstimate bcap_sum_escape_solver(const SolverRun& run) {
  CapacityEstimate e;
  e.method = CapMethod::sum_escape;
  e.mode = "solver";
  e.value = run.fields.bcap;
  if (run.coarse) e.half_width = half_from(e.value, run.coarse->fields.bcap);
  e.lower = e.value - e.half_width;
  e.upper = e.value + e.half_width;
  e.digest = solver_digest("sum_escape/solver", run);
  return e;
}

double harmonic_formula(const SolverContext& ctx, const FieldSet& f, const LatticeSet& B, const SolverOptions& opt) {
  const Box& b = *ctx.box;
  const std::size_t n = b.size();
  const auto D = survival_field(ctx, f.p_adj);
  const auto one_K = indicator(ctx, ctx.K);
  const auto Bv = indicator(ctx, B);
  for (std::size_t i = 0; i < n; ++i) {
    if (one_K[i] != 0.0 && Bv[i] == 0.0) throw ValidationError("B must contain K");
    if (Bv[i] != 0.0 && b.sup(i) + ctx.step.max_jump > b.radius())
      throw ValidationError("B must stay a step inside the box");
  }
  const auto H = entrance_measure(ctx, D, Bv, one_K, opt);
  double s = 0.0;
  for (auto i : b.interior_sites())
    if (Bv[i] == 0.0) s += b.weight(i) * H[i] * (1.0 - f.p_minus.value[i]);
  return s;
}

CapacityEstimate bcap_harmonic(const SolverRun& run, const LatticeSet& B, const SolverOptions& opt) {
  CapacityEstimate e;
  e.method = CapMethod::harmonic_measure;
  e.mode = "solver";
  e.value = harmonic_formula(run.ctx, run.fields, B, opt);
  if (run.coarse) {
    double c = 0.0;
    try {
      c = harmonic_formula(run.coarse->ctx, run.coarse->fields, B, opt);
    } catch (const ValidationError&) {
      c = run.coarse->fields.bcap;
    }
    e.half_width = half_from(e.value, c);
  }
  e.lower = e.value - e.half_width;
  e.upper = e.value + e.half_width;
  Digest h;
  h.add(static_cast<std::int64_t>(solver_digest("harmonic", run)));
  h.add(static_cast<std::int64_t>(B.digest()));
  e.digest = h.value();
  return e;
}

namespace {

void check_ladder(const LatticeSet& K, const std::vector<int>& ladder, double lambda) {
  if (ladder.empty()) throw ValidationError("empty ladder");
  if (!(lambda > 1.0)) throw ValidationError("lambda must exceed 1");
  const double r = std::max(K.radius(), 1.0);
  for (std::size_t i = 0; i < ladder.size(); ++i) {
    if (ladder[i] < lambda * r) throw ValidationError("ladder point closer than lambda r_K");
    if (i && ladder[i] <= ladder[i - 1]) throw ValidationError("ladder must be increasing");
  }
}

void finish_ladder(CapacityEstimate& e, double r, double reference) {
  const auto& L = e.ladder;
  e.value = L.back().ratio;
  if (L.size() > 1) e.half_width = std::abs(L.back().ratio - L[L.size() - 2].ratio);
  e.lower = std::min(L.back().lower, e.value - e.half_width);
  e.upper = std::max(L.back().upper, e.value + e.half_width);
  if (reference > 0.0 && L.size() > 1) {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int n = 0;
    for (const auto& p : L) {
      const double gap = std::abs(p.ratio - reference);
      if (gap <= 0.0) continue;
      const double x = std::log(r / p.dist), y = std::log(gap);
      sx += x;
      sy += y;
      sxx += x * x;
      sxy += x * y;
      ++n;
    }
    if (n > 1) e.slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  }
}

}  // namespace

CapacityEstimate bcap_far_field_solver(const SolverRun& run, const std::vector<int>& ladder, double lambda,
                                       double reference) {
  check_ladder(run.ctx.K, ladder, lambda);
  CapacityEstimate e;
  e.method = CapMethod::far_field;
  e.mode = "solver";
  const int d = run.ctx.step.dim;
  for (int t : ladder) {
    if (t > run.ctx.box->radius()) throw ValidationError("ladder point outside the solver box");
    Point x(d, 0);
    x[0] = t;
    const double v = run.fields.p_c.at(x) / run.ctx.green->eval(x);
    e.ladder.push_back({double(t), v, v, v});
  }
  finish_ladder(e, std::max(run.ctx.K.radius(), 1.0), reference);
  Digest h;
  h.add(static_cast<std::int64_t>(solver_digest("far_field/solver", run)));
  for (int t : ladder) h.add(static_cast<std::int64_t>(t));
  e.digest = h.value();
  return e;
}

CapacityEstimate bcap_far_field_mc(const LatticeSet& K, const OffspringLaw& law, const StepLaw& step,
                                   const std::vector<int>& ladder, const McOptions& opt, double lambda,
                                   double reference) {
  check_ladder(K, ladder, lambda);
  CapacityEstimate e;
  e.method = CapMethod::far_field;
  e.mode = "mc";
  e.mixed = true;
  const int d = step.dim;
  for (int t : ladder) {
    Point x(d, 0);
    x[0] = t;
    const double g = green_fourier(step, x, 1e-10).value;
    HitEstimate hp = hit_probability(TreeKind::critical, K, x, law, step, opt);
    e.ladder.push_back({double(t), hp.p_hat / g, hp.ci_low / g, hp.ci_high / g});
  }
  finish_ladder(e, std::max(K.radius(), 1.0), reference);
  Digest h;
  h.add(static_cast<std::int64_t>(base_digest("far_field/mc", K, law, step)));
  for (int t : ladder) h.add(static_cast<std::int64_t>(t));
  h.add(static_cast<std::int64_t>(opt.samples));
  h.add(static_cast<std::int64_t>(opt.seed));
  h.add(static_cast<std::int64_t>(opt.max_vertices));
  h.add(opt.frontier_safety);
  e.digest = h.value();
  return e;
}

AdjointDiag adjoint_ratio_diag(const SolverRun& run, const std::vector<int>& ladder, double bcap_ref) {
  const auto& law = run.ctx.law;
  if (!std::isfinite(law.third) || law.third <= 0.0) throw ValidationError("offspring law lacks a finite third moment");
  if (ladder.empty()) throw ValidationError("empty ladder");
  const int d = run.ctx.step.dim;
  const int R = run.ctx.box->radius();
  AdjointDiag out;
  out.bcap = bcap_ref > 0.0 ? bcap_ref : run.fields.bcap;
  out.target = 0.5 * law.sigma2;
  const GreenTable G = second_order_table(run.ctx.step, R);
  for (int t : ladder) {
    if (t < 1 || t > R) throw ValidationError("ladder point outside the solver box");
    Point x(d, 0);
    x[0] = t;
    AdjointDiagRow row;
    row.t = t;
    row.adj = run.fields.p_adj.at(x) / (run.ctx.green->eval(x) * out.bcap);
    row.inf = run.fields.p_I.at(x) / (G.at(x) * out.bcap);
    row.minus = run.fields.p_minus.at(x) / (G.at(x) * out.bcap);
    out.rows.push_back(row);
  }
  out.plateau_adj = out.rows.back().adj;
  out.plateau_inf = out.rows.back().inf;
  out.plateau_minus = out.rows.back().minus;
  return out;
}

}  // namespace brcap
