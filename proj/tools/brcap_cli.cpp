#include <CLI11.hpp>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <sstream>

#include "brcap/capacity.hpp"
#include "brcap/io.hpp"
#include "brcap/riesz.hpp"
#include "brcap/scaling.hpp"
#include "brcap/snake.hpp"

using namespace brcap;
namespace fs = std::filesystem;

namespace {

struct Common {
  int d = 5;
  std::string step = "simple";
  std::string offspring = "binary_critical";
  std::vector<double> pmf;
  std::string set = "point:0";
  std::uint64_t seed = 1;
  int threads = 1;
  std::string out = ".";
  std::string cache_dir = ".brcap-cache";
  bool no_cache = false;
};

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> parts;
  std::stringstream ss(s);
  std::string p;
  while (std::getline(ss, p, sep)) parts.push_back(p);
  return parts;
}

double to_double(const std::string& s) {
  try {
    std::size_t pos = 0;
    double v = std::stod(s, &pos);
    if (pos != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw ValidationError("not a number: '" + s + "'");
  }
}

int to_int(const std::string& s) {
  const double v = to_double(s);
  if (v != std::floor(v)) throw ValidationError("not an integer: '" + s + "'");
  return static_cast<int>(v);
}

Point parse_point(const std::string& s, int d) {
  auto parts = split(s, ',');
  if (parts.size() == 1 && to_int(parts[0]) == 0) return Point(d, 0);
  if (static_cast<int>(parts.size()) != d) throw ValidationError("point '" + s + "' needs " + std::to_string(d) + " coordinates");
  Point p;
  for (const auto& c : parts) p.push_back(to_int(c));
  return p;
}

std::string point_str(const Point& p) {
  std::string s;
  for (std::size_t i = 0; i < p.size(); ++i) s += (i ? " " : "") + std::to_string(p[i]);
  return s;
}

// point:<x>, points:<x>;<y>;..., ball:<r>, open_ball:<r>
LatticeSet parse_set(const std::string& spec, int d) {
  const auto colon = spec.find(':');
  if (colon == std::string::npos) throw ValidationError("set spec '" + spec + "' needs kind:args");
  const std::string kind = spec.substr(0, colon), arg = spec.substr(colon + 1);
  if (kind == "point") return LatticeSet(d, {parse_point(arg, d)});
  if (kind == "points") {
    std::vector<Point> pts;
    for (const auto& p : split(arg, ';')) pts.push_back(parse_point(p, d));
    return LatticeSet(d, pts);
  }
  if (kind == "ball" || kind == "open_ball") {
    const double r = to_double(arg);
    if (!(r >= 0.0)) throw ValidationError("ball radius must be nonnegative");
    return LatticeSet::ball(d, r, kind == "ball");
  }
  throw ValidationError("unknown set kind: " + kind);
}

StepLaw parse_step(const std::string& spec, int d) {
  if (spec.rfind("custom:", 0) != 0) return make_step_law(spec, d);
  // custom:<z>=<p>;<z>=<p>;...
  std::vector<std::pair<Point, double>> atoms;
  for (const auto& a : split(spec.substr(7), ';')) {
    const auto eq = a.find('=');
    if (eq == std::string::npos) throw ValidationError("custom step atom '" + a + "' needs z=p");
    atoms.push_back({parse_point(a.substr(0, eq), d), to_double(a.substr(eq + 1))});
  }
  return make_custom_step_law(d, atoms);
}

std::vector<int> parse_ints(const std::string& s) {
  std::vector<int> v;
  for (const auto& p : split(s, ',')) v.push_back(to_int(p));
  if (v.empty()) throw ValidationError("empty integer list");
  return v;
}

class Run {
 public:
  Run(const Common& c, std::string name) : c_(c), name_(std::move(name)) {}

  std::string path(const std::string& ext) const { return (fs::path(c_.out) / (name_ + ext)).string(); }

  void csv(const CsvTable& t, const std::string& suffix = "") {
    const std::string p = path(suffix + ".csv");
    write_text(p, t.str());
    files_.push_back(p);
  }

  void finish(const json& summary, const json& config) {
    const std::string p = path(".json");
    json doc;
    doc["schema"] = kJsonSchema;
    doc["subcommand"] = name_;
    doc["result"] = summary;
    write_json(p, doc);
    files_.push_back(p);
    write_json(path(".manifest.json"), make_manifest(name_, config, files_));
    std::cout << dump_json(doc);
  }

 private:
  const Common& c_;
  std::string name_;
  std::vector<std::string> files_;
};

json estimate_json(const CapacityEstimate& e) {
  json j;
  j["method"] = to_string(e.method);
  j["mode"] = e.mode;
  j["value"] = e.value;
  j["half_width"] = e.half_width;
  j["lower"] = e.lower;
  j["upper"] = e.upper;
  j["mixed"] = e.mixed;
  j["digest"] = hex64(e.digest);
  if (!e.ladder.empty()) {
    json l = json::array();
    for (const auto& p : e.ladder) l.push_back({{"dist", p.dist}, {"ratio", p.ratio}, {"lower", p.lower}, {"upper", p.upper}});
    j["ladder"] = l;
  }
  if (!std::isnan(e.slope)) j["slope"] = e.slope;
  return j;
}

json hit_json(const HitEstimate& h) {
  return {{"quantity", h.quantity}, {"p_hat", h.p_hat},     {"lower", h.lower},     {"upper", h.upper},
          {"ci_low", h.ci_low},     {"ci_high", h.ci_high}, {"ci_half", h.ci_half}, {"samples", h.samples},
          {"hits", h.hits},         {"capped", h.capped},   {"r_stop", h.r_stop}};
}

// Every option that can change the output, with its resolved value.
json resolved_config(const CLI::App& app, const CLI::App& sub) {
  static const std::vector<std::string> skip = {"--help", "--config", "--threads", "--out", "--cache-dir", "--no-cache"};
  json cfg;
  auto collect = [&](const CLI::App& a, json& into) {
    for (const CLI::Option* o : a.get_options()) {
      const std::string name = o->get_name();
      if (std::find(skip.begin(), skip.end(), name) != skip.end() || name.rfind("--", 0) != 0) continue;
      std::string v;
      if (o->count() > 0) {
        for (const auto& r : o->results()) v += (v.empty() ? "" : ",") + r;
        if (o->get_type_size() == 0) v = "true";
      } else {
        v = o->get_default_str();
        if (o->get_type_size() == 0 && v.empty()) v = "false";
      }
      into[name.substr(2)] = v;
    }
  };
  collect(app, cfg["common"]);
  collect(sub, cfg[sub.get_name()]);
  return cfg;
}

int fail(const char* kind, int code, const std::string& msg) {
  json e{{"error", kind}, {"exit_code", code}, {"message", msg}};
  std::cerr << e.dump() << "\n";
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Branching capacity numerics"};
  app.option_defaults()->always_capture_default();
  app.config_formatter(std::make_shared<CLI::ConfigINI>());
  app.set_config("--config", "", "key = value config file with [subcommand] sections");
  app.require_subcommand(1);
  app.fallthrough();

  Common c;
  app.add_option("--d", c.d, "dimension");
  app.add_option("--step", c.step, "simple, lazy_simple or custom:<z>=<p>;...");
  app.add_option("--offspring", c.offspring, "binary_critical, geometric_half, poisson_trunc or custom");
  app.add_option("--pmf", c.pmf, "atoms mu(0), mu(1), ... for --offspring custom")->delimiter(',');
  app.add_option("--set", c.set, "point:<x>, points:<x>;<y>, ball:<r> or open_ball:<r>");
  app.add_option("--seed", c.seed);
  app.add_option("--threads", c.threads, "worker threads (results do not depend on it)");
  app.add_option("--out", c.out, "output directory");
  app.add_option("--cache-dir", c.cache_dir);
  app.add_flag("--no-cache", c.no_cache, "recompute cached tables");

  // green
  auto* green = app.add_subcommand("green", "Green function along a ray");
  int g_len = 30;
  std::string g_method = "fourier", g_dir = "1";
  green->add_option("--length", g_len, "ray length in steps of the direction");
  green->add_option("--method", g_method, "fourier or neumann");
  green->add_option("--direction", g_dir, "integer direction, 1 for e_1");

  // tree-size-law
  auto* tsl = app.add_subcommand("tree-size-law", "Empirical total-progeny law");
  int t_min = 1, t_max = 500;
  double t_samples = 1e6;
  tsl->add_option("--n-min", t_min);
  tsl->add_option("--n-max", t_max);
  tsl->add_option("--samples", t_samples);

  // hit-mc, escape-mc
  McOptions mc;
  std::string x_spec = "4";
  std::string hit_kind = "critical";
  double mc_samples = 10000;
  auto add_mc = [&](CLI::App* s) {
    s->add_option("--x", x_spec, "start point, comma separated, or an integer t for t e_1");
    s->add_option("--samples", mc_samples);
    s->add_option("--vmax", mc.max_vertices, "vertex budget per tree");
    s->add_option("--r-stop", mc.r_stop, "spine truncation radius");
    s->add_option("--remainder-safety", mc.remainder_safety);
  };
  auto* hit = app.add_subcommand("hit-mc", "Monte Carlo hitting probability");
  add_mc(hit);
  hit->add_option("--kind", hit_kind, "critical, adjoint or infinite");
  auto* esc = app.add_subcommand("escape-mc", "Monte Carlo escape probability");
  add_mc(esc);

  // solve, bcap
  int radius = 24, check_radius = 0;
  SolverOptions so;
  std::string closure = "matched";
  double b_radius = -1.0;
  bool identities = false;
  auto add_solver = [&](CLI::App* s) {
    s->add_option("--radius", radius, "solver box radius");
    s->add_option("--closure", closure, "matched or dirichlet_zero");
    s->add_option("--tol", so.tol);
    s->add_option("--check-radius", check_radius, "second box for the closure error, 0 for none");
  };
  auto* solve = app.add_subcommand("solve", "Solve p_c, p_adj, p_I and p_- on a box");
  add_solver(solve);
  solve->add_flag("--identities", identities, "report the killed-walk identities");
  solve->add_option("--b-radius", b_radius, "ball B for the harmonic-measure identities, default r_K + 3");

  auto* bcap = app.add_subcommand("bcap", "Branching capacity");
  add_solver(bcap);
  std::string b_method = "all", b_ladder = "4,8,12,16", sum_mode = "solver";
  bcap->add_option("--method", b_method, "sum, far, harmonic or all");
  bcap->add_option("--ladder", b_ladder, "far-field distances");
  bcap->add_option("--sum-mode", sum_mode, "solver or mc");
  bcap->add_option("--b-radius", b_radius);
  add_mc(bcap);

  // snake
  int s_d_terms = 4000;
  double s_a0 = 0.0, s_tmin = 1.1, s_tmax = 10.0, s_eps = 1e-3;
  int s_points = 100;
  auto add_grid = [&](CLI::App* s) {
    s->add_option("--t-min", s_tmin);
    s->add_option("--t-max", s_tmax);
    s->add_option("--points", s_points);
  };
  auto* sser = app.add_subcommand("snake-series", "Series solution of the radial snake equation");
  sser->add_option("--a0", s_a0, "boundary constant, 0 to compute it");
  sser->add_option("--terms", s_d_terms);
  add_grid(sser);
  auto* sshoot = app.add_subcommand("snake-shoot", "Shooting solution of the radial snake equation");
  add_grid(sshoot);
  auto* sa0 = app.add_subcommand("snake-a0", "Snake capacity of the unit ball");
  sa0->add_option("--eps", s_eps);
  sa0->add_option("--terms", s_d_terms);

  // riesz
  auto* riesz = app.add_subcommand("riesz", "Riesz capacity of a discretized compact");
  double r_gamma = 1.0, r_h = 0.3;
  std::string r_set = "ball:1";
  RieszOptions ro;
  riesz->add_option("--gamma", r_gamma);
  riesz->add_option("--shape", r_set, "ball:<r> or sphere:<r>");
  riesz->add_option("--mesh", r_h, "mesh size; for spheres the number of cells per face edge is 2r/h");
  riesz->add_option("--kkt-tol", ro.tol);

  // scaling
  auto* scal = app.add_subcommand("scaling", "Rescaled branching capacity of dilated balls");
  ScalingOptions sc;
  double sc_rho = 1.0;
  std::string sc_ladder = "2,4,8", sc_method = "solver";
  scal->add_option("--rho", sc_rho);
  scal->add_option("--ladder", sc_ladder);
  scal->add_option("--method", sc_method, "solver or mc");
  scal->add_option("--box-factor", sc.box_factor);
  scal->add_option("--a0", sc.a0, "snake constant, 0 to compute it");
  scal->add_option("--envelope", sc.envelope, "C in Bcap(B(0,r)) <= C r^{d-4}, 0 for the default");
  add_mc(scal);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    return fail("validation_error", 1, e.what());
  }

  try {
    CLI::App* sub = app.get_subcommands().front();
    const std::string name = sub->get_name();
    const json config = resolved_config(app, *sub);
    if (c.threads < 1) throw ValidationError("threads must be positive");
    set_thread_count(c.threads);
    mc.seed = c.seed;
    mc.samples = static_cast<std::uint64_t>(mc_samples);
    so.closure = parse_closure(closure);
    TableCache cache(c.cache_dir, !c.no_cache);
    Run run(c, name);
    json res;

    const bool needs_laws = name != "snake-series" && name != "snake-shoot" && name != "snake-a0" && name != "riesz";
    StepLaw step;
    OffspringLaw law;
    LatticeSet K;
    if (needs_laws) {
      step = parse_step(c.step, c.d);
      law = make_offspring_law(c.offspring, c.pmf);
      K = parse_set(c.set, c.d);
    }
    auto start_point = [&]() {
      auto parts = split(x_spec, ',');
      if (parts.size() == 1) {
        Point x(c.d, 0);
        x[0] = to_int(parts[0]);
        return x;
      }
      return parse_point(x_spec, c.d);
    };

    if (name == "green") {
      const Point dir = g_dir == "1" ? [&] { Point e(c.d, 0); e[0] = 1; return e; }() : parse_point(g_dir, c.d);
      if (g_len < 1) throw ValidationError("length must be positive");
      const int R = g_len * static_cast<int>(sup_norm(dir));
      auto g = cache.green(step, R, parse_green_method(g_method));
      CsvTable t({"k", "x", "g", "asymptotic", "ratio"});
      const double cg = green_constant(step);
      for (int k = 1; k <= g_len; ++k) {
        Point x(dir);
        for (auto& v : x) v *= k;
        const double a = cg * std::pow(theta_norm(step, x), 2.0 - c.d);
        const double gv = g->at(x);
        t.row({std::to_string(k), point_str(x), fmt_num(gv), fmt_num(a), fmt_num(gv / a)});
      }
      run.csv(t);
      res = {{"g0", g->at(Point(c.d, 0))},
             {"c_g", cg},
             {"harmonic_residual", harmonic_residual(*g)},
             {"table_radius", R},
             {"method", to_string(g->method)},
             {"digest", hex64(g->digest())}};
    } else if (name == "tree-size-law") {
      const auto L = tree_size_law(law, t_min, t_max, static_cast<std::uint64_t>(t_samples), c.seed);
      CsvTable t({"n", "count", "pmf", "normalized"});
      for (int n = L.n_min; n <= L.n_max; ++n) {
        const auto k = L.count[n - L.n_min];
        t.row({std::to_string(n), std::to_string(k), fmt_num(double(k) / double(L.samples)), fmt_num(L.normalized(n))});
      }
      run.csv(t);
      json bins = json::array();
      for (int a = std::max(L.n_min, 50); a < std::min(L.n_max, 500); a *= 2) {
        const int b = std::min({2 * a, L.n_max, 500});
        bins.push_back({{"from", a}, {"to", b}, {"normalized", L.normalized_bin(a, b)}});
      }
      res = {{"samples", L.samples}, {"capped", L.capped}, {"span", L.span}, {"sigma", L.sigma}, {"bins", bins}};
    } else if (name == "hit-mc" || name == "escape-mc") {
      const Point x = start_point();
      HitEstimate h;
      if (name == "escape-mc") h = escape_probability(K, x, law, step, mc);
      else if (hit_kind == "critical") h = hit_probability(TreeKind::critical, K, x, law, step, mc);
      else if (hit_kind == "adjoint") h = hit_probability(TreeKind::adjoint, K, x, law, step, mc);
      else if (hit_kind == "infinite") h = p_infinite(K, x, law, step, mc);
      else throw ValidationError("unknown kind: " + hit_kind);
      CsvTable t({"quantity", "x", "p_hat", "ci_low", "ci_high", "lower", "upper", "samples", "capped"});
      t.row({h.quantity, point_str(x), fmt_num(h.p_hat), fmt_num(h.ci_low), fmt_num(h.ci_high), fmt_num(h.lower),
             fmt_num(h.upper), std::to_string(h.samples), std::to_string(h.capped)});
      run.csv(t);
      res = hit_json(h);
      res["x"] = point_str(x);
    } else if (name == "solve" || name == "bcap") {
      auto g = cache.green(step, radius + step.max_jump, GreenMethod::fourier);
      SolverRun sr = run_solver(step, law, K, radius, so, check_radius, g);
      const double rk = K.radius();
      const double brad = b_radius >= 0 ? b_radius : std::floor(rk) + 3.0;
      res["bcap"] = sr.fields.bcap;
      res["box_radius"] = radius;
      res["sites"] = sr.ctx.box->size();
      res["newton_iterations"] = sr.fields.p_c.iterations;
      res["closure"] = to_string(so.closure);
      res["closure_coeff_p_c"] = sr.fields.p_c.closure_coeff;
      res["closure_coeff_p_I"] = sr.fields.p_I.closure_coeff;
      if (name == "solve") {
        std::vector<std::string> head;
        for (int i = 0; i < c.d; ++i) head.push_back("x" + std::to_string(i + 1));
        for (const char* h : {"weight", "p_c", "p_adj", "p_I", "p_minus"}) head.push_back(h);
        CsvTable t(head);
        const Box& b = *sr.ctx.box;
        for (auto i : b.interior_sites()) {
          std::vector<std::string> row;
          for (int k = 0; k < c.d; ++k) row.push_back(std::to_string(b.rep(i)[k]));
          for (double v : {b.weight(i), sr.fields.p_c.value[i], sr.fields.p_adj.value[i], sr.fields.p_I.value[i],
                           sr.fields.p_minus.value[i]})
            row.push_back(fmt_num(v));
          t.row(row);
        }
        run.csv(t, ".fields");
        if (identities) {
          const LatticeSet B = LatticeSet::ball(c.d, brad, true);
          Point in1(c.d, 0), in2(c.d, 0), out1(c.d, 0);
          in1[0] = static_cast<int>(std::floor(rk)) + 1;
          in2[1] = static_cast<int>(std::floor(rk)) + 2;
          out1[0] = static_cast<int>(brad) + 3;
          out1[1] = 2;
          const auto rep = check_identities(sr.ctx, sr.fields, B, {in1, in2}, {out1}, so);
          res["identities"] = {{"pkx_column", rep.pkx_column},   {"pkx_row", rep.pkx_row},
                               {"q_gr1_row", rep.q_gr1_row},     {"exit1", rep.exit1},
                               {"exit2", rep.exit2},             {"bcap_sum", rep.bcap_sum},
                               {"bcap_harmonic", rep.bcap_harmonic}, {"bcap_rel_gap", rep.bcap_ek},
                               {"hbk_margin", rep.hbk_margin},   {"green_excess", rep.green_excess}};
        }
      } else {
        const bool all = b_method == "all";
        if (!all && b_method != "sum" && b_method != "far" && b_method != "harmonic")
          throw ValidationError("unknown method: " + b_method);
        json est = json::array();
        if (all || b_method == "sum")
          est.push_back(estimate_json(sum_mode == "mc" ? bcap_sum_escape_mc(K, law, step, mc) : bcap_sum_escape_solver(sr)));
        if (all || b_method == "far") est.push_back(estimate_json(bcap_far_field_solver(sr, parse_ints(b_ladder))));
        if (all || b_method == "harmonic")
          est.push_back(estimate_json(bcap_harmonic(sr, LatticeSet::ball(c.d, brad, true), so)));
        res["estimates"] = est;
      }
    } else if (name == "snake-series" || name == "snake-shoot") {
      RadialSolution s;
      if (name == "snake-series") {
        const double a0 = s_a0 > 0 ? s_a0 : find_a0(c.d).a0;
        s = series_solution(c.d, a0, s_d_terms);
        res["radius_s"] = s.series.radius;
        json head = json::array();
        for (std::size_t n = 0; n < std::min<std::size_t>(s.series.a.size(), 20); ++n) head.push_back(double(s.series.a[n]));
        res["coefficients"] = head;
      } else {
        s = shoot_radial(c.d);
        const auto ic = integral_identity_check(s);
        res["tau_blowup"] = s.tau_blowup;
        res["shots"] = s.shots;
        res["integral_identity"] = {{"rhs", ic.rhs}, {"residual", ic.residual}, {"tail", ic.tail}, {"tail_bound", ic.tail_bound}};
        res["ode_residual"] = ode_residual(s, 1.05);
      }
      res["d"] = c.d;
      res["a0"] = s.a0;
      res["method"] = s.method;
      if (s_points < 2 || !(s_tmin > 1.0) || !(s_tmax > s_tmin)) throw ValidationError("bad t grid");
      CsvTable t({"t", "u"});
      for (int i = 0; i < s_points; ++i) {
        const double tt = s_tmin * std::pow(s_tmax / s_tmin, double(i) / (s_points - 1));
        t.row(std::vector<double>{tt, s.u(tt)});
      }
      run.csv(t);
      res["u(2)"] = s.u(2.0);
      res["u(3)"] = s.u(3.0);
    } else if (name == "snake-a0") {
      const auto r = find_a0(c.d, s_eps, s_d_terms);
      res = {{"d", r.d},     {"a0", r.a0},   {"lo", r.lo},
             {"hi", r.hi},   {"eps", r.eps}, {"terms", r.N},
             {"conclusive", r.conclusive}, {"converges_at_probe", r.converges_at_probe}, {"bisections", r.bisections}};
    } else if (name == "riesz") {
      const auto colon = r_set.find(':');
      if (colon == std::string::npos) throw ValidationError("shape needs kind:radius");
      const std::string kind = r_set.substr(0, colon);
      const double r = to_double(r_set.substr(colon + 1));
      DiscretizedCompact s;
      if (kind == "ball") s = mesh_ball(c.d, r, r_h);
      else if (kind == "sphere") s = mesh_sphere(c.d, r, std::max(1, static_cast<int>(std::lround(2.0 * r / r_h))));
      else throw ValidationError("unknown shape: " + kind);
      const auto e = riesz_capacity(s, r_gamma, ro);
      res = {{"shape", r_set},          {"gamma", e.gamma},           {"points", s.size()},
             {"h", s.h},                {"capacity", e.capacity},     {"energy", e.energy},
             {"kernel_constant", e.kernel_constant}, {"kkt", e.kkt}, {"iterations", e.iterations}};
    } else if (name == "scaling") {
      if (sc_method == "solver") sc.method = ScalingMethod::solver;
      else if (sc_method == "mc") sc.method = ScalingMethod::mc;
      else throw ValidationError("unknown method: " + sc_method);
      sc.solver = so;
      sc.mc = mc;
      const auto S = run_scaling(sc_rho, parse_ints(sc_ladder), law, step, sc);
      CsvTable t({"n", "estimate", "uncertainty", "rescaled", "ratio_to_target", "cauchy_diff"});
      json rows = json::array();
      for (const auto& r : S.rows) {
        t.row({std::to_string(r.n), fmt_num(r.estimate), fmt_num(r.uncertainty), fmt_num(r.rescaled),
               fmt_num(r.ratio_to_target), fmt_num(r.cauchy_diff)});
        rows.push_back({{"n", r.n}, {"box_radius", r.box_radius}, {"points", r.points}, {"on_sphere", r.on_sphere},
                        {"estimate", r.estimate}, {"uncertainty", r.uncertainty}, {"rescaled", r.rescaled},
                        {"ratio_to_target", r.ratio_to_target}, {"cauchy_diff", r.cauchy_diff}, {"method", r.method}});
      }
      run.csv(t);
      res = {{"d", S.d},
             {"rho", S.rho},
             {"a0", S.a0},
             {"c_theta", S.ctheta.value},
             {"target", S.target},
             {"envelope", S.envelope},
             {"rows", rows},
             {"skipped", S.skipped},
             {"positive", S.positive},
             {"bounded", S.bounded},
             {"cauchy_decreasing", S.cauchy_decreasing},
             {"gap_nonincreasing", S.gap_nonincreasing}};
    }
    run.finish(res, config);
  } catch (const ValidationError& e) {
    return fail("validation_error", 1, e.what());
  } catch (const ConvergenceError& e) {
    return fail("convergence_error", 2, e.what());
  } catch (const BudgetError& e) {
    return fail("budget_error", 3, e.what());
  } catch (const std::exception& e) {
    return fail("validation_error", 1, e.what());
  }
  return 0;
}
