// Acceptance checks 1-12. Prints one PASS/FAIL line per criterion and exits
// nonzero if any fails. Optional arguments select criteria by number.
#include <sys/wait.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <map>
#include <set>
#include <sstream>
#include <string>

#include "brcap/io.hpp"
#include "brcap/riesz.hpp"
#include "brcap/scaling.hpp"
#include "brcap/snake.hpp"

using namespace brcap;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string num(double v) { return fmt_num(v); }

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("brcap-acceptance-" + std::to_string(::getpid())) / name;
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

int cli(const std::string& args, const fs::path& stdout_file) {
  const std::string cmd = std::string(BRCAP_CLI_PATH) + " " + args + " > " + stdout_file.string() + " 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

Point axis(int d, int k, int i = 0) {
  Point x(d, 0);
  x[i] = k;
  return x;
}

const StepLaw& simple5() {
  static const StepLaw s = make_step_law("simple", 5);
  return s;
}

// Solver runs shared between criteria.
const SolverRun& solved(const std::string& law, double rho, int R) {
  static std::map<std::tuple<std::string, double, int>, SolverRun> cache;
  auto key = std::make_tuple(law, rho, R);
  auto it = cache.find(key);
  if (it != cache.end()) return it->second;
  SolverRun r = run_solver(simple5(), make_offspring_law(law), LatticeSet::ball(5, rho, true), R);
  return cache.emplace(key, std::move(r)).first->second;
}

Outcome snake_capacity_d6() {
  const fs::path dir = scratch("c1");
  const std::string common = " --out " + (dir / "out").string() + " --cache-dir " + (dir / "cache").string();
  if (cli("snake-a0 --d 6" + common, dir / "a0.txt") != 0) return {false, "snake-a0 failed"};
  if (cli("snake-shoot --d 6" + common, dir / "shoot.txt") != 0) return {false, "snake-shoot failed"};
  const json a = json::parse(read_text((dir / "out" / "snake-a0.json").string()))["result"];
  const json s = json::parse(read_text((dir / "out" / "snake-shoot.json").string()))["result"];
  const double a0 = a["a0"].get<double>(), u2 = s["u(2)"].get<double>(), u3 = s["u(3)"].get<double>();
  const bool ok = std::abs(a0 - 6.0) <= 1e-4 && std::abs(u2 - 2.0 / 3.0) <= 1e-6 && std::abs(u3 - 0.09375) <= 1e-6;
  return {ok, "a0=" + num(a0) + " u(2)=" + num(u2) + " u(3)=" + num(u3)};
}

Outcome series_recursion() {
  const SeriesResult s = series_coefficients(6, 6.0, 50);
  double worst = 0.0;
  for (int n = 0; n <= 50; ++n) worst = std::max(worst, std::abs(double(s.a[n]) / (6.0 * (n + 1)) - 1.0));
  const double u2 = series_u(series_coefficients(6, 6.0, 400), 2.0);
  const bool ok = worst < 1e-10 && std::abs(u2 - 2.0 / 3.0) < 1e-10;
  return {ok, "max relative error " + num(worst) + ", series u(2)=" + num(u2)};
}

Outcome integral_identity() {
  const IntegralCheck c6 = integral_identity_check(closed_form_d6());
  const IntegralCheck c5 = integral_identity_check(shoot_radial(5));
  return {c6.residual < 1e-4 && c5.residual < 1e-3, "d6 residual " + num(c6.residual) + ", d5 residual " + num(c5.residual)};
}

Outcome discrete_identities() {
  std::ostringstream os;
  bool ok = true;
  for (double rho : {0.0, 2.0}) {
    const SolverRun& r = solved("binary_critical", rho, 24);
    const int k = static_cast<int>(rho);
    const LatticeSet B = LatticeSet::ball(5, rho + 3, true);
    const IdentityReport rep =
        check_identities(r.ctx, r.fields, B, {axis(5, k + 1), axis(5, k + 2, 1)}, {Point{k + 6, 2, 0, 0, 0}, axis(5, k + 10)});
    const double worst = std::max({rep.pkx_column, rep.pkx_row, rep.q_gr1_row, rep.exit1, rep.exit2, rep.bcap_ek});
    ok = ok && worst < 1e-8 && rep.green_excess <= 0.0 && rep.hbk_margin >= 0.0;
    const RatioCurve c = green_ratio_curve(r.ctx, r.fields, std::max(rho, 1.0), {1, 2}, {k + 4, k + 8});
    for (double v : c.deficit_box) ok = ok && v >= 0.0;
    os << "K=B(0," << rho << "): max residual " << num(worst) << ", G_K-g max " << num(rep.green_excess) << "; ";
  }
  return {ok, os.str()};
}

Outcome lemma_inequalities() {
  std::ostringstream os;
  bool ok = true;
  for (const char* name : {"binary_critical", "geometric_half"}) {
    for (double rho : {0.0, 2.0}) {
      const SolverRun& r = solved(name, rho, 24);
      const auto& f = r.fields;
      const double m0 = r.ctx.law.mu0(), s2 = r.ctx.law.sigma2, eps = 1e-13;
      std::size_t bad = 0, sites = 0;
      for (auto i : r.ctx.box->interior_sites()) {
        if (r.ctx.in_K[i]) {
          bad += f.p_c.value[i] != 1.0 || f.p_adj.value[i] != 1.0 || f.p_I.value[i] != 1.0;
          continue;
        }
        const double pc = f.p_c.value[i], pa = f.p_adj.value[i], pI = f.p_I.value[i], pm = f.p_minus.value[i];
        bad += 2.0 * (1.0 - m0) / s2 * pa > pc * (1 + eps);
        bad += pc > pa / m0 * (1 + eps);
        bad += pc > pI * (1 + eps);
        bad += pa > s2 / 2.0 * pm * (1 + eps);
        bad += pm > pI * (1 + eps);
        bad += pI > (s2 / 2.0 + 1.0) * pm * (1 + eps);
        ++sites;
      }
      ok = ok && bad == 0;
      os << name << " K=B(0," << rho << "): " << bad << " violations over " << sites << " sites; ";
    }
  }
  return {ok, os.str()};
}

Outcome tree_sizes() {
  const std::uint64_t samples = 10000000;
  const TreeSizeLaw L = tree_size_law(make_offspring_law("geometric_half"), 50, 500, samples, 2024);
  const double norm = std::sqrt(2.0) * std::sqrt(2.0 * M_PI);
  double lo_exact = 1e9, hi_exact = 0.0, lo_bin = 1e9, hi_bin = 0.0, zmax = 0.0;
  for (int n = 50; n <= 500; ++n) {
    const double p = geometric_tree_size_pmf(n);
    const double e = p * std::pow(n, 1.5) * norm;
    lo_exact = std::min(lo_exact, e);
    hi_exact = std::max(hi_exact, e);
    zmax = std::max(zmax, std::abs(double(L.count[n - 50]) - samples * p) / std::sqrt(samples * p * (1 - p)));
  }
  for (auto [a, b] : {std::pair{50, 100}, {100, 200}, {200, 300}, {300, 400}, {400, 500}}) {
    const double r = L.normalized_bin(a, b);
    lo_bin = std::min(lo_bin, r);
    hi_bin = std::max(hi_bin, r);
  }
  const bool ok = lo_exact >= 0.9 && hi_exact <= 1.1 && lo_bin >= 0.9 && hi_bin <= 1.1 && zmax < 5.0;
  return {ok, "exact [" + num(lo_exact) + ", " + num(hi_exact) + "], binned empirical [" + num(lo_bin) + ", " +
                  num(hi_bin) + "], max per-size |z| " + num(zmax)};
}

Outcome cross_method() {
  const SolverRun& r = solved("binary_critical", 0.0, 24);
  const CapacityEstimate far = bcap_far_field_solver(r, {4, 8, 12, 16});
  const CapacityEstimate harm = bcap_harmonic(r, LatticeSet::ball(5, 3.0, true));
  McOptions o;
  o.samples = 4000;
  o.seed = 7;
  o.max_vertices = 1000000;
  o.remainder_safety = 2.0;
  o.r_stop = 64.0;
  const CapacityEstimate mc = bcap_sum_escape_mc(r.ctx.K, r.ctx.law, r.ctx.step, o);
  const double ref = harm.value;
  const double g1 = std::abs(mc.value / ref - 1.0), g2 = std::abs(far.value / ref - 1.0);
  return {g1 < 0.05 && g2 < 0.05, "sum_escape mc " + num(mc.value) + " [" + num(mc.lower) + ", " + num(mc.upper) +
                                      "], far_field " + num(far.value) + ", harmonic " + num(harm.value)};
}

Outcome plateau() {
  std::ostringstream os;
  bool ok = true;
  for (const char* name : {"binary_critical", "geometric_half"}) {
    const SolverRun& r = solved(name, 1.0, 24);
    const AdjointDiag a = adjoint_ratio_diag(r, {4, 8, 12, 16, 20});
    const double gap = std::abs(a.plateau_adj / a.target - 1.0);
    ok = ok && gap < 0.15;
    os << name << ": plateau " << num(a.plateau_adj) << " vs " << num(a.target) << " (p_I " << num(a.plateau_inf)
       << ", p_- " << num(a.plateau_minus) << "); ";
  }
  return {ok, os.str()};
}

Outcome riesz_scaling() {
  std::ostringstream os;
  bool ok = true;
  for (double g : {1.0, 3.0}) {
    const EquilibriumResult a = riesz_capacity(mesh_ball(5, 1.0, 0.3), g);
    const EquilibriumResult b = riesz_capacity(mesh_ball(5, 2.0, 0.6), g);
    const double ratio = b.capacity / a.capacity / std::pow(2.0, g);
    ok = ok && a.converged && b.converged && std::abs(ratio - 1.0) < 0.02;
    os << "gamma=" << g << ": ratio/2^gamma " << num(ratio) << "; ";
  }
  return {ok, os.str()};
}

Outcome scaling_limit() {
  const ScalingRun s = run_scaling(1.0, {2, 4, 8}, make_offspring_law("binary_critical"), simple5());
  std::ostringstream os;
  for (const auto& row : s.rows) os << "n=" << row.n << " rescaled " << num(row.rescaled) << "; ";
  const double last = s.rows.empty() ? 0.0 : s.rows.back().ratio_to_target;
  os << "target " << num(s.target) << ", envelope " << num(s.envelope) << ", final ratio " << num(last);
  const bool ok = s.rows.size() == 3 && s.positive && s.bounded && s.cauchy_decreasing && last >= 0.3 && last <= 3.0;
  return {ok, os.str()};
}

Outcome green_trend() {
  const SolverRun& r = solved("binary_critical", 1.0, 24);
  const RatioCurve c = green_ratio_curve(r.ctx, r.fields, 1.0, {4, 8, 16}, {16, 20});
  bool ok = c.deficit_box.size() == 3;
  std::ostringstream os;
  for (std::size_t k = 0; k < c.deficit_box.size(); ++k) {
    ok = ok && c.deficit_box[k] >= 0.0 && (k == 0 || c.deficit_box[k] <= c.deficit_box[k - 1]);
    os << "s=" << c.s[k] << ": " << num(c.deficit_box[k]) << "; ";
  }
  return {ok, os.str()};
}

Outcome reproducibility() {
  const fs::path dir = scratch("c12");
  ::setenv("SOURCE_DATE_EPOCH", "0", 1);
  const std::vector<std::string> fixtures = {
      "escape-mc --d 5 --x 2 --samples 2000 --vmax 20000 --seed 3",
      "hit-mc --d 5 --x 3 --samples 20000 --seed 4 --offspring geometric_half",
      "tree-size-law --n-min 1 --n-max 40 --samples 200000 --seed 5",
      "bcap --d 5 --radius 8 --method sum --sum-mode mc --samples 500 --vmax 5000 --seed 6",
  };
  std::size_t files = 0;
  for (std::size_t f = 0; f < fixtures.size(); ++f) {
    std::map<std::string, std::string> ref;
    for (int t : {1, 4, 8}) {
      const fs::path out = dir / ("f" + std::to_string(f) + "-t" + std::to_string(t));
      const std::string args = fixtures[f] + " --threads " + std::to_string(t) + " --out " + out.string() +
                               " --cache-dir " + (dir / "cache").string();
      if (cli(args, dir / "log.txt") != 0) return {false, "fixture failed: " + fixtures[f]};
      std::map<std::string, std::string> got;
      for (const auto& e : fs::directory_iterator(out)) got[e.path().filename().string()] = read_text(e.path().string());
      if (t == 1) {
        ref = got;
        files += got.size();
      } else if (got != ref) {
        return {false, "artifacts differ at " + std::to_string(t) + " threads: " + fixtures[f]};
      }
    }
  }
  return {true, std::to_string(files) + " artifacts byte-identical at 1, 4 and 8 threads"};
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::function<Outcome()>> checks = {
      snake_capacity_d6, series_recursion, integral_identity, discrete_identities, lemma_inequalities, tree_sizes,
      cross_method,      plateau,          riesz_scaling,     scaling_limit,       green_trend,        reproducibility};
  std::set<int> only;
  for (int i = 1; i < argc; ++i) only.insert(std::atoi(argv[i]));
  int failures = 0;
  for (std::size_t k = 0; k < checks.size(); ++k) {
    const int id = static_cast<int>(k) + 1;
    if (!only.empty() && !only.count(id)) continue;
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = checks[k]();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    failures += !o.pass;
    std::printf("criterion %2d: %s  %s (%.1f s)\n", id, o.pass ? "PASS" : "FAIL", o.detail.c_str(), secs);
    std::fflush(stdout);
  }
  fs::remove_all(fs::temp_directory_path() / ("brcap-acceptance-" + std::to_string(::getpid())));
  return failures == 0 ? 0 : 1;
}
