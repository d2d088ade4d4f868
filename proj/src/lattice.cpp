#include "brcap/lattice.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

namespace brcap {

IntLattice::IntLattice(int dim, const std::vector<Point>& gens) : dim_(dim) {
  std::vector<std::vector<long long>> m;
  for (const auto& g : gens) m.emplace_back(g.begin(), g.end());
  std::size_t r = 0;
  for (int c = 0; c < dim && r < m.size(); ++c) {
    // Euclid on column c among rows r..end.
    for (;;) {
      std::size_t piv = m.size();
      for (std::size_t i = r; i < m.size(); ++i)
        if (m[i][c] != 0 && (piv == m.size() || std::llabs(m[i][c]) < std::llabs(m[piv][c])))
          piv = i;
      if (piv == m.size()) break;
      std::swap(m[r], m[piv]);
      bool done = true;
      for (std::size_t i = r + 1; i < m.size(); ++i) {
        long long q = m[i][c] / m[r][c];
        if (q != 0)
          for (int k = 0; k < dim; ++k) m[i][k] -= q * m[r][k];
        if (m[i][c] != 0) done = false;
      }
      if (done) {
        if (m[r][c] < 0)
          for (int k = 0; k < dim; ++k) m[r][k] = -m[r][k];
        rows_.push_back(m[r]);
        ++r;
        break;
      }
    }
    if (rows_.size() < static_cast<std::size_t>(c + 1)) {
      rows_.push_back(std::vector<long long>(dim, 0));  // zero pivot marks a missing column
    }
  }
  while (static_cast<int>(rows_.size()) < dim) rows_.push_back(std::vector<long long>(dim, 0));
  rank_ = 0;
  for (int c = 0; c < dim; ++c)
    if (rows_[c][c] != 0) ++rank_;
}

long long IntLattice::index() const {
  if (rank_ < dim_) return 0;
  long long p = 1;
  for (int c = 0; c < dim_; ++c) p *= rows_[c][c];
  return p;
}

bool IntLattice::contains(const Point& x) const {
  std::vector<long long> v(x.begin(), x.end());
  for (int c = 0; c < dim_; ++c) {
    if (rows_[c][c] == 0) {
      if (v[c] != 0) return false;
      continue;
    }
    if (v[c] % rows_[c][c] != 0) return false;
    long long q = v[c] / rows_[c][c];
    for (int k = c; k < dim_; ++k) v[k] -= q * rows_[c][k];
  }
  return true;
}

namespace {

bool invariant_under(const std::map<Point, double>& atoms, const std::vector<int>& perm,
                     const std::vector<int>& sign) {
  for (const auto& [z, p] : atoms) {
    Point w(z.size());
    for (std::size_t i = 0; i < z.size(); ++i) w[i] = sign[i] * z[perm[i]];
    auto it = atoms.find(w);
    if (it == atoms.end() || std::abs(it->second - p) > 1e-14) return false;
  }
  return true;
}

}  // namespace

StepLaw make_custom_step_law(int d, const std::vector<std::pair<Point, double>>& in,
                             const std::string& name) {
  if (d < 1 || d > kMaxDim) throw ValidationError("dimension out of range");
  std::map<Point, double> atoms;
  double total = 0.0;
  for (const auto& [z, p] : in) {
    if (static_cast<int>(z.size()) != d) throw ValidationError("step has wrong dimension");
    if (!(p > 0.0)) throw ValidationError("step probabilities must be positive");
    atoms[z] += p;
    total += p;
  }
  if (std::abs(total - 1.0) > 1e-12) throw ValidationError("step probabilities do not sum to 1");
  for (const auto& [z, p] : atoms) {
    Point m(z);
    for (auto& c : m) c = -c;
    auto it = atoms.find(m);
    if (it == atoms.end() || std::abs(it->second - p) > 1e-12)
      throw ValidationError("step law is not symmetric");
  }

  StepLaw law;
  law.name = name;
  law.dim = d;
  for (const auto& [z, p] : atoms) {
    law.support.push_back(z);
    law.prob.push_back(p);
  }
  IntLattice span(d, law.support);
  if (span.rank() < d || span.index() != 1)
    throw ValidationError("step law is not irreducible on Z^d");

  law.cov = Eigen::MatrixXd::Zero(d, d);
  for (std::size_t k = 0; k < law.support.size(); ++k)
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j) law.cov(i, j) += law.prob[k] * law.support[k][i] * law.support[k][j];
  law.cov_det = law.cov.determinant();
  if (!(law.cov_det > 0.0)) throw ValidationError("step covariance is degenerate");
  law.cov_inv = law.cov.inverse();

  law.shift = law.support.front();
  std::vector<Point> diffs;
  for (const auto& z : law.support) {
    Point w(d);
    for (int i = 0; i < d; ++i) w[i] = z[i] - law.shift[i];
    diffs.push_back(w);
  }
  IntLattice dl(d, diffs);
  law.period = static_cast<int>(dl.index());
  if (law.period < 1) throw ValidationError("difference lattice is degenerate");

  for (const auto& z : law.support)
    for (int c : z) law.max_jump = std::max(law.max_jump, std::abs(c));

  std::vector<int> id(d), plus(d, 1);
  std::iota(id.begin(), id.end(), 0);
  law.sign_symmetric = true;
  for (int i = 0; i < d && law.sign_symmetric; ++i) {
    std::vector<int> s(plus);
    s[i] = -1;
    law.sign_symmetric = invariant_under(atoms, id, s);
  }
  law.hyperoctahedral = law.sign_symmetric;
  for (int i = 0; i + 1 < d && law.hyperoctahedral; ++i) {
    std::vector<int> p(id);
    std::swap(p[i], p[i + 1]);
    law.hyperoctahedral = invariant_under(atoms, p, plus);
  }
  return law;
}

StepLaw make_step_law(const std::string& kind, int d) {
  std::vector<std::pair<Point, double>> atoms;
  if (kind == "simple") {
    for (int i = 0; i < d; ++i)
      for (int s : {-1, 1}) {
        Point z(d, 0);
        z[i] = s;
        atoms.emplace_back(z, 1.0 / (2 * d));
      }
  } else if (kind == "lazy_simple") {
    atoms.emplace_back(Point(d, 0), 0.5);
    for (int i = 0; i < d; ++i)
      for (int s : {-1, 1}) {
        Point z(d, 0);
        z[i] = s;
        atoms.emplace_back(z, 1.0 / (4 * d));
      }
  } else {
    throw ValidationError("unknown step law kind: " + kind);
  }
  return make_custom_step_law(d, atoms, kind);
}

std::uint64_t StepLaw::hash() const {
  Digest h;
  h.add(std::int64_t(dim));
  for (std::size_t k = 0; k < support.size(); ++k) {
    for (int c : support[k]) h.add(std::int64_t(c));
    h.add(prob[k]);
  }
  return h.value();
}

int StepLaw::parity_class(const Point& x) const {
  if (period == 1) return 0;
  std::vector<Point> diffs;
  for (const auto& z : support) {
    Point w(dim);
    for (int i = 0; i < dim; ++i) w[i] = z[i] - shift[i];
    diffs.push_back(w);
  }
  IntLattice dl(dim, diffs);
  for (int r = 0; r < period; ++r) {
    Point w(dim);
    for (int i = 0; i < dim; ++i) w[i] = x[i] - r * shift[i];
    if (dl.contains(w)) return r;
  }
  throw ValidationError("point not reachable by the walk");
}

double theta_norm(const StepLaw& law, const double* x) {
  double s = 0.0;
  for (int i = 0; i < law.dim; ++i)
    for (int j = 0; j < law.dim; ++j) s += x[i] * law.cov_inv(i, j) * x[j];
  return std::sqrt(std::max(0.0, s));
}

double theta_norm(const StepLaw& law, const Point& x) {
  double v[kMaxDim];
  for (int i = 0; i < law.dim; ++i) v[i] = x[i];
  return theta_norm(law, v);
}

double green_constant(const StepLaw& law) {
  const double d = law.dim;
  if (law.dim < 3) throw ValidationError("Green function requires d >= 3");
  return std::tgamma((d - 2) / 2) / (2 * std::pow(M_PI, d / 2) * std::sqrt(law.cov_det));
}

double second_order_constant(const StepLaw& law) {
  const double d = law.dim;
  if (law.dim < 5) throw ValidationError("second-order kernel requires d >= 5");
  const double cg = green_constant(law);
  const double gm = std::tgamma((d - 2) / 2);
  return cg * cg * std::sqrt(law.cov_det) * std::pow(M_PI, d / 2) * std::tgamma((d - 4) / 2) / (gm * gm);
}

double sup_norm(const Point& x) {
  int m = 0;
  for (int c : x) m = std::max(m, std::abs(c));
  return m;
}

double euclid_norm(const Point& x) {
  double s = 0.0;
  for (int c : x) s += double(c) * c;
  return std::sqrt(s);
}

}  // namespace brcap
