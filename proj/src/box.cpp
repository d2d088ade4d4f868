#include "brcap/box.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace brcap {

Box::Box(int dim, int radius, int margin, int free_dims)
    : dim_(dim), radius_(radius), extent_(radius + margin), free_(free_dims), sym_(dim - free_dims) {
  if (dim < 1 || dim > kMaxDim) throw ValidationError("box dimension out of range");
  if (radius < 0 || margin < 0 || free_dims < 0 || free_dims > dim)
    throw ValidationError("bad box parameters");
  if (extent_ > 30000) throw ValidationError("box too large");
  const int E = extent_;
  const int top = E + sym_ + 1;
  binom_.assign(top + 1, std::vector<std::uint64_t>(sym_ + 2, 0));
  for (int n = 0; n <= top; ++n) {
    binom_[n][0] = 1;
    for (int k = 1; k <= std::min(n, sym_ + 1); ++k)
      binom_[n][k] = binom_[n - 1][k - 1] + (k <= n - 1 ? binom_[n - 1][k] : 0);
  }
  sym_count_ = binom_[E + sym_][sym_];
  std::size_t free_count = 1;
  for (int i = 0; i < free_; ++i) free_count *= (2 * E + 1);
  nsites_ = free_count * sym_count_;
  if (nsites_ > (std::size_t(1) << 31)) throw BudgetError("box has too many sites");

  reps_.assign(nsites_ * dim_, 0);
  weight_.assign(nsites_, 0.0);
  sup_.assign(nsites_, 0);

  // Enumerate sorted symmetric tuples.
  std::vector<std::vector<int>> tuples;
  tuples.reserve(sym_count_);
  std::vector<int> a(sym_, 0);
  std::vector<double> tw;
  tw.reserve(sym_count_);
  std::vector<std::size_t> trank;
  trank.reserve(sym_count_);
  std::vector<double> fact(sym_ + 1, 1.0);
  for (int i = 1; i <= sym_; ++i) fact[i] = fact[i - 1] * i;
  for (;;) {
    double w = fact[sym_];
    int nz = 0;
    for (int i = 0; i < sym_;) {
      int j = i;
      while (j < sym_ && a[j] == a[i]) ++j;
      w /= fact[j - i];
      i = j;
    }
    for (int v : a)
      if (v != 0) ++nz;
    w *= std::ldexp(1.0, nz);
    tuples.push_back(a);
    tw.push_back(w);
    trank.push_back(sym_rank(a.data()));
    int k = sym_ - 1;
    while (k >= 0 && a[k] == E) --k;
    if (k < 0) break;
    ++a[k];
    for (int j = k + 1; j < sym_; ++j) a[j] = a[k];
  }

  std::vector<int> f(free_, -E);
  for (std::size_t fi = 0; fi < free_count; ++fi) {
    // fi in mixed radix, first coordinate fastest.
    std::size_t r = fi;
    int fsup = 0;
    for (int i = 0; i < free_; ++i) {
      f[i] = static_cast<int>(r % (2 * E + 1)) - E;
      r /= (2 * E + 1);
      fsup = std::max(fsup, std::abs(f[i]));
    }
    for (std::size_t t = 0; t < tuples.size(); ++t) {
      std::size_t s = fi * sym_count_ + trank[t];
      std::int16_t* p = &reps_[s * dim_];
      for (int i = 0; i < free_; ++i) p[i] = static_cast<std::int16_t>(f[i]);
      int m = fsup;
      for (int i = 0; i < sym_; ++i) {
        p[free_ + i] = static_cast<std::int16_t>(tuples[t][i]);
        m = std::max(m, tuples[t][i]);
      }
      weight_[s] = tw[t];
      sup_[s] = static_cast<std::int16_t>(m);
    }
  }
  for (std::size_t s = 0; s < nsites_; ++s)
    if (sup_[s] <= radius_) interior_.push_back(static_cast<std::uint32_t>(s));
}

std::size_t Box::sym_rank(const int* sorted) const {
  std::size_t r = 0;
  for (int i = 0; i < sym_; ++i) r += binom_[sorted[i] + i][i + 1];
  return r;
}

std::size_t Box::index(const int* x) const {
  const int E = extent_;
  std::size_t fi = 0, mul = 1;
  for (int i = 0; i < free_; ++i) {
    if (x[i] < -E || x[i] > E) return npos;
    fi += static_cast<std::size_t>(x[i] + E) * mul;
    mul *= (2 * E + 1);
  }
  int s[kMaxDim];
  for (int i = 0; i < sym_; ++i) {
    int v = std::abs(x[free_ + i]);
    if (v > E) return npos;
    s[i] = v;
  }
  // Insertion sort; sym_ is at most 8.
  for (int i = 1; i < sym_; ++i) {
    int v = s[i], j = i;
    while (j > 0 && s[j - 1] > v) {
      s[j] = s[j - 1];
      --j;
    }
    s[j] = v;
  }
  return fi * sym_count_ + sym_rank(s);
}

Point Box::point(std::size_t i) const {
  Point p(dim_);
  for (int k = 0; k < dim_; ++k) p[k] = reps_[i * dim_ + k];
  return p;
}

double Box::norm2(std::size_t i) const {
  double s = 0.0;
  for (int k = 0; k < dim_; ++k) s += double(reps_[i * dim_ + k]) * reps_[i * dim_ + k];
  return s;
}

Stepper::Stepper(std::shared_ptr<const Box> box, const StepLaw& law) : box_(std::move(box)), law_(law) {
  const Box& b = *box_;
  if (b.dim() != law.dim) throw ValidationError("box and step law dimensions differ");
  if (b.extent() - b.radius() < law.max_jump) throw ValidationError("box margin smaller than step range");
  if (b.reduced()) {
    // The reduced coordinates must carry a signed-permutation-invariant law.
    const int f = b.free_dims();
    for (std::size_t k = 0; k < law.support.size(); ++k) {
      const Point& z = law.support[k];
      for (int i = f; i < law.dim; ++i) {
        Point w(z);
        w[i] = -w[i];
        Point u(z);
        if (i + 1 < law.dim) std::swap(u[i], u[i + 1]);
        for (const Point* q : {&w, &u}) {
          auto it = std::find(law.support.begin(), law.support.end(), *q);
          if (it == law.support.end() ||
              std::abs(law.prob[it - law.support.begin()] - law.prob[k]) > 1e-14)
            throw ValidationError("step law is not invariant under the box symmetry");
        }
      }
    }
  }
  const auto& in = b.interior_sites();
  pos_.assign(b.size(), ~std::uint32_t(0));
  for (std::size_t k = 0; k < in.size(); ++k) pos_[in[k]] = static_cast<std::uint32_t>(k);
  const int F = fanout();
  nb_.resize(in.size() * F);
  parallel_chunks(in.size(), 4096, [&](std::size_t k0, std::size_t k1) {
    int x[kMaxDim];
    for (std::size_t k = k0; k < k1; ++k) {
      const std::int16_t* r = b.rep(in[k]);
      for (int j = 0; j < F; ++j) {
        for (int i = 0; i < law_.dim; ++i) x[i] = r[i] + law_.support[j][i];
        nb_[k * F + j] = static_cast<std::uint32_t>(b.index(x));
      }
    }
  });
}

void Stepper::apply(const std::vector<double>& v, std::vector<double>& out) const {
  const auto& in = box_->interior_sites();
  out.assign(box_->size(), 0.0);
  const int F = fanout();
  const double* pr = law_.prob.data();
  parallel_chunks(in.size(), 8192, [&](std::size_t k0, std::size_t k1) {
    for (std::size_t k = k0; k < k1; ++k) {
      const std::uint32_t* n = &nb_[k * F];
      double s = 0.0;
      for (int j = 0; j < F; ++j) s += pr[j] * v[n[j]];
      out[in[k]] = s;
    }
  });
}

double Stepper::apply_at(const std::vector<double>& v, std::size_t site) const {
  const std::size_t k = pos_[site];
  if (k == ~std::uint32_t(0)) throw ValidationError("site is not interior");
  const int F = fanout();
  double s = 0.0;
  for (int j = 0; j < F; ++j) s += law_.prob[j] * v[nb_[k * F + j]];
  return s;
}

int default_free_dims(const StepLaw& law) { return law.hyperoctahedral ? 0 : law.dim; }

}  // namespace brcap
