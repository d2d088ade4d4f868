#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "brcap/common.hpp"

namespace brcap {

// Distribution on {0,1,2,...}. Finite pmfs are stored exactly; the
// geometric(1/2) law keeps closed forms.
class Pmf {
 public:
  Pmf() = default;
  explicit Pmf(std::vector<double> p);
  static Pmf geometric_half();

  bool geometric() const { return geometric_; }
  const std::vector<double>& atoms() const { return p_; }  // truncated for geometric
  double operator[](std::size_t k) const;
  double mean() const { return mean_; }
  double second_factorial() const { return m2_; }  // E[X(X-1)]

  double gen(double s) const;           // E[s^X]
  double gen_prime(double s) const;     // d/ds E[s^X]
  double one_minus_gen(double m) const; // 1 - E[(1-m)^X], accurate for small m
  int sample(Rng& rng) const;

 private:
  std::vector<double> p_;
  std::vector<double> cdf_;
  bool geometric_ = false;
  double mean_ = 0.0, m2_ = 0.0;
};

struct OffspringLaw {
  std::string kind;
  Pmf pmf;
  double sigma2 = 0.0;
  double third = 0.0;  // E[X^3]
  std::uint64_t hash() const;
  double mu0() const { return pmf[0]; }
};

struct AdjointLaw {
  Pmf pmf;  // pmf(k) = sum_{j>k} mu(j)
  double mean = 0.0;
};

OffspringLaw make_offspring_law(const std::string& kind, const std::vector<double>& custom = {},
                                int k_max = 12);
AdjointLaw adjoint_of(const OffspringLaw& law);

enum class TreeOutcome { complete, capped };

struct Tree {
  std::vector<std::int32_t> parent;   // parent[0] = -1
  TreeOutcome outcome = TreeOutcome::complete;
  std::vector<std::int32_t> frontier; // vertices whose offspring were not all drawn
  std::size_t size() const { return parent.size(); }
};

struct TreeBudget {
  std::size_t max_vertices = 1000000;
};

// Breadth-first growth. `visit(child, parent)` is called when a vertex is
// created and may return true to stop. The root has offspring law
// `root_law`, every other vertex `law`. Returns the outcome and leaves
// the unexpanded vertices in `frontier`.
struct GrowResult {
  TreeOutcome outcome = TreeOutcome::complete;
  bool stopped = false;
  std::size_t vertices = 0;
  std::vector<std::int32_t> frontier;
  std::vector<int> pending;  // undrawn children of each frontier vertex, -1 if none drawn yet
};

template <class Visit>
GrowResult grow_tree(const Pmf& root_law, const Pmf& law, std::size_t max_vertices, Rng& rng,
                     Visit&& visit, std::vector<std::int32_t>* parent_out = nullptr) {
  GrowResult r;
  std::vector<std::int32_t> queue;
  queue.push_back(0);
  r.vertices = 1;
  if (parent_out) parent_out->assign(1, -1);
  std::size_t head = 0;
  while (head < queue.size()) {
    const std::int32_t v = queue[head++];
    const int k = (v == 0 ? root_law : law).sample(rng);
    for (int j = 0; j < k; ++j) {
      if (r.vertices >= max_vertices) {
        r.outcome = TreeOutcome::capped;
        r.frontier.push_back(v);
        r.pending.push_back(k - j);
        for (std::size_t h = head; h < queue.size(); ++h) {
          r.frontier.push_back(queue[h]);
          r.pending.push_back(-1);
        }
        return r;
      }
      const auto c = static_cast<std::int32_t>(r.vertices++);
      if (parent_out) parent_out->push_back(v);
      queue.push_back(c);
      if (visit(c, v)) {
        r.stopped = true;
        return r;
      }
    }
  }
  return r;
}

Tree sample_critical_tree(const OffspringLaw& law, const TreeBudget& budget, std::uint64_t seed,
                          std::uint64_t index = 0);
// Adjoint tree: root draws from the adjoint law, descendants from the critical law.
Tree sample_adjoint_tree(const OffspringLaw& law, const TreeBudget& budget, std::uint64_t seed,
                         std::uint64_t index = 0);

// Lazy stream of adjoint trees grafted on the spine; item i depends only on (seed, i).
class SpineStream {
 public:
  SpineStream(OffspringLaw law, TreeBudget budget, std::uint64_t seed);
  Tree next();
  Tree at(std::uint64_t i) const;
  std::uint64_t position() const { return pos_; }

 private:
  OffspringLaw law_;
  TreeBudget budget_;
  std::uint64_t seed_;
  std::uint64_t pos_ = 0;
};

// Empirical total-progeny law on sizes [n_min, n_max].
struct TreeSizeLaw {
  std::vector<std::uint64_t> count;  // index n - n_min
  std::uint64_t samples = 0;
  std::uint64_t capped = 0;
  int n_min = 0, n_max = 0;
  int span = 1;     // lattice span of admissible sizes
  int residue = 0;  // admissible sizes are residue mod span
  double sigma = 0.0;
  // P(#T = n) * n^{3/2} * sigma * sqrt(2 pi)
  double normalized(int n) const;
  // The same ratio pooled over admissible n in [a, b].
  double normalized_bin(int a, int b) const;
};

TreeSizeLaw tree_size_law(const OffspringLaw& law, int n_min, int n_max, std::uint64_t samples,
                          std::uint64_t seed);
// Exact P(#T = n) for the geometric(1/2) law.
double geometric_tree_size_pmf(int n);

}  // namespace brcap
