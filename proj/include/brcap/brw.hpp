#pragma once

#include <array>
#include <string>
#include <unordered_set>
#include <vector>

#include "brcap/lattice.hpp"
#include "brcap/offspring.hpp"

namespace brcap {

class LatticeSet {
 public:
  LatticeSet() = default;
  LatticeSet(int dim, std::vector<Point> pts);
  // B(0, rho) intersected with Z^d; closed keeps |x| = rho.
  static LatticeSet ball(int dim, double rho, bool closed);

  int dim() const { return dim_; }
  std::size_t size() const { return pts_.size(); }
  const std::vector<Point>& points() const { return pts_; }
  bool contains(const int* x) const;
  bool contains(const Point& x) const { return contains(x.data()); }
  double radius() const { return radius_; }  // max |a|
  bool hyperoctahedral() const;
  // Points with |x| exactly rho (only meaningful for balls).
  std::vector<Point> on_sphere(double rho) const;
  std::uint64_t digest() const;

 private:
  struct Key {
    std::array<int, kMaxDim> c{};
    bool operator==(const Key& o) const { return c == o.c; }
  };
  struct KeyHash {
    std::size_t operator()(const Key& k) const;
  };
  int dim_ = 0;
  std::vector<Point> pts_;
  std::unordered_set<Key, KeyHash> set_;
  std::array<int, kMaxDim> lo_{}, hi_{};
  double radius_ = 0.0;
};

struct HitEstimate {
  std::string quantity;
  double p_hat = 0.0;
  double lower = 0.0;   // bracket from capped trees and truncation
  double upper = 0.0;
  double ci_low = 0.0;  // Wilson interval around the bracket ends
  double ci_high = 0.0;
  double ci_half = 0.0;
  std::uint64_t samples = 0;
  std::uint64_t hits = 0;
  std::uint64_t capped = 0;
  double r_stop = 0.0;
};

enum class TreeKind { critical, adjoint };

struct McOptions {
  std::uint64_t samples = 10000;
  std::uint64_t seed = 1;
  std::size_t max_vertices = 10000;
  double frontier_safety = 2.0;
  // Spine truncation for escape estimates.
  double r_stop = 32.0;
  double r_stop_max = 1024.0;
  double remainder_fraction = 0.25;  // target remainder / CI half-width
  bool adaptive_r_stop = false;
  double remainder_safety = 10.0;
  double max_bracket = 1.0;
};

// Bound on the hit probability of a critical subtree started at distance t
// (theta-norm) from the set.
double critical_hit_bound(const StepLaw& step, const LatticeSet& K, double dist, double safety);
// Bound on the hit probability of a spine tree started at distance t.
double spine_hit_bound(const StepLaw& step, const OffspringLaw& law, const LatticeSet& K, double dist,
                       double safety);

HitEstimate hit_probability(TreeKind kind, const LatticeSet& K, const Point& x, const OffspringLaw& law,
                            const StepLaw& step, const McOptions& opt);

// Estimate of e_K(x) = 1 - p_-(x): the spine tree rooted one step from x avoids K.
HitEstimate escape_probability(const LatticeSet& K, const Point& x, const OffspringLaw& law,
                               const StepLaw& step, const McOptions& opt);

// Estimate of p_I(x): the spine tree rooted at x hits K.
HitEstimate p_infinite(const LatticeSet& K, const Point& x, const OffspringLaw& law, const StepLaw& step,
                       const McOptions& opt);

}  // namespace brcap
