#pragma once

#include <cstdint>
#include <memory>
#include <vector>

#include "brcap/common.hpp"
#include "brcap/lattice.hpp"

namespace brcap {

// Sites of the cube [-E, E]^d, E = radius + margin. The first `free_dims`
// coordinates are kept as they are; the remaining ones are reduced modulo
// signed permutations, so a site stands for a whole orbit. free_dims = d is
// the unreduced grid, free_dims = 0 the full hyperoctahedral quotient.
class Box {
 public:
  Box(int dim, int radius, int margin, int free_dims);

  int dim() const { return dim_; }
  int radius() const { return radius_; }
  int extent() const { return extent_; }
  int free_dims() const { return free_; }
  bool reduced() const { return free_ < dim_; }
  std::size_t size() const { return nsites_; }

  // Canonical site of an arbitrary point; npos when outside the cube.
  static constexpr std::size_t npos = ~std::size_t(0);
  std::size_t index(const int* x) const;
  std::size_t index(const Point& x) const { return index(x.data()); }

  const std::int16_t* rep(std::size_t i) const { return &reps_[i * dim_]; }
  Point point(std::size_t i) const;
  double weight(std::size_t i) const { return weight_[i]; }
  int sup(std::size_t i) const { return sup_[i]; }
  bool interior(std::size_t i) const { return sup_[i] <= radius_; }
  double norm2(std::size_t i) const;

  const std::vector<std::uint32_t>& interior_sites() const { return interior_; }

 private:
  int dim_, radius_, extent_, free_, sym_;
  std::size_t nsites_ = 0;
  std::size_t sym_count_ = 0;
  std::vector<std::vector<std::uint64_t>> binom_;
  std::vector<std::int16_t> reps_;
  std::vector<double> weight_;
  std::vector<std::int16_t> sup_;
  std::vector<std::uint32_t> interior_;

  std::size_t sym_rank(const int* sorted) const;
};

// Transition operator of a step law restricted to the interior sites of a box.
class Stepper {
 public:
  Stepper(std::shared_ptr<const Box> box, const StepLaw& law);

  const Box& box() const { return *box_; }
  std::shared_ptr<const Box> box_ptr() const { return box_; }
  const StepLaw& law() const { return law_; }
  int fanout() const { return static_cast<int>(law_.prob.size()); }
  const std::uint32_t* neighbors(std::size_t k) const { return &nb_[k * fanout()]; }

  // out[i] = sum_z theta(z) v[i+z] for interior sites i; 0 elsewhere.
  void apply(const std::vector<double>& v, std::vector<double>& out) const;
  double apply_at(const std::vector<double>& v, std::size_t site) const;

 private:
  std::shared_ptr<const Box> box_;
  StepLaw law_;
  std::vector<std::uint32_t> pos_;  // site -> position in interior list
  std::vector<std::uint32_t> nb_;

 public:
  std::size_t slot(std::size_t site) const { return pos_[site]; }
};

// Box reduction compatible with a step law and a symmetric configuration.
int default_free_dims(const StepLaw& law);

}  // namespace brcap
