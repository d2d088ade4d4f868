#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace brcap {

constexpr int kMaxDim = 8;

using Point = std::vector<int>;

class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ConvergenceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class BudgetError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// FNV-1a over bytes; used for content digests and cache keys.
class Digest {
 public:
  Digest& add(std::string_view s);
  Digest& add(double x);
  Digest& add(std::int64_t x);
  std::uint64_t value() const { return h_; }
  std::string hex() const;

 private:
  std::uint64_t h_ = 1469598103934665603ULL;
};

std::string hex64(std::uint64_t v);

// SplitMix64 finalizer.
inline std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Counter-based stream: the sequence depends only on (seed, key...), never on
// which thread draws it.
class Rng {
 public:
  using result_type = std::uint64_t;

  Rng(std::uint64_t seed, std::uint64_t k1 = 0, std::uint64_t k2 = 0)
      : state_(mix64(mix64(mix64(seed) ^ (k1 + 0x632be59bd9b4e019ULL)) ^
                     (k2 + 0x8cb92ba72f3d8dd7ULL))) {}

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return ~result_type(0); }

  result_type operator()() {
    state_ += 0x9e3779b97f4a7c15ULL;
    std::uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  // Uniform in [0,1) with 53 random bits.
  double uniform() { return double((*this)() >> 11) * 0x1.0p-53; }

 private:
  std::uint64_t state_;
};

// Worker-count setting shared by all parallel loops. Every reduction is
// computed over fixed chunks in a fixed order, so results never depend on it.
int thread_count();
void set_thread_count(int n);

// Runs f(chunk_begin, chunk_end) over [0,n) split into fixed-size chunks.
void parallel_chunks(std::size_t n, std::size_t chunk,
                     const std::function<void(std::size_t, std::size_t)>& f);

// Sum of f(chunk_begin, chunk_end) over fixed chunks, added in chunk order.
double chunked_sum(std::size_t n, std::size_t chunk,
                   const std::function<double(std::size_t, std::size_t)>& f);

}  // namespace brcap
