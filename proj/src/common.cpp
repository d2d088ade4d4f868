#include "brcap/common.hpp"

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <cstring>
#include <thread>

namespace brcap {

Digest& Digest::add(std::string_view s) {
  for (unsigned char c : s) {
    h_ ^= c;
    h_ *= 1099511628211ULL;
  }
  h_ ^= 0xff;
  h_ *= 1099511628211ULL;
  return *this;
}

Digest& Digest::add(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return add(std::string_view(buf));
}

Digest& Digest::add(std::int64_t x) { return add(std::to_string(x)); }

std::string Digest::hex() const { return hex64(h_); }

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

namespace {
std::atomic<int> g_threads{1};
}

int thread_count() { return g_threads.load(); }

void set_thread_count(int n) { g_threads.store(n < 1 ? 1 : n); }

void parallel_chunks(std::size_t n, std::size_t chunk,
                     const std::function<void(std::size_t, std::size_t)>& f) {
  if (n == 0) return;
  const std::size_t nchunks = (n + chunk - 1) / chunk;
  const int t = thread_count();
  if (t <= 1 || nchunks == 1) {
    for (std::size_t c = 0; c < nchunks; ++c)
      f(c * chunk, std::min(n, (c + 1) * chunk));
    return;
  }
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (;;) {
      std::size_t c = next.fetch_add(1);
      if (c >= nchunks) return;
      f(c * chunk, std::min(n, (c + 1) * chunk));
    }
  };
  std::vector<std::thread> pool;
  const int spawn = std::min<std::size_t>(t, nchunks) - 1;
  for (int i = 0; i < spawn; ++i) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();
}

double chunked_sum(std::size_t n, std::size_t chunk,
                   const std::function<double(std::size_t, std::size_t)>& f) {
  if (n == 0) return 0.0;
  const std::size_t nchunks = (n + chunk - 1) / chunk;
  std::vector<double> part(nchunks, 0.0);
  parallel_chunks(nchunks, 1, [&](std::size_t c0, std::size_t c1) {
    for (std::size_t c = c0; c < c1; ++c)
      part[c] = f(c * chunk, std::min(n, (c + 1) * chunk));
  });
  double s = 0.0;
  for (double p : part) s += p;
  return s;
}

}  // namespace brcap
