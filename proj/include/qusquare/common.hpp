//   Copyright 2026 The QuSquare Authors
//
//   Licensed under the Apache License, Version 2.0 (the "License");
//   you may not use this file except in compliance with the License.
//   You may obtain a copy of the License at
//
//       http://www.apache.org/licenses/LICENSE-2.0
//
//   Unless required by applicable law or agreed to in writing, software
//   distributed under the License is distributed on an "AS IS" BASIS,
//   WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
//   See the License for the specific language governing permissions and
//   limitations under the License.

#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <exception>
#include <initializer_list>
#include <mutex>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace qusquare {

inline constexpr double EPS_UNITARY = 1e-10;
inline constexpr double EPS_ORACLE = 1e-9;
inline constexpr double PI = 3.14159265358979323846;

// Raised when a benchmark configuration breaks one of the parameter rules.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct UnsupportedGate : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct SolverError : std::runtime_error {
  SolverError(const std::string& what, std::vector<double> history)
      : std::runtime_error(what), residuals(std::move(history)) {}
  std::vector<double> residuals;
};

struct StarvationError : std::runtime_error {
  StarvationError(const std::string& what, double rate)
      : std::runtime_error(what), acceptance_rate(rate) {}
  double acceptance_rate;
};

inline std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Counter-based generator: output i is a pure function of (key, i), so
// substreams can be derived by index without touching shared state.
class Rng {
 public:
  using result_type = std::uint64_t;

  Rng() = default;
  explicit Rng(std::uint64_t seed) : key_(mix64(seed)) {}

  static Rng stream(std::uint64_t master, std::initializer_list<std::uint64_t> path) {
    Rng r(master);
    for (auto p : path) r = r.fork(p);
    return r;
  }

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return ~result_type(0); }

  result_type operator()() { return mix64(key_ ^ mix64(ctr_++ + 0x632be59bd9b4e019ULL)); }

  Rng fork(std::uint64_t index) const {
    Rng r;
    r.key_ = mix64(key_ ^ mix64(index ^ 0xd1b54a32d192ed03ULL) ^ (ctr_ * 0x8cb92ba72f3d8dd7ULL));
    return r;
  }

  // Uniform on [0, 1).
  double uniform() { return double((*this)() >> 11) * 0x1.0p-53; }

  // Uniform integer in [0, n).
  std::uint64_t below(std::uint64_t n) {
    if (n <= 1) return 0;
    const std::uint64_t limit = max() - max() % n;
    std::uint64_t v;
    do {
      v = (*this)();
    } while (v >= limit);
    return v % n;
  }

  bool bernoulli(double p) { return p > 0.0 && uniform() < p; }

  double normal() {
    double u1 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * PI * u2);
  }

 private:
  std::uint64_t key_ = 0;
  std::uint64_t ctr_ = 0;
};

inline unsigned worker_count() {
  unsigned hw = std::max(1u, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("QUSQUARE_THREADS")) {
    char* end = nullptr;
    long v = std::strtol(env, &end, 10);
    if (end != env && v >= 1) return unsigned(std::min(v, 256L));  // may oversubscribe
  }
  return hw;
}

namespace detail {
inline thread_local bool in_pool = false;
}

// Runs fn(i) for i in [0, n). Results must be written to per-index slots; the
// first exception thrown by any worker is rethrown. Nested calls run inline.
template <class Fn>
void parallel_for(std::size_t n, Fn&& fn) {
  const unsigned workers = detail::in_pool ? 1u : unsigned(std::min<std::size_t>(worker_count(), n));
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr err;
  std::mutex err_mu;
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      detail::in_pool = true;
      for (;;) {
        std::size_t i = next.fetch_add(1);
        if (i >= n) return;
        try {
          fn(i);
        } catch (...) {
          std::lock_guard<std::mutex> lk(err_mu);
          if (!err) err = std::current_exception();
          next = n;
          return;
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (err) std::rethrow_exception(err);
}

// Hoeffding sample size (2/eps^2) ln(2/delta), rounded up.
inline std::size_t hoeffding_shots(double eps, double delta) {
  return std::size_t(std::ceil(2.0 / (eps * eps) * std::log(2.0 / delta)));
}

}  // namespace qusquare
