// common.hpp — shared scalar types, errors, RNG and small utilities.
#pragma once

#include <complex>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace kgdisp {

using cd = std::complex<double>;
inline constexpr double pi = 3.141592653589793238462643383279502884;

// Error taxonomy: invalid inputs vs. domain restrictions vs. numerical failures.
struct invalid_input : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};
struct domain_error : std::domain_error {
  using std::domain_error::domain_error;
};
struct branch_point_error : domain_error {
  using domain_error::domain_error;
};
struct spectral_point_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct geometry_error : domain_error {
  using domain_error::domain_error;
};
struct box_too_small_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct admissibility_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct stability_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct inconclusive_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// splitmix64 / xoshiro-style generator: deterministic across platforms,
// used for every randomized probe so artifacts are byte-reproducible.
class Rng {
public:
  explicit Rng(std::uint64_t seed = 1) : s_(seed ? seed : 0x9e3779b97f4a7c15ull) {}

  std::uint64_t next_u64() {
    std::uint64_t z = (s_ += 0x9e3779b97f4a7c15ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }
  // uniform in [0,1)
  double uniform() { return double(next_u64() >> 11) * 0x1.0p-53; }
  double uniform(double a, double b) { return a + (b - a) * uniform(); }
  cd complex_in_box(double re_lo, double re_hi, double im_lo, double im_hi) {
    return {uniform(re_lo, re_hi), uniform(im_lo, im_hi)};
  }

private:
  std::uint64_t s_;
};

// Minimal parallel-for over [0, n); k<=1 runs inline. Work items must be
// independent (all sweeps here write to disjoint slots).
inline void parallel_for(std::size_t n, int nthreads, const std::function<void(std::size_t)>& body) {
  if (nthreads <= 1 || n < 2) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::size_t nt = std::min<std::size_t>(static_cast<std::size_t>(nthreads), n);
  std::vector<std::thread> pool;
  pool.reserve(nt);
  for (std::size_t t = 0; t < nt; ++t) {
    pool.emplace_back([&, t] {
      for (std::size_t i = t; i < n; i += nt) body(i);
    });
  }
  for (auto& th : pool) th.join();
}

inline bool all_finite(const std::vector<cd>& v) {
  for (const cd& z : v)
    if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) return false;
  return true;
}

inline double sq(double x) { return x * x; }
inline cd sq(cd z) { return z * z; }

// ⟨x⟩ = (1+x²)^{1/2}
inline double angle_bracket(double x) { return std::sqrt(1.0 + x * x); }

}  // namespace kgdisp
