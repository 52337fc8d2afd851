// fft.hpp — self-contained complex FFT.
//
// Power-of-two lengths use iterative radix-2 Cooley–Tukey with precomputed
// twiddles; any other length goes through Bluestein's chirp-z transform on a
// padded power-of-two grid. Forward is un-normalized (sum of e^{-ikx} terms),
// inverse carries the 1/n. Plans are cached per length in thread-local
// storage, so concurrent use from different threads needs no locking.
#pragma once

#include <cstddef>
#include <memory>
#include <unordered_map>

#include "kgdisp/common.hpp"

namespace kgdisp {

class Fft {
public:
  explicit Fft(std::size_t n) : n_(n) {
    if (n_ == 0) throw invalid_input("Fft: length must be positive");
    if (is_pow2(n_)) {
      init_pow2_tables(n_, tw_, bitrev_);
    } else {
      // Bluestein: x_k e^{-i pi k^2/n} convolved against the conjugate chirp.
      m_ = 1;
      while (m_ < 2 * n_ - 1) m_ <<= 1;
      init_pow2_tables(m_, mtw_, mbitrev_);
      chirp_.resize(n_);
      std::vector<cd> b(m_, cd(0, 0));
      for (std::size_t k = 0; k < n_; ++k) {
        // k^2 mod 2n keeps the trig argument small and exact.
        std::size_t k2 = (k * k) % (2 * n_);
        double phi = pi * double(k2) / double(n_);
        chirp_[k] = cd(std::cos(phi), -std::sin(phi));
        b[k] = std::conj(chirp_[k]);
        if (k) b[m_ - k] = std::conj(chirp_[k]);
      }
      fft_pow2(b, mtw_, mbitrev_, false);
      bhat_ = std::move(b);
    }
  }

  std::size_t size() const { return n_; }

  void forward(std::vector<cd>& a) const { transform(a, false); }
  void inverse(std::vector<cd>& a) const {
    transform(a, true);
    double s = 1.0 / double(n_);
    for (cd& z : a) z *= s;
  }

private:
  static bool is_pow2(std::size_t n) { return (n & (n - 1)) == 0; }

  static void init_pow2_tables(std::size_t n, std::vector<cd>& tw, std::vector<std::size_t>& rev) {
    tw.resize(n / 2);
    for (std::size_t k = 0; k < n / 2; ++k) {
      double phi = -2.0 * pi * double(k) / double(n);
      tw[k] = cd(std::cos(phi), std::sin(phi));
    }
    rev.resize(n);
    rev[0] = 0;
    for (std::size_t i = 1; i < n; ++i) rev[i] = (rev[i >> 1] >> 1) | ((i & 1u) ? n >> 1 : 0);
  }

  static void fft_pow2(std::vector<cd>& a, const std::vector<cd>& tw, const std::vector<std::size_t>& rev,
                       bool inverse_dir) {
    const std::size_t n = a.size();
    for (std::size_t i = 0; i < n; ++i)
      if (rev[i] > i) std::swap(a[i], a[rev[i]]);
    for (std::size_t len = 2; len <= n; len <<= 1) {
      std::size_t step = n / len;
      for (std::size_t i = 0; i < n; i += len) {
        for (std::size_t j = 0; j < len / 2; ++j) {
          cd w = tw[j * step];
          if (inverse_dir) w = std::conj(w);
          cd u = a[i + j];
          cd v = a[i + j + len / 2] * w;
          a[i + j] = u + v;
          a[i + j + len / 2] = u - v;
        }
      }
    }
  }

  void transform(std::vector<cd>& a, bool inverse_dir) const {
    if (a.size() != n_) throw invalid_input("Fft: size mismatch");
    if (!tw_.empty()) {
      fft_pow2(a, tw_, bitrev_, inverse_dir);
      return;
    }
    // Bluestein path. Inverse = conj∘forward∘conj (scaling handled by caller).
    if (inverse_dir)
      for (cd& z : a) z = std::conj(z);
    std::vector<cd> x(m_, cd(0, 0));
    for (std::size_t k = 0; k < n_; ++k) x[k] = a[k] * chirp_[k];
    fft_pow2(x, mtw_, mbitrev_, false);
    for (std::size_t k = 0; k < m_; ++k) x[k] *= bhat_[k];
    fft_pow2(x, mtw_, mbitrev_, true);
    double s = 1.0 / double(m_);
    for (std::size_t k = 0; k < n_; ++k) a[k] = x[k] * s * chirp_[k];
    if (inverse_dir)
      for (cd& z : a) z = std::conj(z);
  }

  std::size_t n_ = 0;
  std::vector<cd> tw_;
  std::vector<std::size_t> bitrev_;
  // Bluestein workspace
  std::size_t m_ = 0;
  std::vector<cd> mtw_, chirp_, bhat_;
  std::vector<std::size_t> mbitrev_;
};

inline const Fft& fft_plan(std::size_t n) {
  thread_local std::unordered_map<std::size_t, std::unique_ptr<Fft>> cache;
  auto it = cache.find(n);
  if (it == cache.end()) it = cache.emplace(n, std::make_unique<Fft>(n)).first;
  return *it->second;
}

}  // namespace kgdisp
