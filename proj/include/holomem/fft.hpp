#pragma once

// Discrete Fourier transform for arbitrary lengths: iterative radix-2 for
// powers of two, Bluestein's chirp-z reduction otherwise.

#include <bit>
#include <cmath>
#include <complex>
#include <cstddef>
#include <map>
#include <mutex>
#include <numbers>
#include <span>
#include <vector>

namespace holomem::fft {

using Complex = std::complex<double>;

namespace detail {

// exp(-2*pi*i*k/n) for k in [0, n), each computed directly so the table
// carries no accumulated rounding.
inline const std::vector<Complex>& twiddles(std::size_t n) {
  static std::mutex mutex;
  static std::map<std::size_t, std::vector<Complex>> cache;
  std::lock_guard lock(mutex);
  auto it = cache.find(n);
  if (it == cache.end()) {
    std::vector<Complex> w(n);
    for (std::size_t k = 0; k < n; ++k) {
      const double angle = -2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(n);
      w[k] = {std::cos(angle), std::sin(angle)};
    }
    it = cache.emplace(n, std::move(w)).first;
  }
  return it->second;
}

inline void radix2(std::span<Complex> a, bool inverse) {
  const std::size_t n = a.size();
  for (std::size_t i = 1, j = 0; i < n; ++i) {
    std::size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(a[i], a[j]);
  }
  const auto& w = twiddles(n);
  for (std::size_t len = 2; len <= n; len <<= 1) {
    const std::size_t half = len / 2;
    const std::size_t stride = n / len;
    for (std::size_t i = 0; i < n; i += len) {
      for (std::size_t k = 0; k < half; ++k) {
        const Complex tw = inverse ? std::conj(w[k * stride]) : w[k * stride];
        const Complex u = a[i + k];
        const Complex v = a[i + k + half] * tw;
        a[i + k] = u + v;
        a[i + k + half] = u - v;
      }
    }
  }
}

inline void bluestein(std::span<Complex> a, bool inverse) {
  const std::size_t n = a.size();
  const std::size_t m = std::bit_ceil(2 * n - 1);
  // chirp[k] = exp(-/+ i*pi*k^2/n); k^2 is reduced mod 2n to keep the angle small.
  std::vector<Complex> chirp(n);
  for (std::size_t k = 0; k < n; ++k) {
    const auto k2 = static_cast<double>((k * k) % (2 * n));
    const double angle = (inverse ? 1.0 : -1.0) * std::numbers::pi * k2 / static_cast<double>(n);
    chirp[k] = {std::cos(angle), std::sin(angle)};
  }
  std::vector<Complex> x(m), y(m);
  for (std::size_t k = 0; k < n; ++k) x[k] = a[k] * chirp[k];
  y[0] = std::conj(chirp[0]);
  for (std::size_t k = 1; k < n; ++k) y[k] = y[m - k] = std::conj(chirp[k]);
  radix2(x, false);
  radix2(y, false);
  for (std::size_t k = 0; k < m; ++k) x[k] *= y[k];
  radix2(x, true);
  const double scale = 1.0 / static_cast<double>(m);
  for (std::size_t k = 0; k < n; ++k) a[k] = x[k] * scale * chirp[k];
}

}  // namespace detail

/// In-place unnormalized transform. The inverse direction does not divide by n.
inline void transform(std::span<Complex> a, bool inverse = false) {
  if (a.size() <= 1) return;
  if (std::has_single_bit(a.size())) {
    detail::radix2(a, inverse);
  } else {
    detail::bluestein(a, inverse);
  }
}

inline std::vector<Complex> forward(std::span<const double> x) {
  std::vector<Complex> out(x.begin(), x.end());
  transform(out, false);
  return out;
}

/// Real part of the normalized inverse transform.
inline std::vector<double> inverse_real(std::span<const Complex> spectrum) {
  std::vector<Complex> tmp(spectrum.begin(), spectrum.end());
  transform(tmp, true);
  const double scale = 1.0 / static_cast<double>(tmp.size());
  std::vector<double> out(tmp.size());
  for (std::size_t k = 0; k < tmp.size(); ++k) out[k] = tmp[k].real() * scale;
  return out;
}

}  // namespace holomem::fft
