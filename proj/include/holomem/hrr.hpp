#pragma once

// Holographic reduced representation algebra over real vectors: generation,
// circular convolution binding, involution unbinding, permutation, unitary
// projection, fractional powers and cosine similarity.

#include <algorithm>
#include <cmath>
#include <numbers>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <numeric>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "holomem/error.hpp"
#include "holomem/fft.hpp"
#include "holomem/random.hpp"

namespace holomem {

inline constexpr double kDegenerateNorm = 1e-12;

class HoloVector {
 public:
  HoloVector() = default;
  explicit HoloVector(std::size_t n) : elems_(n, 0.0) {}
  explicit HoloVector(std::vector<double> elems) : elems_(std::move(elems)) {}
  HoloVector(std::initializer_list<double> elems) : elems_(elems) {}

  static HoloVector zeros(std::size_t n) { return HoloVector(n); }

  /// The identity of circular convolution: (1, 0, ..., 0).
  static HoloVector delta(std::size_t n) {
    HoloVector v(n);
    if (n > 0) v.elems_[0] = 1.0;
    return v;
  }

  std::size_t size() const noexcept { return elems_.size(); }
  bool empty() const noexcept { return elems_.empty(); }

  double& operator[](std::size_t i) noexcept { return elems_[i]; }
  double operator[](std::size_t i) const noexcept { return elems_[i]; }

  std::span<double> elements() noexcept { return elems_; }
  std::span<const double> elements() const noexcept { return elems_; }

  auto begin() noexcept { return elems_.begin(); }
  auto end() noexcept { return elems_.end(); }
  auto begin() const noexcept { return elems_.begin(); }
  auto end() const noexcept { return elems_.end(); }

  double dot(const HoloVector& other) const {
    require_same_size(other, "dot");
    return std::inner_product(elems_.begin(), elems_.end(), other.elems_.begin(), 0.0);
  }

  double norm() const { return std::sqrt(dot(*this)); }

  bool is_zero() const {
    return std::all_of(elems_.begin(), elems_.end(), [](double x) { return x == 0.0; });
  }

  HoloVector& operator+=(const HoloVector& other) {
    require_same_size(other, "add");
    for (std::size_t i = 0; i < elems_.size(); ++i) elems_[i] += other.elems_[i];
    return *this;
  }

  HoloVector& operator-=(const HoloVector& other) {
    require_same_size(other, "subtract");
    for (std::size_t i = 0; i < elems_.size(); ++i) elems_[i] -= other.elems_[i];
    return *this;
  }

  HoloVector& operator*=(double s) noexcept {
    for (double& x : elems_) x *= s;
    return *this;
  }

  friend HoloVector operator+(HoloVector a, const HoloVector& b) { return a += b; }
  friend HoloVector operator-(HoloVector a, const HoloVector& b) { return a -= b; }
  friend HoloVector operator*(HoloVector a, double s) { return a *= s; }
  friend HoloVector operator*(double s, HoloVector a) { return a *= s; }
  friend HoloVector operator-(HoloVector a) { return a *= -1.0; }
  friend bool operator==(const HoloVector&, const HoloVector&) = default;

  void require_same_size(const HoloVector& other, const char* op) const {
    if (other.size() != size()) {
      throw Error(Errc::invalid_argument, std::string(op) + ": dimension mismatch (" +
                                              std::to_string(size()) + " vs " +
                                              std::to_string(other.size()) + ")");
    }
  }

 private:
  std::vector<double> elems_;
};

/// Bijective index map; element i of the permuted vector is a[map[i]].
class Permutation {
 public:
  Permutation() = default;

  explicit Permutation(std::vector<std::size_t> map) : map_(std::move(map)), inverse_(map_.size()) {
    std::vector<bool> seen(map_.size(), false);
    for (std::size_t i = 0; i < map_.size(); ++i) {
      if (map_[i] >= map_.size() || seen[map_[i]]) {
        throw Error(Errc::invalid_argument, "permutation is not a bijection");
      }
      seen[map_[i]] = true;
      inverse_[map_[i]] = i;
    }
  }

  static Permutation identity(std::size_t n) {
    std::vector<std::size_t> map(n);
    std::iota(map.begin(), map.end(), std::size_t{0});
    return Permutation(std::move(map));
  }

  /// Fisher-Yates shuffle driven by the seeded stream for `name`.
  static Permutation random(std::size_t n, std::string_view name, std::uint64_t seed) {
    std::vector<std::size_t> map(n);
    std::iota(map.begin(), map.end(), std::size_t{0});
    Rng rng(stream_key(name, seed));
    for (std::size_t i = n; i > 1; --i) {
      std::swap(map[i - 1], map[rng.below(i)]);
    }
    return Permutation(std::move(map));
  }

  std::size_t size() const noexcept { return map_.size(); }
  std::span<const std::size_t> map() const noexcept { return map_; }
  std::span<const std::size_t> inverse_map() const noexcept { return inverse_; }

 private:
  std::vector<std::size_t> map_;
  std::vector<std::size_t> inverse_;
};

/// Seeded environment vector for `token`: elements ~ N(0, 1/n).
inline HoloVector random_vector(std::string_view token, std::uint64_t seed, std::size_t n) {
  if (n < 2) throw Error(Errc::invalid_dimension, "dimension must be at least 2, got " + std::to_string(n));
  if (token.empty()) throw Error(Errc::invalid_token, "token must be non-empty");
  Rng rng(stream_key(token, seed));
  const double sd = 1.0 / std::sqrt(static_cast<double>(n));
  HoloVector v(n);
  for (double& x : v) x = rng.normal(0.0, sd);
  return v;
}

/// Circular convolution c_k = sum_i a_i b_{(k-i) mod n}, computed through the FFT.
inline HoloVector convolve(const HoloVector& a, const HoloVector& b) {
  a.require_same_size(b, "convolve");
  auto fa = fft::forward(a.elements());
  const auto fb = fft::forward(b.elements());
  for (std::size_t k = 0; k < fa.size(); ++k) fa[k] *= fb[k];
  return HoloVector(fft::inverse_real(fa));
}

/// Involution a*_k = a_{(n-k) mod n}.
inline HoloVector approx_inverse(const HoloVector& a) {
  HoloVector out(a.size());
  const std::size_t n = a.size();
  for (std::size_t k = 0; k < n; ++k) out[k] = a[(n - k) % n];
  return out;
}

/// Cosine similarity; 0 when either input is (numerically) zero.
inline double cosine(const HoloVector& a, const HoloVector& b) {
  a.require_same_size(b, "cosine");
  const double na = a.norm();
  const double nb = b.norm();
  if (na < kDegenerateNorm || nb < kDegenerateNorm) return 0.0;
  return a.dot(b) / (na * nb);
}

inline HoloVector normalize(HoloVector a) {
  const double len = a.norm();
  if (len < kDegenerateNorm) return a;
  return a *= 1.0 / len;
}

inline HoloVector permute(const HoloVector& a, const Permutation& p, bool inverse = false) {
  if (p.size() != a.size()) {
    throw Error(Errc::invalid_argument, "permute: permutation size " + std::to_string(p.size()) +
                                            " does not match dimension " + std::to_string(a.size()));
  }
  const auto map = inverse ? p.inverse_map() : p.map();
  HoloVector out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[map[i]];
  return out;
}

/// Projects every Fourier coefficient onto the unit circle, keeping phases.
inline HoloVector make_unitary(const HoloVector& a) {
  auto spectrum = fft::forward(a.elements());
  for (auto& c : spectrum) {
    const double mag = std::abs(c);
    if (mag < kDegenerateNorm) {
      throw Error(Errc::degenerate_spectrum, "Fourier coefficient magnitude below 1e-12");
    }
    c /= mag;
  }
  return HoloVector(fft::inverse_real(spectrum));
}

inline bool is_unitary(const HoloVector& a, double tolerance = 1e-8) {
  const auto spectrum = fft::forward(a.elements());
  return std::all_of(spectrum.begin(), spectrum.end(),
                     [&](const fft::Complex& c) { return std::abs(std::abs(c) - 1.0) <= tolerance; });
}

/// Principal-branch phase angles of the spectrum of a unitary vector.
inline std::vector<double> unitary_phases(const HoloVector& base) {
  const auto spectrum = fft::forward(base.elements());
  std::vector<double> phases(spectrum.size());
  for (std::size_t k = 0; k < spectrum.size(); ++k) {
    if (std::abs(std::abs(spectrum[k]) - 1.0) > 1e-8) {
      throw Error(Errc::invalid_argument, "fractional power requires a unitary base");
    }
    // Real bins take a canonical 0 or pi so that -pi and pi agree.
    const bool real_bin = k == 0 || 2 * k == spectrum.size();
    phases[k] = real_bin ? (spectrum[k].real() >= 0.0 ? 0.0 : std::numbers::pi) : std::arg(spectrum[k]);
  }
  return phases;
}

/// Real vector whose spectrum is exp(i * phases). Bins whose phase breaks
/// conjugate symmetry (a negative DC or Nyquist coefficient raised to a
/// non-integer power) contribute only their real part.
inline HoloVector from_phases(std::span<const double> phases) {
  std::vector<fft::Complex> spectrum(phases.size());
  for (std::size_t k = 0; k < phases.size(); ++k) spectrum[k] = std::polar(1.0, phases[k]);
  return HoloVector(fft::inverse_real(spectrum));
}

/// base^x for a unitary base: every Fourier phase is scaled by x.
inline HoloVector fractional_power(const HoloVector& base, double x) {
  auto phases = unitary_phases(base);
  for (double& ph : phases) ph *= x;
  return from_phases(phases);
}

}  // namespace holomem
