#pragma once

// Oscillator-based time codes. Fifteen noisy sinusoidal oscillators with
// frequencies spread over powers of two; each of the 320 time-vector
// elements multiplies four oscillators drawn with a bias toward the slow
// ones.

#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numbers>
#include <string>
#include <vector>

#include "holomem/error.hpp"
#include "holomem/hrr.hpp"
#include "holomem/random.hpp"

namespace holomem {

inline constexpr std::size_t kOscillatorCount = 15;
inline constexpr std::size_t kTimeVectorSize = 320;
inline constexpr std::size_t kDrawsPerElement = 4;
inline constexpr double kMinFrequency = 1e-12;

struct OscillatorParams {
  double time_scale = 1e-5;   ///< S
  double sigma2 = 1.0;        ///< variance of the frequency noise R
  double beta = 5.125;        ///< scale of the oscillator selection distribution
  bool recenter = false;      ///< draw R ~ N(1, sigma2) instead of N(0, sigma2)

  friend bool operator==(const OscillatorParams&, const OscillatorParams&) = default;
};

enum class Trig : std::uint8_t { sine = 0, cosine = 1 };

using OscillatorDraw = std::array<std::uint8_t, kDrawsPerElement>;
using TrigDraw = std::array<Trig, kDrawsPerElement>;

/// Immutable after construction.
class OscillatorBank {
 public:
  OscillatorBank(OscillatorParams params, std::array<double, kOscillatorCount> thetas,
                 std::array<double, kOscillatorCount> phis, std::vector<OscillatorDraw> selection,
                 std::vector<TrigDraw> trig)
      : params_(params),
        thetas_(thetas),
        phis_(phis),
        selection_(std::move(selection)),
        trig_(std::move(trig)) {
    if (selection_.size() != kTimeVectorSize || trig_.size() != kTimeVectorSize) {
      throw Error(Errc::invalid_parameter, "oscillator bank tables must have 320 rows");
    }
    for (const auto& row : selection_) {
      for (auto idx : row) {
        if (idx >= kOscillatorCount) throw Error(Errc::invalid_parameter, "oscillator index out of range");
      }
    }
  }

  const OscillatorParams& params() const noexcept { return params_; }
  const std::array<double, kOscillatorCount>& thetas() const noexcept { return thetas_; }
  const std::array<double, kOscillatorCount>& phis() const noexcept { return phis_; }
  const std::vector<OscillatorDraw>& selection_table() const noexcept { return selection_; }
  const std::vector<TrigDraw>& trig_table() const noexcept { return trig_; }

  /// All frequencies are exactly zero, so every time vector is the same.
  bool degenerate_constant() const noexcept {
    for (double th : thetas_) {
      if (th != 0.0) return false;
    }
    return true;
  }

  friend bool operator==(const OscillatorBank&, const OscillatorBank&) = default;

 private:
  OscillatorParams params_;
  std::array<double, kOscillatorCount> thetas_;
  std::array<double, kOscillatorCount> phis_;
  std::vector<OscillatorDraw> selection_;
  std::vector<TrigDraw> trig_;
};

/// p(j) = exp(-j/beta) / sum_k exp(-k/beta) for j in 0..14.
inline std::array<double, kOscillatorCount> selection_probabilities(double beta) {
  if (!(beta > 0.0)) throw Error(Errc::invalid_parameter, "beta must be positive");
  std::array<double, kOscillatorCount> p{};
  double total = 0.0;
  for (std::size_t j = 0; j < kOscillatorCount; ++j) {
    p[j] = std::exp(-static_cast<double>(j) / beta);
    total += p[j];
  }
  for (double& x : p) x /= total;
  return p;
}

/// Four i.i.d. oscillator indices from the truncated, discretized exponential.
inline OscillatorDraw sample_indices(double beta, Rng& rng) {
  const auto p = selection_probabilities(beta);
  OscillatorDraw out{};
  for (auto& idx : out) {
    const double u = rng.uniform();
    double acc = 0.0;
    std::size_t j = 0;
    for (; j + 1 < kOscillatorCount; ++j) {
      acc += p[j];
      if (u < acc) break;
    }
    idx = static_cast<std::uint8_t>(j);
  }
  return out;
}

inline OscillatorBank sample_bank(const OscillatorParams& params, std::uint64_t seed) {
  if (!(params.time_scale > 0.0)) throw Error(Errc::invalid_parameter, "time scale S must be positive");
  if (!(params.sigma2 >= 0.0)) throw Error(Errc::invalid_parameter, "sigma2 must be non-negative");
  if (!(params.beta > 0.0)) throw Error(Errc::invalid_parameter, "beta must be positive");

  Rng rng(stream_key("oscillator-bank", seed));
  const double sd = std::sqrt(params.sigma2);
  const double mean = params.recenter ? 1.0 : 0.0;

  std::array<double, kOscillatorCount> thetas{};
  std::array<double, kOscillatorCount> phis{};
  for (std::size_t i = 0; i < kOscillatorCount; ++i) {
    const double r = params.sigma2 == 0.0 ? mean : rng.normal(mean, sd);
    thetas[i] = params.time_scale * r * std::ldexp(1.0, static_cast<int>(i + 1));
  }
  for (std::size_t i = 0; i < kOscillatorCount; ++i) {
    const double range = std::numbers::pi / std::max(std::abs(thetas[i]), kMinFrequency);
    phis[i] = rng.uniform(0.0, range);
  }

  std::vector<OscillatorDraw> selection(kTimeVectorSize);
  std::vector<TrigDraw> trig(kTimeVectorSize);
  for (std::size_t row = 0; row < kTimeVectorSize; ++row) {
    selection[row] = sample_indices(params.beta, rng);
    for (auto& flag : trig[row]) flag = (rng() >> 63) ? Trig::cosine : Trig::sine;
  }
  return OscillatorBank(params, thetas, phis, std::move(selection), std::move(trig));
}

/// T(t): each element is the product of its four oscillator readings, then
/// the whole vector is scaled to unit norm.
inline std::vector<double> time_vector(const OscillatorBank& bank, std::int64_t t) {
  if (t < 1) throw Error(Errc::invalid_time, "time step must be >= 1, got " + std::to_string(t));
  const auto& thetas = bank.thetas();
  const auto& phis = bank.phis();
  std::array<double, kOscillatorCount> phase{};
  for (std::size_t j = 0; j < kOscillatorCount; ++j) phase[j] = phis[j] + static_cast<double>(t) * thetas[j];

  std::vector<double> out(kTimeVectorSize);
  double sq = 0.0;
  for (std::size_t i = 0; i < kTimeVectorSize; ++i) {
    double prod = 1.0;
    for (std::size_t d = 0; d < kDrawsPerElement; ++d) {
      const double ph = phase[bank.selection_table()[i][d]];
      prod *= bank.trig_table()[i][d] == Trig::cosine ? std::cos(ph) : std::sin(ph);
    }
    out[i] = prod;
    sq += prod * prod;
  }
  if (sq > 0.0) {
    const double inv = 1.0 / std::sqrt(sq);
    for (double& x : out) x *= inv;
  }
  return out;
}

/// M[a][b] = T(a+1) . T(b+1) for a, b in [0, t_max).
inline std::vector<std::vector<double>> self_similarity(const OscillatorBank& bank, std::int64_t t_max) {
  if (t_max < 2) throw Error(Errc::invalid_parameter, "t_max must be >= 2");
  std::vector<std::vector<double>> tv;
  tv.reserve(static_cast<std::size_t>(t_max));
  for (std::int64_t t = 1; t <= t_max; ++t) tv.push_back(time_vector(bank, t));

  const auto size = static_cast<std::size_t>(t_max);
  std::vector<std::vector<double>> m(size, std::vector<double>(size));
  for (std::size_t a = 0; a < size; ++a) {
    for (std::size_t b = a; b < size; ++b) {
      double dot = 0.0;
      for (std::size_t i = 0; i < kTimeVectorSize; ++i) dot += tv[a][i] * tv[b][i];
      m[a][b] = m[b][a] = dot;
    }
  }
  return m;
}

/// Mean of M over all pairs at each non-negative lag; entry L averages M[t][t+L].
inline std::vector<double> lag_profile(const std::vector<std::vector<double>>& matrix) {
  const std::size_t size = matrix.size();
  std::vector<double> curve(size, 0.0);
  for (std::size_t lag = 0; lag < size; ++lag) {
    double sum = 0.0;
    for (std::size_t t = 0; t + lag < size; ++t) sum += matrix[t][t + lag];
    curve[lag] = sum / static_cast<double>(size - lag);
  }
  return curve;
}

}  // namespace holomem
