#pragma once

// Figure data as CSV: a 2-D principal-component projection of token
// vectors and the lag profile of the time-code self-similarity.

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <utility>
#include <vector>

#include "holomem/error.hpp"
#include "holomem/hrr.hpp"
#include "holomem/random.hpp"
#include "holomem/store.hpp"
#include "holomem/time_codes.hpp"

namespace holomem {

/// 9 significant digits; negative zero printed as 0.
inline std::string format_real(double x) {
  if (x == 0.0) x = 0.0;
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.9g", x);
  return buf;
}

struct ProjectedPoint {
  std::string token;
  double x = 0.0;
  double y = 0.0;
};

struct Projection2D {
  std::vector<ProjectedPoint> rows;
  std::vector<double> c1;
  std::vector<double> c2;
  double variance1 = 0.0;
  double variance2 = 0.0;
  std::size_t iterations = 0;
};

struct PcaOptions {
  double tolerance = 1e-9;
  std::size_t max_iterations = 10000;
  std::uint64_t seed = 1;
};

namespace detail {

inline double dot(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

inline double unit(std::vector<double>& v) {
  const double len = std::sqrt(dot(v, v));
  if (len > 0.0) {
    for (double& x : v) x /= len;
  }
  return len;
}

inline void project_out(std::vector<double>& v, const std::vector<double>& dir) {
  const double d = dot(v, dir);
  for (std::size_t i = 0; i < v.size(); ++i) v[i] -= d * dir[i];
}

}  // namespace detail

/// Top two principal components by power iteration with deflation, applied
/// to the centered data matrix X as v <- X^T X v. Component signs are fixed
/// so the largest-magnitude coordinate on each axis is positive.
inline Projection2D pca_2d(const std::vector<std::pair<std::string, HoloVector>>& vectors, const PcaOptions& opts = {}) {
  if (vectors.size() < 3) throw Error(Errc::insufficient_data, "PCA needs at least 3 vectors");
  const std::size_t n = vectors.front().second.size();
  if (n < 2) throw Error(Errc::invalid_dimension, "PCA needs dimension >= 2");
  for (const auto& [tok, v] : vectors) {
    if (v.size() != n) throw Error(Errc::invalid_argument, "PCA inputs differ in dimension");
  }

  const std::size_t count = vectors.size();
  std::vector<double> mean(n, 0.0);
  for (const auto& [tok, v] : vectors) {
    for (std::size_t i = 0; i < n; ++i) mean[i] += v[i];
  }
  for (double& m : mean) m /= static_cast<double>(count);
  std::vector<std::vector<double>> centered(count, std::vector<double>(n));
  for (std::size_t r = 0; r < count; ++r) {
    for (std::size_t i = 0; i < n; ++i) centered[r][i] = vectors[r].second[i] - mean[i];
  }

  auto apply = [&](const std::vector<double>& v) {
    std::vector<double> out(n, 0.0);
    for (const auto& row : centered) {
      const double s = detail::dot(row, v);
      for (std::size_t i = 0; i < n; ++i) out[i] += s * row[i];
    }
    return out;
  };

  Projection2D proj;
  Rng rng(stream_key("pca-start", opts.seed));
  std::vector<std::vector<double>> comps;
  std::vector<double> variances;

  for (std::size_t c = 0; c < 2; ++c) {
    std::vector<double> v(n);
    for (double& x : v) x = rng.normal();
    for (const auto& prev : comps) detail::project_out(v, prev);
    detail::unit(v);

    double eigen = 0.0;
    bool converged = false;
    for (std::size_t it = 1; it <= opts.max_iterations; ++it) {
      auto w = apply(v);
      for (const auto& prev : comps) detail::project_out(w, prev);
      eigen = detail::unit(w);
      proj.iterations = std::max(proj.iterations, it);
      if (eigen <= 1e-300) {
        // No variance left in this subspace; any unit direction will do.
        eigen = 0.0;
        converged = true;
        break;
      }
      if (detail::dot(w, v) < 0.0) {
        for (double& x : w) x = -x;
      }
      double diff = 0.0;
      for (std::size_t i = 0; i < n; ++i) diff = std::max(diff, std::abs(w[i] - v[i]));
      v = std::move(w);
      if (diff < opts.tolerance) {
        converged = true;
        break;
      }
    }
    if (!converged) {
      throw Error(Errc::convergence, "power iteration did not converge within " +
                                         std::to_string(opts.max_iterations) + " iterations");
    }
    for (const auto& prev : comps) detail::project_out(v, prev);
    detail::unit(v);
    comps.push_back(std::move(v));
    variances.push_back(eigen / static_cast<double>(count));
  }

  std::vector<std::vector<double>> coords(2, std::vector<double>(count));
  for (std::size_t c = 0; c < 2; ++c) {
    std::size_t arg = 0;
    for (std::size_t r = 0; r < count; ++r) {
      coords[c][r] = detail::dot(centered[r], comps[c]);
      if (std::abs(coords[c][r]) > std::abs(coords[c][arg])) arg = r;
    }
    if (coords[c][arg] < 0.0) {
      for (double& x : coords[c]) x = -x;
      for (double& x : comps[c]) x = -x;
    }
  }

  for (std::size_t r = 0; r < count; ++r) proj.rows.push_back({vectors[r].first, coords[0][r], coords[1][r]});
  proj.c1 = std::move(comps[0]);
  proj.c2 = std::move(comps[1]);
  proj.variance1 = variances[0];
  proj.variance2 = variances[1];
  return proj;
}

enum class VectorKind { memory, environment };

/// (token, vector) for every lexicon entry, in lexicon order.
inline std::vector<std::pair<std::string, HoloVector>> token_vectors(const HdmStore& store, VectorKind kind) {
  std::vector<std::pair<std::string, HoloVector>> out;
  for (const auto& [token, entry] : store.lexicon()) {
    out.emplace_back(token, kind == VectorKind::memory ? entry.m : entry.e);
  }
  return out;
}

namespace detail {

inline std::ofstream open_csv(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(Errc::io, "cannot write " + path.string());
  return out;
}

inline void finish_csv(std::ofstream& out, const std::filesystem::path& path) {
  out.flush();
  if (!out) throw Error(Errc::io, "write failed for " + path.string());
}

}  // namespace detail

inline void write_projection_csv(const Projection2D& proj, const std::filesystem::path& path) {
  auto out = detail::open_csv(path);
  out << "token,x,y\n";
  for (const auto& row : proj.rows) out << row.token << ',' << format_real(row.x) << ',' << format_real(row.y) << '\n';
  detail::finish_csv(out, path);
}

/// Lag profile ("lag,similarity", t_max rows) and the full matrix
/// ("t1,t2,similarity", t_max^2 rows).
inline void export_self_similarity(const OscillatorBank& bank, std::int64_t t_max, const std::filesystem::path& lag_path,
                                   const std::filesystem::path& matrix_path) {
  const auto matrix = self_similarity(bank, t_max);
  const auto curve = lag_profile(matrix);

  auto lag = detail::open_csv(lag_path);
  lag << "lag,similarity\n";
  for (std::size_t l = 0; l < curve.size(); ++l) lag << l << ',' << format_real(curve[l]) << '\n';
  detail::finish_csv(lag, lag_path);

  auto full = detail::open_csv(matrix_path);
  full << "t1,t2,similarity\n";
  for (std::size_t a = 0; a < matrix.size(); ++a) {
    for (std::size_t b = 0; b < matrix.size(); ++b) {
      full << (a + 1) << ',' << (b + 1) << ',' << format_real(matrix[a][b]) << '\n';
    }
  }
  detail::finish_csv(full, matrix_path);
}

/// Indices L in [first, curve.size() - 1) with curve[L-1] < curve[L] > curve[L+1].
inline std::vector<std::size_t> interior_maxima(const std::vector<double>& curve, std::size_t first = 1) {
  std::vector<std::size_t> out;
  for (std::size_t l = std::max<std::size_t>(first, 1); l + 1 < curve.size(); ++l) {
    if (curve[l] > curve[l - 1] && curve[l] > curve[l + 1]) out.push_back(l);
  }
  return out;
}

}  // namespace holomem
