#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "holomem/analysis.hpp"
#include "holomem/time_codes.hpp"
#include "oracles.hpp"

using namespace holomem;

namespace {

std::vector<std::pair<std::string, HoloVector>> three_clusters() {
  std::vector<std::pair<std::string, HoloVector>> out;
  std::mt19937_64 gen(8);
  for (int c = 0; c < 3; ++c) {
    const auto center = random_vector("center" + std::to_string(c), 1, 1024);
    for (int k = 0; k < 10; ++k) {
      auto noise = oracle::gaussian(gen, 1024, 0.3 / std::sqrt(1024.0));
      HoloVector v = center;
      v += HoloVector(noise);
      out.emplace_back("c" + std::to_string(c) + "_" + std::to_string(k), std::move(v));
    }
  }
  return out;
}

std::size_t count_lines(const std::string& s) {
  std::size_t n = 0;
  for (char c : s) n += c == '\n';
  return n;
}

}  // namespace

TEST(Pca, SeparatesClusters) {
  const auto data = three_clusters();
  const auto proj = pca_2d(data);
  ASSERT_EQ(proj.rows.size(), 30u);
  double within = 0.0;
  double between = 0.0;
  int nw = 0;
  int nb = 0;
  for (std::size_t a = 0; a < 30; ++a) {
    for (std::size_t b = a + 1; b < 30; ++b) {
      const double d = std::hypot(proj.rows[a].x - proj.rows[b].x, proj.rows[a].y - proj.rows[b].y);
      if (a / 10 == b / 10) {
        within += d;
        ++nw;
      } else {
        between += d;
        ++nb;
      }
    }
  }
  EXPECT_LT(within / nw, between / nb);
  EXPECT_GE(proj.variance1, proj.variance2);
}

TEST(Pca, ComponentsAreOrthonormalEigenvectors) {
  const auto data = three_clusters();
  const auto proj = pca_2d(data);
  EXPECT_NEAR(oracle::dot(proj.c1, proj.c1), 1.0, 1e-9);
  EXPECT_NEAR(oracle::dot(proj.c2, proj.c2), 1.0, 1e-9);
  EXPECT_NEAR(oracle::dot(proj.c1, proj.c2), 0.0, 1e-9);
  // Variance of the projected coordinates equals the reported eigenvalue.
  double mx = 0.0;
  for (const auto& r : proj.rows) mx += r.x;
  mx /= 30.0;
  double var = 0.0;
  for (const auto& r : proj.rows) var += (r.x - mx) * (r.x - mx);
  EXPECT_NEAR(var / 30.0, proj.variance1, 1e-6 * proj.variance1);
}

TEST(Pca, IdenticalVectorsCollapse) {
  const auto v = random_vector("same", 1, 64);
  const auto proj = pca_2d({{"a", v}, {"b", v}, {"c", v}});
  EXPECT_EQ(proj.variance2, 0.0);
  for (const auto& r : proj.rows) {
    EXPECT_NEAR(r.x, 0.0, 1e-12);
    EXPECT_NEAR(r.y, 0.0, 1e-12);
  }
}

TEST(Pca, TooFewVectors) {
  const auto v = random_vector("v", 1, 8);
  try {
    pca_2d({{"a", v}, {"b", v}});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::insufficient_data);
  }
}

TEST(Pca, CsvIsDeterministic) {
  oracle::TempDir dir("pca");
  const auto data = three_clusters();
  write_projection_csv(pca_2d(data), dir / "a.csv");
  write_projection_csv(pca_2d(data), dir / "b.csv");
  const auto a = oracle::slurp(dir / "a.csv");
  EXPECT_EQ(a, oracle::slurp(dir / "b.csv"));
  EXPECT_EQ(a.substr(0, 10), "token,x,y\n");
  EXPECT_EQ(count_lines(a), 31u);
}

TEST(SelfSimilarityExport, LagFile) {
  oracle::TempDir dir("sim");
  const auto bank = sample_bank(OscillatorParams{}, 1);
  export_self_similarity(bank, 30, dir / "lag.csv", dir / "matrix.csv");
  const auto lag = oracle::slurp(dir / "lag.csv");
  EXPECT_EQ(count_lines(lag), 31u);
  EXPECT_EQ(lag.substr(0, 21), "lag,similarity\n0,1\n1,");
  EXPECT_EQ(count_lines(oracle::slurp(dir / "matrix.csv")), 901u);
}

TEST(SelfSimilarityExport, IndividualBanksShowBumps) {
  int with_bump = 0;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const auto curve = lag_profile(self_similarity(sample_bank(OscillatorParams{}, seed), 30));
    with_bump += !interior_maxima(curve, 3).empty();
  }
  EXPECT_GE(with_bump, 1);
}

TEST(InteriorMaxima, HandExample) {
  EXPECT_EQ(interior_maxima({1.0, 0.5, 0.7, 0.6, 0.8, 0.2}), (std::vector<std::size_t>{2, 4}));
  EXPECT_EQ(interior_maxima({1.0, 0.5, 0.7, 0.6}, 3), std::vector<std::size_t>{});
}

TEST(FormatReal, NegativeZero) {
  EXPECT_EQ(format_real(-0.0), "0");
  EXPECT_EQ(format_real(0.25), "0.25");
}
