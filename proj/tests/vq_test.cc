// Copyright 2026 The accentkit Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "accentkit/vq.h"

#include <gtest/gtest.h>

#include <cmath>
#include <array>
#include <limits>
#include <numeric>
#include <random>

#include "accentkit/error.h"
#include "test_util.h"

namespace accentkit::vq {
namespace {

Matrix random_frames(std::mt19937_64& rng, std::size_t n, std::size_t dim) {
  std::normal_distribution<double> g(0.0, 1.0);
  Matrix m(n, dim);
  for (auto& v : m.data) v = g(rng);
  return m;
}

// Rounding in the mean update can move the distortion by a few ulps.
bool non_increasing(const std::vector<double>& h) {
  for (std::size_t i = 1; i < h.size(); ++i) {
    if (h[i] > h[i - 1] * (1.0 + 1e-12) + 1e-300) return false;
  }
  return true;
}

TEST(DedupTest, Examples) {
  EXPECT_EQ(dedup({5, 5, 3, 3, 3, 5}), (std::vector<int>{5, 3, 5}));
  EXPECT_EQ(dedup({}), std::vector<int>{});
  EXPECT_EQ(dedup({1}), std::vector<int>{1});
}

TEST(DedupProperty, IdempotentNeverLongerNoAdjacentRepeats) {
  std::mt19937_64 rng(1);
  for (int trial = 0; trial < 500; ++trial) {
    std::vector<int> x(rng() % 40);
    for (auto& t : x) t = static_cast<int>(rng() % 4);
    auto d = dedup(x);
    EXPECT_LE(d.size(), x.size());
    EXPECT_EQ(dedup(d), d);
    for (std::size_t i = 1; i < d.size(); ++i) EXPECT_NE(d[i], d[i - 1]);
  }
}

TEST(KMeansTest, SingleClusterIsMean) {
  std::mt19937_64 rng(2);
  Matrix f = random_frames(rng, 200, 5);
  auto cb = fit_kmeans(f, {1, 100, 7, 1});
  double var = 0.0;
  for (std::size_t d = 0; d < 5; ++d) {
    double mean = 0.0;
    for (std::size_t i = 0; i < 200; ++i) mean += f.row(i)[d];
    mean /= 200.0;
    EXPECT_NEAR(cb.centroids.row(0)[d], mean, 1e-9);
    for (std::size_t i = 0; i < 200; ++i) var += (f.row(i)[d] - mean) * (f.row(i)[d] - mean);
  }
  EXPECT_NEAR(cb.train_distortion, var / 200.0, 1e-9);
}

TEST(KMeansTest, ExactFitWhenNEqualsK) {
  std::mt19937_64 rng(3);
  Matrix f = random_frames(rng, 12, 3);
  auto cb = fit_kmeans(f, {12, 100, 0, 1});
  EXPECT_EQ(cb.train_distortion, 0.0);
  auto q = quantize(cb, f);
  std::vector<int> sorted = q;
  std::sort(sorted.begin(), sorted.end());
  for (int i = 0; i < 12; ++i) EXPECT_EQ(sorted[static_cast<std::size_t>(i)], i);
}

TEST(KMeansTest, TwoBlobsMatchBruteForcePartition) {
  std::mt19937_64 rng(4);
  std::normal_distribution<double> g(0.0, 0.3);
  Matrix f(10, 2);
  for (std::size_t i = 0; i < 10; ++i) {
    f.row(i)[0] = (i < 5 ? -5.0 : 5.0) + g(rng);
    f.row(i)[1] = (i < 5 ? 1.0 : -2.0) + g(rng);
  }
  double best = std::numeric_limits<double>::infinity();
  std::array<std::array<double, 2>, 2> best_means{};
  for (unsigned mask = 1; mask < (1u << 10) - 1; ++mask) {
    std::array<std::array<double, 2>, 2> sum{};
    std::array<int, 2> cnt{};
    for (std::size_t i = 0; i < 10; ++i) {
      const int s = (mask >> i) & 1;
      sum[s][0] += f.row(i)[0];
      sum[s][1] += f.row(i)[1];
      ++cnt[s];
    }
    double cost = 0.0;
    for (std::size_t i = 0; i < 10; ++i) {
      const int s = (mask >> i) & 1;
      for (int d = 0; d < 2; ++d) {
        const double diff = f.row(i)[d] - sum[s][d] / cnt[s];
        cost += diff * diff;
      }
    }
    if (cost < best) {
      best = cost;
      for (int s = 0; s < 2; ++s) {
        best_means[s] = {sum[s][0] / cnt[s], sum[s][1] / cnt[s]};
      }
    }
  }
  auto cb = fit_kmeans(f, {2, 100, 11, 1});
  EXPECT_NEAR(cb.train_distortion, best / 10.0, 1e-12);
  for (std::size_t c = 0; c < 2; ++c) {
    const double d0 = std::hypot(cb.centroids.row(c)[0] - best_means[0][0],
                                 cb.centroids.row(c)[1] - best_means[0][1]);
    const double d1 = std::hypot(cb.centroids.row(c)[0] - best_means[1][0],
                                 cb.centroids.row(c)[1] - best_means[1][1]);
    EXPECT_LT(std::min(d0, d1), 1e-9);
  }
}

TEST(KMeansTest, Errors) {
  Matrix f(3, 2);
  EXPECT_THROW(fit_kmeans(f, {4, 10, 0, 1}), Error);
  EXPECT_THROW(fit_kmeans(f, {0, 10, 0, 1}), Error);
  f.data[1] = std::nan("");
  EXPECT_THROW(fit_kmeans(f, {2, 10, 0, 1}), Error);
}

TEST(KMeansProperty, DistortionNonIncreasingOnRandomInstances) {
  std::mt19937_64 rng(5);
  for (int inst = 0; inst < 100; ++inst) {
    const std::size_t n = 20 + rng() % 200;
    const std::size_t dim = 1 + rng() % 6;
    const std::size_t k = 1 + rng() % 12;
    Matrix f = random_frames(rng, n, dim);
    if (inst % 5 == 0) {
      for (std::size_t i = n / 2; i < n; ++i) {
        std::copy_n(f.row(0).begin(), dim, f.row(i).begin());
      }
    }
    auto cb = fit_kmeans(f, {k, 50, static_cast<std::uint64_t>(inst), 1});
    ASSERT_FALSE(cb.distortion_history.empty());
    EXPECT_TRUE(non_increasing(cb.distortion_history)) << "instance " << inst;
    EXPECT_EQ(cb.centroids.rows, k);
    for (double v : cb.centroids.data) EXPECT_TRUE(std::isfinite(v));
  }
}

TEST(KMeansProperty, SeededAndThreadIndependent) {
  std::mt19937_64 rng(6);
  Matrix f = random_frames(rng, 3000, 4);
  auto a = fit_kmeans(f, {16, 30, 99, 1});
  auto b = fit_kmeans(f, {16, 30, 99, 8});
  EXPECT_EQ(a.centroids.data, b.centroids.data);
  EXPECT_EQ(a.distortion_history, b.distortion_history);
}

TEST(KMeansTest, FiveHundredClustersShape) {
  std::mt19937_64 rng(7);
  Matrix f = random_frames(rng, 2000, 8);
  auto cb = fit_kmeans(f, {500, 100, 0, 0});
  EXPECT_EQ(cb.k, 500u);
  EXPECT_EQ(cb.centroids.rows, 500u);
  EXPECT_EQ(cb.centroids.cols, 8u);
  EXPECT_TRUE(non_increasing(cb.distortion_history));
}

TEST(QuantizeTest, ExactMatchTiesAndIdentity) {
  Matrix c(8, 2);
  for (std::size_t i = 0; i < 8; ++i) c.row(i)[0] = static_cast<double>(i) * 10.0;
  c.row(5)[0] = 20.0;
  c.row(5)[1] = 20.0;
  c.row(2)[0] = 0.0;
  c.row(2)[1] = 20.0;  // (0,20) and (20,20) both 10 away from (10,20)
  auto cb = codebook_from_centroids(c);

  Matrix probe(2, 2);
  probe.row(0)[0] = 70.0;
  probe.row(1)[0] = 10.0;
  probe.row(1)[1] = 20.0;
  EXPECT_EQ(quantize(cb, probe), (std::vector<int>{7, 2}));

  std::vector<int> ids(8);
  std::iota(ids.begin(), ids.end(), 0);
  EXPECT_EQ(quantize(cb, c), ids);
  EXPECT_THROW(quantize(cb, Matrix(1, 3)), Error);
}

TEST(MatrixFileTest, RoundTripAndCorruption) {
  testing::TempDir dir;
  Matrix m(3, 2);
  m.data = {1.5, -2.0, 0.25, 3.0, 1e6, -0.125};
  write_matrix(dir / "m.bin", m);
  auto back = read_matrix(dir / "m.bin");
  EXPECT_EQ(back.rows, 3u);
  EXPECT_EQ(back.cols, 2u);
  EXPECT_EQ(back.data, m.data);

  auto bytes = testing::slurp(dir / "m.bin");
  testing::spit(dir / "short.bin", bytes.substr(0, bytes.size() - 1));
  EXPECT_THROW(read_matrix(dir / "short.bin"), Error);
  EXPECT_THROW(read_matrix(dir / "absent.bin"), Error);
}

}  // namespace
}  // namespace accentkit::vq
