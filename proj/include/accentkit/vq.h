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

// K-means quantization of feature frames into discrete unit sequences.

#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

namespace accentkit::vq {

// Row-major n x dim matrix.
struct Matrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> data;

  Matrix() = default;
  Matrix(std::size_t r, std::size_t c) : rows(r), cols(c), data(r * c, 0.0) {}

  std::span<double> row(std::size_t i) { return {data.data() + i * cols, cols}; }
  std::span<const double> row(std::size_t i) const { return {data.data() + i * cols, cols}; }
};

// File layout: u64 rows, u64 cols, u32 dtype (0 = f32), then rows*cols
// little-endian f32 values. All header fields little-endian.
Matrix read_matrix(const std::filesystem::path& path);
void write_matrix(const std::filesystem::path& path, const Matrix& m);

struct KMeansOptions {
  std::size_t k = 500;
  int max_iters = 100;
  std::uint64_t seed = 0;
  int threads = 0;  // 0 = hardware concurrency
};

struct Codebook {
  std::size_t k = 0;
  std::size_t dim = 0;
  Matrix centroids;
  double train_distortion = 0.0;        // mean squared distance
  std::vector<double> distortion_history;  // one entry per assignment step
  int iterations = 0;
  bool converged = false;
};

Codebook fit_kmeans(const Matrix& frames, const KMeansOptions& opts);
Codebook codebook_from_centroids(Matrix centroids);

double squared_distance(std::span<const double> a, std::span<const double> b);

// Nearest centroid per frame; ties go to the lowest id.
std::vector<int> quantize(const Codebook& cb, const Matrix& frames);

std::vector<int> dedup(const std::vector<int>& tokens);

}  // namespace accentkit::vq
