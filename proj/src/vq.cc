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

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <future>
#include <limits>
#include <random>
#include <thread>

#include "accentkit/error.h"

namespace accentkit::vq {
namespace {

static_assert(std::endian::native == std::endian::little, "little-endian host required");

constexpr std::uint32_t kDtypeF32 = 0;

template <typename T>
void put(std::string& out, T v) {
  char buf[sizeof(T)];
  std::memcpy(buf, &v, sizeof(T));
  out.append(buf, sizeof(T));
}

template <typename T>
T get(const std::string& in, std::size_t& pos) {
  if (pos + sizeof(T) > in.size()) throw Error(ErrorCategory::kParse, "matrix file truncated");
  T v;
  std::memcpy(&v, in.data() + pos, sizeof(T));
  pos += sizeof(T);
  return v;
}

void check_finite(const Matrix& m) {
  for (double v : m.data) {
    if (!std::isfinite(v)) throw Error(ErrorCategory::kInvalidArgument, "non-finite frame value");
  }
}

double unit_uniform(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

int resolve_threads(int requested) {
  if (requested > 0) return requested;
  return std::max(1u, std::thread::hardware_concurrency());
}

struct Assignment {
  std::vector<int> label;
  std::vector<double> dist;
};

void nearest(const Matrix& centroids, std::span<const double> x, int& label, double& dist) {
  label = 0;
  dist = std::numeric_limits<double>::infinity();
  for (std::size_t c = 0; c < centroids.rows; ++c) {
    const double d = squared_distance(x, centroids.row(c));
    if (d < dist) {
      dist = d;
      label = static_cast<int>(c);
    }
  }
}

// Each frame is independent, so chunking across threads gives the same result
// as the sequential loop.
Assignment assign(const Matrix& centroids, const Matrix& frames, int threads) {
  Assignment a;
  a.label.resize(frames.rows);
  a.dist.resize(frames.rows);
  auto work = [&](std::size_t lo, std::size_t hi) {
    for (std::size_t i = lo; i < hi; ++i) nearest(centroids, frames.row(i), a.label[i], a.dist[i]);
  };
  const std::size_t n = frames.rows;
  const std::size_t t = std::min<std::size_t>(static_cast<std::size_t>(threads),
                                              std::max<std::size_t>(1, n / 256));
  if (t <= 1) {
    work(0, n);
    return a;
  }
  std::vector<std::future<void>> jobs;
  const std::size_t chunk = (n + t - 1) / t;
  for (std::size_t lo = 0; lo < n; lo += chunk) {
    jobs.push_back(std::async(std::launch::async, work, lo, std::min(n, lo + chunk)));
  }
  for (auto& j : jobs) j.get();
  return a;
}

double mean_of(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return v.empty() ? 0.0 : s / static_cast<double>(v.size());
}

Matrix seed_plus_plus(const Matrix& frames, std::size_t k, std::mt19937_64& rng) {
  const std::size_t n = frames.rows;
  Matrix c(k, frames.cols);
  std::vector<double> d2(n, std::numeric_limits<double>::infinity());
  std::vector<bool> taken(n, false);
  auto take = [&](std::size_t idx, std::size_t slot) {
    taken[idx] = true;
    std::copy_n(frames.row(idx).begin(), frames.cols, c.row(slot).begin());
    for (std::size_t i = 0; i < n; ++i) {
      d2[i] = std::min(d2[i], squared_distance(frames.row(i), c.row(slot)));
    }
  };
  take(static_cast<std::size_t>(unit_uniform(rng) * static_cast<double>(n)), 0);
  for (std::size_t s = 1; s < k; ++s) {
    double total = 0.0;
    for (double d : d2) total += d;
    std::size_t pick = n;
    if (total > 0.0) {
      const double r = unit_uniform(rng) * total;
      double acc = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        acc += d2[i];
        if (d2[i] > 0.0 && acc > r) {
          pick = i;
          break;
        }
      }
      if (pick == n) {
        for (std::size_t i = n; i-- > 0;) {
          if (d2[i] > 0.0) {
            pick = i;
            break;
          }
        }
      }
    } else {
      // Fewer distinct frames than clusters: duplicate an unused frame.
      std::vector<std::size_t> free;
      for (std::size_t i = 0; i < n; ++i) {
        if (!taken[i]) free.push_back(i);
      }
      pick = free[static_cast<std::size_t>(unit_uniform(rng) * static_cast<double>(free.size()))];
    }
    take(pick, s);
  }
  return c;
}

}  // namespace

double squared_distance(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    s += d * d;
  }
  return s;
}

Matrix read_matrix(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCategory::kIo, "cannot read " + path.string());
  std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  std::size_t pos = 0;
  const auto rows = get<std::uint64_t>(bytes, pos);
  const auto cols = get<std::uint64_t>(bytes, pos);
  const auto dtype = get<std::uint32_t>(bytes, pos);
  if (dtype != kDtypeF32) throw Error(ErrorCategory::kParse, "unsupported matrix dtype");
  if (cols == 0 || rows > (bytes.size() - pos) / (4 * cols) ||
      bytes.size() - pos != rows * cols * 4) {
    throw Error(ErrorCategory::kParse, "matrix payload size mismatch in " + path.string());
  }
  Matrix m(rows, cols);
  for (auto& v : m.data) v = get<float>(bytes, pos);
  return m;
}

void write_matrix(const std::filesystem::path& path, const Matrix& m) {
  std::string out;
  out.reserve(20 + m.data.size() * 4);
  put<std::uint64_t>(out, m.rows);
  put<std::uint64_t>(out, m.cols);
  put<std::uint32_t>(out, kDtypeF32);
  for (double v : m.data) put<float>(out, static_cast<float>(v));
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f.write(out.data(), static_cast<std::streamsize>(out.size()))) {
    throw Error(ErrorCategory::kIo, "cannot write " + path.string());
  }
}

Codebook fit_kmeans(const Matrix& frames, const KMeansOptions& opts) {
  if (opts.k == 0) throw Error(ErrorCategory::kInvalidArgument, "k must be >= 1");
  if (frames.cols == 0) throw Error(ErrorCategory::kInvalidArgument, "zero-dimensional frames");
  if (frames.rows < opts.k) {
    throw Error(ErrorCategory::kInvalidArgument,
                "need at least k frames: n=" + std::to_string(frames.rows) +
                    " k=" + std::to_string(opts.k));
  }
  if (opts.max_iters < 1) throw Error(ErrorCategory::kInvalidArgument, "max_iters must be >= 1");
  check_finite(frames);

  const std::size_t n = frames.rows;
  const std::size_t dim = frames.cols;
  const std::size_t k = opts.k;
  const int threads = resolve_threads(opts.threads);
  std::mt19937_64 rng(opts.seed);

  Codebook cb;
  cb.k = k;
  cb.dim = dim;
  cb.centroids = seed_plus_plus(frames, k, rng);

  std::vector<int> prev;
  for (int iter = 0; iter < opts.max_iters; ++iter) {
    Assignment a = assign(cb.centroids, frames, threads);
    cb.distortion_history.push_back(mean_of(a.dist));
    cb.iterations = iter + 1;
    if (a.label == prev) {
      cb.converged = true;
      break;
    }

    Matrix sums(k, dim);
    std::vector<std::size_t> counts(k, 0);
    for (std::size_t i = 0; i < n; ++i) {
      auto dst = sums.row(static_cast<std::size_t>(a.label[i]));
      auto src = frames.row(i);
      for (std::size_t d = 0; d < dim; ++d) dst[d] += src[d];
      ++counts[static_cast<std::size_t>(a.label[i])];
    }
    std::vector<std::size_t> empty;
    for (std::size_t c = 0; c < k; ++c) {
      if (counts[c] == 0) {
        empty.push_back(c);
        continue;
      }
      auto dst = cb.centroids.row(c);
      auto src = sums.row(c);
      const double cnt = static_cast<double>(counts[c]);
      for (std::size_t d = 0; d < dim; ++d) dst[d] = src[d] / cnt;
    }
    if (!empty.empty()) {
      std::vector<double> cost(n);
      for (std::size_t i = 0; i < n; ++i) {
        cost[i] = squared_distance(frames.row(i),
                                   cb.centroids.row(static_cast<std::size_t>(a.label[i])));
      }
      for (std::size_t c : empty) {
        std::size_t far = 0;
        for (std::size_t i = 1; i < n; ++i) {
          if (cost[i] > cost[far]) far = i;
        }
        std::copy_n(frames.row(far).begin(), dim, cb.centroids.row(c).begin());
        cost[far] = -1.0;
      }
      // Any assignment change makes the next step run again.
      a.label.assign(n, -1);
    }
    prev = std::move(a.label);
  }
  if (!cb.converged) {
    cb.distortion_history.push_back(mean_of(assign(cb.centroids, frames, threads).dist));
  }
  cb.train_distortion = cb.distortion_history.back();
  return cb;
}

Codebook codebook_from_centroids(Matrix centroids) {
  if (centroids.rows == 0 || centroids.cols == 0) {
    throw Error(ErrorCategory::kInvalidArgument, "empty codebook");
  }
  check_finite(centroids);
  Codebook cb;
  cb.k = centroids.rows;
  cb.dim = centroids.cols;
  cb.centroids = std::move(centroids);
  return cb;
}

std::vector<int> quantize(const Codebook& cb, const Matrix& frames) {
  if (frames.rows > 0 && frames.cols != cb.dim) {
    throw Error(ErrorCategory::kInvalidArgument,
                "dimension mismatch: frames " + std::to_string(frames.cols) + ", codebook " +
                    std::to_string(cb.dim));
  }
  return assign(cb.centroids, frames, resolve_threads(0)).label;
}

std::vector<int> dedup(const std::vector<int>& tokens) {
  std::vector<int> out;
  std::unique_copy(tokens.begin(), tokens.end(), std::back_inserter(out));
  return out;
}

}  // namespace accentkit::vq
