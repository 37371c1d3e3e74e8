#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <exception>
#include <numbers>
#include <random>
#include <string>
#include <thread>
#include <vector>

#include "tubemeasure/vector.hpp"

namespace tubemeasure {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Sub-seed for stream `index` of a computation seeded with `seed`.
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) {
  return splitmix64(splitmix64(seed) ^ splitmix64(index + 0x632be59bd9b4e019ULL));
}

/// Uniform value in [0, 1) from a hash of (seed, index); used for synthetic
/// data that must be addressable without replaying a stream.
inline double hashed_unit(std::uint64_t seed, std::uint64_t index) {
  return static_cast<double>(derive_seed(seed, index) >> 11) * 0x1.0p-53;
}

/// Mersenne Twister with conversions fixed by this library rather than by
/// the standard library's distributions, so sequences are identical across
/// toolchains.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  std::uint64_t below(std::uint64_t n) { return n == 0 ? 0 : engine_() % n; }

  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double u1 = 0.0;
    do {
      u1 = uniform();
    } while (u1 <= 0.0);
    double u2 = uniform();
    double rad = std::sqrt(-2.0 * std::log(u1));
    spare_ = rad * std::sin(2.0 * std::numbers::pi * u2);
    has_spare_ = true;
    return rad * std::cos(2.0 * std::numbers::pi * u2);
  }

  Vector normal_vector(int dim) {
    Vector v(dim);
    for (int i = 0; i < dim; ++i) v[i] = normal();
    return v;
  }
  Direction direction(int dim) {
    for (;;) {
      Vector v = normal_vector(dim);
      if (norm(v) > 1e-12) return Direction(v);
    }
  }

 private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

/// Worker count from TUBEMEASURE_THREADS, else the hardware concurrency.
/// Never influences numeric results.
inline int default_thread_count() {
  if (const char* env = std::getenv("TUBEMEASURE_THREADS")) {
    int v = std::atoi(env);
    if (v >= 1) return std::min(v, 256);
  }
  return static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
}

inline constexpr std::size_t kBatchSize = 8192;

/// Runs `body(batch_index, batch_seed, batch_count)` for every batch of a
/// `total`-sample job and returns the per-batch results in batch order.
/// Batch seeds depend only on (seed, batch index), so the result is the
/// same for any thread count.
template <typename Result, typename Body>
std::vector<Result> run_batches(std::size_t total, std::uint64_t seed, Body body, int threads = 0) {
  std::size_t batches = (total + kBatchSize - 1) / kBatchSize;
  std::vector<Result> results(batches);
  std::vector<std::exception_ptr> errors(batches);
  auto run_one = [&](std::size_t b) {
    std::size_t count = std::min(kBatchSize, total - b * kBatchSize);
    try {
      results[b] = body(b, derive_seed(seed, b), count);
    } catch (...) {
      errors[b] = std::current_exception();
    }
  };
  auto rethrow_first = [&] {
    for (auto& e : errors)
      if (e) std::rethrow_exception(e);
  };
  int workers = threads > 0 ? threads : default_thread_count();
  workers = static_cast<int>(std::min<std::size_t>(static_cast<std::size_t>(workers), batches));
  if (workers <= 1) {
    for (std::size_t b = 0; b < batches; ++b) run_one(b);
    rethrow_first();
    return results;
  }
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(workers));
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      for (std::size_t b = static_cast<std::size_t>(w); b < batches; b += static_cast<std::size_t>(workers))
        run_one(b);
    });
  }
  for (auto& t : pool) t.join();
  rethrow_first();
  return results;
}

}  // namespace tubemeasure
