#pragma once

// Seeded sample generation and a small deterministic parallel map.

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <exception>
#include <random>
#include <thread>
#include <vector>

#include "smoothnorm/spaces.hpp"

namespace smoothnorm {

using Rng = std::mt19937_64;

/// splitmix64 finaliser; used to derive independent per-sample streams.
constexpr std::uint64_t mix_seed(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

constexpr std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream, std::uint64_t index) {
  return mix_seed(mix_seed(mix_seed(seed) ^ stream) ^ index);
}

/// Rng for sample `index` of stream `stream`; independent of worker count.
inline Rng sample_rng(std::uint64_t seed, std::uint64_t stream, std::uint64_t index) {
  return Rng(derive_seed(seed, stream, index));
}

Vector gaussian_vector(Rng& rng, std::size_t dim);

/// Gaussian direction rescaled to space norm 1.
Vector sphere_sample(const ModelSpace& space, Rng& rng);

std::vector<Vector> sphere_samples(const ModelSpace& space, std::size_t count, std::uint64_t seed,
                                   std::uint64_t stream = 0);

/// Applies fn(i) for i in [0, n) on `workers` threads; results land at index i,
/// so the output does not depend on the worker count.
template <class T, class Fn>
std::vector<T> parallel_map(std::size_t n, std::size_t workers, Fn&& fn) {
  std::vector<T> out(n);
  workers = std::max<std::size_t>(1, std::min(workers, n));
  if (workers == 1) {
    for (std::size_t i = 0; i < n; ++i) out[i] = fn(i);
    return out;
  }
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> errors(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      try {
        for (std::size_t i = w; i < n; i += workers) out[i] = fn(i);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
  return out;
}

}  // namespace smoothnorm
