#pragma once

// Seeded random streams. Every Monte Carlo routine takes an explicit seed and
// splits work into fixed-size chunks, each with its own stream derived from
// (seed, chunk index). Output therefore does not depend on how many worker
// threads process the chunks.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <random>

namespace heis {

std::uint64_t splitmix64(std::uint64_t x) noexcept;

/// Derives an independent stream seed from a base seed and a stream index.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) noexcept;

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  /// Uniform on [0, 1) with 53 random bits.
  double uniform() noexcept { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) noexcept { return lo + (hi - lo) * uniform(); }
  double normal() noexcept;
  std::uint64_t bits() noexcept { return engine_(); }

 private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

/// Default worker count: HEIS_WORKERS if set and positive, else 1.
int default_workers();

/// Runs body(chunk) for chunk in [0, chunks) on up to `workers` threads.
void parallel_chunks(std::size_t chunks, int workers,
                     const std::function<void(std::size_t)>& body);

}  // namespace heis
