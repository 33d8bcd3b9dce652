#pragma once

#include <cstdint>
#include <random>

namespace nic {

/// Derives a 64-bit engine seed from (master seed, stream id) with a
/// splitmix64 finalizer. Distinct ids give decorrelated seeds, so every
/// episode or grid point owns its stream regardless of thread scheduling.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream_id);

/// Deterministic random stream owned by exactly one worker.
class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed) : engine_(seed) {}
  RandomStream(std::uint64_t master, std::uint64_t stream_id)
      : engine_(derive_seed(master, stream_id)) {}

  std::uint64_t next() { return engine_(); }

  /// Uniform in [0,1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  /// Fair bit.
  std::uint8_t bit() { return static_cast<std::uint8_t>(engine_() >> 63); }

  /// 1 with probability p.
  std::uint8_t bernoulli(double p) { return uniform() < p ? 1 : 0; }

  /// Uniform integer in [0, n). Uses rejection to avoid modulo bias.
  std::uint64_t below(std::uint64_t n);

  /// Standard normal deviate.
  double normal() { return normal_(engine_); }

  std::mt19937_64& engine() { return engine_; }

 private:
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_{0.0, 1.0};
};

}  // namespace nic
