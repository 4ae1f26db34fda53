#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

namespace npf {

/// Mixes a 64-bit value with the SplitMix64 finaliser.
std::uint64_t mix64(std::uint64_t x) noexcept;

/// Seedable random stream. Every consumer receives one explicitly; there is
/// no global generator. Child streams are derived from the seed and a key
/// path, never from the parent's consumption state, so a parallel map can
/// hand each index its own stream and stay independent of scheduling.
class Rng {
 public:
  explicit Rng(std::uint64_t seed);

  std::uint64_t seed() const noexcept { return seed_; }

  /// Stream keyed by (seed, key). Does not advance this stream.
  Rng child(std::uint64_t key) const;
  Rng child(std::initializer_list<std::uint64_t> keys) const;

  /// Uniform on [0, 1).
  double uniform();
  /// Uniform on (0, 1).
  double uniform_open();
  double uniform(double lo, double hi);
  double normal();
  /// Uniform integer in [0, n).
  std::size_t index(std::size_t n);
  std::uint64_t next_u64();

  std::mt19937_64& engine() noexcept { return engine_; }

 private:
  std::uint64_t seed_;
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_{0.0, 1.0};
};

}  // namespace npf
