#pragma once

#include <cstdint>
#include <utility>
#include <vector>

namespace mpnet {

/// Park-Miller "minimal standard" generator. The whole stream is a pure
/// function of the 31-bit state, so a worker's draws can be replayed on the
/// coordinator from nothing more than the seed.
class Rng {
public:
  static constexpr std::uint32_t kModulus = 2147483647u;  // 2^31 - 1
  static constexpr std::uint32_t kMultiplier = 16807u;

  /// Throws std::invalid_argument for seeds outside [1, 2^31 - 2].
  explicit Rng(std::uint32_t seed);

  std::uint32_t state() const { return state_; }

  /// One step of the recurrence; result is strictly inside (0, 1).
  double uniform();

  /// Box-Muller: two consecutive uniforms -> two independent N(0,1) values.
  std::pair<double, double> gaussian_pair();

  /// Fills consecutive entries pairwise; an odd count drops the last value of
  /// the final pair.
  std::vector<double> fill_gaussian(std::size_t count);

private:
  std::uint32_t state_;
};

/// Box-Muller transform on explicitly supplied uniforms.
std::pair<double, double> box_muller(double u1, double u2);

/// Maps an arbitrary 64-bit value onto a valid seed in [1, 2^31 - 2].
std::uint32_t to_seed(std::uint64_t value);

/// splitmix64 finalizer.
std::uint64_t mix64(std::uint64_t x);

}  // namespace mpnet
