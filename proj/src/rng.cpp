#include "mpnet/rng.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace mpnet {

Rng::Rng(std::uint32_t seed) : state_(seed) {
  if (seed == 0 || seed >= kModulus) {
    throw std::invalid_argument("rng seed must lie in [1, 2^31-2], got " + std::to_string(seed));
  }
}

double Rng::uniform() {
  state_ = static_cast<std::uint32_t>((static_cast<std::uint64_t>(state_) * kMultiplier) % kModulus);
  return static_cast<double>(state_) / static_cast<double>(kModulus);
}

std::pair<double, double> box_muller(double u1, double u2) {
  const double radius = std::sqrt(-2.0 * std::log(u1));
  const double angle = 2.0 * std::numbers::pi * u2;
  return {radius * std::cos(angle), radius * std::sin(angle)};
}

std::pair<double, double> Rng::gaussian_pair() {
  const double u1 = uniform();
  const double u2 = uniform();
  return box_muller(u1, u2);
}

std::vector<double> Rng::fill_gaussian(std::size_t count) {
  std::vector<double> values;
  values.reserve(count + 1);
  while (values.size() < count) {
    const auto [g0, g1] = gaussian_pair();
    values.push_back(g0);
    values.push_back(g1);
  }
  values.resize(count);
  return values;
}

std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

std::uint32_t to_seed(std::uint64_t value) {
  return static_cast<std::uint32_t>(value % (Rng::kModulus - 1)) + 1u;
}

}  // namespace mpnet
