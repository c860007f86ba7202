#include <doctest.h>

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <unordered_set>

#include "mpnet/rng.hpp"

using namespace mpnet;

namespace {

// Straight recurrence with 64-bit intermediates, independent of the class.
std::uint64_t park_miller_after(std::uint64_t state, int draws) {
  for (int i = 0; i < draws; ++i) state = (state * 16807ull) % 2147483647ull;
  return state;
}

}  // namespace

TEST_CASE("uniform_next follows the minimal-standard recurrence") {
  Rng rng(1);
  const double u = rng.uniform();
  CHECK(rng.state() == 16807u);
  CHECK(u == 16807.0 / 2147483647.0);
  rng.uniform();
  CHECK(rng.state() == 282475249u);
}

TEST_CASE("10000 draws match the loop oracle") {
  Rng rng(1);
  for (int i = 0; i < 10000; ++i) {
    const double u = rng.uniform();
    REQUIRE(u > 0.0);
    REQUIRE(u < 1.0);
  }
  CHECK(rng.state() == park_miller_after(1, 10000));
  // Published check value of the minimal standard generator.
  CHECK(rng.state() == 1043618065u);
}

TEST_CASE("invalid seeds are rejected") {
  CHECK_THROWS_AS(Rng(0), std::invalid_argument);
  CHECK_THROWS_AS(Rng(2147483647u), std::invalid_argument);
  CHECK_NOTHROW(Rng(2147483646u));
}

TEST_CASE("box_muller on injected uniforms") {
  const auto [g0, g1] = box_muller(0.5, 0.25);
  CHECK(std::abs(g0) < 1e-15);
  CHECK(g1 == doctest::Approx(std::sqrt(2.0 * std::log(2.0))).epsilon(1e-15));
  CHECK(g1 == doctest::Approx(1.177410).epsilon(1e-6));

  const auto [h0, h1] = box_muller(0.3, 0.0);
  CHECK(h1 == 0.0);
  CHECK(h0 == doctest::Approx(std::sqrt(-2.0 * std::log(0.3))));
}

TEST_CASE("gaussian pairs consume two uniforms") {
  Rng a(42), b(42);
  const auto [g0, g1] = a.gaussian_pair();
  const double u1 = b.uniform();
  const double u2 = b.uniform();
  const auto [r0, r1] = box_muller(u1, u2);
  CHECK(g0 == r0);
  CHECK(g1 == r1);
  CHECK(a.state() == b.state());
}

TEST_CASE("fill_gaussian pairing rule") {
  Rng rng(7);
  CHECK(rng.fill_gaussian(0).empty());
  CHECK(rng.state() == 7u);

  rng.fill_gaussian(2);
  CHECK(rng.state() == park_miller_after(7, 2));

  Rng odd(7);
  const auto three = odd.fill_gaussian(3);
  CHECK(three.size() == 3);
  CHECK(odd.state() == park_miller_after(7, 4));

  Rng even(7);
  const auto four = even.fill_gaussian(4);
  for (int i = 0; i < 3; ++i) CHECK(three[i] == four[i]);
}

TEST_CASE("normality of 10^6 pairs") {
  Rng rng(12345);
  const int n = 1000000;
  double sum = 0.0, sum_sq = 0.0;
  for (int i = 0; i < n; ++i) {
    const auto [g0, g1] = rng.gaussian_pair();
    REQUIRE(std::isfinite(g0));
    REQUIRE(std::isfinite(g1));
    sum += g0 + g1;
    sum_sq += g0 * g0 + g1 * g1;
  }
  const double mean = sum / (2.0 * n);
  const double var = sum_sq / (2.0 * n) - mean * mean;
  CHECK(std::abs(mean) < 0.01);
  CHECK(std::abs(var - 1.0) < 0.01);
}

TEST_CASE("no state repeats within 10^5 draws") {
  Rng rng(1);
  std::unordered_set<std::uint32_t> seen;
  for (int i = 0; i < 100000; ++i) {
    rng.uniform();
    REQUIRE(seen.insert(rng.state()).second);
  }
}

TEST_CASE("determinism and seed mapping") {
  Rng a(99), b(99);
  CHECK(a.fill_gaussian(101) == b.fill_gaussian(101));
  for (std::uint64_t v : {0ull, 1ull, 2147483645ull, 2147483646ull, ~0ull}) {
    const auto s = to_seed(mix64(v));
    CHECK(s >= 1u);
    CHECK(s <= 2147483646u);
    CHECK_NOTHROW(Rng{s});
  }
  CHECK(to_seed(2147483645ull) == 2147483646u);
}
