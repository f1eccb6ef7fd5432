#pragma once

#include <cassert>
#include <cstdint>
#include <limits>
#include <random>

// Deterministic random-number utilities.
//
// std::mt19937_64 is fully specified by the standard, so a given seed yields
// the same raw 64-bit stream on every platform and standard library.  The
// standard *distributions* are not specified, so the draw helpers below map
// raw output to ranges themselves; results are reproducible bit-for-bit
// anywhere.

namespace fogsched::rng {

// SplitMix64 finalizer.  Used to derive well-separated stream seeds from a
// master seed plus a couple of labels, so adding or reordering consumers
// never shifts another consumer's stream.
constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

// Seed for the stream identified by (a, b) under `master`.
constexpr std::uint64_t derive_seed(std::uint64_t master, std::uint64_t a,
                                    std::uint64_t b) {
  std::uint64_t h = splitmix64(master);
  h = splitmix64(h ^ splitmix64(a + 0x9E3779B97F4A7C15ULL));
  h = splitmix64(h ^ splitmix64(b + 0xD1B54A32D192ED03ULL));
  return h;
}

class Engine {
 public:
  explicit Engine(std::uint64_t seed) : gen_(seed) {}

  std::uint64_t next_u64() { return gen_(); }

  // Uniform in [0, 1) with 53 random mantissa bits.
  double uniform_unit() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  // Uniform real in [lo, hi); a degenerate range returns lo.
  double uniform_real(double lo, double hi) {
    return lo + (hi - lo) * uniform_unit();
  }

  // Uniform integer in [lo, hi], both inclusive, unbiased via rejection.
  std::int64_t uniform_int(std::int64_t lo, std::int64_t hi) {
    assert(lo <= hi);
    const std::uint64_t span =
        static_cast<std::uint64_t>(hi) - static_cast<std::uint64_t>(lo) + 1;
    if (span == 0) return static_cast<std::int64_t>(next_u64());  // full range
    // Accept r in [0, 2^64 - 2^64 mod span) so r % span is uniform.
    const std::uint64_t rem =
        (std::numeric_limits<std::uint64_t>::max() % span + 1) % span;
    std::uint64_t r = next_u64();
    while (rem != 0 && r >= std::uint64_t{0} - rem) r = next_u64();
    return lo + static_cast<std::int64_t>(r % span);
  }

  // Uniform index in [0, k); k must be positive.
  std::size_t uniform_index(std::size_t k) {
    assert(k > 0);
    return static_cast<std::size_t>(
        uniform_int(0, static_cast<std::int64_t>(k) - 1));
  }

  // True with probability p.
  bool chance(double p) { return uniform_unit() < p; }

 private:
  std::mt19937_64 gen_;
};

}  // namespace fogsched::rng
