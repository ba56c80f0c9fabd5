#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "lrc/bigint.hpp"

namespace lrc {

// splitmix64 finalizer; used to spread seeds across trial streams.
inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

// Stream-splitting rule: trial i of a run seeded with `seed` uses an
// mt19937_64 generator seeded with splitmix64(seed + i + 1). Runs are
// reproducible bit-for-bit given (seed, trials), and trials are independent
// streams that may be evaluated in any order.
inline std::mt19937_64 trial_rng(std::uint64_t seed, std::uint64_t trial) {
  return std::mt19937_64(splitmix64(seed + trial + 1));
}

// Uniform draw from [0, bound) by rejection on the top bit block, so the
// distribution is exactly uniform no matter how large bound is.
inline BigInt uniform_below(const BigInt& bound, std::mt19937_64& g) {
  const std::size_t bits = mpz_sizeinbase(bound.get_mpz_t(), 2);
  const std::size_t words = (bits + 63) / 64;
  std::vector<std::uint64_t> buf(words);
  BigInt draw;
  while (true) {
    for (auto& w : buf) w = g();
    const unsigned top = bits % 64;
    if (top != 0) buf.back() &= (~0ULL) >> (64 - top);
    mpz_import(draw.get_mpz_t(), words, -1, sizeof(std::uint64_t), 0, 0,
               buf.data());
    if (draw < bound) return draw;
  }
}

}  // namespace lrc
