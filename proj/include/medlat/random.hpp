#pragma once

// Counter-based random streams.  A stream is a pure function of
// (master seed, repetition, purpose tag, counter), so the draws of repetition r
// do not depend on which thread runs it or in which order.

#include <cstdint>

namespace medlat {

enum class StreamTag : std::uint64_t {
  GeneratingVector = 0x7a,
  Shift = 0xd5,
  Trial = 0x3c,
  Sampling = 0x91,
};

constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30U)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27U)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31U);
}

/// Order-sensitive hash of two words.
constexpr std::uint64_t hash_combine(std::uint64_t a, std::uint64_t b) {
  return splitmix64(splitmix64(a) ^ (b + 0x632be59bd9b4e019ULL + (a << 6U) + (a >> 2U)));
}

class RandomStream {
 public:
  RandomStream(std::uint64_t master_seed, std::uint64_t repetition, StreamTag tag)
      : key_(hash_combine(hash_combine(master_seed, repetition), static_cast<std::uint64_t>(tag))) {}

  std::uint64_t key() const { return key_; }

  std::uint64_t next_u64() { return splitmix64(key_ ^ splitmix64(counter_++)); }

  /// Uniform on [0, bound) without modulo bias (Lemire's multiply-and-reject).
  std::uint64_t uniform_below(std::uint64_t bound) {
    __extension__ using u128 = unsigned __int128;
    u128 m = static_cast<u128>(next_u64()) * bound;
    auto low = static_cast<std::uint64_t>(m);
    if (low < bound) {
      const std::uint64_t threshold = (0 - bound) % bound;
      while (low < threshold) {
        m = static_cast<u128>(next_u64()) * bound;
        low = static_cast<std::uint64_t>(m);
      }
    }
    return static_cast<std::uint64_t>(m >> 64U);
  }

  /// Uniform on {lo, ..., hi}.
  std::uint64_t uniform_int(std::uint64_t lo, std::uint64_t hi) { return lo + uniform_below(hi - lo + 1); }

  /// Uniform on [0, 1) with 53 random bits.
  double uniform01() { return static_cast<double>(next_u64() >> 11U) * 0x1.0p-53; }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

}  // namespace medlat
