#pragma once

#include <cstdint>

namespace medlat {

std::uint64_t mul_mod(std::uint64_t a, std::uint64_t b, std::uint64_t m);
std::uint64_t pow_mod(std::uint64_t base, std::uint64_t exp, std::uint64_t m);

/// Deterministic Miller-Rabin, exact for every 64-bit input.
bool is_prime(std::uint64_t n);

/// Largest prime <= n.  Throws std::domain_error for n < 2.
std::uint64_t prev_prime(std::uint64_t n);

/// Smallest prime > n.
std::uint64_t next_prime(std::uint64_t n);

}  // namespace medlat
