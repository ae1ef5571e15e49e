#include "medlat/primes.hpp"

#include <stdexcept>
#include <string>

namespace medlat {

__extension__ using u128 = unsigned __int128;

std::uint64_t mul_mod(std::uint64_t a, std::uint64_t b, std::uint64_t m) {
  return static_cast<std::uint64_t>(static_cast<u128>(a) * b % m);
}

std::uint64_t pow_mod(std::uint64_t base, std::uint64_t exp, std::uint64_t m) {
  std::uint64_t result = 1 % m;
  base %= m;
  while (exp > 0) {
    if (exp & 1U) result = mul_mod(result, base, m);
    base = mul_mod(base, base, m);
    exp >>= 1U;
  }
  return result;
}

namespace {

bool strong_probable_prime(std::uint64_t n, std::uint64_t d, unsigned s, std::uint64_t a) {
  std::uint64_t x = pow_mod(a, d, n);
  if (x == 1 || x == n - 1) return true;
  for (unsigned r = 1; r < s; ++r) {
    x = mul_mod(x, x, n);
    if (x == n - 1) return true;
  }
  return false;
}

}  // namespace

bool is_prime(std::uint64_t n) {
  if (n < 2) return false;
  constexpr std::uint64_t small[] = {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37};
  for (auto p : small) {
    if (n == p) return true;
    if (n % p == 0) return false;
  }
  std::uint64_t d = n - 1;
  unsigned s = 0;
  while ((d & 1U) == 0) {
    d >>= 1U;
    ++s;
  }
  // The first twelve primes as witnesses are exact below 3.3e24.
  for (auto a : small)
    if (!strong_probable_prime(n, d, s, a)) return false;
  return true;
}

std::uint64_t prev_prime(std::uint64_t n) {
  if (n < 2) throw std::domain_error("no prime <= " + std::to_string(n));
  while (!is_prime(n)) --n;
  return n;
}

std::uint64_t next_prime(std::uint64_t n) {
  if (n < 2) return 2;
  do {
    if (n == UINT64_MAX) throw std::overflow_error("next_prime overflow");
    ++n;
  } while (!is_prime(n));
  return n;
}

}  // namespace medlat
