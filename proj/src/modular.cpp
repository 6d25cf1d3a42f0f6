#include "modular.hpp"

#include <mutex>
#include <stdexcept>

namespace relyroute::detail {

std::uint64_t pow_mod(std::uint64_t base, std::uint64_t exp, std::uint64_t m)
{
  std::uint64_t result = 1 % m;
  base %= m;
  while (exp) {
    if (exp & 1)
      result = mul_mod(result, base, m);
    base = mul_mod(base, base, m);
    exp >>= 1;
  }
  return result;
}

bool is_prime(std::uint64_t n)
{
  if (n < 2)
    return false;
  for (std::uint64_t small : {2ull, 3ull, 5ull, 7ull, 11ull, 13ull, 17ull, 19ull, 23ull, 29ull, 31ull, 37ull}) {
    if (n % small == 0)
      return n == small;
  }
  std::uint64_t d = n - 1;
  unsigned r = 0;
  while ((d & 1) == 0) {
    d >>= 1;
    ++r;
  }
  for (std::uint64_t a : {2ull, 3ull, 5ull, 7ull, 11ull, 13ull, 17ull, 19ull, 23ull, 29ull, 31ull, 37ull}) {
    std::uint64_t x = pow_mod(a, d, n);
    if (x == 1 || x == n - 1)
      continue;
    bool composite = true;
    for (unsigned i = 1; i < r; ++i) {
      x = mul_mod(x, x, n);
      if (x == n - 1) {
        composite = false;
        break;
      }
    }
    if (composite)
      return false;
  }
  return true;
}

std::vector<std::uint64_t> residue_primes(std::size_t count)
{
  static std::mutex mutex;
  static std::vector<std::uint64_t> primes;
  std::lock_guard lock(mutex);
  std::uint64_t candidate = primes.empty() ? (std::uint64_t{1} << 31) - 1 : primes.back() - 2;
  while (primes.size() < count) {
    if (candidate < (std::uint64_t{1} << 30))
      throw std::overflow_error("ran out of residue primes");
    if (is_prime(candidate))
      primes.push_back(candidate);
    candidate -= 2;
  }
  return {primes.begin(), primes.begin() + static_cast<std::ptrdiff_t>(count)};
}

std::size_t primes_for_bits(std::size_t bits)
{
  return bits / 30 + 1;
}

boost::multiprecision::cpp_int crt(std::span<const std::uint64_t> residues, std::span<const std::uint64_t> primes)
{
  using boost::multiprecision::cpp_int;
  cpp_int value = 0;
  cpp_int modulus = 1;
  for (std::size_t i = 0; i < residues.size(); ++i) {
    const std::uint64_t p = primes[i];
    std::uint64_t value_mod = static_cast<std::uint64_t>(value % p);
    std::uint64_t modulus_mod = static_cast<std::uint64_t>(modulus % p);
    std::uint64_t delta = (residues[i] + p - value_mod) % p;
    std::uint64_t step = mul_mod(delta, pow_mod(modulus_mod, p - 2, p), p);
    value += modulus * step;
    modulus *= p;
  }
  return value;
}

} // namespace relyroute::detail
