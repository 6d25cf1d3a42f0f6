#ifndef RELYROUTE_MODULAR_HPP
#define RELYROUTE_MODULAR_HPP

#include <boost/multiprecision/cpp_int.hpp>

#include <cstdint>
#include <span>
#include <vector>

namespace relyroute::detail {

inline std::uint64_t mul_mod(std::uint64_t a, std::uint64_t b, std::uint64_t m)
{
  return static_cast<std::uint64_t>(static_cast<unsigned __int128>(a) * b % m);
}

std::uint64_t pow_mod(std::uint64_t base, std::uint64_t exp, std::uint64_t m);

/// Deterministic Miller-Rabin, valid for every 64-bit input.
bool is_prime(std::uint64_t n);

/// The first `count` primes below 2^31, largest first. Each exceeds 2^30, so
/// differences of residues fit a signed 32-bit lane.
std::vector<std::uint64_t> residue_primes(std::size_t count);

/// Smallest number of residue primes whose product exceeds 2^bits.
std::size_t primes_for_bits(std::size_t bits);

/// Chinese remaindering of residues[i] mod primes[i] into [0, prod primes).
boost::multiprecision::cpp_int crt(std::span<const std::uint64_t> residues, std::span<const std::uint64_t> primes);

} // namespace relyroute::detail

#endif // RELYROUTE_MODULAR_HPP
