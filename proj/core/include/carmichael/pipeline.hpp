#pragma once

// Building blocks of the smooth-modulus construction: the product L' of the
// smooth-prime set, the size bound x, the modulus L, the shared multiplier k0
// and the prime pool. Also the desk-scale pool {p prime : p - 1 | Lambda}.

#include <cstdint>
#include <set>
#include <span>
#include <vector>

#include "carmichael/arith.hpp"
#include "carmichael/nat.hpp"
#include "carmichael/smooth_sieve.hpp"

namespace carmichael {

/// Each condition can be switched off for diagnostics.
struct CongruenceFilters {
  bool require_qr = true;        // p is a quadratic residue mod L
  bool require_residue = true;   // p = a (mod M)

  friend bool operator==(const CongruenceFilters&, const CongruenceFilters&) = default;
};

/// p = d * k0 + 1 in agp mode; d = p - 1 in erdos mode.
struct PoolEntry {
  std::uint64_t p = 0;
  std::uint64_t d = 0;

  friend bool operator==(const PoolEntry&, const PoolEntry&) = default;
};

/// Product of the primes in Q. Throws ConstructionError for an empty Q.
Nat build_L_prime(std::span<const std::uint64_t> q_set);

inline constexpr std::size_t kMaxXBits = std::size_t{1} << 20;

/// ceil((M * L')^(2/B)) by exact integer roots. Requires 0 < B < 5/12.
/// Throws CapacityError when the result would exceed `max_bits` bits.
Nat compute_x(const Nat& M, const Nat& L_prime, const Rational& B, std::size_t max_bits = kMaxXBits);

/// Natural log of ceil((M * L')^(2/B)), usable when compute_x overflows.
long double log_x(const Nat& M, const Nat& L_prime, const Rational& B);

struct LModulus {
  Nat L;
  Factorization factors;
};

/// Product over Q minus `excluded`. Throws ConstructionError if that is 1.
LModulus build_L(std::span<const std::uint64_t> q_set, const std::set<std::uint64_t>& excluded = {});

/// Whether p is a square modulo every prime of the odd squarefree L.
bool is_qr_mod_L(const Nat& p, const Factorization& L_fact);

struct KSearchResult {
  std::uint64_t k0 = 0;
  std::uint64_t count = 0;

  friend bool operator==(const KSearchResult&, const KSearchResult&) = default;
};

/// Scans k = 1..k_cap with gcd(k, L) = 1 and counts d | L such that
/// p = d k + 1 is prime, p <= x, p does not divide M L, and p passes the
/// enabled filters. Returns the k with the largest count (smallest k on ties).
KSearchResult find_k0(const Factorization& L_fact, std::uint64_t x, std::uint64_t M, std::uint64_t a,
                      const CongruenceFilters& filters, std::uint64_t k_cap, unsigned threads = 1);

struct PoolResult {
  std::vector<PoolEntry> entries;  // ascending in p
  /// Fewer than three primes: no Carmichael number can be formed.
  bool too_small = false;
};

/// All (p, d) with d | L, p = d k0 + 1 prime, p <= x, p not dividing M L and
/// passing the enabled filters. With `strict`, also requires
/// gcd((p - 1)/d, L) = 1.
PoolResult build_pool(const Factorization& L_fact, std::uint64_t k0, std::uint64_t x, std::uint64_t M,
                      std::uint64_t a, const CongruenceFilters& filters, bool strict = false);

/// Primes p with p - 1 | Lambda and p not dividing Lambda * M, ascending,
/// truncated at pool_cap. Throws ConstructionError below three primes.
std::vector<std::uint64_t> erdos_pool(const Nat& Lambda, std::uint64_t M, std::uint64_t a,
                                      std::size_t pool_cap);

}  // namespace carmichael
