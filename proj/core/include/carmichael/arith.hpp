#pragma once

// Integer and modular arithmetic shared by every stage of the pipeline:
// primality, factorization, CRT, Jacobi symbols, Euler phi, Carmichael lambda
// and multiplicative orders. All functions are pure.

#include <cstdint>
#include <span>
#include <vector>

#include "carmichael/nat.hpp"

namespace carmichael {

struct PrimePower {
  Nat prime;
  unsigned exponent = 1;

  friend bool operator==(const PrimePower&, const PrimePower&) = default;
};

/// Prime factorization, ascending by prime. Default-constructed value is the
/// (empty) factorization of 1.
class Factorization {
 public:
  Factorization() = default;

  /// Validates ascending distinct primes and positive exponents.
  static Factorization from_factors(std::vector<PrimePower> factors);
  /// Squarefree factorization from a list of distinct primes in any order.
  static Factorization from_primes(std::span<const Nat> primes);
  static Factorization from_primes(std::span<const std::uint64_t> primes);

  const std::vector<PrimePower>& factors() const noexcept { return factors_; }
  bool empty() const noexcept { return factors_.empty(); }

  Nat value() const;
  /// omega: number of distinct primes.
  std::size_t distinct_count() const noexcept { return factors_.size(); }
  /// Omega: number of primes counted with multiplicity.
  std::uint64_t total_count() const noexcept;
  bool is_squarefree() const noexcept;
  /// Largest prime factor; 1 for the empty factorization.
  Nat largest_prime() const;
  /// True when some prime was only certified by the probabilistic test.
  bool probabilistic() const noexcept { return probabilistic_; }

  /// Product of two factorizations (exponents add).
  friend Factorization operator*(const Factorization& lhs, const Factorization& rhs);
  friend bool operator==(const Factorization& lhs, const Factorization& rhs) {
    return lhs.factors_ == rhs.factors_;
  }

 private:
  std::vector<PrimePower> factors_;
  bool probabilistic_ = false;
};

// --- modular arithmetic on machine words ---------------------------------

inline std::uint64_t mul_mod(std::uint64_t a, std::uint64_t b, std::uint64_t m) {
  return static_cast<std::uint64_t>(static_cast<unsigned __int128>(a) * b % m);
}
std::uint64_t pow_mod(std::uint64_t base, std::uint64_t exponent, std::uint64_t modulus);
/// Inverse of a modulo m; throws DomainError when gcd(a, m) != 1.
std::uint64_t inverse_mod(std::uint64_t a, std::uint64_t m);
bool is_prime_u64(std::uint64_t n);

// --- arbitrary precision ---------------------------------------------------

/// base^exponent mod modulus. Throws DomainError for modulus 0.
Nat mod_pow(const Nat& base, const Nat& exponent, const Nat& modulus);

struct PrimalityVerdict {
  bool prime = false;
  /// Set when n >= 2^64 and the verdict rests on the BPSW test.
  bool probabilistic = false;
};

/// Deterministic Miller-Rabin below 2^64; Baillie-PSW (strong base-2 test +
/// strong Lucas test) above.
PrimalityVerdict primality(const Nat& n);
bool is_prime(const Nat& n);

struct FactorBudget {
  /// Trial division runs over d <= trial_bound.
  std::uint64_t trial_bound = 1 << 16;
  /// Total Pollard-Brent iterations across all splits.
  std::uint64_t rho_iterations = 1 << 22;
};

/// Exact factorization within the budget; throws UnfactoredError otherwise.
Factorization factorize(const Nat& n, const FactorBudget& budget = {});

struct Congruence {
  Nat residue;
  Nat modulus;
};

/// Solves a system of congruences whose moduli need not be coprime. Returns
/// the residue modulo the lcm of the moduli. Throws ConflictError naming a
/// pair of mutually inconsistent congruences.
Congruence crt(std::span<const Congruence> congruences);

/// Jacobi symbol (a/n) for odd n >= 1.
int jacobi(const Nat& a, const Nat& n);

Nat euler_phi(const Factorization& f);
Nat carmichael_lambda(const Factorization& f);
/// Factorizations of phi(m) and lambda(m), obtained from the factorizations
/// of p - 1 for each p | m.
Factorization euler_phi_factorization(const Factorization& f, const FactorBudget& budget = {});
Factorization carmichael_lambda_factorization(const Factorization& f,
                                              const FactorBudget& budget = {});

/// Least e >= 1 with a^e = 1 (mod m), found by stripping primes from lambda(m).
Nat multiplicative_order(const Nat& a, const Nat& m, const Factorization& lambda_fact);

/// All divisors, ascending.
std::vector<Nat> divisors(const Factorization& f);

}  // namespace carmichael
