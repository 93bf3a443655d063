#pragma once

// The unit group G = (Z/mZ)^x: its invariants, the residue target that makes
// a product of pool primes Carmichael, subset-product search, and assembly of
// the final certificate.

#include <cstdint>
#include <limits>
#include <numbers>
#include <optional>
#include <span>
#include <vector>

#include "carmichael/arith.hpp"
#include "carmichael/korselt.hpp"
#include "carmichael/nat.hpp"

namespace carmichael {

struct GroupSpec {
  Nat modulus;
  Factorization modulus_fact;
  Nat order;  // phi(modulus)
  Factorization order_fact;
  Nat exponent;  // lambda(modulus)
  Factorization exponent_fact;

  static GroupSpec of(const Factorization& modulus_fact, const FactorBudget& budget = {});
  static GroupSpec of(const Nat& modulus, const FactorBudget& budget = {});
};

struct GroupInvariants {
  Nat lambda_G;
  std::uint64_t omega_lambda = 0;  // Omega(lambda(G))
  std::uint64_t omega_order = 0;   // Omega(|G|)
  long double n_bound = 0;         // lambda (1 + log|G| / lambda)
  Nat s_G;
  long double t = 0;
  std::uint64_t omega_L = 0;
  /// lambda(G) = 1: s(G) is reported as 0.
  bool degenerate = false;
};

inline constexpr long double kNaturalBase = std::numbers::e_v<long double>;

/// ceil(5 lambda^2 Omega(lambda) log(3 lambda Omega(|G|))).
Nat s_of(const Nat& lambda, std::uint64_t omega_lambda, std::uint64_t omega_order,
         long double log_base = kNaturalBase);
/// lambda (1 + log|G| / lambda).
long double n_bound_of(const Nat& lambda, const Nat& order, long double log_base = kNaturalBase);
/// (6/5)^omega_L / (60 phi(M) log x), with log x supplied directly.
long double t_of(std::uint64_t omega_L, const Nat& phi_M, long double log_x_value,
                 long double log_base = kNaturalBase);
/// Natural logarithm of an arbitrary Nat.
long double ln(const Nat& v);

/// Requires x >= 3.
GroupInvariants compute_invariants(const GroupSpec& spec, std::uint64_t omega_L, const Nat& x,
                                   const Nat& phi_M, long double log_base = kNaturalBase);
/// Same, with ln x given (for x too large to materialize).
GroupInvariants compute_invariants_log_x(const GroupSpec& spec, std::uint64_t omega_L, long double ln_x,
                                         const Nat& phi_M, long double log_base = kNaturalBase);

/// Exact n(G) (Davenport constant) of (Z/mZ)^x by exhaustive search over
/// zero-sum-free sequences. Only for |G| <= 36.
std::uint64_t exact_davenport_constant(std::uint64_t modulus);

struct ResidueTarget {
  Nat h;
  Nat modulus;
  Nat mod_L;  // h mod L (= 1)
  Nat mod_M;  // h mod M (= a mod M)
};

/// h = 1 (mod L), h = a (mod M). Throws InfeasibleError if inconsistent.
ResidueTarget derive_target(const Nat& L, const Nat& M, const Nat& a);

/// Least positive r with r = 0 (mod order) and r = 1 (mod phi_M). Throws
/// InfeasibleError when gcd(order, phi_M) != 1.
Nat exponent_for_order(const Nat& order, const Nat& phi_M);
/// r for ord_L(p) and phi(M).
Nat derive_target_exponent(const Nat& p, const Factorization& L_fact, const Nat& M);
/// p^r mod M L: 1 mod L and p mod M.
Nat target_from_pool_element(const Nat& p, const Factorization& L_fact, const Nat& M);

using IndexSubset = std::vector<std::size_t>;

inline constexpr std::size_t kUnbounded = std::numeric_limits<std::size_t>::max();

struct SolverOptions {
  /// Pools up to this size use meet-in-the-middle; larger ones use the DP.
  std::size_t mitm_threshold = 40;
  std::size_t dp_memory_limit_bytes = std::size_t{512} << 20;
};

/// Some index subset S with min_size <= |S| <= max_size and
/// prod pool[S] = target (mod modulus), or nullopt if none exists. Every pool
/// element must be coprime to the modulus.
std::optional<IndexSubset> subset_product_find(std::span<const std::uint64_t> pool, std::uint64_t modulus,
                                               std::uint64_t target, std::size_t min_size,
                                               std::size_t max_size = kUnbounded,
                                               const SolverOptions& options = {});

inline constexpr std::size_t kEnumerateCap = 24;

/// Every qualifying index subset, in increasing bitmask order.
std::vector<IndexSubset> subset_product_enumerate(std::span<const std::uint64_t> pool, std::uint64_t modulus,
                                                  std::uint64_t target, std::size_t min_size,
                                                  std::size_t max_size = kUnbounded);

struct CountBound {
  /// C(|P| - n, t - n) / C(|P|, n) with n = ceil(n_bound), t = floor(t).
  long double exact_value = 0;
  long double exact_log = 0;
  /// ((4/5)|P|/t)^(2t/3) / (3e|P|/t)^(t/3).
  long double relaxed_value = 0;
  long double relaxed_log = 0;
};

/// Requires n_bound < t < pool_size - n_bound; throws DomainError naming the
/// violated inequality otherwise.
CountBound count_lower_bound(std::uint64_t pool_size, long double n_bound, long double t);

struct SharedModulus {
  Mode mode = Mode::erdos;
  Nat multiplier;  // k0 or Lambda
  Nat L;           // 0 in erdos mode
  std::uint64_t M = 1;
  std::uint64_t a = 1;
};

/// n = product of `primes`, re-checked independently; throws AssemblyError
/// naming the first failed check.
CarmichaelCertificate assemble(std::span<const Nat> primes, const SharedModulus& shared);

}  // namespace carmichael
