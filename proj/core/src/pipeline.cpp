#include "carmichael/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <thread>

#include "carmichael/errors.hpp"

namespace carmichael {

namespace {

std::vector<std::uint64_t> odd_squarefree_primes(const Factorization& L_fact, const char* who) {
  std::vector<std::uint64_t> primes;
  for (const auto& [p, e] : L_fact.factors()) {
    if (e != 1) throw DomainError(std::string(who) + ": L must be squarefree");
    if (p == Nat(2)) throw DomainError(std::string(who) + ": L must be odd");
    primes.push_back(p.fits_u64() ? p.to_u64() : 0);
  }
  return primes;
}

// Divisors of the squarefree product of `primes` that are <= bound, ascending.
std::vector<std::uint64_t> divisors_up_to(std::span<const std::uint64_t> primes, std::uint64_t bound) {
  std::vector<std::uint64_t> out{1};
  if (bound == 0) return {};
  for (std::uint64_t q : primes) {
    if (q == 0 || q > bound) continue;
    const std::size_t n = out.size();
    for (std::size_t i = 0; i < n; ++i) {
      if (out[i] <= bound / q) out.push_back(out[i] * q);
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

bool qr_mod_primes(std::uint64_t p, std::span<const std::uint64_t> primes) {
  return std::all_of(primes.begin(), primes.end(), [p](std::uint64_t q) {
    return q == 0 ? is_qr_mod_L(Nat(p), Factorization::from_factors({{Nat(q), 1}}))
                  : pow_mod(p % q, (q - 1) / 2, q) == 1;
  });
}

struct CandidateFilter {
  std::span<const std::uint64_t> L_primes;
  std::uint64_t x;
  std::uint64_t M;
  std::uint64_t a;
  CongruenceFilters filters;

  bool accepts(std::uint64_t p) const {
    if (p > x || !is_prime_u64(p)) return false;
    if (M % p == 0) return false;
    if (std::find(L_primes.begin(), L_primes.end(), p) != L_primes.end()) return false;
    if (filters.require_residue && p % M != a % M) return false;
    if (filters.require_qr && !qr_mod_primes(p, L_primes)) return false;
    return true;
  }
};

}  // namespace

Nat build_L_prime(std::span<const std::uint64_t> q_set) {
  if (q_set.empty()) throw ConstructionError("no usable primes at these parameters (Q is empty)");
  Nat product = 1;
  for (std::uint64_t q : q_set) product *= Nat(q);
  return product;
}

Nat compute_x(const Nat& M, const Nat& L_prime, const Rational& B, std::size_t max_bits) {
  if (M.is_zero() || L_prime.is_zero()) throw DomainError("compute_x: M and L' must be >= 1");
  if (B.num == 0 || !(B < Rational{5, 12})) {
    throw DomainError("compute_x: B must satisfy 0 < B < 5/12, got " + B.to_string());
  }
  const Nat base = M * L_prime;
  if (base.is_one()) return 1;
  // x = ceil(base^(2 den / num))
  const long double estimated_bits =
      static_cast<long double>(base.bit_length()) * 2.0L * B.den / static_cast<long double>(B.num);
  if (estimated_bits > static_cast<long double>(max_bits) + 1 ||
      static_cast<long double>(base.bit_length()) * 2.0L * B.den > 64.0L * max_bits) {
    throw CapacityError("compute_x: (M L')^(2/B) has about " + std::to_string(static_cast<long long>(estimated_bits)) +
                        " bits, above the " + std::to_string(max_bits) + "-bit limit; use an x cap");
  }
  const Nat power = pow(base, 2 * B.den);
  mpz_class root;
  const int exact = mpz_root(root.get_mpz_t(), power.get_mpz_t(), B.num);
  if (!exact) root += 1;
  Nat x(root);
  if (x.bit_length() > max_bits) {
    throw CapacityError("compute_x: result exceeds the " + std::to_string(max_bits) + "-bit limit; use an x cap");
  }
  return x;
}

long double log_x(const Nat& M, const Nat& L_prime, const Rational& B) {
  const Nat base = M * L_prime;
  long exponent = 0;
  const double mantissa = mpz_get_d_2exp(&exponent, base.get_mpz_t());
  const long double ln_base = std::log(static_cast<long double>(mantissa)) +
                              static_cast<long double>(exponent) * std::log(2.0L);
  return ln_base * 2.0L * B.den / static_cast<long double>(B.num);
}

LModulus build_L(std::span<const std::uint64_t> q_set, const std::set<std::uint64_t>& excluded) {
  std::vector<std::uint64_t> kept;
  for (std::uint64_t q : q_set) {
    if (!excluded.contains(q)) kept.push_back(q);
  }
  if (kept.empty()) throw ConstructionError("build_L: every prime of Q was excluded; L would be 1");
  Factorization f = Factorization::from_primes(std::span<const std::uint64_t>(kept));
  Nat L = f.value();
  return {std::move(L), std::move(f)};
}

bool is_qr_mod_L(const Nat& p, const Factorization& L_fact) {
  odd_squarefree_primes(L_fact, "is_qr_mod_L");
  if (!gcd(p, L_fact.value()).is_one()) {
    throw DomainError("is_qr_mod_L: " + p.to_string() + " is not coprime to L");
  }
  return std::all_of(L_fact.factors().begin(), L_fact.factors().end(),
                     [&](const PrimePower& pp) { return jacobi(p, pp.prime) == 1; });
}

KSearchResult find_k0(const Factorization& L_fact, std::uint64_t x, std::uint64_t M, std::uint64_t a,
                      const CongruenceFilters& filters, std::uint64_t k_cap, unsigned threads) {
  if (x < 2) throw DomainError("find_k0: x must be >= 2");
  if (k_cap == 0) throw DomainError("find_k0: k_cap must be >= 1");
  if (M == 0) throw DomainError("find_k0: M must be >= 1");
  const std::vector<std::uint64_t> L_primes = odd_squarefree_primes(L_fact, "find_k0");
  const std::vector<std::uint64_t> divs = divisors_up_to(L_primes, x - 1);
  const CandidateFilter filter{L_primes, x, M, a, filters};

  auto coprime_to_L = [&](std::uint64_t k) {
    return std::all_of(L_primes.begin(), L_primes.end(), [k](std::uint64_t q) { return q == 0 || k % q != 0; });
  };

  const unsigned workers = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(std::min<std::uint64_t>(k_cap, 1024))));
  std::vector<KSearchResult> best(workers);
  auto scan = [&](unsigned id) {
    KSearchResult local;
    for (std::uint64_t k = 1 + id; k <= k_cap; k += workers) {
      if (!coprime_to_L(k)) continue;
      const std::uint64_t d_bound = (x - 1) / k;
      std::uint64_t count = 0;
      for (std::uint64_t d : divs) {
        if (d > d_bound) break;
        if (filter.accepts(d * k + 1)) ++count;
      }
      if (count > local.count) local = {k, count};
    }
    best[id] = local;
  };
  if (workers == 1) {
    scan(0);
  } else {
    std::vector<std::jthread> pool;
    for (unsigned t = 0; t < workers; ++t) pool.emplace_back(scan, t);
  }

  KSearchResult result;
  for (const auto& r : best) {
    if (r.count > result.count || (r.count == result.count && r.count > 0 && r.k0 < result.k0)) result = r;
  }
  if (result.count == 0) {
    throw ConstructionError("find_k0: no k <= " + std::to_string(k_cap) + " yields a usable prime");
  }
  return result;
}

PoolResult build_pool(const Factorization& L_fact, std::uint64_t k0, std::uint64_t x, std::uint64_t M,
                      std::uint64_t a, const CongruenceFilters& filters, bool strict) {
  if (k0 == 0) throw DomainError("build_pool: k0 must be >= 1");
  if (M == 0) throw DomainError("build_pool: M must be >= 1");
  const std::vector<std::uint64_t> L_primes = odd_squarefree_primes(L_fact, "build_pool");
  if (!gcd(Nat(k0), L_fact.value()).is_one()) throw DomainError("build_pool: k0 must be coprime to L");
  const CandidateFilter filter{L_primes, x, M, a, filters};

  PoolResult result;
  if (x < 2) {
    result.too_small = true;
    return result;
  }
  for (std::uint64_t d : divisors_up_to(L_primes, (x - 1) / k0)) {
    const std::uint64_t p = d * k0 + 1;
    if (!filter.accepts(p)) continue;
    if (strict && !gcd(Nat((p - 1) / d), L_fact.value()).is_one()) continue;
    result.entries.push_back({p, d});
  }
  std::sort(result.entries.begin(), result.entries.end(),
            [](const PoolEntry& l, const PoolEntry& r) { return l.p < r.p; });
  result.too_small = result.entries.size() < 3;
  return result;
}

std::vector<std::uint64_t> erdos_pool(const Nat& Lambda, std::uint64_t M, std::uint64_t a, std::size_t pool_cap) {
  if (Lambda < Nat(2)) throw DomainError("erdos_pool: Lambda must be >= 2");
  if (M == 0) throw DomainError("erdos_pool: M must be >= 1");
  if (std::gcd(a, M) != 1) throw DomainError("erdos_pool: gcd(a, M) must be 1");
  if (!Lambda.fits_u64() || Lambda.to_u64() == UINT64_MAX) {
    throw CapacityError("erdos_pool: Lambda must be below 2^64 - 1");
  }
  const std::uint64_t lambda = Lambda.to_u64();
  std::vector<std::uint64_t> pool;
  for (const Nat& d : divisors(factorize(Lambda))) {
    const std::uint64_t p = d.to_u64() + 1;
    if (lambda % p == 0 || M % p == 0) continue;
    if (is_prime_u64(p)) pool.push_back(p);
  }
  if (pool.size() > pool_cap) pool.resize(pool_cap);
  if (pool.size() < 3) {
    throw ConstructionError("erdos_pool: only " + std::to_string(pool.size()) +
                            " usable primes for Lambda = " + Lambda.to_string() + "; need at least 3");
  }
  return pool;
}

}  // namespace carmichael
