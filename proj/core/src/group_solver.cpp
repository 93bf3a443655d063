#include "carmichael/group_solver.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>
#include <string>

#include <mpfr.h>

#include "carmichael/errors.hpp"

namespace carmichael {

namespace {

constexpr mpfr_prec_t kPrecision = 256;

class Real {
 public:
  explicit Real(mpfr_prec_t precision = kPrecision) { mpfr_init2(v_, precision); }
  Real(const Real&) = delete;
  Real& operator=(const Real&) = delete;
  ~Real() { mpfr_clear(v_); }
  mpfr_ptr get() noexcept { return v_; }
  mpfr_srcptr get() const noexcept { return v_; }
  long double to_ld() const { return mpfr_get_ld(v_, MPFR_RNDN); }

 private:
  mpfr_t v_;
};

mpfr_prec_t precision_for(const Nat& v) {
  return kPrecision + 2 * static_cast<mpfr_prec_t>(v.bit_length());
}

void log_in_base(Real& out, mpfr_srcptr value, long double base) {
  mpfr_log(out.get(), value, MPFR_RNDN);
  if (base != kNaturalBase) {
    Real lb;
    mpfr_set_ld(lb.get(), base, MPFR_RNDN);
    mpfr_log(lb.get(), lb.get(), MPFR_RNDN);
    mpfr_div(out.get(), out.get(), lb.get(), MPFR_RNDN);
  }
}

std::vector<std::size_t> bits_of(std::uint64_t mask, std::size_t offset) {
  std::vector<std::size_t> out;
  while (mask) {
    out.push_back(offset + static_cast<std::size_t>(std::countr_zero(mask)));
    mask &= mask - 1;
  }
  return out;
}

void check_pool(std::span<const std::uint64_t> pool, std::uint64_t modulus, std::size_t min_size,
                std::size_t max_size) {
  if (modulus == 0) throw DomainError("subset product: modulus must be >= 1");
  if (min_size == 0) throw DomainError("subset product: min_size must be >= 1");
  if (max_size < min_size) throw DomainError("subset product: max_size < min_size");
  for (std::uint64_t v : pool) {
    if (std::gcd(v, modulus) != 1) {
      throw DomainError("subset product: pool element " + std::to_string(v) + " is not coprime to " +
                        std::to_string(modulus));
    }
  }
}

struct HalfEntry {
  std::uint64_t product;
  std::uint32_t size;
  std::uint32_t mask;
};

std::optional<IndexSubset> meet_in_the_middle(std::span<const std::uint64_t> pool, std::uint64_t m,
                                              std::uint64_t target, std::size_t min_size,
                                              std::size_t max_size) {
  const std::size_t n = pool.size();
  const std::size_t left = n / 2;
  const std::size_t right = n - left;
  const std::span<const std::uint64_t> a = pool.first(left);
  const std::span<const std::uint64_t> b = pool.subspan(left);

  std::vector<HalfEntry> table;
  {
    std::vector<std::uint64_t> prod(std::size_t{1} << right);
    prod[0] = 1 % m;
    table.reserve(prod.size());
    table.push_back({prod[0], 0, 0});
    for (std::uint64_t mask = 1; mask < prod.size(); ++mask) {
      const int low = std::countr_zero(mask);
      prod[mask] = mul_mod(prod[mask & (mask - 1)], b[low] % m, m);
      table.push_back({prod[mask], static_cast<std::uint32_t>(std::popcount(mask)),
                       static_cast<std::uint32_t>(mask)});
    }
  }
  std::sort(table.begin(), table.end(), [](const HalfEntry& l, const HalfEntry& r) {
    return std::tie(l.product, l.size, l.mask) < std::tie(r.product, r.size, r.mask);
  });
  table.erase(std::unique(table.begin(), table.end(),
                          [](const HalfEntry& l, const HalfEntry& r) {
                            return l.product == r.product && l.size == r.size;
                          }),
              table.end());

  std::vector<std::uint64_t> inverses(left);
  for (std::size_t i = 0; i < left; ++i) inverses[i] = inverse_mod(a[i] % m, m);
  std::vector<std::uint64_t> inv_prod(std::size_t{1} << left);
  inv_prod[0] = 1 % m;
  for (std::uint64_t mask = 0; mask < inv_prod.size(); ++mask) {
    if (mask > 0) {
      const int low = std::countr_zero(mask);
      inv_prod[mask] = mul_mod(inv_prod[mask & (mask - 1)], inverses[low], m);
    }
    const std::size_t size_a = static_cast<std::size_t>(std::popcount(mask));
    if (size_a > max_size) continue;
    const std::uint64_t need = mul_mod(target, inv_prod[mask], m);
    const std::size_t min_b = min_size > size_a ? min_size - size_a : 0;
    const std::size_t max_b = max_size - size_a;
    auto it = std::lower_bound(table.begin(), table.end(), HalfEntry{need, static_cast<std::uint32_t>(min_b), 0},
                               [](const HalfEntry& l, const HalfEntry& r) {
                                 return std::tie(l.product, l.size) < std::tie(r.product, r.size);
                               });
    if (it != table.end() && it->product == need && it->size <= max_b) {
      IndexSubset subset = bits_of(mask, 0);
      const IndexSubset right_bits = bits_of(it->mask, left);
      subset.insert(subset.end(), right_bits.begin(), right_bits.end());
      return subset;
    }
  }
  return std::nullopt;
}

// Layered reachability over (size, residue). When `saturating`, the size
// coordinate stops at `cap` and means "at least cap".
std::optional<IndexSubset> residue_dp(std::span<const std::uint64_t> pool, std::uint64_t m, std::uint64_t target,
                                      std::size_t min_size, std::size_t cap, bool saturating,
                                      std::size_t memory_limit) {
  const std::size_t n = pool.size();
  const unsigned __int128 states = static_cast<unsigned __int128>(m) * (cap + 1);
  const unsigned __int128 bytes = states * (n + 1) / 8;
  if (bytes > memory_limit) {
    throw CapacityError("subset_product_find: dynamic programming needs about " +
                        std::to_string(static_cast<unsigned long long>(bytes >> 20)) +
                        " MiB; reduce the pool or the modulus");
  }
  const std::size_t words = static_cast<std::size_t>((states + 63) / 64);
  auto index = [m](std::size_t size, std::uint64_t r) { return size * m + r; };
  std::vector<std::vector<std::uint64_t>> layers(n + 1, std::vector<std::uint64_t>(words, 0));
  auto test = [&](std::size_t layer, std::size_t i) { return (layers[layer][i >> 6] >> (i & 63)) & 1; };
  auto set = [&](std::size_t layer, std::size_t i) { layers[layer][i >> 6] |= std::uint64_t{1} << (i & 63); };

  set(0, index(0, 1 % m));
  for (std::size_t item = 0; item < n; ++item) {
    layers[item + 1] = layers[item];
    const std::uint64_t v = pool[item] % m;
    for (std::size_t w = 0; w < words; ++w) {
      std::uint64_t bitsw = layers[item][w];
      while (bitsw) {
        const std::size_t i = w * 64 + static_cast<std::size_t>(std::countr_zero(bitsw));
        bitsw &= bitsw - 1;
        const std::size_t size = i / m;
        const std::uint64_t r = i % m;
        std::size_t next = size + 1;
        if (next > cap) {
          if (!saturating) continue;
          next = cap;
        }
        set(item + 1, index(next, mul_mod(r, v, m)));
      }
    }
  }

  std::size_t size = kUnbounded;
  for (std::size_t s = min_size; s <= cap; ++s) {
    if (test(n, index(s, target))) {
      size = s;
      break;
    }
  }
  if (size == kUnbounded) return std::nullopt;

  IndexSubset subset;
  std::uint64_t r = target;
  for (std::size_t layer = n; layer > 0; --layer) {
    if (test(layer - 1, index(size, r))) continue;
    const std::size_t item = layer - 1;
    subset.push_back(item);
    r = mul_mod(r, inverse_mod(pool[item] % m, m), m);
    if (saturating && size == cap && test(layer - 1, index(cap, r))) continue;
    --size;
  }
  std::reverse(subset.begin(), subset.end());
  return subset;
}

}  // namespace

GroupSpec GroupSpec::of(const Factorization& modulus_fact, const FactorBudget& budget) {
  GroupSpec g;
  g.modulus = modulus_fact.value();
  g.modulus_fact = modulus_fact;
  g.order_fact = euler_phi_factorization(modulus_fact, budget);
  g.order = g.order_fact.value();
  g.exponent_fact = carmichael_lambda_factorization(modulus_fact, budget);
  g.exponent = g.exponent_fact.value();
  return g;
}

GroupSpec GroupSpec::of(const Nat& modulus, const FactorBudget& budget) {
  return of(factorize(modulus, budget), budget);
}

long double ln(const Nat& v) {
  if (v.is_zero()) throw DomainError("ln(0)");
  Real r(precision_for(v));
  mpfr_set_z(r.get(), v.get_mpz_t(), MPFR_RNDN);
  mpfr_log(r.get(), r.get(), MPFR_RNDN);
  return r.to_ld();
}

Nat s_of(const Nat& lambda, std::uint64_t omega_lambda, std::uint64_t omega_order, long double log_base) {
  if (omega_lambda == 0 || lambda.is_zero()) return 0;
  const mpfr_prec_t prec = precision_for(lambda);
  Real inner(prec);
  mpfr_set_z(inner.get(), lambda.get_mpz_t(), MPFR_RNDN);
  mpfr_mul_ui(inner.get(), inner.get(), 3ul * omega_order, MPFR_RNDN);
  Real log_inner(prec);
  log_in_base(log_inner, inner.get(), log_base);

  Real s(prec);
  mpfr_set_z(s.get(), lambda.get_mpz_t(), MPFR_RNDN);
  mpfr_sqr(s.get(), s.get(), MPFR_RNDN);
  mpfr_mul_ui(s.get(), s.get(), 5ul * omega_lambda, MPFR_RNDN);
  mpfr_mul(s.get(), s.get(), log_inner.get(), MPFR_RNDN);
  if (mpfr_sgn(s.get()) <= 0) return 0;
  mpfr_ceil(s.get(), s.get());
  mpz_class out;
  mpfr_get_z(out.get_mpz_t(), s.get(), MPFR_RNDN);
  return Nat(out);
}

long double n_bound_of(const Nat& lambda, const Nat& order, long double log_base) {
  if (lambda.is_zero() || order.is_zero()) throw DomainError("n_bound: lambda and |G| must be >= 1");
  const mpfr_prec_t prec = precision_for(lambda) + precision_for(order);
  Real log_order(prec);
  mpfr_set_z(log_order.get(), order.get_mpz_t(), MPFR_RNDN);
  log_in_base(log_order, log_order.get(), log_base);
  // lambda (1 + log|G| / lambda) = lambda + log|G|
  Real out(prec);
  mpfr_set_z(out.get(), lambda.get_mpz_t(), MPFR_RNDN);
  mpfr_add(out.get(), out.get(), log_order.get(), MPFR_RNDN);
  return out.to_ld();
}

long double t_of(std::uint64_t omega_L, const Nat& phi_M, long double log_x_value, long double log_base) {
  if (phi_M.is_zero()) throw DomainError("t: phi(M) must be >= 1");
  if (!(log_x_value > 0)) throw DomainError("t: log x must be positive");
  Real num;
  mpfr_set_ui(num.get(), 6, MPFR_RNDN);
  mpfr_div_ui(num.get(), num.get(), 5, MPFR_RNDN);
  mpfr_pow_ui(num.get(), num.get(), omega_L, MPFR_RNDN);
  Real den;
  mpfr_set_ld(den.get(), log_x_value, MPFR_RNDN);
  if (log_base != kNaturalBase) {
    Real lb;
    mpfr_set_ld(lb.get(), log_base, MPFR_RNDN);
    mpfr_log(lb.get(), lb.get(), MPFR_RNDN);
    mpfr_div(den.get(), den.get(), lb.get(), MPFR_RNDN);
  }
  Real phi;
  mpfr_set_z(phi.get(), phi_M.get_mpz_t(), MPFR_RNDN);
  mpfr_mul(den.get(), den.get(), phi.get(), MPFR_RNDN);
  mpfr_mul_ui(den.get(), den.get(), 60, MPFR_RNDN);
  mpfr_div(num.get(), num.get(), den.get(), MPFR_RNDN);
  return num.to_ld();
}

GroupInvariants compute_invariants_log_x(const GroupSpec& spec, std::uint64_t omega_L, long double ln_x,
                                         const Nat& phi_M, long double log_base) {
  GroupInvariants inv;
  inv.lambda_G = spec.exponent;
  inv.omega_lambda = spec.exponent_fact.total_count();
  inv.omega_order = spec.order_fact.total_count();
  inv.n_bound = n_bound_of(spec.exponent, spec.order, log_base);
  inv.degenerate = spec.exponent.is_one();
  inv.s_G = s_of(spec.exponent, inv.omega_lambda, inv.omega_order, log_base);
  inv.t = t_of(omega_L, phi_M, ln_x, log_base);
  inv.omega_L = omega_L;
  return inv;
}

GroupInvariants compute_invariants(const GroupSpec& spec, std::uint64_t omega_L, const Nat& x, const Nat& phi_M,
                                   long double log_base) {
  if (x < Nat(3)) throw DomainError("compute_invariants: x must be >= 3");
  return compute_invariants_log_x(spec, omega_L, ln(x), phi_M, log_base);
}

std::uint64_t exact_davenport_constant(std::uint64_t modulus) {
  if (modulus == 0) throw DomainError("exact_davenport_constant: modulus must be >= 1");
  std::vector<std::uint64_t> units;
  for (std::uint64_t u = 0; u < modulus; ++u) {
    if (std::gcd(u, modulus) == 1) units.push_back(u % modulus);
  }
  const std::size_t order = units.size();
  if (order > 36) throw CapacityError("exact_davenport_constant: |G| must be <= 36");
  if (order == 1) return 1;

  std::vector<std::size_t> index_of(modulus, 0);
  for (std::size_t i = 0; i < order; ++i) index_of[units[i]] = i;
  std::vector<std::vector<std::size_t>> table(order, std::vector<std::size_t>(order));
  for (std::size_t i = 0; i < order; ++i) {
    for (std::size_t j = 0; j < order; ++j) table[i][j] = index_of[mul_mod(units[i], units[j], modulus)];
  }
  const std::size_t identity = index_of[1 % modulus];

  // Longest zero-sum-free sequence, elements taken in nondecreasing index
  // order. `sums` holds the products of all nonempty subsequences.
  std::size_t best = 0;
  auto dfs = [&](auto&& self, std::size_t start, std::size_t length, std::uint64_t sums) -> void {
    best = std::max(best, length);
    const auto reachable = static_cast<std::size_t>(std::popcount(sums));
    if (length + (order - 1 - reachable) <= best) return;
    for (std::size_t g = start; g < order; ++g) {
      if (g == identity) continue;
      std::uint64_t next = sums | (std::uint64_t{1} << g);
      for (std::uint64_t s = sums; s; s &= s - 1) {
        next |= std::uint64_t{1} << table[static_cast<std::size_t>(std::countr_zero(s))][g];
      }
      if ((next >> identity) & 1) continue;
      self(self, g, length + 1, next);
    }
  };
  dfs(dfs, 0, 0, 0);
  return best + 1;
}

ResidueTarget derive_target(const Nat& L, const Nat& M, const Nat& a) {
  if (L.is_zero() || M.is_zero()) throw DomainError("derive_target: L and M must be >= 1");
  if (!gcd(a, M).is_one()) throw DomainError("derive_target: gcd(a, M) must be 1");
  const std::vector<Congruence> system{{Nat(1), L}, {a, M}};
  Congruence c;
  try {
    c = crt(system);
  } catch (const ConflictError&) {
    throw InfeasibleError("derive_target: h = 1 (mod " + L.to_string() + ") and h = " + a.to_string() + " (mod " +
                          M.to_string() + ") are inconsistent; gcd = " + gcd(L, M).to_string() +
                          " does not divide a - 1");
  }
  return {c.residue, c.modulus, c.residue % L, c.residue % M};
}

Nat exponent_for_order(const Nat& order, const Nat& phi_M) {
  if (order.is_zero() || phi_M.is_zero()) throw DomainError("exponent_for_order: arguments must be >= 1");
  const Nat g = gcd(order, phi_M);
  if (!g.is_one()) {
    throw InfeasibleError("target exponent: order " + order.to_string() + " and phi(M) = " + phi_M.to_string() +
                          " share the factor " + g.to_string());
  }
  const std::vector<Congruence> system{{Nat(0), order}, {Nat(1), phi_M}};
  const Congruence c = crt(system);
  return c.residue.is_zero() ? c.modulus : c.residue;
}

Nat derive_target_exponent(const Nat& p, const Factorization& L_fact, const Nat& M) {
  const Nat L = L_fact.value();
  if (!gcd(p, L).is_one()) throw DomainError("derive_target_exponent: p must be coprime to L");
  const Nat order = multiplicative_order(p, L, carmichael_lambda_factorization(L_fact));
  return exponent_for_order(order, euler_phi(factorize(M)));
}

Nat target_from_pool_element(const Nat& p, const Factorization& L_fact, const Nat& M) {
  const Nat r = derive_target_exponent(p, L_fact, M);
  return mod_pow(p, r, M * L_fact.value());
}

std::optional<IndexSubset> subset_product_find(std::span<const std::uint64_t> pool, std::uint64_t modulus,
                                               std::uint64_t target, std::size_t min_size, std::size_t max_size,
                                               const SolverOptions& options) {
  check_pool(pool, modulus, min_size, max_size);
  const std::size_t n = pool.size();
  if (min_size > n) return std::nullopt;
  target %= modulus;
  if (n <= options.mitm_threshold) {
    return meet_in_the_middle(pool, modulus, target, min_size, std::min(max_size, n));
  }
  const bool saturating = max_size >= n;
  const std::size_t cap = saturating ? min_size : max_size;
  return residue_dp(pool, modulus, target, min_size, cap, saturating, options.dp_memory_limit_bytes);
}

std::vector<IndexSubset> subset_product_enumerate(std::span<const std::uint64_t> pool, std::uint64_t modulus,
                                                  std::uint64_t target, std::size_t min_size, std::size_t max_size) {
  if (pool.size() > kEnumerateCap) {
    throw CapacityError("subset_product_enumerate: pool larger than " + std::to_string(kEnumerateCap));
  }
  check_pool(pool, modulus, min_size, max_size);
  target %= modulus;
  std::vector<IndexSubset> out;
  const std::uint64_t count = std::uint64_t{1} << pool.size();
  std::vector<std::uint64_t> prod(count);
  prod[0] = 1 % modulus;
  for (std::uint64_t mask = 1; mask < count; ++mask) {
    const int low = std::countr_zero(mask);
    prod[mask] = mul_mod(prod[mask & (mask - 1)], pool[low] % modulus, modulus);
    const auto size = static_cast<std::size_t>(std::popcount(mask));
    if (size >= min_size && size <= max_size && prod[mask] == target) out.push_back(bits_of(mask, 0));
  }
  return out;
}

CountBound count_lower_bound(std::uint64_t pool_size, long double n_bound, long double t) {
  if (!(n_bound < t)) {
    throw DomainError("count_lower_bound: ordering violated, need n(G) < t (n(G) = " + std::to_string(n_bound) +
                      ", t = " + std::to_string(t) + ")");
  }
  if (!(t < static_cast<long double>(pool_size) - n_bound)) {
    throw DomainError("count_lower_bound: ordering violated, need t < |P| - n(G) (|P| = " +
                      std::to_string(pool_size) + ", n(G) = " + std::to_string(n_bound) +
                      ", t = " + std::to_string(t) + ")");
  }
  CountBound out;
  const auto n = static_cast<unsigned long>(std::ceil(n_bound));
  const auto ti = static_cast<unsigned long>(std::floor(t));
  if (ti >= n) {
    mpz_class num;
    mpz_class den;
    mpz_bin_uiui(num.get_mpz_t(), pool_size - n, ti - n);
    mpz_bin_uiui(den.get_mpz_t(), pool_size, n);
    Real lnum;
    Real lden;
    mpfr_set_z(lnum.get(), num.get_mpz_t(), MPFR_RNDN);
    mpfr_set_z(lden.get(), den.get_mpz_t(), MPFR_RNDN);
    mpfr_log(lnum.get(), lnum.get(), MPFR_RNDN);
    mpfr_log(lden.get(), lden.get(), MPFR_RNDN);
    mpfr_sub(lnum.get(), lnum.get(), lden.get(), MPFR_RNDN);
    out.exact_log = lnum.to_ld();
    out.exact_value = std::exp(out.exact_log);
  } else {
    out.exact_log = -std::numeric_limits<long double>::infinity();
    out.exact_value = 0;
  }
  const long double p = static_cast<long double>(pool_size);
  out.relaxed_log = (2.0L * t / 3.0L) * std::log(0.8L * p / t) -
                    (t / 3.0L) * std::log(3.0L * std::numbers::e_v<long double> * p / t);
  out.relaxed_value = std::exp(out.relaxed_log);
  return out;
}

CarmichaelCertificate assemble(std::span<const Nat> primes, const SharedModulus& shared) {
  if (primes.size() < 3) {
    throw DomainError("assemble: need at least 3 primes, got " + std::to_string(primes.size()));
  }
  if (shared.M == 0) throw DomainError("assemble: M must be >= 1");

  std::vector<Nat> sorted(primes.begin(), primes.end());
  std::sort(sorted.begin(), sorted.end());
  for (const Nat& p : sorted) {
    if (!is_prime(p)) throw AssemblyError("primality", "assemble: " + p.to_string() + " is not prime");
  }

  CarmichaelCertificate cert;
  cert.n = 1;
  for (const Nat& p : sorted) cert.n *= p;
  cert.mode = shared.mode;
  cert.shared_multiplier = shared.multiplier;
  cert.L = shared.L;
  cert.M = shared.M;
  cert.a = shared.a;

  cert.checks.composite = sorted.size() >= 2;
  if (!cert.checks.composite) throw AssemblyError("composite", "assemble: product is not composite");
  cert.checks.squarefree = std::adjacent_find(sorted.begin(), sorted.end()) == sorted.end();
  if (!cert.checks.squarefree) {
    throw AssemblyError("squarefree", "assemble: repeated prime in " + cert.n.to_string());
  }
  const Factorization f = Factorization::from_primes(std::span<const Nat>(sorted));
  cert.checks.probabilistic_primality_used = f.probabilistic();
  cert.checks.korselt = korselt_check(cert.n, f);
  if (!cert.checks.korselt) {
    throw AssemblyError("korselt", "assemble: " + cert.n.to_string() + " fails Korselt's criterion");
  }
  cert.checks.residue_class = cert.n % Nat(shared.M) == Nat(shared.a) % Nat(shared.M);
  if (!cert.checks.residue_class) {
    throw AssemblyError("residue_class", "assemble: " + cert.n.to_string() + " is not " + std::to_string(shared.a) +
                                             " mod " + std::to_string(shared.M));
  }
  if (shared.mode != Mode::external) {
    const Nat shared_modulus = shared.mode == Mode::agp ? shared.multiplier * shared.L : shared.multiplier;
    const bool ok = !shared_modulus.is_zero() && (shared_modulus.is_one() || (cert.n % shared_modulus).is_one());
    if (!ok) {
      throw AssemblyError("multiplier", "assemble: " + cert.n.to_string() + " is not 1 mod " +
                                            shared_modulus.to_string());
    }
  }
  cert.prime_factors = std::move(sorted);
  return cert;
}

}  // namespace carmichael
