#include "carmichael/arith.hpp"

#include <algorithm>
#include <array>
#include <map>
#include <string>

#include "carmichael/errors.hpp"

namespace carmichael {

namespace {

constexpr std::array<std::uint64_t, 12> kWitnesses = {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37};

bool strong_probable_prime_u64(std::uint64_t n, std::uint64_t a) {
  std::uint64_t d = n - 1;
  unsigned s = 0;
  while ((d & 1) == 0) {
    d >>= 1;
    ++s;
  }
  std::uint64_t x = pow_mod(a % n, d, n);
  if (x == 1 || x == n - 1) return true;
  for (unsigned r = 1; r < s; ++r) {
    x = mul_mod(x, x, n);
    if (x == n - 1) return true;
  }
  return false;
}

bool strong_probable_prime(const mpz_class& n, unsigned long a) {
  mpz_class d = n - 1;
  const mp_bitcnt_t s = mpz_scan1(d.get_mpz_t(), 0);
  mpz_fdiv_q_2exp(d.get_mpz_t(), d.get_mpz_t(), s);
  mpz_class x;
  const mpz_class base = a;
  mpz_powm(x.get_mpz_t(), base.get_mpz_t(), d.get_mpz_t(), n.get_mpz_t());
  const mpz_class minus_one = n - 1;
  if (x == 1 || x == minus_one) return true;
  for (mp_bitcnt_t r = 1; r < s; ++r) {
    x = x * x % n;
    if (x == minus_one) return true;
  }
  return false;
}

// Halves v modulo odd n; v in [0, 2n), result in [0, n).
void half_mod(mpz_class& v, const mpz_class& n) {
  if (mpz_odd_p(v.get_mpz_t())) v += n;
  mpz_fdiv_q_2exp(v.get_mpz_t(), v.get_mpz_t(), 1);
  if (v >= n) v -= n;
}

// Strong Lucas probable prime test with Selfridge parameters (P = 1).
bool strong_lucas_probable_prime(const mpz_class& n) {
  if (mpz_perfect_square_p(n.get_mpz_t())) return false;
  mpz_class D = 5;
  for (;;) {
    const int j = mpz_jacobi(D.get_mpz_t(), n.get_mpz_t());
    if (j == -1) break;
    if (j == 0) {
      mpz_class absD = abs(D);
      if (absD != n) return false;
    }
    D = sgn(D) > 0 ? mpz_class(-(D + 2)) : mpz_class(-(D - 2));
  }
  const mpz_class Q = (1 - D) / 4;

  mpz_class d = n + 1;
  const mp_bitcnt_t s = mpz_scan1(d.get_mpz_t(), 0);
  mpz_fdiv_q_2exp(d.get_mpz_t(), d.get_mpz_t(), s);

  auto reduce = [&n](mpz_class& v) { mpz_mod(v.get_mpz_t(), v.get_mpz_t(), n.get_mpz_t()); };

  mpz_class U = 1;
  mpz_class V = 1;
  mpz_class Qk = Q;
  reduce(Qk);
  mpz_class Dm = D;
  reduce(Dm);
  for (long bit = static_cast<long>(mpz_sizeinbase(d.get_mpz_t(), 2)) - 2; bit >= 0; --bit) {
    U = U * V;
    reduce(U);
    V = V * V - 2 * Qk;
    reduce(V);
    Qk = Qk * Qk;
    reduce(Qk);
    if (mpz_tstbit(d.get_mpz_t(), static_cast<mp_bitcnt_t>(bit))) {
      mpz_class U1 = U + V;
      half_mod(U1, n);
      mpz_class V1 = Dm * U + V;
      reduce(V1);
      half_mod(V1, n);
      U = U1;
      V = V1;
      Qk = Qk * Q;
      reduce(Qk);
    }
  }
  if (U == 0 || V == 0) return true;
  for (mp_bitcnt_t r = 1; r < s; ++r) {
    V = V * V - 2 * Qk;
    reduce(V);
    if (V == 0) return true;
    Qk = Qk * Qk;
    reduce(Qk);
  }
  return false;
}

class RhoBudget {
 public:
  explicit RhoBudget(std::uint64_t iterations) : left_(iterations) {}
  bool spend(std::uint64_t n) {
    if (n > left_) {
      left_ = 0;
      return false;
    }
    left_ -= n;
    return true;
  }

 private:
  std::uint64_t left_;
};

// Brent's variant of Pollard rho. Returns a nontrivial factor or 0 when the
// budget runs out.
mpz_class find_factor(const mpz_class& n, RhoBudget& budget) {
  if (mpz_even_p(n.get_mpz_t())) return 2;
  for (unsigned long c = 1;; ++c) {
    auto f = [&](const mpz_class& v) {
      mpz_class r = v * v + c;
      mpz_mod(r.get_mpz_t(), r.get_mpz_t(), n.get_mpz_t());
      return r;
    };
    constexpr std::uint64_t kBlock = 128;
    mpz_class y = 2;
    mpz_class x;
    mpz_class ys;
    mpz_class q = 1;
    mpz_class g = 1;
    std::uint64_t r = 1;
    do {
      x = y;
      if (!budget.spend(r)) return 0;
      for (std::uint64_t i = 0; i < r; ++i) y = f(y);
      std::uint64_t k = 0;
      do {
        ys = y;
        const std::uint64_t steps = std::min(kBlock, r - k);
        if (!budget.spend(steps)) return 0;
        for (std::uint64_t i = 0; i < steps; ++i) {
          y = f(y);
          q = q * abs(x - y) % n;
        }
        mpz_gcd(g.get_mpz_t(), q.get_mpz_t(), n.get_mpz_t());
        k += kBlock;
      } while (k < r && g == 1);
      r *= 2;
    } while (g == 1);
    if (g == n) {
      do {
        if (!budget.spend(1)) return 0;
        ys = f(ys);
        mpz_class diff = abs(x - ys);
        mpz_gcd(g.get_mpz_t(), diff.get_mpz_t(), n.get_mpz_t());
      } while (g == 1);
    }
    if (g != n) return g;
  }
}

void split(const mpz_class& n, RhoBudget& budget, std::map<mpz_class, unsigned>& out) {
  if (n == 1) return;
  if (primality(Nat(n)).prime) {
    ++out[n];
    return;
  }
  const mpz_class f = find_factor(n, budget);
  if (f == 0) throw UnfactoredError(n.get_str());
  split(f, budget, out);
  split(n / f, budget, out);
}

std::vector<PrimePower> merge(const std::vector<PrimePower>& a, const std::vector<PrimePower>& b,
                              bool take_max) {
  std::vector<PrimePower> out;
  out.reserve(a.size() + b.size());
  std::size_t i = 0;
  std::size_t j = 0;
  while (i < a.size() || j < b.size()) {
    if (j == b.size() || (i < a.size() && a[i].prime < b[j].prime)) {
      out.push_back(a[i++]);
    } else if (i == a.size() || b[j].prime < a[i].prime) {
      out.push_back(b[j++]);
    } else {
      const unsigned e = take_max ? std::max(a[i].exponent, b[j].exponent)
                                  : a[i].exponent + b[j].exponent;
      out.push_back({a[i].prime, e});
      ++i;
      ++j;
    }
  }
  return out;
}

}  // namespace

// --- Factorization -----------------------------------------------------------

Factorization Factorization::from_factors(std::vector<PrimePower> factors) {
  Factorization f;
  for (std::size_t i = 0; i < factors.size(); ++i) {
    if (factors[i].exponent == 0) throw DomainError("factorization: zero exponent");
    if (i > 0 && !(factors[i - 1].prime < factors[i].prime)) {
      throw DomainError("factorization: primes not strictly ascending");
    }
    const PrimalityVerdict v = primality(factors[i].prime);
    if (!v.prime) throw DomainError("factorization: " + factors[i].prime.to_string() + " is not prime");
    f.probabilistic_ = f.probabilistic_ || v.probabilistic;
  }
  f.factors_ = std::move(factors);
  return f;
}

Factorization Factorization::from_primes(std::span<const Nat> primes) {
  std::vector<PrimePower> pp;
  pp.reserve(primes.size());
  for (const Nat& p : primes) pp.push_back({p, 1});
  std::sort(pp.begin(), pp.end(), [](const auto& l, const auto& r) { return l.prime < r.prime; });
  return from_factors(std::move(pp));
}

Factorization Factorization::from_primes(std::span<const std::uint64_t> primes) {
  std::vector<Nat> nats(primes.begin(), primes.end());
  return from_primes(std::span<const Nat>(nats));
}

Nat Factorization::value() const {
  Nat v = 1;
  for (const auto& [p, e] : factors_) v *= pow(p, e);
  return v;
}

std::uint64_t Factorization::total_count() const noexcept {
  std::uint64_t n = 0;
  for (const auto& pp : factors_) n += pp.exponent;
  return n;
}

bool Factorization::is_squarefree() const noexcept {
  return std::all_of(factors_.begin(), factors_.end(),
                     [](const PrimePower& pp) { return pp.exponent == 1; });
}

Nat Factorization::largest_prime() const { return factors_.empty() ? Nat(1) : factors_.back().prime; }

Factorization operator*(const Factorization& lhs, const Factorization& rhs) {
  Factorization f;
  f.factors_ = merge(lhs.factors_, rhs.factors_, false);
  f.probabilistic_ = lhs.probabilistic_ || rhs.probabilistic_;
  return f;
}

// --- word-sized helpers -------------------------------------------------------

std::uint64_t pow_mod(std::uint64_t base, std::uint64_t exponent, std::uint64_t modulus) {
  if (modulus == 0) throw DomainError("pow_mod: modulus 0");
  std::uint64_t result = 1 % modulus;
  base %= modulus;
  while (exponent > 0) {
    if (exponent & 1) result = mul_mod(result, base, modulus);
    base = mul_mod(base, base, modulus);
    exponent >>= 1;
  }
  return result;
}

std::uint64_t inverse_mod(std::uint64_t a, std::uint64_t m) {
  if (m == 0) throw DomainError("inverse_mod: modulus 0");
  if (m == 1) return 0;
  __int128 old_r = a % m;
  __int128 r = m;
  __int128 old_s = 1;
  __int128 s = 0;
  while (r != 0) {
    const __int128 q = old_r / r;
    old_r -= q * r;
    std::swap(old_r, r);
    old_s -= q * s;
    std::swap(old_s, s);
  }
  if (old_r != 1) {
    throw DomainError("inverse_mod: " + std::to_string(a) + " is not invertible mod " + std::to_string(m));
  }
  __int128 inv = old_s % static_cast<__int128>(m);
  if (inv < 0) inv += m;
  return static_cast<std::uint64_t>(inv);
}

bool is_prime_u64(std::uint64_t n) {
  if (n < 2) return false;
  for (std::uint64_t p : kWitnesses) {
    if (n % p == 0) return n == p;
  }
  if (n < 41 * 41) return true;
  return std::all_of(kWitnesses.begin(), kWitnesses.end(),
                     [n](std::uint64_t a) { return strong_probable_prime_u64(n, a); });
}

// --- arbitrary precision -------------------------------------------------------

Nat mod_pow(const Nat& base, const Nat& exponent, const Nat& modulus) {
  if (modulus.is_zero()) throw DomainError("mod_pow: modulus must be >= 1");
  mpz_class r;
  mpz_powm(r.get_mpz_t(), base.get_mpz_t(), exponent.get_mpz_t(), modulus.get_mpz_t());
  return Nat(std::move(r));
}

PrimalityVerdict primality(const Nat& n) {
  if (n.fits_u64()) return {is_prime_u64(n.to_u64()), false};
  const mpz_class& z = n.mpz();
  for (unsigned long p : {2ul, 3ul, 5ul, 7ul, 11ul, 13ul, 17ul, 19ul, 23ul, 29ul, 31ul, 37ul}) {
    if (mpz_divisible_ui_p(z.get_mpz_t(), p)) return {false, false};
  }
  const bool prime = strong_probable_prime(z, 2) && strong_lucas_probable_prime(z);
  return {prime, prime};
}

bool is_prime(const Nat& n) { return primality(n).prime; }

Factorization factorize(const Nat& n, const FactorBudget& budget) {
  if (n.is_zero()) throw DomainError("factorize: n must be >= 1");
  std::map<mpz_class, unsigned> found;
  mpz_class rest = n.mpz();

  auto strip = [&](unsigned long d) {
    unsigned e = 0;
    while (mpz_divisible_ui_p(rest.get_mpz_t(), d)) {
      mpz_divexact_ui(rest.get_mpz_t(), rest.get_mpz_t(), d);
      ++e;
    }
    if (e > 0) found[mpz_class(d)] += e;
  };

  strip(2);
  std::uint64_t d = 3;
  for (; d <= budget.trial_bound; d += 2) {
    if (mpz_cmp_ui(rest.get_mpz_t(), 1) == 0) break;
    const mpz_class dd = mpz_class(static_cast<unsigned long>(d)) * static_cast<unsigned long>(d);
    if (dd > rest) {
      found[rest] += 1;
      rest = 1;
      break;
    }
    strip(static_cast<unsigned long>(d));
  }

  if (rest != 1) {
    RhoBudget rho(budget.rho_iterations);
    split(rest, rho, found);
  }

  std::vector<PrimePower> factors;
  factors.reserve(found.size());
  for (const auto& [p, e] : found) factors.push_back({Nat(p), e});
  return Factorization::from_factors(std::move(factors));
}

Congruence crt(std::span<const Congruence> congruences) {
  if (congruences.empty()) throw DomainError("crt: empty system");
  for (const auto& c : congruences) {
    if (c.modulus.is_zero()) throw DomainError("crt: modulus must be >= 1");
  }
  mpz_class r = congruences[0].residue.mpz() % congruences[0].modulus.mpz();
  mpz_class m = congruences[0].modulus.mpz();

  for (std::size_t j = 1; j < congruences.size(); ++j) {
    const mpz_class& mj = congruences[j].modulus.mpz();
    const mpz_class rj = congruences[j].residue.mpz() % mj;
    mpz_class g;
    mpz_gcd(g.get_mpz_t(), m.get_mpz_t(), mj.get_mpz_t());
    mpz_class diff = rj - r;
    if (!mpz_divisible_p(diff.get_mpz_t(), g.get_mpz_t())) {
      for (std::size_t i = 0; i < j; ++i) {
        const Congruence& ci = congruences[i];
        const Congruence& cj = congruences[j];
        const Nat gij = gcd(ci.modulus, cj.modulus);
        mpz_class dij = ci.residue.mpz() - cj.residue.mpz();
        if (!mpz_divisible_p(dij.get_mpz_t(), gij.get_mpz_t())) {
          throw ConflictError(i, j,
                              "crt: inconsistent congruences #" + std::to_string(i) + " (" +
                                  ci.residue.to_string() + " mod " + ci.modulus.to_string() + ") and #" +
                                  std::to_string(j) + " (" + cj.residue.to_string() + " mod " +
                                  cj.modulus.to_string() + ")");
        }
      }
      // Pairwise consistency implies global consistency, so this is unreachable.
      throw ConflictError(0, j, "crt: inconsistent system at congruence #" + std::to_string(j));
    }
    const mpz_class m_g = m / g;
    const mpz_class mj_g = mj / g;
    mpz_class inv;
    mpz_invert(inv.get_mpz_t(), m_g.get_mpz_t(), mj_g.get_mpz_t());
    if (mj_g == 1) inv = 0;
    mpz_class t = (diff / g) * inv;
    mpz_mod(t.get_mpz_t(), t.get_mpz_t(), mj_g.get_mpz_t());
    r += m * t;
    m *= mj_g;
    mpz_mod(r.get_mpz_t(), r.get_mpz_t(), m.get_mpz_t());
  }
  return {Nat(r), Nat(m)};
}

int jacobi(const Nat& a, const Nat& n) {
  if (n.is_zero() || n.is_even()) throw DomainError("jacobi: n must be odd and >= 1, got " + n.to_string());
  return mpz_jacobi(a.get_mpz_t(), n.get_mpz_t());
}

Nat euler_phi(const Factorization& f) {
  Nat phi = 1;
  for (const auto& [p, e] : f.factors()) phi *= pow(p, e - 1) * (p - 1);
  return phi;
}

Nat carmichael_lambda(const Factorization& f) {
  Nat l = 1;
  for (const auto& [p, e] : f.factors()) {
    Nat local;
    if (p == Nat(2)) {
      local = e <= 2 ? pow(p, e - 1) : pow(p, e - 2);
    } else {
      local = pow(p, e - 1) * (p - 1);
    }
    l = lcm(l, local);
  }
  return l;
}

Factorization euler_phi_factorization(const Factorization& f, const FactorBudget& budget) {
  Factorization out;
  for (const auto& [p, e] : f.factors()) {
    if (e > 1) out = out * Factorization::from_factors({{p, e - 1}});
    out = out * factorize(p - 1, budget);
  }
  return out;
}

Factorization carmichael_lambda_factorization(const Factorization& f, const FactorBudget& budget) {
  std::vector<PrimePower> acc;
  for (const auto& [p, e] : f.factors()) {
    Factorization local;
    if (p == Nat(2)) {
      const unsigned k = e <= 2 ? e - 1 : e - 2;
      if (k > 0) local = Factorization::from_factors({{p, k}});
    } else {
      local = factorize(p - 1, budget);
      if (e > 1) local = local * Factorization::from_factors({{p, e - 1}});
    }
    acc = merge(acc, local.factors(), true);
  }
  return Factorization::from_factors(std::move(acc));
}

Nat multiplicative_order(const Nat& a, const Nat& m, const Factorization& lambda_fact) {
  if (m.is_zero()) throw DomainError("multiplicative_order: modulus must be >= 1");
  if (!gcd(a, m).is_one()) {
    throw DomainError("multiplicative_order: gcd(" + a.to_string() + ", " + m.to_string() + ") != 1");
  }
  if (m.is_one()) return 1;
  Nat order = lambda_fact.value();
  if (!mod_pow(a, order, m).is_one()) {
    throw DomainError("multiplicative_order: supplied exponent is not a multiple of the order");
  }
  for (const auto& [p, e] : lambda_fact.factors()) {
    for (unsigned i = 0; i < e; ++i) {
      const Nat reduced = order / p;
      if (!mod_pow(a, reduced, m).is_one()) break;
      order = reduced;
    }
  }
  return order;
}

std::vector<Nat> divisors(const Factorization& f) {
  std::vector<Nat> out{Nat(1)};
  for (const auto& [p, e] : f.factors()) {
    const std::size_t base = out.size();
    Nat pk = 1;
    for (unsigned k = 1; k <= e; ++k) {
      pk *= p;
      for (std::size_t i = 0; i < base; ++i) out.push_back(out[i] * pk);
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace carmichael
