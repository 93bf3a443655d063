#include "carmichael/smooth_sieve.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <numeric>

#include "carmichael/arith.hpp"
#include "carmichael/errors.hpp"

namespace carmichael {

namespace {

constexpr std::uint64_t kSegment = std::uint64_t{1} << 20;

std::uint64_t parse_u64(std::string_view text, std::string_view what) {
  std::uint64_t v = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size() || text.empty()) {
    throw DomainError("cannot parse " + std::string(what) + " '" + std::string(text) + "'");
  }
  return v;
}

std::uint64_t isqrt(std::uint64_t n) {
  auto r = static_cast<std::uint64_t>(std::sqrt(static_cast<long double>(n)));
  while (r * r > n) --r;
  while ((r + 1) * (r + 1) <= n) ++r;
  return r;
}

// Calls visit(n, P(n)) for every n in [lo, hi] in segments.
template <typename Visit>
void for_each_largest_factor(std::uint64_t lo, std::uint64_t hi, Visit&& visit) {
  for (std::uint64_t s = lo; s <= hi; s += kSegment) {
    const std::uint64_t e = std::min(hi, s + kSegment - 1);
    const LargestPrimeFactorTable table(s, e);
    for (std::uint64_t n = s; n <= e; ++n) visit(n, table(n));
    if (e == hi) break;
  }
}

}  // namespace

Rational Rational::parse(std::string_view text) {
  Rational r;
  if (const auto slash = text.find('/'); slash != std::string_view::npos) {
    r.num = parse_u64(text.substr(0, slash), "rational numerator");
    r.den = parse_u64(text.substr(slash + 1), "rational denominator");
  } else if (const auto dot = text.find('.'); dot != std::string_view::npos) {
    const std::string_view whole = text.substr(0, dot);
    const std::string_view frac = text.substr(dot + 1);
    if (frac.empty() || frac.size() > 18) throw DomainError("cannot parse rational '" + std::string(text) + "'");
    r.den = 1;
    for (std::size_t i = 0; i < frac.size(); ++i) r.den *= 10;
    const std::uint64_t w = whole.empty() ? 0 : parse_u64(whole, "rational");
    r.num = w * r.den + parse_u64(frac, "rational");
  } else {
    r.num = parse_u64(text, "rational");
  }
  if (r.den == 0) throw DomainError("rational with zero denominator");
  const std::uint64_t g = std::gcd(r.num, r.den);
  if (g > 1) {
    r.num /= g;
    r.den /= g;
  }
  return r;
}

std::string Rational::to_string() const {
  return den == 1 ? std::to_string(num) : std::to_string(num) + "/" + std::to_string(den);
}

void SmoothPrimeQuery::validate() const {
  if (y < 2) throw DomainError("smoothness bound y must be >= 2");
  if (!(Rational{1, 1} < theta) || !(theta < Rational{2, 1})) {
    throw DomainError("theta must satisfy 1 < theta < 2, got " + theta.to_string());
  }
  if (M == 0) throw DomainError("M must be >= 1");
}

std::uint64_t SmoothPrimeQuery::window_high() const {
  validate();
  const Nat power = pow(Nat(y), theta.num);
  mpz_class root;
  mpz_root(root.get_mpz_t(), power.get_mpz_t(), theta.den);
  const Nat r(root);
  if (!r.fits_u64() || r.to_u64() > kSieveCapacity) {
    throw CapacityError("y^theta = " + r.to_string() + " exceeds sieve capacity");
  }
  return r.to_u64();
}

std::uint64_t SmoothPrimeQuery::window_low() const {
  validate();
  const long double yl = static_cast<long double>(y);
  const long double v = std::pow(yl, theta.value()) / std::log(yl);
  return static_cast<std::uint64_t>(std::ceil(v));
}

std::vector<std::uint64_t> primes_up_to(std::uint64_t n) {
  std::vector<std::uint64_t> out;
  if (n < 2) return out;
  std::vector<bool> composite(n + 1, false);
  for (std::uint64_t i = 2; i <= n; ++i) {
    if (composite[i]) continue;
    out.push_back(i);
    for (std::uint64_t j = i * i; j <= n; j += i) composite[j] = true;
  }
  return out;
}

std::uint64_t largest_prime_factor(std::uint64_t n) {
  if (n == 0) throw DomainError("largest_prime_factor: n must be >= 1");
  std::uint64_t largest = 1;
  for (std::uint64_t d = 2; d * d <= n; d += (d == 2 ? 1 : 2)) {
    while (n % d == 0) {
      largest = d;
      n /= d;
    }
  }
  return n > 1 ? n : largest;
}

Nat largest_prime_factor(const Nat& n) {
  if (n.is_zero()) throw DomainError("largest_prime_factor: n must be >= 1");
  return factorize(n).largest_prime();
}

LargestPrimeFactorTable::LargestPrimeFactorTable(std::uint64_t lo, std::uint64_t hi) : lo_(lo), hi_(hi) {
  if (lo == 0 || lo > hi) throw DomainError("largest prime factor table needs 1 <= lo <= hi");
  const std::size_t len = hi - lo + 1;
  values_.assign(len, 1);
  std::vector<std::uint64_t> rest(len);
  std::iota(rest.begin(), rest.end(), lo);
  for (std::uint64_t p : primes_up_to(isqrt(hi))) {
    for (std::uint64_t n = (lo + p - 1) / p * p; n <= hi; n += p) {
      const std::size_t i = n - lo;
      do {
        rest[i] /= p;
      } while (rest[i] % p == 0);
      values_[i] = p;
    }
  }
  for (std::size_t i = 0; i < len; ++i) {
    if (rest[i] > 1) values_[i] = rest[i];
  }
}

std::vector<std::uint64_t> build_q(const SmoothPrimeQuery& query, BuildQStats* stats) {
  query.validate();
  const std::uint64_t lo = std::max<std::uint64_t>(query.window_low(), 2);
  const std::uint64_t hi = query.window_high();
  if (stats) {
    stats->window_low = query.window_low();
    stats->window_high = hi;
    stats->coprimality_rejections = 0;
  }
  std::vector<std::uint64_t> q_set;
  if (lo > hi) return q_set;

  const std::uint64_t phi_m = euler_phi(factorize(Nat(query.M))).to_u64();
  const std::uint64_t step = 4 * phi_m;

  for_each_largest_factor(lo - 1, hi - 1, [&](std::uint64_t shifted, std::uint64_t lpf) {
    const std::uint64_t q = shifted + 1;
    if (q % step != step - 1) return;
    if (query.M % q == 0) return;
    if (lpf > query.y) return;
    if (!is_prime_u64(q)) return;
    if (query.M > 2 && std::gcd((q - 1) / 2, phi_m) != 1) {
      if (stats) ++stats->coprimality_rejections;
      return;
    }
    q_set.push_back(q);
  });
  return q_set;
}

std::uint64_t count_smooth_primes(std::uint64_t z, std::uint64_t v, std::uint64_t d, std::uint64_t b) {
  if (d == 0) throw DomainError("count_smooth_primes: d must be >= 1");
  if (z > kSieveCapacity) throw CapacityError("count_smooth_primes: z exceeds sieve capacity");
  if (z <= 2) return 0;
  const std::uint64_t residue = b % d;
  std::uint64_t count = 0;
  for_each_largest_factor(1, z - 2, [&](std::uint64_t shifted, std::uint64_t lpf) {
    const std::uint64_t q = shifted + 1;
    if (lpf <= v && q % d == residue && is_prime_u64(q)) ++count;
  });
  return count;
}

}  // namespace carmichael
