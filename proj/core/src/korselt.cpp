#include "carmichael/korselt.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <thread>

#include "carmichael/errors.hpp"
#include "carmichael/smooth_sieve.hpp"

namespace carmichael {

std::string_view to_string(Mode mode) {
  switch (mode) {
    case Mode::agp:
      return "agp";
    case Mode::erdos:
      return "erdos";
    case Mode::external:
      return "external";
  }
  return "external";
}

Mode parse_mode(std::string_view name) {
  if (name == "agp") return Mode::agp;
  if (name == "erdos") return Mode::erdos;
  if (name == "external") return Mode::external;
  throw DomainError("unknown mode '" + std::string(name) + "'");
}

bool korselt_check(const Nat& n, const Factorization& f) {
  if (f.value() != n) {
    throw DomainError("korselt_check: factorization does not multiply to " + n.to_string());
  }
  if (f.total_count() < 2 || !f.is_squarefree()) return false;
  const Nat n_minus_one = n - 1;
  return std::all_of(f.factors().begin(), f.factors().end(),
                     [&](const PrimePower& pp) { return divides(pp.prime - 1, n_minus_one); });
}

bool fermat_witness(const Nat& n, const Nat& a) {
  if (n < Nat(2)) throw DomainError("fermat_witness: n must be >= 2");
  return mod_pow(a, n, n) == a % n;
}

namespace {

// Scans odd n in [lo, hi). For every n it divides out each base prime p,
// rejecting n as soon as p^2 | n or p - 1 does not divide n - 1. What is left
// after all base primes is 1 or a single prime factor above sqrt(hi).
std::vector<std::uint64_t> scan_segment(std::uint64_t lo, std::uint64_t hi,
                                        std::span<const std::uint32_t> base_primes) {
  const std::size_t len = hi - lo;
  std::vector<std::uint32_t> rest(len);
  std::vector<std::uint8_t> factor_count(len, 0);
  std::vector<std::uint8_t> alive(len, 1);
  for (std::size_t i = 0; i < len; ++i) {
    rest[i] = static_cast<std::uint32_t>(lo + i);
    if (((lo + i) & 1) == 0) alive[i] = 0;
  }
  for (std::uint32_t p : base_primes) {
    if (p == 2) continue;
    const std::uint64_t pp = p;
    if (pp * pp >= hi) break;
    std::uint64_t first = (lo + pp - 1) / pp * pp;
    if ((first & 1) == 0) first += pp;
    for (std::uint64_t n = first; n < hi; n += 2 * pp) {
      const std::size_t i = n - lo;
      if (!alive[i]) continue;
      std::uint32_t r = rest[i] / p;
      if (r % p == 0 || (n - 1) % (pp - 1) != 0) {
        alive[i] = 0;
        continue;
      }
      rest[i] = r;
      ++factor_count[i];
    }
  }
  std::vector<std::uint64_t> survivors;
  for (std::size_t i = 0; i < len; ++i) {
    if (!alive[i]) continue;
    const std::uint64_t n = lo + i;
    unsigned count = factor_count[i];
    if (rest[i] > 1) {
      if ((n - 1) % (rest[i] - 1) != 0) continue;
      ++count;
    }
    if (count >= 2) survivors.push_back(n);
  }
  return survivors;
}

Factorization factor_survivor(std::uint64_t n, std::span<const std::uint32_t> base_primes) {
  std::vector<std::uint64_t> primes;
  std::uint64_t rest = n;
  for (std::uint32_t p : base_primes) {
    if (static_cast<std::uint64_t>(p) * p > rest) break;
    if (rest % p == 0) {
      primes.push_back(p);
      rest /= p;
      if (rest % p == 0) primes.push_back(p);  // caller's korselt_check rejects
      while (rest % p == 0) rest /= p;
    }
  }
  if (rest > 1) primes.push_back(rest);
  std::vector<PrimePower> pp;
  for (std::uint64_t p : primes) {
    if (!pp.empty() && pp.back().prime == Nat(p)) {
      ++pp.back().exponent;
    } else {
      pp.push_back({Nat(p), 1});
    }
  }
  return Factorization::from_factors(std::move(pp));
}

}  // namespace

std::vector<CarmichaelEntry> enumerate_carmichael(std::uint64_t limit, const EnumerationOptions& options) {
  if (limit > kEnumerationCap) {
    throw CapacityError("enumerate_carmichael: limit " + std::to_string(limit) + " exceeds cap " +
                        std::to_string(kEnumerationCap));
  }
  if (options.segment_length == 0) throw DomainError("enumerate_carmichael: segment length must be >= 1");
  std::vector<CarmichaelEntry> out;
  if (limit <= 3) return out;

  const auto root = static_cast<std::uint64_t>(std::sqrt(static_cast<long double>(limit))) + 2;
  std::vector<std::uint32_t> base_primes;
  for (std::uint64_t p : primes_up_to(root)) base_primes.push_back(static_cast<std::uint32_t>(p));

  const std::uint64_t seg = options.segment_length;
  const std::uint64_t segments = (limit + seg - 1) / seg;
  std::vector<std::vector<std::uint64_t>> found(segments);

  const unsigned threads = std::max(1u, std::min<unsigned>(options.threads, static_cast<unsigned>(segments)));
  auto worker = [&](unsigned id) {
    for (std::uint64_t s = id; s < segments; s += threads) {
      const std::uint64_t lo = s * seg;
      const std::uint64_t hi = std::min(limit, lo + seg);
      found[s] = scan_segment(lo, hi, base_primes);
    }
  };
  if (threads == 1) {
    worker(0);
  } else {
    std::vector<std::jthread> pool;
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker, t);
  }

  for (const auto& segment : found) {
    for (std::uint64_t n : segment) {
      Factorization f = factor_survivor(n, base_primes);
      if (korselt_check(Nat(n), f)) out.push_back({n, std::move(f)});
    }
  }
  return out;
}

std::uint64_t CensusTable::total() const noexcept {
  std::uint64_t t = other;
  for (const auto& [residue, count] : counts) t += count;
  return t;
}

CensusTable census_of(std::span<const CarmichaelEntry> entries, std::uint64_t limit, std::uint64_t modulus) {
  if (modulus == 0) throw DomainError("census: modulus must be >= 1");
  if (modulus > kCensusModulusCap) {
    throw CapacityError("census: modulus " + std::to_string(modulus) + " exceeds cap " +
                        std::to_string(kCensusModulusCap));
  }
  CensusTable table;
  table.limit = limit;
  table.modulus = modulus;
  for (std::uint64_t r = 0; r < modulus; ++r) {
    if (std::gcd(r, modulus) == 1) table.counts[r] = 0;
  }
  for (const auto& e : entries) {
    if (e.n >= limit) continue;
    const std::uint64_t r = e.n % modulus;
    auto it = table.counts.find(r);
    if (it == table.counts.end()) {
      ++table.other;
    } else {
      ++it->second;
    }
  }
  return table;
}

CensusTable census(std::uint64_t limit, std::uint64_t modulus, const EnumerationOptions& options) {
  if (modulus == 0) throw DomainError("census: modulus must be >= 1");
  const auto entries = enumerate_carmichael(limit, options);
  return census_of(entries, limit, modulus);
}

}  // namespace carmichael
